import io
import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from harmonic_convex.harmonic import (
    Domain,
    HarmonicMeasure,
    ball,
    domain_from_json,
    domain_to_json,
    ellipse,
    harmonic_extension,
    harmonic_measure,
    make_boundary_mesh,
    mean_value_residual,
    measure_matrix,
    poisson_matrix,
    poisson_weights,
    polar_grid,
    sphere_points,
    total_variation,
    tv_sampling_bound,
    wos_measure,
    write_measure_csv,
)


def _kernel_density(D, M, X):
    """Poisson weights rescaled to a density against normalized surface measure."""
    return poisson_matrix(D, X, M) / M.arc_weights


# -- Poisson kernel ----------------------------------------------------------


def test_density_at_half_radius(disc, mesh256):
    dens = _kernel_density(disc, mesh256, [[0.5, 0.0]])[0]
    # nodes 0 and 128 sit at angles 0 and pi
    assert dens[0] == pytest.approx(3.0, abs=1e-12)
    assert dens[128] == pytest.approx(1.0 / 3.0, abs=1e-12)


def _fd_disc_value(g, x_ring: int, Nr: int = 40, Nt: int = 128) -> float:
    """Polar finite-difference Laplace solve on the unit disc; value at (x_ring / Nr, 0)."""
    h, dt = 1.0 / Nr, 2 * np.pi / Nt
    n = (Nr - 1) * Nt + 1

    def idx(i, j):
        return 1 + (i - 1) * Nt + np.mod(j, Nt)

    # center row: u_0 equals the mean of the first ring
    rows = [np.zeros(Nt + 1, int)]
    cols = [np.concatenate([[0], idx(1, np.arange(Nt))])]
    vals = [np.concatenate([[-1.0], np.full(Nt, 1.0 / Nt)])]
    b = np.zeros(n)
    gb = g(np.arange(Nt) * dt)
    j = np.arange(Nt)
    for i in range(1, Nr):
        r = i * h
        k = idx(i, j)
        cm, cp, ct = 1 / h**2 - 1 / (2 * h * r), 1 / h**2 + 1 / (2 * h * r), 1 / (r * dt) ** 2
        rows += [k, k, k]
        cols += [k, idx(i, j + 1), idx(i, j - 1)]
        vals += [np.full(Nt, -2 / h**2 - 2 * ct), np.full(Nt, ct), np.full(Nt, ct)]
        rows.append(k)
        cols.append(np.zeros(Nt, int) if i == 1 else idx(i - 1, j))
        vals.append(np.full(Nt, cm))
        if i == Nr - 1:
            b[k] -= cp * gb
        else:
            rows.append(k)
            cols.append(idx(i + 1, j))
            vals.append(np.full(Nt, cp))
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return float(spsolve(A, b)[idx(x_ring, 0)])


@pytest.mark.parametrize("center,expected", [(0.0, 3.0), (np.pi, 1.0 / 3.0)])
def test_density_matches_finite_difference_oracle(center, expected, disc):
    # indicator data on a short arc: u(x) / arc fraction approximates the density
    def g(t):
        return (np.abs(np.angle(np.exp(1j * (t - center)))) <= 0.1).astype(float)

    Nt = 128
    frac = g(2 * np.pi * np.arange(Nt) / Nt).mean()
    fd = _fd_disc_value(g, 20, Nr=40, Nt=Nt)
    assert fd / frac == pytest.approx(expected, rel=0.02)
    M = make_boundary_mesh(disc, Nt)
    kernel = harmonic_extension(M, g(2 * np.pi * np.arange(Nt) / Nt), [0.5, 0.0])
    assert kernel == pytest.approx(fd, abs=2e-3)


def test_center_measure_is_uniform(disc, mesh256):
    np.testing.assert_allclose(poisson_weights(disc, [0, 0], mesh256).weights, 1 / 256, rtol=1e-14)


def test_kernel_columns_are_discretely_harmonic(disc, mesh256):
    # 5-point Laplacian of x -> density(x, tau_j) for a few nodes and points
    h = 1e-3
    X0 = np.array([[0.2, 0.1], [-0.4, 0.3], [0.0, -0.5]])
    offsets = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]])
    for x in X0:
        U = _kernel_density(disc, mesh256, x + offsets)
        lap = (U[1:].sum(axis=0) - 4 * U[0]) / h**2
        assert np.max(np.abs(lap)) / np.max(U[0]) <= 1e-3


def test_kernel_matches_polar_laplace_solution(disc, mesh256):
    """Fourier-series solution of the Dirichlet problem serves as the oracle."""
    theta = 2 * np.pi * np.arange(256) / 256
    f = np.exp(np.sin(theta)) + 0.3 * np.cos(3 * theta)
    coeffs = np.fft.rfft(f) / 256
    for r, phi in [(0.3, 0.4), (0.7, 2.0), (0.85, -1.1)]:
        k = np.arange(len(coeffs))
        # real part of sum_k c_k r^|k| e^{ik phi}, doubling the non-DC modes
        mult = np.where(k == 0, 1.0, 2.0)
        mult[-1] = 1.0  # Nyquist mode
        oracle = float(np.real(np.sum(mult * coeffs * r**k * np.exp(1j * k * phi))))
        got = harmonic_extension(mesh256, f, [r * math.cos(phi), r * math.sin(phi)])
        assert got == pytest.approx(oracle, abs=1e-10)


def test_harmonic_extension_of_cosine(disc, mesh256, polar100):
    f = np.cos(2 * np.pi * np.arange(256) / 256)
    for x in polar100[::7]:
        assert harmonic_extension(mesh256, f, x) == pytest.approx(x[0], abs=1e-12)


def test_constant_and_cosine_at_center(mesh256):
    assert harmonic_extension(mesh256, np.ones(256), [0.3, -0.6]) == pytest.approx(1.0, abs=1e-14)
    f = np.cos(2 * np.pi * np.arange(256) / 256)
    assert harmonic_extension(mesh256, f, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("x,eps", [([0.0, 0.0], 0.1), ([0.3, 0.2], 0.05)])
def test_mean_value_residual_examples(disc, mesh256, x, eps):
    assert mean_value_residual(disc, x, eps, mesh256, 64) <= 1e-3


def test_mean_value_residual_small_radii(disc, mesh256):
    # the closed-form kernel is exactly harmonic, so every radius sits at rounding level
    for eps in (0.2, 0.1, 0.05, 0.01):
        assert mean_value_residual(disc, [0.0, 0.0], eps, mesh256, 64) <= 1e-12


def test_mean_value_residual_disc(disc, mesh256, polar100):
    worst = max(mean_value_residual(disc, x, 0.1, mesh256, 64) for x in polar100)
    assert worst <= 1e-12


def test_interval_measure():
    D = ball([0.0], 1.0)
    M = make_boundary_mesh(D, 2)
    np.testing.assert_allclose(poisson_weights(D, [0.4], M).weights, [0.3, 0.7], atol=1e-15)
    assert mean_value_residual(D, [0.2], 0.3, M, 2) < 1e-15


def test_three_ball_extension_of_coordinate():
    D = ball([0.0, 0.0, 0.0], 1.0)
    M = make_boundary_mesh(D, 4096)
    f = M.nodes[:, 2]
    assert harmonic_extension(M, f, [0.1, -0.2, 0.3]) == pytest.approx(0.3, abs=1e-3)


def test_shifted_ball(mesh256):
    D = ball([2.0, -1.0], 0.5)
    M = make_boundary_mesh(D, 128)
    f = M.nodes[:, 1]
    assert harmonic_extension(M, f, [2.1, -0.9]) == pytest.approx(-0.9, abs=1e-12)


# -- walk on spheres ---------------------------------------------------------


def test_wos_is_deterministic(disc, mesh256):
    a = wos_measure(disc, [0.3, 0.2], mesh256, trials=10_000, seed=5)
    b = wos_measure(disc, [0.3, 0.2], mesh256, trials=10_000, seed=5)
    c = wos_measure(disc, [0.3, 0.2], mesh256, trials=10_000, seed=6)
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.weights, c.weights)


def test_wos_center_is_uniform(disc):
    # a coarse mesh keeps the expected histogram error below 4 / sqrt(trials)
    M = make_boundary_mesh(disc, 16)
    T = 100_000
    mu = wos_measure(disc, [0.0, 0.0], M, trials=T, seed=2)
    assert total_variation(mu.weights, np.full(16, 1 / 16)) <= 4 / math.sqrt(T)


def test_wos_shell_halving_is_consistent(disc, mesh256):
    x = [0.5, 0.0]
    T = 200_000
    a = wos_measure(disc, x, mesh256, trials=T, seed=8)
    b = wos_measure(disc, x, mesh256, trials=T, seed=9, shell=0.5e-4 * disc.diameter)
    p = poisson_weights(disc, x, mesh256).weights
    # two independent histograms: sqrt(2) times the single-run bound, with slack
    assert total_variation(a.weights, b.weights) <= 2.0 * tv_sampling_bound(p, T)


def test_wos_matches_kernel(disc, mesh256):
    x = [0.5, 0.0]
    T = 200_000
    mu = wos_measure(disc, x, mesh256, trials=T, seed=1)
    p = poisson_weights(disc, x, mesh256).weights
    assert total_variation(mu.weights, p) <= 1.5 * tv_sampling_bound(p, T)


def test_wos_interval_and_ball():
    D1 = ball([0.0], 1.0)
    mu = wos_measure(D1, [0.5], make_boundary_mesh(D1, 2), trials=40_000, seed=0)
    assert mu.weights[1] == pytest.approx(0.75, abs=4 * math.sqrt(0.75 * 0.25 / 40_000))
    D3 = ball([0.0, 0.0, 0.0], 1.0)
    M3 = make_boundary_mesh(D3, 512)
    mu3 = wos_measure(D3, [0, 0, 0.4], M3, trials=50_000, seed=0)
    assert float(mu3.weights @ M3.nodes[:, 2]) == pytest.approx(0.4, abs=0.02)


def test_wos_on_ellipse_reproduces_linear_functions():
    D = ellipse(1.5, 0.8)
    M = make_boundary_mesh(D, 512)
    T = 100_000
    for x in ([0.4, 0.2], [-0.9, -0.1]):
        val = harmonic_extension(M, M.nodes[:, 0], x, trials=T, seed=3)
        # linear data is harmonic; standard error of the exit coordinate <= 1.5/sqrt(T)
        assert val == pytest.approx(x[0], abs=4 * 1.5 / math.sqrt(T) + 1e-3)


def test_ellipse_sdf():
    D = ellipse(2.0, 1.0)
    d = D.signed_distance([[0.0, 0.0], [3.0, 0.0], [0.0, 0.5], [1.0, 0.0]])
    # from (1, 0) the nearest boundary point is off-axis: min of 3c^2 - 4c + 2 is 2/3
    np.testing.assert_allclose(d, [-1.0, 1.0, -0.5, -math.sqrt(2 / 3)], atol=1e-9)


def test_measure_matrix_requires_seed_for_general_domains():
    D = ellipse(1.5, 0.8)
    M = make_boundary_mesh(D, 64)
    with pytest.raises(ValueError):
        measure_matrix(D, [[0.0, 0.0]], M)
    with pytest.raises(ValueError):
        harmonic_measure(D, [0.0, 0.0], M, trials=100)


def test_wos_rows_use_distinct_streams():
    D = ellipse(1.5, 0.8)
    M = make_boundary_mesh(D, 64)
    W = measure_matrix(D, [[0.1, 0.1], [0.1, 0.1]], M, trials=2000, seed=4)
    assert not np.array_equal(W[0], W[1])


def test_wos_errors(disc, mesh256):
    with pytest.raises(ValueError):
        wos_measure(disc, [1.2, 0.0], mesh256, trials=10, seed=0)
    with pytest.raises(ValueError):
        wos_measure(disc, [0.0, 0.0], mesh256, trials=0, seed=0)
    with pytest.raises(RuntimeError):
        wos_measure(disc, [0.0, 0.0], mesh256, trials=10, seed=0, shell=1e-300, step_budget=3)


# -- domains, meshes, points -------------------------------------------------


def test_domain_validation():
    with pytest.raises(ValueError):
        ball([0.0, 0.0], -1.0)
    with pytest.raises(ValueError):
        ball(np.zeros(4), 1.0)
    with pytest.raises(ValueError):
        Domain(m=2, kind="general", sdf=lambda X: np.ones(len(X)),
               boundary=lambda t: np.column_stack([np.cos(t), np.sin(t)]), diameter=2.0)


def test_mesh_weights(disc):
    M = make_boundary_mesh(disc, 100)
    assert M.count == 100 and abs(M.arc_weights.sum() - 1) < 1e-14
    assert len(M.neighbours()) == 100
    E = make_boundary_mesh(ellipse(2.0, 1.0), 200)
    assert abs(E.arc_weights.sum() - 1) < 1e-14
    # weights follow the parametrization speed, smallest at the ends of the major axis
    assert E.arc_weights[0] < E.arc_weights[50]


def test_polar_grid(disc):
    P = polar_grid(disc, 5, 20, 0.1)
    assert P.shape == (100, 2)
    assert np.linalg.norm(P, axis=1).max() == pytest.approx(0.9 * 0.9)
    assert all(disc.contains_ball(p, 0.1) for p in P)


def test_sphere_points():
    Y = sphere_points(np.array([1.0, 2.0]), 0.5, 16)
    np.testing.assert_allclose(np.linalg.norm(Y - [1, 2], axis=1), 0.5)
    np.testing.assert_allclose(Y.mean(axis=0), [1, 2], atol=1e-15)


def test_measure_validation(mesh256):
    with pytest.raises(ValueError):
        HarmonicMeasure(mesh256, np.full(256, 1.0))


def test_mean_value_residual_rejects_escaping_ball(disc, mesh256):
    with pytest.raises(ValueError):
        mean_value_residual(disc, [0.95, 0.0], 0.1, mesh256, 64)


# -- I/O ---------------------------------------------------------------------


def test_domain_json_round_trip(disc):
    doc = domain_to_json(disc, 64)
    assert doc == {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0, "mesh_count": 64}
    D, M = domain_from_json(doc)
    assert D.radius == 1.0 and M.count == 64


def test_measure_csv(disc):
    M = make_boundary_mesh(disc, 8)
    mu = poisson_weights(disc, [0.5, 0.0], M)
    buf = io.StringIO()
    write_measure_csv(mu, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "node_index,tau_0,tau_1,weight"
    assert len(lines) == 9
    parsed = np.array([float(r.split(",")[-1]) for r in lines[1:]])
    assert np.array_equal(parsed, mu.weights)
