import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nwspec import (
    Domain,
    DomainTagError,
    GaussianSpec,
    GridMismatchError,
    GridSpec,
    PhaseSpaceFunction,
    PhaseSpacePoint,
    convolve,
    dump_csv,
    gaussian_family,
    inverse_symplectic_fourier,
    load_csv,
    symplectic_form,
    symplectic_fourier,
)
from nwspec.phase_space import delta_spike, fourier_at, grid_integral, upsample2

coord = st.floats(-10, 10, allow_nan=False)
point = st.builds(lambda q, p: PhaseSpacePoint([q], [p]), coord, coord)


def test_grid_spacings(grid):
    assert grid.dq == pytest.approx(20 / 256)
    assert grid.dp == pytest.approx(np.pi / 10)
    assert grid.q[128] == 0 and grid.p[128] == 0
    assert grid.q[0] == -10


@pytest.mark.parametrize("n", [0, 7, 100, 255])
def test_grid_rejects_bad_size(n):
    with pytest.raises(ValueError):
        GridSpec(points_N=n)


def test_symplectic_form_examples():
    x = PhaseSpacePoint([1.0], [0.0])
    y = PhaseSpacePoint([0.0], [1.0])
    assert symplectic_form(x, y) == 1.0
    assert symplectic_form(y, x) == -1.0
    assert symplectic_form(x, x) == 0.0


@given(point, point)
def test_symplectic_form_antisymmetric(x, y):
    assert symplectic_form(x, y) == -symplectic_form(y, x)


@given(point, point, point, st.floats(-3, 3))
def test_symplectic_form_bilinear(x, y, z, c):
    xz = PhaseSpacePoint(x.q + c * z.q, x.p + c * z.p)
    lhs = symplectic_form(xz, y)
    rhs = symplectic_form(x, y) + c * symplectic_form(z, y)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_gaussian_transform_matches_closed_form(grid):
    spec = GaussianSpec(np.array([[1.5, 0.3], [0.3, 0.8]]), center=[0.4, -0.2])
    Fhat = symplectic_fourier(spec.on_grid(grid))
    exact = spec.fourier_on_grid(grid)
    assert Fhat.domain == Domain.SYMPLECTIC_FOURIER
    AQ, AP = grid.dual_mesh()
    inner = (np.abs(AQ) < 5) & (np.abs(AP) < 20)
    assert np.max(np.abs(Fhat.values - exact.values)[inner]) < 1e-10
    assert Fhat.values[128, 128] == pytest.approx(1.0, abs=1e-12)


def test_delta_transform_is_one(grid):
    Fhat = symplectic_fourier(delta_spike(grid))
    assert np.max(np.abs(Fhat.values - 1.0)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.5, 2.0))
def test_round_trip_and_parseval(q0, p0, width):
    grid = GridSpec()
    F = GaussianSpec(np.eye(2) / width, center=[q0, p0]).on_grid(grid)
    Fhat = symplectic_fourier(F)
    back = inverse_symplectic_fourier(Fhat)
    assert np.max(np.abs(back.values - F.values)) < 1e-12
    # Plancherel: int |F|^2 dxi = (2 pi)^-2 int |F^|^2 da
    direct = np.sum(np.abs(F.values) ** 2) * grid.dxi
    dual = np.sum(np.abs(Fhat.values) ** 2) * grid.daq * grid.dap / (2 * np.pi) ** 2
    assert dual == pytest.approx(direct, rel=1e-10)


def test_convolution_against_brute_force(grid):
    F = GaussianSpec(np.diag([2.0, 0.5]), center=[0.5, 0.0]).on_grid(grid)
    G = GaussianSpec(np.diag([1.0, 1.0]), center=[-0.3, 1.0]).on_grid(grid)
    C = convolve(F, G)
    Q, P = grid.mesh()
    for i, j in [(128, 128), (120, 140), (135, 125)]:
        q, p = grid.q[i], grid.p[j]
        # G(xi - xi') sampled exactly, summed against F
        Gs = GaussianSpec(np.diag([1.0, 1.0]), center=[-0.3, 1.0])(np.stack([q - Q, p - P], -1))
        brute = np.sum(F.values * Gs) * grid.dxi
        assert C.values[i, j] == pytest.approx(brute, abs=1e-12)


def test_convolution_requires_direct_domain(grid):
    F = gaussian_family(1.0).on_grid(grid)
    with pytest.raises(DomainTagError):
        convolve(symplectic_fourier(F), F)
    with pytest.raises(DomainTagError):
        symplectic_fourier(symplectic_fourier(F))


def test_grid_mismatch(grid):
    F = gaussian_family(1.0).on_grid(grid)
    G = gaussian_family(1.0).on_grid(GridSpec(points_N=128))
    with pytest.raises(GridMismatchError):
        convolve(F, G)


def test_integral_of_normalized_gaussian(grid):
    assert grid_integral(gaussian_family(0.7).on_grid(grid)) == pytest.approx(1.0, abs=1e-12)


def test_fourier_at_matches_grid_values(grid):
    F = gaussian_family(1.0).on_grid(grid)
    Fhat = symplectic_fourier(F)
    idx = [(128, 128), (130, 125), (100, 140)]
    pts = np.array([[grid.aq[i], grid.ap[j]] for i, j in idx])
    vals = fourier_at(F, pts)
    for v, (i, j) in zip(vals, idx):
        assert v == pytest.approx(Fhat.values[i, j], abs=1e-12)
    off = np.array([[0.37, -1.21]])
    assert fourier_at(F, off)[0] == pytest.approx(gaussian_family(1.0).fourier(off)[0], abs=1e-12)


def test_upsample_interpolates_band_limited_data():
    x = np.arange(64) / 64
    f = np.cos(2 * np.pi * 3 * x)
    up = upsample2(f)
    assert np.allclose(up[::2], f)
    assert np.allclose(up[1::2], np.cos(2 * np.pi * 3 * (x + 1 / 128)), atol=1e-12)


def test_csv_round_trip(tmp_path, grid):
    F = gaussian_family(1.0).on_grid(grid)
    path = dump_csv(F, tmp_path / "g.csv")
    assert path.read_text().splitlines()[0] == "q,p,value_re,value_im"
    G = load_csv(path, grid)
    assert np.array_equal(G.values, F.values)


def test_values_are_read_only(grid):
    F = PhaseSpaceFunction(grid, np.zeros((256, 256)))
    with pytest.raises(ValueError):
        F.values[0, 0] = 1.0
