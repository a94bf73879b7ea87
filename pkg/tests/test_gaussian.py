import numpy as np
import pytest
from scipy import integrate

from nwspec import GaussianSpec, gaussian_eta0, gaussian_family, squeezed_gaussian
from nwspec.errors import DimensionError
from nwspec.gaussian import symplectic_matrix
from nwspec.spectrum import Verdict, operator_positivity_test


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_eta0_of_family(alpha):
    assert gaussian_eta0(gaussian_family(alpha)) == pytest.approx(alpha, rel=1e-12)


@pytest.mark.parametrize("a,b", [(0.5, 2.0), (1.0, 2.25), (0.3, 0.7)])
def test_eta0_diagonal(a, b):
    assert gaussian_eta0(GaussianSpec(np.diag([1 / a, 1 / b]))) == pytest.approx(np.sqrt(a * b))


@pytest.mark.parametrize("s", [0.25, 1.0, 2.0, 7.0])
def test_eta0_squeezed_is_hbar(s):
    assert gaussian_eta0(squeezed_gaussian(s, hbar=1.0)) == pytest.approx(1.0)
    assert gaussian_eta0(squeezed_gaussian(s, hbar=0.5)) == pytest.approx(0.5)


def test_eta0_two_modes_takes_the_smaller():
    A = np.diag([1 / 0.5, 1 / 2.0, 1.0, 1.0])  # (q1, q2, p1, p2) ordering
    assert gaussian_eta0(GaussianSpec(A)) == pytest.approx(np.sqrt(0.5))


def test_eta0_correlated_against_operator_test(grid):
    spec = GaussianSpec(np.array([[1.5, 0.3], [0.3, 0.8]]))
    eta0 = gaussian_eta0(spec)
    assert eta0 == pytest.approx(1 / np.sqrt(1.5 * 0.8 - 0.09))
    assert operator_positivity_test(spec, eta0 - 0.02, grid=grid).verdict == Verdict.MEMBER
    assert operator_positivity_test(spec, eta0 + 0.05, grid=grid).verdict == Verdict.EXCLUDED


def test_normalization_and_peak(grid):
    G = gaussian_family(1.0)
    assert G(np.zeros(2)) == pytest.approx(1 / np.pi)
    assert np.sum(G.on_grid(grid).values) * grid.dxi == pytest.approx(1.0, abs=1e-12)
    assert G.fourier(np.zeros(2)) == pytest.approx(1.0)


def test_fourier_of_shifted_gaussian():
    spec = GaussianSpec(np.array([[2.0, 0.5], [0.5, 1.0]]), center=[0.3, -0.7])
    a = np.array([0.4, -1.1])
    f = lambda q, p: spec(np.array([q, p])) * np.exp(1j * (q * a[1] - p * a[0]))
    re, _ = integrate.dblquad(lambda p, q: f(q, p).real, -8, 8, -8, 8)
    im, _ = integrate.dblquad(lambda p, q: f(q, p).imag, -8, 8, -8, 8)
    assert spec.fourier(a) == pytest.approx(re + 1j * im, abs=1e-8)


def test_p_transform_against_quadrature():
    spec = GaussianSpec(np.array([[1.2, -0.4], [-0.4, 0.9]]), center=[0.2, 0.5])
    q, t = 0.6, 1.3
    re, _ = integrate.quad(lambda p: (spec(np.array([q, p])) * np.exp(1j * p * t)).real, -20, 20)
    im, _ = integrate.quad(lambda p: (spec(np.array([q, p])) * np.exp(1j * p * t)).imag, -20, 20)
    assert spec.p_transform(q, t) == pytest.approx(re + 1j * im, abs=1e-10)


def test_invalid_matrices():
    with pytest.raises(ValueError):
        GaussianSpec(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        GaussianSpec(np.array([[1.0, 0.1], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        GaussianSpec(np.eye(3))
    with pytest.raises(ValueError):
        gaussian_family(0.0)


def test_symplectic_matrix():
    J = symplectic_matrix(2)
    assert np.array_equal(J @ J, -np.eye(4))
    assert np.array_equal(J.T, -J)
