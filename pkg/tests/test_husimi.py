import json
import warnings

import numpy as np
import pytest
from scipy import integrate

from nwspec import (
    coherent_state,
    coherent_wigner,
    fock_state,
    gaussian_family,
    squeezed_gaussian,
    wigner_transform,
)
from nwspec.husimi import (
    bargmann_form_ratio,
    bargmann_husimi_identity_check,
    bargmann_transform,
    find_husimi_zeros,
    gaussian_smoothing,
    husimi,
    write_zeros,
)
from nwspec.phase_space import PhaseSpacePoint
from nwspec.states import cat_state

Z9 = [0.7, -0.7, 0.7j, -0.7j, 0.7 + 0.7j, -0.7 + 0.7j, 0.7 - 0.7j, -0.7 - 0.7j, 1.1 + 0.3j]


def test_coherent_wigner_at_origin_is_g_hbar(grid):
    W = coherent_wigner(PhaseSpacePoint([0.0], [0.0]), grid)
    assert np.max(np.abs(W.values - gaussian_family(1.0).on_grid(grid).values)) < 1e-16
    assert W.values.max() == pytest.approx(1 / np.pi)


def test_coherent_wigner_matches_state(grid):
    z = -1.5 + 2j
    W = coherent_wigner((z.real, z.imag), grid)
    assert np.max(np.abs(W.values - wigner_transform(coherent_state(z, grid)).values)) < 1e-8
    with pytest.raises(ValueError):
        coherent_wigner((11.0, 0.0), grid)


def test_husimi_of_vacuum_is_g_2hbar(grid):
    Q = husimi(wigner_transform(coherent_state(0, grid)))
    assert np.max(np.abs(Q.values - gaussian_family(2.0).on_grid(grid).values)) < 1e-14


def test_husimi_of_fock1(grid):
    Q = husimi(wigner_transform(fock_state(1, grid)))
    assert Q.values[128, 128] <= 1e-8
    assert abs(Q.values.min()) <= 1e-15
    # (2 pi)^-1 (r^2 / 2) exp(-r^2 / 2)
    Qq, Pp = grid.mesh()
    r2 = Qq ** 2 + Pp ** 2
    assert np.max(np.abs(Q.values - r2 / 2 * np.exp(-r2 / 2) / (2 * np.pi))) < 1e-14


@pytest.mark.parametrize("maker", [
    lambda g: wigner_transform(coherent_state(0, g)),
    lambda g: wigner_transform(coherent_state(1 + 0.5j, g)),
    lambda g: squeezed_gaussian(2.0).on_grid(g),
])
def test_gaussian_husimi_is_strictly_positive(grid, maker):
    Q = husimi(maker(grid)).values
    # the far tails underflow to FFT round-off; strict positivity is checked where Q is resolved
    core = np.ix_(np.abs(grid.q) <= 5, np.abs(grid.p) <= 5)
    assert Q[core].min() > 0
    assert Q.min() >= -1e-9 * Q.max()


def test_husimi_warns_on_non_wigner_input(grid):
    F = gaussian_family(0.5).on_grid(grid) * 2.0 + gaussian_family(1.0).on_grid(grid) * -1.0
    with pytest.warns(RuntimeWarning):
        husimi(F)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        husimi(wigner_transform(fock_state(3, grid)))


@pytest.mark.parametrize("frac", [0.25, 0.5, 0.75])
def test_smoothing_below_hbar_stays_negative(grid, frac):
    # closed form at the origin: (2 - c) / (pi eta c^2) with c = 1 + 1 / eta
    Q0 = gaussian_smoothing(wigner_transform(fock_state(1, grid)), frac)
    c = 1 + 1 / frac
    # the p-spacing is pi / L, so narrow kernels carry a small quadrature error
    assert Q0.values[128, 128] == pytest.approx((2 - c) / (np.pi * frac * c * c), rel=1e-6)
    assert Q0.values.min() <= -1e-4


def test_bargmann_examples(grid):
    (s,) = bargmann_transform(coherent_state(0, grid), [0])
    assert s.value == pytest.approx(1.0, abs=1e-12)
    (s,) = bargmann_transform(fock_state(1, grid), [0])
    assert abs(s.value) < 1e-15


def test_bargmann_fock1_on_imaginary_axis(grid):
    psi = lambda q: np.sqrt(2) * np.pi ** -0.25 * q * np.exp(-q * q / 2)
    for y in (0.5, 1.0, 2.0):
        re, _ = integrate.quad(lambda q: np.pi ** -0.25 * np.exp(-q * q / 2) * np.cos(y * q) * psi(q), -np.inf, np.inf)
        im, _ = integrate.quad(lambda q: np.pi ** -0.25 * np.exp(-q * q / 2) * np.sin(y * q) * psi(q), -np.inf, np.inf)
        (s,) = bargmann_transform(fock_state(1, grid), [1j * y])
        assert s.value == pytest.approx(re + 1j * im, abs=1e-12)
        assert s.value == pytest.approx(1j * y / np.sqrt(2) * np.exp(-y * y / 4), abs=1e-12)


def test_bargmann_bound(grid):
    zs = [x + 1j * y for x in (-2, -0.5, 0, 1, 3) for y in (-3, 0, 2)]
    for n in range(5):
        for s in bargmann_transform(fock_state(n, grid), zs):
            assert s.slack >= -1e-9


def test_bargmann_forms_agree(grid):
    for z in (0.3 + 0.2j, -1 + 1j, 2.0):
        assert bargmann_form_ratio(fock_state(2, grid), z) == pytest.approx(1.0, abs=1e-10)


def test_bargmann_out_of_range(grid):
    with pytest.raises(ValueError):
        bargmann_transform(fock_state(1, grid), [12.0])
    with pytest.raises(ValueError):
        bargmann_husimi_identity_check(fock_state(1, grid), [6.0])


@pytest.mark.parametrize("state", ["coherent", "fock1", "fock2"])
def test_identity(grid, state):
    psi = coherent_state(0, grid) if state == "coherent" else fock_state(int(state[-1]), grid)
    chk = bargmann_husimi_identity_check(psi, Z9)
    assert chk.max_rel_error <= 1e-6


def test_identity_shared_zero(grid):
    chk = bargmann_husimi_identity_check(fock_state(1, grid), [0])
    assert abs(chk.lhs[0]) < 1e-9 and abs(chk.rhs[0]) < 1e-9


def test_zero_dichotomy(grid):
    gaussians = [
        wigner_transform(coherent_state(0, grid)),
        wigner_transform(coherent_state(1 + 0.5j, grid)),
        squeezed_gaussian(2.0).on_grid(grid),
    ]
    for F in gaussians:
        assert find_husimi_zeros(husimi(F), 1e-6) == []
    for n in range(1, 5):
        assert find_husimi_zeros(husimi(wigner_transform(fock_state(n, grid))))
    assert find_husimi_zeros(husimi(wigner_transform(cat_state(1.0, grid))))


def test_fock1_zero_location(grid):
    (z,) = find_husimi_zeros(husimi(wigner_transform(fock_state(1, grid))))
    assert np.hypot(z.q, z.p) <= 2 * grid.dq
    assert abs(z.refined_value) < 1e-12


def test_displaced_zero_is_refined(grid):
    # fock 1 displaced off the lattice: the zero moves with the state
    F = wigner_transform(fock_state(1, grid))
    shifted = np.roll(F.values, 3, axis=0)
    from nwspec import PhaseSpaceFunction

    (z,) = find_husimi_zeros(husimi(PhaseSpaceFunction(grid, shifted)))
    assert z.q == pytest.approx(3 * grid.dq, abs=0.5 * grid.dq)
    assert abs(z.p) <= 0.5 * grid.dp


def test_zero_json(tmp_path, grid):
    zeros = find_husimi_zeros(husimi(wigner_transform(fock_state(2, grid))))
    path = write_zeros(zeros, tmp_path / "z.json")
    data = json.loads(path.read_text())
    assert set(data[0]) == {"q", "p", "refined_value"}
    assert write_zeros([], tmp_path / "e.json").read_text().strip() == "[]"
