"""Acceptance experiments on the reference grid (d = 1, N = 256, L = 10, hbar = 1).

Each ``check_*`` function returns a :class:`CheckResult` with a JSON-ready
``details`` payload.  ``run_all`` executes them in order; the ``verify`` CLI
task and the test-suite both go through here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .gaussian import GaussianSpec, gaussian_eta0, gaussian_family, squeezed_gaussian
from .husimi import (
    bargmann_husimi_identity_check,
    find_husimi_zeros,
    gaussian_smoothing,
    husimi,
)
from .phase_space import GridSpec, convolve, symplectic_fourier
from .spectrum import (
    Verdict,
    draw_probe_set,
    estimate_spectrum,
    convolution_positivity_check,
    verify_certificate,
)
from .states import (
    cat_state,
    coherent_state,
    fock_state,
    inner,
    mix,
    moyal_overlap,
    purity,
    wigner_of_density,
    wigner_transform,
)

__all__ = ["CheckResult", "CHECKS", "run_all", "IDENTITY_Z"]

# nine interior sample points for the Bargmann/Husimi identity
IDENTITY_Z = (0.7, -0.7, 0.7j, -0.7j, 0.7 + 0.7j, -0.7 + 0.7j, 0.7 - 0.7j, -0.7 - 0.7j, 1.1 + 0.3j)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name}"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def _f(x) -> float:
    return float(x)


def check_purity(grid: GridSpec, seed: int = 0) -> CheckResult:
    target = 1.0 / (2 * np.pi * grid.hbar)
    errs = {}
    for n in range(4):
        errs[f"fock{n}"] = abs(purity(wigner_transform(fock_state(n, grid))) - target)
    rho = mix([fock_state(0, grid), fock_state(1, grid)], [0.5, 0.5])
    errs["mixture_0_1"] = abs(purity(wigner_of_density(rho)) - 0.5 * target)
    ok = all(e <= 1e-8 for e in errs.values())
    return CheckResult(1, "purity equality for pure states, half for the 1/2-1/2 mixture", ok,
                       {"abs_errors": {k: _f(v) for k, v in errs.items()}, "tol": 1e-8})


def check_moyal(grid: GridSpec, seed: int = 0) -> CheckResult:
    psis = [fock_state(n, grid) for n in range(4)]
    Ws = [wigner_transform(p) for p in psis]
    worst = 0.0
    for i, j in itertools.combinations_with_replacement(range(4), 2):
        expect = abs(inner(psis[i], psis[j])) ** 2 / (2 * np.pi * grid.hbar)
        worst = max(worst, abs(moyal_overlap(Ws[i], Ws[j]) - expect))
    return CheckResult(2, "Moyal identity on fock 0..3 pairs", worst <= 1e-7,
                       {"max_abs_error": _f(worst), "tol": 1e-7})


def _upper_boundary(est):
    ups = [b for b in est.bracket["boundaries"] if b["side"] == "upper"]
    return ups[0]["alpha"] if ups else None


def check_gaussian_states(grid: GridSpec, seed: int = 0) -> CheckResult:
    cases = {
        "coherent_0": wigner_transform(coherent_state(0, grid)),
        "squeezed_2": squeezed_gaussian(2.0, grid.hbar).on_grid(grid),
    }
    details, ok = {}, True
    for name, F in cases.items():
        est = estimate_spectrum(F, 2.0, 0.05, seed=seed)
        low = [r for r in est.probes if r.alpha <= 1.0 + 1e-12]
        high = [r for r in est.probes if 1.05 - 1e-12 <= r.alpha <= 2.0 + 1e-12]
        b = _upper_boundary(est)
        good = (all(r.verdict == Verdict.MEMBER for r in low)
                and all(r.verdict == Verdict.EXCLUDED for r in high)
                and b is not None and abs(b - 1.0) <= 0.01
                and est.consistent)
        ok &= good
        details[name] = {"boundary": b, "kind": est.bracket["kind"], "passed": good,
                         "inconsistencies": len(est.inconsistencies)}
    return CheckResult(3, "pure Gaussian spectra are [-1, 1]", ok, details)


def _certificates_reproduce(F, est, seed) -> bool:
    for r in est.probes:
        if r.verdict != Verdict.EXCLUDED:
            continue
        c = r.certificate
        if c is None:
            return False
        if c["kind"] != "probe_set":
            continue
        redrawn = draw_probe_set(seed, c["trial"], est.settings["m_max"], est.settings["probe_sigma"],
                                 dual_extent=F.grid.dual_extent)
        if not np.array_equal(redrawn.points, np.array(c["points"])):
            return False
        lam = verify_certificate(F, redrawn, r.alpha)
        if not lam < -est.settings["tol_cert_per_point"] * redrawn.m:
            return False
    return True


def check_fock_spectra(grid: GridSpec, seed: int = 0) -> CheckResult:
    details, ok = {}, True
    for n in (1, 2):
        F = wigner_transform(fock_state(n, grid))
        est = estimate_spectrum(F, 2.0, 0.05, seed=seed)
        scan = [r for r in est.probes if r.stage == "scan"]
        at1 = est.record_at(1.0)
        off = [r for r in scan if abs(r.alpha - 1.0) > 1e-12]
        agree = est.consistent and all(r.klm.verdict == Verdict.EXCLUDED for r in off)
        certs = _certificates_reproduce(F, est, seed)
        good = (all(r.verdict == Verdict.EXCLUDED for r in off)
                and at1.verdict == Verdict.MEMBER and at1.lambda_min >= -1e-7
                and agree and certs)
        ok &= good
        details[f"fock{n}"] = {
            "lambda_min_at_1": at1.lambda_min,
            "kind": est.bracket["kind"],
            "testers_agree": agree,
            "certificates_reproduce": certs,
            "passed": good,
        }
    return CheckResult(4, "fock 1 and 2 spectra are {-1, 1}", ok, details)


def check_gaussian_family(grid: GridSpec, seed: int = 0) -> CheckResult:
    cases = {f"G_{a:g}": (gaussian_family(a), a) for a in (0.5, 1.0, 2.0)}
    for a, b in ((0.5, 2.0), (1.0, 2.25)):
        cases[f"diag_{a:g}_{b:g}"] = (GaussianSpec(np.diag([1 / a, 1 / b])), float(np.sqrt(a * b)))
    details, ok = {}, True
    for name, (G, expected) in cases.items():
        est = estimate_spectrum(G, expected + 0.5, 0.05, grid=grid, seed=seed)
        b = _upper_boundary(est)
        eta0 = gaussian_eta0(G)
        good = (b is not None and abs(b - expected) <= 0.01 and abs(eta0 - expected) <= 1e-12
                and abs(eta0 - b) <= 0.01 and est.consistent)
        ok &= good
        details[name] = {"expected": expected, "boundary": b, "eta0": eta0, "passed": good}
    return CheckResult(5, "Gaussian family boundaries and eta0", ok, details)


def check_semigroup(grid: GridSpec, seed: int = 0) -> CheckResult:
    g1, g2, g3 = (gaussian_family(a).on_grid(grid) for a in (1.0, 2.0, 3.0))
    c = convolve(g1, g2)
    err = float(np.max(np.abs(c.values - g3.values)))
    lim = 1e-8 * float(np.max(g3.values))
    return CheckResult(6, "G_1 * G_2 = G_3", err <= lim, {"max_abs_error": err, "limit": lim})


def check_convolution_fourier(grid: GridSpec, seed: int = 0) -> CheckResult:
    F = gaussian_family(1.0).on_grid(grid)
    G = wigner_transform(fock_state(1, grid))
    lhs = symplectic_fourier(convolve(F, G)).values
    rhs = symplectic_fourier(F).values * symplectic_fourier(G).values
    # closed forms: G_1^ = exp(-|a|^2/4), W(fock 1)^ = (1 - |a|^2/2) exp(-|a|^2/4) at hbar = 1
    AQ, AP = grid.dual_mesh()
    r2 = (AQ ** 2 + AP ** 2) * grid.hbar
    exact = np.exp(-r2 / 2) * (1 - r2 / 2)
    # FFT round-off is ~1e-16 absolute, so relative errors are taken above 1e-6 of the peak
    mask = np.abs(exact) > 1e-6 * np.max(np.abs(exact))
    rel = float(np.max(np.abs(lhs - rhs)[mask] / np.abs(rhs)[mask]))
    rel_exact = float(np.max(np.abs(lhs - exact)[mask] / np.abs(exact)[mask]))
    abs_err = float(np.max(np.abs(lhs - rhs)))
    ok = rel <= 1e-10 and rel_exact <= 1e-10
    return CheckResult(7, "transform of a convolution is the product of transforms", ok,
                       {"max_rel_error": rel, "max_rel_error_vs_closed_form": rel_exact,
                        "max_abs_error": abs_err, "tol": 1e-10, "mask": "|value| > 1e-6 max"})


def check_convolution_positivity(grid: GridSpec, seed: int = 0) -> CheckResult:
    fs = {
        "fock0": wigner_transform(fock_state(0, grid)),
        "fock1": wigner_transform(fock_state(1, grid)),
        "coherent_1": wigner_transform(coherent_state(1.0, grid)),
    }
    details, ok = {}, True
    for a, b in itertools.product(fs, repeat=2):
        rep = convolution_positivity_check(fs[a], fs[b])
        good = rep.nonnegative
        if a == "coherent_1":
            good = good and rep.wigner_test is not None and rep.wigner_test.verdict == Verdict.MEMBER
        good = good and rep.passed
        ok &= good
        details[f"{a}*{b}"] = {"min": rep.min_value, "passed": good,
                               "wigner_lambda_min": None if rep.wigner_test is None
                               else rep.wigner_test.lambda_min}
    return CheckResult(8, "convolutions of Wigner functions are nonnegative", ok, details)


def check_husimi_zeros(grid: GridSpec, seed: int = 0) -> CheckResult:
    gaussians = {
        "coherent_0": wigner_transform(coherent_state(0, grid)),
        "coherent_1+0.5i": wigner_transform(coherent_state(1 + 0.5j, grid)),
        "squeezed_2": squeezed_gaussian(2.0, grid.hbar).on_grid(grid),
    }
    others = {f"fock{n}": wigner_transform(fock_state(n, grid)) for n in range(1, 5)}
    others["odd_cat_1"] = wigner_transform(cat_state(1.0, grid, -1))
    details, ok = {}, True
    for name, F in gaussians.items():
        z = find_husimi_zeros(husimi(F))
        ok &= not z
        details[name] = len(z)
    for name, F in others.items():
        z = find_husimi_zeros(husimi(F))
        ok &= bool(z)
        details[name] = len(z)
    z1 = find_husimi_zeros(husimi(others["fock1"]))
    dist = min(np.hypot(z.q, z.p) for z in z1) if z1 else float("inf")
    ok &= dist <= 2 * grid.dq
    details["fock1_zero_distance"] = _f(dist)
    return CheckResult(9, "Husimi zeros exactly for non-Gaussian states", bool(ok), details)


def check_bargmann_identity(grid: GridSpec, seed: int = 0) -> CheckResult:
    details, ok = {}, True
    for n in range(3):
        chk = bargmann_husimi_identity_check(fock_state(n, grid), IDENTITY_Z)
        ok &= chk.max_rel_error <= 1e-6
        details[f"fock{n}"] = chk.max_rel_error
    zero = bargmann_husimi_identity_check(fock_state(1, grid), [0.0])
    ok &= zero.max_abs_error <= 1e-9 and abs(zero.lhs[0]) <= 1e-9
    details["fock1_at_0_abs"] = zero.max_abs_error
    return CheckResult(10, "|F(z)|^2 matches the Husimi function", bool(ok), details)


def check_smoothing_negativity(grid: GridSpec, seed: int = 0) -> CheckResult:
    W = wigner_transform(fock_state(1, grid))
    details, ok = {}, True
    for frac in (0.25, 0.5, 0.75):
        m = float(gaussian_smoothing(W, frac * grid.hbar).real.min())
        ok &= m <= -1e-4
        details[f"eta_{frac:g}"] = m
    Q = husimi(W)
    qmin, qmax = float(Q.real.min()), float(Q.real.max())
    zeros = find_husimi_zeros(Q)
    ok &= qmin >= -1e-9 * qmax and bool(zeros)
    details["husimi_min"] = qmin
    details["husimi_zeros"] = len(zeros)
    return CheckResult(11, "G_eta * W(fock 1) goes negative below hbar, not at hbar", bool(ok), details)


def check_wigner_negativity(grid: GridSpec, seed: int = 0) -> CheckResult:
    details, ok = {}, True
    for n in range(1, 5):
        m = float(wigner_transform(fock_state(n, grid)).real.min())
        ok &= m <= -1e-3
        details[f"fock{n}"] = m
    gauss = {
        "coherent_0": wigner_transform(coherent_state(0, grid)),
        "coherent_1+0.5i": wigner_transform(coherent_state(1 + 0.5j, grid)),
        "squeezed_2": squeezed_gaussian(2.0, grid.hbar).on_grid(grid),
    }
    for name, F in gauss.items():
        m = float(F.real.min())
        ok &= m >= -1e-12
        details[name] = m
    return CheckResult(12, "Wigner negativity exactly for non-Gaussian states", bool(ok), details)


CHECKS = (
    check_purity,
    check_moyal,
    check_gaussian_states,
    check_fock_spectra,
    check_gaussian_family,
    check_semigroup,
    check_convolution_fourier,
    check_convolution_positivity,
    check_husimi_zeros,
    check_bargmann_identity,
    check_smoothing_negativity,
    check_wigner_negativity,
)


def run_all(grid: GridSpec | None = None, seed: int = 0) -> list:
    grid = grid or GridSpec()
    return [check(grid, seed) for check in CHECKS]
