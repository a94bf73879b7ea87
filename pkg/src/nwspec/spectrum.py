"""Narcowich-Wigner spectrum estimation.

Two independent testers decide whether ``alpha`` belongs to the spectrum of a
phase-space function ``F``:

* :func:`klm_refute` searches for a finite point set on which the twisted
  matrix ``M_jk = F^(a_j - a_k) exp(i alpha Omega(a_j, a_k) / 2)`` has a
  negative eigenvalue.  A hit is a certificate of exclusion; a miss proves
  nothing.
* :func:`operator_positivity_test` builds the operator whose alpha-Wigner
  function is ``F`` and checks it for positivity on the grid (for
  ``alpha = 0``, pointwise nonnegativity of ``F``).

:func:`estimate_spectrum` scans ``alpha >= 0`` with the operator test,
cross-checks every point with the refuter and bisects each member/excluded
boundary.  Negative ``alpha`` is obtained by mirroring.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, InconsistencyError, NormalizationError, ResolutionError
from .gaussian import GaussianSpec, gaussian_eta0
from .phase_space import (
    Domain,
    GridSpec,
    PhaseSpaceFunction,
    convolve,
    fourier_at,
    inverse_symplectic_fourier,
    symplectic_form_array,
    symplectic_fourier,
)
from .states import weyl_kernel

__all__ = [
    "Verdict",
    "ProbeSet",
    "KlmMatrix",
    "RefuteResult",
    "OperatorTest",
    "ProbeRecord",
    "SpectrumEstimate",
    "gaussian_random_probes",
    "lattice_probes",
    "draw_probe_set",
    "klm_matrix",
    "klm_refute",
    "verify_certificate",
    "operator_positivity_test",
    "estimate_spectrum",
    "gaussian_eta0",
    "convolution_positivity_check",
    "ConvolutionPositivityReport",
]

TOL_PSD = 1e-7
TOL_CERT_PER_POINT = 1e-6
NORM_TOL = 1e-8
LEAKAGE_TOL = 1e-8
DEFAULT_TRIALS = 200
DEFAULT_M_MAX = 12
LATTICE_STEP = 0.5
LATTICE_EXTENT = 3.0


class Verdict(str, enum.Enum):
    MEMBER = "member"
    EXCLUDED = "excluded"
    INCONCLUSIVE = "inconclusive"


# -- probe sets ---------------------------------------------------------------


@dataclass(frozen=True)
class ProbeSet:
    """Points ``a_1..a_m`` in the dual phase space, rows laid out ``(a_q, a_p)``."""

    points: np.ndarray
    sampler: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    trial: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] % 2 or pts.shape[0] < 1:
            raise ValueError("probe points must have shape (m, 2d) with m >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("probe points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def differences(self) -> np.ndarray:
        return self.points[:, None, :] - self.points[None, :, :]

    def as_dict(self) -> dict:
        return {
            "sampler": self.sampler,
            "params": dict(self.params),
            "seed": self.seed,
            "trial": self.trial,
            "points": self.points.tolist(),
        }


def _lattice_points(step: float, extent: float) -> np.ndarray:
    n = int(round(extent / step)) + 1
    x = (np.arange(n) - 0.5 * (n - 1)) * step
    X, Y = np.meshgrid(x, x, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def lattice_probes(step: float = LATTICE_STEP, extent: float = LATTICE_EXTENT) -> ProbeSet:
    """Square lattice of side ``extent`` and spacing ``step`` centred at 0 (d = 1)."""
    return ProbeSet(_lattice_points(step, extent), "lattice", {"step": step, "extent": extent})


def gaussian_random_probes(m: int, sigma: float, seed: int, d: int = 1) -> ProbeSet:
    rng = np.random.default_rng(seed)
    return ProbeSet(rng.normal(0.0, sigma, (m, 2 * d)), "gaussian_random", {"sigma": sigma}, seed)


def _fits(points: np.ndarray, extent) -> bool:
    if extent is None:
        return True
    diff = np.abs(points[:, None, :] - points[None, :, :])
    return bool(np.all(diff[..., 0] < extent[0]) and np.all(diff[..., 1] < extent[1]))


def draw_probe_set(seed: int, trial: int, m_max: int = DEFAULT_M_MAX, sigma: float = 2.0,
                   step: float = LATTICE_STEP, extent: float = LATTICE_EXTENT,
                   dual_extent=None, d: int = 1) -> ProbeSet:
    """Probe set number ``trial`` of the stream seeded by ``seed``.

    Trial 0 is the full lattice; odd trials draw ``gaussian_random`` points,
    even trials draw a random subset of the lattice.  Each trial has its own
    generator, so any certificate is reproducible from ``(seed, trial)``.
    """
    if trial == 0 and d == 1:
        ps = lattice_probes(step, extent)
        return ProbeSet(ps.points, ps.sampler, ps.params, seed, trial)
    rng = np.random.default_rng([seed, trial])
    m = int(rng.integers(2, m_max + 1))
    if trial % 2 or d != 1:
        for _ in range(100):
            pts = rng.normal(0.0, sigma, (m, 2 * d))
            if _fits(pts, dual_extent):
                break
        else:
            raise ResolutionError("could not draw probe points inside the dual grid")
        return ProbeSet(pts, "gaussian_random", {"sigma": sigma}, seed, trial)
    lat = _lattice_points(step, extent)
    idx = np.sort(rng.choice(lat.shape[0], size=min(m, lat.shape[0]), replace=False))
    return ProbeSet(lat[idx], "lattice", {"step": step, "extent": extent}, seed, trial)


# -- the twisted matrix -------------------------------------------------------


@dataclass(frozen=True)
class KlmMatrix:
    entries: np.ndarray
    alpha: float
    probe: ProbeSet

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def lambda_min(self) -> float:
        H = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(H)[0])


def _fhat_evaluator(F, grid=None):
    """Return ``(callable a -> F^(a), dual extent or None)``."""
    if isinstance(F, GaussianSpec):
        return F.fourier, None
    if F.domain == Domain.SYMPLECTIC_FOURIER:
        F = inverse_symplectic_fourier(F)
    return (lambda a: fourier_at(F, a)), F.grid.dual_extent


def _twist(points: np.ndarray, alpha: float) -> np.ndarray:
    om = symplectic_form_array(points[:, None, :], points[None, :, :])
    return np.exp(0.5j * alpha * om)


def klm_matrix(Fhat, probe: ProbeSet, alpha: float) -> KlmMatrix:
    """``M_jk = F^(a_j - a_k) exp(i alpha Omega(a_j, a_k) / 2)``.

    ``Fhat`` is a function tagged ``symplectic_fourier`` (interpolated
    band-limitedly off the grid) or a :class:`GaussianSpec` (exact).
    """
    if isinstance(Fhat, PhaseSpaceFunction):
        Fhat.require(Domain.SYMPLECTIC_FOURIER)
    evaluate, extent = _fhat_evaluator(Fhat)
    if not _fits(probe.points, extent):
        raise ResolutionError("probe differences fall outside the dual grid")
    diffs = probe.differences().reshape(-1, probe.points.shape[1])
    vals = evaluate(diffs).reshape(probe.m, probe.m)
    return KlmMatrix(vals * _twist(probe.points, alpha), float(alpha), probe)


def _fhat_at_zero(F) -> complex:
    if isinstance(F, GaussianSpec):
        return complex(F.fourier(np.zeros(2 * F.dim_d)))
    F.require(Domain.DIRECT)
    return complex(np.sum(F.values) * F.grid.dxi)


def _check_normalized(F):
    f0 = _fhat_at_zero(F)
    if abs(f0 - 1.0) > NORM_TOL:
        raise NormalizationError(f"F^(0) = {f0:.12g}, expected 1")


@dataclass
class RefuteResult:
    verdict: Verdict
    certificate: ProbeSet | None
    lambda_min: float
    tol_cert: float | None = None

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "lambda_min": self.lambda_min,
            "tol_cert": self.tol_cert,
            "certificate": None if self.certificate is None else self.certificate.as_dict(),
        }


class _ProbeBank:
    """Probe sets with ``F^`` pre-evaluated at all pairwise differences.

    The probes do not depend on alpha, so a scan pays for the transform once.
    """

    def __init__(self, F, trials=DEFAULT_TRIALS, m_max=DEFAULT_M_MAX, seed=0, sigma=None,
                 step=LATTICE_STEP, extent=LATTICE_EXTENT):
        evaluate, dual_extent = _fhat_evaluator(F)
        hbar = F.grid.hbar if isinstance(F, PhaseSpaceFunction) else 1.0
        d = F.dim_d if isinstance(F, GaussianSpec) else 1
        self.sigma = 2.0 / np.sqrt(hbar) if sigma is None else sigma
        self.probes = [
            draw_probe_set(seed, t, m_max, self.sigma, step, extent, dual_extent, d)
            for t in range(trials)
        ]
        sizes = [p.m for p in self.probes]
        diffs = np.concatenate([p.differences().reshape(-1, 2 * d) for p in self.probes])
        flat = evaluate(diffs)
        self.blocks = []
        start = 0
        for m in sizes:
            self.blocks.append(flat[start:start + m * m].reshape(m, m))
            start += m * m

    def refute(self, alpha: float, tol_per_point: float = TOL_CERT_PER_POINT) -> RefuteResult:
        best = np.inf
        for probe, block in zip(self.probes, self.blocks):
            M = block * _twist(probe.points, alpha)
            lam = float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])
            tol = tol_per_point * probe.m
            if lam < -tol:
                return RefuteResult(Verdict.EXCLUDED, probe, lam, tol)
            best = min(best, lam)
        return RefuteResult(Verdict.INCONCLUSIVE, None, best)


def klm_refute(F, alpha: float, trials: int = DEFAULT_TRIALS, m_max: int = DEFAULT_M_MAX,
               seed: int = 0, tol_cert: float = TOL_CERT_PER_POINT) -> RefuteResult:
    """Search for a probe set on which the twisted matrix is not positive.

    Returns ``excluded`` with the first certificate whose smallest eigenvalue
    is below ``-tol_cert * m``, otherwise ``inconclusive``; never ``member``.
    """
    _check_normalized(F)
    return _ProbeBank(F, trials, m_max, seed).refute(alpha, tol_cert)


def verify_certificate(F, certificate: ProbeSet, alpha: float) -> float:
    """Recompute the smallest eigenvalue of the twisted matrix on a certificate."""
    Fhat = F if isinstance(F, GaussianSpec) else symplectic_fourier(F)
    return klm_matrix(Fhat, certificate, alpha).lambda_min()


# -- operator positivity ------------------------------------------------------


@dataclass
class OperatorTest:
    alpha: float
    lambda_min: float
    verdict: Verdict
    leakage: float = 0.0
    witness: dict | None = None
    diagnostic: str = ""

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lambda_min": self.lambda_min,
            "verdict": self.verdict.value,
            "leakage": self.leakage,
            "witness": self.witness,
            "diagnostic": self.diagnostic,
        }


def _classify(lam: float, tol: float) -> Verdict:
    if lam >= -tol:
        return Verdict.MEMBER
    if lam < -10.0 * tol:
        return Verdict.EXCLUDED
    return Verdict.INCONCLUSIVE


def operator_positivity_test(F, alpha: float, tol_psd: float = TOL_PSD,
                             grid: GridSpec | None = None,
                             leakage_tol: float = LEAKAGE_TOL) -> OperatorTest:
    """Decide ``alpha in W(F)`` on the grid.

    For ``alpha > 0`` the kernel with alpha-Wigner function ``F`` is built and
    its smallest eigenvalue (occupation-number scale) is compared with
    ``tol_psd``; for ``alpha = 0`` the grid minimum of ``F`` is used.
    """
    if isinstance(F, PhaseSpaceFunction):
        F.require(Domain.DIRECT)
        if not F.is_real(1e-10):
            raise ValueError("operator_positivity_test needs a real phase-space function")
        grid = F.grid
    else:
        grid = grid or GridSpec()
    _check_normalized(F)
    alpha = abs(float(alpha))
    if alpha == 0.0:
        vals = np.real(F.values) if isinstance(F, PhaseSpaceFunction) else F.on_grid(grid).values
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        lam = float(vals[i, j])
        witness = {"kind": "grid_point", "q": float(grid.q[i]), "p": float(grid.p[j]), "value": lam}
        return OperatorTest(0.0, lam, _classify(lam, tol_psd), 0.0, witness)
    K, leak = weyl_kernel(F, alpha, grid)
    if leak > leakage_tol:
        return OperatorTest(alpha, float("nan"), Verdict.INCONCLUSIVE, leak, None,
                            f"aliasing gate: leakage {leak:.2e} > {leakage_tol:.0e}")
    H = 0.5 * (K + K.conj().T)
    w, v = np.linalg.eigh(H)
    lam = float(w[0] * grid.dq)
    witness = None
    if lam < 0:
        vec = v[:, 0]
        c = np.sum(np.abs(vec) ** 2 * grid.q)
        witness = {"kind": "eigenvector", "eigenvalue": lam, "mean_q": float(c),
                   "peak_q": float(grid.q[np.argmax(np.abs(vec))])}
    return OperatorTest(alpha, lam, _classify(lam, tol_psd), leak, witness)


# -- scan ---------------------------------------------------------------------


@dataclass
class ProbeRecord:
    alpha: float
    lambda_min: float
    verdict: Verdict
    stage: str
    operator: OperatorTest
    klm: RefuteResult | None = None
    certificate: dict | None = None

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lambda_min": self.lambda_min,
            "verdict": self.verdict.value,
            "stage": self.stage,
            "operator": self.operator.as_dict(),
            "klm": None if self.klm is None else self.klm.as_dict(),
            "certificate": self.certificate,
        }


@dataclass
class SpectrumEstimate:
    probes: list
    excluded_intervals: list
    bracket: dict
    delta_alpha: float
    inconsistencies: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return not self.inconsistencies

    def record_at(self, alpha: float, tol: float = 1e-9) -> ProbeRecord:
        for r in self.probes:
            if abs(r.alpha - alpha) <= tol:
                return r
        raise KeyError(alpha)

    def members(self) -> list:
        return [r.alpha for r in self.probes if r.verdict == Verdict.MEMBER]

    def lambda_curve(self) -> list:
        return [(r.alpha, r.lambda_min, r.verdict.value) for r in self.probes]

    def as_dict(self) -> dict:
        return {
            "delta_alpha": self.delta_alpha,
            "resolution": self.bracket.get("resolution"),
            "bracket": self.bracket,
            "excluded_intervals": self.excluded_intervals,
            "inconsistencies": self.inconsistencies,
            "settings": self.settings,
            "probes": [r.as_dict() for r in self.probes],
        }


def _thread_count(threads):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("NWSPEC_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _runs(records, verdict):
    """Maximal runs of consecutive (in alpha) records sharing ``verdict``."""
    runs, cur = [], None
    for r in records:
        if r.verdict == verdict:
            cur = [r.alpha, r.alpha] if cur is None else [cur[0], r.alpha]
        else:
            if cur is not None:
                runs.append(cur)
            cur = None
    if cur is not None:
        runs.append(cur)
    return runs


def _bracket(records, delta_alpha, depth):
    members = _runs(records, Verdict.MEMBER)
    alphas = [r.alpha for r in records]
    boundaries = []
    for lo, hi in members:
        i_lo, i_hi = alphas.index(lo), alphas.index(hi)
        if i_lo > 0:
            a = alphas[i_lo - 1]
            boundaries.append({"side": "lower", "alpha": 0.5 * (a + lo), "uncertainty": 0.5 * (lo - a),
                               "outside_verdict": records[i_lo - 1].verdict.value})
        if i_hi < len(records) - 1:
            b = alphas[i_hi + 1]
            boundaries.append({"side": "upper", "alpha": 0.5 * (hi + b), "uncertainty": 0.5 * (b - hi),
                               "outside_verdict": records[i_hi + 1].verdict.value})
    if not members:
        kind = "empty"
    elif any(hi - lo >= delta_alpha - 1e-12 for lo, hi in members):
        kind = "interval"
    else:
        kind = "discrete"
    spectrum = []
    for lo, hi in members:
        if lo == 0.0:
            spectrum.append([-hi, hi])
        else:
            spectrum.extend([[-hi, -lo], [lo, hi]])
    spectrum.sort()
    return {
        "kind": kind,
        "members": members,
        "spectrum": spectrum,
        "boundaries": boundaries,
        "resolution": delta_alpha / 2 ** depth,
    }


def estimate_spectrum(F, alpha_max: float = 2.0, delta_alpha: float = 0.05, *,
                      grid: GridSpec | None = None, trials: int = DEFAULT_TRIALS,
                      m_max: int = DEFAULT_M_MAX, seed: int = 0, tol_psd: float = TOL_PSD,
                      tol_cert: float = TOL_CERT_PER_POINT, bisection_depth: int = 4,
                      threads: int | None = None, raise_on_inconsistency: bool = False
                      ) -> SpectrumEstimate:
    """Scan ``alpha in [0, alpha_max]`` and bisect every member/excluded boundary."""
    if not delta_alpha > 0:
        raise ValueError("delta_alpha must be positive")
    if isinstance(F, PhaseSpaceFunction):
        F.require(Domain.DIRECT)
        grid = F.grid
    else:
        grid = grid or GridSpec()
    _check_normalized(F)
    bank = _ProbeBank(F, trials, m_max, seed)
    n_steps = int(np.floor(alpha_max / delta_alpha + 1e-9))
    scan = [round(k * delta_alpha, 12) for k in range(n_steps + 1)]
    inconsistencies = []

    def probe(alpha, stage):
        op = operator_positivity_test(F, alpha, tol_psd, grid)
        ref = bank.refute(alpha, tol_cert)
        verdict = op.verdict
        certificate = None
        if ref.verdict == Verdict.EXCLUDED:
            certificate = {"kind": "probe_set", **ref.certificate.as_dict(), "lambda_min": ref.lambda_min}
            if op.verdict == Verdict.MEMBER:
                inconsistencies.append({
                    "alpha": alpha,
                    "operator_lambda_min": op.lambda_min,
                    "klm_lambda_min": ref.lambda_min,
                    "message": "refuter excluded an alpha the operator test declares member",
                })
            else:
                verdict = Verdict.EXCLUDED
        elif op.verdict == Verdict.EXCLUDED and op.witness is not None:
            certificate = {"kind": op.witness["kind"], **op.witness}
        lam = op.lambda_min if np.isfinite(op.lambda_min) else ref.lambda_min
        return ProbeRecord(alpha, lam, verdict, stage, op, ref, certificate)

    with ThreadPoolExecutor(max_workers=_thread_count(threads)) as pool:
        records = list(pool.map(lambda a: probe(a, "scan"), scan))

        def bisect(lo_rec, hi_rec):
            out = []
            lo, hi = lo_rec, hi_rec
            for _ in range(bisection_depth):
                mid = probe(round(0.5 * (lo.alpha + hi.alpha), 12), "bisection")
                out.append(mid)
                if mid.verdict == lo.verdict:
                    lo = mid
                elif mid.verdict == hi.verdict:
                    hi = mid
                else:
                    break
            return out

        pairs = [
            (a, b) for a, b in zip(records, records[1:])
            if {a.verdict, b.verdict} == {Verdict.MEMBER, Verdict.EXCLUDED}
        ]
        for extra in pool.map(lambda ab: bisect(*ab), pairs):
            records.extend(extra)

    records.sort(key=lambda r: r.alpha)
    inconsistencies.sort(key=lambda x: x["alpha"])
    if inconsistencies and raise_on_inconsistency:
        raise InconsistencyError(f"{len(inconsistencies)} contradictory verdicts")
    est = SpectrumEstimate(
        probes=records,
        excluded_intervals=_runs(records, Verdict.EXCLUDED),
        bracket=_bracket(records, delta_alpha, bisection_depth),
        delta_alpha=delta_alpha,
        inconsistencies=inconsistencies,
        settings={
            "alpha_max": alpha_max,
            "trials": trials,
            "m_max": m_max,
            "seed": seed,
            "tol_psd": tol_psd,
            "tol_cert_per_point": tol_cert,
            "bisection_depth": bisection_depth,
            "probe_sigma": bank.sigma,
        },
    )
    return est


# -- convolution positivity ---------------------------------------------------


@dataclass
class ConvolutionPositivityReport:
    min_value: float
    nonnegative: bool
    zero_in_F0: bool
    two_hbar_in_F0: bool
    wigner_test: OperatorTest | None
    passed: bool
    convolution: PhaseSpaceFunction = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "min_value": self.min_value,
            "nonnegative": self.nonnegative,
            "zero_in_F0": self.zero_in_F0,
            "two_hbar_in_F0": self.two_hbar_in_F0,
            "wigner_test": None if self.wigner_test is None else self.wigner_test.as_dict(),
            "passed": self.passed,
        }


def convolution_positivity_check(F0: PhaseSpaceFunction, F: PhaseSpaceFunction, tol: float = 1e-9,
                                 tol_psd: float = TOL_PSD) -> ConvolutionPositivityReport:
    """Check that ``F0 * F`` is nonnegative, and a Wigner function when ``F0`` allows it."""
    hbar = F0.grid.hbar
    for name, G in (("F0", F0), ("F", F)):
        test = operator_positivity_test(G, hbar, tol_psd)
        if test.verdict != Verdict.MEMBER:
            raise ValueError(f"{name} is not an hbar-Wigner function (lambda_min={test.lambda_min:.3e})")
    conv = convolve(F0, F)
    cmin = float(np.min(conv.real))
    nonneg = cmin >= -tol
    zero_in = operator_positivity_test(F0, 0.0, tol_psd).verdict == Verdict.MEMBER
    two_in = operator_positivity_test(F0, 2 * hbar, tol_psd).verdict == Verdict.MEMBER
    wt = None
    passed = nonneg
    if zero_in or two_in:
        wt = operator_positivity_test(conv, hbar, tol_psd)
        passed = passed and wt.verdict == Verdict.MEMBER
    return ConvolutionPositivityReport(cmin, nonneg, zero_in, two_in, wt, passed, conv)
