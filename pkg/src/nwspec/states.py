"""Wavefunctions, density kernels and the Weyl-Wigner transform at scale eta.

The eta-Wigner function of a kernel ``A(q, q')`` is

    W(q, p) = (2 pi eta)^-1 int exp(-i p s / eta) A(q + s/2, q - s/2) ds,

normalised so that pure states integrate to one.  With ``q`` on the grid and
``s`` a multiple of ``dq`` the arguments ``q +- s/2`` fall on half-steps, so
kernels are first interpolated onto the doubled grid (spectrally; the states
here are band-limited well inside the momentum window).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AliasingError, GridMismatchError, ResolutionError
from .gaussian import GaussianSpec
from .phase_space import (
    Domain,
    GridSpec,
    PhaseSpaceFunction,
    _support_box,
    upsample2,
)

__all__ = [
    "WaveFunction",
    "DensityKernel",
    "coherent_state",
    "fock_state",
    "cat_state",
    "inner",
    "density",
    "mix",
    "wigner_transform",
    "wigner_of_density",
    "inverse_weyl",
    "weyl_kernel",
    "purity",
    "purity_bound",
    "moyal_overlap",
]

DECAY_TOL = 1e-12
MAX_FOCK = 12


@dataclass(frozen=True)
class WaveFunction:
    grid: GridSpec
    values: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.grid.require_1d()
        vals = np.array(self.values, dtype=complex, copy=True)
        if vals.shape != (self.grid.points_N,):
            raise ValueError("wavefunction must have one sample per grid point")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dq))

    def __call__(self, q) -> np.ndarray:
        """Band-limited interpolation at arbitrary positions."""
        g = self.grid
        n = g.points_N
        k = np.fft.fftfreq(n, d=g.dq) * 2 * np.pi
        c = np.fft.fft(self.values) / n
        c[n // 2] = 0.0
        x = np.asarray(q, dtype=float)[..., None] - g.q[0]
        return np.exp(1j * x * k) @ c


@dataclass(frozen=True)
class DensityKernel:
    grid: GridSpec
    kernel: np.ndarray
    weights: tuple | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.grid.require_1d()
        K = np.array(self.kernel, dtype=complex, copy=True)
        n = self.grid.points_N
        if K.shape != (n, n):
            raise ValueError(f"kernel must have shape {(n, n)}")
        scale = max(1.0, float(np.max(np.abs(K))))
        if np.max(np.abs(K - K.conj().T)) > 1e-12 * scale:
            raise ValueError("kernel is not Hermitian")
        tr = np.real(np.trace(K)) * self.grid.dq
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"kernel trace is {tr:.12g}, not 1")
        K.setflags(write=False)
        object.__setattr__(self, "kernel", K)
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.kernel)) * self.grid.dq)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.kernel - self.kernel.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        """Operator eigenvalues (kernel matrix times ``dq``), ascending."""
        H = 0.5 * (self.kernel + self.kernel.conj().T)
        return np.linalg.eigvalsh(H) * self.grid.dq


def _check_resolved(values: np.ndarray, grid: GridSpec, what: str):
    peak = np.max(np.abs(values))
    if not (np.isfinite(peak) and peak > 0):
        raise ResolutionError(f"{what} vanishes or overflows on the grid")
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > DECAY_TOL * peak:
        raise ResolutionError(f"{what} is not resolved: |psi(+-L)| / max = {edge / peak:.2e}")
    spec = np.abs(np.fft.fftshift(np.fft.fft(values)))
    if max(spec[0], spec[1], spec[-1]) > DECAY_TOL * spec.max():
        raise ResolutionError(f"{what} has momentum content at the edge of the grid")


def coherent_state(z: complex, grid: GridSpec) -> WaveFunction:
    """``psi_z(q) = (pi hbar)^-1/4 exp(-q^2/(2 hbar) + z q - hbar (Re z)^2 / 2)``.

    Centred at ``(hbar Re z, hbar Im z)`` in phase space.
    """
    grid.require_1d()
    z = complex(np.ravel(z)[0]) if np.ndim(z) else complex(z)
    if not np.isfinite(z):
        raise ValueError("z must be finite")
    h = grid.hbar
    q = grid.q
    vals = (np.pi * h) ** -0.25 * np.exp(-q * q / (2 * h) + z * q - 0.5 * h * z.real ** 2)
    _check_resolved(vals, grid, f"coherent state z={z}")
    return WaveFunction(grid, vals, f"coherent{{{z.real:g},{z.imag:g}}}")


def fock_state(n: int, grid: GridSpec) -> WaveFunction:
    """Hermite function of order ``n`` (unit mass and frequency, the grid's hbar)."""
    grid.require_1d()
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    if n > MAX_FOCK:
        raise ResolutionError(f"fock states are limited to n <= {MAX_FOCK}")
    h = grid.hbar
    x = grid.q / np.sqrt(h)
    prev = np.zeros_like(x)
    cur = (np.pi * h) ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(1, n + 1):
        prev, cur = cur, np.sqrt(2.0 / k) * x * cur - np.sqrt((k - 1) / k) * prev
    _check_resolved(cur, grid, f"fock state n={n}")
    return WaveFunction(grid, cur, f"fock{{{n}}}")


def cat_state(z: complex, grid: GridSpec, sign: int = -1) -> WaveFunction:
    """``(psi_z + sign * psi_-z)`` renormalised on the grid; ``sign=-1`` is the odd cat."""
    a = coherent_state(z, grid).values
    b = coherent_state(-z, grid).values
    vals = a + sign * b
    vals = vals / np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dq)
    z = complex(z)
    return WaveFunction(grid, vals, f"cat{{{z.real:g},{z.imag:g},{sign:+d}}}")


def inner(psi: WaveFunction, phi: WaveFunction) -> complex:
    """``<psi|phi> = int conj(psi) phi dq``."""
    if psi.grid != phi.grid:
        raise GridMismatchError("states live on different grids")
    return complex(np.vdot(psi.values, phi.values) * psi.grid.dq)


def density(psi: WaveFunction) -> DensityKernel:
    return DensityKernel(psi.grid, np.outer(psi.values, psi.values.conj()), (1.0,), psi.label)


def mix(states: Sequence[WaveFunction], weights: Sequence[float]) -> DensityKernel:
    """``sum_k w_k psi_k(q) conj(psi_k(q'))``."""
    states = list(states)
    w = np.asarray(weights, dtype=float)
    if len(states) == 0 or w.shape != (len(states),):
        raise ValueError("need one weight per state")
    if np.any(w < 0):
        raise ValueError("mixture weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {w.sum()!r}, not 1")
    grid = states[0].grid
    if any(s.grid != grid for s in states):
        raise GridMismatchError("mixture components live on different grids")
    K = np.zeros((grid.points_N, grid.points_N), dtype=complex)
    for wk, s in zip(w, states):
        if wk:
            K += wk * np.outer(s.values, s.values.conj())
    label = "mixture{" + ",".join(s.label for s in states) + "}"
    return DensityKernel(grid, K, tuple(w), label)


def _check_eta(eta):
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")


MAX_FINE = 32
SEPARATION_TOL = 1e-10


def _fine_factor(grid: GridSpec, eta: float) -> int:
    """Upsampling factor ``f`` with separation step ``2 dq / f <= dq * eta / hbar``.

    A coarser step makes the transform periodic in ``p`` with a period shorter
    than the momentum grid, so copies of ``W`` would appear inside it.
    """
    f = 2
    while f * eta < 2 * grid.hbar * (1 - 1e-12):
        f *= 2
    if f > MAX_FINE:
        raise ResolutionError(f"eta = {eta:g} is below hbar / {MAX_FINE // 2} and not resolved by the grid")
    return f


def _upsample(values: np.ndarray, f: int, axis: int = 0) -> np.ndarray:
    while f > 1:
        values = upsample2(values, axis)
        f //= 2
    return values


def _pair_indices(n: int, f: int):
    """Fine indices ``(f j + k, f j - k)`` for ``|k| <= f n / 2`` and a validity mask."""
    j = np.arange(n)[:, None]
    k = np.arange(-(f * n) // 2, (f * n) // 2 + 1)[None, :]
    u = f * j + k
    v = f * j - k
    ok = (u >= 0) & (u < f * n) & (v >= 0) & (v < f * n)
    return np.clip(u, 0, f * n - 1), np.clip(v, 0, f * n - 1), ok, k.ravel()


def _wigner_from_pairs(S: np.ndarray, k: np.ndarray, grid: GridSpec, eta: float, f: int) -> np.ndarray:
    """``(2 pi eta)^-1 int exp(-i p s / eta) S(q, s) ds`` with ``s = 2 k dq / f``."""
    ds = 2.0 * grid.dq / f
    # the momentum grid determines the transform only for |s| < eta * pi / dp
    mass = np.abs(S) ** 2
    outside = np.abs(k * ds) >= eta * np.pi / grid.dp
    frac = mass[:, outside].sum() / mass.sum() if mass.sum() > 0 else 0.0
    if frac > SEPARATION_TOL:
        raise ResolutionError(
            f"eta = {eta:g}: {frac:.1e} of the kernel lies at separations the momentum grid "
            f"cannot resolve; use a larger half_width_L")
    E = np.exp(-1j * np.outer(k * ds, grid.p) / eta)
    return (S @ E) * (ds / (2.0 * np.pi * eta))


def _wigner_of_vector(psi: np.ndarray, grid: GridSpec, eta: float, f: int) -> np.ndarray:
    g = _upsample(psi, f)
    u, v, ok, k = _pair_indices(grid.points_N, f)
    S = np.where(ok, g[u] * np.conj(g[v]), 0.0)
    return _wigner_from_pairs(S, k, grid, eta, f)


def _as_real(W: np.ndarray, what: str) -> np.ndarray:
    scale = np.max(np.abs(W))
    if np.max(np.abs(W.imag)) > 1e-10 * scale:
        raise ValueError(f"{what} has a non-negligible imaginary part")
    return W.real


def wigner_transform(psi: WaveFunction, eta: float | None = None) -> PhaseSpaceFunction:
    """eta-Wigner function of a pure state (``eta`` defaults to the grid's hbar)."""
    eta = psi.grid.hbar if eta is None else eta
    _check_eta(eta)
    W = _wigner_of_vector(psi.values, psi.grid, eta, _fine_factor(psi.grid, eta))
    return PhaseSpaceFunction(psi.grid, _as_real(W, "Wigner function"), Domain.DIRECT, psi.label)


def wigner_of_density(rho: DensityKernel, eta: float | None = None) -> PhaseSpaceFunction:
    g = rho.grid
    eta = g.hbar if eta is None else eta
    _check_eta(eta)
    f = _fine_factor(g, eta)
    hermitian = rho.hermiticity_error() <= 1e-10 * np.max(np.abs(rho.kernel))
    if f == 2:
        Kf = upsample2(upsample2(rho.kernel, axis=0), axis=1)
        u, v, ok, k = _pair_indices(g.points_N, f)
        W = _wigner_from_pairs(np.where(ok, Kf[u, v], 0.0), k, g, eta, f)
    else:
        if not hermitian:
            raise ValueError("eta below hbar needs a Hermitian kernel")
        # sum of rank-one terms avoids forming the (f N)^2 fine kernel
        lam, vecs = np.linalg.eigh(0.5 * (rho.kernel + rho.kernel.conj().T))
        keep = np.abs(lam) > 1e-15 * np.max(np.abs(lam))
        W = sum(lk * _wigner_of_vector(vecs[:, i], g, eta, f)
                for i, lk in zip(np.flatnonzero(keep), lam[keep]))
    if hermitian:
        W = _as_real(W, "Wigner function")
    return PhaseSpaceFunction(g, W, Domain.DIRECT, rho.label)


EDGE_BAND = 0.125


def weyl_kernel(F, eta: float, grid: GridSpec | None = None):
    """Kernel ``A(q, q') = int F((q+q')/2, p) exp(i p (q-q') / eta) dp`` on the grid.

    Returns ``(kernel, leakage)`` where ``leakage`` is the fraction of the
    Hilbert-Schmidt mass ``int |A|^2`` of the reconstruction that falls
    outside ``[-L, L)^2``, or that sits in the outer eighth of the
    separation range resolved by the momentum grid, whichever is larger.  ``F`` is a direct-domain :class:`PhaseSpaceFunction`
    or a :class:`GaussianSpec` (then evaluated in closed form on ``grid``).
    """
    _check_eta(eta)
    if isinstance(F, GaussianSpec):
        grid = grid or GridSpec()
    else:
        F.require(Domain.DIRECT)
        grid = F.grid
    n = grid.points_N
    dq = grid.dq
    # t = s / eta is periodic with period 2 pi / dp on the sampled p axis
    t_max = np.pi / grid.dp
    kmax = max(min(int(np.ceil(t_max * eta / dq)), 2 * n), n - 1)
    k = np.arange(-kmax, kmax + 1)
    t = k * dq / eta
    principal = np.abs(t) < t_max
    mid = grid.q[0] + 0.5 * dq * np.arange(2 * n)

    if isinstance(F, GaussianSpec):
        G = F.p_transform(mid[:, None], t[None, :])
    else:
        Fup = upsample2(F.values, axis=0)
        _, cs = _support_box(F.values)
        E = np.exp(1j * np.outer(grid.p[cs], t)) * grid.dp
        G = Fup[:, cs] @ E
        # only the principal period of t is known from sampled p data
        G = np.where(principal[None, :], G, 0.0)

    c = np.arange(2 * n)[:, None]
    u = c + k[None, :]
    v = c - k[None, :]
    on_lattice = (u % 2) == 0
    inside = (u >= 0) & (u <= 2 * n - 2) & (v >= 0) & (v <= 2 * n - 2)
    mass = np.abs(G) ** 2
    m_in = mass[on_lattice & inside].sum()
    m_out = mass[on_lattice & ~inside].sum()
    leakage = float(m_out / (m_in + m_out)) if m_in + m_out > 0 else 0.0
    if not isinstance(F, GaussianSpec):
        # sampled p data only determine |t| < t_max; mass near that edge means
        # the kernel was cut off there
        band = principal & (np.abs(t) >= (1.0 - EDGE_BAND) * t_max)
        m_band = mass[on_lattice & band[None, :]].sum()
        total = mass[on_lattice].sum()
        leakage = max(leakage, float(m_band / total) if total > 0 else 0.0)

    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    K = G[a + b, (a - b) + kmax]
    return K, leakage


def inverse_weyl(F, eta: float | None = None, leakage_tol: float = 1e-8,
                 grid: GridSpec | None = None) -> DensityKernel:
    """Invert the eta-Wigner map: the kernel whose eta-Wigner function is ``F``."""
    if eta is None:
        eta = (grid or getattr(F, "grid", None) or GridSpec()).hbar
    K, leak = weyl_kernel(F, eta, grid)
    if leak > leakage_tol:
        raise AliasingError(
            f"inverse Weyl at eta={eta:g} leaks {leak:.2e} of its mass outside the grid box", leak)
    g = (grid or GridSpec()) if isinstance(F, GaussianSpec) else F.grid
    return DensityKernel(g, K, None, getattr(F, "label", ""))


def purity(F: PhaseSpaceFunction) -> float:
    """Grid integral of ``|F|^2``."""
    F.require(Domain.DIRECT)
    return float(np.sum(np.abs(F.values) ** 2) * F.grid.dxi)


def purity_bound(eta: float, d: int = 1) -> float:
    """Upper bound ``(2 pi eta)^-d`` attained exactly by pure states."""
    return (2.0 * np.pi * eta) ** -d


def moyal_overlap(F: PhaseSpaceFunction, G: PhaseSpaceFunction) -> float:
    """Grid integral of ``conj(F) G``; equals ``(2 pi eta)^-d |<psi|phi>|^2``."""
    F.require(Domain.DIRECT)
    G.require(Domain.DIRECT)
    if F.grid != G.grid:
        raise GridMismatchError("functions live on different grids")
    val = np.vdot(F.values, G.values) * F.grid.dxi
    scale = np.sqrt(purity(F) * purity(G))
    if abs(val.imag) > 1e-10 * max(scale, 1e-300):
        raise ValueError("Moyal overlap has a non-negligible imaginary part")
    return float(val.real)
