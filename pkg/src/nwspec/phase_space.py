"""Phase-space grids, the symplectic form and the symplectic Fourier transform.

Conventions (d = 1 on numerical grids):

* position axis ``q_j = -L + j*dq`` with ``dq = 2L/N``;
* momentum axis ``p_m = (m - N/2)*dp`` with ``dp = pi*hbar/L``;
* arrays are indexed ``values[q, p]``;
* the dual phase space carries ``a = (a_q, a_p)`` with ``a_q`` on the grid
  ``q/hbar`` and ``a_p`` on ``p/hbar``, and dual arrays are indexed
  ``values[a_q, a_p]``.

The forward transform is ``F^(a) = int F(xi) exp(i Omega(xi, a)) dxi`` and the
inverse carries the ``(2 pi)^(-2d)`` factor, so that ``F^(0)`` is the integral
of ``F``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write_text
from .errors import DimensionError, DomainTagError, GridMismatchError

__all__ = [
    "GridSpec",
    "PhaseSpacePoint",
    "Domain",
    "PhaseSpaceFunction",
    "symplectic_form",
    "symplectic_fourier",
    "inverse_symplectic_fourier",
    "convolve",
    "fourier_at",
    "grid_integral",
    "delta_spike",
    "half_sample_shift",
    "dump_csv",
    "load_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-L, L) x [-N dp / 2, N dp / 2)``."""

    dim_d: int = 1
    half_width_L: float = 10.0
    points_N: int = 256
    hbar: float = 1.0

    def __post_init__(self):
        n = self.points_N
        if self.dim_d < 1:
            raise ValueError("dim_d must be a positive integer")
        if n < 8 or n & (n - 1):
            raise ValueError(f"points_N must be a power of two >= 8, got {n}")
        if not self.half_width_L > 0:
            raise ValueError("half_width_L must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    def require_1d(self):
        if self.dim_d != 1:
            raise DimensionError("numerical grids are restricted to d = 1")

    @property
    def dq(self) -> float:
        return 2.0 * self.half_width_L / self.points_N

    @property
    def dp(self) -> float:
        return np.pi * self.hbar / self.half_width_L

    @property
    def dxi(self) -> float:
        return self.dq * self.dp

    @functools.cached_property
    def q(self) -> np.ndarray:
        return (np.arange(self.points_N) - self.points_N // 2) * self.dq

    @functools.cached_property
    def p(self) -> np.ndarray:
        return (np.arange(self.points_N) - self.points_N // 2) * self.dp

    @property
    def daq(self) -> float:
        return self.dq / self.hbar

    @property
    def dap(self) -> float:
        return self.dp / self.hbar

    @functools.cached_property
    def aq(self) -> np.ndarray:
        return self.q / self.hbar

    @functools.cached_property
    def ap(self) -> np.ndarray:
        return self.p / self.hbar

    @property
    def p_max(self) -> float:
        return 0.5 * self.points_N * self.dp

    @property
    def dual_extent(self) -> tuple[float, float]:
        """Half-widths ``(max |a_q|, max |a_p|)`` of the dual grid."""
        return self.half_width_L / self.hbar, self.p_max / self.hbar

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    def dual_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.aq, self.ap, indexing="ij")

    def q_index(self, q: float) -> int:
        """Index of the grid node nearest to ``q``."""
        return int(round(q / self.dq)) + self.points_N // 2

    def p_index(self, p: float) -> int:
        return int(round(p / self.dp)) + self.points_N // 2

    def as_dict(self) -> dict:
        return {
            "dim_d": self.dim_d,
            "half_width_L": self.half_width_L,
            "points_N": self.points_N,
            "hbar": self.hbar,
        }


@dataclass(frozen=True)
class PhaseSpacePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise DimensionError("q and p must be vectors of equal length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase-space point has non-finite components")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.size

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])


class Domain(str, enum.Enum):
    DIRECT = "direct"
    SYMPLECTIC_FOURIER = "symplectic_fourier"


@dataclass(frozen=True)
class PhaseSpaceFunction:
    """Samples of a phase-space function (or of its symplectic transform)."""

    grid: GridSpec
    values: np.ndarray
    domain: Domain = Domain.DIRECT
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.grid.require_1d()
        vals = np.array(self.values, copy=True)
        n = self.grid.points_N
        if vals.shape != (n, n):
            raise DimensionError(f"values must have shape {(n, n)}, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "domain", Domain(self.domain))

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)

    def is_real(self, rtol: float = 1e-12) -> bool:
        if not np.iscomplexobj(self.values):
            return True
        scale = np.max(np.abs(self.values))
        return bool(np.max(np.abs(self.values.imag)) <= rtol * scale)

    def require(self, domain: Domain):
        if self.domain != domain:
            raise DomainTagError(f"expected a {domain.value} function, got {self.domain.value}")

    def __add__(self, other):
        _same_grid(self, other)
        if self.domain != other.domain:
            raise DomainTagError("cannot add functions in different domains")
        return PhaseSpaceFunction(self.grid, self.values + other.values, self.domain)

    def __mul__(self, scalar):
        return PhaseSpaceFunction(self.grid, self.values * scalar, self.domain)

    __rmul__ = __mul__


def _same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError("functions live on different grids")


def symplectic_form(x: PhaseSpacePoint, y: PhaseSpacePoint) -> float:
    """``Omega(x, y) = q.p' - p.q'``."""
    if x.dim != y.dim:
        raise DimensionError("symplectic_form: dimension mismatch")
    return float(np.dot(x.q, y.p) - np.dot(x.p, y.q))


def symplectic_form_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised ``Omega`` for arrays ``(..., 2d)`` laid out as ``(q, p)``."""
    d = a.shape[-1] // 2
    return np.sum(a[..., :d] * b[..., d:] - a[..., d:] * b[..., :d], axis=-1)


def grid_integral(F: PhaseSpaceFunction) -> complex | float:
    total = np.sum(F.values) * F.grid.dxi
    return float(total.real) if np.isrealobj(F.values) else complex(total)


def symplectic_fourier(F: PhaseSpaceFunction) -> PhaseSpaceFunction:
    F.require(Domain.DIRECT)
    g = F.grid
    n = g.points_N
    x = np.fft.ifftshift(F.values)
    # q -> a_p with exp(+i q a_p), p -> a_q with exp(-i p a_q)
    x = np.fft.ifft(x, axis=0) * n
    x = np.fft.fft(x, axis=1)
    x = np.fft.fftshift(x) * g.dxi
    return PhaseSpaceFunction(g, x.T, Domain.SYMPLECTIC_FOURIER, F.label)


def inverse_symplectic_fourier(Fhat: PhaseSpaceFunction) -> PhaseSpaceFunction:
    Fhat.require(Domain.SYMPLECTIC_FOURIER)
    g = Fhat.grid
    n = g.points_N
    x = np.fft.ifftshift(Fhat.values.T)
    x = np.fft.fft(x, axis=0)
    x = np.fft.ifft(x, axis=1) * n
    x = np.fft.fftshift(x) * (g.daq * g.dap / (2.0 * np.pi) ** 2)
    return PhaseSpaceFunction(g, x, Domain.DIRECT, Fhat.label)


def convolve(F: PhaseSpaceFunction, G: PhaseSpaceFunction) -> PhaseSpaceFunction:
    """``(F * G)(xi) = int F(xi - xi') G(xi') dxi'`` on the periodic grid."""
    F.require(Domain.DIRECT)
    G.require(Domain.DIRECT)
    _same_grid(F, G)
    prod = symplectic_fourier(F).values * symplectic_fourier(G).values
    out = inverse_symplectic_fourier(PhaseSpaceFunction(F.grid, prod, Domain.SYMPLECTIC_FOURIER))
    vals = out.values
    if np.isrealobj(F.values) and np.isrealobj(G.values):
        vals = vals.real
    return PhaseSpaceFunction(F.grid, vals, Domain.DIRECT)


def delta_spike(grid: GridSpec) -> PhaseSpaceFunction:
    """Grid delta at the origin with unit grid integral (inverse transform of 1)."""
    vals = np.zeros((grid.points_N, grid.points_N))
    c = grid.points_N // 2
    vals[c, c] = 1.0 / grid.dxi
    return PhaseSpaceFunction(grid, vals, Domain.DIRECT, "delta")


def _support_box(values: np.ndarray, rel: float = 1e-18):
    mag = np.abs(values)
    thr = rel * mag.max()
    rows = np.flatnonzero(mag.max(axis=1) > thr)
    cols = np.flatnonzero(mag.max(axis=0) > thr)
    if rows.size == 0:
        return slice(0, 0), slice(0, 0)
    return slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1)


def fourier_at(F: PhaseSpaceFunction, points, chunk: int = 4096) -> np.ndarray:
    """Evaluate ``F^`` at arbitrary dual points from the grid samples of ``F``.

    This is the band-limited interpolant of the grid transform: at dual grid
    nodes it reproduces :func:`symplectic_fourier` exactly.  ``points`` has
    shape ``(P, 2)`` with columns ``(a_q, a_p)``.
    """
    if F.domain == Domain.SYMPLECTIC_FOURIER:
        F = inverse_symplectic_fourier(F)
    g = F.grid
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    rs, cs = _support_box(F.values)
    vals = F.values[rs, cs]
    q = g.q[rs]
    p = g.p[cs]
    out = np.empty(pts.shape[0], dtype=complex)
    for start in range(0, pts.shape[0], chunk):
        a = pts[start:start + chunk]
        U = np.exp(1j * np.outer(a[:, 1], q))
        V = np.exp(-1j * np.outer(a[:, 0], p))
        out[start:start + chunk] = np.einsum("ij,ij->i", U @ vals, V)
    return out * g.dxi


def half_sample_shift(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Band-limited interpolation of periodic samples half a step forward."""
    n = values.shape[axis]
    k = np.fft.fftfreq(n) * 2.0 * np.pi
    phase = np.exp(0.5j * k)
    phase[n // 2] = 0.0  # split Nyquist term: cos(pi/2)
    shape = [1] * values.ndim
    shape[axis] = n
    spec = np.fft.fft(values, axis=axis) * phase.reshape(shape)
    out = np.fft.ifft(spec, axis=axis)
    return out.real if np.isrealobj(values) else out


def upsample2(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Interleave samples with their half-step interpolants along ``axis``."""
    shifted = half_sample_shift(values, axis)
    out_shape = list(values.shape)
    out_shape[axis] *= 2
    out = np.empty(out_shape, dtype=np.result_type(values, shifted))
    idx_even = [slice(None)] * values.ndim
    idx_odd = [slice(None)] * values.ndim
    idx_even[axis] = slice(0, None, 2)
    idx_odd[axis] = slice(1, None, 2)
    out[tuple(idx_even)] = values
    out[tuple(idx_odd)] = shifted
    return out


def dump_csv(F: PhaseSpaceFunction, path) -> Path:
    """Write ``q,p,value_re,value_im`` rows (dual coordinates for Fourier data)."""
    g = F.grid
    if F.domain == Domain.DIRECT:
        X, Y = g.mesh()
    else:
        X, Y = g.dual_mesh()
    vals = np.asarray(F.values, dtype=complex)
    lines = ["q,p,value_re,value_im"]
    for x, y, v in zip(X.ravel(), Y.ravel(), vals.ravel()):
        lines.append(f"{x:.17g},{y:.17g},{v.real:.17g},{v.imag:.17g}")
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_csv(path, grid: GridSpec, domain: Domain = Domain.DIRECT) -> PhaseSpaceFunction:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    n = grid.points_N
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(n, n)
    if not np.any(vals.imag):
        vals = vals.real
    return PhaseSpaceFunction(grid, vals, domain)
