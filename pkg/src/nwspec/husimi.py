"""Husimi functions, Bargmann transforms and Husimi zero detection (d = 1)."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._io import atomic_write_text
from .gaussian import gaussian_family
from .phase_space import Domain, GridSpec, PhaseSpaceFunction, PhaseSpacePoint, convolve
from .states import WaveFunction, coherent_state, inner, wigner_transform

__all__ = [
    "BargmannSample",
    "IdentityCheck",
    "HusimiZero",
    "coherent_wigner",
    "gaussian_smoothing",
    "husimi",
    "bargmann_transform",
    "bargmann_form_ratio",
    "bargmann_husimi_identity_check",
    "find_husimi_zeros",
    "zeros_to_json",
    "write_zeros",
]

HUSIMI_NEG_TOL = 1e-9
BOUND_SLACK = 1e-9
ZERO_THRESHOLD = 1e-6


def _point(zeta) -> tuple[float, float]:
    if isinstance(zeta, PhaseSpacePoint):
        arr = zeta.as_array()
    else:
        arr = np.asarray(zeta, dtype=float).ravel()
    if arr.shape != (2,):
        raise ValueError("expected a point (q, p) with d = 1")
    return float(arr[0]), float(arr[1])


def _inside(grid: GridSpec, q: float, p: float) -> bool:
    return grid.q[0] < q < grid.q[-1] and grid.p[0] < p < grid.p[-1]


def coherent_wigner(zeta, grid: GridSpec) -> PhaseSpaceFunction:
    """``(pi hbar)^-1 exp(-|xi - zeta|^2 / hbar)``, the Wigner function of a coherent state."""
    q0, p0 = _point(zeta)
    if not _inside(grid, q0, p0):
        raise ValueError(f"zeta = ({q0:g}, {p0:g}) lies outside the grid")
    h = grid.hbar
    Q, P = grid.mesh()
    vals = np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / h) / (np.pi * h)
    return PhaseSpaceFunction(grid, vals, Domain.DIRECT, f"coherent_wigner({q0:g},{p0:g})")


def gaussian_smoothing(F: PhaseSpaceFunction, eta: float) -> PhaseSpaceFunction:
    """``G_eta * F``; for ``eta < hbar`` this may go negative."""
    F.require(Domain.DIRECT)
    G = gaussian_family(eta).on_grid(F.grid)
    out = convolve(G, F)
    return PhaseSpaceFunction(F.grid, out.values, Domain.DIRECT, f"G_{eta:g}*{F.label}")


def husimi(F: PhaseSpaceFunction) -> PhaseSpaceFunction:
    """Husimi function ``G_hbar * F``.

    Warns when the result dips below ``-1e-9 * max``, which means ``F`` was
    not an hbar-Wigner function.
    """
    Q = gaussian_smoothing(F, F.grid.hbar)
    vals = Q.real
    if vals.min() < -HUSIMI_NEG_TOL * vals.max():
        warnings.warn(f"Husimi function is negative ({vals.min():.3e}); input is not a Wigner function",
                      RuntimeWarning, stacklevel=2)
    return PhaseSpaceFunction(F.grid, vals, Domain.DIRECT, f"husimi({F.label})")


# -- Bargmann transform ------------------------------------------------------


@dataclass(frozen=True)
class BargmannSample:
    z: complex
    value: complex
    hbar: float = 1.0

    @property
    def bound(self) -> float:
        return float(np.exp(0.5 * self.hbar * self.z.real ** 2))

    @property
    def slack(self) -> float:
        """``bound - |value|``; nonnegative up to round-off."""
        return self.bound - abs(self.value)

    def as_dict(self) -> dict:
        return {"z": [self.z.real, self.z.imag], "value": [self.value.real, self.value.imag],
                "bound": self.bound}


def _check_z(z: complex, grid: GridSpec):
    h = grid.hbar
    if not np.isfinite(z) or not _inside(grid, h * z.real, h * z.imag):
        raise ValueError(f"z = {z} is outside the evaluable range of the grid")


def bargmann_transform(psi: WaveFunction, z_list) -> list:
    """``F(z) = (pi hbar)^-1/4 int exp(-q^2/(2 hbar) + z q) conj(psi(q)) dq``."""
    g = psi.grid
    h = g.hbar
    q = g.q
    out = []
    for z in z_list:
        z = complex(z)
        _check_z(z, g)
        integrand = np.exp(-q * q / (2 * h) + z * q) * np.conj(psi.values)
        val = (np.pi * h) ** -0.25 * np.sum(integrand) * g.dq
        s = BargmannSample(z, complex(val), h)
        if s.slack < -BOUND_SLACK * max(1.0, s.bound):
            raise ArithmeticError(f"|F({z})| = {abs(val):.6g} exceeds its bound {s.bound:.6g}")
        out.append(s)
    return out


def bargmann_form_ratio(psi: WaveFunction, z: complex) -> complex:
    """Ratio of the integral form to ``<psi|psi_z> exp(hbar (Re z)^2 / 2)``."""
    z = complex(z)
    (s,) = bargmann_transform(psi, [z])
    other = inner(psi, coherent_state(z, psi.grid)) * np.exp(0.5 * psi.grid.hbar * z.real ** 2)
    return s.value / other


@dataclass
class IdentityCheck:
    z: list
    lhs: np.ndarray
    rhs: np.ndarray
    max_rel_error: float
    max_abs_error: float

    def as_dict(self) -> dict:
        return {
            "z": [[z.real, z.imag] for z in self.z],
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "max_rel_error": self.max_rel_error,
            "max_abs_error": self.max_abs_error,
        }


def _husimi_at(W: PhaseSpaceFunction, q0: float, p0: float) -> float:
    """Direct quadrature of ``(G_hbar * W)(q0, p0)``."""
    g = W.grid
    h = g.hbar
    Q, P = g.mesh()
    kern = np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / h) / (np.pi * h)
    return float(np.sum(kern * W.real) * g.dxi)


def bargmann_husimi_identity_check(psi: WaveFunction, z_list, abs_floor: float = 1e-12
                                   ) -> IdentityCheck:
    """Compare ``|F(z)|^2`` with ``2 pi hbar exp(hbar (Re z)^2) Q(zeta)``.

    ``zeta = hbar (Re z, Im z)`` is where the coherent state ``psi_z`` sits.
    The left side comes from the Bargmann integral, the right from a direct
    quadrature of the Husimi function against the Wigner function of ``psi``.
    Samples where both sides are below ``abs_floor`` only enter the absolute
    error.
    """
    g = psi.grid
    h = g.hbar
    z_list = [complex(z) for z in z_list]
    for z in z_list:
        _check_z(z, g)
        if not _inside(g, 2 * h * z.real, 2 * h * z.imag):
            raise ValueError(f"z = {z} is too close to the grid edge")
    W = wigner_transform(psi, h)
    lhs = np.array([abs(s.value) ** 2 for s in bargmann_transform(psi, z_list)])
    rhs = np.array([2 * np.pi * h * np.exp(h * z.real ** 2) * _husimi_at(W, h * z.real, h * z.imag)
                    for z in z_list])
    diff = np.abs(lhs - rhs)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    big = scale > abs_floor
    rel = float(np.max(diff[big] / scale[big])) if big.any() else 0.0
    return IdentityCheck(z_list, lhs, rhs, rel, float(diff.max()) if diff.size else 0.0)


# -- zeros ---------------------------------------------------------------------


@dataclass(frozen=True)
class HusimiZero:
    q: float
    p: float
    refined_value: float

    @property
    def point(self) -> PhaseSpacePoint:
        return PhaseSpacePoint(np.array([self.q]), np.array([self.p]))

    def as_dict(self) -> dict:
        return {"q": self.q, "p": self.p, "refined_value": self.refined_value}


_OFFSETS = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)
_DESIGN = np.column_stack([
    np.ones(9), _OFFSETS[:, 0], _OFFSETS[:, 1],
    _OFFSETS[:, 0] ** 2, _OFFSETS[:, 0] * _OFFSETS[:, 1], _OFFSETS[:, 1] ** 2,
])


def _refine(vals: np.ndarray, i: int, j: int):
    """Quadratic fit on the 3x3 block around ``(i, j)``; offsets in cell units."""
    block = vals[i - 1:i + 2, j - 1:j + 2].ravel()
    c, *_ = np.linalg.lstsq(_DESIGN, block, rcond=None)
    H = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
    if np.all(np.linalg.eigvalsh(H) > 0):
        d = np.linalg.solve(H, -c[1:3])
        if np.all(np.abs(d) <= 1.0):
            x, y = d
            return x, y, float(c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y)
    return 0.0, 0.0, float(vals[i, j])


def find_husimi_zeros(Q: PhaseSpaceFunction, threshold: float = ZERO_THRESHOLD) -> list:
    """Isolated zeros of a Husimi function.

    The set ``{Q <= threshold * max Q}`` is split into connected components;
    components touching the grid edge are the decaying tails, the rest are
    holes around zeros.  Each hole contributes its grid minimum, refined by a
    quadratic fit on the surrounding 3x3 block.
    """
    Q.require(Domain.DIRECT)
    g = Q.grid
    vals = Q.real
    low = vals <= threshold * vals.max()
    labels, n = ndimage.label(low)
    edge = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    zeros = []
    for lab in range(1, n + 1):
        if lab in edge:
            continue
        idx = np.flatnonzero(labels.ravel() == lab)
        i, j = np.unravel_index(idx[np.argmin(vals.ravel()[idx])], vals.shape)
        dx, dy, v = _refine(vals, i, j)
        # a 9-point least-squares fit does not interpolate; keep the better estimate
        v = min(v, float(vals[i, j]))
        zeros.append(HusimiZero(float(g.q[i] + dx * g.dq), float(g.p[j] + dy * g.dp), v))
    zeros.sort(key=lambda z: (z.q, z.p))
    return zeros


def zeros_to_json(zeros) -> str:
    return json.dumps([z.as_dict() for z in zeros], indent=2)


def write_zeros(zeros, path):
    return atomic_write_text(path, zeros_to_json(zeros) + "\n")
