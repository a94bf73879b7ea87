"""Closed-form Gaussian phase-space functions.

``F(xi) = sqrt(det A) / pi^d * exp(-(xi - xi0)^T A (xi - xi0))`` with ``A``
real, symmetric and positive definite.  Everything here works for any ``d``;
only :meth:`GaussianSpec.on_grid` and :meth:`GaussianSpec.p_transform` need
``d = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .phase_space import Domain, GridSpec, PhaseSpaceFunction

__all__ = ["GaussianSpec", "gaussian_family", "squeezed_gaussian", "symplectic_matrix", "gaussian_eta0"]


def symplectic_matrix(d: int) -> np.ndarray:
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return J


@dataclass(frozen=True)
class GaussianSpec:
    A: np.ndarray
    center: np.ndarray = None
    dim_d: int = None
    label: str = ""

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise DimensionError("A must be a square 2d x 2d matrix")
        d = A.shape[0] // 2
        if self.dim_d is not None and self.dim_d != d:
            raise DimensionError("dim_d does not match the size of A")
        if np.max(np.abs(A - A.T)) > 1e-14 * max(1.0, np.max(np.abs(A))):
            raise ValueError("A is not symmetric")
        A = 0.5 * (A + A.T)
        if np.min(np.linalg.eigvalsh(A)) <= 0:
            raise ValueError("A is not positive definite")
        c = np.zeros(2 * d) if self.center is None else np.array(self.center, dtype=float).ravel()
        if c.shape != (2 * d,):
            raise DimensionError("center must have length 2d")
        A.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "dim_d", d)

    @property
    def norm(self) -> float:
        return np.sqrt(np.linalg.det(self.A)) / np.pi ** self.dim_d

    def __call__(self, xi) -> np.ndarray:
        x = np.asarray(xi, dtype=float) - self.center
        return self.norm * np.exp(-np.einsum("...i,ij,...j->...", x, self.A, x))

    def fourier(self, a) -> np.ndarray:
        """Exact symplectic transform at dual points ``a`` of shape ``(..., 2d)``."""
        a = np.asarray(a, dtype=float)
        k = a @ symplectic_matrix(self.dim_d).T  # Omega(xi, a) = xi . (J a)
        Ainv = np.linalg.inv(self.A)
        quad = np.einsum("...i,ij,...j->...", k, Ainv, k)
        return np.exp(1j * (k @ self.center) - 0.25 * quad)

    def p_transform(self, q, t) -> np.ndarray:
        """``int F(q, p) exp(i p t) dp`` in closed form (d = 1)."""
        if self.dim_d != 1:
            raise DimensionError("p_transform is only defined for d = 1")
        (a11, a12), (_, a22) = self.A
        q0, p0 = self.center
        x = np.asarray(q, dtype=float) - q0
        t = np.asarray(t, dtype=float)
        b = 1j * t - 2.0 * a12 * x
        return (self.norm * np.sqrt(np.pi / a22)
                * np.exp(b * b / (4.0 * a22) - a11 * x * x + 1j * t * p0))

    def on_grid(self, grid: GridSpec) -> PhaseSpaceFunction:
        if self.dim_d != 1:
            raise DimensionError("numerical grids are restricted to d = 1")
        Q, P = grid.mesh()
        return PhaseSpaceFunction(grid, self(np.stack([Q, P], axis=-1)), Domain.DIRECT, self.label)

    def fourier_on_grid(self, grid: GridSpec) -> PhaseSpaceFunction:
        AQ, AP = grid.dual_mesh()
        return PhaseSpaceFunction(grid, self.fourier(np.stack([AQ, AP], axis=-1)),
                                  Domain.SYMPLECTIC_FOURIER, self.label)

    def as_dict(self) -> dict:
        return {"A": self.A.tolist(), "center": self.center.tolist()}


def gaussian_family(alpha: float, d: int = 1) -> GaussianSpec:
    """``G_alpha(xi) = (pi alpha)^(-d) exp(-|xi|^2 / alpha)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return GaussianSpec(np.eye(2 * d) / alpha, label=f"G_{alpha:g}")


def squeezed_gaussian(s: float, hbar: float = 1.0, center=None) -> GaussianSpec:
    """Wigner function of a pure squeezed vacuum, ``A = diag(s, 1/s) / hbar``."""
    return GaussianSpec(np.diag([s, 1.0 / s]) / hbar, center=center, label=f"squeezed_{s:g}")


def gaussian_eta0(spec: GaussianSpec) -> float:
    """Largest element of the NW spectrum of a Gaussian.

    Computed as the smallest symplectic eigenvalue of ``A^-1``: the moduli of
    the purely imaginary eigenvalue pairs of ``J A^-1``.
    """
    Ainv = np.linalg.inv(spec.A)
    ev = np.linalg.eigvals(symplectic_matrix(spec.dim_d) @ Ainv)
    return float(np.min(np.abs(ev.imag)))
