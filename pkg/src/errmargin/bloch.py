"""2x2 Hermitian operators in Bloch form.

An operator is stored as ``(scale, vector)`` and stands for
``(scale * 1 + vector . sigma) / 2``. Traces, overlaps and eigenvalues are
computed directly from the Bloch coordinates; complex matrices are only
materialized for operator products, which are not Hermitian in general.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)

# absolute tolerance on eigenvalues when testing positivity / rank
EIG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BlochOperator:
    scale: float
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float).reshape(3).copy()
        vec.setflags(write=False)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "vector", vec)

    @classmethod
    def zero(cls) -> "BlochOperator":
        return cls(0.0, np.zeros(3))

    @classmethod
    def identity(cls) -> "BlochOperator":
        return cls(2.0, np.zeros(3))

    @classmethod
    def state(cls, bloch_vector) -> "BlochOperator":
        """Density operator ``(1 + n.sigma)/2``."""
        return cls(1.0, bloch_vector)

    @classmethod
    def projector(cls, weight: float, direction) -> "BlochOperator":
        """``weight * (1 + u.sigma)/2`` for a unit vector ``u``."""
        u = np.asarray(direction, dtype=float)
        return cls(weight, weight * u)

    @classmethod
    def from_matrix(cls, mat) -> "BlochOperator":
        mat = np.asarray(mat, dtype=complex)
        scale = np.trace(mat).real
        vec = np.array([np.trace(mat @ p).real for p in PAULI])
        return cls(scale, vec)

    @property
    def trace(self) -> float:
        return self.scale

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def eigenvalues(self) -> tuple[float, float]:
        r = self.norm
        return (0.5 * (self.scale - r), 0.5 * (self.scale + r))

    def rank(self, tol: float = EIG_TOL) -> int:
        return sum(1 for lam in self.eigenvalues() if lam > tol)

    def to_matrix(self) -> np.ndarray:
        return 0.5 * (self.scale * IDENTITY2 + np.tensordot(self.vector, PAULI, axes=1))

    def __add__(self, other: "BlochOperator") -> "BlochOperator":
        return BlochOperator(self.scale + other.scale, self.vector + other.vector)

    def __sub__(self, other: "BlochOperator") -> "BlochOperator":
        return BlochOperator(self.scale - other.scale, self.vector - other.vector)

    def __mul__(self, k: float) -> "BlochOperator":
        return BlochOperator(k * self.scale, k * self.vector)

    __rmul__ = __mul__

    def __neg__(self) -> "BlochOperator":
        return BlochOperator(-self.scale, -self.vector)

    def __repr__(self) -> str:
        v = ", ".join(f"{x:.6g}" for x in self.vector)
        return f"BlochOperator(scale={self.scale:.6g}, vector=({v}))"


def pair_trace(a: BlochOperator, b: BlochOperator) -> float:
    """tr(AB) for two Bloch-form operators."""
    return 0.5 * (a.scale * b.scale + float(a.vector @ b.vector))


def min_eigenvalue(a: BlochOperator) -> float:
    return 0.5 * (a.scale - a.norm)


def combine(coeffs: Sequence[float], ops: Sequence[BlochOperator]) -> BlochOperator:
    """Linear combination ``sum_k coeffs[k] * ops[k]``."""
    coeffs = list(coeffs)
    ops = list(ops)
    if len(coeffs) != len(ops):
        raise ValueError(f"got {len(coeffs)} coefficients for {len(ops)} operators")
    scale = 0.0
    vec = np.zeros(3)
    for c, op in zip(coeffs, ops):
        scale += c * op.scale
        vec = vec + c * op.vector
    return BlochOperator(scale, vec)


def product_residual_norm(a: BlochOperator, b: BlochOperator) -> float:
    """Frobenius norm of the matrix product AB."""
    return float(np.linalg.norm(a.to_matrix() @ b.to_matrix()))


def is_positive(a: BlochOperator, tol: float = EIG_TOL) -> bool:
    return min_eigenvalue(a) >= -tol
