"""POVMs, dual certificates and the probabilities they induce on an ensemble."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import EIG_TOL, BlochOperator, combine, min_eigenvalue, pair_trace
from .states import Ensemble

COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Povm:
    """Elements ``E0`` (inconclusive), ``E1``, ``E2``, ``E3``."""

    elements: tuple[BlochOperator, BlochOperator, BlochOperator, BlochOperator]

    def __post_init__(self):
        elements = tuple(self.elements)
        if len(elements) != 4:
            raise ValueError(f"a POVM here has four elements, got {len(elements)}")
        object.__setattr__(self, "elements", elements)

    def __getitem__(self, mu: int) -> BlochOperator:
        return self.elements[mu]

    @classmethod
    def from_conclusive(cls, e1, e2, e3) -> "Povm":
        """Fill in ``E0`` from completeness."""
        e0 = BlochOperator.identity() - combine([1, 1, 1], [e1, e2, e3])
        return cls((e0, e1, e2, e3))

    @classmethod
    def abstain(cls) -> "Povm":
        z = BlochOperator.zero()
        return cls((BlochOperator.identity(), z, z, z))

    def min_eigenvalue(self) -> float:
        return min(min_eigenvalue(e) for e in self.elements)

    def completeness_residual(self) -> float:
        total = combine([1, 1, 1, 1], self.elements)
        return max(abs(total.scale - 2.0), float(np.max(np.abs(total.vector))))

    def is_valid(self, tol: float = EIG_TOL, completeness_tol: float = COMPLETENESS_TOL) -> bool:
        return self.min_eigenvalue() >= -tol and self.completeness_residual() <= completeness_tol

    def ranks(self, tol: float = EIG_TOL) -> tuple[int, ...]:
        return tuple(e.rank(tol) for e in self.elements)


@dataclass(frozen=True, eq=False)
class DualCertificate:
    """Dual-feasible pair ``(y, Y)``; bounds the success probability by ``tr Y + y m``."""

    y: float
    Y: BlochOperator
    m: float

    @property
    def d(self) -> float:
        return self.Y.trace + self.y * self.m


def joint_probabilities(ensemble: Ensemble, povm: Povm) -> np.ndarray:
    """Matrix ``P[i, mu] = eta_i tr(E_mu rho_i)`` of shape (3, 4)."""
    return np.array(
        [
            [ensemble.priors[i] * pair_trace(e, ensemble.states[i]) for e in povm.elements]
            for i in range(3)
        ]
    )


def success_probability(ensemble: Ensemble, povm: Povm) -> float:
    p = joint_probabilities(ensemble, povm)
    return float(p[0, 1] + p[1, 2] + p[2, 3])


def error_probability(ensemble: Ensemble, povm: Povm) -> float:
    p = joint_probabilities(ensemble, povm)
    return float(p[:, 1:].sum() - (p[0, 1] + p[1, 2] + p[2, 3]))


def dual_targets(ensemble: Ensemble, y: float) -> list[BlochOperator]:
    """``G_i = eta_i rho_i - y * sum_{j != i} eta_j rho_j`` for i = 1, 2, 3."""
    w = [ensemble.weighted(i) for i in range(3)]
    return [
        w[i] - y * combine([1, 1], [w[j] for j in range(3) if j != i]) for i in range(3)
    ]


def dual_slacks(ensemble: Ensemble, cert: DualCertificate) -> tuple[float, float, float, float]:
    """Smallest eigenvalues of ``Y`` and ``Y - G_i``; all must be >= 0."""
    targets = dual_targets(ensemble, cert.y)
    return (min_eigenvalue(cert.Y),) + tuple(min_eigenvalue(cert.Y - g) for g in targets)
