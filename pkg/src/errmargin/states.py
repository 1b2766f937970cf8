"""Symmetric families of three qubit states and general three-state ensembles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bloch import BlochOperator

GRAM_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when a parameter lies outside its admissible range."""


def check_family_params(r: float, gamma: float) -> None:
    if not (np.isfinite(r) and np.isfinite(gamma)):
        raise ParameterError(f"non-finite parameters r={r}, gamma={gamma}")
    if not 0.0 <= r <= 1.0:
        raise ParameterError(f"purity r={r} outside [0, 1]")
    if not -r / 2 - GRAM_TOL <= gamma <= r + GRAM_TOL:
        raise ParameterError(f"overlap gamma={gamma} outside [-r/2, r] = [{-r / 2}, {r}]")


def check_margin(m: float) -> None:
    if not (np.isfinite(m) and 0.0 <= m <= 1.0):
        raise ParameterError(f"error margin m={m} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class SymmetricFamily:
    """Three Bloch vectors with ``n_i.n_i = r`` and ``n_i.n_j = gamma``."""

    r: float
    gamma: float
    bloch_vectors: np.ndarray  # shape (3, 3), one vector per row

    def __post_init__(self):
        vecs = np.array(self.bloch_vectors, dtype=float).reshape(3, 3)
        vecs.setflags(write=False)
        object.__setattr__(self, "bloch_vectors", vecs)

    @property
    def gram(self) -> np.ndarray:
        return self.bloch_vectors @ self.bloch_vectors.T

    @property
    def vector_sum(self) -> np.ndarray:
        return self.bloch_vectors.sum(axis=0)

    def rotated(self, rotation) -> "SymmetricFamily":
        rot = np.asarray(rotation, dtype=float)
        return SymmetricFamily(self.r, self.gamma, self.bloch_vectors @ rot.T)

    def check_consistent(self, tol: float = 1e-9) -> None:
        g = self.gram
        target = np.full((3, 3), self.gamma)
        np.fill_diagonal(target, self.r)
        if np.max(np.abs(g - target)) > tol:
            raise ParameterError(
                f"Bloch vectors do not realize r={self.r}, gamma={self.gamma}"
            )


@dataclass(frozen=True, eq=False)
class Ensemble:
    states: tuple[BlochOperator, BlochOperator, BlochOperator]
    priors: tuple[float, float, float]

    def __post_init__(self):
        states = tuple(self.states)
        priors = tuple(float(p) for p in self.priors)
        if len(states) != 3 or len(priors) != 3:
            raise ParameterError("an ensemble holds exactly three states and priors")
        for k, rho in enumerate(states):
            if abs(rho.scale - 1.0) > GRAM_TOL or rho.norm > 1.0 + GRAM_TOL:
                raise ParameterError(f"state {k + 1} is not a density operator: {rho!r}")
        if min(priors) < 0 or abs(sum(priors) - 1.0) > GRAM_TOL:
            raise ParameterError(f"priors {priors} are not a probability vector")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def from_bloch_vectors(cls, vectors, priors: Sequence[float] = (1 / 3, 1 / 3, 1 / 3)):
        return cls(tuple(BlochOperator.state(v) for v in np.asarray(vectors, float)), priors)

    def weighted(self, i: int) -> BlochOperator:
        """``eta_i * rho_i``"""
        return self.priors[i] * self.states[i]


def build_family(r: float, gamma: float) -> SymmetricFamily:
    """Canonical embedding: a cone of half-angle theta about the z axis.

    The three vectors have length sqrt(r), azimuths 0, 120 and 240 degrees,
    and cos^2(theta) = (r + 2 gamma) / (3 r).
    """
    check_family_params(r, gamma)
    if r == 0.0:
        return SymmetricFamily(0.0, 0.0, np.zeros((3, 3)))
    gamma = min(max(gamma, -r / 2), r)
    cos2 = min(max((r + 2 * gamma) / (3 * r), 0.0), 1.0)
    sin2 = min(max(2 * (r - gamma) / (3 * r), 0.0), 1.0)  # not 1 - cos2: cancels near gamma = r
    cos_t, sin_t = np.sqrt(cos2), np.sqrt(sin2)
    length = np.sqrt(r)
    phi = 2 * np.pi * np.arange(3) / 3
    vecs = length * np.column_stack(
        [sin_t * np.cos(phi), sin_t * np.sin(phi), np.full(3, cos_t)]
    )
    return SymmetricFamily(r, gamma, vecs)


def axis_family() -> SymmetricFamily:
    """The gamma = 0 family along the coordinate axes."""
    return SymmetricFamily(1.0, 0.0, np.eye(3))


def to_ensemble(family: SymmetricFamily) -> Ensemble:
    return Ensemble.from_bloch_vectors(family.bloch_vectors)
