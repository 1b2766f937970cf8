"""Closed-form optimum for three equiprobable symmetric qubit states.

The error margin axis splits into three domains, separated by two critical
margins ``m_lower <= m_upper``:

* linear (``m <= m_lower``): the bound is linear in m; ``y = 2`` and ``Y = 0``;
* intermediate: ``y = y_e`` in (1/2, 2) and every POVM element is rank one;
* minimum error (``m >= m_upper``): the margin is inactive, ``y = 0`` and
  ``E0 = 0``.

Pure states (``r = 1``) get the full solution: value, POVM and dual
certificate. For mixed states only the value has a closed form; ``solve``
fills the POVM and certificate in numerically and says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bloch import BlochOperator
from .measurement import (
    DualCertificate,
    Povm,
    error_probability,
    joint_probabilities,
    success_probability,
)
from .states import (
    ParameterError,
    SymmetricFamily,
    build_family,
    check_family_params,
    check_margin,
    to_ensemble,
)


class Domain(str, Enum):
    LINEAR = "linear"
    INTERMEDIATE = "intermediate"
    MINIMUM_ERROR = "minimum_error"


@dataclass(frozen=True)
class CriticalMargins:
    m_lower: float
    m_upper: float

    def classify(self, m: float) -> Domain:
        # boundaries go to the lower-m domain
        if m <= self.m_lower:
            return Domain.LINEAR
        if m <= self.m_upper:
            return Domain.INTERMEDIATE
        return Domain.MINIMUM_ERROR


@dataclass(frozen=True, eq=False)
class Solution:
    r: float
    gamma: float
    m: float
    domain: Domain
    p_success: float
    p_error: float
    p_inconclusive: float
    povm: Povm
    certificate: DualCertificate
    margins: CriticalMargins
    povm_source: str  # "analytic" or "numeric"

    @property
    def gap(self) -> float:
        return self.certificate.d - self.p_success


def _sqrt0(x: float) -> float:
    # clamps rounding noise below zero
    return math.sqrt(max(x, 0.0))


def amplitude(r: float, gamma: float) -> float:
    """The constant ``A = (1 - sqrt((r + 2 gamma)/3)) / 2``.

    Evaluated as ``(1 - u^2) / (2 (1 + u))`` to avoid cancellation near u = 1.
    """
    u = _sqrt0((r + 2.0 * gamma) / 3.0)
    return ((1.0 - r) + 2.0 * (1.0 - gamma)) / (6.0 * (1.0 + u))


def _mixed_margins(r: float, gamma: float) -> CriticalMargins:
    s, t = 1.0 - r, 1.0 - gamma
    diff = max(r - gamma, 0.0)  # t - s
    a = amplitude(r, gamma)
    upper = (2.0 - _sqrt0(2.0 * diff / 3.0)) / 3.0
    ratio = 0.0 if diff == 0.0 else 2.0 * diff / (s + 2.0 * t)
    lower = (2.0 / 3.0) * (2.0 - _sqrt0(ratio)) * a
    return CriticalMargins(lower, upper)


def _pure_margins(gamma: float) -> CriticalMargins:
    upper = (2.0 - _sqrt0(2.0 * (1.0 - gamma) / 3.0)) / 3.0
    lower = (1.0 - _sqrt0((1.0 + 2.0 * gamma) / 3.0)) / 3.0
    return CriticalMargins(lower, upper)


def critical_margins(r: float, gamma: float) -> CriticalMargins:
    check_family_params(r, gamma)
    if r == 1.0:
        return _pure_margins(gamma)
    return _mixed_margins(r, gamma)


def pure_branch(domain: Domain, gamma: float, m: float) -> float:
    """Evaluate one branch of the pure-state optimum, whatever domain m is in."""
    if domain is Domain.MINIMUM_ERROR:
        return (1.0 + _sqrt0(2.0 * (1.0 - gamma) / 3.0)) / 3.0
    if domain is Domain.INTERMEDIATE:
        a = amplitude(1.0, gamma)
        return 0.5 * (m + a + _sqrt0(3.0 * a * (2.0 * m - a)))
    return 2.0 * m


def mixed_branch(domain: Domain, r: float, gamma: float, m: float) -> float:
    """Evaluate one branch of the mixed-state optimum (valid for r = 1 too)."""
    s, t = 1.0 - r, 1.0 - gamma
    diff = max(r - gamma, 0.0)  # t - s
    if domain is Domain.MINIMUM_ERROR:
        return (1.0 + _sqrt0(2.0 * diff / 3.0)) / 3.0
    if diff == 0.0:
        # identical states: success is always half the error
        return 0.5 * m
    if domain is Domain.INTERMEDIATE:
        a = amplitude(r, gamma)
        w = s + 2.0 * t
        root = _sqrt0(3.0 * a * diff * (m * w - a * (s + t)))
        return (0.5 * m * w + a * diff + root) / w
    return (t + _sqrt0(diff * (s + 2.0 * t) / 2.0)) * m / (s + t)


def pure_max_success(gamma: float, m: float) -> float:
    check_family_params(1.0, gamma)
    check_margin(m)
    return pure_branch(_pure_margins(gamma).classify(m), gamma, m)


def mixed_max_success(r: float, gamma: float, m: float) -> float:
    check_family_params(r, gamma)
    check_margin(m)
    return mixed_branch(_mixed_margins(r, gamma).classify(m), r, gamma, m)


def max_success(r: float, gamma: float, m: float) -> tuple[float, Domain]:
    """Optimal success probability and the domain it was taken from."""
    margins = critical_margins(r, gamma)
    check_margin(m)
    domain = margins.classify(m)
    if r == 1.0:
        return pure_branch(domain, gamma, m), domain
    return mixed_branch(domain, r, gamma, m), domain


def analytic_probabilities(r: float, gamma: float, m: float) -> tuple[float, float, float, Domain]:
    """``(p_success, p_error, p_inconclusive, domain)`` from the value formulas.

    Below ``m_upper`` the margin is saturated (``p_error = m``); above it the
    inconclusive element vanishes. At ``m = m_upper`` both partitions agree,
    and the second one avoids a rounding-level negative ``p_inconclusive``.
    """
    p, domain = max_success(r, gamma, m)
    if domain is Domain.MINIMUM_ERROR or m >= critical_margins(r, gamma).m_upper:
        return p, 1.0 - p, 0.0, domain
    return p, m, 1.0 - p - m, domain


def _pure_family(gamma: float, family: SymmetricFamily | None) -> SymmetricFamily:
    if family is None:
        return build_family(1.0, gamma)
    if family.r != 1.0 or abs(family.gamma - gamma) > 1e-12:
        raise ParameterError(
            f"family (r={family.r}, gamma={family.gamma}) does not match gamma={gamma}"
        )
    family.check_consistent()
    return family


def _a_vectors(family: SymmetricFamily, y: float, w: float | None = None) -> np.ndarray:
    """Rows ``a_i = (n_i - y * sum_{j != i} n_j) / 3``.

    Split into the mean and the spread about it, so the ``1 - 2y`` part along
    the mean does not cancel when y is close to 1/2; pass ``w = 2y - 1`` if
    it is known more accurately than y.
    """
    n = family.bloch_vectors
    mean = n.mean(axis=0)
    w = 2.0 * y - 1.0 if w is None else w
    return (-w * mean + (1.0 + y) * (n - mean)) / 3.0


def _identical(gamma: float) -> bool:
    return gamma >= 1.0


def _intermediate_w(gamma: float, m: float) -> float:
    """``w = 2 y_e - 1``, kept separately since ``1 - 2 y_e`` is tiny near gamma = 1."""
    a = amplitude(1.0, gamma)
    return math.sqrt(3.0 * a / (2.0 * m - a))


def trace_along_equality_family(gamma: float, y: float) -> float:
    """``tr Y(y)`` on the family where all four dual constraints are tight.

    Valid for 1/2 < y <= 2; the smaller of the two roots is taken.
    """
    return amplitude(1.0, gamma) * (y - 2.0) * y / (1.0 - 2.0 * y)


def dual_certificate(
    gamma: float, m: float, family: SymmetricFamily | None = None
) -> DualCertificate:
    """Optimal dual pair ``(y, Y)`` for the pure symmetric family."""
    check_margin(m)
    fam = _pure_family(gamma, family)
    domain = _pure_margins(gamma).classify(m)
    if domain is Domain.MINIMUM_ERROR:
        alpha = pure_branch(domain, gamma, m)
        return DualCertificate(0.0, BlochOperator(alpha, fam.vector_sum / 9.0), m)
    if domain is Domain.LINEAR:
        return DualCertificate(2.0, BlochOperator.zero(), m)
    if _identical(gamma):
        # Y >= (1 - 2y) rho / 3 is met by Y = 0 once y = 1/2
        return DualCertificate(0.5, BlochOperator.zero(), m)
    w = _intermediate_w(gamma, m)
    y = 0.5 * (1.0 + w)
    k = (2.0 - y) * y / w
    u = math.sqrt((1.0 + 2.0 * gamma) / 3.0)
    alpha = amplitude(1.0, gamma) * k
    one_minus_inv_u = -2.0 * (1.0 - gamma) / (3.0 * u * (1.0 + u))
    beta = 0.5 * one_minus_inv_u * k * (fam.vector_sum / 3.0)
    return DualCertificate(y, BlochOperator(alpha, beta), m)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def optimal_povm(gamma: float, m: float, family: SymmetricFamily | None = None) -> Povm:
    """Optimal measurement for the pure symmetric family.

    Every conclusive element is built orthogonal to the kernel direction of
    the matching tight dual constraint, ``E_i = C_i (1 - e_i.sigma)/2``.
    """
    check_margin(m)
    fam = _pure_family(gamma, family)
    n = fam.bloch_vectors
    domain = _pure_margins(gamma).classify(m)

    if _identical(gamma):
        # any strategy has p_success = p_error / 2; spend as much as the margin allows
        q = min(1.0, 1.5 * m)
        share = BlochOperator.identity() * (q / 3.0)
        return Povm((BlochOperator.identity() * (1.0 - q), share, share, share))

    if domain is Domain.MINIMUM_ERROR:
        beta = fam.vector_sum / 9.0
        elems = [BlochOperator.projector(2.0 / 3.0, -_unit(beta - n[i] / 3.0)) for i in range(3)]
        return Povm((BlochOperator.zero(), *elems))

    if domain is Domain.LINEAR:
        c = 3.0 * m / (1.0 - gamma)
        a = _a_vectors(fam, 2.0)  # unit length for pure states
        return Povm.from_conclusive(*(BlochOperator(c, c * a[i]) for i in range(3)))

    cert = dual_certificate(gamma, m, fam)
    beta = cert.Y.vector
    a = _a_vectors(fam, cert.y, _intermediate_w(gamma, m))
    amp = amplitude(1.0, gamma)
    u = math.sqrt((1.0 + 2.0 * gamma) / 3.0)
    # A / (1 - gamma) = 1 / (3 (1 + u))
    c = (2.0 + 3.0 * (m - amp) + _sqrt0(3.0 * amp * (2.0 * m - amp))) / (3.0 * (1.0 + u))
    c0 = 2.0 - 3.0 * c
    e0 = BlochOperator.projector(c0, -_unit(beta))
    elems = [BlochOperator.projector(c, -_unit(beta - a[i])) for i in range(3)]
    return Povm((e0, *elems))


def solve(r: float, gamma: float, m: float, *, seed: int = 0) -> Solution:
    """Full solution for the symmetric family ``(r, gamma)`` at margin ``m``.

    For ``r < 1`` the POVM and certificate come from the numeric oracle.
    """
    margins = critical_margins(r, gamma)
    check_margin(m)
    family = build_family(r, gamma)
    ensemble = to_ensemble(family)
    if r == 1.0:
        povm = optimal_povm(gamma, m, family)
        cert = dual_certificate(gamma, m, family)
        joint = joint_probabilities(ensemble, povm)
        p_s = success_probability(ensemble, povm)
        p_e = error_probability(ensemble, povm)
        p_i = float(joint[:, 0].sum())
        domain = margins.classify(m)
        source = "analytic"
    else:
        from .oracle import minimize_dual, primal_search

        p_s, p_e, p_i, domain = analytic_probabilities(r, gamma, m)
        povm = primal_search(ensemble, m, seed=seed).povm
        cert = minimize_dual(ensemble, m).certificate(m)
        source = "numeric"
    return Solution(r, gamma, m, domain, p_s, p_e, p_i, povm, cert, margins, source)
