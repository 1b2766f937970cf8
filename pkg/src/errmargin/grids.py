"""Agreement grids between the closed forms and the numeric oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytic import dual_certificate, max_success, mixed_max_success, optimal_povm
from .oracle import minimize_dual, primal_search, verify
from .states import build_family, to_ensemble


@dataclass
class PureGridConfig:
    n_gamma: int = 21
    n_margin: int = 21
    agreement_tol: float = 1e-6


@dataclass
class MixedGridConfig:
    n_r: int = 5
    n_gamma: int = 5
    n_margin: int = 5
    r_min: float = 0.2
    tol: float = 1e-5
    seed: int = 0


@dataclass
class GridResult:
    kind: str
    points: int = 0
    max_agreement: float = 0.0
    max_residual: float = 0.0
    max_gap: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def pure_grid(cfg: PureGridConfig = PureGridConfig()) -> GridResult:
    """Oracle dual value vs closed form, plus verification of the analytic pair."""
    out = GridResult("pure")
    for gamma in np.linspace(-0.5, 1.0, cfg.n_gamma):
        family = build_family(1.0, float(gamma))
        ensemble = to_ensemble(family)
        for m in np.linspace(0.0, 1.0, cfg.n_margin):
            m = float(m)
            p, _ = max_success(1.0, float(gamma), m)
            dual = minimize_dual(ensemble, m)
            report = verify(
                ensemble, m,
                optimal_povm(float(gamma), m, family),
                dual_certificate(float(gamma), m, family),
            )
            agreement = abs(dual.d_star - p)
            residual = max(report.attainability_residuals + (report.completeness_residual,))
            out.points += 1
            out.max_agreement = max(out.max_agreement, agreement)
            out.max_residual = max(out.max_residual, residual)
            out.max_gap = max(out.max_gap, abs(report.gap))
            if agreement > cfg.agreement_tol or not report.passed:
                out.failures.append({"gamma": float(gamma), "m": m, "agreement": agreement})
    return out


def mixed_grid(cfg: MixedGridConfig = MixedGridConfig()) -> GridResult:
    """Primal search vs the mixed-state value formula, plus the duality gap."""
    out = GridResult("mixed")
    for r in np.linspace(cfg.r_min, 1.0, cfg.n_r):
        r = float(r)
        for gamma in np.linspace(-r / 2, r, cfg.n_gamma):
            gamma = float(gamma)
            ensemble = to_ensemble(build_family(r, gamma))
            for m in np.linspace(0.0, 1.0, cfg.n_margin):
                m = float(m)
                p = mixed_max_success(r, gamma, m)
                primal = primal_search(ensemble, m, seed=cfg.seed)
                dual = minimize_dual(ensemble, m)
                agreement = abs(primal.p_success - p)
                gap = dual.d_star - primal.p_success
                out.points += 1
                out.max_agreement = max(out.max_agreement, agreement)
                out.max_gap = max(out.max_gap, abs(gap))
                if agreement > cfg.tol or abs(gap) > cfg.tol:
                    out.failures.append(
                        {"r": r, "gamma": gamma, "m": m, "agreement": agreement, "gap": gap}
                    )
    return out
