"""Numeric primal/dual solver for three-state discrimination with an error margin.

Nothing here uses the closed-form results; it only needs an ``Ensemble``.

Dual side. For a fixed multiplier ``y`` every dual constraint ``Y >= G_i``
with ``Y = (alpha + beta.sigma)/2`` and ``G_i = (g_i + v_i.sigma)/2`` reads
``alpha >= g_i + |beta - v_i|``, and ``Y >= 0`` reads ``alpha >= |beta|``.
The best ``alpha`` is therefore the minimum over 3-space of a maximum of
four shifted cones, an additively weighted enclosing-ball problem. Its
minimizer is where some subset of the cones tie with the origin inside the
convex hull of their gradients, and such a point lies in the affine hull of
the subset's apexes. ``_inner_exact`` enumerates every subset, solves the
tie equations (linear after differencing, then one quadratic) and keeps the
best candidate. Spurious roots only produce worse candidates, so the result
is the global minimum. A slower multi-start Nelder-Mead route is kept as an
independent check. The outer problem ``min_y alpha*(y) + y m`` is convex in
``y`` and is handled by a grid pass followed by golden-section refinement.

Primal side. Conclusive elements ``E_i = (c_i + w_i.sigma)/2`` make the
problem a small second-order cone program in 12 variables, solved by SLSQP
from many random starts and repaired to exact feasibility afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .bloch import BlochOperator, product_residual_norm
from .measurement import (
    DualCertificate,
    Povm,
    dual_slacks,
    dual_targets,
    error_probability,
    success_probability,
)
from .states import Ensemble, check_margin

ANALYTIC_TOL = 1e-8
ANALYTIC_GAP_TOL = 1e-7
NUMERIC_TOL = 1e-5

_SUBSETS = {size: np.array(list(combinations(range(4), size))) for size in (2, 3, 4)}
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class DualSearchResult:
    y_star: float
    alpha_star: float
    beta_star: np.ndarray
    d_star: float
    inner_iterations: int

    def certificate(self, m: float) -> DualCertificate:
        return DualCertificate(self.y_star, BlochOperator(self.alpha_star, self.beta_star), m)


@dataclass(frozen=True, eq=False)
class PrimalSearchResult:
    povm: Povm
    p_success: float
    p_error: float
    restarts_used: int


@dataclass(frozen=True)
class VerificationReport:
    povm_min_eig: float
    completeness_residual: float
    margin_slack: float
    dual_slacks: tuple[float, float, float, float]
    attainability_residuals: tuple[float, float, float, float, float]
    p_success: float
    d: float
    gap: float
    passed: bool


# ---------------------------------------------------------------------------
# dual


def _cone_data(ensemble: Ensemble, ys) -> tuple[np.ndarray, np.ndarray]:
    """Apex offsets ``c`` (N, 4) and apexes ``v`` (N, 4, 3); index 0 is ``Y >= 0``."""
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    w_scale = np.array([ensemble.priors[i] * ensemble.states[i].scale for i in range(3)])
    w_vec = np.array([ensemble.priors[i] * ensemble.states[i].vector for i in range(3)])
    others_scale = w_scale.sum() - w_scale
    others_vec = w_vec.sum(axis=0) - w_vec
    c = np.zeros((ys.size, 4))
    v = np.zeros((ys.size, 4, 3))
    c[:, 1:] = w_scale[None, :] - ys[:, None] * others_scale[None, :]
    v[:, 1:, :] = w_vec[None, :, :] - ys[:, None, None] * others_vec[None, :, :]
    return c, v


def _cone_max(beta: np.ndarray, c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``max_k c_k + |beta - v_k|`` for candidates ``beta`` of shape (N, M, 3)."""
    dist = np.linalg.norm(beta[:, :, None, :] - v[:, None, :, :], axis=-1)
    return np.max(c[:, None, :] + dist, axis=-1)


def _affine_basis(diffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis (N, 3, k) of the span of ``diffs`` (N, k, 3) and a validity mask."""
    n, k, _ = diffs.shape
    scale = np.maximum(np.max(np.linalg.norm(diffs, axis=-1), axis=-1), 1e-300)
    if k == 3:
        det = np.linalg.det(diffs)
        basis = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
        return basis, np.abs(det) > 1e-10 * scale**3
    q = np.zeros((n, 3, k))
    ok = np.ones(n, dtype=bool)
    for j in range(k):
        u = diffs[:, j, :].copy()
        for i in range(j):
            u -= np.sum(u * q[:, :, i], axis=-1, keepdims=True) * q[:, :, i]
        nrm = np.linalg.norm(u, axis=-1)
        ok &= nrm > 1e-10 * scale
        q[:, :, j] = u / np.where(nrm > 0, nrm, 1.0)[:, None]
    return q, ok


def _subset_candidates(c: np.ndarray, v: np.ndarray, subset) -> np.ndarray:
    """Points where the cones in ``subset`` tie, restricted to their affine hull.

    Returns (N, 2, 3); invalid entries are NaN.
    """
    first, rest = subset[0], list(subset[1:])
    v0, c0 = v[:, first, :], c[:, first]
    vk, ck = v[:, rest, :], c[:, rest]
    diffs = vk - v0[:, None, :]
    basis, ok = _affine_basis(diffs)
    # |beta - v_k|^2 = (alpha - c_k)^2 differenced against the first cone
    mat = 2.0 * np.einsum("nkd,ndj->nkj", diffs, basis)
    rhs = (
        np.sum(vk**2, axis=-1) - np.sum(v0**2, axis=-1)[:, None]
        - ck**2 + (c0**2)[:, None]
        - 2.0 * np.einsum("nkd,nd->nk", diffs, v0)
    )
    slope = 2.0 * (ck - c0[:, None])
    mat = np.where(ok[:, None, None], mat, np.eye(mat.shape[-1]))
    sol = np.linalg.solve(mat, np.stack([rhs, slope], axis=-1))
    p, q = sol[..., 0], sol[..., 1]
    # |p + q alpha|^2 = (alpha - c0)^2
    qa = np.sum(q * q, axis=-1) - 1.0
    qb = 2.0 * (np.sum(p * q, axis=-1) + c0)
    qc = np.sum(p * p, axis=-1) - c0**2
    disc = qb * qb - 4.0 * qa * qc
    disc_scale = qb * qb + 4.0 * np.abs(qa * qc) + 1e-300
    ok &= disc >= -1e-12 * disc_scale
    sq = np.sqrt(np.maximum(disc, 0.0))
    # numerically stable pair of roots
    big = -0.5 * (qb + np.where(qb >= 0, sq, -sq))
    linear = np.abs(qa) < 1e-13
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(linear, -qc / qb, big / qa)
        r2 = np.where(linear, -qc / qb, qc / big)
    roots = np.stack([r1, r2], axis=1)  # (N, 2)
    w = p[:, None, :] + q[:, None, :] * roots[..., None]
    beta = v0[:, None, :] + np.einsum("ndk,nrk->nrd", basis, w)
    bad = ~ok[:, None] | ~np.all(np.isfinite(beta), axis=-1)
    beta[bad] = np.nan
    return beta


def _inner_exact(c: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = c.shape[0]
    cands = [v]
    for subsets in _SUBSETS.values():
        # all subsets of one size in a single batch: rows are (problem, subset)
        cs = c[:, subsets].reshape(n * len(subsets), -1)
        vs = v[:, subsets, :].reshape(n * len(subsets), -1, 3)
        beta = _subset_candidates(cs, vs, range(subsets.shape[1]))
        cands.append(beta.reshape(n, -1, 3))
    cands = np.concatenate(cands, axis=1)
    vals = _cone_max(np.nan_to_num(cands, nan=0.0), c, v)
    vals[np.isnan(cands).any(axis=-1)] = np.inf
    best = np.argmin(vals, axis=1)
    idx = np.arange(n)
    return vals[idx, best], cands[idx, best]


def _inner_descent(c: np.ndarray, v: np.ndarray, rng: np.random.Generator):
    """Multi-start Nelder-Mead with simplex restarts on one cone-max problem."""

    def f(beta):
        return float(np.max(c + np.linalg.norm(beta[None, :] - v, axis=-1)))

    starts = [np.zeros(3), *v[1:], v[1:].mean(axis=0)]
    spread = max(1.0, float(np.max(np.abs(v))))
    starts += [starts[k] + 0.1 * spread * rng.standard_normal(3) for k in range(4)]
    best_x, best_f = starts[0], f(starts[0])
    for x in starts:
        fx = f(x)
        for rep in range(30):
            step = max(1e-3 * spread * 0.3**rep, 1e-10)
            simplex = x + np.vstack([np.zeros(3), step * np.eye(3)])
            res = minimize(
                f, x, method="Nelder-Mead",
                options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000,
                         "initial_simplex": simplex},
            )
            if res.fun < fx - 1e-16:
                x, fx = res.x, float(res.fun)
            else:
                break
        if fx < best_f:
            best_x, best_f = x, fx
    return best_f, best_x


def dual_inner(
    ensemble: Ensemble, y: float, method: str = "exact", seed: int = 0
) -> tuple[float, np.ndarray]:
    """Smallest ``alpha`` (and its ``beta``) with ``(y, (alpha, beta))`` dual feasible."""
    if y < 0:
        raise ValueError(f"dual multiplier y={y} must be nonnegative")
    c, v = _cone_data(ensemble, [y])
    if method == "exact":
        alpha, beta = _inner_exact(c, v)
        return float(alpha[0]), beta[0]
    if method == "descent":
        return _inner_descent(c[0], v[0], np.random.default_rng(seed))
    raise ValueError(f"unknown method {method!r}")


def dual_inner_batch(ensemble: Ensemble, ys) -> tuple[np.ndarray, np.ndarray]:
    c, v = _cone_data(ensemble, ys)
    return _inner_exact(c, v)


def minimize_dual(
    ensemble: Ensemble,
    m: float,
    *,
    y_max: float = 10.0,
    grid_step: float = 1e-2,
    tol: float = 1e-10,
) -> DualSearchResult:
    """Minimize ``d(y) = alpha*(y) + y m`` over ``0 <= y <= y_max``."""
    check_margin(m)
    ys = np.linspace(0.0, y_max, int(round(y_max / grid_step)) + 1)
    alphas, betas = dual_inner_batch(ensemble, ys)
    ds = alphas + ys * m
    calls = ys.size
    k = int(np.argmin(ds))
    best = (float(ds[k]), float(ys[k]), float(alphas[k]), betas[k])

    def phi(y):
        a, b = dual_inner_batch(ensemble, [y])
        return float(a[0] + y * m), float(a[0]), b[0]

    lo, hi = ys[max(k - 1, 0)], ys[min(k + 1, ys.size - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = phi(x1), phi(x2)
    calls += 2
    while hi - lo > tol:
        if f1[0] <= f2[0]:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = phi(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = phi(x2)
        calls += 1
    for y, f in ((x1, f1), (x2, f2)):
        if f[0] < best[0]:
            best = (f[0], float(y), f[1], f[2])
    d, y, alpha, beta = best
    return DualSearchResult(y, alpha, np.array(beta), d, calls)


# ---------------------------------------------------------------------------
# primal


def _linear_forms(ensemble: Ensemble) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of p_success and p_error in x = (c_1..c_3, w_1, w_2, w_3)."""
    eta = np.array(ensemble.priors)
    sc = np.array([s.scale for s in ensemble.states])
    vec = np.array([s.vector for s in ensemble.states])
    g_s = np.zeros(12)
    g_e = np.zeros(12)
    for i in range(3):
        g_s[i] = 0.5 * eta[i] * sc[i]
        g_s[3 + 3 * i: 6 + 3 * i] = 0.5 * eta[i] * vec[i]
        others = [j for j in range(3) if j != i]
        g_e[i] = 0.5 * sum(eta[j] * sc[j] for j in others)
        g_e[3 + 3 * i: 6 + 3 * i] = 0.5 * sum(eta[j] * vec[j] for j in others)
    return g_s, g_e


def _split(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return x[:3], x[3:].reshape(3, 3)


def _repair(x: np.ndarray, g_e: np.ndarray, m: float) -> np.ndarray:
    """Scale onto the feasible set: cones, E0 >= 0 and p_error <= m."""
    c, w = _split(x.copy())
    c = np.maximum(c, 0.0)
    nrm = np.linalg.norm(w, axis=1)
    over = nrm > c
    w[over] *= (c[over] / nrm[over])[:, None]
    x = np.concatenate([c, w.ravel()])
    lam_max = 0.5 * (c.sum() + np.linalg.norm(w.sum(axis=0)))
    if lam_max > 1.0:
        x = x / lam_max
    pe = float(g_e @ x)
    if pe > m:
        x = x * (m / pe)
    return x


def _povm_from_x(x: np.ndarray) -> Povm:
    c, w = _split(x)
    return Povm.from_conclusive(*(BlochOperator(c[i], w[i]) for i in range(3)))


def primal_search(
    ensemble: Ensemble, m: float, *, restarts: int = 16, seed: int = 0
) -> PrimalSearchResult:
    """Best feasible POVM found by multi-start SLSQP on the cone program."""
    check_margin(m)
    g_s, g_e = _linear_forms(ensemble)
    rng = np.random.default_rng(seed)

    def cons(x):
        c, w = _split(x)
        s_c, s_w = c.sum(), w.sum(axis=0)
        return np.concatenate([
            c**2 - np.sum(w**2, axis=1),
            [(2.0 - s_c) ** 2 - s_w @ s_w, 2.0 - s_c, m - g_e @ x],
        ])

    def cons_jac(x):
        c, w = _split(x)
        s_c, s_w = c.sum(), w.sum(axis=0)
        jac = np.zeros((6, 12))
        for i in range(3):
            jac[i, i] = 2.0 * c[i]
            jac[i, 3 + 3 * i: 6 + 3 * i] = -2.0 * w[i]
        jac[3, :3] = -2.0 * (2.0 - s_c)
        jac[3, 3:] = np.tile(-2.0 * s_w, 3)
        jac[4, :3] = -1.0
        jac[5] = -g_e
        return jac

    best_x = np.zeros(12)
    best_p = 0.0
    used = 0
    for _ in range(restarts):
        c0 = rng.uniform(0.0, 2.0 / 3.0, size=3)
        u = rng.standard_normal((3, 3))
        u *= (rng.uniform(0.0, 1.0, size=3) ** (1 / 3) / np.linalg.norm(u, axis=1))[:, None]
        x0 = _repair(np.concatenate([c0, (c0[:, None] * u).ravel()]), g_e, m)
        res = minimize(
            lambda x: -(g_s @ x), x0, jac=lambda x: -g_s, method="SLSQP",
            bounds=[(0.0, 2.0)] * 3 + [(-2.0, 2.0)] * 9,
            constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
            options={"ftol": 1e-15, "maxiter": 1000},
        )
        used += 1
        x = _repair(res.x, g_e, m)
        p = float(g_s @ x)
        if p > best_p:
            best_x, best_p = x, p
    povm = _povm_from_x(best_x)
    return PrimalSearchResult(
        povm, success_probability(ensemble, povm), error_probability(ensemble, povm), used
    )


# ---------------------------------------------------------------------------
# verification


def verify(
    ensemble: Ensemble,
    m: float,
    povm: Povm,
    cert: DualCertificate,
    *,
    numeric: bool = False,
) -> VerificationReport:
    """Check primal and dual feasibility, complementary slackness and the gap.

    Analytic pairs are held to 1e-8 on residuals and 1e-7 on the gap;
    ``numeric=True`` relaxes both to 1e-5.
    """
    tol = NUMERIC_TOL if numeric else ANALYTIC_TOL
    gap_tol = NUMERIC_TOL if numeric else ANALYTIC_GAP_TOL
    p_s = success_probability(ensemble, povm)
    p_e = error_probability(ensemble, povm)
    slacks = dual_slacks(ensemble, cert)
    targets = dual_targets(ensemble, cert.y)
    attain = tuple(
        product_residual_norm(povm[i + 1], cert.Y - targets[i]) for i in range(3)
    ) + (product_residual_norm(povm[0], cert.Y), abs(cert.y * (m - p_e)))
    gap = cert.d - p_s
    report = dict(
        povm_min_eig=povm.min_eigenvalue(),
        completeness_residual=povm.completeness_residual(),
        margin_slack=m - p_e,
        dual_slacks=tuple(float(s) for s in slacks),
        attainability_residuals=tuple(float(a) for a in attain),
        p_success=p_s,
        d=cert.d,
        gap=gap,
    )
    passed = (
        report["povm_min_eig"] >= -tol
        and report["completeness_residual"] <= tol
        and report["margin_slack"] >= -tol
        and cert.y >= -tol
        and min(slacks) >= -tol
        and max(attain) <= tol
        and abs(gap) <= gap_tol
    )
    return VerificationReport(passed=bool(passed), **report)
