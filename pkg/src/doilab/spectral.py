"""Diagonalizable operators A = U^{-1} diag(lambda) U, their functional
calculus, spectral projections, and the two constants attached to them:
the spectral constant (sup of projection norms) and the diagonalizability
constant (inf of ||U|| ||U^{-1}|| over diagonal rescalings of U).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .norms import (
    EXACT,
    INF,
    LOWER_BOUND,
    UPPER_BOUND,
    SearchConfig,
    check_exponent,
    opnorm,
    opnorm_upper,
)

_INV_TOL = 1e-9


@dataclass
class DiagonalizableOperator:
    """The triple (lambda, U, U^{-1}); the operator itself is assemble()."""

    lambdas: np.ndarray
    u: np.ndarray
    u_inv: np.ndarray

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=complex).ravel()
        self.u = np.asarray(self.u, dtype=complex)
        self.u_inv = np.asarray(self.u_inv, dtype=complex)
        n = self.lambdas.size
        if self.u.shape != (n, n) or self.u_inv.shape != (n, n):
            raise ValueError("U and U^{-1} must be n x n with n = len(lambda)")
        eye = np.eye(n)
        if (
            np.abs(self.u @ self.u_inv - eye).max() > _INV_TOL
            or np.abs(self.u_inv @ self.u - eye).max() > _INV_TOL
        ):
            raise ValueError("u_inv is not the inverse of u to within 1e-9")

    @property
    def n(self) -> int:
        return self.lambdas.size

    @classmethod
    def from_u(cls, lambdas, u) -> "DiagonalizableOperator":
        u = np.asarray(u, dtype=complex)
        return cls(lambdas, u, np.linalg.inv(u))

    @classmethod
    def diagonal(cls, lambdas) -> "DiagonalizableOperator":
        n = np.asarray(lambdas).size
        eye = np.eye(n, dtype=complex)
        return cls(lambdas, eye, eye)


@dataclass
class ConstantEstimate:
    value: float
    certainty: str
    argument: str


def assemble(op: DiagonalizableOperator) -> np.ndarray:
    return op.u_inv @ np.diag(op.lambdas) @ op.u


def functional_calculus(op: DiagonalizableOperator, f) -> np.ndarray:
    """f(A) = U^{-1} diag(f(lambda_1), ..., f(lambda_n)) U."""
    vals = []
    for lam in op.lambdas:
        try:
            v = f(lam)
        except Exception as exc:
            raise ValueError(f"f undefined at eigenvalue {lam}") from exc
        v = complex(v)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"f non-finite at eigenvalue {lam}")
        vals.append(v)
    return op.u_inv @ np.diag(np.asarray(vals, dtype=complex)) @ op.u


def _check_sigma(op: DiagonalizableOperator, sigma) -> frozenset:
    sigma = frozenset(int(i) for i in sigma)
    for i in sigma:
        if not 0 <= i < op.n:
            raise ValueError(f"eigenvalue index {i} out of range")
    for i in sigma:
        for j in range(op.n):
            if op.lambdas[j] == op.lambdas[i] and j not in sigma:
                raise ValueError(
                    "sigma splits a repeated eigenvalue; spectral projections "
                    "are defined on subsets of the spectrum"
                )
    return sigma


def spectral_projection(op: DiagonalizableOperator, sigma) -> np.ndarray:
    """E(sigma) = sum_{j in sigma} U^{-1} P_j U for an index set closed
    under eigenvalue equality."""
    sigma = _check_sigma(op, sigma)
    d = np.zeros(op.n, dtype=complex)
    for i in sigma:
        d[i] = 1.0
    return op.u_inv @ (d[:, None] * op.u)


def _distinct_eigenvalue_groups(op: DiagonalizableOperator):
    groups: dict[complex, list[int]] = {}
    for i, lam in enumerate(op.lambdas):
        groups.setdefault(complex(lam), []).append(i)
    return list(groups.values())


def spectral_constant(op: DiagonalizableOperator, p, cfg: SearchConfig | None = None) -> ConstantEstimate:
    """max over spectrum subsets sigma of ||E(sigma)||_{p->p}; exhaustive
    up to cfg.exhaustive_cap distinct eigenvalues, sampled beyond."""
    p = check_exponent(p)
    cfg = cfg or SearchConfig()
    groups = _distinct_eigenvalue_groups(op)
    m = len(groups)
    exhaustive = m <= cfg.exhaustive_cap
    best = 1.0  # sigma = full spectrum gives the identity
    best_arg = "full spectrum"
    all_exact = True

    def try_subset(mask_groups):
        nonlocal best, best_arg, all_exact
        idx = [i for g in mask_groups for i in g]
        if not idx or len(idx) == op.n:
            return
        est = opnorm(spectral_projection(op, idx), p, p, cfg)
        if est.certainty != EXACT:
            all_exact = False
        if est.value > best:
            best = est.value
            best_arg = f"indices {sorted(idx)}"

    if exhaustive:
        for r in range(1, m):
            for combo in itertools.combinations(groups, r):
                try_subset(combo)
        certainty = EXACT if all_exact else LOWER_BOUND
    else:
        rng = cfg.rng(0x0537, op.n)
        for _ in range(2**cfg.exhaustive_cap // 4):
            mask = rng.random(m) < 0.5
            try_subset([g for g, keep in zip(groups, mask) if keep])
        certainty = LOWER_BOUND
    return ConstantEstimate(best, certainty, best_arg)


def _upper_fast(S: np.ndarray, p: float) -> float:
    """Like opnorm_upper but with the Schur-test bound sqrt(||.||_1 ||.||_inf)
    in place of the largest singular value; crude but cheap and still an
    upper bound, used only to steer the descent."""
    a = np.abs(S)
    n1 = float(a.sum(axis=0).max())
    ninf = float(a.sum(axis=1).max())
    if p == 1.0:
        return n1
    if p == INF:
        return ninf
    n2 = math.sqrt(n1 * ninf)
    if p == 2.0:
        return n2
    if p < 2.0:
        theta = 2.0 / p - 1.0
        return n1**theta * n2 ** (1.0 - theta)
    theta = 2.0 / p
    return n2**theta * ninf ** (1.0 - theta)


def _diag_scaling_objective(
    op: DiagonalizableOperator, logd: np.ndarray, p: float, fast: bool = False
) -> float:
    d = np.exp(logd)
    bound = _upper_fast if fast else opnorm_upper
    return bound(d[:, None] * op.u, p) * bound(op.u_inv / d[None, :], p)


def diagonalizability_constant(
    op: DiagonalizableOperator,
    p,
    cfg: SearchConfig | None = None,
    restarts: int = 2,
    max_sweeps: int = 12,
) -> ConstantEstimate:
    """Coordinate descent over positive diagonal rescalings D of U,
    minimizing ||DU|| ||U^{-1}D^{-1}||. Norms at general p are certified
    upper bounds (interpolation), so the result is an upper bound on the
    true diagonalizability constant.
    """
    p = check_exponent(p)
    cfg = cfg or SearchConfig()
    n = op.n
    rng = cfg.rng(0xD1A6, n)

    starts = [np.zeros(n)]
    # row equilibration of U is usually close to optimal
    rn = np.abs(op.u).max(axis=1)
    if np.all(rn > 0):
        starts.append(-np.log(rn))
    while len(starts) < max(restarts, 1):
        starts.append(rng.standard_normal(n) * 0.5)

    # Descend on the cheap surrogate objective, then score every candidate
    # point with the exact interpolation bound and keep the smallest; each
    # evaluation is a certified upper bound, so the minimum is too.
    candidates = [logd0.copy() for logd0 in starts]
    for logd in list(candidates):
        val = _diag_scaling_objective(op, logd, p, fast=True)
        h = 0.5
        for _ in range(max_sweeps):
            improved = False
            for i in range(n):
                for step in (h, -h):
                    logd[i] += step
                    cand = _diag_scaling_objective(op, logd, p, fast=True)
                    if cand < val - 1e-12:
                        val = cand
                        improved = True
                    else:
                        logd[i] -= step
            if not improved:
                if h < 2e-3:
                    break
                h *= 0.5
    candidates.extend(logd0.copy() for logd0 in starts)
    best_val = math.inf
    best_logd = np.zeros(n)
    for logd in candidates:
        val = _diag_scaling_objective(op, logd, p)
        if val < best_val:
            best_val = val
            best_logd = logd
    best_val = max(best_val, 1.0)  # K_A >= 1 always; clip numerical dust
    return ConstantEstimate(
        float(best_val), UPPER_BOUND, f"diagonal scaling exp({np.round(best_logd, 6).tolist()})"
    )
