"""The p-summing norm of l_{p*} -> l_p operators, which coincides with
the entrywise l_p norm of the matrix, its multiplier theory (multiplier
norm = max modulus), and the exactly verifiable Lipschitz commutator
bound pi_p(f(B)S - Sf(A)) <= K_A K_B Lip(f) pi_p(BS - SA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import INF, SearchConfig, check_exponent, conjugate_exponent, opnorm, vector_norm
from .spectral import DiagonalizableOperator, assemble, diagonalizability_constant, functional_calculus


@dataclass
class PSummingContext:
    p: float
    pstar: float = 0.0

    def __post_init__(self):
        self.p = check_exponent(self.p)
        if not 1.0 < self.p < INF:
            raise ValueError("p-summing context requires 1 < p < inf")
        self.pstar = conjugate_exponent(self.p)


def pi_p_norm(S, ctx: PSummingContext) -> float:
    """(sum_{j,k} |s_jk|^p)^(1/p)."""
    S = np.asarray(S)
    return vector_norm(S.ravel(), ctx.p)


def psumming_definition_ratio(S, ctx: PSummingContext, collection, cfg: SearchConfig | None = None) -> dict:
    """The two sides of the summing inequality for a finite collection of
    vectors: lhs = (sum_j ||S x_j||_p^p)^(1/p), weak_norm = the p -> p
    norm of the matrix with rows x_j."""
    S = np.asarray(S, dtype=complex)
    if not collection:
        raise ValueError("empty collection")
    lhs = vector_norm([vector_norm(S @ np.asarray(x), ctx.p) for x in collection], ctx.p)
    rows = np.asarray([np.asarray(x, dtype=complex) for x in collection])
    weak = opnorm(rows, ctx.p, ctx.p, cfg).value
    return {
        "lhs": lhs,
        "weak_norm": weak,
        "ratio": lhs / weak if weak > 0 else math.inf,
        "zero_weak_norm": weak == 0.0,
    }


def psumming_multiplier_norm(M) -> float:
    """Norm of S -> M * S on the p-summing ideal: the max modulus."""
    M = np.asarray(M)
    if M.size == 0:
        raise ValueError("empty mask")
    return float(np.abs(M).max())


def sampled_lipschitz_floor(f, a: DiagonalizableOperator, b: DiagonalizableOperator) -> float:
    """Max modulus of divided differences over all pairs of eigenvalues
    of A and B; a floor for any admissible Lipschitz bound."""
    pts = np.concatenate([a.lambdas, b.lambdas])
    vals = np.array([complex(f(x)) for x in pts])
    floor = 0.0
    for i in range(pts.size):
        for j in range(pts.size):
            if pts[i] != pts[j]:
                floor = max(floor, abs((vals[i] - vals[j]) / (pts[i] - pts[j])))
    return floor


def lipschitz_commutator_check(
    a: DiagonalizableOperator,
    b: DiagonalizableOperator,
    S,
    f,
    lip: float,
    ctx: PSummingContext,
    cfg: SearchConfig | None = None,
) -> dict:
    """Verify pi_p(f(B)S - Sf(A)) <= K_A K_B lip pi_p(BS - SA) with K
    upper bounds; both pi_p values are exact entrywise norms. A acts on
    l_{p*}, B on l_p."""
    cfg = cfg or SearchConfig()
    floor = sampled_lipschitz_floor(f, a, b)
    if lip < floor - 1e-12:
        raise ValueError(
            f"supplied Lipschitz bound {lip} is below the sampled divided-difference max {floor}"
        )
    S = np.asarray(S, dtype=complex)
    A = assemble(a)
    B = assemble(b)
    lhs = pi_p_norm(functional_calculus(b, f) @ S - S @ functional_calculus(a, f), ctx)
    rhs = pi_p_norm(B @ S - S @ A, ctx)
    k_a = diagonalizability_constant(a, ctx.pstar, cfg, max_sweeps=8).value
    k_b = diagonalizability_constant(b, ctx.p, cfg, max_sweeps=8).value
    bound = k_a * k_b * lip * rhs
    return {
        "lhs": lhs,
        "rhs": rhs,
        "bound": bound,
        "K_A": k_a,
        "K_B": k_b,
        "satisfied": lhs <= bound + 1e-9 * (1.0 + bound),
    }
