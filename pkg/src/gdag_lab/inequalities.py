"""Theory-independent necessary conditions for the triangle and
instrumental causal structures."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .linprog import nonneg_combination
from .models import ConditionalDistribution, Distribution, ModelError, entropy


def _three_vars(p: Distribution) -> tuple[str, str, str]:
    if len(p.variables) != 3:
        raise ModelError("expected a distribution over exactly three variables")
    a, b, c = p.names
    return a, b, c


def triangle_monogamy_margin(p: Distribution) -> float:
    """I(A:B) + I(B:C) - H(B) in bits; > 0 certifies p is not realizable
    in the triangle structure in any probabilistic theory."""
    a, b, c = _three_vars(p)
    iab = entropy(p, {a}) + entropy(p, {b}) - entropy(p, {a, b})
    ibc = entropy(p, {b}) + entropy(p, {c}) - entropy(p, {b, c})
    return iab + ibc - entropy(p, {b})


def triangle_gpt_feasible(p: Distribution) -> bool:
    """Exact feasibility of a surrogate joint P' with P'(a,b) = P(a,b),
    P'(b,c) = P(b,c) and P'(a,c) = P(a) P(c).

    Infeasibility certifies that p cannot arise in the triangle
    structure in any probabilistic theory.
    """
    a, b, c = _three_vars(p)
    ca, cb, cc = (p.card(n) for n in (a, b, c))
    pab = p.marginal([a, b])
    pbc = p.marginal([b, c])
    pa = p.marginal([a])
    pc = p.marginal([c])

    # Nonnegative q with three families of marginal equalities; feasibility
    # is q >= 0 with A q = b, i.e. b is a nonnegative combination of A's
    # columns.  Constraint row order: (a,b) block, (b,c) block, (a,c) block.
    def row_index(kind: int, i: int, j: int) -> int:
        if kind == 0:
            return i * cb + j
        if kind == 1:
            return ca * cb + i * cc + j
        return ca * cb + cb * cc + i * cc + j

    n_rows = ca * cb + cb * cc + ca * cc
    columns = []
    for av, bv, cv in product(range(ca), range(cb), range(cc)):
        col = [Fraction(0)] * n_rows
        col[row_index(0, av, bv)] = Fraction(1)
        col[row_index(1, bv, cv)] = Fraction(1)
        col[row_index(2, av, cv)] = Fraction(1)
        columns.append(col)
    target = [Fraction(0)] * n_rows
    for av, bv in product(range(ca), range(cb)):
        target[row_index(0, av, bv)] = pab.prob((av, bv))
    for bv, cv in product(range(cb), range(cc)):
        target[row_index(1, bv, cv)] = pbc.prob((bv, cv))
    for av, cv in product(range(ca), range(cc)):
        target[row_index(2, av, cv)] = pa.prob((av,)) * pc.prob((cv,))
    return nonneg_combination(target, columns) is not None


def instrumental_value(p: ConditionalDistribution) -> Fraction:
    """max_b sum_a max_y P(a,b|y); a value > 1 certifies the family is
    not realizable in the instrumental structure in any theory."""
    if len(p.variables) != 2 or len(p.given) != 1:
        raise ModelError("expected a family P(a,b|y) with a single index")
    ca = p.variables[0][1]
    cb = p.variables[1][1]
    cy = p.given[0][1]
    slices = [p.slice((y,)) for y in range(cy)]
    best = Fraction(0)
    for bv in range(cb):
        s = Fraction(0)
        for av in range(ca):
            s += max(sl.prob((av, bv)) for sl in slices)
        best = max(best, s)
    return best
