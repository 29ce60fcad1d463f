"""Entropic cones: the Shannon cone, entropic Markov constraints, exact
Fourier-Motzkin projection to obtain E_C, d-separation constraints for
E_I, and Farkas implication checks.

Rows are stored over the 2^n - 1 nonempty variable subsets, indexed by
bitmask minus one in the cone's variable order, as integer coefficient
tuples with gcd 1 (sign preserved: a row c means c . h >= 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, log2
from typing import Iterable, Optional, Sequence

from .graph import GDag, NodeKind, _bits
from .dsep import observable_ci_set
from .models import Distribution
from .linprog import nonneg_combination

MAX_CONE_NODES = 6


class ConeError(ValueError):
    pass


def _normalize(row: Sequence[Fraction]) -> Optional[tuple[int, ...]]:
    """Scale to integers with gcd 1; None for the zero row."""
    denom = 1
    for c in row:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    ints = [int(c * denom) for c in row]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    if g == 0:
        return None
    return tuple(c // g for c in ints)


@dataclass(frozen=True)
class LinIneq:
    """A homogeneous inequality sum(coeffs[S] * H(S)) >= 0."""

    coeffs: dict[frozenset[str], Fraction]

    def __post_init__(self):
        clean = {
            frozenset(s): Fraction(c) for s, c in self.coeffs.items() if c
        }
        if not clean:
            raise ConeError("inequality has no nonzero coefficient")
        if any(not s for s in clean):
            raise ConeError("empty subset in inequality")
        object.__setattr__(self, "coeffs", clean)

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __eq__(self, other):
        return isinstance(other, LinIneq) and self.coeffs == other.coeffs

    def value(self, h: dict[frozenset[str], float]) -> float:
        return sum(float(c) * h[s] for s, c in self.coeffs.items())


@dataclass(frozen=True)
class Cone:
    variables: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        size = (1 << len(self.variables)) - 1
        for r in self.rows:
            if len(r) != size:
                raise ConeError("row length does not match variable count")

    def _subset(self, mask: int) -> frozenset[str]:
        return frozenset(self.variables[i] for i in _bits(mask))

    def ineqs(self) -> tuple[LinIneq, ...]:
        return tuple(
            LinIneq(
                {
                    self._subset(m): Fraction(c)
                    for m, c in enumerate(r, start=1)
                    if c
                }
            )
            for r in self.rows
        )

    def row_of(self, ineq: LinIneq) -> tuple[int, ...]:
        """ineq expressed in this cone's coordinates."""
        index = {v: i for i, v in enumerate(self.variables)}
        size = (1 << len(self.variables)) - 1
        row = [Fraction(0)] * size
        for s, c in ineq.coeffs.items():
            if not s <= set(self.variables):
                raise ConeError(f"subset {sorted(s)} outside cone variables")
            mask = 0
            for v in s:
                mask |= 1 << index[v]
            row[mask - 1] = c
        norm = _normalize(row)
        if norm is None:
            raise ConeError("zero inequality")
        return norm

    def to_json(self) -> str:
        ineqs = []
        for r in sorted(self.rows):
            coeffs = {
                ",".join(sorted(self._subset(m))): f"{c}/1"
                for m, c in enumerate(r, start=1)
                if c
            }
            ineqs.append({"coeffs": coeffs})
        return json.dumps(
            {"variables": list(self.variables), "ineqs": ineqs},
            separators=(", ", ": "),
        )

    @staticmethod
    def from_json(text: str) -> "Cone":
        try:
            obj = json.loads(text)
            variables = tuple(obj["variables"])
            index = {v: i for i, v in enumerate(variables)}
            size = (1 << len(variables)) - 1
            rows = []
            for item in obj["ineqs"]:
                row = [Fraction(0)] * size
                for key, val in item["coeffs"].items():
                    mask = 0
                    for v in key.split(","):
                        mask |= 1 << index[v]
                    row[mask - 1] = Fraction(val)
                norm = _normalize(row)
                if norm is None:
                    raise ConeError("zero inequality row")
                rows.append(norm)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ConeError(f"bad cone JSON: {e}") from None
        return Cone(variables, tuple(rows))


def _dedupe(rows: Iterable[tuple[int, ...]]) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for r in rows:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def elemental_inequalities(variables: Sequence[str]) -> Cone:
    """The elemental generating set of the Shannon cone."""
    n = len(variables)
    if n < 1:
        raise ConeError("need at least one variable")
    if n > 8:
        raise ConeError("too many variables")
    size = (1 << n) - 1
    rows: list[tuple[int, ...]] = []

    def row(*terms: tuple[int, int]) -> tuple[int, ...]:
        r = [0] * size
        for mask, c in terms:
            if mask:
                r[mask - 1] += c
        return tuple(r)

    full = size
    for i in range(n):
        rows.append(row((full, 1), (full & ~(1 << i), -1)))
    for i in range(n):
        for j in range(i + 1, n):
            rest = full & ~(1 << i) & ~(1 << j)
            k = rest
            while True:
                rows.append(
                    row(
                        ((1 << i) | k, 1),
                        ((1 << j) | k, 1),
                        ((1 << i) | (1 << j) | k, -1),
                        (k, -1),
                    )
                )
                if k == 0:
                    break
                k = (k - 1) & rest
    return Cone(tuple(variables), tuple(_dedupe(rows)))


def _cmi_row(
    size: int, x: int, y: int, z: int, sign: int
) -> tuple[int, ...]:
    """sign * I(x ; y | z) expanded to entropy coordinates."""
    r = [0] * size
    for mask, c in ((x | z, 1), (y | z, 1), (x | y | z, -1), (z, -1)):
        if mask:
            r[mask - 1] += sign * c
    return tuple(r)


def markov_constraint_rows(g: GDag) -> list[LinIneq]:
    """-I(X ; ND(X) | Pa(X)) >= 0 for each node with nondescendants."""
    n = len(g.names)
    size = (1 << n) - 1
    out = []
    for i in range(n):
        x = 1 << i
        pa = g.parent_mask[i]
        nd = g.all_mask & ~g.desc_mask[i] & ~x & ~pa
        if not nd:
            continue
        row = _cmi_row(size, x, nd, pa, -1)
        coeffs = {
            g.names_of(m): Fraction(c)
            for m, c in enumerate(row, start=1)
            if c
        }
        if coeffs:
            out.append(LinIneq(coeffs))
    return out


def _active_coords(
    rows: Sequence[tuple[int, ...]], target: tuple[int, ...]
) -> list[int]:
    dim = len(target)
    return [
        k
        for k in range(dim)
        if target[k] or any(r[k] for r in rows)
    ]


def _exact_implies(
    rows: Sequence[tuple[int, ...]], target: tuple[int, ...]
) -> bool:
    coords = _active_coords(rows, target)
    lam = nonneg_combination(
        [Fraction(target[k]) for k in coords],
        [[Fraction(r[k]) for k in coords] for r in rows],
    )
    return lam is not None


def _rows_implies(
    rows: Sequence[tuple[int, ...]],
    target: tuple[int, ...],
    strict: bool = True,
) -> bool:
    """Is target a nonnegative combination of rows?

    With ``strict`` false a floating-point LP routes the answer: a
    float-infeasible system is reported unimplied without exact proof
    (keeping a row is always sound), while a float-feasible one is
    confirmed exactly on the support of the float solution, falling back
    to the full exact LP. Drops are therefore always exact.
    """
    if not rows:
        return not any(target)
    if strict:
        return _exact_implies(rows, target)
    try:
        from scipy.optimize import linprog as _linprog
    except ImportError:  # pragma: no cover - scipy is a soft dependency
        return _exact_implies(rows, target)
    coords = _active_coords(rows, target)
    a_eq = [[float(r[k]) for r in rows] for k in coords]
    b_eq = [float(target[k]) for k in coords]
    res = _linprog(
        c=[0.0] * len(rows),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        return False
    support = [j for j, v in enumerate(res.x) if v > 1e-9]
    if support and _exact_implies([rows[j] for j in support], target):
        return True
    return _exact_implies(rows, target)


def _minimize(
    rows: list[tuple[int, ...]], strict: bool = True
) -> list[tuple[int, ...]]:
    """Drop rows implied by the remaining ones (greedy, deterministic)."""
    rows = sorted(_dedupe(rows))
    keep = list(rows)
    for r in rows:
        rest = [q for q in keep if q != r]
        if rest and _rows_implies(rest, r, strict=strict):
            keep = rest
    return keep


def _eliminate_coord(
    rows: list[tuple[int, ...]], k: int
) -> list[tuple[int, ...]]:
    """Fourier-Motzkin elimination of coordinate index k."""
    zero, pos, neg = [], [], []
    for r in rows:
        c = r[k]
        if c == 0:
            zero.append(r)
        elif c > 0:
            pos.append(r)
        else:
            neg.append(r)
    out = list(zero)
    for p in pos:
        for q in neg:
            combo = [
                Fraction(-q[k]) * p[i] + Fraction(p[k]) * q[i]
                for i in range(len(p))
            ]
            norm = _normalize(combo)
            if norm is not None:
                out.append(norm)
    return _dedupe(out)


def fourier_motzkin_eliminate(c: Cone, coord: Iterable[str]) -> Cone:
    """Project out one entropy coordinate, then remove redundant rows."""
    index = {v: i for i, v in enumerate(c.variables)}
    mask = 0
    for v in coord:
        if v not in index:
            raise ConeError(f"unknown coordinate variable {v!r}")
        mask |= 1 << index[v]
    if mask == 0:
        raise ConeError("empty coordinate")
    rows = _eliminate_coord(list(c.rows), mask - 1)
    return Cone(c.variables, tuple(_minimize(rows)))


def _restrict(c: Cone, variables: Sequence[str]) -> Cone:
    """Re-coordinate a cone whose rows only mention subsets of
    ``variables`` onto that smaller universe."""
    old_index = {v: i for i, v in enumerate(c.variables)}
    new_index = {v: i for i, v in enumerate(variables)}
    size = (1 << len(variables)) - 1
    keep_mask = 0
    for v in variables:
        keep_mask |= 1 << old_index[v]
    rows = []
    for r in c.rows:
        new = [0] * size
        for m, coef in enumerate(r, start=1):
            if not coef:
                continue
            if m & ~keep_mask:
                raise ConeError("row mentions an eliminated coordinate")
            nm = 0
            for i in _bits(m):
                nm |= 1 << new_index[c.variables[i]]
            new[nm - 1] = coef
        rows.append(tuple(new))
    return Cone(tuple(variables), tuple(_dedupe(rows)))


def _check_size(g: GDag, allow_large: bool) -> None:
    if len(g.names) > MAX_CONE_NODES and not allow_large:
        raise ConeError(
            f"graph has {len(g.names)} nodes; cones above {MAX_CONE_NODES} "
            "require the long-run flag"
        )


def derive_classical_cone(
    g: GDag, allow_large: bool = False, progress: bool = False
) -> Cone:
    """E_C: Shannon cone over all nodes plus entropic Markov rows,
    projected onto observed-subset coordinates."""
    _check_size(g, allow_large)
    cone = elemental_inequalities(g.names)
    # the elemental set is already irredundant; skip the initial pass
    rows = _dedupe(
        list(cone.rows) + [cone.row_of(i) for i in markov_constraint_rows(g)]
    )

    unobs_mask = 0
    index = {v: i for i, v in enumerate(g.names)}
    for v in g.unobserved_nodes():
        unobs_mask |= 1 << index[v]
    size = (1 << len(g.names)) - 1
    latent_coords = [m for m in range(1, size + 1) if m & unobs_mask]
    latent_coords.sort(key=lambda m: (bin(m).count("1"), m))
    for step, m in enumerate(latent_coords):
        rows = _eliminate_coord(rows, m - 1)
        rows = _minimize(rows, strict=False)
        if progress:
            import sys

            print(
                f"  eliminated {step + 1}/{len(latent_coords)} coordinates, "
                f"{len(rows)} rows",
                file=sys.stderr,
            )
    projected = _restrict(Cone(g.names, tuple(rows)), g.observed_nodes())
    return Cone(projected.variables, tuple(_minimize(list(projected.rows))))


def derive_independence_cone(g: GDag, allow_large: bool = False) -> Cone:
    """E_I: observed Shannon cone plus -I(X;Y|Z) >= 0 for every
    observable d-separation statement."""
    _check_size(g, allow_large)
    obs = g.observed_nodes()
    if not obs:
        raise ConeError("graph has no observed nodes")
    cone = elemental_inequalities(obs)
    index = {v: i for i, v in enumerate(obs)}
    size = (1 << len(obs)) - 1

    def mask_of(names: Iterable[str]) -> int:
        m = 0
        for v in names:
            m |= 1 << index[v]
        return m

    rows = list(cone.rows)
    for st in observable_ci_set(g):
        row = _cmi_row(size, mask_of(st.x), mask_of(st.y), mask_of(st.z), -1)
        norm = _normalize([Fraction(c) for c in row])
        if norm is not None:
            rows.append(norm)
    return Cone(tuple(obs), tuple(_minimize(rows)))


def implied_by(ineq: LinIneq, c: Cone) -> bool:
    """True iff ineq is a nonnegative rational combination of c's rows."""
    return _rows_implies(list(c.rows), c.row_of(ineq))


def entropy_vector(p: Distribution) -> dict[frozenset[str], float]:
    """Base-2 entropies of every nonempty subset of p's variables."""
    names = [n for n, _ in p.variables]
    out: dict[frozenset[str], float] = {}
    for mask in range(1, 1 << len(names)):
        subset = [names[i] for i in _bits(mask)]
        marg = p.marginal(subset)
        h = 0.0
        for q in marg.probs:
            if q:
                h -= float(q) * log2(float(q))
        out[frozenset(subset)] = h
    return out
