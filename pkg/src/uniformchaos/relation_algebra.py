"""Exact calculus of binary relations on finite carriers.

A relation is stored as one bitmask per row: bit ``j`` of ``rows[i]`` is set
iff the pair ``(i, j)`` belongs to the relation.  Composition is then a union
of rows, which keeps the hot path in native integer operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence


class RelationError(ValueError):
    pass


class CarrierMismatch(RelationError):
    pass


class UnknownPoint(RelationError):
    pass


class InvalidBase(RelationError):
    pass


class NotSeparable(RelationError):
    pass


@dataclass(frozen=True)
class Carrier:
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise RelationError("a carrier needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise RelationError("carrier points must be distinct")

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def _positions(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, point: Hashable) -> int:
        try:
            return self._positions[point]
        except KeyError:
            raise UnknownPoint(f"unknown point {point!r}") from None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Relation:
    carrier: Carrier
    rows: tuple = field(repr=False)

    def __post_init__(self):
        rows = tuple(self.rows)
        if len(rows) != self.carrier.size:
            raise RelationError("one row per carrier point is required")
        top = 1 << self.carrier.size
        if any(r < 0 or r >= top for r in rows):
            raise RelationError("pair index outside the carrier")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_pairs(cls, carrier: Carrier, pairs: Iterable[tuple[int, int]]) -> Relation:
        rows = [0] * carrier.size
        for i, j in pairs:
            if not (0 <= i < carrier.size and 0 <= j < carrier.size):
                raise RelationError(f"pair ({i}, {j}) outside carrier of size {carrier.size}")
            rows[i] |= 1 << j
        return cls(carrier, tuple(rows))

    @classmethod
    def from_points(cls, carrier: Carrier, pairs: Iterable[tuple]) -> Relation:
        return cls.from_pairs(carrier, ((carrier.index(x), carrier.index(y)) for x, y in pairs))

    @classmethod
    def diagonal(cls, carrier: Carrier) -> Relation:
        return cls(carrier, tuple(1 << i for i in range(carrier.size)))

    @classmethod
    def full(cls, carrier: Carrier) -> Relation:
        everything = (1 << carrier.size) - 1
        return cls(carrier, (everything,) * carrier.size)

    @classmethod
    def empty(cls, carrier: Carrier) -> Relation:
        return cls(carrier, (0,) * carrier.size)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.rows) for j in _bits(row)]

    def point_pairs(self) -> list[tuple]:
        pts = self.carrier.points
        return [(pts[i], pts[j]) for i, j in self.pairs()]

    def __contains__(self, pair) -> bool:
        i, j = pair
        return bool(self.rows[i] >> j & 1)

    def __len__(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def _check(self, other: Relation):
        if self.carrier != other.carrier:
            raise CarrierMismatch("relations live on different carriers")

    def __and__(self, other: Relation) -> Relation:
        self._check(other)
        return Relation(self.carrier, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: Relation) -> Relation:
        self._check(other)
        return Relation(self.carrier, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __sub__(self, other: Relation) -> Relation:
        self._check(other)
        return Relation(self.carrier, tuple(a & ~b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: Relation) -> bool:
        self._check(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __lt__(self, other: Relation) -> bool:
        return self <= other and self != other

    def contains_diagonal(self) -> bool:
        return all(row >> i & 1 for i, row in enumerate(self.rows))

    def is_symmetric(self) -> bool:
        return inverse_rel(self) == self

    def __repr__(self):
        return f"Relation({self.point_pairs()!r})"


def compose(u: Relation, v: Relation) -> Relation:
    """Composite ``{(x, y) : (x, z) in u and (z, y) in v for some z}``."""
    u._check(v)
    rows = []
    for row in u.rows:
        acc = 0
        for z in _bits(row):
            acc |= v.rows[z]
        rows.append(acc)
    return Relation(u.carrier, tuple(rows))


def compose_power(u: Relation, k: int) -> Relation:
    """The k-fold composite ``u ∘ … ∘ u`` (k >= 1)."""
    if k < 1:
        raise ValueError("k must be positive")
    out = u
    for _ in range(k - 1):
        out = compose(out, u)
    return out


def inverse_rel(u: Relation) -> Relation:
    rows = [0] * u.carrier.size
    for i, j in u.pairs():
        rows[j] |= 1 << i
    return Relation(u.carrier, tuple(rows))


def neighborhood(u: Relation, x: Hashable) -> frozenset:
    """The section ``u[x] = {y : (x, y) in u}`` as a set of points."""
    i = u.carrier.index(x)
    pts = u.carrier.points
    return frozenset(pts[j] for j in _bits(u.rows[i]))


def section_indices(u: Relation, i: int) -> list[int]:
    return list(_bits(u.rows[i]))


# -- uniform bases ---------------------------------------------------------


@dataclass(frozen=True)
class UniformBase:
    carrier: Carrier
    base: tuple

    def __post_init__(self):
        base = tuple(self.base)
        if not base:
            raise InvalidBase("a uniform base must be non-empty")
        for rel in base:
            if rel.carrier != self.carrier:
                raise CarrierMismatch("base relation on a foreign carrier")
        object.__setattr__(self, "base", base)

    def __iter__(self):
        return iter(self.base)

    def __len__(self):
        return len(self.base)

    def __getitem__(self, i):
        return self.base[i]

    def in_filter(self, rel: Relation) -> bool:
        """True when ``rel`` contains some base element (so it is an entourage)."""
        return any(b <= rel for b in self.base)


@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    witness: dict | None = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class AxiomReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_json(self) -> dict:
        return {"passed": self.passed, "axioms": [r.to_json() for r in self.results]}


def _first_pair(rel: Relation):
    pairs = rel.pairs()
    if not pairs:
        return None
    i, j = pairs[0]
    return [rel.carrier.points[i], rel.carrier.points[j]]


def _finest(base: Sequence[Relation]) -> int:
    return min(range(len(base)), key=lambda i: (len(base[i]), i))


def check_base_axioms(b: UniformBase) -> AxiomReport:
    """Check the base forms of UN-1 .. UN-5; failures carry a witness."""
    base = b.base
    pts = b.carrier.points
    results = []

    un1 = AxiomResult("UN-1", True)
    for idx, rel in enumerate(base):
        missing = [i for i in range(b.carrier.size) if not rel.rows[i] >> i & 1]
        if missing:
            p = pts[missing[0]]
            un1 = AxiomResult("UN-1", False, {"relation": idx, "pair": [p, p]})
            break
    results.append(un1)

    results.append(AxiomResult("UN-2", True, note="supersets are implicit in the filter generated by the base"))

    un3 = AxiomResult("UN-3", True)
    for i in range(len(base)):
        for j in range(i + 1, len(base)):
            meet = base[i] & base[j]
            if not any(r <= meet for r in base):
                un3 = AxiomResult("UN-3", False, {"relations": [i, j]})
                break
        if not un3.passed:
            break
    results.append(un3)

    un4 = AxiomResult("UN-4", True)
    for idx, rel in enumerate(base):
        if not any(inverse_rel(r) <= rel for r in base):
            cand = _finest(base)
            un4 = AxiomResult("UN-4", False, {
                "relation": idx, "candidate": cand,
                "pair": _first_pair(inverse_rel(base[cand]) - rel)})
            break
    results.append(un4)

    un5 = AxiomResult("UN-5", True)
    squares = [compose(r, r) for r in base]
    for idx, rel in enumerate(base):
        if not any(sq <= rel for sq in squares):
            cand = _finest(base)
            un5 = AxiomResult("UN-5", False, {
                "relation": idx, "candidate": cand,
                "pair": _first_pair(squares[cand] - rel)})
            break
    results.append(un5)
    return AxiomReport(results)


def is_hausdorff_base(b: UniformBase) -> bool:
    report = check_base_axioms(b)
    if not report.passed:
        raise InvalidBase("base fails the uniform-structure axioms")
    meet = b.base[0]
    for rel in b.base[1:]:
        meet = meet & rel
    return meet == Relation.diagonal(b.carrier)


# -- metric structures -----------------------------------------------------


@dataclass(frozen=True)
class DistanceTable:
    carrier: Carrier
    d: tuple

    def __post_init__(self):
        n = self.carrier.size
        d = tuple(tuple(Fraction(v) for v in row) for row in self.d)
        if len(d) != n or any(len(row) != n for row in d):
            raise RelationError("distance table must be square over the carrier")
        for i in range(n):
            if d[i][i] != 0:
                raise RelationError("distance table needs a zero diagonal")
            for j in range(n):
                if d[i][j] < 0 or d[i][j] != d[j][i]:
                    raise RelationError("distances must be symmetric and nonnegative")
                for k in range(n):
                    if d[i][k] > d[i][j] + d[j][k]:
                        raise RelationError("triangle inequality violated")
        object.__setattr__(self, "d", d)

    def __call__(self, x, y) -> Fraction:
        return self.d[self.carrier.index(x)][self.carrier.index(y)]

    def values(self) -> list[Fraction]:
        return sorted({v for row in self.d for v in row})


def metric_entourage(table: DistanceTable, eps) -> Relation:
    """``{(x, y) : d(x, y) < eps}`` with exact rational comparison."""
    eps = Fraction(eps)
    if eps <= 0:
        raise RelationError("eps must be positive")
    n = table.carrier.size
    return Relation.from_pairs(
        table.carrier, ((i, j) for i in range(n) for j in range(n) if table.d[i][j] < eps))


def metric_base(table: DistanceTable) -> UniformBase:
    """Base of eps-entourages, coarsest first: eps above the diameter, then each positive distance."""
    positive = [v for v in table.values() if v > 0]
    top = (positive[-1] if positive else Fraction(0)) + 1
    epsilons = [top] + sorted(positive, reverse=True)
    return UniformBase(table.carrier, tuple(metric_entourage(table, e) for e in epsilons))


# -- constructions used by the sensitivity proofs ---------------------------


def separating_entourage(a: Iterable, b: Iterable, base: UniformBase) -> Relation:
    """An entourage W with ``(A x B) ∩ W = ∅``, built as one base element per pair."""
    carrier = base.carrier
    a_idx = sorted({carrier.index(p) for p in a})
    b_idx = sorted({carrier.index(p) for p in b})
    if not a_idx or not b_idx:
        raise RelationError("both point sets must be non-empty")
    if set(a_idx) & set(b_idx):
        raise RelationError("point sets must be disjoint")
    chosen = []
    for i in a_idx:
        for j in b_idx:
            for k, rel in enumerate(base.base):
                if (i, j) not in rel:
                    if k not in chosen:
                        chosen.append(k)
                    break
            else:
                raise NotSeparable(
                    f"not separable: no base element misses {(carrier.points[i], carrier.points[j])!r}")
    w = base.base[chosen[0]]
    for k in chosen[1:]:
        w = w & base.base[k]
    return w


def _coarsest_first(base: UniformBase) -> list[int]:
    return sorted(range(len(base)), key=lambda i: (-len(base.base[i]), i))


def _root_once(target: Relation, base: UniformBase) -> Relation:
    for k in _coarsest_first(base):
        r = base.base[k]
        if compose(r, r) <= target:
            return r
    raise InvalidBase("no base element R satisfies R∘R ⊂ target")


def symmetric_root(v: Relation, base: UniformBase, k: int = 2) -> Relation:
    """A symmetric entourage whose k-fold composite lies in ``v`` (k in {2, 4})."""
    if k not in (2, 4):
        raise ValueError("k must be 2 or 4")
    if not base.in_filter(v):
        raise InvalidBase("target relation contains no base element")
    r = _root_once(v, base)
    if k == 4:
        r = _root_once(r, base)
    return r & inverse_rel(r)


# -- JSON ------------------------------------------------------------------


def relation_to_json(rel: Relation) -> dict:
    return {"carrier": list(rel.carrier.points), "pairs": [list(p) for p in rel.pairs()]}


def relation_from_json(doc: dict, carrier: Carrier | None = None) -> Relation:
    if carrier is None:
        carrier = Carrier(tuple(doc["carrier"]))
    return Relation.from_pairs(carrier, (tuple(p) for p in doc["pairs"]))


def base_to_json(b: UniformBase) -> dict:
    return {"carrier": list(b.carrier.points), "base": [[list(p) for p in r.pairs()] for r in b.base]}


def base_from_json(doc: dict) -> UniformBase:
    carrier = Carrier(tuple(doc["carrier"]))
    rels = []
    for pairs in doc["base"]:
        rels.append(Relation.from_pairs(carrier, (tuple(p) for p in pairs)))
    return UniformBase(carrier, tuple(rels))


def distance_table_from_json(doc: dict) -> DistanceTable:
    carrier = Carrier(tuple(doc["carrier"]))
    return DistanceTable(carrier, tuple(tuple(Fraction(v) for v in row) for row in doc["distances"]))


def distance_table_to_json(t: DistanceTable) -> dict:
    return {"carrier": list(t.carrier.points), "distances": [[str(v) for v in row] for row in t.d]}
