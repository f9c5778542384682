"""Configurations, the shift action, W(Ω) entourages and subshifts of finite type.

Configurations are never stored as infinite objects.  Two finite presentations
exist:

* :class:`PeriodicConfiguration` -- constant on the cosets of a finite-index
  normal subgroup ``H``, stored as one symbol per coset representative;
* :class:`CylinderConfiguration` -- a finite pattern laid over a periodic
  background (the plain "pattern + default symbol" form uses a constant
  background).  Over the integers the background may switch to a second
  periodic tail below a cut position, so every eventually periodic point of
  a Z-subshift of finite type is representable.

Subshifts over the integers are analysed through the block graph of their
normalised window ``{0, ..., m-1}``: vertices are the admissible
``(m-1)``-blocks that lie on some bi-infinite path, edges are allowed words.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .group_actions import (
    FiniteIndexSubgroup,
    Group,
    Integers,
    Lattice,
    group_from_json,
    modular_subgroup,
    orbit_bounded,
    OrbitOverflow,
    separating_subgroup,
    subgroup_from_json,
    whole_group,
)


class ShiftError(ValueError):
    pass


class EmptySubshift(ShiftError):
    pass


Pattern = Mapping  # group element -> symbol


# -- configurations --------------------------------------------------------


def _minimal_period(word: Sequence) -> int:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return p
    return n


@dataclass(frozen=True)
class PeriodicConfiguration:
    subgroup: FiniteIndexSubgroup
    values: tuple

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != self.subgroup.index:
            raise ShiftError("one value per coset representative is required")
        object.__setattr__(self, "values", values)
        if isinstance(self.group, Integers) and (
                self.subgroup.kind != "modular" or _minimal_period(values) != len(values)):
            # every index-n subgroup of Z is nZ, so the word over 0..n-1 is canonical
            word = tuple(self(k) for k in range(len(values)))
            p = _minimal_period(word)
            object.__setattr__(self, "subgroup", modular_subgroup(self.group, p))
            object.__setattr__(self, "values", word[:p])

    @property
    def group(self) -> Group:
        return self.subgroup.group

    @property
    def period(self) -> int:
        return self.subgroup.index

    def __call__(self, g):
        return self.values[self.subgroup.coset_index(g)]

    def shift(self, g) -> PeriodicConfiguration:
        grp = self.group
        gi = grp.inv(g)
        return PeriodicConfiguration(
            self.subgroup, tuple(self(grp.mul(gi, t)) for t in self.subgroup.representatives))

    def restrict(self, omega: Iterable) -> tuple:
        return tuple(self(w) for w in omega)

    @property
    def word(self) -> tuple:
        if not isinstance(self.group, Integers):
            raise ShiftError("words are defined for configurations over the integers")
        return self.values

    def __repr__(self):
        if isinstance(self.group, Integers):
            return f"periodic({''.join(map(str, self.values))})"
        return f"PeriodicConfiguration({self.subgroup.kind}, index={self.period})"


@dataclass(frozen=True)
class CylinderConfiguration:
    """``x(g) = pattern[g]`` on the pattern support, else the background.

    With ``left`` set (integers only) the background is ``left`` at positions
    below ``cut`` and ``background`` from ``cut`` on.
    """

    pattern: tuple
    background: PeriodicConfiguration
    left: PeriodicConfiguration | None = None
    cut: int = 0

    def __post_init__(self):
        grp = self.background.group
        if self.left is not None and not isinstance(grp, Integers):
            raise ShiftError("two-tailed configurations live over the integers")
        if self.left is None or self.left == self.background:
            object.__setattr__(self, "left", None)
            object.__setattr__(self, "cut", 0)
        items = dict(self.pattern)
        if self.left is not None:
            cut = self.cut
            while cut in items and items[cut] == self.left(cut):
                cut += 1
            object.__setattr__(self, "cut", cut)
        kept = [(g, s) for g, s in items.items() if self._tail(g) != s]
        object.__setattr__(self, "pattern", tuple(sorted(kept, key=lambda it: grp.sort_key(it[0]))))

    def _tail(self, g):
        if self.left is not None and g < self.cut:
            return self.left(g)
        return self.background(g)

    @cached_property
    def _lookup(self) -> dict:
        return dict(self.pattern)

    @property
    def group(self) -> Group:
        return self.background.group

    def __call__(self, g):
        try:
            return self._lookup[g]
        except KeyError:
            return self._tail(g)

    def shift(self, g) -> CylinderConfiguration:
        grp = self.group
        left = None if self.left is None else self.left.shift(g)
        cut = self.cut + g if left is not None else 0
        return CylinderConfiguration(tuple((grp.mul(g, h), s) for h, s in self.pattern),
                                     self.background.shift(g), left, cut)

    def restrict(self, omega: Iterable) -> tuple:
        return tuple(self(w) for w in omega)

    def support(self) -> list:
        return [g for g, _ in self.pattern]

    def __repr__(self):
        if self.left is not None:
            return f"cylinder({dict(self.pattern)!r} over {self.left!r} | {self.cut} | {self.background!r})"
        return f"cylinder({dict(self.pattern)!r} over {self.background!r})"


Configuration = PeriodicConfiguration | CylinderConfiguration


def periodic_word(word: Sequence, group: Group | None = None) -> PeriodicConfiguration:
    """The Z-configuration repeating ``word`` with ``x(k) = word[k mod len(word)]``."""
    group = group or Integers()
    if not isinstance(group, Integers):
        raise ShiftError("periodic words live over the integers")
    word = tuple(word)
    if not word:
        raise ShiftError("empty word")
    return PeriodicConfiguration(modular_subgroup(group, len(word)), word)


def constant(group: Group, symbol) -> PeriodicConfiguration:
    return PeriodicConfiguration(whole_group(group) if not isinstance(group, Integers)
                                 else modular_subgroup(group, 1), (symbol,))


def cylinder(pattern: Pattern, default=None, background: PeriodicConfiguration | None = None,
             group: Group | None = None) -> CylinderConfiguration:
    if background is None:
        if default is None or group is None:
            raise ShiftError("a cylinder needs a background or a default symbol and group")
        background = constant(group, default)
    return CylinderConfiguration(tuple(pattern.items()), background)


def shift_apply(g, x):
    """``(gx)(h) = x(g⁻¹h)``."""
    return x.shift(g)


@dataclass(frozen=True)
class ShiftAction:
    group: Group

    def act(self, g, x):
        return x.shift(g)


def configuration_to_json(x) -> dict:
    grp = x.group
    if isinstance(x, PeriodicConfiguration):
        if isinstance(grp, Integers):
            return {"kind": "periodic", "word": list(x.values)}
        return {"kind": "periodic", "subgroup": x.subgroup.to_json(), "values": list(x.values)}
    doc = {"kind": "cylinder",
           "pattern": [[grp.element_to_json(g), s] for g, s in x.pattern],
           "background": configuration_to_json(x.background)}
    if x.left is not None:
        doc["left"] = configuration_to_json(x.left)
        doc["cut"] = x.cut
    return doc


def configuration_from_json(group: Group, doc: dict):
    kind = doc.get("kind")
    if kind == "periodic":
        if "word" in doc:
            return periodic_word(doc["word"], group)
        return PeriodicConfiguration(subgroup_from_json(group, doc["subgroup"]), tuple(doc["values"]))
    if kind == "cylinder":
        pattern = {group.element_from_json(g): s for g, s in doc["pattern"]}
        if "left" in doc:
            return CylinderConfiguration(tuple(pattern.items()),
                                         configuration_from_json(group, doc["background"]),
                                         configuration_from_json(group, doc["left"]), int(doc["cut"]))
        if "background" in doc:
            return cylinder(pattern, background=configuration_from_json(group, doc["background"]))
        return cylinder(pattern, default=doc["default"], group=group)
    raise ShiftError(f"unknown configuration kind {kind!r}")


# -- prodiscrete entourages ------------------------------------------------


def w_related(omega: Iterable, x, y) -> bool:
    """``x|Ω = y|Ω``."""
    return all(x(g) == y(g) for g in omega)


@dataclass(frozen=True)
class ProdiscreteEntourage:
    """``W(Ω) = {(x, y) : x|Ω = y|Ω}``, an equivalence relation on any subshift."""

    support: tuple

    def __contains__(self, pair) -> bool:
        x, y = pair
        return w_related(self.support, x, y)

    def compose(self, other: ProdiscreteEntourage) -> ProdiscreteEntourage:
        a, b = set(self.support), set(other.support)
        if a <= b:
            return self
        if b <= a:
            return other
        raise ShiftError("composition of non-nested W(Ω) depends on the subshift")

    def inverse(self) -> ProdiscreteEntourage:
        return self

    def is_symmetric(self) -> bool:
        return True

    def __le__(self, other: ProdiscreteEntourage) -> bool:
        # sufficient condition, exact on the full shift
        return set(self.support) >= set(other.support)

    def to_json(self, group: Group) -> dict:
        return {"support": [group.element_to_json(g) for g in self.support]}


def prodiscrete(group: Group, omega: Iterable) -> ProdiscreteEntourage:
    return ProdiscreteEntourage(tuple(sorted(set(omega), key=group.sort_key)))


def scale_window(group: Group, n: int) -> tuple:
    """The support of the scale-n cylinders.

    Integers: ``{0, ..., n-1}``; lattices: the cube ``{0, ..., n-1}^d``;
    other groups: the ball of radius ``n - 1``.
    """
    if n < 1:
        raise ShiftError("scale must be positive")
    if isinstance(group, Integers):
        return tuple(range(n))
    if isinstance(group, Lattice):
        return tuple(sorted(itertools.product(range(n), repeat=group.dimension), key=group.sort_key))
    return tuple(group.ball(n - 1))


# -- subshifts of finite type ----------------------------------------------


def _split_word(word, alphabet) -> tuple:
    if isinstance(word, str) and all(len(s) == 1 for s in alphabet):
        return tuple(word)
    return tuple(word)


@dataclass(frozen=True)
class SubshiftOfFiniteType:
    group: Group
    alphabet: tuple
    window: tuple
    allowed: frozenset

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if len(set(alphabet)) != len(alphabet) or not alphabet:
            raise ShiftError("alphabet symbols must be distinct and non-empty")
        window = tuple(self.window)
        if not window or len(set(window)) != len(window):
            raise ShiftError("window must be a non-empty set of group elements")
        allowed = frozenset(tuple(p) for p in self.allowed)
        for p in allowed:
            if len(p) != len(window) or any(s not in alphabet for s in p):
                raise ShiftError(f"pattern {p!r} does not fit the window and alphabet")
        grp = self.group
        if isinstance(grp, Integers):
            lo, hi = min(window), max(window)
            size = max(hi - lo + 1, 2)
            pos = [w - lo for w in window]
            hull = []
            for word in itertools.product(alphabet, repeat=size):
                if tuple(word[k] for k in pos) in allowed:
                    hull.append(word)
            window, allowed = tuple(range(size)), frozenset(hull)
        elif grp.identity not in window:
            # left translation keeps the subshift: (gx)(kω) = ((k⁻¹g)x)(ω)
            k = grp.inv(window[0])
            window = tuple(grp.mul(k, w) for w in window)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "allowed", allowed)

    @classmethod
    def from_forbidden(cls, group, alphabet, window, forbidden) -> SubshiftOfFiniteType:
        alphabet = tuple(alphabet)
        banned = {_split_word(f, alphabet) for f in forbidden}
        every = itertools.product(alphabet, repeat=len(tuple(window)))
        return cls(group, alphabet, tuple(window), frozenset(p for p in every if p not in banned))

    @classmethod
    def from_allowed(cls, group, alphabet, window, allowed) -> SubshiftOfFiniteType:
        alphabet = tuple(alphabet)
        return cls(group, alphabet, tuple(window), frozenset(_split_word(a, alphabet) for a in allowed))

    @classmethod
    def full(cls, group: Group, alphabet) -> SubshiftOfFiniteType:
        alphabet = tuple(alphabet)
        return cls(group, alphabet, (group.identity,), frozenset((s,) for s in alphabet))

    @property
    def is_full(self) -> bool:
        return len(self.allowed) == len(self.alphabet) ** len(self.window)

    def to_json(self) -> dict:
        grp = self.group
        return {"group": grp.to_json(), "alphabet": list(self.alphabet),
                "window": [grp.element_to_json(w) for w in self.window],
                "allowed": [list(p) for p in sorted(self.allowed, key=self._pattern_key)]}

    def _pattern_key(self, p):
        idx = {s: i for i, s in enumerate(self.alphabet)}
        return tuple(idx[s] for s in p)


def sft_from_json(doc: dict) -> SubshiftOfFiniteType:
    for key in ("group", "alphabet"):
        if key not in doc:
            raise ShiftError(f"missing key {key!r}")
    has_allowed, has_forbidden = "allowed" in doc, "forbidden" in doc
    if has_allowed == has_forbidden:
        raise ShiftError("exactly one of 'allowed' and 'forbidden' must be given")
    group = group_from_json(doc["group"])
    alphabet = tuple(doc["alphabet"])
    window = tuple(group.element_from_json(w) for w in doc.get("window", [group.element_to_json(group.identity)]))
    if has_allowed:
        return SubshiftOfFiniteType.from_allowed(group, alphabet, window, doc["allowed"])
    return SubshiftOfFiniteType.from_forbidden(group, alphabet, window, doc["forbidden"])


def locally_admissible(sft: SubshiftOfFiniteType, x, radius: int) -> bool:
    """``(gx)|Ω ∈ 𝒫`` for every g in the ball of the given radius."""
    grp = sft.group
    for g in grp.ball(radius):
        gi = grp.inv(g)
        if tuple(x(grp.mul(gi, w)) for w in sft.window) not in sft.allowed:
            return False
    return True


# -- the block graph of a Z-subshift ---------------------------------------


@dataclass
class ZSftAnalysis:
    states: list
    matrix: list
    strongly_connected: bool
    primitive: bool
    mixing_gap: int | None
    witness_paths: dict = field(repr=False)

    def to_json(self) -> dict:
        fmt = lambda b: "".join(map(str, b))
        return {
            "states": [fmt(s) for s in self.states],
            "matrix": self.matrix,
            "strongly_connected": self.strongly_connected,
            "primitive": self.primitive,
            "mixing_gap": self.mixing_gap,
            "witness_paths": [{"from": fmt(self.states[i]), "to": fmt(self.states[j]),
                               "path": [fmt(self.states[k]) for k in path]}
                              for (i, j), path in sorted(self.witness_paths.items())],
        }


class ZSftSpace:
    """A subshift of finite type over the integers, presented by its essential block graph."""

    def __init__(self, sft: SubshiftOfFiniteType):
        if not isinstance(sft.group, Integers):
            raise ShiftError("block-graph analysis needs a subshift over the integers")
        self.sft = sft
        self.group = sft.group
        self.alphabet = sft.alphabet
        self.m = len(sft.window)
        self._sym = {s: i for i, s in enumerate(self.alphabet)}
        succ: dict = {}
        for word in sft.allowed:
            succ.setdefault(word[:-1], set()).add(word[1:])
            succ.setdefault(word[1:], set())
        alive = set(succ)
        changed = True
        while changed:
            changed = False
            has_in = {v for u in alive for v in succ[u] if v in alive}
            for u in list(alive):
                if u not in has_in or not (succ[u] & alive):
                    alive.discard(u)
                    changed = True
        if not alive:
            raise EmptySubshift("empty subshift: no admissible bi-infinite point")
        self.states = sorted(alive, key=self._block_key)
        self._index = {s: i for i, s in enumerate(self.states)}
        self.succ = [sorted(self._index[v] for v in succ[s] if v in alive) for s in self.states]
        self.pred = [sorted(u for u in range(len(self.states)) if v in self.succ[u]) for v in range(len(self.states))]
        self._periodic_cache: dict = {}

    def _block_key(self, block):
        return tuple(self._sym[s] for s in block)

    @property
    def is_full(self) -> bool:
        return self.sft.is_full

    @property
    def size(self) -> int:
        return len(self.states)

    def matrix(self) -> list:
        n = self.size
        return [[int(j in self.succ[i]) for j in range(n)] for i in range(n)]

    # constrained path search over positions lo..hi

    def _layers(self, lo: int, hi: int, constraints: Mapping):
        k = self.m - 1
        hi = max(hi, lo + k - 1)
        count = hi - lo - k + 2
        def ok(v, i):
            block = self.states[v]
            for j in range(k):
                want = constraints.get(i + j)
                if want is not None and want != block[j]:
                    return False
            return True
        layers = [None] * count
        layers[-1] = {v for v in range(self.size) if ok(v, lo + count - 1)}
        for t in range(count - 2, -1, -1):
            nxt = layers[t + 1]
            layers[t] = {v for v in range(self.size) if ok(v, lo + t) and any(w in nxt for w in self.succ[v])}
        return lo, hi, layers

    def _first_word(self, lo, hi, constraints) -> tuple | None:
        lo, hi, layers = self._layers(lo, hi, constraints)
        if not layers[0]:
            return None
        v = min(layers[0])
        word = list(self.states[v])
        for t in range(1, len(layers)):
            v = min(w for w in self.succ[v] if w in layers[t])
            word.append(self.states[v][-1])
        return tuple(word[: hi - lo + 1])

    def _count_words(self, lo, hi, constraints, cap: int) -> int:
        lo, hi, layers = self._layers(lo, hi, constraints)
        counts = {v: 1 for v in layers[-1]}
        for t in range(len(layers) - 2, -1, -1):
            counts = {v: min(cap, sum(counts.get(w, 0) for w in self.succ[v])) for v in layers[t]}
        return min(cap, sum(counts.values()))

    def _all_words(self, lo, hi, constraints) -> list:
        lo, hi, layers = self._layers(lo, hi, constraints)
        out = []
        def walk(t, v, acc):
            if t == len(layers) - 1:
                out.append(tuple(acc[: hi - lo + 1]))
                return
            for w in self.succ[v]:
                if w in layers[t + 1]:
                    walk(t + 1, w, acc + [self.states[w][-1]])
        for v in sorted(layers[0]):
            walk(0, v, list(self.states[v]))
        return out

    # the space interface shared with FullShiftSpace

    def window(self, n: int) -> tuple:
        return scale_window(self.group, n)

    def cylinders(self, window: Sequence) -> list:
        """Admissible patterns on ``window`` (nonempty cylinders), aligned with the window."""
        window = tuple(window)
        lo, hi = min(window), max(window)
        words = self._all_words(lo, hi, {})
        out = sorted({tuple(w[p - lo] for p in window) for w in words}, key=self._block_key)
        return out

    def extends(self, pattern: Pattern) -> bool:
        if not pattern:
            return True
        if any(s not in self._sym for s in pattern.values()):
            return False
        return self._first_word(min(pattern), max(pattern), pattern) is not None

    def contains(self, x) -> bool:
        allowed = self.sft.allowed
        m = self.m
        if isinstance(x, PeriodicConfiguration):
            w = x.values
            n = len(w)
            return all(tuple(w[(i + j) % n] for j in range(m)) in allowed for i in range(n))
        if not self.contains(x.background):
            return False
        marks = x.support()
        if x.left is not None:
            if not self.contains(x.left):
                return False
            marks = marks + [x.cut]
        if not marks:
            return True
        return all(tuple(x(i + j) for j in range(m)) in allowed
                   for i in range(min(marks) - m + 1, max(marks) + 1))

    def realize(self, background, constraints: Pattern, max_slack: int | None = None):
        """A point of the subshift matching ``constraints`` and equal to ``background`` off a finite interval.

        Patches grow outward from the positions where the constraints disagree
        with the background; the lexicographically first patch word is used.
        """
        diff = [p for p, s in constraints.items() if background(p) != s]
        if not diff:
            return background
        if any(s not in self._sym for s in constraints.values()):
            return None
        k = self.m - 1
        a0, b0 = min(diff), max(diff)
        if max_slack is None:
            max_slack = 2 * self.size + self.m
        for slack in range(max_slack + 1):
            for left in range(slack + 1):
                a, b = a0 - left, b0 + slack - left
                fixed = {p: background(p) for p in itertools.chain(range(a - k, a), range(b + 1, b + k + 1))}
                for p, s in constraints.items():
                    if a <= p <= b:
                        fixed[p] = s
                    elif fixed.get(p, s) != s:
                        break
                else:
                    word = self._first_word(a - k, b + k, fixed)
                    if word is not None:
                        patch = {a - k + i: s for i, s in enumerate(word) if a <= a - k + i <= b}
                        return _overlay(background, patch)
        return self._splice(background, constraints)

    def _splice(self, background, constraints: Pattern):
        """Fallback for ``realize``: keep one periodic tail of the background if possible, else grow fresh tails."""
        k = self.m - 1
        lo, hi = min(constraints), max(constraints)
        keepable = isinstance(background, PeriodicConfiguration)
        for keep_right, keep_left in ((True, False), (False, True), (False, False)):
            if (keep_right or keep_left) and not keepable:
                continue
            fixed = dict(constraints)
            tail_ok = True
            for side, rng in ((keep_right, range(hi + 1, hi + k + 1)), (keep_left, range(lo - k, lo))):
                if side:
                    for p in rng:
                        tail_ok &= fixed.setdefault(p, background(p)) == background(p)
            if not tail_ok:
                continue
            a, b = min(fixed), max(fixed)
            word = self._first_word(a, b, fixed)
            if word is None:
                continue
            cells = {a + i: s for i, s in enumerate(word)}
            first, last = self._index[word[:k]], self._index[word[-k:]]
            left = background if keep_left else self._tail_cycle(first, a, cells, -1)
            right = background if keep_right else self._tail_cycle(last, b - k + 1, cells, +1)
            lo_cell = min(cells)
            return CylinderConfiguration(tuple(cells.items()), right, left, lo_cell)
        return None

    def _tail_cycle(self, v: int, start: int, cells: dict, step: int) -> PeriodicConfiguration:
        """Walk first neighbours from block ``v`` (at ``start``) until a block repeats; record the walk in ``cells``.

        Returns the periodic configuration that continues the repeating part forever in direction ``step``.
        """
        nbrs = self.succ if step > 0 else self.pred
        seen = {v: start}
        pos = start
        while True:
            v = nbrs[v][0]
            pos += step
            for j, s in enumerate(self.states[v]):
                cells.setdefault(pos + j, s)
            if v in seen:
                period = abs(pos - seen[v])
                lo = min(pos, seen[v])
                word = [cells[lo + j] for j in range(period)]
                return periodic_word([word[(j - lo) % period] for j in range(period)], self.group)
            seen[v] = pos

    def periodic_words(self, n: int) -> list:
        """Words ``w`` of length n with ``w^∞`` in the subshift, lexicographically ordered."""
        if n < 1:
            raise ShiftError("period must be positive")
        if n in self._periodic_cache:
            return self._periodic_cache[n]
        out = []
        def walk(start, v, depth, acc):
            if depth == n:
                if v == start:
                    out.append(tuple(acc))
                return
            for w in self.succ[v]:
                walk(start, w, depth + 1, acc + [self.states[v][0]])
        for s in range(self.size):
            walk(s, s, 0, [])
        words = sorted(set(out), key=self._block_key)
        self._periodic_cache[n] = words
        return words

    def periodic_in_cylinder(self, pattern: Pattern, period_bound: int):
        for p in range(1, period_bound + 1):
            for w in self.periodic_words(p):
                if all(w[pos % p] == s for pos, s in pattern.items()):
                    x = periodic_word(w, self.group)
                    return x, x.period
        return None, None

    def sample_points(self, scale: int) -> list:
        seen, out = set(), []
        for p in range(1, scale + 1):
            for w in self.periodic_words(p):
                x = periodic_word(w, self.group)
                if x not in seen:
                    seen.add(x)
                    out.append(x)
        return sorted(out, key=lambda x: (x.period, self._block_key(x.values)))

    def to_json(self) -> dict:
        return self.sft.to_json()


def _overlay(base, patch: Mapping):
    if isinstance(base, PeriodicConfiguration):
        return CylinderConfiguration(tuple(patch.items()), base)
    merged = dict(base.pattern)
    merged.update(patch)
    return CylinderConfiguration(tuple(merged.items()), base.background, base.left, base.cut)


class FullShiftSpace:
    """The full shift ``A^G`` over any supported group."""

    def __init__(self, group: Group, alphabet: Sequence, max_degree: int = 6):
        self.group = group
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise ShiftError("alphabet symbols must be distinct and non-empty")
        self.max_degree = max_degree
        self.sft = SubshiftOfFiniteType.full(group, self.alphabet)
        self._separators: dict = {}

    is_full = True

    def window(self, n: int) -> tuple:
        return scale_window(self.group, n)

    def cylinders(self, window: Sequence) -> list:
        return list(itertools.product(self.alphabet, repeat=len(tuple(window))))

    def extends(self, pattern: Pattern) -> bool:
        return all(s in self.alphabet for s in pattern.values())

    def contains(self, x) -> bool:
        if isinstance(x, PeriodicConfiguration):
            return all(s in self.alphabet for s in x.values)
        return self.contains(x.background) and all(s in self.alphabet for _, s in x.pattern)

    def realize(self, background, constraints: Pattern, max_slack=None):
        if not self.extends(constraints):
            return None
        patch = {p: s for p, s in constraints.items() if background(p) != s}
        return _overlay(background, patch) if patch else background

    def separating_subgroup(self, domain: Sequence) -> FiniteIndexSubgroup:
        key = tuple(domain)
        if key not in self._separators:
            self._separators[key] = separating_subgroup(self.group, list(domain), self.max_degree)
        return self._separators[key]

    def periodic_in_cylinder(self, pattern: Pattern, period_bound: int):
        """A periodic point through the cylinder, with its orbit size (``None`` past the bound)."""
        domain = sorted(pattern, key=self.group.sort_key)
        h = self.separating_subgroup(domain)
        by_coset = {}
        for w in domain:
            by_coset.setdefault(h.coset_index(w), pattern[w])
        values = tuple(by_coset.get(i, self.alphabet[0]) for i in range(h.index))
        x = PeriodicConfiguration(h, values)
        orbit = orbit_bounded(ShiftAction(self.group), x, period_bound)
        return x, (None if isinstance(orbit, OrbitOverflow) else len(orbit))

    def sample_points(self, scale: int) -> list:
        if isinstance(self.group, Integers):
            seen, out = set(), []
            for p in range(1, scale + 1):
                for w in itertools.product(self.alphabet, repeat=p):
                    x = periodic_word(w, self.group)
                    if x not in seen:
                        seen.add(x)
                        out.append(x)
            idx = {s: i for i, s in enumerate(self.alphabet)}
            return sorted(out, key=lambda x: (x.period, tuple(idx[s] for s in x.values)))
        out = [constant(self.group, s) for s in self.alphabet]
        if scale >= 2:
            window = self.window(2)
            for word in self.cylinders(window):
                x, _ = self.periodic_in_cylinder(dict(zip(window, word)), 1)
                if x not in out:
                    out.append(x)
        return out

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "alphabet": list(self.alphabet), "forbidden": []}


def space_for(sft: SubshiftOfFiniteType):
    """The verifier-facing space for a subshift: full shifts over any group, SFTs over Z."""
    if sft.is_full:
        return FullShiftSpace(sft.group, sft.alphabet)
    if isinstance(sft.group, Integers):
        return ZSftSpace(sft)
    raise ShiftError("verdict pipelines support full shifts and subshifts of finite type over the integers")


# -- Z-SFT analyses --------------------------------------------------------


def _bool_mul(a, b):
    n = len(a)
    return [[any(a[i][k] and b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _shortest_paths(succ: Sequence[Sequence[int]]) -> dict:
    paths = {}
    for i in range(len(succ)):
        # paths of length >= 1, so the entry (i, i) is a cycle through i
        prev = {}
        queue = deque()
        for w in succ[i]:
            if w not in prev:
                prev[w] = i
                queue.append(w)
        while queue:
            v = queue.popleft()
            for w in succ[v]:
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        for j in prev:
            path = [j]
            cur = j
            while True:
                cur = prev[cur]
                path.append(cur)
                if cur == i:
                    break
            paths[(i, j)] = path[::-1]
    return paths


def analyze_z_sft(sft: SubshiftOfFiniteType) -> ZSftAnalysis:
    space = sft if isinstance(sft, ZSftSpace) else ZSftSpace(sft)
    n = space.size
    paths = _shortest_paths(space.succ)
    strongly = all((i, j) in paths for i in range(n) for j in range(n))
    mat = space.matrix()
    gap = None
    if strongly:
        power = [[bool(v) for v in row] for row in mat]
        for k in range(1, (n - 1) ** 2 + 2):
            if all(all(row) for row in power):
                gap = k
                break
            power = _bool_mul(power, mat)
    return ZSftAnalysis(space.states, mat, strongly, gap is not None, gap, paths)


def transition_trace(sft, n: int) -> int:
    """``trace(A^n)`` of the block-graph matrix, in exact integer arithmetic."""
    space = sft if isinstance(sft, ZSftSpace) else ZSftSpace(sft)
    a = space.matrix()
    size = len(a)
    p = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(n):
        p = [[sum(p[i][k] * a[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
    return sum(p[i][i] for i in range(size))


def enumerate_periodic(sft, n: int) -> list:
    """All points whose period divides n, one per closed walk of length n."""
    space = sft if isinstance(sft, ZSftSpace) else ZSftSpace(sft)
    return [periodic_word(w, space.group) for w in space.periodic_words(n)]


@dataclass
class DensityReport:
    scale: int
    period_bound: int
    entries: list

    @property
    def passed(self) -> bool:
        return all(e["found"] for e in self.entries)

    @property
    def gaps(self) -> list:
        return [e["word"] for e in self.entries if not e["found"]]

    def to_json(self) -> dict:
        return {"scale": self.scale, "period_bound": self.period_bound, "passed": self.passed,
                "entries": self.entries}


def periodic_density_at_scale(sft, n: int, period_bound: int) -> DensityReport:
    space = sft if isinstance(sft, ZSftSpace) else ZSftSpace(sft)
    window = scale_window(space.group, n)
    entries = []
    for word in space.cylinders(window):
        x, period = space.periodic_in_cylinder(dict(zip(window, word)), period_bound)
        entries.append({"word": "".join(map(str, word)), "found": x is not None,
                        "period": period, "witness": None if x is None else "".join(map(str, x.values))})
    return DensityReport(n, period_bound, entries)


def isolated_cylinders(sft, n: int, extension_bound: int | None = None) -> list:
    """Scale-n cylinders with a single admissible extension at every larger scale tried."""
    space = sft if isinstance(sft, ZSftSpace) else ZSftSpace(sft)
    if extension_bound is None:
        extension_bound = space.size + space.m
    window = scale_window(space.group, n)
    lonely = []
    for word in space.cylinders(window):
        fixed = dict(zip(window, word))
        if not any(space._count_words(-k, n - 1 + k, fixed, 2) >= 2 for k in range(1, extension_bound + 1)):
            lonely.append(word)
    return lonely


def is_perfect_at_scale(sft, n: int, extension_bound: int | None = None) -> bool:
    return not isolated_cylinders(sft, n, extension_bound)
