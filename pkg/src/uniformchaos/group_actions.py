"""Finitely described groups, desk-scale balls, orbits, cosets and finite quotients.

Infinite groups are only ever explored through balls of bounded word length
with respect to a fixed generating set: ``{1}`` for the integers, the unit
vectors for lattices and the free basis for free groups.  A finite-table group
is generated by all of its elements, so its ball of any radius is the group.

Elements are plain Python values:

* integers: ``int``
* lattice(d): ``tuple`` of d ints
* free(k): reduced ``tuple`` of nonzero ints, ``i`` for the i-th generator
  and ``-i`` for its inverse (1-based)
* finite-table: ``int`` row index of the Cayley table
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Sequence

from .relation_algebra import Carrier


class GroupError(ValueError):
    pass


class CosetClosureError(GroupError):
    pass


class NoWitnessFound(GroupError):
    pass


# -- groups ----------------------------------------------------------------


class Group:
    kind: str = ""

    @property
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def generators(self) -> tuple:
        raise NotImplementedError

    def word_length(self, g) -> int:
        raise NotImplementedError

    def ball(self, radius: int) -> list:
        raise NotImplementedError

    def sort_key(self, g):
        return (self.word_length(g), g)

    @property
    def is_finite(self) -> bool:
        return False

    def word(self, g) -> list:
        """Write ``g`` as a product ``s1 s2 ... sk`` of generators and their inverses.

        Returned as a list of ``(generator, exponent)`` with exponent in {1, -1}.
        """
        raise NotImplementedError

    def element_to_json(self, g) -> Any:
        return g

    def element_from_json(self, doc) -> Any:
        return doc

    def format(self, g) -> str:
        return str(g)

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Integers(Group):
    kind = "integers"

    @property
    def identity(self):
        return 0

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def generators(self):
        return (1,)

    def word_length(self, g):
        return abs(g)

    def ball(self, radius):
        out = [0]
        for k in range(1, radius + 1):
            out += [k, -k]
        return out

    def sort_key(self, g):
        return (abs(g), g < 0)

    def word(self, g):
        return [(1, 1 if g > 0 else -1)] * abs(g)

    def element_from_json(self, doc):
        if isinstance(doc, bool) or not isinstance(doc, int):
            raise GroupError(f"integer element expected, got {doc!r}")
        return doc


@dataclass(frozen=True)
class Lattice(Group):
    dimension: int
    kind = "lattice"

    def __post_init__(self):
        if self.dimension < 1:
            raise GroupError("lattice dimension must be positive")

    @property
    def identity(self):
        return (0,) * self.dimension

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def generators(self):
        return tuple(tuple(int(i == j) for j in range(self.dimension)) for i in range(self.dimension))

    def word_length(self, g):
        return sum(abs(a) for a in g)

    def sort_key(self, g):
        return (self.word_length(g), tuple(-abs(a) for a in g), tuple(a < 0 for a in g))

    def ball(self, radius):
        pts = [v for v in itertools.product(range(-radius, radius + 1), repeat=self.dimension)
               if self.word_length(v) <= radius]
        return sorted(pts, key=self.sort_key)

    def word(self, g):
        out = []
        for i, a in enumerate(g):
            gen = self.generators()[i]
            out += [(gen, 1 if a > 0 else -1)] * abs(a)
        return out

    def element_to_json(self, g):
        return list(g)

    def element_from_json(self, doc):
        g = tuple(int(a) for a in doc)
        if len(g) != self.dimension:
            raise GroupError(f"lattice element of dimension {self.dimension} expected, got {doc!r}")
        return g

    def format(self, g):
        return "(" + ",".join(map(str, g)) + ")"

    def to_json(self):
        return {"kind": self.kind, "dimension": self.dimension}


_LETTER = re.compile(r"([a-zA-Z])(\^-1|⁻¹)?")


@dataclass(frozen=True)
class FreeGroup(Group):
    rank: int
    kind = "free"

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise GroupError("free group rank must be between 1 and 26")

    @property
    def identity(self):
        return ()

    @staticmethod
    def reduce(letters: Iterable[int]) -> tuple:
        stack = []
        for l in letters:
            if stack and stack[-1] == -l:
                stack.pop()
            else:
                stack.append(l)
        return tuple(stack)

    def mul(self, g, h):
        return self.reduce(g + h)

    def inv(self, g):
        return tuple(-l for l in reversed(g))

    def letters(self) -> tuple:
        out = []
        for i in range(1, self.rank + 1):
            out += [i, -i]
        return tuple(out)

    def generators(self):
        return tuple((i,) for i in range(1, self.rank + 1))

    def word_length(self, g):
        return len(g)

    def sort_key(self, g):
        order = {l: k for k, l in enumerate(self.letters())}
        return (len(g), tuple(order[l] for l in g))

    def ball(self, radius):
        level = [()]
        out = [()]
        for _ in range(radius):
            nxt = []
            for w in level:
                for l in self.letters():
                    if w and w[-1] == -l:
                        continue
                    nxt.append(w + (l,))
            level = nxt
            out += nxt
        return out

    def word(self, g):
        return [((abs(l),), 1 if l > 0 else -1) for l in g]

    def format(self, g):
        if not g:
            return "e"
        return "".join(chr(ord("a") + l - 1) if l > 0 else chr(ord("A") - l - 1) for l in g)

    def parse(self, text: str) -> tuple:
        """Parse ``"abAB"``, ``"aba^-1b^-1"`` or ``"aba⁻¹b⁻¹"``; ``"e"`` or ``""`` is the identity."""
        text = text.replace(" ", "")
        if text in ("", "e", "ε"):
            return ()
        letters = []
        pos = 0
        while pos < len(text):
            m = _LETTER.match(text, pos)
            if not m:
                raise GroupError(f"cannot parse free-group word {text!r}")
            ch, inverse = m.group(1), m.group(2)
            gen = ord(ch.lower()) - ord("a") + 1
            if gen > self.rank:
                raise GroupError(f"letter {ch!r} exceeds rank {self.rank}")
            sign = -1 if ch.isupper() else 1
            if inverse:
                sign = -sign
            letters.append(sign * gen)
            pos = m.end()
        return self.reduce(letters)

    def element_to_json(self, g):
        return self.format(g)

    def element_from_json(self, doc):
        if not isinstance(doc, str):
            raise GroupError(f"free-group element must be a word string, got {doc!r}")
        return self.parse(doc)

    def to_json(self):
        return {"kind": self.kind, "rank": self.rank}


@dataclass(frozen=True)
class FiniteGroup(Group):
    table: tuple
    kind = "finite-table"

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise GroupError("Cayley table must be a non-empty square matrix")
        if any(not 0 <= v < n for row in table for v in row):
            raise GroupError("Cayley table entries out of range")
        object.__setattr__(self, "table", table)
        ids = [e for e in range(n) if all(table[e][g] == g and table[g][e] == g for g in range(n))]
        if not ids:
            raise GroupError("Cayley table has no identity")
        e = ids[0]
        for g in range(n):
            if not any(table[g][h] == e for h in range(n)):
                raise GroupError(f"element {g} has no inverse")
        for a in range(n):
            for b in range(n):
                ab = table[a][b]
                for c in range(n):
                    if table[ab][c] != table[a][table[b][c]]:
                        raise GroupError(f"Cayley table is not associative at ({a}, {b}, {c})")

    @classmethod
    def cyclic(cls, n: int) -> FiniteGroup:
        return cls(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))

    @classmethod
    def symmetric(cls, degree: int) -> FiniteGroup:
        perms = list(itertools.permutations(range(degree)))
        index = {p: i for i, p in enumerate(perms)}
        return cls(tuple(tuple(index[tuple(p[q[k]] for k in range(degree))] for q in perms) for p in perms))

    @property
    def order(self) -> int:
        return len(self.table)

    @cached_property
    def _identity(self):
        n = self.order
        return next(e for e in range(n) if all(self.table[e][g] == g for g in range(n)))

    @property
    def identity(self):
        return self._identity

    def mul(self, g, h):
        return self.table[g][h]

    def inv(self, g):
        e = self.identity
        return next(h for h in range(self.order) if self.table[g][h] == e)

    def generators(self):
        return tuple(g for g in range(self.order) if g != self.identity)

    def word_length(self, g):
        return 0 if g == self.identity else 1

    def ball(self, radius):
        return sorted(range(self.order), key=self.sort_key)

    @property
    def is_finite(self):
        return True

    def word(self, g):
        return [] if g == self.identity else [(g, 1)]

    def element_from_json(self, doc):
        if not isinstance(doc, int) or not 0 <= doc < self.order:
            raise GroupError(f"finite-table element out of range: {doc!r}")
        return doc

    def to_json(self):
        return {"kind": self.kind, "table": [list(r) for r in self.table]}


def group_from_json(doc: dict) -> Group:
    kind = doc.get("kind")
    if kind == "integers":
        return Integers()
    if kind == "lattice":
        return Lattice(int(doc["dimension"]))
    if kind == "free":
        return FreeGroup(int(doc["rank"]))
    if kind == "finite-table":
        return FiniteGroup(tuple(tuple(r) for r in doc["table"]))
    raise GroupError(f"unknown group kind {kind!r}")


def ball_enumerate(group: Group, radius: int) -> list:
    if radius < 0:
        raise GroupError("radius must be nonnegative")
    return group.ball(radius)


def power(group: Group, g, n: int):
    out = group.identity
    base = g if n >= 0 else group.inv(g)
    for _ in range(abs(n)):
        out = group.mul(out, base)
    return out


# -- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class OrbitOverflow:
    bound: int


class ActionTable:
    """Action of a group on a finite carrier, given by permutations for the generators.

    ``act(g, x)`` writes ``g`` as a word in the generators and applies the
    images right to left, so the composition law holds by construction for
    the infinite kinds; finite tables are checked on all pairs.
    """

    def __init__(self, group: Group, carrier: Carrier, images: dict):
        self.group = group
        self.carrier = carrier
        self.images = {}
        n = carrier.size
        for gen, perm in images.items():
            perm = tuple(carrier.index(p) for p in perm)
            if sorted(perm) != list(range(n)):
                raise GroupError(f"image of generator {group.format(gen)} is not a permutation")
            self.images[gen] = perm
        self._inverse = {}
        for gen, perm in self.images.items():
            inv = [0] * n
            for i, j in enumerate(perm):
                inv[j] = i
            self._inverse[gen] = tuple(inv)
        if group.is_finite and len(self.images) == len(group.generators()):
            for g in range(group.order):
                for h in range(group.order):
                    for x in carrier.points:
                        if self.act(g, self.act(h, x)) != self.act(group.mul(g, h), x):
                            raise GroupError("finite-table action is not a homomorphism")

    @classmethod
    def from_function(cls, group: Group, carrier: Carrier, fn: Callable) -> ActionTable:
        return cls(group, carrier, {s: tuple(fn(s, x) for x in carrier.points) for s in group.generators()})

    def _perm(self, gen, exponent):
        table = self.images if exponent > 0 else self._inverse
        try:
            return table[gen]
        except KeyError:
            raise GroupError(
                f"action table missing image for generator {self.group.format(gen)}") from None

    def act_index(self, g, i: int) -> int:
        for gen, exponent in reversed(self.group.word(g)):
            i = self._perm(gen, exponent)[i]
        return i

    def act(self, g, x):
        return self.carrier.points[self.act_index(g, self.carrier.index(x))]

    def check(self, radius: int) -> bool:
        """The action laws on the ball of the given radius."""
        ball = self.group.ball(radius)
        for x in self.carrier.points:
            if self.act(self.group.identity, x) != x:
                return False
            for g in ball:
                for h in ball:
                    if self.act(g, self.act(h, x)) != self.act(self.group.mul(g, h), x):
                        return False
        return True

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "carrier": list(self.carrier.points),
            "generators": [[self.group.element_to_json(g), [self.carrier.points[i] for i in perm]]
                           for g, perm in self.images.items()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> ActionTable:
        group = group_from_json(doc["group"])
        carrier = Carrier(tuple(doc["carrier"]))
        images = {group.element_from_json(g): tuple(perm) for g, perm in doc["generators"]}
        return cls(group, carrier, images)


def orbit_bounded(action, x, bound: int):
    """Orbit of ``x`` in discovery order, or :class:`OrbitOverflow` past ``bound`` points.

    ``action`` is anything with ``group`` and ``act(g, x)``; points must be hashable.
    """
    if bound < 1:
        raise GroupError("bound must be positive")
    group = action.group
    moves = [g for s in group.generators() for g in (s, group.inv(s))]
    seen = {x}
    order = [x]
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for s in moves:
            z = action.act(s, y)
            if z not in seen:
                if len(order) >= bound:
                    return OrbitOverflow(bound)
                seen.add(z)
                order.append(z)
                queue.append(z)
    return tuple(order)


def is_periodic(action, x, bound: int) -> bool:
    return not isinstance(orbit_bounded(action, x, bound), OrbitOverflow)


def stabilizer_index(action, x, bound: int = 10_000):
    """Index of the stabilizer (the orbit size), or ``None`` when the orbit overflows."""
    orbit = orbit_bounded(action, x, bound)
    if isinstance(orbit, OrbitOverflow):
        return None
    return len(orbit)


# -- finite-index subgroups ------------------------------------------------


def _perm_mul(p: tuple, q: tuple) -> tuple:
    return tuple(p[i] for i in q)


def _perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True)
class FiniteIndexSubgroup:
    """A finite-index subgroup described by a coset key.

    ``key(g) == key(g')`` iff ``g`` and ``g'`` lie in the same left coset.  For
    the kernels used as periodicity lattices the key is a homomorphism into a
    finite group; a stabilizer uses ``key(g) = g·x``.
    """

    group: Group
    kind: str
    params: tuple = ()
    key_fn: Callable | None = field(default=None, compare=False, repr=False)
    max_index: int = field(default=100_000, compare=False, repr=False)

    def key(self, g) -> Hashable:
        k = self.kind
        if k == "whole":
            return 0
        if k == "trivial":
            return g
        if k == "modular":
            if isinstance(self.group, Integers):
                return (g % self.params[0],)
            return tuple(a % m for a, m in zip(g, self.params))
        if k == "permutation":
            degree, images = self.params
            p = tuple(range(degree))
            for gen, exponent in self.group.word(g):
                img = images[self.group.generators().index(gen)]
                p = _perm_mul(p, img if exponent > 0 else _perm_inv(img))
            return p
        if k == "intersection":
            return tuple(h.key(g) for h in self.params)
        if self.key_fn is not None:
            return self.key_fn(g)
        raise GroupError(f"subgroup kind {k!r} has no key")

    def contains(self, g) -> bool:
        return self.key(g) == self.key(self.group.identity)

    @cached_property
    def _cosets(self) -> tuple:
        reps, keys = _coset_bfs(self.group, self.key, self.max_index)
        return reps, {k: i for i, k in enumerate(keys)}

    @property
    def representatives(self) -> list:
        return list(self._cosets[0])

    @property
    def index(self) -> int:
        return len(self._cosets[0])

    def coset_index(self, g) -> int:
        return self._cosets[1][self.key(g)]

    def to_json(self) -> dict:
        k = self.kind
        if k == "modular":
            return {"kind": k, "moduli": list(self.params)}
        if k == "permutation":
            return {"kind": k, "degree": self.params[0], "images": [list(p) for p in self.params[1]]}
        if k == "intersection":
            return {"kind": k, "parts": [h.to_json() for h in self.params]}
        if k in ("whole", "trivial"):
            return {"kind": k}
        raise GroupError(f"subgroup kind {k!r} does not serialize")


def _coset_bfs(group: Group, key: Callable, limit: int):
    # left multiplication by generators is well defined on left cosets; positive
    # generators suffice because each acts as a permutation of finitely many cosets
    e = group.identity
    reps, keys = [e], [key(e)]
    seen = {keys[0]}
    queue = deque([e])
    while queue:
        g = queue.popleft()
        for s in group.generators():
            h = group.mul(s, g)
            k = key(h)
            if k not in seen:
                if len(reps) >= limit:
                    raise CosetClosureError(f"coset enumeration exceeded {limit} cosets")
                seen.add(k)
                reps.append(h)
                keys.append(k)
                queue.append(h)
    return tuple(reps), tuple(keys)


def subgroup_from_json(group: Group, doc: dict) -> FiniteIndexSubgroup:
    k = doc["kind"]
    if k in ("whole", "trivial"):
        return FiniteIndexSubgroup(group, k)
    if k == "modular":
        return modular_subgroup(group, doc["moduli"])
    if k == "permutation":
        return permutation_kernel(group, [tuple(p) for p in doc["images"]])
    if k == "intersection":
        return intersect_subgroups([subgroup_from_json(group, d) for d in doc["parts"]])
    raise GroupError(f"unknown subgroup kind {k!r}")


def whole_group(group: Group) -> FiniteIndexSubgroup:
    return FiniteIndexSubgroup(group, "whole")


def trivial_subgroup(group: Group) -> FiniteIndexSubgroup:
    if not group.is_finite:
        raise GroupError("the trivial subgroup has infinite index here")
    return FiniteIndexSubgroup(group, "trivial")


def modular_subgroup(group: Group, moduli) -> FiniteIndexSubgroup:
    if isinstance(moduli, int):
        moduli = (moduli,)
    moduli = tuple(int(m) for m in moduli)
    if any(m < 1 for m in moduli):
        raise GroupError("moduli must be positive")
    if isinstance(group, Integers):
        if len(moduli) != 1:
            raise GroupError("the integers take a single modulus")
    elif isinstance(group, Lattice):
        if len(moduli) != group.dimension:
            raise GroupError("one modulus per lattice coordinate")
    else:
        raise GroupError("modular subgroups need the integers or a lattice")
    return FiniteIndexSubgroup(group, "modular", moduli)


def permutation_kernel(group: Group, images: Sequence[tuple]) -> FiniteIndexSubgroup:
    """Kernel of the homomorphism sending the i-th generator to ``images[i]``."""
    images = tuple(tuple(p) for p in images)
    if len(images) != len(group.generators()):
        raise GroupError("one permutation per generator is required")
    degree = len(images[0]) if images else 0
    if any(sorted(p) != list(range(degree)) for p in images):
        raise GroupError("images must be permutations of a common degree")
    return FiniteIndexSubgroup(group, "permutation", (degree, images))


def intersect_subgroups(parts: Sequence[FiniteIndexSubgroup]) -> FiniteIndexSubgroup:
    parts = tuple(parts)
    if not parts:
        raise GroupError("nothing to intersect")
    if len(parts) == 1:
        return parts[0]
    return FiniteIndexSubgroup(parts[0].group, "intersection", parts)


def stabilizer_subgroup(action, x) -> FiniteIndexSubgroup:
    return FiniteIndexSubgroup(action.group, "stabilizer", (repr(x),),
                               key_fn=lambda g: action.act(g, x))


def coset_representatives(group: Group, subgroup: FiniteIndexSubgroup) -> list:
    """One representative per left coset, the identity first; found breadth-first."""
    if subgroup.group != group:
        raise GroupError("subgroup belongs to another group")
    return subgroup.representatives


def _permutation_search(group: FreeGroup, words: Sequence[tuple], max_degree: int):
    for degree in range(2, max_degree + 1):
        perms = list(itertools.permutations(range(degree)))
        ident = tuple(range(degree))
        for images in itertools.product(perms, repeat=group.rank):
            probe = FiniteIndexSubgroup(group, "permutation", (degree, images))
            if all(probe.key(w) != ident for w in words):
                return probe
    return None


def residually_finite_witness(group: Group, g, max_degree: int = 6) -> FiniteIndexSubgroup:
    """A finite-index normal subgroup that does not contain ``g``."""
    if g == group.identity:
        raise GroupError("the identity lies in every subgroup")
    if isinstance(group, Integers):
        return modular_subgroup(group, abs(g) + 1)
    if isinstance(group, Lattice):
        return modular_subgroup(group, tuple(abs(a) + 1 for a in g))
    if isinstance(group, FiniteGroup):
        return trivial_subgroup(group)
    if isinstance(group, FreeGroup):
        found = _permutation_search(group, [g], max_degree)
        if found is None:
            raise NoWitnessFound(f"no permutation quotient of degree <= {max_degree} detects {group.format(g)}")
        return found
    raise GroupError(f"no witness construction for {group.kind}")


def separating_subgroup(group: Group, elements: Sequence, max_degree: int = 6) -> FiniteIndexSubgroup:
    """A finite-index normal subgroup whose cosets separate the given elements.

    Built from residual-finiteness witnesses of the pairwise quotients ``g⁻¹g'``;
    for free groups a single permutation quotient detecting all of them is
    searched first, falling back to intersecting one witness per quotient.
    """
    elements = list(dict.fromkeys(elements))
    if len(elements) <= 1:
        return whole_group(group)
    if isinstance(group, Integers):
        return modular_subgroup(group, max(elements) - min(elements) + 1)
    if isinstance(group, Lattice):
        return modular_subgroup(group, tuple(
            max(v[i] for v in elements) - min(v[i] for v in elements) + 1 for i in range(group.dimension)))
    if isinstance(group, FiniteGroup):
        return trivial_subgroup(group)
    quotients = [group.mul(group.inv(a), b) for a, b in itertools.combinations(elements, 2)]
    if isinstance(group, FreeGroup):
        found = _permutation_search(group, quotients, max_degree)
        if found is not None:
            return found
    parts = []
    current = whole_group(group)
    for a, b in itertools.combinations(elements, 2):
        if current.key(a) == current.key(b):
            parts.append(residually_finite_witness(group, group.mul(group.inv(a), b), max_degree))
            current = intersect_subgroups(parts)
    return current
