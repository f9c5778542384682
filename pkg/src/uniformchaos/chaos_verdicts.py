"""Bounded-quantifier verifiers for the dynamical properties and sensitivity certificates.

Every verdict is a scale certificate: quantifiers over neighbourhoods run over
the basis levels ``1..scale``, quantifiers over the group run over the ball of
radius ``group_ball``, and periodic points are those with orbit size at most
``period_bound``.  A pass is evidence at that scale, not a proof about the
infinite system; each verdict records the parameters it used.

Two kinds of desk system are supported:

* :class:`ShiftSystem` -- a full shift or a Z-subshift of finite type with a
  finite sample of periodic configurations; the neighbourhoods of ``x`` at
  level k are the cylinders ``W(Ω_k)[x]``;
* :class:`FiniteSystem` -- a finite carrier with an action table and a uniform
  base; the neighbourhoods of ``x`` are the sections ``U[x]`` of base elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from .group_actions import (
    ActionTable,
    Group,
    NoWitnessFound,
    OrbitOverflow,
    orbit_bounded,
    residually_finite_witness,
    stabilizer_index,
    stabilizer_subgroup,
)
from .relation_algebra import (
    NotSeparable,
    Relation,
    UniformBase,
    base_from_json,
    base_to_json,
    compose,
    compose_power,
    is_hausdorff_base,
    relation_from_json,
    relation_to_json,
    section_indices,
    separating_entourage,
    symmetric_root,
)
from .shift_spaces import (
    FullShiftSpace,
    ProdiscreteEntourage,
    ShiftAction,
    ZSftSpace,
    configuration_from_json,
    configuration_to_json,
    isolated_cylinders,
    prodiscrete,
    sft_from_json,
    shift_apply,
    space_for,
    w_related,
)

DEFAULT_SCALE = 4
DEFAULT_BALL = 8
DEFAULT_PERIOD_BOUND = 12
MAX_CYLINDERS = 4096


class HypothesisError(ValueError):
    """A pipeline precondition is not evidenced at the given scale."""


# -- systems ---------------------------------------------------------------


@dataclass(eq=False)
class ShiftSystem:
    space: FullShiftSpace | ZSftSpace
    scale: int = DEFAULT_SCALE
    group_ball: int = DEFAULT_BALL
    period_bound: int = DEFAULT_PERIOD_BOUND
    points: tuple = ()

    def __post_init__(self):
        if min(self.scale, self.group_ball, self.period_bound) < 1:
            raise ValueError("scale, ball and period bound must be positive")
        if not self.points:
            self.points = tuple(self.space.sample_points(self.scale))
        self.points = tuple(self.points)
        for x in self.points:
            if not self.space.contains(x):
                raise ValueError(f"sample point {x!r} is not in the subshift")

    @property
    def group(self) -> Group:
        return self.space.group

    def window(self, level: int) -> tuple:
        return self.space.window(level)

    def levels(self) -> range:
        return range(1, self.scale + 1)

    def ball(self) -> list:
        return self.group.ball(self.group_ball)

    def parameters(self) -> dict:
        return {"scale": self.scale, "ball": self.group_ball, "period_bound": self.period_bound}

    def to_json(self) -> dict:
        return {"subshift": self.space.to_json(), "parameters": self.parameters(),
                "points": [configuration_to_json(x) for x in self.points]}


@dataclass(eq=False)
class FiniteSystem:
    action: ActionTable
    base: UniformBase
    group_ball: int = DEFAULT_BALL
    period_bound: int = DEFAULT_PERIOD_BOUND

    def __post_init__(self):
        if self.action.carrier != self.base.carrier:
            raise ValueError("action and base live on different carriers")

    @property
    def group(self) -> Group:
        return self.action.group

    @property
    def points(self) -> tuple:
        return self.action.carrier.points

    @property
    def scale(self) -> int:
        return len(self.base)

    def levels(self) -> range:
        return range(len(self.base))

    def ball(self) -> list:
        return self.group.ball(self.group_ball)

    def neighborhood(self, i: int, level: int) -> list[int]:
        return section_indices(self.base[level], i)

    def parameters(self) -> dict:
        return {"scale": len(self.base), "ball": self.group_ball, "period_bound": self.period_bound}

    def to_json(self) -> dict:
        doc = self.action.to_json()
        doc["base"] = base_to_json(self.base)["base"]
        return {"finite_system": doc, "parameters": self.parameters()}


DeskSystem = ShiftSystem | FiniteSystem


def system_from_json(doc: dict, scale=None, ball=None, period_bound=None) -> DeskSystem:
    """Build a desk system from the JSON system description; flags override the file."""
    if ("subshift" in doc) == ("finite_system" in doc):
        raise ValueError("exactly one of 'subshift' and 'finite_system' must be present")
    params = dict(doc.get("parameters", {}))
    for key in params:
        if key not in ("scale", "ball", "period_bound"):
            raise ValueError(f"unknown parameter {key!r}")
    for key, value in (("scale", scale), ("ball", ball), ("period_bound", period_bound)):
        if value is not None:
            params[key] = value
    for key, value in params.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ValueError(f"parameter {key!r} must be a positive integer")
    if "subshift" in doc:
        sft = sft_from_json(doc["subshift"])
        space = space_for(sft)
        points = tuple(configuration_from_json(space.group, p) for p in doc.get("points", []))
        return ShiftSystem(space, params.get("scale", DEFAULT_SCALE), params.get("ball", DEFAULT_BALL),
                           params.get("period_bound", DEFAULT_PERIOD_BOUND), points)
    fs = doc["finite_system"]
    for key in ("group", "carrier", "generators", "base"):
        if key not in fs:
            raise ValueError(f"finite_system is missing key {key!r}")
    action = ActionTable.from_json(fs)
    base = base_from_json({"carrier": fs["carrier"], "base": fs["base"]})
    return FiniteSystem(action, base, params.get("ball", DEFAULT_BALL),
                        params.get("period_bound", DEFAULT_PERIOD_BOUND))


# -- verdicts --------------------------------------------------------------


@dataclass
class Verdict:
    name: str
    passed: bool
    parameters: dict
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {"property": self.name, "passed": self.passed, "parameters": self.parameters, **self.details}


def _fmt_word(word) -> Any:
    if all(isinstance(s, str) and len(s) == 1 for s in word):
        return "".join(word)
    return list(word)


def _cylinders(system: ShiftSystem, level: int) -> tuple[tuple, list]:
    window = system.window(level)
    if len(system.space.alphabet) ** len(window) > MAX_CYLINDERS * 16:
        raise ValueError(f"scale {level} has too many cylinders to enumerate on this group")
    cyl = system.space.cylinders(window)
    if len(cyl) > MAX_CYLINDERS:
        raise ValueError(f"scale {level} has {len(cyl)} cylinders, above the enumeration limit")
    return window, cyl


def _meeting_pattern(group, window, u, w, g):
    """Pattern forcing ``x ∈ [u]`` and ``gx ∈ [w]``, or ``None`` on a clash."""
    pattern = dict(zip(window, u))
    gi = group.inv(g)
    for h, s in zip(window, w):
        pos = group.mul(gi, h)
        if pattern.setdefault(pos, s) != s:
            return None
    return pattern


def _translate_meets(system: ShiftSystem, window, u, w, g) -> bool:
    pattern = _meeting_pattern(system.group, window, u, w, g)
    return pattern is not None and system.space.extends(pattern)


def _finite_neighborhoods(system: FiniteSystem) -> list[tuple[int, int, frozenset]]:
    seen, out = set(), []
    for i in range(len(system.points)):
        for level in system.levels():
            nb = frozenset(system.neighborhood(i, level))
            if nb not in seen:
                seen.add(nb)
                out.append((i, level, nb))
    return out


def _finite_meets(system: FiniteSystem, n1, n2, g) -> bool:
    act = system.action.act_index
    return any(act(g, y) in n2 for y in n1)


def verify_transitivity(system: DeskSystem) -> Verdict:
    group = system.group
    table = []
    if isinstance(system, ShiftSystem):
        window, cyl = _cylinders(system, system.scale)
        for u in cyl:
            for w in cyl:
                hit = next((g for g in system.ball() if _translate_meets(system, window, u, w, g)), None)
                if hit is None:
                    return Verdict("transitive", False, system.parameters(),
                                   {"failing_pair": [_fmt_word(u), _fmt_word(w)]})
                table.append({"from": _fmt_word(u), "to": _fmt_word(w), "g": group.element_to_json(hit)})
        return Verdict("transitive", True, system.parameters(), {"witnesses": table})
    pts = system.points
    nbs = _finite_neighborhoods(system)
    for i, li, n1 in nbs:
        for j, lj, n2 in nbs:
            hit = next((g for g in system.ball() if _finite_meets(system, n1, n2, g)), None)
            if hit is None:
                return Verdict("transitive", False, system.parameters(),
                               {"failing_pair": [[pts[i], li], [pts[j], lj]]})
            table.append({"from": [pts[i], li], "to": [pts[j], lj], "g": group.element_to_json(hit)})
    return Verdict("transitive", True, system.parameters(), {"witnesses": table})


def verify_mixing(system: DeskSystem) -> Verdict:
    """Exceptional sets ``{g : gV ∩ W = ∅}`` per neighbourhood pair.

    For an infinite group the check passes when every exceptional set lies in
    the ball of radius ``group_ball // 2``, i.e. the outer half of the ball is
    exception-free for every pair.  Actions of finite groups always pass.
    """
    group = system.group
    clear = system.group_ball // 2
    exceptional = []
    passed = True
    if isinstance(system, ShiftSystem):
        window, cyl = _cylinders(system, system.scale)
        pairs = [(u, w, _fmt_word(u), _fmt_word(w)) for u in cyl for w in cyl]
        meets = lambda u, w, g: _translate_meets(system, window, u, w, g)
    else:
        pts = system.points
        nbs = _finite_neighborhoods(system)
        pairs = [(n1, n2, [pts[i], li], [pts[j], lj]) for i, li, n1 in nbs for j, lj, n2 in nbs]
        meets = lambda n1, n2, g: _finite_meets(system, n1, n2, g)
    for a, b, fa, fb in pairs:
        bad = [g for g in system.ball() if not meets(a, b, g)]
        if bad:
            exceptional.append({"from": fa, "to": fb, "exceptional": [group.element_to_json(g) for g in bad]})
            if not group.is_finite and max(group.word_length(g) for g in bad) > clear:
                passed = False
    details = {"clear_radius": clear, "finite_group": group.is_finite, "exceptional_sets": exceptional}
    return Verdict("mixing", passed, system.parameters(), details)


def verify_periodic_density(system: DeskSystem, period_bound: int | None = None) -> Verdict:
    bound = period_bound or system.period_bound
    params = dict(system.parameters(), period_bound=bound)
    gaps, found = [], []
    if isinstance(system, ShiftSystem):
        window, cyl = _cylinders(system, system.scale)
        for u in cyl:
            x, size = system.space.periodic_in_cylinder(dict(zip(window, u)), bound)
            if x is None or size is None or size > bound:
                gaps.append(_fmt_word(u))
            else:
                found.append({"cylinder": _fmt_word(u), "orbit_size": size})
        return Verdict("periodic_dense", not gaps, params, {"gaps": gaps, "periodic_points": found})
    pts = system.points
    sizes = [stabilizer_index(system.action, p, bound) for p in pts]
    for i, level, nb in _finite_neighborhoods(system):
        if not any(sizes[j] is not None for j in sorted(nb)):
            gaps.append([pts[i], level])
    return Verdict("periodic_dense", not gaps, params, {"gaps": gaps})


# -- sensitivity and expansivity --------------------------------------------


def _escapes(group, x, y, g, support) -> bool:
    """``(gx, gy) ∉ W(support)``, evaluated as ``x(g⁻¹h) != y(g⁻¹h)`` for h in the support."""
    gi = group.inv(g)
    return any(x(group.mul(gi, h)) != y(group.mul(gi, h)) for h in support)


def _difference_positions(system: ShiftSystem, support, exclude) -> list:
    group = system.group
    exclude = set(exclude)
    seen = set()
    for g in system.ball():
        gi = group.inv(g)
        for h in support:
            seen.add(group.mul(gi, h))
    return sorted(seen - exclude, key=group.sort_key)


def _shift_search(system: ShiftSystem, x, level: int, u: ProdiscreteEntourage):
    """First (y, g) with y in the level neighbourhood of x and (gx, gy) outside u."""
    group = system.group
    window = system.window(level)
    fixed = {w: x(w) for w in window}
    for q in _difference_positions(system, u.support, window):
        for c in system.space.alphabet:
            if c == x(q):
                continue
            y = system.space.realize(x, {**fixed, q: c})
            if y is None:
                continue
            for g in system.ball():
                if _escapes(group, x, y, g, u.support):
                    return y, g
    return None


def _finite_search(system: FiniteSystem, i: int, level: int, u: Relation):
    act = system.action.act_index
    for j in system.neighborhood(i, level):
        for g in system.ball():
            if (act(g, i), act(g, j)) not in u:
                return j, g
    return None


def verify_sensitivity(system: DeskSystem, u) -> Verdict:
    group = system.group
    witnesses = []
    for i, x in enumerate(system.points):
        for level in system.levels():
            if isinstance(system, ShiftSystem):
                hit = _shift_search(system, x, level, u)
                if hit is not None:
                    witnesses.append({"point": i, "level": level, "y": configuration_to_json(hit[0]),
                                      "g": group.element_to_json(hit[1])})
            else:
                hit = _finite_search(system, i, level, u)
                if hit is not None:
                    witnesses.append({"point": x, "level": level, "y": system.points[hit[0]],
                                      "g": group.element_to_json(hit[1])})
            if hit is None:
                cx = configuration_to_json(x) if isinstance(system, ShiftSystem) else x
                return Verdict("sensitive", False, system.parameters(),
                               {"counterexample": {"point": cx, "level": level}})
    return Verdict("sensitive", True, system.parameters(), {"witnesses": witnesses})


def verify_expansivity(system: DeskSystem, u) -> Verdict:
    group = system.group
    table = []
    pts = system.points
    for i, j in itertools.combinations(range(len(pts)), 2):
        if isinstance(system, ShiftSystem):
            hit = next((g for g in system.ball() if _escapes(group, pts[i], pts[j], g, u.support)), None)
        else:
            act = system.action.act_index
            hit = next((g for g in system.ball() if (act(g, i), act(g, j)) not in u), None)
        if hit is None:
            pair = [configuration_to_json(pts[i]), configuration_to_json(pts[j])] \
                if isinstance(system, ShiftSystem) else [pts[i], pts[j]]
            return Verdict("expansive", False, system.parameters(), {"counterexample": pair})
        table.append({"pair": [i, j], "g": group.element_to_json(hit)})
    return Verdict("expansive", True, system.parameters(), {"witnesses": table})


def perfect_verdict(system: DeskSystem) -> Verdict:
    if isinstance(system, ShiftSystem):
        space = system.space
        if isinstance(space, ZSftSpace):
            isolated = {}
            for n in system.levels():
                lonely = isolated_cylinders(space, n)
                if lonely:
                    isolated[n] = [_fmt_word(w) for w in lonely]
            return Verdict("perfect", not isolated, system.parameters(),
                           {"isolated_cylinders": {str(k): v for k, v in isolated.items()}})
        ok = len(space.alphabet) >= 2 and not system.group.is_finite
        return Verdict("perfect", ok, system.parameters(), {})
    pts = system.points
    lonely = [[pts[i], level] for i, level, nb in _finite_neighborhoods(system) if len(nb) < 2]
    return Verdict("perfect", not lonely, system.parameters(), {"isolated_neighborhoods": lonely})


# -- certificates ----------------------------------------------------------


@dataclass
class SensitivityCertificate:
    route: str
    system: DeskSystem
    w: Any
    v: Any
    u: Any
    orbit_a: tuple = ()
    orbit_b: tuple = ()
    x1: Any = None
    x2: Any = None
    witnesses: list = field(default_factory=list)
    levels: dict = field(default_factory=dict)

    def _entourage_json(self, e):
        if e is None:
            return None
        if isinstance(e, ProdiscreteEntourage):
            return e.to_json(self.system.group)
        return {"pairs": [list(p) for p in e.pairs()]}

    def _point_json(self, x):
        return configuration_to_json(x) if isinstance(self.system, ShiftSystem) else x

    def to_json(self) -> dict:
        doc = {"route": self.route, "system": self.system.to_json(),
               "entourages": {"W": self._entourage_json(self.w), "V": self._entourage_json(self.v),
                              "U": self._entourage_json(self.u)},
               "levels": self.levels}
        if self.route == "main":
            doc["orbit_a"] = [self._point_json(p) for p in self.orbit_a]
            doc["orbit_b"] = [self._point_json(p) for p in self.orbit_b]
        else:
            doc["x1"] = self._point_json(self.x1)
            doc["x2"] = self._point_json(self.x2)
        doc["witnesses"] = self.witnesses
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> SensitivityCertificate:
        system = system_from_json(doc["system"])
        def ent(d):
            if d is None:
                return None
            if isinstance(system, ShiftSystem):
                return prodiscrete(system.group, (system.group.element_from_json(g) for g in d["support"]))
            return relation_from_json({"carrier": list(system.points), "pairs": d["pairs"]})
        def pt(d):
            return configuration_from_json(system.group, d) if isinstance(system, ShiftSystem) else d
        ents = doc["entourages"]
        return cls(doc["route"], system, ent(ents["W"]), ent(ents["V"]), ent(ents["U"]),
                   tuple(pt(p) for p in doc.get("orbit_a", [])), tuple(pt(p) for p in doc.get("orbit_b", [])),
                   pt(doc["x1"]) if doc.get("x1") is not None else None,
                   pt(doc["x2"]) if doc.get("x2") is not None else None,
                   list(doc["witnesses"]), dict(doc.get("levels", {})))


def _periodic_sample(system: DeskSystem) -> list[tuple[int, Any, tuple]]:
    if isinstance(system, ShiftSystem):
        action = ShiftAction(system.group)
    else:
        action = system.action
    out = []
    for i, x in enumerate(system.points):
        orbit = orbit_bounded(action, x, system.period_bound)
        if not isinstance(orbit, OrbitOverflow):
            out.append((i, x, orbit))
    out.sort(key=lambda t: (len(t[2]), t[0]))
    return out


def _disjoint_orbits(system: DeskSystem):
    sample = _periodic_sample(system)
    for a in range(len(sample)):
        for b in range(a + 1, len(sample)):
            if not set(sample[a][2]) & set(sample[b][2]):
                return sample[a][2], sample[b][2], sample
    raise HypothesisError("fewer than two disjoint finite orbits")


def _max_level(system: ShiftSystem) -> int:
    return max(system.scale, system.period_bound, system.group_ball) + 1


def _separating_level(system: ShiftSystem, a, b) -> int:
    for k in range(1, _max_level(system) + 1):
        if not w_related(system.window(k), a, b):
            return k
    raise HypothesisError("non-Hausdorff evidence: points agree on every sampled window")


def _prodiscrete_root(system: ShiftSystem, target: ProdiscreteEntourage) -> tuple[int, ProdiscreteEntourage]:
    # base elements are equivalence relations, so E∘E = E and the coarsest E ⊂ target wins
    need = set(target.support)
    for k in range(1, _max_level(system) + 1):
        window = system.window(k)
        if need <= set(window):
            return k, prodiscrete(system.group, window)
    raise HypothesisError("no base level refines the target entourage")


def _realize_meeting(system: ShiftSystem, x, need, g, target, support):
    """A point y of the subshift agreeing with x on ``need`` and with ``g y`` agreeing with target on support."""
    group = system.group
    constraints = {w: x(w) for w in need}
    gi = group.inv(g)
    for h in support:
        pos = group.mul(gi, h)
        if constraints.setdefault(pos, target(h)) != target(h):
            return None
    return system.space.realize(x, constraints)


def _main_trace(system: ShiftSystem, x, level, a, b, v, u, sample):
    """Run the transitivity argument for one (x, level) cell; ``None`` if not realisable at scale."""
    group = system.group
    need = list(dict.fromkeys(system.window(level) + u.support))
    p = next((s for _, s, _ in sample if w_related(need, s, x)), None)
    if p is None:
        return None
    action = ShiftAction(group)
    stab = stabilizer_subgroup(action, p)
    reps = stab.representatives
    far = next((orb for orb in (a, b) if not any(w_related(v.support, c, x) for c in orb)), None)
    if far is None:
        return None
    q = far[0]
    trans_support = list(dict.fromkeys(group.mul(t, h) for t in reps for h in u.support))
    for g0 in system.ball():
        z = _realize_meeting(system, x, need, g0, q, trans_support)
        if z is None:
            continue
        t0 = reps[stab.coset_index(g0)]
        h0 = group.mul(group.inv(t0), g0)
        if _escapes(group, x, p, h0, u.support):
            y, fired = p, "p"
        elif _escapes(group, x, z, h0, u.support):
            y, fired = z, "z"
        else:
            return None
        trace = {"p": configuration_to_json(p), "q": configuration_to_json(q), "z": configuration_to_json(z),
                 "g0": group.element_to_json(g0), "t0": group.element_to_json(t0),
                 "h0": group.element_to_json(h0), "cosets": [group.element_to_json(t) for t in reps],
                 "fired": fired}
        return y, h0, trace
    return None


def _witness_cells(system: DeskSystem, u, cell_fn) -> list:
    group = system.group
    out = []
    for i, x in enumerate(system.points):
        for level in system.levels():
            entry = {"point": i, "level": level}
            got = cell_fn(i, x, level)
            if got is None:
                if isinstance(system, ShiftSystem):
                    hit = _shift_search(system, x, level, u)
                    if hit is not None:
                        entry.update(route="search", y=configuration_to_json(hit[0]),
                                     g=group.element_to_json(hit[1]))
                else:
                    hit = _finite_search(system, i, level, u)
                    if hit is not None:
                        entry.update(route="search", y=system.points[hit[0]], g=group.element_to_json(hit[1]))
                if hit is None:
                    entry["missing"] = True
            else:
                entry.update(got)
            out.append(entry)
    return out


def construct_sensitivity_main(system: DeskSystem) -> SensitivityCertificate:
    """Sensitivity entourage from two disjoint finite orbits, following the transitivity argument.

    W separates the orbits, V is a symmetric square root of W and U a symmetric
    fourth root of V.  For shift systems each cell also records the periodic
    point p, the far orbit point q, the transitivity point z and the
    decomposition g0 = t0·h0 whenever they are realised inside the ball.
    """
    orbit_a, orbit_b, sample = _disjoint_orbits(system)
    if isinstance(system, FiniteSystem):
        try:
            if not is_hausdorff_base(system.base):
                raise HypothesisError("non-Hausdorff base")
            w = separating_entourage(orbit_a, orbit_b, system.base)
        except NotSeparable as exc:
            raise HypothesisError("non-Hausdorff base") from exc
        if not verify_transitivity(system).passed:
            raise HypothesisError("action is not topologically transitive at scale")
        v = symmetric_root(w, system.base, 2)
        u = symmetric_root(v, system.base, 4)
        cert = SensitivityCertificate("main", system, w, v, u, orbit_a, orbit_b)
        cert.witnesses = _witness_cells(system, u, lambda i, x, level: None)
        return cert
    if not verify_transitivity(system).passed:
        raise HypothesisError("action is not topologically transitive at scale")
    pair_levels = [_separating_level(system, a, b) for a in orbit_a for b in orbit_b]
    w_level = max(pair_levels)
    w = prodiscrete(system.group, system.window(w_level))
    v_level, v = _prodiscrete_root(system, w)
    u_level, u = _prodiscrete_root(system, v)
    cert = SensitivityCertificate("main", system, w, v, u, orbit_a, orbit_b,
                                  levels={"W": w_level, "V": v_level, "U": u_level})

    def cell(i, x, level):
        got = _main_trace(system, x, level, orbit_a, orbit_b, v, u, sample)
        if got is None:
            return None
        y, g, trace = got
        return {"route": "proof", "y": configuration_to_json(y), "g": system.group.element_to_json(g),
                "trace": trace}

    cert.witnesses = _witness_cells(system, u, cell)
    return cert


def construct_sensitivity_mixing(system: DeskSystem, x1, x2) -> SensitivityCertificate:
    """Sensitivity entourage from two distinct points, following the mixing argument."""
    if x1 == x2:
        raise ValueError("x1 and x2 must be distinct")
    if system.group.is_finite:
        raise ValueError("the mixing route needs an infinite group")
    if not verify_mixing(system).passed:
        raise HypothesisError("mixing evidence absent at scale")
    group = system.group
    if isinstance(system, FiniteSystem):
        i1, i2 = system.base.carrier.index(x1), system.base.carrier.index(x2)
        v = next((r for r in system.base if (i1, i2) not in r), None)
        if v is None:
            raise HypothesisError("non-Hausdorff base")
        u = symmetric_root(v, system.base, 4)
        cert = SensitivityCertificate("mixing", system, None, v, u, x1=x1, x2=x2)
        cert.witnesses = _witness_cells(system, u, lambda i, x, level: None)
        return cert
    for x in (x1, x2):
        if not system.space.contains(x):
            raise ValueError(f"{x!r} is not a point of the subshift")
    v_level = _separating_level(system, x1, x2)
    v = prodiscrete(group, system.window(v_level))
    u_level, u = _prodiscrete_root(system, v)
    cert = SensitivityCertificate("mixing", system, None, v, u, x1=x1, x2=x2,
                                  levels={"V": v_level, "U": u_level})

    def cell(i, x, level):
        need = list(dict.fromkeys(system.window(level) + u.support))
        for g in system.ball():
            y1 = _realize_meeting(system, x, need, g, x1, u.support)
            if y1 is None:
                continue
            y2 = _realize_meeting(system, x, need, g, x2, u.support)
            if y2 is None:
                continue
            if _escapes(group, x, y1, g, u.support):
                y, fired = y1, "y1"
            elif _escapes(group, x, y2, g, u.support):
                y, fired = y2, "y2"
            else:
                return None
            return {"route": "proof", "y": configuration_to_json(y), "g": group.element_to_json(g),
                    "trace": {"y1": configuration_to_json(y1), "y2": configuration_to_json(y2), "fired": fired}}
        return None

    cert.witnesses = _witness_cells(system, u, cell)
    return cert


def revalidate_certificate(cert: SensitivityCertificate) -> dict:
    """Re-check every stored claim by direct evaluation, without re-running any search."""
    system = cert.system
    group = system.group
    checks = {}
    if isinstance(system, ShiftSystem):
        checks["U_symmetric"] = cert.u.is_symmetric()
        checks["U_fourfold_in_V"] = cert.u <= cert.v
        if cert.route == "main":
            checks["V_square_in_W"] = cert.v <= cert.w
            checks["W_separates_orbits"] = not any(
                w_related(cert.w.support, a, b) for a in cert.orbit_a for b in cert.orbit_b)
        else:
            checks["V_misses_pair"] = not w_related(cert.v.support, cert.x1, cert.x2)
    else:
        base = system.base
        checks["U_symmetric"] = cert.u.is_symmetric()
        checks["U_fourfold_in_V"] = compose_power(cert.u, 4) <= cert.v
        checks["entourages_in_structure"] = all(
            base.in_filter(e) for e in (cert.w, cert.v, cert.u) if e is not None)
        if cert.route == "main":
            checks["V_square_in_W"] = compose(cert.v, cert.v) <= cert.w
            idx = system.base.carrier.index
            checks["W_separates_orbits"] = not any(
                (idx(a), idx(b)) in cert.w for a in cert.orbit_a for b in cert.orbit_b)
        else:
            idx = system.base.carrier.index
            checks["V_misses_pair"] = (idx(cert.x1), idx(cert.x2)) not in cert.v

    cells = {(i, level) for i in range(len(system.points)) for level in system.levels()}
    bad = []
    covered = set()
    for wit in cert.witnesses:
        if wit.get("missing"):
            continue
        i, level = wit["point"], wit["level"]
        g = group.element_from_json(wit["g"])
        x = system.points[i]
        if isinstance(system, ShiftSystem):
            y = configuration_from_json(group, wit["y"])
            ok = (system.space.contains(y) and w_related(system.window(level), x, y)
                  and (shift_apply(g, x), shift_apply(g, y)) not in cert.u)
        else:
            j = system.base.carrier.index(wit["y"])
            act = system.action.act_index
            ok = j in system.neighborhood(i, level) and (act(g, i), act(g, j)) not in cert.u
        if ok:
            covered.add((i, level))
        else:
            bad.append([i, level])
    checks["witnesses_valid"] = not bad
    checks["witnesses_complete"] = covered == cells
    return {"passed": all(checks.values()), "checks": checks, "invalid_witnesses": bad}


# -- the aggregate verdict -------------------------------------------------


@dataclass
class VerdictReport:
    perfect: Verdict
    transitive: Verdict
    mixing: Verdict
    periodic_dense: Verdict
    sensitive: Verdict
    sensitivity_route: str
    certificate: SensitivityCertificate | None = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def devaney_chaotic(self) -> bool:
        return self.transitive.passed and self.periodic_dense.passed

    def to_json(self) -> dict:
        return {
            "perfect": self.perfect.passed,
            "transitive": self.transitive.passed,
            "mixing": self.mixing.passed,
            "periodic_dense": self.periodic_dense.passed,
            "sensitive": self.sensitive.passed,
            "devaney_chaotic": self.devaney_chaotic,
            "sensitivity_route": self.sensitivity_route,
            "checks": self.checks,
            "notes": self.notes,
            "details": {v.name: v.to_json() for v in
                        (self.perfect, self.transitive, self.mixing, self.periodic_dense, self.sensitive)},
        }


def _finest_entourage(system: DeskSystem):
    if isinstance(system, ShiftSystem):
        return prodiscrete(system.group, system.window(system.scale))
    return min(system.base, key=len)


def devaney_verdict(system: DeskSystem) -> VerdictReport:
    perfect = perfect_verdict(system)
    transitive = verify_transitivity(system)
    mixing = verify_mixing(system)
    dense = verify_periodic_density(system)
    notes = []
    cert = None
    route = "finest-entourage"
    try:
        cert = construct_sensitivity_main(system)
        route = "main"
    except (HypothesisError, ValueError) as exc:
        notes.append(f"main route: {exc}")
        if mixing.passed and not system.group.is_finite and len(system.points) >= 2:
            try:
                cert = construct_sensitivity_mixing(system, system.points[0], system.points[1])
                route = "mixing"
            except (HypothesisError, ValueError) as exc2:
                notes.append(f"mixing route: {exc2}")
    sensitive = verify_sensitivity(system, cert.u if cert is not None else _finest_entourage(system))
    if len(system.points) == 1:
        notes.append("system reduced to a single point: chaotic only in the degenerate sense")
    report = VerdictReport(perfect, transitive, mixing, dense, sensitive, route, cert, notes=notes)

    if isinstance(system, ShiftSystem) and system.space.is_full:
        report.checks["residual_finiteness"] = _residual_check(system, dense.passed)
    if isinstance(system, ShiftSystem) and isinstance(system.space, ZSftSpace):
        applies = mixing.passed and bool(system.points) and perfect.passed
        confirmed = report.devaney_chaotic and sensitive.passed
        report.checks["mixing_sft"] = {"applies": applies, "chaotic_and_sensitive": confirmed,
                                       "consistent": (not applies) or confirmed}
    return report


def _residual_check(system: ShiftSystem, dense: bool) -> dict:
    """Residual finiteness at scale: every quotient of two window elements survives in a finite quotient."""
    group = system.group
    window = system.window(min(system.scale, 2))
    quotients = sorted({group.mul(group.inv(a), b) for a, b in itertools.permutations(window, 2)},
                       key=group.sort_key)
    missing = []
    for g in quotients:
        try:
            residually_finite_witness(group, g)
        except NoWitnessFound:
            missing.append(group.element_to_json(g))
    witnessed = not missing
    return {"elements_checked": len(quotients), "witnessed": witnessed, "missing": missing,
            "agrees_with_periodic_density": witnessed == dense}
