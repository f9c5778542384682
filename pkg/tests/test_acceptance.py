"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line in the summary."""

import itertools
import json
import pathlib
import random
import subprocess
import sys
import time
from fractions import Fraction

from uniformchaos.chaos_verdicts import (
    FiniteSystem,
    ShiftSystem,
    construct_sensitivity_main,
    construct_sensitivity_mixing,
    devaney_verdict,
    revalidate_certificate,
    verify_expansivity,
    verify_mixing,
    verify_periodic_density,
    verify_sensitivity,
)
from uniformchaos.group_actions import (
    ActionTable,
    FiniteGroup,
    FreeGroup,
    Integers,
    Lattice,
    intersect_subgroups,
    residually_finite_witness,
    whole_group,
)
from uniformchaos.relation_algebra import (
    Carrier,
    DistanceTable,
    Relation,
    UniformBase,
    check_base_axioms,
    compose,
    inverse_rel,
    metric_base,
    separating_entourage,
    symmetric_root,
)
from uniformchaos.shift_spaces import (
    PeriodicConfiguration,
    SubshiftOfFiniteType,
    configuration_from_json,
    constant,
    enumerate_periodic,
    is_perfect_at_scale,
    periodic_word,
    prodiscrete,
    scale_window,
    shift_apply,
    space_for,
    transition_trace,
)

Z = Integers()
FULL = SubshiftOfFiniteType.full(Z, "01")
GOLDEN = SubshiftOfFiniteType.from_forbidden(Z, "01", (0, 1), ["11"])
FLIP = SubshiftOfFiniteType.from_allowed(Z, "01", (0, 1), ["01", "10"])
SYSTEMS = pathlib.Path(__file__).resolve().parent.parent / "systems"


def oracle_compose(u, v):
    pu, pv = set(u.pairs()), set(v.pairs())
    return {(x, y) for (x, z) in pu for (z2, y) in pv if z == z2}


def oracle_power_within(u, k, target):
    acc = set(u.pairs())
    for _ in range(k - 1):
        acc = {(x, y) for (x, z) in acc for (z2, y) in u.pairs() if z == z2}
    return acc <= set(target.pairs())


def random_relation(rng, c):
    n = c.size
    return Relation.from_pairs(c, [(i, j) for i in range(n) for j in range(n) if rng.random() < 0.3])


def random_table(rng, n):
    c = Carrier(tuple(f"p{i}" for i in range(n)))
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 20), rng.randint(1, 4))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                w[i][j] = min(w[i][j], w[i][k] + w[k][j])
    return DistanceTable(c, tuple(tuple(r) for r in w))


def test_criterion_01_relation_laws(criterion):
    criterion(1, "relation laws on 500 random triples, carriers <= 8, under 5 s")
    rng = random.Random(1)
    started = time.perf_counter()
    failures = 0
    for _ in range(500):
        c = Carrier(tuple(range(rng.randint(1, 8))))
        u, v, w = (random_relation(rng, c) for _ in range(3))
        failures += compose(compose(u, v), w) != compose(u, compose(v, w))
        failures += inverse_rel(compose(u, v)) != compose(inverse_rel(v), inverse_rel(u))
        failures += set(compose(u, v).pairs()) != oracle_compose(u, v)
        labels = [rng.randrange(3) for _ in range(c.size)]
        e = Relation.from_pairs(c, [(i, j) for i in range(c.size) for j in range(c.size) if labels[i] == labels[j]])
        failures += compose(e, e) != e
    elapsed = time.perf_counter() - started
    assert failures == 0
    assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_criterion_02_axiom_checker(criterion):
    criterion(2, "axiom checker on discrete, coarse, 50 metric bases and broken bases")
    rng = random.Random(2)
    for n in range(1, 9):
        c = Carrier(tuple(range(n)))
        assert check_base_axioms(UniformBase(c, (Relation.diagonal(c),))).passed
        assert check_base_axioms(UniformBase(c, (Relation.full(c),))).passed
    for _ in range(50):
        table = random_table(rng, rng.randint(1, 8))
        base = metric_base(table)
        assert check_base_axioms(base).passed
        # remove one diagonal pair from one base element
        k = rng.randrange(len(base))
        i = rng.randrange(table.carrier.size)
        broken = list(base.base)
        broken[k] = broken[k] - Relation.from_pairs(table.carrier, [(i, i)])
        report = check_base_axioms(UniformBase(table.carrier, tuple(broken)))
        assert not report["UN-1"].passed
        assert report["UN-1"].witness["relation"] == k
        p = table.carrier.points[i]
        assert report["UN-1"].witness["pair"] == [p, p]
    # a reflexive symmetric path relation has no composition root in its own base
    for n in range(3, 9):
        c = Carrier(tuple(range(n)))
        path = Relation.diagonal(c) | Relation.from_pairs(c, [(i, i + 1) for i in range(n - 1)]
                                                           + [(i + 1, i) for i in range(n - 1)])
        report = check_base_axioms(UniformBase(c, (path,)))
        assert not report["UN-5"].passed
        wit = report["UN-5"].witness
        a, b = (c.index(p) for p in wit["pair"])
        cand = (path,)[wit["candidate"]]
        assert (a, b) in oracle_compose(cand, cand) and (a, b) not in set(path.pairs())


def test_criterion_03_separation_and_roots(criterion):
    criterion(3, "separating entourage and roots on 100 random metric bases")
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(2, 8)
        table = random_table(rng, n)
        base = metric_base(table)
        pts = list(table.carrier.points)
        rng.shuffle(pts)
        cut = rng.randint(1, n - 1)
        a = pts[:cut][: rng.randint(1, cut)]
        b = pts[cut:][: rng.randint(1, n - cut)]
        w = separating_entourage(a, b, base)
        idx = table.carrier.index
        assert not ({(idx(x), idx(y)) for x in a for y in b} & set(w.pairs()))
        assert base.in_filter(w)
        v = symmetric_root(w, base, 2)
        u = symmetric_root(v, base, 4)
        assert v.is_symmetric() and u.is_symmetric()
        assert oracle_power_within(v, 2, w)
        assert oracle_power_within(u, 4, v)


def _cert_checks(system, cert):
    result = revalidate_certificate(cert)
    assert result["passed"], result
    for wit in cert.witnesses:
        assert "y" in wit and "g" in wit
    # direct evaluation of every stored witness, independent of the revalidator
    for wit in cert.witnesses:
        x = system.points[wit["point"]]
        y = configuration_from_json(system.group, wit["y"])
        g = wit["g"]
        gx, gy = shift_apply(g, x), shift_apply(g, y)
        assert any(gx(h) != gy(h) for h in cert.u.support)
        assert all(x(h) == y(h) for h in system.window(wit["level"]))


def test_criterion_04_main_route(criterion):
    criterion(4, "dense-periodic route on full shift and golden mean, scale 4, ball 8, under 30 s")
    started = time.perf_counter()
    for sft in (FULL, GOLDEN):
        system = ShiftSystem(space_for(sft), scale=4, group_ball=8)
        cert = construct_sensitivity_main(system)
        assert verify_sensitivity(system, cert.u).passed
        _cert_checks(system, cert)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"{elapsed:.2f}s"


def test_criterion_05_mixing_route(criterion):
    criterion(5, "mixing route on full shift and golden mean; flip SFT rejected by parity")
    for sft, x2 in ((FULL, periodic_word("01")), (GOLDEN, periodic_word("01"))):
        system = ShiftSystem(space_for(sft), scale=4, group_ball=8)
        cert = construct_sensitivity_mixing(system, constant(Z, "0"), x2)
        assert verify_sensitivity(system, cert.u).passed
        _cert_checks(system, cert)
    flip = ShiftSystem(space_for(FLIP), scale=1, group_ball=8)
    verdict = verify_mixing(flip)
    assert not verdict.passed
    row = next(r for r in verdict.details["exceptional_sets"] if r["from"] == "0" and r["to"] == "0")
    assert sorted(row["exceptional"]) == [g for g in range(-8, 9) if g % 2]


def _discrete_corpus():
    out = []
    for n in range(1, 7):
        c = Carrier(tuple(range(n)))
        cyc = FiniteGroup.cyclic(n)
        out.append(ActionTable.from_function(cyc, c, lambda s, x, n=n: (x + s) % n))
        out.append(ActionTable.from_function(Z, c, lambda s, x: x))
        out.append(ActionTable.from_function(Z, c, lambda s, x, n=n: (x + 1) % n))
        if n == 3 or n == 6:
            perms = list(itertools.permutations(range(3)))
            if n == 3:
                out.append(ActionTable.from_function(FiniteGroup.symmetric(3), c, lambda s, x: perms[s][x]))
            else:
                s3 = FiniteGroup.symmetric(3)
                out.append(ActionTable.from_function(s3, c, lambda s, x: s3.mul(s, x)))
    return out


def test_criterion_06_perfectness_necessity(criterion):
    criterion(6, "discrete finite systems of size 1-6 are never sensitive")
    rng = random.Random(6)
    checked = 0
    for act in _discrete_corpus():
        c = act.carrier
        d = Relation.diagonal(c)
        off = [(i, j) for i in range(c.size) for j in range(c.size) if i != j]
        if len(off) <= 6:
            ents = [d | Relation.from_pairs(c, s) for k in range(len(off) + 1) for s in itertools.combinations(off, k)]
        else:
            ents = [d, Relation.full(c)] + [d | Relation.from_pairs(c, [p for p in off if rng.random() < 0.5])
                                             for _ in range(30)]
        system = FiniteSystem(act, UniformBase(c, (d,)))
        for u in ents:
            assert not verify_sensitivity(system, u).passed
            checked += 1
    assert checked > 300


def test_criterion_07_expansivity(criterion):
    criterion(7, "W({identity}) is expansive; with perfectness it yields sensitivity")
    u = prodiscrete(Z, [0])
    for sft in (FULL, GOLDEN):
        for scale in (2, 3, 4):
            system = ShiftSystem(space_for(sft), scale=scale, group_ball=8)
            assert verify_expansivity(system, u).passed
            perfect = all(is_perfect_at_scale(sft, n) for n in system.levels())
            assert perfect
            assert verify_sensitivity(system, u).passed


def _brute_cyclic(n):
    return sum(1 for w in itertools.product("01", repeat=n)
               if all(not (w[i] == "1" and w[(i + 1) % n] == "1") for i in range(n)))


def test_criterion_08_periodic_counts(criterion):
    criterion(8, "golden-mean periodic counts: enumeration = trace = brute force, n = 1..10")
    frozen = [1, 3, 4, 7, 11, 18, 29, 47, 76, 123]
    for n in range(1, 11):
        configs = enumerate_periodic(GOLDEN, n)
        assert len(configs) == len(set(configs)) == transition_trace(GOLDEN, n) == _brute_cyclic(n) == frozen[n - 1]


def _direct_periodic(group, window, pattern):
    # second route: intersect residual-finiteness witnesses for every pairwise quotient
    parts = [residually_finite_witness(group, group.mul(group.inv(a), b))
             for a, b in itertools.combinations(window, 2)]
    h = intersect_subgroups(parts) if parts else whole_group(group)
    values = {}
    for w, s in zip(window, pattern):
        values[h.coset_index(w)] = s
    return PeriodicConfiguration(h, tuple(values.get(i, "0") for i in range(h.index)))


def test_criterion_09_residual_finiteness(criterion):
    criterion(9, "full shifts over Z, Z^2, S3, F2 have dense periodic points at scale <= 2")
    for group in (Z, Lattice(2), FiniteGroup.symmetric(3), FreeGroup(2)):
        for scale in (1, 2):
            system = ShiftSystem(space_for(SubshiftOfFiniteType.full(group, "01")), scale=scale,
                                 group_ball=4, period_bound=12)
            assert verify_periodic_density(system).passed, (group, scale)
            window = scale_window(group, scale)
            for pattern in itertools.product("01", repeat=len(window)):
                x = _direct_periodic(group, window, pattern)
                assert tuple(x(w) for w in window) == pattern
                for g in group.ball(2):
                    if x.subgroup.contains(g):
                        assert shift_apply(g, x) == x


def _report(system_factory):
    system = system_factory()
    verdict = devaney_verdict(system)
    return json.dumps(verdict.to_json()) + json.dumps(verdict.certificate.to_json() if verdict.certificate else None)


def test_criterion_10_determinism(criterion):
    criterion(10, "reports and certificates are byte-identical across runs")
    factories = [
        lambda: ShiftSystem(space_for(FULL)),
        lambda: ShiftSystem(space_for(GOLDEN)),
        lambda: ShiftSystem(space_for(SubshiftOfFiniteType.full(FreeGroup(2), "01")), scale=2, group_ball=4),
    ]
    for f in factories:
        assert _report(f) == _report(f)
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "uniformchaos", "analyze", str(SYSTEMS / "golden_mean.json"),
                               "--json"], capture_output=True, text=True, check=True)
        doc = json.loads(proc.stdout)
        doc.pop("timing")
        outs.append(json.dumps(doc))
    assert outs[0] == outs[1]
