import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniformchaos.group_actions import (
    ActionTable,
    FiniteGroup,
    FreeGroup,
    GroupError,
    Integers,
    Lattice,
    OrbitOverflow,
    ball_enumerate,
    coset_representatives,
    group_from_json,
    intersect_subgroups,
    is_periodic,
    modular_subgroup,
    orbit_bounded,
    permutation_kernel,
    power,
    residually_finite_witness,
    separating_subgroup,
    stabilizer_index,
    stabilizer_subgroup,
    subgroup_from_json,
    trivial_subgroup,
    whole_group,
)
from uniformchaos.relation_algebra import Carrier
from uniformchaos.shift_spaces import ShiftAction, periodic_word

Z = Integers()
F2 = FreeGroup(2)
S3_PERMS = list(itertools.permutations(range(3)))


def rotation(n):
    return ActionTable.from_function(Z, Carrier(tuple(range(n))), lambda g, x: (x + g) % n)


def s3_on_three():
    return ActionTable.from_function(FiniteGroup.symmetric(3), Carrier((0, 1, 2)), lambda g, x: S3_PERMS[g][x])


def eval_perm_word(group, g, images):
    # independent evaluation of a free-group word in a permutation quotient
    degree = len(images[0])
    out = tuple(range(degree))
    for gen, sign in group.word(g):
        p = images[gen[0] - 1]
        if sign < 0:
            inv = [0] * degree
            for i, v in enumerate(p):
                inv[v] = i
            p = tuple(inv)
        out = tuple(out[p[i]] for i in range(degree))
    return out


# -- groups and balls --------------------------------------------------------


def test_integer_ball():
    assert set(ball_enumerate(Z, 2)) == {-2, -1, 0, 1, 2}
    assert ball_enumerate(Z, 2) == [0, 1, -1, 2, -2]


def test_free_ball_sizes():
    assert {F2.format(g) for g in ball_enumerate(F2, 1)} == {"e", "a", "A", "b", "B"}
    # 1 + 4 + 4*3, frozen from a brute-force reduced-word count
    assert len(ball_enumerate(F2, 2)) == 17
    assert len(ball_enumerate(F2, 3)) == 53


def test_lattice_ball():
    ball = ball_enumerate(Lattice(2), 1)
    assert ball[0] == (0, 0)
    assert set(ball) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(ball_enumerate(Lattice(2), 2)) == 13


def test_finite_ball_ignores_radius():
    g = FiniteGroup.symmetric(3)
    assert sorted(ball_enumerate(g, 0)) == sorted(ball_enumerate(g, 5)) == list(range(6))


def test_finite_table_validation():
    with pytest.raises(GroupError):
        FiniteGroup(((0, 1), (0, 1)))


def test_free_reduction_and_parse():
    w = F2.parse("abBA")
    assert w == F2.identity
    assert F2.format(F2.parse("a^-1b")) == "Ab"
    assert F2.parse("a⁻¹") == F2.inv(F2.parse("a"))


@given(st.lists(st.sampled_from("aAbB"), max_size=8), st.lists(st.sampled_from("aAbB"), max_size=8))
def test_free_group_laws(u, v):
    x, y = F2.parse("".join(u)), F2.parse("".join(v))
    assert F2.mul(x, F2.inv(x)) == F2.identity
    assert F2.inv(F2.mul(x, y)) == F2.mul(F2.inv(y), F2.inv(x))
    assert all(a != -b for a, b in zip(x, x[1:]))


def test_power():
    assert power(Z, 3, 4) == 12
    assert power(F2, F2.parse("ab"), -1) == F2.parse("BA")


def test_group_json_roundtrip():
    for g in (Z, Lattice(3), F2, FiniteGroup.cyclic(4)):
        assert group_from_json(json.loads(json.dumps(g.to_json()))) == g
    with pytest.raises(GroupError):
        group_from_json({"kind": "heisenberg"})


# -- actions and orbits -------------------------------------------------------


def test_trivial_orbit():
    act = ActionTable.from_function(Z, Carrier(("x", "y")), lambda g, x: x)
    assert orbit_bounded(act, "x", 1) == ("x",)


def test_rotation_orbit_and_index():
    act = rotation(5)
    assert set(orbit_bounded(act, 2, 5)) == set(range(5))
    assert stabilizer_index(act, 0) == 5
    assert isinstance(orbit_bounded(act, 0, 4), OrbitOverflow)
    assert is_periodic(act, 0, 5) and not is_periodic(act, 0, 4)


def test_fixed_point_index():
    act = ActionTable.from_function(Z, Carrier(("x",)), lambda g, x: x)
    assert stabilizer_index(act, "x") == 1


def test_period_three_shift():
    x = periodic_word("001")
    orbit = orbit_bounded(ShiftAction(Z), x, 10)
    assert len(orbit) == 3
    assert stabilizer_index(ShiftAction(Z), x) == 3


def test_missing_generator_image():
    act = ActionTable(Z, Carrier((0, 1, 2)), {})
    with pytest.raises(GroupError, match="missing"):
        orbit_bounded(act, 0, 3)


def test_non_permutation_rejected():
    with pytest.raises(GroupError):
        ActionTable.from_function(Z, Carrier((0, 1)), lambda g, x: 0)


def test_action_law_on_ball():
    act = s3_on_three()
    g = act.group
    for a in range(6):
        for b in range(6):
            for x in range(3):
                assert act.act(a, act.act(b, x)) == act.act(g.mul(a, b), x)


@given(st.integers(1, 7), st.integers(0, 6))
def test_orbit_closed_under_generators(n, x):
    act = rotation(n)
    x %= n
    orbit = set(orbit_bounded(act, x, n))
    for y in orbit:
        for s in Z.generators():
            assert act.act(s, y) in orbit and act.act(Z.inv(s), y) in orbit


def test_orbit_stabilizer_on_finite_table():
    act = s3_on_three()
    for x in range(3):
        h = stabilizer_subgroup(act, x)
        assert h.index == len(orbit_bounded(act, x, 6)) == 3


def test_action_json_roundtrip():
    act = s3_on_three()
    back = ActionTable.from_json(json.loads(json.dumps(act.to_json())))
    for g in range(6):
        assert [back.act(g, x) for x in range(3)] == [act.act(g, x) for x in range(3)]


# -- cosets -----------------------------------------------------------------


def test_coset_examples():
    assert coset_representatives(Z, whole_group(Z)) == [0]
    assert coset_representatives(Z, modular_subgroup(Z, (3,))) == [0, 1, 2]
    h = permutation_kernel(F2, [(1, 0), (1, 0)])
    assert [F2.format(t) for t in coset_representatives(F2, h)] == ["e", "a"]


@pytest.mark.parametrize("group,h", [
    (Z, modular_subgroup(Z, (4,))),
    (Lattice(2), modular_subgroup(Lattice(2), (2, 3))),
    (F2, permutation_kernel(F2, [(1, 2, 0), (1, 0, 2)])),
    (FiniteGroup.symmetric(3), trivial_subgroup(FiniteGroup.symmetric(3))),
])
def test_coset_injectivity(group, h):
    reps = coset_representatives(group, h)
    assert len(reps) == h.index
    assert reps[0] == group.identity
    h_ball = [x for x in group.ball(3) if h.contains(x)]
    products = [group.mul(t, x) for t in reps for x in h_ball]
    assert len(products) == len(set(products))
    assert len({h.coset_index(t) for t in reps}) == h.index


def test_subgroup_closure_on_ball():
    h = permutation_kernel(F2, [(1, 2, 0), (1, 0, 2)])
    members = [x for x in F2.ball(3) if h.contains(x)]
    for x in members:
        assert h.contains(F2.inv(x))
        for y in members:
            assert h.contains(F2.mul(x, y))


def test_intersection_index():
    h = intersect_subgroups([modular_subgroup(Z, (2,)), modular_subgroup(Z, (3,))])
    assert h.index == 6


def test_subgroup_json_roundtrip():
    h = permutation_kernel(F2, [(1, 2, 0), (1, 0, 2)])
    back = subgroup_from_json(F2, json.loads(json.dumps(h.to_json())))
    assert back.index == h.index
    assert all(back.contains(g) == h.contains(g) for g in F2.ball(3))


# -- residual finiteness -------------------------------------------------------


def test_witness_integers():
    h = residually_finite_witness(Z, 4)
    assert h.index == 5 and not h.contains(4) and h.contains(0)


def test_witness_finite_table():
    g = FiniteGroup.symmetric(3)
    h = residually_finite_witness(g, 3)
    assert h.index == 6 and not h.contains(3)


def test_witness_commutator():
    g = F2.parse("abAB")
    h = residually_finite_witness(F2, g)
    assert not h.contains(g) and h.contains(F2.identity)
    assert h.kind == "permutation"
    degree, images = h.params
    assert degree <= 6
    # the image of the commutator is nontrivial, evaluated independently
    assert eval_perm_word(F2, g, images) != tuple(range(degree))


def test_witness_rejects_identity():
    with pytest.raises(GroupError):
        residually_finite_witness(Z, 0)


@settings(max_examples=60)
@given(st.lists(st.sampled_from("aAbB"), min_size=1, max_size=6))
def test_witness_law_free(letters):
    g = F2.parse("".join(letters))
    if g == F2.identity:
        return
    h = residually_finite_witness(F2, g)
    assert not h.contains(g) and h.contains(F2.identity)


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=2).filter(lambda v: v != [0, 0]))
def test_witness_law_lattice(v):
    L = Lattice(2)
    h = residually_finite_witness(L, tuple(v))
    assert not h.contains(tuple(v)) and h.contains((0, 0))


def test_separating_subgroup_free():
    window = F2.ball(1)
    h = separating_subgroup(F2, window)
    assert len({h.coset_index(w) for w in window}) == len(window)
