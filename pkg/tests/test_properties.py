"""Exhaustive and randomized properties tying the modules to each other and
to the brute-force congruence ball."""

from functools import lru_cache
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from semiunion.certs import (
    IRREDUCIBLE,
    SUFFIX_SETS,
    TABLE_FAMILIES,
    WeightWitness,
    check_irreducible_generator,
    check_suffix_invariant,
    builtin_table,
    search_weight_witness,
    validate_weight_witness,
)
from semiunion.classify import (
    landing_outcomes,
    phase1_eliminate,
    phase2_eliminate,
    strategies,
)
from semiunion.rewrite import congruence_ball, default_probes, is_consequence, one_step_rewrites, probe_eliminate, replay
from semiunion.typespace import (
    Symmetry,
    all_types,
    apply_symmetry,
    closed_pairs,
    copies_of,
    group,
    identity,
    landing,
    orbits,
    pair_order,
)
from semiunion.words import FAMILIES, family_instances, instantiate_family, presentation, pure_power

pytestmark = pytest.mark.properties

REV = Symmetry(("a", "b", "c"), True)


def instances_up_to(bound):
    return [P for fam in FAMILIES for P in family_instances(fam, bound)]


@st.composite
def presentations(draw, alphabet="ab", min_side=1, max_side=4, max_rels=3):
    side = st.text(alphabet=alphabet, min_size=min_side, max_size=max_side)
    rels = draw(st.lists(st.tuples(side, side).filter(lambda r: r[0] != r[1]),
                         min_size=1, max_size=max_rels, unique_by=lambda r: tuple(sorted(r))))
    return presentation(alphabet, rels)


# --------------------------------------------------------------------------
# rewriting


@pytest.mark.parametrize("P", instances_up_to(2), ids=str)
def test_rewriting_is_symmetric(P):
    for w in default_probes(P.alphabet, range(1, 9 if len(P.alphabet) == 2 else 7)):
        for v in one_step_rewrites(w, P):
            assert w in one_step_rewrites(v, P)


def test_rewriting_is_symmetric_length_8_three_letters():
    P = instantiate_family("3-vii")
    for w in default_probes("abc", [7, 8]):
        for v in one_step_rewrites(w, P):
            assert w in one_step_rewrites(v, P)


@settings(max_examples=60, deadline=None)
@given(presentations(), st.integers(2, 7))
def test_ball_monotone(P, L):
    small, _ = congruence_ball(P, L - 1)
    big, _ = congruence_ball(P, L)
    for cls in small.classes:
        assert all(big.same_class(cls[0], w) for w in cls)


@settings(max_examples=60, deadline=None)
@given(presentations(), st.integers(1, 6))
def test_ball_restrict_is_coarser_or_equal(P, L):
    big, _ = congruence_ball(P, L + 1)
    small, _ = congruence_ball(P, L)
    coarse = big.restrict(L)
    assert len(coarse) <= len(small)


@settings(max_examples=40, deadline=None)
@given(presentations(), st.data())
def test_consequence_paths_replay_and_agree_with_ball(P, data):
    words = default_probes(P.alphabet, range(1, 5))
    u = data.draw(st.sampled_from(words))
    v = data.draw(st.sampled_from(words))
    path = is_consequence(u, v, P, maxlen=7, maxnodes=5000)
    if path is None:
        return
    assert replay(path, P)
    L = max([len(u), len(v)] + [len(s.target) for s in path])
    ball, _ = congruence_ball(P, L)
    assert ball.same_class(u, v)


@settings(max_examples=40, deadline=None)
@given(presentations(max_side=3))
def test_probe_contradictions_replay(P):
    hit = probe_eliminate(P, default_probes(P.alphabet, [3]), maxlen=8, maxnodes=5000)
    if hit is not None:
        c = hit.collision
        assert replay(c.path, P)
        assert pure_power(c.path[0].source) == (c.x, c.p) and pure_power(c.path[-1].target) == (c.y, c.q)


# --------------------------------------------------------------------------
# type space


def test_group_action_laws():
    types = all_types(3)
    for t in types:
        assert apply_symmetry(identity(3), t) == t
        assert apply_symmetry(REV, apply_symmetry(REV, t)) == t
    for g, h in product(group(3), repeat=2):
        gh = g * h
        for t in types:
            assert apply_symmetry(gh, t) == apply_symmetry(g, apply_symmetry(h, t))


def test_orbit_sizes_sum():
    assert sum(o.size for o in orbits(3)) == 729
    assert sum(o.size for o in orbits(2)) == 4


def test_closed_pairs_equivariant():
    for g in group(3):
        for t in all_types(3):
            image = {frozenset(g.letter(x) for x in p) for p in closed_pairs(t)}
            assert closed_pairs(apply_symmetry(g, t)) == image


# --------------------------------------------------------------------------
# certificates against the ball oracle


@lru_cache(maxsize=None)
def ball_of(P, L):
    return congruence_ball(P, L)[0]


@pytest.mark.parametrize("P", instances_up_to(3), ids=str)
def test_witness_soundness_on_families(P):
    ball = ball_of(P, 7)
    for x in P.alphabet:
        W = search_weight_witness(P, x)
        if W is None:
            continue
        assert validate_weight_witness(P, W)
        for cls in ball.classes:
            assert len({W.weight(w) for w in cls}) == 1


@settings(max_examples=150, deadline=None)
@given(presentations(max_side=3), st.lists(st.sampled_from([0, 1, 2, None]), min_size=2, max_size=2))
def test_witness_soundness_random(P, weights):
    W = WeightWitness.of(dict(zip(P.alphabet, weights)))
    if not validate_weight_witness(P, W):
        return
    for cls in ball_of(P, 8).classes:
        assert len({W.weight(w) for w in cls}) == 1


@pytest.mark.parametrize("family", sorted(SUFFIX_SETS))
def test_suffix_soundness_on_families(family):
    P = instantiate_family(family)
    ball = ball_of(P, 8)
    for sigma in SUFFIX_SETS[family]:
        assert check_suffix_invariant(P, sigma)
        for cls in ball.classes:
            long = [w for w in cls if len(w) >= 2]
            assert len({w[-2:] in sigma for w in long}) <= 1


pairs = ["".join(p) for p in product("ab", repeat=2)]


@settings(max_examples=150, deadline=None)
@given(presentations(min_side=2, max_side=3), st.sets(st.sampled_from(pairs), min_size=1, max_size=3))
def test_suffix_soundness_random(P, sigma):
    if not check_suffix_invariant(P, sigma):
        return
    for cls in ball_of(P, 8).classes:
        long = [w for w in cls if len(w) >= 2]
        assert len({w[-2:] in sigma for w in long}) <= 1


@pytest.mark.parametrize("P", [P for P in instances_up_to(3) if P.family.family in IRREDUCIBLE], ids=str)
def test_irreducibility_soundness_on_families(P):
    ball = ball_of(P, 8)
    for x in IRREDUCIBLE[P.family.family]:
        assert check_irreducible_generator(P, x)
        for n in range(1, 9):
            assert len(ball.class_of(x * n)) == 1


@settings(max_examples=150, deadline=None)
@given(presentations(max_side=3), st.sampled_from("ab"))
def test_irreducibility_soundness_random(P, x):
    if not check_irreducible_generator(P, x):
        return
    ball = ball_of(P, 8)
    for n in range(1, 9):
        assert len(ball.class_of(x * n)) == 1


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(list(TABLE_FAMILIES)), st.data())
def test_table_folds_agree(family, data):
    T = builtin_table(family)
    w = data.draw(st.text(alphabet="abc", min_size=2, max_size=12))
    k = data.draw(st.integers(1, len(w) - 1))
    assert T.evaluate(w) == T.evaluate_right(w) == T.mul(T.evaluate(w[:k]), T.evaluate(w[k:]))


@pytest.mark.parametrize("P", instances_up_to(3), ids=str)
def test_no_foreign_pure_power_in_power_classes(P):
    ball = ball_of(P, 8)
    for x in P.alphabet:
        for n in range(1, 9):
            letters = {pure_power(w)[0] for w in ball.class_of(x * n) if pure_power(w)}
            assert letters == {x}


# --------------------------------------------------------------------------
# classification


@lru_cache(maxsize=None)
def phase1_table():
    return {t: phase1_eliminate(t) is not None for t in all_types(3)}


def test_phase1_orbit_invariant():
    table = phase1_table()
    for o in orbits(3):
        assert len({table[t] for t in o.members}) == 1


def test_no_closed_pair_means_phase1_elimination():
    table = phase1_table()
    for t in all_types(3):
        if not closed_pairs(t):
            assert table[t], t


def test_phase1_sound_against_phase2():
    table = phase1_table()
    for o in orbits(3):
        if table[o.rep]:
            for bound in (1, 2):
                assert phase2_eliminate(o.rep, bound).survivors == [], o.rep
    for o in orbits(2):
        if phase1_eliminate(o.rep) is not None:
            assert phase2_eliminate(o.rep, 2).survivors == []


def _concrete_landing(t, exps, probe, strategy, cap=10, steps=200):
    """Follow the strategy on actual runs; returns the landing letter or None if it gave up."""
    lookup = landing(t)
    power = dict(zip(pair_order(copies_of(t)), exps))

    def contract(runs, inner):
        budget = steps
        while len(runs) > 1:
            budget -= 1
            if budget < 0 or len(runs) > cap:
                return None
            i = 0 if inner == "left" else len(runs) - 2
            (x, p), (y, q) = runs[i], runs[i + 1]
            z, e = lookup[(x, y)], power[(x, y)]
            new = runs[:i] + [(x, p - 1), (z, e), (y, q - 1)] + runs[i + 2:]
            merged = []
            for letter, n in new:
                if n == 0:
                    continue
                if merged and merged[-1][0] == letter:
                    merged[-1] = (letter, merged[-1][1] + n)
                else:
                    merged.append((letter, n))
            runs = merged
        return runs[0]

    def go(tree):
        if isinstance(tree, int):
            return (probe[tree], 1)
        left, right = go(tree[0]), go(tree[1])
        if left is None or right is None:
            return None
        return contract([left, right] if left[0] != right[0] else [(left[0], left[1] + right[1])], strategy.inner)

    res = go(strategy.tree)
    return None if res is None else res[0]


@pytest.mark.parametrize("o", [o for o in orbits(3)][::3] + list(orbits(2)), ids=lambda o: "".join(o.rep))
def test_landing_abstraction_covers_concrete_evaluation(o):
    t = o.rep
    alphabet = "abc"[: copies_of(t)]
    cases = [(probe, s, landing_outcomes(t, probe, s)) for probe in default_probes(alphabet, [2, 3, 4])
             for s in strategies(len(probe))]
    cases = [(probe, s, res.outcomes) for probe, s, res in cases if not res.overflow]
    for exps in product((1, 2), repeat=len(t)):
        for probe, s, outcomes in cases:
            z = _concrete_landing(t, exps, probe, s)
            if z is not None:
                assert z in outcomes, (t, exps, probe, s)


@pytest.mark.parametrize("P", instances_up_to(2), ids=str)
def test_landing_soundness_on_certified_instances(P):
    t = tuple(r.rhs[0] for r in P.relations)
    ball = ball_of(P, 8)
    for probe in default_probes(P.alphabet, [3, 4]):
        ball_powers = {pure_power(w)[0] for w in ball.class_of(probe) if pure_power(w)}
        for s in strategies(len(probe)):
            res = landing_outcomes(t, probe, s)
            if not res.overflow:
                assert ball_powers <= res.outcomes, (probe, s)
