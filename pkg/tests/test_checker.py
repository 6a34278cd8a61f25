import itertools
import random

import pytest

from awarecheck.checker import (KXA, XA, OracleBudgetExceeded, Truth,
                                brute_force_forall, direct_evaluate,
                                evaluate, evaluate_hr, forall_witness,
                                qf_sentences, realizable_profiles,
                                stabilization_depth, weak_counterexample,
                                weakly_valid)
from awarecheck.fuzz import random_open_formula, random_sentence
from awarecheck.model import (AwarenessStructure, enumerate_models,
                              generate_random)
from awarecheck.syntax import (A, And, AStar, Exists, Forall, K, Not, Prop,
                               Var, X, parse, pretty, subst_var, vocabulary)

from test_model import barcan_model, unc_model

T, F, U = Truth.TRUE, Truth.FALSE, Truth.UNDEFINED

PSI_UNCERTAIN = "!X1 !(forall #x . A1 #x) & !X1 (forall #x . A1 #x)"


def test_barcan_fixture_claims():
    m = barcan_model()
    assert evaluate(m, "s", parse("forall #x . X1 A1 #x", 1)) is T
    assert evaluate(m, "s", parse("X1 (forall #x . A1 #x)", 1)) is F
    assert evaluate(m, "t", parse("!(forall #x . A1 #x)", 1)) is T
    assert evaluate(m, "t", parse("X1 !(forall #x . A1 #x)", 1)) is F


def test_undefined_iff_vocabulary_escapes_language():
    m = barcan_model()
    assert evaluate(m, "s", parse("K1 q", 1)) is U
    assert evaluate(m, "t", parse("K1 q", 1)) is not U


def test_uncertainty_formula_on_unc_fixture():
    m = unc_model()
    psi = parse(PSI_UNCERTAIN, 1)
    assert evaluate(m, "s", psi) is T
    # confirmed by the substitution oracle at depth 2
    assert direct_evaluate(m, "s", psi, forall_depth=2) is T


def test_evaluate_rejects_bad_input():
    m = barcan_model()
    with pytest.raises(ValueError):
        evaluate(m, "s", A(1, Var("x")))
    with pytest.raises(ValueError):
        evaluate(m, "s", parse("K2 p", 2))
    with pytest.raises(ValueError):
        evaluate(m, "nowhere", parse("p", 1))
    with pytest.raises(ValueError):
        evaluate(m, "s", parse("r", 1))


def test_definedness_fuzz():
    rng = random.Random(21)
    for seed in range(25):
        m = generate_random(2, 3, ["p", "q"], frozenset(), seed=seed)
        for _ in range(20):
            f = random_sentence(rng, ("p", "q"), 2, quantifier_prob=0.2)
            for w in m.worlds:
                undefined = not vocabulary(f) <= m.lang[w]
                assert (evaluate(m, w, f) is U) == undefined


def test_exists_is_negated_forall():
    body = A(1, Var("x"))
    assert Exists("x", body) == Not(Forall("x", Not(body)))


def test_profiles_soundness_via_direct_eval():
    for seed in range(15):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        for prof in realizable_profiles(m):
            assert vocabulary(prof.witness) == prof.vocab
            for w, expect in prof.truth.items():
                got = direct_evaluate(m, w, prof.witness)
                assert got is (T if expect else F)
            for w in m.worlds:
                if w not in prof.truth:
                    assert direct_evaluate(m, w, prof.witness) is U


def test_profiles_on_single_world_model():
    m = AwarenessStructure(1, ["p"], ["s"], {"s": {"p"}}, {"s": {"p"}},
                           {1: [("s", "s")]}, {1: {"s": {"p"}}})
    profs = realizable_profiles(m)
    got = {(tuple(sorted(p.vocab)), tuple(sorted(p.truth.items())))
           for p in profs}
    assert got == {(("p",), (("s", True),)), (("p",), (("s", False),))}
    names = {pretty(p.witness) for p in profs}
    assert names == {"p", "!p"}


def test_profiles_include_top_seed():
    from awarecheck.checker import QuantifierDomain
    m = barcan_model()
    dom = QuantifierDomain(include_top=True)
    profs = realizable_profiles(m, dom)
    tops = [p for p in profs if p.vocab == frozenset()]
    assert len(tops) >= 1
    assert tops[0].truth == {"s": True, "t": True}
    assert pretty(tops[0].witness) == "true"


def test_barcan_q_profiles():
    m = barcan_model()
    q_profiles = [p for p in realizable_profiles(m)
                  if p.vocab == frozenset(("q",))]
    truths = {tuple(sorted(p.truth.items())) for p in q_profiles}
    assert truths == {(("t", True),), (("t", False),)}


def test_profile_count_bound_and_stabilization():
    # closure size <= 2^|props| * 2^|worlds|; fixpoint realized by depth <= 6
    for seed in range(20):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        profs = realizable_profiles(m)
        assert len(profs) <= (2 ** 2) * (2 ** 3)
        assert stabilization_depth(m) <= 6
    for m in itertools.islice(enumerate_models(1, 2, ["p", "q"]), 0, 3000, 7):
        assert stabilization_depth(m) <= 6


def test_profile_fixpoint_matches_depth_enumeration():
    # profiles realized by explicitly enumerated sentences equal the fixpoint
    # once the depth reaches the stabilization depth
    cases = [(generate_random(1, 3, ["p"], frozenset(), seed=s), 3)
             for s in range(4)]
    cases += [(generate_random(1, 2, ["p", "q"], frozenset(), seed=s), 2)
              for s in range(6)]
    checked = 0
    for m, depth in cases:
        if stabilization_depth(m) > depth:
            continue
        cache = {}
        expected = set()
        for psi in qf_sentences(m.props, 1, KXA, depth):
            verdicts = []
            for w in m.worlds:
                v = direct_evaluate(m, w, psi, memo=cache)
                if v is not U:
                    verdicts.append((w, v is T))
            expected.add((vocabulary(psi), tuple(sorted(verdicts))))
        got = {(p.vocab, tuple(sorted(p.truth.items())))
               for p in realizable_profiles(m)}
        assert got == expected
        checked += 1
    assert checked >= 4


def test_context_lemma_on_enumerated_models():
    # two sentences with the same (vocabulary, truth profile) are
    # interchangeable in every context
    rng = random.Random(17)
    models = list(itertools.islice(enumerate_models(1, 2, ["p", "q"]),
                                   0, 4000, 97))
    for m in models:
        groups = {}
        for psi in qf_sentences(m.props, 1, KXA, 2):
            profile = []
            for w in m.worlds:
                v = direct_evaluate(m, w, psi)
                if v is not U:
                    profile.append((w, v is T))
            groups.setdefault((vocabulary(psi), tuple(profile)),
                              []).append(psi)
        pairs = [(g[0], rng.choice(g[1:])) for g in groups.values()
                 if len(g) > 1]
        for psi1, psi2 in pairs[:6]:
            ctx = random_open_formula(rng, m.props, 1, "x", max_depth=3,
                                      quantifier_prob=0.25)
            f1 = subst_var(ctx, "x", psi1)
            f2 = subst_var(ctx, "x", psi2)
            for w in m.worlds:
                assert evaluate(m, w, f1) is evaluate(m, w, f2)


def test_weak_validity_examples():
    excluded_middle = parse("forall #x . (#x | !#x)", 1)
    for seed in range(20):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        assert weakly_valid(m, excluded_middle)
    # T instance fails on a non-reflexive structure
    m = AwarenessStructure(
        1, ["p"], ["s", "t"], {"s": {"p"}, "t": {"p"}},
        {"s": set(), "t": {"p"}}, {1: [("s", "t")]},
        {1: {"s": set(), "t": set()}})
    assert weak_counterexample(m, parse("K1 p -> p", 1)) == "s"


def test_finite_prop_substitution_failure_shape():
    phi = parse("A1 p & A1 q -> forall #x . A1 #x", 1)
    inst = parse("A1 p & A1 p -> forall #x . A1 #x", 1)
    for m in enumerate_models(1, 2, ["p", "q"]):
        assert weakly_valid(m, phi)
    bad = AwarenessStructure(
        1, ["p", "q"], ["s"], {"s": {"p", "q"}}, {"s": set()}, {1: []},
        {1: {"s": {"p"}}})
    assert weak_counterexample(bad, inst) == "s"


def test_forall_witness_closed_loop():
    m = barcan_model()
    f = parse("forall #x . A1 #x", 1)
    w = forall_witness(m, "t", f)
    assert w is not None
    inst = subst_var(f.body, f.var, w)
    assert evaluate(m, "t", inst) is F
    # exists-witness on the desugared form
    g = parse("exists #x . !A1 #x", 1)
    assert evaluate(m, "t", g) is T
    w2 = forall_witness(m, "t", g)
    inst2 = subst_var(Not(A(1, Var("x"))), "x", w2)
    assert evaluate(m, "t", inst2) is T


def test_nested_quantifier_witness():
    m = barcan_model()
    # the quantifier fails at the successor t; the explanation surfaces
    w = forall_witness(m, "s", parse("X1 (forall #x . A1 #x)", 1))
    assert pretty(w) == "q"
    w = forall_witness(m, "t", parse("X1 !(forall #x . A1 #x)", 1))
    assert w is None  # fails because the negation is false at s, no witness
    w = forall_witness(m, "s", parse("p & K1 (forall #x . A1 #x)", 1))
    assert pretty(w) == "q"


def test_la_makes_awareness_and_definedness_operators_agree():
    # wherever every unaware proposition is missing from some considered
    # world's language, A_i p holds exactly when p is defined at all
    # considered worlds
    from awarecheck.model import validate
    checked = 0
    for seed in range(120):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        if not validate(m).la:
            continue
        for w in m.worlds:
            for p in m.props:
                astar = evaluate(m, w, AStar(1, Prop(p)))
                plain = evaluate(m, w, A(1, Prop(p)))
                assert astar is plain
                checked += 1
    assert checked > 20


def test_brute_force_forall_examples():
    m = barcan_model()
    probe = brute_force_forall(m, "s", A(1, Var("x")), "x", 1)
    assert probe.value is T and probe.stabilized
    probe = brute_force_forall(m, "t", A(1, Var("x")), "x", 1)
    assert probe.value is F and probe.stabilized
    assert pretty(probe.witness) == "q"
    with pytest.raises(ValueError):
        brute_force_forall(m, "s", A(1, Prop("p")), "x", 1)


def test_brute_force_budget():
    m = barcan_model()
    with pytest.raises(OracleBudgetExceeded):
        brute_force_forall(m, "t", A(1, Var("x")), "x", 4, cap=50)


def test_oracle_agrees_with_profile_forall():
    rng = random.Random(23)
    checked = 0
    for seed in range(30):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        memo = {}
        for _ in range(6):
            body = random_open_formula(rng, m.props, 1, "x", max_depth=2)
            for w in m.worlds:
                probe = brute_force_forall(m, w, body, "x", 2, memo=memo,
                                           cap=500_000)
                if not probe.stabilized and len(m.lang[w]) == 1:
                    probe = brute_force_forall(m, w, body, "x", 3, memo=memo,
                                               cap=500_000)
                if not probe.stabilized:
                    continue
                got = evaluate(m, w, Forall("x", body))
                assert got is probe.value, (seed, w, pretty(body))
                checked += 1
    assert checked > 200


def test_hr_agreement_on_constant_language_models():
    rng = random.Random(29)
    count = 0
    for m in itertools.islice(
            enumerate_models(1, 2, ["p", "q"], constant_language=True),
            0, 3000, 11):
        f = random_sentence(rng, m.props, 1, quantifier_prob=0.3)
        for w in m.worlds:
            three = evaluate(m, w, f)
            two = evaluate_hr(m, w, f)
            assert three is two
            count += 1
    assert count > 300


def test_hr_weak_validity_equals_plain_validity():
    # with one global language the two validity notions coincide
    rng = random.Random(31)
    for seed in range(15):
        m = generate_random(1, 3, ["p", "q"], frozenset(), seed=seed)
        m = AwarenessStructure(
            1, m.props, m.worlds,
            {w: set(m.props) for w in m.worlds}, m.val, m.rel,
            {i: {w: m.aware[i][w] for w in m.worlds} for i in m.aware})
        f = random_sentence(rng, m.props, 1, quantifier_prob=0.2)
        assert weakly_valid(m, f) == \
            all(evaluate(m, w, f) is T for w in m.worlds)


def test_xa_domain_differs_from_kxa_where_expected():
    # without K, the domain sentences can only take Boolean combinations of
    # the seed valuations and the (awareness-based) A/X profiles; a K-chain
    # separates worlds those operators cannot
    m = AwarenessStructure(
        1, ["p"], ["u", "v", "w"],
        {"u": {"p"}, "v": {"p"}, "w": {"p"}},
        {"u": {"p"}, "v": set(), "w": set()},
        {1: [("v", "u"), ("w", "v")]},
        {1: {"u": set(), "v": set(), "w": set()}})
    kxa = {(p.vocab, tuple(sorted(p.truth.items())))
           for p in realizable_profiles(m, KXA)}
    xa = {(p.vocab, tuple(sorted(p.truth.items())))
          for p in realizable_profiles(m, XA)}
    assert xa < kxa
    assert (frozenset(("p",)),
            (("u", True), ("v", True), ("w", False))) in kxa - xa


def test_memoization_consistency():
    # repeated evaluation through the cached context stays stable
    m = barcan_model()
    f = parse(PSI_UNCERTAIN, 1)
    first = [evaluate(m, w, f) for w in m.worlds]
    second = [evaluate(m, w, f) for w in m.worlds]
    assert first == second
