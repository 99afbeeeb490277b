import itertools
import json
import math
import random
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st

from folnerlab.groups import GroupError, ZdEmbedding, finite_by_free, free_abelian, lamplighter, standard_embedding
from folnerlab.setops import EmptySetError, FiniteGroupSet, product_size
from folnerlab.folner import box_metrics, lamplighter_standard
from folnerlab.inequalities import (
    ContainmentError,
    OracleGuardError,
    brute_force_oracle,
    check_discrete_bm,
    check_growth_implication,
    check_lemma_abelian_product,
    check_lemma_diff_size,
    check_lemma_same_size,
    check_lower_bound_claim,
    lemma_bound,
    sumset_floor_predicate,
    superadditive_predicate,
)

SCHEMA = json.loads((Path(__file__).parents[1] / "schemas" / "inequality_report.schema.json").read_text())
Z1, Z2 = free_abelian(1), free_abelian(2)


def box(G, *sides, offset=()):
    return FiniteGroupSet(G, [tuple(offset) + p for p in itertools.product(*[range(s) for s in sides])])


def simplex(d):
    G = free_abelian(d)
    pts = [(0,) * d] + [tuple(int(i == j) for j in range(d)) for i in range(d)]
    return FiniteGroupSet(G, pts)


def valid(rep):
    jsonschema.validate(rep.to_json(), SCHEMA)
    assert rep.holds == (rep.vacuous or rep.lhs >= rep.rhs - 1e-9)
    return rep


def test_dbm_examples():
    rep = valid(check_discrete_bm(box(Z2, 10, 10), box(Z2, 5, 5)))
    # {0..9}^2 + {0..4}^2 = {0..13}^2
    assert (rep.lhs, rep.delta, rep.d) == (196, pytest.approx(0.1), 2)
    assert rep.rhs == pytest.approx(45)
    assert rep.holds and not rep.vacuous

    rep = valid(check_discrete_bm(simplex(2), simplex(2)))
    assert rep.lhs == 6 and rep.delta == pytest.approx(2 / 3)
    assert rep.rhs < 0 and rep.vacuous and rep.holds
    assert rep.details["naive_bound"] == pytest.approx(12)

    rep = valid(check_discrete_bm(box(Z1, 8), FiniteGroupSet(Z1, [(5,)])))
    assert rep.lhs == 8 and rep.rhs == pytest.approx(6.75) and rep.holds


def test_dbm_errors():
    with pytest.raises(EmptySetError):
        check_discrete_bm(FiniteGroupSet(Z1), box(Z1, 2))
    with pytest.raises(GroupError):
        check_discrete_bm(box(Z1, 2), box(Z2, 2, 2))
    G = finite_by_free([2], 1)
    with pytest.raises(GroupError):
        check_discrete_bm(box(G, 2, 2), box(G, 2, 2))


def test_simplex_sumsets():
    for d, expect in [(2, 6), (3, 10), (4, 15)]:
        A = simplex(d)
        sums = {tuple(x + y for x, y in zip(a, b)) for a in A.raw for b in A.raw}
        assert len(sums) == product_size(A, A) == expect == math.comb(d + 2, 2)
        assert expect < 2**d * len(A)


def test_lemma_abelian_product_examples():
    G = finite_by_free([5], 2)
    emb = ZdEmbedding(G, [G.element((0, 1, 0)), G.element((0, 0, 1))])
    A = box(G, 1, 10, 10)
    B = FiniteGroupSet(G, [(r, 0, 0) for r in range(5)])
    ab, ba = check_lemma_abelian_product(A, B, emb)
    for rep in (ab, ba):
        valid(rep)
        assert rep.lhs == 500 and rep.holds
        assert rep.rhs == pytest.approx(0.2 * (10 + math.sqrt(5)) ** 2)
    assert ab.inputs_digest != ba.inputs_digest

    ab, _ = check_lemma_abelian_product(box(Z2, 10, 10), FiniteGroupSet(Z2, [(3, -7)]), standard_embedding(Z2, 2))
    assert ab.lhs == 100 and ab.rhs == pytest.approx(24.2)

    ab, ba = check_lemma_abelian_product(FiniteGroupSet(G, [(0, 2, 2)]), B, emb)
    assert ab.delta == 1 and ab.vacuous and ab.holds and ba.holds


def test_lemma_abelian_product_in_lamplighter():
    L = lamplighter()
    emb = standard_embedding(L, 1)
    A = FiniteGroupSet(L, [(k, ()) for k in range(6)])
    ab, ba = check_lemma_abelian_product(A, lamplighter_standard(2), emb)
    assert ab.holds and ba.holds
    with pytest.raises(ContainmentError):
        check_lemma_abelian_product(FiniteGroupSet(L, [(0, (1,))]), A, emb)


def test_lemma_same_size_examples():
    emb = standard_embedding(Z2, 2)
    rep = valid(check_lemma_same_size(box(Z2, 100, 100), emb))
    assert rep.lhs == 39601 and rep.rhs == pytest.approx(6400)
    rep = valid(check_lemma_same_size(FiniteGroupSet(Z2, [(0, 0)]), emb))
    assert rep.vacuous and rep.holds
    L = lamplighter()
    F2 = lamplighter_standard(2)
    rep = valid(check_lemma_same_size(F2, standard_embedding(L, 1)))
    assert len(F2) == 24 and rep.holds
    assert rep.lhs == len({(a.inverse() * b).data for a in F2 for b in F2})
    with pytest.raises(EmptySetError):
        check_lemma_same_size(FiniteGroupSet(Z2), emb)


def test_lemma_diff_size_examples():
    emb = standard_embedding(Z2, 2)
    rep = valid(check_lemma_diff_size(box(Z2, 100, 100), box(Z2, 50, 50), emb))
    assert rep.delta == pytest.approx(0.02) and rep.rhs < 0 and rep.vacuous
    rep = valid(check_lemma_diff_size(box(Z2, 400, 400), box(Z2, 400, 400), emb))
    assert rep.lhs == 638401 and rep.rhs == pytest.approx(345600) and rep.holds
    rep = valid(check_lemma_diff_size(FiniteGroupSet(Z2, [(0, 0)]), box(Z2, 7, 7), emb))
    assert rep.lhs == 49 and rep.rhs <= 0 and rep.holds
    with pytest.raises(GroupError):
        check_lemma_diff_size(box(Z1, 3), box(Z2, 2, 2), emb)


def test_lemma_bound_clamps_second_factor():
    # unclamped, two negative factors would give +28
    assert lemma_bound(1, 2, 1) <= 0
    assert lemma_bound(10, 1, Fraction(1, 100)) == pytest.approx(2 * 0.8 * 0.9 * 10)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=60))
def test_same_and_diff_size_agree_on_equal_sets(pts):
    F = FiniteGroupSet(Z2, pts)
    emb = standard_embedding(Z2, 2)
    a, b = check_lemma_same_size(F, emb), check_lemma_diff_size(F, F, emb)
    assert (a.lhs, a.rhs, a.delta, a.holds, a.vacuous) == (b.lhs, b.rhs, b.delta, b.holds, b.vacuous)


def test_growth_implication_synthetic():
    # d=5, C=2: the super-exponential regime; sizes chosen by hand
    from folnerlab.folner import SequenceMetrics

    tiny = Fraction(1, 1000)
    good = SequenceMetrics([1, 2, 3], [10, 100, 1000], [20, 200, 2000], [10, 150, 1500],
                           [10, 150, 1500], [tiny] * 3, 5)
    reps = check_growth_implication(good, 2)
    assert [r.verdict for r in reps] == ["holds", "holds"]
    for r in reps:
        valid(r)
    bad = SequenceMetrics([1, 2], [100, 110], [200, 220], [100, 200], [100, 200], [tiny] * 2, 5)
    (rep,) = check_growth_implication(bad, 2)
    assert rep.verdict == "fails" and not rep.holds and rep.rhs == 400
    lazy = SequenceMetrics([1, 2], [100, 110], [200, 220], [100, 300], [100, 300], [tiny] * 2, 5)
    (rep,) = check_growth_implication(lazy, 2)
    assert rep.verdict == "vacuous" and rep.details["reason"] == "tempered premise fails"


def test_growth_implication_guard_and_degenerate():
    m = box_metrics(5, range(1, 50))
    (rep,) = check_growth_implication(m, 40)
    assert rep.verdict == "not-applicable" and rep.holds
    valid(rep)
    F = box(Z2, 71, 71)
    emb = standard_embedding(Z2, 2)
    reps = check_growth_implication([F] * 4, Fraction(141, 71) ** 2, emb)
    assert len(reps) == 3 and {r.verdict for r in reps} == {"vacuous"}
    with pytest.raises(GroupError):
        check_growth_implication([F], 2)


def test_lower_bound_examples():
    m = box_metrics(1, range(1, 2000))
    rep = valid(check_lower_bound_claim(m))
    assert rep.holds and rep.details["violations"] == 0
    assert rep.lhs == Fraction(3999, 2000)
    G = finite_by_free([6], 2)
    from folnerlab.folner import construct_abelian_tempelman

    con = construct_abelian_tempelman(G, 12)
    rep = check_lower_bound_claim(con.sets, ZdEmbedding(G, [G.element((0, 1, 0)), G.element((0, 0, 1))]))
    assert rep.holds and rep.lhs <= 4


def test_reports_are_deterministic():
    A, B = box(Z2, 4, 3), simplex(2)
    assert check_discrete_bm(A, B) == check_discrete_bm(A, B)
    assert check_discrete_bm(A, B).inputs_digest != check_discrete_bm(B, A).inputs_digest


# --------------------------------------------------------------------------
# exhaustive oracle


def test_oracle_small_cases():
    v = brute_force_oracle(1, 3)
    assert v.pairs == 49 and v.all_hold and v.summary() == "49 pairs, 0 violations"
    # min sumset for sizes (a, b) in Z is a+b-1
    assert all(s == a + b - 1 for (a, b), s in v.min_sumset.items())
    assert brute_force_oracle(2, 2, sumset_floor_predicate).all_hold


def test_oracle_counterexample_path():
    v = brute_force_oracle(1, 2, superadditive_predicate)
    assert not v.all_hold
    assert v.first_counterexample == ([(0,)], [(0,)])


def test_oracle_workers_agree():
    a = brute_force_oracle(1, 6, superadditive_predicate, workers=1)
    b = brute_force_oracle(1, 6, superadditive_predicate, workers=3)
    assert (a.violations, a.first_counterexample, a.min_sumset) == (b.violations, b.first_counterexample, b.min_sumset)


def test_oracle_matches_setops():
    # the oracle's bit-grid sumsets against the product engine on a sample
    captured = []

    def spy(case):
        if case.a_mask % 37 == 0 and case.b_mask % 11 == 0:
            captured.append(case)
        return True

    brute_force_oracle(2, 2, spy)
    pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for case in captured:
        A = FiniteGroupSet(Z2, [p for j, p in enumerate(pts) if case.a_mask >> j & 1])
        B = FiniteGroupSet(Z2, [p for j, p in enumerate(pts) if case.b_mask >> j & 1])
        assert product_size(A, B) == case.sumset_size
        assert check_discrete_bm(A, B).delta == pytest.approx(float(case.a_defect))


def test_oracle_guard():
    with pytest.raises(OracleGuardError):
        brute_force_oracle(2, 4)


def test_dbm_random_pairs_in_z3():
    G = free_abelian(3)
    rng = random.Random(2024)
    cube = list(itertools.product(range(5), repeat=3))
    for _ in range(10_000):
        A = FiniteGroupSet(G, rng.sample(cube, rng.randint(1, 40)))
        B = FiniteGroupSet(G, rng.sample(cube, rng.randint(1, 40)))
        assert check_discrete_bm(A, B).holds
