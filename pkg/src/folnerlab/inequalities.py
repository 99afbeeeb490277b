"""Checks of the sumset and product-set inequalities on concrete inputs.

Every check returns an :class:`InequalityReport`. A bound whose right-hand
side is not positive is *vacuous*: it counts as holding but is flagged so that
vacuous instances cannot pad pass statistics.

Lemma bounds carry the factor ``(1 - d*sqrt(delta))``, a lower bound on a mass
fraction; it is clamped at zero so that two negative factors never multiply
into a spurious positive bound.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .folner import SequenceMetrics, measure_sequence
from .groups import GroupError, Kind, ZdEmbedding, standard_embedding
from .setops import (
    FiniteGroupSet,
    EmptySetError,
    format_set,
    inverse_set,
    invariance,
    product_size,
)

SLACK = 1e-9

DBM = "DBM"
LEM_AB = "LEM_AB"
LEM_FF = "LEM_FF"
LEM_F1F2 = "LEM_F1F2"
LOWER_BOUND = "LOWER_BOUND"
GROWTH = "GROWTH"


class ContainmentError(GroupError):
    pass


class OracleGuardError(ValueError):
    pass


@dataclass
class InequalityReport:
    statement: str
    lhs: int | Fraction
    rhs: float
    delta: float
    d: int
    holds: bool
    vacuous: bool
    inputs_digest: str
    verdict: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.verdict:
            self.verdict = "vacuous" if self.vacuous else ("holds" if self.holds else "fails")

    def to_json(self) -> dict:
        lhs = self.lhs if isinstance(self.lhs, int) else float(self.lhs)
        rec = {"statement": self.statement, "lhs": lhs, "rhs": self.rhs, "delta": self.delta,
               "d": self.d, "holds": self.holds, "vacuous": self.vacuous,
               "inputs_digest": self.inputs_digest, "verdict": self.verdict}
        if self.details:
            rec["details"] = self.details
        return rec


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(str(p).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _set_digest(F: FiniteGroupSet) -> str:
    return _digest(F.group, format_set(F))


def _embedding_digest(emb: ZdEmbedding) -> str:
    return _digest(*(e.data for e in emb.images))


def _verdict(statement, lhs, rhs, delta, d, digest, **details) -> InequalityReport:
    vacuous = rhs <= 0
    holds = vacuous or lhs >= rhs - SLACK
    return InequalityReport(statement, lhs, rhs, float(delta), d, holds, vacuous, digest,
                            details=details)


def bm_bound(a: int, b: int, d: int, delta) -> float:
    """(1 - 2 d^2 delta) (|A|^{1/d} + |B|^{1/d})^d."""
    return float(1 - 2 * d * d * Fraction(delta)) * (a ** (1 / d) + b ** (1 / d)) ** d


def lemma_bound(size: int, d: int, delta) -> float:
    """2^d (1 - 2 d^2 sqrt(delta)) max(0, 1 - d sqrt(delta)) size."""
    r = math.sqrt(delta)
    return 2**d * (1 - 2 * d * d * r) * max(0.0, 1 - d * r) * size


def _require(*sets):
    for s in sets:
        if not len(s):
            raise EmptySetError("inequality checks need nonempty sets")


def check_discrete_bm(A: FiniteGroupSet, B: FiniteGroupSet) -> InequalityReport:
    """|A + B| against the invariance-weighted Brunn-Minkowski bound in Z^d."""
    _require(A, B)
    if A.group.kind is not Kind.FREE_ABELIAN or B.group != A.group:
        raise GroupError("discrete Brunn-Minkowski needs two subsets of one Z^d")
    d = A.group.d
    delta = invariance(A, standard_embedding(A.group, d).images).exact_defect
    lhs = product_size(A, B)
    rhs = bm_bound(len(A), len(B), d, delta)
    naive = (len(A) ** (1 / d) + len(B) ** (1 / d)) ** d
    return _verdict(DBM, lhs, rhs, delta, d, _digest(_set_digest(A), _set_digest(B)),
                    naive_bound=naive)


def check_lemma_abelian_product(A: FiniteGroupSet, B: FiniteGroupSet,
                                embedding: ZdEmbedding) -> tuple[InequalityReport, InequalityReport]:
    """|AB| and |BA| for A inside the embedded Z^d and arbitrary finite B."""
    _require(A, B)
    if not A.group == B.group == embedding.group:
        raise GroupError("sets and embedding must share a group")
    outside = [a for a in A if embedding.coordinates(a) is None]
    if outside:
        raise ContainmentError(f"{len(outside)} elements of A lie outside the embedded Z^d, e.g. {outside[0]}")
    d = embedding.d
    delta = invariance(A, embedding.images).exact_defect
    rhs = bm_bound(len(A), len(B), d, delta)
    base = _digest(_set_digest(A), _set_digest(B), _embedding_digest(embedding))
    ab = _verdict(LEM_AB, product_size(A, B), rhs, delta, d, _digest(base, "AB"), order="AB")
    ba = _verdict(LEM_AB, product_size(B, A), rhs, delta, d, _digest(base, "BA"), order="BA")
    return ab, ba


def check_lemma_same_size(F: FiniteGroupSet, embedding: ZdEmbedding) -> InequalityReport:
    """|F^-1 F| against 2^d (1 - 2d^2 sqrt δ)(1 - d sqrt δ)|F|."""
    _require(F)
    d = embedding.d
    delta = invariance(F, embedding.images).exact_defect
    lhs = product_size(inverse_set(F), F)
    rhs = lemma_bound(len(F), d, delta)
    return _verdict(LEM_FF, lhs, rhs, delta, d, _digest(_set_digest(F), _embedding_digest(embedding)))


def check_lemma_diff_size(F1: FiniteGroupSet, F2: FiniteGroupSet, embedding: ZdEmbedding) -> InequalityReport:
    """|F1^-1 F2| against the same bound with min(|F1|, |F2|), δ the larger defect."""
    _require(F1, F2)
    if F1.group != F2.group:
        raise GroupError("F1 and F2 live in different groups")
    d = embedding.d
    delta = max(invariance(F1, embedding.images).exact_defect,
                invariance(F2, embedding.images).exact_defect)
    lhs = product_size(inverse_set(F1), F2)
    rhs = lemma_bound(min(len(F1), len(F2)), d, delta)
    return _verdict(LEM_F1F2, lhs, rhs, delta, d,
                    _digest(_set_digest(F1), _set_digest(F2), _embedding_digest(embedding)))


def _metrics(seq, embedding) -> SequenceMetrics:
    if isinstance(seq, SequenceMetrics):
        if embedding is not None and embedding.d != seq.d:
            raise GroupError("metrics were measured against a different dimension")
        return seq
    if embedding is None:
        raise GroupError("an embedding is needed to measure a list of sets")
    return measure_sequence(seq, embedding)


def check_growth_implication(seq: Sequence[FiniteGroupSet] | SequenceMetrics, C,
                             embedding: ZdEmbedding | None = None) -> list[InequalityReport]:
    """Evaluate |F_n| >= (2^{d-2}/C)|F_{n-1}| past the point where every
    defect is at most 1/(16 d^2).

    Verdicts: ``not-applicable`` (threshold never reached for good),
    ``vacuous`` (2^{d-2} <= C, or the tempered premise
    |F_{n-1}^-1 F_n| <= C|F_n| fails), otherwise ``holds``/``fails``.
    """
    m = _metrics(seq, embedding)
    d = m.d
    C = Fraction(C)
    threshold = Fraction(1, 16 * d * d)
    digest = _digest(m.digest_payload(), C)
    start = len(m.defects)
    while start > 0 and m.defects[start - 1] <= threshold:
        start -= 1
    if start >= len(m.defects) - 1:
        return [InequalityReport(GROWTH, 0, 0.0, float(threshold), d, True, True, digest,
                                 verdict="not-applicable",
                                 details={"reason": "invariance threshold not reached on two consecutive sets",
                                          "threshold": float(threshold)})]
    factor = Fraction(2) ** (d - 2) / C
    superexp = Fraction(2) ** (d - 2) > C
    out = []
    for i in range(start + 1, len(m.sizes)):
        lhs = m.sizes[i]
        rhs_exact = factor * m.sizes[i - 1]
        ratio_ok = lhs >= rhs_exact
        premise = m.cross_products[i] <= C * m.sizes[i]
        delta = max(m.defects[i], m.defects[i - 1])
        lemma_rhs = lemma_bound(min(m.sizes[i], m.sizes[i - 1]), d, delta)
        details = {"n": m.indices[i], "ratio_bound_holds": ratio_ok, "tempered_premise": premise,
                   "cross_product": m.cross_products[i], "lemma_rhs": lemma_rhs,
                   "lemma_holds": m.cross_products[i] >= lemma_rhs - SLACK}
        if not superexp:
            verdict, details["reason"] = "vacuous", "d <= 2 + log2(C)"
        elif not premise:
            verdict, details["reason"] = "vacuous", "tempered premise fails"
        else:
            verdict = "holds" if ratio_ok else "fails"
        out.append(InequalityReport(GROWTH, lhs, float(rhs_exact), float(delta), d,
                                    verdict != "fails", verdict == "vacuous", _digest(digest, i),
                                    verdict=verdict, details=details))
    return out


def check_lower_bound_claim(seq: Sequence[FiniteGroupSet] | SequenceMetrics,
                            embedding: ZdEmbedding | None = None) -> InequalityReport:
    """Per index, c_n >= 2^d (1 - 2d^2 sqrt δ_n)(1 - d sqrt δ_n); reports sup c_n against 2^d.

    ``lhs`` is sup c_n and ``rhs`` the largest finite-n bound; ``holds``
    means every index satisfies its own bound.
    """
    m = _metrics(seq, embedding)
    d = m.d
    consts = [Fraction(p, s) for p, s in zip(m.self_products, m.sizes)]
    bounds = [lemma_bound(1, d, dl) for dl in m.defects]
    bad = [i for i, (c, b) in enumerate(zip(consts, bounds)) if c < b - SLACK]
    sup_c = max(consts)
    sup_b = max(bounds)
    details = {"limit": 2**d, "sup_c": float(sup_c), "gap": float(2**d - sup_c),
               "checked": len(consts), "vacuous_indices": sum(b <= 0 for b in bounds),
               "violations": len(bad)}
    if bad:
        details["first_violation"] = m.indices[bad[0]]
    return InequalityReport(LOWER_BOUND, sup_c, sup_b, float(min(m.defects)), d, not bad,
                            sup_b <= 0, _digest(m.digest_payload()), details=details)


# --------------------------------------------------------------------------
# exhaustive oracle over subsets of a box


class OracleCase(NamedTuple):
    d: int
    a_size: int
    b_size: int
    sumset_size: int
    a_defect: Fraction
    a_mask: int
    b_mask: int


def dbm_predicate(case: OracleCase) -> bool:
    rhs = bm_bound(case.a_size, case.b_size, case.d, case.a_defect)
    return case.sumset_size >= rhs - SLACK


def sumset_floor_predicate(case: OracleCase) -> bool:
    return case.sumset_size >= case.a_size + case.b_size - 1


def superadditive_predicate(case: OracleCase) -> bool:
    # false already for two singletons; exercises the counterexample path
    return case.sumset_size >= case.a_size + case.b_size


PREDICATES: dict[str, Callable[[OracleCase], bool]] = {
    "dbm": dbm_predicate,
    "sumset-floor": sumset_floor_predicate,
    "superadditive": superadditive_predicate,
}


@dataclass
class OracleVerdict:
    d: int
    box_side: int
    pairs: int
    violations: int
    first_counterexample: tuple[list[tuple[int, ...]], list[tuple[int, ...]]] | None
    min_sumset: dict[tuple[int, int], int]

    @property
    def all_hold(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        return f"{self.pairs} pairs, {self.violations} violations"


def _box_points(d, side):
    import itertools

    return [tuple(reversed(p)) for p in itertools.product(range(side), repeat=d)]


def _subset_table(d, side):
    """Per nonempty subset: grid mask, sumset shift keys, size, defect.

    Points live on a grid of radix 2*side so that sums and unit shifts never
    wrap between rows.
    """
    pts = _box_points(d, side)
    radix = 2 * side
    keys = [sum(x * radix**i for i, x in enumerate(p)) for p in pts]
    unit = [radix**i for i in range(d)]
    table = [None]
    for mask in range(1, 1 << len(pts)):
        ks = [keys[j] for j in range(len(pts)) if mask >> j & 1]
        grid = 0
        for k in ks:
            grid |= 1 << k
        size = len(ks)
        worst = min((grid & (grid << u)).bit_count() for u in unit)
        table.append((grid, ks, size, Fraction(size - worst, size)))
    return pts, table


def _sweep(args):
    d, side, predicate, lo, hi = args
    pts, table = _subset_table(d, side)
    nsub = len(table) - 1
    violations = 0
    first = None
    mins = {}
    for ia in range(lo, hi):
        _, ka, sa, da = table[ia]
        for ib in range(1, nsub + 1):
            gb, _, sb, _ = table[ib]
            acc = 0
            for k in ka:
                acc |= gb << k
            s = acc.bit_count()
            key = (sa, sb)
            if s < mins.get(key, 1 << 60):
                mins[key] = s
            if not predicate(OracleCase(d, sa, sb, s, da, ia, ib)):
                violations += 1
                if first is None:
                    first = (ia, ib)
    return violations, first, mins


def brute_force_oracle(d: int, box_side: int, predicate: Callable[[OracleCase], bool] = dbm_predicate,
                       workers: int = 1) -> OracleVerdict:
    """Evaluate ``predicate`` on every pair of nonempty subsets of {0..box_side-1}^d.

    Sumsets are computed on bit grids, independently of :mod:`folnerlab.setops`.
    """
    npts = box_side**d
    nsub = (1 << npts) - 1
    if nsub * nsub > 2**26:
        raise OracleGuardError(f"{nsub}^2 subset pairs exceed the 2^26 guard")
    bounds = [1 + (nsub * i) // workers for i in range(workers + 1)]
    jobs = [(d, box_side, predicate, bounds[i], bounds[i + 1]) for i in range(workers)
            if bounds[i] < bounds[i + 1]]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_sweep, jobs))
    else:
        parts = [_sweep(j) for j in jobs]
    violations = sum(p[0] for p in parts)
    firsts = [p[1] for p in parts if p[1] is not None]
    mins = {}
    for _, _, m in parts:
        for k, v in m.items():
            mins[k] = min(v, mins.get(k, v))
    first = None
    if firsts:
        ia, ib = min(firsts)
        pts = _box_points(d, box_side)
        first = ([p for j, p in enumerate(pts) if ia >> j & 1], [p for j, p in enumerate(pts) if ib >> j & 1])
    return OracleVerdict(d, box_side, nsub * nsub, violations, first, dict(sorted(mins.items())))
