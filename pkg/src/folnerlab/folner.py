"""Følner sequences in the supported groups and their averaging constants.

Index conventions: sequences are 1-based, ``F_n`` for ``n = 1..max_index``.
Constants are exact :class:`~fractions.Fraction` values; use ``float()`` for
display.
"""
from __future__ import annotations

import csv
import functools
import io
import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .groups import (
    GroupDescriptor,
    GroupElement,
    GroupError,
    Kind,
    ZdEmbedding,
)
from .lattice import echelon_coordinates, lattice_basis
from .setops import (
    FiniteGroupSet,
    format_set,
    inverse_set,
    invariance,
    parse_set,
    product_size,
    union_inverse_product_size,
)


class SequenceError(ValueError):
    pass


class ConstructionError(SequenceError):
    pass


class ExhaustionError(SequenceError):
    """Raised when a search runs past the last available index."""

    def __init__(self, message: str, partial: list[int]):
        super().__init__(message)
        self.partial = partial


class Family(str, Enum):
    BOXES = "boxes"
    LAMPLIGHTER_STANDARD = "lamplighter-standard"
    WREATH_STANDARD = "wreath-standard"
    ABELIAN_TEMPELMAN = "abelian-tempelman"
    EXPLICIT = "explicit"


_COMPATIBLE = {
    Family.BOXES: lambda g: g.is_abelian,
    Family.LAMPLIGHTER_STANDARD: lambda g: g.kind is Kind.LAMPLIGHTER,
    Family.WREATH_STANDARD: lambda g: g.kind is Kind.WREATH_ZZ,
    Family.ABELIAN_TEMPELMAN: lambda g: g.is_abelian,
    Family.EXPLICIT: lambda g: True,
}


@dataclass(frozen=True)
class FolnerSequenceSpec:
    group: GroupDescriptor
    family: Family
    max_index: int
    params: dict = field(default_factory=dict, hash=False, compare=False)
    sets: tuple[FiniteGroupSet, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not _COMPATIBLE[self.family](self.group):
            raise SequenceError(f"family {self.family.value} does not fit {self.group}")
        if self.max_index < 1:
            raise SequenceError("max_index must be positive")
        if self.family is Family.EXPLICIT:
            if len(self.sets) < self.max_index:
                raise SequenceError("explicit family needs max_index sets")
            if any(s.group != self.group for s in self.sets):
                raise SequenceError("explicit sets from another group")

    def height(self, n: int) -> int:
        return max(1, int(self.params.get("height_scale", 1)) * n)

    def to_json(self) -> dict:
        rec = {"group": str(self.group), "family": self.family.value,
               "params": dict(self.params), "max_index": self.max_index}
        if self.family is Family.EXPLICIT:
            rec["sets"] = [format_set(s).splitlines() for s in self.sets]
        return rec

    @classmethod
    def from_json(cls, rec: dict) -> FolnerSequenceSpec:
        from .dsl import parse_group_dsl

        group = parse_group_dsl(rec["group"])
        sets = tuple(parse_set(group, "\n".join(lines)) for lines in rec.get("sets", ()))
        return cls(group, Family(rec["family"]), int(rec["max_index"]), dict(rec.get("params", {})), sets)


def generate(spec: FolnerSequenceSpec, n: int) -> FiniteGroupSet:
    if not 1 <= n <= spec.max_index:
        raise SequenceError(f"index {n} outside 1..{spec.max_index}")
    g = spec.group
    if spec.family is Family.BOXES:
        return box_set(g, n)
    if spec.family is Family.LAMPLIGHTER_STANDARD:
        return lamplighter_standard(n)
    if spec.family is Family.WREATH_STANDARD:
        return wreath_standard(n, spec.height(n))
    if spec.family is Family.ABELIAN_TEMPELMAN:
        return _cached_construction(g, spec.max_index).steps[n - 1].F
    return spec.sets[n - 1]


def sequence(spec: FolnerSequenceSpec, indices: Iterable[int] | None = None) -> list[FiniteGroupSet]:
    if indices is None:
        indices = range(1, spec.max_index + 1)
    return [generate(spec, n) for n in indices]


def box_set(group: GroupDescriptor, n: int) -> FiniteGroupSet:
    """Full torsion part times {0..n}^d."""
    torsion = itertools.product(*[range(m) for m in group.moduli])
    free = itertools.product(range(n + 1), repeat=group.d)
    return FiniteGroupSet.from_raw(group, {t + x for t, x in itertools.product(torsion, free)})


def lamplighter_standard(n: int) -> FiniteGroupSet:
    """{(k, c) : 0 <= k <= n, supp c ⊆ [-n, 0]}.

    The lamp window sits at [-n, 0] because left multiplication by the lamp
    at the origin toggles position -k under the law (n,u)(m,v) = (n+m, u^m+v).
    """
    from .groups import lamplighter

    window = range(-n, 1)
    cfgs = [tuple(p for p, bit in zip(window, bits) if bit)
            for bits in itertools.product((0, 1), repeat=n + 1)]
    return FiniteGroupSet.from_raw(lamplighter(), {(k, c) for k in range(n + 1) for c in cfgs})


def wreath_standard(n: int, height: int) -> FiniteGroupSet:
    """{(k, c) : 0 <= k <= n, supp c ⊆ [-n, 0], |c_i| <= height}."""
    from .groups import wreath_zz

    window = range(-n, 1)
    vals = range(-height, height + 1)
    cfgs = [tuple((p, x) for p, x in zip(window, xs) if x)
            for xs in itertools.product(vals, repeat=n + 1)]
    return FiniteGroupSet.from_raw(wreath_zz(), {(k, c) for k in range(n + 1) for c in cfgs})


# --------------------------------------------------------------------------
# Tempel'man sequences in finite-rank abelian groups


def canonical_enumeration(group: GroupDescriptor) -> Iterator[GroupElement]:
    """Torsion unit generators, free unit vectors, then every other element
    by growing sup-norm of the free part. A finite group's list repeats."""
    if not group.is_abelian:
        raise GroupError("canonical enumeration is for abelian groups")
    t, d = group.torsion_rank, group.d
    seen = set()

    def emit(data):
        if data not in seen:
            seen.add(data)
            return True
        return False

    units = []
    for i in range(t + d):
        v = [0] * (t + d)
        v[i] = 1
        units.append(tuple(v))
    for u in units:
        if emit(u):
            yield GroupElement(group, u)
    residues = list(itertools.product(*[range(m) for m in group.moduli]))
    if d == 0:
        listed = [u for u in units if u in seen] + [r for r in residues if r not in seen]
        for r in itertools.cycle(listed):
            yield GroupElement(group, r)
    for radius in itertools.count():
        shell = [x for x in itertools.product(range(-radius, radius + 1), repeat=d)
                 if max(map(abs, x), default=0) == radius]
        for x in sorted(shell):
            for r in residues:
                if emit(r + x):
                    yield GroupElement(group, r + x)


@dataclass(frozen=True)
class TempelmanStep:
    n: int
    torsion: FiniteGroupSet
    basis: tuple[tuple[int, ...], ...]
    k: int
    F: FiniteGroupSet

    @property
    def free_rank(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class TempelmanConstruction:
    group: GroupDescriptor
    enumeration: tuple[GroupElement, ...]
    steps: tuple[TempelmanStep, ...]

    @property
    def sets(self) -> list[FiniteGroupSet]:
        return [s.F for s in self.steps]


def _torsion_closure(moduli, gens) -> set[tuple]:
    zero = (0,) * len(moduli)
    group = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % m for a, b, m in zip(x, g, moduli))
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return group


def _box_ratio(coeffs: Sequence[int], k: int) -> Fraction:
    r = Fraction(1)
    for c in coeffs:
        r *= Fraction(max(0, k + 1 - abs(c)), k + 1)
    return r


def _minimal(pred: Callable[[int], bool], start: int = 1) -> int:
    """Smallest k >= start with pred(k), for monotone pred: doubling then bisection."""
    if pred(start):
        return start
    lo, hi = start, start * 2
    while not pred(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def construct_abelian_tempelman(group: GroupDescriptor, N: int,
                                enumeration: Iterable[GroupElement] | None = None) -> TempelmanConstruction:
    """Increasing sets F_n = T_n + {sum c_j b_j : 0 <= c_j <= k(n)}.

    T_n is the subgroup generated by the torsion components of a_1..a_n and
    b_j is the Hermite basis of the lattice spanned by their free parts.
    k(n) is the least box size making F_n (1 - 1/n)-invariant under each a_i
    and containing F_{n-1}.
    """
    if not group.is_abelian:
        raise GroupError(f"{group} is not abelian")
    if enumeration is None:
        enumeration = canonical_enumeration(group)
    elems = tuple(itertools.islice(enumeration, N))
    if len(elems) < N:
        raise ConstructionError(f"enumeration ended after {len(elems)} elements")
    t = group.torsion_rank
    steps = []
    prev = None
    for n in range(1, N + 1):
        prefix = elems[:n]
        tors = _torsion_closure(group.moduli, [a.data[:t] for a in prefix])
        basis = lattice_basis([a.data[t:] for a in prefix]) if group.d else []
        coords = [echelon_coordinates(basis, a.data[t:]) for a in prefix]
        target = 1 - Fraction(1, n)

        k_min = 0
        if basis:
            k_min = 1
            if prev is not None and prev.basis and prev.k:
                # old box corners in new coordinates
                old = [echelon_coordinates(basis, b) for b in prev.basis]
                if any(c < 0 for row in old for c in row):
                    raise ConstructionError(
                        f"step {n}: F_{n - 1} cannot sit inside a box of the new lattice basis")
                k_min = max(k_min, max(sum(row[j] for row in old) * prev.k for j in range(len(basis))))
            k = _minimal(lambda k: all(_box_ratio(c, k) >= target for c in coords), k_min)
        else:
            k = 0
        torsion_set = FiniteGroupSet.from_raw(group, {r + (0,) * group.d for r in tors})
        F = _lattice_box(group, tors, basis, k)
        steps.append(TempelmanStep(n, torsion_set, tuple(map(tuple, basis)), k, F))
        prev = steps[-1]
    return TempelmanConstruction(group, elems, tuple(steps))


def _lattice_box(group, tors, basis, k) -> FiniteGroupSet:
    d = group.d
    points = set()
    for cs in itertools.product(range(k + 1), repeat=len(basis)):
        x = [0] * d
        for c, b in zip(cs, basis):
            for j in range(d):
                x[j] += c * b[j]
        points.add(tuple(x))
    return FiniteGroupSet.from_raw(group, {r + x for r in tors for x in points})


@functools.lru_cache(maxsize=16)
def _cached_construction(group: GroupDescriptor, N: int) -> TempelmanConstruction:
    return construct_abelian_tempelman(group, N)


# --------------------------------------------------------------------------
# averaging constants


def tempelman_constant(F: FiniteGroupSet) -> Fraction:
    """|F^-1 F| / |F|."""
    if not len(F):
        raise SequenceError("Tempel'man constant of an empty set")
    return Fraction(product_size(inverse_set(F), F), len(F))


def tempered_constants(seq: Sequence[FiniteGroupSet]) -> list[Fraction]:
    """|(∪_{i<n} F_i^-1) F_n| / |F_n|, with t_1 = 1."""
    if not seq:
        raise SequenceError("empty sequence")
    return [Fraction(union_inverse_product_size(seq[:i], F), len(F)) for i, F in enumerate(seq)]


def extract_tempered(source: FolnerSequenceSpec | Sequence[FiniteGroupSet], C,
                     count: int | None = None) -> list[int]:
    """Greedy tempered subsequence: n_1 = 1, then the next index whose set
    satisfies the tempered bound against all previously chosen sets.

    With ``count=None`` every index up to the end is scanned and the chosen
    ones returned; otherwise running out before ``count`` indices raises
    :class:`ExhaustionError` carrying the partial result.
    """
    C = Fraction(C)
    # C = 1 is accepted and simply exhausts once the sets grow
    if C < 1:
        raise SequenceError("C must be at least 1")
    if isinstance(source, FolnerSequenceSpec):
        last = source.max_index
        get = functools.partial(generate, source)
    else:
        last = len(source)
        get = lambda n: source[n - 1]  # noqa: E731
    chosen = [1]
    inverses = set(inverse_set(get(1)).rawset)
    group = get(1).group
    n = 1
    while count is None or len(chosen) < count:
        n += 1
        if n > last:
            if count is None:
                break
            raise ExhaustionError(f"no index in {chosen[-1] + 1}..{last} meets C={C}", chosen)
        F = get(n)
        U = FiniteGroupSet.from_raw(group, inverses)
        if product_size(U, F) <= C * len(F):
            chosen.append(n)
            inverses |= inverse_set(F).rawset
    return chosen


# --------------------------------------------------------------------------
# metrics and reports


@dataclass
class SequenceMetrics:
    """Exact counts for a sequence; either measured or in closed form."""
    indices: list[int]
    sizes: list[int]
    self_products: list[int]
    tempered_products: list[int]
    cross_products: list[int]
    defects: list[Fraction]
    d: int

    def digest_payload(self) -> str:
        return json.dumps([self.indices, self.sizes, self.self_products, self.tempered_products,
                           self.cross_products, [str(x) for x in self.defects], self.d])


def measure_sequence(seq: Sequence[FiniteGroupSet], embedding: ZdEmbedding,
                     indices: Sequence[int] | None = None) -> SequenceMetrics:
    if not seq:
        raise SequenceError("empty sequence")
    for F in seq:
        if F.group != embedding.group:
            raise SequenceError("sequence and embedding live in different groups")
    idx = list(indices) if indices is not None else list(range(1, len(seq) + 1))
    sizes = [len(F) for F in seq]
    selfp = [product_size(inverse_set(F), F) for F in seq]
    temp = [union_inverse_product_size(seq[:i], F) for i, F in enumerate(seq)]
    cross = [sizes[0]] + [product_size(inverse_set(seq[i - 1]), seq[i]) for i in range(1, len(seq))]
    defects = [invariance(F, embedding.images).exact_defect for F in seq]
    return SequenceMetrics(idx, sizes, selfp, temp, cross, defects, embedding.d)


def box_metrics(d: int, indices: Sequence[int]) -> SequenceMetrics:
    """Closed forms for F_n = {0..n}^d in Z^d against the unit vectors.

    |F_n| = (n+1)^d, |F_n^-1 F_n| = (2n+1)^d, and for m < n
    |F_m^-1 F_n| = (n+m+1)^d; the union of earlier inverses is the largest.
    """
    idx = list(indices)
    sizes = [(n + 1) ** d for n in idx]
    selfp = [(2 * n + 1) ** d for n in idx]
    temp = [sizes[0]] + [(n + max(idx[:i]) + 1) ** d for i, n in enumerate(idx) if i]
    cross = [sizes[0]] + [(idx[i] + idx[i - 1] + 1) ** d for i in range(1, len(idx))]
    defects = [Fraction(1, n + 1) for n in idx]
    return SequenceMetrics(idx, sizes, selfp, temp, cross, defects, d)


@dataclass
class SequenceReport:
    indices: list[int]
    sizes: list[int]
    tempelman: list[Fraction]
    tempered: list[Fraction]
    growth: list[Fraction | None]
    defects: list[Fraction]

    @classmethod
    def from_metrics(cls, m: SequenceMetrics) -> SequenceReport:
        c = [Fraction(p, s) for p, s in zip(m.self_products, m.sizes)]
        t = [Fraction(p, s) for p, s in zip(m.tempered_products, m.sizes)]
        g = [None] + [Fraction(m.sizes[i], m.sizes[i - 1]) for i in range(1, len(m.sizes))]
        return cls(list(m.indices), list(m.sizes), c, t, g, list(m.defects))

    def rows(self) -> list[dict]:
        return [{"n": n, "size": s, "c_n": float(c), "t_n": float(t),
                 "ratio": None if r is None else float(r), "defect": float(dl)}
                for n, s, c, t, r, dl in zip(self.indices, self.sizes, self.tempelman,
                                             self.tempered, self.growth, self.defects)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["n", "size", "c_n", "t_n", "ratio", "defect"], lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                        for k, v in row.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.rows(), indent=2, sort_keys=True)


def sequence_report(seq: Sequence[FiniteGroupSet], embedding: ZdEmbedding,
                    indices: Sequence[int] | None = None) -> SequenceReport:
    return SequenceReport.from_metrics(measure_sequence(seq, embedding, indices))
