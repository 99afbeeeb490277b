"""Finite subsets of a group and the counting quantities built from them:
|AB|, |A^-1|, |gA ∩ A| / |A| and the tempered product (∪ F_i^-1) F.

Products dominate runtime, so :func:`product_size` dispatches on the group:

* abelian groups: dense FFT convolution of indicator grids (torsion axes
  folded cyclically), or chunked numpy outer sums of mixed-radix keys when the
  bounding box is too sparse;
* lamplighter: lamp configurations as bitmasks, grouped by shift, with the
  common coordinate stabilizer of the right factor quotiented out before the
  XOR sumsets are formed;
* everything else: the plain double loop over the group law.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .groups import (
    COORD_BOUND,
    CoordinateOverflowError,
    DescriptorMismatchError,
    GroupDescriptor,
    GroupElement,
    Kind,
    law,
)

LEFT = "left"
RIGHT = "right"

_PYTHON_PAIRS = 4096
_DENSE_CELLS = 20_000_000
_OUTER_CHUNK = 4_000_000
# beyond these pair counts the sparse engines would run for hours or exhaust memory
_MAX_OUTER_PAIRS = 10**10
_MAX_PYTHON_PAIRS = 2 * 10**8


class EmptySetError(ValueError):
    pass


class ProductTooLargeError(ValueError):
    pass


class FiniteGroupSet:
    """Duplicate-free finite set of elements of one group.

    Elements are stored as canonical raw tuples; iteration yields
    :class:`GroupElement` in sorted (canonical) order.
    """

    __slots__ = ("group", "_elements", "_sorted")

    def __init__(self, group: GroupDescriptor, elements: Iterable = ()):
        canon = law(group).canonical
        raw = set()
        for e in elements:
            if isinstance(e, GroupElement):
                if e.group != group:
                    raise DescriptorMismatchError(f"{e} not in {group}")
                raw.add(e.data)
            else:
                raw.add(canon(e))
        self.group = group
        self._elements = frozenset(raw)
        self._sorted = None

    @classmethod
    def from_raw(cls, group: GroupDescriptor, raw: Iterable[tuple]) -> FiniteGroupSet:
        """Build from data tuples already in canonical form (unchecked)."""
        s = object.__new__(cls)
        s.group = group
        s._elements = raw if isinstance(raw, frozenset) else frozenset(raw)
        s._sorted = None
        return s

    @property
    def rawset(self) -> frozenset:
        return self._elements

    @property
    def raw(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._elements))
        return self._sorted

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return (GroupElement(self.group, x) for x in self.raw)

    def __contains__(self, g):
        if isinstance(g, GroupElement):
            return g.group == self.group and g.data in self._elements
        return g in self._elements

    def __eq__(self, other):
        if not isinstance(other, FiniteGroupSet):
            return NotImplemented
        return self.group == other.group and self._elements == other._elements

    def __hash__(self):
        return hash((self.group, self._elements))

    def __repr__(self):
        head = ", ".join(str(x) for x in self.raw[:4])
        more = ", ..." if len(self) > 4 else ""
        return f"FiniteGroupSet({self.group}, {len(self)} elements: {head}{more})"

    def issubset(self, other: FiniteGroupSet) -> bool:
        _check_same(self, other)
        return self._elements <= other._elements

    def union(self, other: FiniteGroupSet) -> FiniteGroupSet:
        _check_same(self, other)
        return FiniteGroupSet.from_raw(self.group, self._elements | other._elements)


def _check_same(*sets: FiniteGroupSet) -> None:
    groups = {s.group for s in sets}
    if len(groups) > 1:
        raise DescriptorMismatchError(f"sets live in different groups: {sorted(map(str, groups))}")


def _check_element(g: GroupElement, A: FiniteGroupSet) -> None:
    if g.group != A.group:
        raise DescriptorMismatchError(f"{g} not in {A.group}")


# --------------------------------------------------------------------------
# basic operations


def inverse_set(A: FiniteGroupSet) -> FiniteGroupSet:
    inv = law(A.group).inv
    return FiniteGroupSet.from_raw(A.group, {inv(a) for a in A.rawset})


def translate(g: GroupElement, A: FiniteGroupSet, side: str = LEFT) -> FiniteGroupSet:
    _check_element(g, A)
    mul = law(A.group).mul
    x = g.data
    if side == LEFT:
        out = {mul(x, a) for a in A.rawset}
    elif side == RIGHT:
        out = {mul(a, x) for a in A.rawset}
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    return FiniteGroupSet.from_raw(A.group, out)


@dataclass(frozen=True)
class InvarianceReport:
    generators: tuple[GroupElement, ...]
    exact_ratios: tuple[Fraction, ...]
    side: str = LEFT

    @property
    def ratios(self) -> list[float]:
        return [float(r) for r in self.exact_ratios]

    @property
    def exact_defect(self) -> Fraction:
        return 1 - min(self.exact_ratios, default=Fraction(1))

    @property
    def defect(self) -> float:
        return float(self.exact_defect)


def overlap_count(g: GroupElement, F: FiniteGroupSet, side: str = LEFT) -> int:
    """|gF ∩ F| (or |Fg ∩ F|)."""
    _check_element(g, F)
    mul = law(F.group).mul
    x = g.data
    elems = F.rawset
    if side == LEFT:
        return sum(1 for f in elems if mul(x, f) in elems)
    if side == RIGHT:
        return sum(1 for f in elems if mul(f, x) in elems)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def invariance(F: FiniteGroupSet, gens: Sequence[GroupElement], side: str = LEFT) -> InvarianceReport:
    if not len(F):
        raise EmptySetError("invariance of an empty set")
    n = len(F)
    ratios = tuple(Fraction(overlap_count(g, F, side), n) for g in gens)
    return InvarianceReport(tuple(gens), ratios, side)


def product(A: FiniteGroupSet, B: FiniteGroupSet) -> FiniteGroupSet:
    """AB = {ab : a in A, b in B}."""
    _check_same(A, B)
    return FiniteGroupSet.from_raw(A.group, _product(A, B, materialize=True))


def product_size(A: FiniteGroupSet, B: FiniteGroupSet) -> int:
    """|AB| without building the set when a fast path allows it."""
    _check_same(A, B)
    return _product(A, B, materialize=False)


def union_inverse_product(prefix: Sequence[FiniteGroupSet], F: FiniteGroupSet) -> FiniteGroupSet:
    """(∪_i prefix_i^-1) F; an empty prefix acts as {identity}."""
    _check_same(F, *prefix)
    if not prefix:
        return F
    return product(_union_of_inverses(prefix, F.group), F)


def union_inverse_product_size(prefix: Sequence[FiniteGroupSet], F: FiniteGroupSet) -> int:
    _check_same(F, *prefix)
    if not prefix:
        return len(F)
    return product_size(_union_of_inverses(prefix, F.group), F)


def _union_of_inverses(prefix, group):
    inv = law(group).inv
    return FiniteGroupSet.from_raw(group, {inv(a) for P in prefix for a in P.rawset})


# --------------------------------------------------------------------------
# product engines


def _product(A: FiniteGroupSet, B: FiniteGroupSet, materialize: bool):
    if not len(A) or not len(B):
        return frozenset() if materialize else 0
    group = A.group
    if len(A) * len(B) > _PYTHON_PAIRS:
        if group.is_abelian:
            return _abelian_product(group, A.raw, B.raw, materialize)
        if group.kind is Kind.LAMPLIGHTER:
            return _lamplighter_product(A.rawset, B.rawset, materialize)
    return _python_product(group, A.rawset, B.rawset, materialize)


def _python_product(group, A, B, materialize):
    if len(A) * len(B) > _MAX_PYTHON_PAIRS:
        raise ProductTooLargeError(f"{len(A)} x {len(B)} pairs exceed the {_MAX_PYTHON_PAIRS:.0e} budget")
    lw = law(group)
    mul = lw.mul
    out = {mul(a, b) for a in A for b in B}
    if max(map(lw.max_abs, out)) > COORD_BOUND:
        raise CoordinateOverflowError("product leaves the coordinate range")
    return frozenset(out) if materialize else len(out)


def _abelian_product(group, A, B, materialize):
    t = group.torsion_rank
    a = np.array(A, dtype=object if _too_wide(A, t) else np.int64)
    b = np.array(B, dtype=object if _too_wide(B, t) else np.int64)
    if a.dtype == object or b.dtype == object:
        return _python_product(group, frozenset(A), frozenset(B), materialize)
    k = a.shape[1]
    lo_a, hi_a = a.min(axis=0), a.max(axis=0)
    lo_b, hi_b = b.min(axis=0), b.max(axis=0)
    for i, m in enumerate(group.moduli):
        lo_a[i] = lo_b[i] = 0
        hi_a[i] = hi_b[i] = m - 1
    if max(abs(int(x)) for x in np.concatenate([lo_a + lo_b, hi_a + hi_b])) > COORD_BOUND:
        raise CoordinateOverflowError("product leaves the coordinate range")
    ext_a = hi_a - lo_a + 1
    ext_b = hi_b - lo_b + 1
    ext = ext_a + ext_b - 1
    cells = 1
    for e in ext:
        cells *= int(e)
    lo = lo_a + lo_b
    if cells <= _DENSE_CELLS:
        ga = np.zeros(tuple(ext_a), dtype=np.float64)
        ga[tuple((a - lo_a).T)] = 1.0
        gb = np.zeros(tuple(ext_b), dtype=np.float64)
        gb[tuple((b - lo_b).T)] = 1.0
        hit = fftconvolve(ga, gb) > 0.5
        for i, m in enumerate(group.moduli):
            head = np.take(hit, range(m), axis=i)
            tail = np.take(hit, range(m, 2 * m - 1), axis=i)
            pad = [(0, 0)] * k
            pad[i] = (0, 1)
            hit = head | np.pad(tail, pad)
        if not materialize:
            return int(hit.sum())
        pts = np.argwhere(hit) + lo
        return frozenset(map(tuple, pts.tolist()))
    # sparse boxes: mixed-radix keys, sums stay collision-free
    if cells > 2**62:
        return _python_product(group, frozenset(A), frozenset(B), materialize)
    strides = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        strides[i] = strides[i + 1] * ext[i + 1]
    if len(a) * len(b) > _MAX_OUTER_PAIRS:
        raise ProductTooLargeError(
            f"{len(a)} x {len(b)} pairs on a {cells}-cell grid exceed the {_MAX_OUTER_PAIRS:.0e} budget")
    ka = (a - lo_a) @ strides
    kb = (b - lo_b) @ strides
    chunk = max(1, _OUTER_CHUNK // len(kb))
    keys = np.empty(0, dtype=np.int64)
    for i in range(0, len(ka), chunk):
        keys = np.union1d(keys, (ka[i:i + chunk, None] + kb[None, :]).ravel())
    if not group.moduli and not materialize:
        return len(keys)
    coords = np.empty((len(keys), k), dtype=np.int64)
    rem = keys.copy()
    for i in range(k):
        coords[:, i], rem = np.divmod(rem, strides[i])
    coords += lo
    for i, m in enumerate(group.moduli):
        coords[:, i] %= m
    if group.moduli:
        coords = np.unique(coords, axis=0)
    if not materialize:
        return len(coords)
    return frozenset(map(tuple, coords.tolist()))


def _too_wide(rows, t):
    return any(abs(x) > 2**40 for r in rows for x in r[t:])


def _lamplighter_product(A, B, materialize):
    # (n, u)(m, v) = (n + m, (u >> m) xor v) with positions stored at bit p + offset
    top = max(m for m, _ in B)
    lo = min([0] + [u[0] - top for _, u in A if u] + [v[0] for _, v in B if v])
    offset = -lo
    b_groups = defaultdict(set)
    for m, v in B:
        b_groups[m].add(_mask(v, offset))
    a_groups = defaultdict(set)
    for n, u in A:
        a_groups[n].add(_mask(u, offset))

    stab = _common_stabilizer(b_groups.values())
    keep = ~stab
    b_quot = {m: sorted({v & keep for v in vs}) for m, vs in b_groups.items()}
    free_bits = stab.bit_count()

    results = defaultdict(list)
    for n, us in a_groups.items():
        for m, vs in b_quot.items():
            xs = sorted({((u >> m) if m >= 0 else (u << -m)) & keep for u in us})
            results[n + m].append(_xor_sumset(xs, vs))
    sizes = {}
    merged = {}
    for s, parts in results.items():
        if all(isinstance(p, np.ndarray) for p in parts):
            u = np.unique(np.concatenate(parts))
            sizes[s] = len(u)
            merged[s] = u
        else:
            u = set()
            for p in parts:
                u.update(int(x) for x in p)
            sizes[s] = len(u)
            merged[s] = u
    if not materialize:
        return sum(sizes.values()) << free_bits
    bits = [i for i in range(stab.bit_length()) if stab >> i & 1]
    span = [0]
    for i in bits:
        span += [x | (1 << i) for x in span]
    out = set()
    for s, masks in merged.items():
        for r in masks:
            r = int(r)
            for x in span:
                out.add((s, _positions(r ^ x, offset)))
    return frozenset(out)


def _mask(positions, offset):
    m = 0
    for p in positions:
        m |= 1 << (p + offset)
    return m


def _positions(mask, offset):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i - offset)
        mask >>= 1
        i += 1
    return tuple(out)


def _common_stabilizer(groups) -> int:
    """Bits b such that every group of masks is closed under toggling b."""
    groups = list(groups)
    candidates = 0
    for g in groups:
        for v in g:
            candidates |= v
    stab = 0
    for i in range(candidates.bit_length()):
        bit = 1 << i
        if candidates & bit and all(all(v ^ bit in g for v in g) for g in groups):
            stab |= bit
    return stab


def _xor_sumset(xs, ys):
    width = max(max(xs, default=0), max(ys, default=0)).bit_length()
    if width <= 63 and len(xs) * len(ys) > 64:
        x = np.array(xs, dtype=np.uint64)
        y = np.array(ys, dtype=np.uint64)
        chunk = max(1, _OUTER_CHUNK // len(y))
        parts = [np.unique(np.bitwise_xor.outer(x[i:i + chunk], y)) for i in range(0, len(x), chunk)]
        return np.unique(np.concatenate(parts))
    return {a ^ b for a in xs for b in ys}


# --------------------------------------------------------------------------
# set literal files


def format_element(group: GroupDescriptor, data: tuple) -> str:
    if group.is_abelian:
        return ",".join(str(x) for x in data)
    shift, cfg = data
    if group.kind is Kind.LAMPLIGHTER:
        return f"{shift};" + ",".join(str(p) for p in cfg)
    return f"{shift};" + ",".join(f"{p}:{x}" for p, x in cfg)


def parse_element(group: GroupDescriptor, line: str) -> GroupElement:
    line = line.strip()
    try:
        if group.is_abelian:
            return GroupElement(group, [int(x) for x in line.split(",")])
        shift, _, rest = line.partition(";")
        items = [x for x in rest.split(",") if x.strip()]
        if group.kind is Kind.LAMPLIGHTER:
            return GroupElement(group, (int(shift), [int(p) for p in items]))
        pairs = [tuple(int(y) for y in x.split(":")) for x in items]
        if any(len(p) != 2 for p in pairs):
            raise ValueError("expected position:value")
        return GroupElement(group, (int(shift), pairs))
    except ValueError as exc:
        raise ValueError(f"bad element literal {line!r} for {group}: {exc}") from None


def format_set(A: FiniteGroupSet) -> str:
    return "".join(format_element(A.group, x) + "\n" for x in A.raw)


def parse_set(group: GroupDescriptor, text: str) -> FiniteGroupSet:
    elems = [parse_element(group, ln) for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    return FiniteGroupSet(group, elems)
