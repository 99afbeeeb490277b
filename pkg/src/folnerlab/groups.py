"""Concrete countable groups: free abelian, finite-by-free abelian, the
lamplighter group Z ⋉ ⊕Z/2 and the torsion-free wreath-type group Z ⋉ ⊕Z.

Elements carry a canonical ``data`` tuple so that equality is structural:

* free abelian          ``(x_1, ..., x_d)``
* finite-by-free        ``(r_1, ..., r_t, x_1, ..., x_d)`` with ``0 <= r_i < m_i``
* lamplighter           ``(shift, (p_1, ..., p_k))``, positions strictly increasing
* wreath-zz             ``(shift, ((p_1, v_1), ..., (p_k, v_k)))``, ``v_i != 0``

The wreath-type law is ``(n, u)(m, v) = (n + m, u^m + v)`` where
``(u^m)_i = u_{i+m}``, i.e. the support of ``u`` moves by ``-m``.
Hot loops in :mod:`folnerlab.setops` work on raw ``data`` tuples through
:func:`law`; :class:`GroupElement` is the checked public surface.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

COORD_BOUND = 2**62
INFINITE = math.inf


class GroupError(ValueError):
    pass


class DescriptorMismatchError(GroupError):
    pass


class RankExceededError(GroupError):
    pass


class CoordinateOverflowError(OverflowError):
    pass


class Kind(str, Enum):
    FREE_ABELIAN = "free_abelian"
    FINITE_BY_FREE = "finite_by_free"
    LAMPLIGHTER = "lamplighter"
    WREATH_ZZ = "wreath_zz"


@dataclass(frozen=True)
class GroupDescriptor:
    kind: Kind
    moduli: tuple[int, ...] = ()
    d: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if self.kind is Kind.FREE_ABELIAN:
            if self.moduli or self.d < 1:
                raise GroupError("free abelian group needs d >= 1 and no moduli")
        elif self.kind is Kind.FINITE_BY_FREE:
            if not self.moduli:
                raise GroupError("finite-by-free group needs torsion; use free_abelian(d)")
            if any(m < 2 for m in self.moduli) or self.d < 0:
                raise GroupError("moduli must be >= 2 and d >= 0")
        elif self.moduli or self.d:
            raise GroupError(f"{self.kind.value} takes no parameters")

    @property
    def declared_rank(self) -> int | float:
        if self.kind is Kind.LAMPLIGHTER:
            return 1
        if self.kind is Kind.WREATH_ZZ:
            return INFINITE
        return self.d

    @property
    def is_abelian(self) -> bool:
        return self.kind in (Kind.FREE_ABELIAN, Kind.FINITE_BY_FREE)

    @property
    def torsion_rank(self) -> int:
        return len(self.moduli)

    def element(self, data) -> GroupElement:
        return GroupElement(self, data)

    def identity(self) -> GroupElement:
        return identity(self)

    def __str__(self):
        # same text the group DSL parses
        if self.kind is Kind.LAMPLIGHTER:
            return "lamplighter"
        if self.kind is Kind.WREATH_ZZ:
            return "wreath-zz"
        parts = [f"Z/{m}" for m in self.moduli]
        if self.d:
            parts.append(f"Z^{self.d}")
        return "x".join(parts)


def free_abelian(d: int) -> GroupDescriptor:
    return GroupDescriptor(Kind.FREE_ABELIAN, (), d)


def finite_by_free(moduli: Sequence[int], d: int) -> GroupDescriptor:
    """Z/m_1 ⊕ ... ⊕ Z/m_t ⊕ Z^d; an empty moduli list gives Z^d."""
    if not moduli:
        return free_abelian(d)
    return GroupDescriptor(Kind.FINITE_BY_FREE, tuple(moduli), d)


def lamplighter() -> GroupDescriptor:
    return GroupDescriptor(Kind.LAMPLIGHTER)


def wreath_zz() -> GroupDescriptor:
    return GroupDescriptor(Kind.WREATH_ZZ)


# --------------------------------------------------------------------------
# raw group laws


class Law(NamedTuple):
    mul: Callable
    inv: Callable
    identity: tuple
    canonical: Callable
    max_abs: Callable


def _check_bound(x: int) -> int:
    if not -COORD_BOUND <= x <= COORD_BOUND:
        raise CoordinateOverflowError(f"coordinate {x} exceeds ±2^62")
    return x


def _abelian_law(moduli: tuple[int, ...], d: int) -> Law:
    t = len(moduli)
    n = t + d

    if t == 0:
        def mul(g, h):
            return tuple([a + b for a, b in zip(g, h)])

        def inv(g):
            return tuple([-a for a in g])
    else:
        def mul(g, h):
            s = [a + b for a, b in zip(g, h)]
            for i, m in enumerate(moduli):
                s[i] %= m
            return tuple(s)

        def inv(g):
            s = [-a for a in g]
            for i, m in enumerate(moduli):
                s[i] %= m
            return tuple(s)

    def canonical(data):
        data = tuple(int(x) for x in data)
        if len(data) != n:
            raise GroupError(f"expected {n} coordinates, got {len(data)}")
        out = tuple(x % m for x, m in zip(data, moduli)) + data[t:]
        for x in out[t:]:
            _check_bound(x)
        return out

    def max_abs(g):
        return max((abs(x) for x in g[t:]), default=0)

    return Law(mul, inv, (0,) * n, canonical, max_abs)


def _ll_mul(g, h):
    n, u = g
    m, v = h
    s = {p - m for p in u}
    s.symmetric_difference_update(v)
    return (n + m, tuple(sorted(s)))


def _ll_inv(g):
    n, u = g
    return (-n, tuple([p + n for p in u]))


def _ll_canonical(data):
    shift, lamps = data
    lamps = [int(p) for p in lamps]
    if len(set(lamps)) != len(lamps):
        raise GroupError("duplicate lamp position")
    out = (_check_bound(int(shift)), tuple(sorted(lamps)))
    for p in out[1]:
        _check_bound(p)
    return out


def _ll_max_abs(g):
    return max([abs(g[0])] + [abs(p) for p in g[1]])


def _wz_mul(g, h):
    n, u = g
    m, v = h
    acc = dict(v)
    for p, x in u:
        q = p - m
        y = acc.get(q, 0) + x
        if y:
            acc[q] = y
        else:
            acc.pop(q, None)
    return (n + m, tuple(sorted(acc.items())))


def _wz_inv(g):
    n, u = g
    return (-n, tuple([(p + n, -x) for p, x in u]))


def _wz_canonical(data):
    shift, config = data
    items = list(config.items()) if isinstance(config, dict) else [tuple(c) for c in config]
    positions = [int(p) for p, _ in items]
    if len(set(positions)) != len(positions):
        raise GroupError("duplicate configuration position")
    cfg = tuple(sorted((int(p), int(x)) for p, x in items if int(x) != 0))
    for p, x in cfg:
        _check_bound(p)
        _check_bound(x)
    return (_check_bound(int(shift)), cfg)


def _wz_max_abs(g):
    return max([abs(g[0])] + [max(abs(p), abs(x)) for p, x in g[1]])


@functools.lru_cache(maxsize=None)
def law(group: GroupDescriptor) -> Law:
    if group.is_abelian:
        return _abelian_law(group.moduli, group.d)
    if group.kind is Kind.LAMPLIGHTER:
        return Law(_ll_mul, _ll_inv, (0, ()), _ll_canonical, _ll_max_abs)
    return Law(_wz_mul, _wz_inv, (0, ()), _wz_canonical, _wz_max_abs)


# --------------------------------------------------------------------------
# elements


@dataclass(frozen=True, slots=True)
class GroupElement:
    group: GroupDescriptor
    data: tuple

    def __post_init__(self):
        object.__setattr__(self, "data", law(self.group).canonical(self.data))

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __pow__(self, k: int) -> GroupElement:
        return power(self, k)

    def inverse(self) -> GroupElement:
        return inverse(self)

    @property
    def is_identity(self) -> bool:
        return self.data == law(self.group).identity

    def __repr__(self):
        return f"{self.group}:{self.data}"


def _trusted(group: GroupDescriptor, data: tuple) -> GroupElement:
    el = object.__new__(GroupElement)
    object.__setattr__(el, "group", group)
    object.__setattr__(el, "data", data)
    return el


def _same_group(g: GroupElement, h: GroupElement) -> None:
    if g.group != h.group:
        raise DescriptorMismatchError(f"{g.group} vs {h.group}")


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    _same_group(g, h)
    lw = law(g.group)
    out = lw.mul(g.data, h.data)
    if lw.max_abs(out) > COORD_BOUND:
        raise CoordinateOverflowError(f"product {out} leaves the coordinate range")
    return _trusted(g.group, out)


def inverse(g: GroupElement) -> GroupElement:
    return _trusted(g.group, law(g.group).inv(g.data))


def identity(group: GroupDescriptor) -> GroupElement:
    return _trusted(group, law(group).identity)


def power(g: GroupElement, k: int) -> GroupElement:
    if k < 0:
        g, k = inverse(g), -k
    result = identity(g.group)
    while k:
        if k & 1:
            result = multiply(result, g)
        g = multiply(g, g)
        k >>= 1
    return result


def commutes(g: GroupElement, h: GroupElement) -> bool:
    return multiply(g, h) == multiply(h, g)


# --------------------------------------------------------------------------
# Z^d embeddings


def _vector_form(group: GroupDescriptor, images: Sequence[GroupElement]):
    """Linear coordinates for images living in a free abelian piece.

    Returns ``(vectors, to_vector)`` or ``None`` when the images are not of
    that shape (non-trivial shifts in wreath-type groups, or lamplighter).
    """
    if group.is_abelian:
        t = group.torsion_rank

        def to_vector(g):
            return list(g.data[t:])
        return [to_vector(e) for e in images], to_vector
    if group.kind is Kind.WREATH_ZZ and all(e.data[0] == 0 for e in images):
        positions = sorted({p for e in images for p, _ in e.data[1]})
        index = {p: i for i, p in enumerate(positions)}

        def to_vector(g):
            if g.data[0] != 0 or any(p not in index for p, _ in g.data[1]):
                return None
            vec = [0] * len(positions)
            for p, x in g.data[1]:
                vec[index[p]] = x
            return vec
        return [to_vector(e) for e in images], to_vector
    return None


def rational_rank(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def solve_rational(rows: Sequence[Sequence[int]], target: Sequence[int]) -> list[Fraction] | None:
    """Solve ``sum_i c_i rows[i] = target`` for independent rows, or None."""
    k = len(rows)
    ncols = len(target)
    # columns of the augmented system: equations are the coordinates
    aug = [[Fraction(rows[i][j]) for i in range(k)] + [Fraction(target[j])] for j in range(ncols)]
    r = 0
    pivots = []
    for col in range(k):
        p = next((i for i in range(r, ncols) if aug[i][col] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][col]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(ncols):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    if any(aug[i][k] != 0 for i in range(r, ncols)):
        return None
    sol = [Fraction(0)] * k
    for i, col in enumerate(pivots):
        sol[col] = aug[i][k]
    return sol


@dataclass(frozen=True)
class ZdEmbedding:
    """A copy of Z^d inside ``group`` given by commuting generator images."""
    group: GroupDescriptor
    images: tuple[GroupElement, ...]
    search_radius: int = 3

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if not self.images:
            raise GroupError("embedding needs d >= 1 images")
        for e in self.images:
            if e.group != self.group:
                raise DescriptorMismatchError(f"image {e} not in {self.group}")
        for a, b in itertools.combinations(self.images, 2):
            if not commutes(a, b):
                raise GroupError(f"images {a} and {b} do not commute")
        self._check_free()

    @property
    def d(self) -> int:
        return len(self.images)

    def _check_free(self):
        vf = _vector_form(self.group, self.images)
        if vf is not None:
            vectors, _ = vf
            if rational_rank(vectors) != self.d:
                raise GroupError("images satisfy a nontrivial relation")
            return
        r = self.search_radius
        for coeffs in itertools.product(range(-r, r + 1), repeat=self.d):
            if any(coeffs) and self.combine(coeffs).is_identity:
                raise GroupError(f"relation {coeffs} among images")

    def combine(self, coeffs: Sequence[int]) -> GroupElement:
        g = identity(self.group)
        for e, c in zip(self.images, coeffs):
            g = multiply(g, power(e, c))
        return g

    def coordinates(self, g: GroupElement) -> tuple[int, ...] | None:
        """Integer coordinates of ``g`` in the embedded copy, or None."""
        if g.group != self.group:
            raise DescriptorMismatchError(f"{g} not in {self.group}")
        vf = _vector_form(self.group, self.images)
        if vf is not None:
            vectors, to_vector = vf
            target = to_vector(g)
            if target is None:
                return None
            sol = solve_rational(vectors, target)
            if sol is None or any(c.denominator != 1 for c in sol):
                return None
            coeffs = tuple(int(c) for c in sol)
        elif self.d == 1 and self.images[0].data[0] != 0:
            step = self.images[0].data[0]
            if g.data[0] % step:
                return None
            coeffs = (g.data[0] // step,)
        else:
            r = self.search_radius
            coeffs = next((c for c in itertools.product(range(-r, r + 1), repeat=self.d)
                           if self.combine(c) == g), None)
            if coeffs is None:
                return None
        return coeffs if self.combine(coeffs) == g else None

    def contains(self, g: GroupElement) -> bool:
        return self.coordinates(g) is not None


def standard_embedding(group: GroupDescriptor, d: int) -> ZdEmbedding:
    if d < 1:
        raise GroupError("d must be positive")
    if d > group.declared_rank:
        raise RankExceededError(f"{group} has rank {group.declared_rank} < {d}")
    if group.is_abelian:
        t = group.torsion_rank
        images = []
        for i in range(d):
            v = [0] * (t + group.d)
            v[t + i] = 1
            images.append(GroupElement(group, v))
    elif group.kind is Kind.LAMPLIGHTER:
        images = [GroupElement(group, (1, ()))]
    else:
        images = [GroupElement(group, (0, ((i, 1),))) for i in range(d)]
    return ZdEmbedding(group, tuple(images))


def random_element(group: GroupDescriptor, rng, radius: int = 4, support: int = 4) -> GroupElement:
    """Uniform-ish element with small coordinates; for property tests and sweeps."""
    if group.is_abelian:
        data = [rng.randrange(m) for m in group.moduli]
        data += [rng.randint(-radius, radius) for _ in range(group.d)]
        return GroupElement(group, data)
    shift = rng.randint(-radius, radius)
    positions = rng.sample(range(-support, support + 1), rng.randint(0, support))
    if group.kind is Kind.LAMPLIGHTER:
        return GroupElement(group, (shift, positions))
    return GroupElement(group, (shift, [(p, rng.choice([-2, -1, 1, 2])) for p in positions]))
