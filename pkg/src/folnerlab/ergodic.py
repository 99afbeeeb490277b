"""Monte-Carlo averages of cylinder functions along Følner sets for Bernoulli
shifts on {0,1}^(Z^d).

A sample path assigns each lattice site an independent bit with P(1) = p.
Bits come from a stateless hash of (seed, path, site), so sites can be read in
any order or in bulk and always agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .folner import FolnerSequenceSpec, generate
from .groups import GroupDescriptor, GroupError, Kind
from .setops import FiniteGroupSet

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


class InsufficientDataError(ValueError):
    pass


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps by design
    x = x + _GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _site_hash(key: int, coords: np.ndarray) -> np.ndarray:
    h = np.full(coords.shape[0], key & _MASK64, dtype=np.uint64)
    h = _mix(h)
    for j in range(coords.shape[1]):
        h = _mix(h ^ coords[:, j].astype(np.int64).view(np.uint64))
    return h


@dataclass(frozen=True)
class BernoulliAction:
    group: GroupDescriptor
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.group.kind is not Kind.FREE_ABELIAN:
            raise GroupError("Bernoulli actions are implemented on Z^d only")
        if not 0 < self.p < 1:
            raise ValueError(f"symbol probability {self.p} outside (0, 1)")

    def path(self, index: int = 0) -> SamplePath:
        return SamplePath(self, index)


class SamplePath:
    """One point ω of {0,1}^(Z^d); ``omega[x]`` reads site x."""

    def __init__(self, action: BernoulliAction, index: int):
        self.action = action
        self.index = index
        key = int(_mix(np.array([action.seed & _MASK64], dtype=np.uint64))[0])
        self._key = int(_mix(np.array([(key ^ index) & _MASK64], dtype=np.uint64))[0])
        self._memo: dict[tuple[int, ...], int] = {}

    def values(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.action.group.d)
        u = (_site_hash(self._key, coords) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (u < self.action.p).astype(np.int64)

    def __getitem__(self, site) -> int:
        site = tuple(int(x) for x in site)
        if site not in self._memo:
            self._memo[site] = int(self.values([site])[0])
        return self._memo[site]


@dataclass(frozen=True)
class CylinderFunction:
    """φ(ω) = table[sum_j ω_{window[j]} 2^j]."""
    window: tuple[tuple[int, ...], ...]
    table: tuple[float, ...]

    def __post_init__(self):
        if not self.window:
            raise ValueError("cylinder window is empty")
        if len(self.table) != 2 ** len(self.window):
            raise ValueError("table needs 2^|window| entries")

    def expectation(self, p: float) -> float:
        """E φ under the product measure, contracting one site at a time."""
        k = len(self.window)
        t = np.asarray(self.table, dtype=np.float64).reshape((2,) * k)
        w = np.array([1 - p, p])
        for _ in range(k):
            # C-order reshape: the last axis is bit 0
            t = t @ w
        return float(t)

    def evaluate(self, omega: SamplePath, sites: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(sites), dtype=np.int64)
        for j, w in enumerate(self.window):
            idx |= omega.values(sites + np.asarray(w, dtype=np.int64)) << j
        return np.asarray(self.table, dtype=np.float64)[idx]

    @property
    def bounds(self) -> tuple[float, float]:
        return min(self.table), max(self.table)


def coordinate_function(d: int) -> CylinderFunction:
    return CylinderFunction(((0,) * d,), (0.0, 1.0))


def constant_function(d: int, c: float = 1.0) -> CylinderFunction:
    return CylinderFunction(((0,) * d,), (c, c))


def pair_function(d: int) -> CylinderFunction:
    """ω_0 · ω_{e_1}."""
    e1 = (1,) + (0,) * (d - 1)
    return CylinderFunction(((0,) * d, e1), (0.0, 0.0, 0.0, 1.0))


@dataclass(frozen=True)
class AverageResult:
    size: int
    average: float
    target: float
    deviation: float
    samples: int = 1
    mse: float = 0.0


def _sites(F: FiniteGroupSet, action: BernoulliAction) -> np.ndarray:
    if F.group != action.group:
        raise GroupError(f"set lives in {F.group}, action on {action.group}")
    return np.array(F.raw, dtype=np.int64).reshape(-1, action.group.d)


def average(action: BernoulliAction, phi: CylinderFunction, F: FiniteGroupSet,
            path: int = 0) -> AverageResult:
    """(1/|F|) sum_{g in F} φ(gω) for one sample path, where (gω)_x = ω_{x+g}."""
    sites = _sites(F, action)
    if not len(sites):
        raise ValueError("average over an empty set")
    avg = float(phi.evaluate(action.path(path), sites).mean())
    target = phi.expectation(action.p)
    return AverageResult(len(sites), avg, target, abs(avg - target), 1, (avg - target) ** 2)


def convergence_sweep(action: BernoulliAction, phi: CylinderFunction, spec: FolnerSequenceSpec,
                      indices: Sequence[int], paths: int = 32) -> list[AverageResult]:
    """Mean-square deviation from E φ over ``paths`` independent sample paths."""
    if len(indices) < 3:
        raise InsufficientDataError("need at least 3 indices for a decay estimate")
    target = phi.expectation(action.p)
    out = []
    for n in indices:
        sites = _sites(generate(spec, n), action)
        avgs = np.array([phi.evaluate(action.path(r), sites).mean() for r in range(paths)])
        mse = float(np.mean((avgs - target) ** 2))
        mean = float(avgs.mean())
        out.append(AverageResult(len(sites), mean, target, abs(mean - target), paths, mse))
    return out


def mse_slope(results: Sequence[AverageResult]) -> float | None:
    """Least-squares slope of log MSE against log |F_n|; None if some MSE is 0."""
    if any(r.mse <= 0 for r in results):
        return None
    x = np.log([r.size for r in results])
    y = np.log([r.mse for r in results])
    return float(np.polyfit(x, y, 1)[0])

