"""Variable-ordering policies, the component cache and run statistics."""

from __future__ import annotations

import enum
import random
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

from .errors import NoBranchableVariable


class OrderKind(enum.Enum):
    DynamicMaxOccurrence = "dynamic"
    StaticList = "static"
    Random = "random"


@dataclass(frozen=True)
class OrderPolicy:
    """How the next branching variable is picked.

    ``static_order`` is used by ``StaticList`` and ``seed`` by ``Random``.
    Variables absent from every open component are skipped.
    """

    kind: OrderKind = OrderKind.DynamicMaxOccurrence
    static_order: tuple = ()
    seed: int = 0
    unit_propagation: bool = True

    @classmethod
    def dynamic(cls, unit_propagation=True):
        return cls(OrderKind.DynamicMaxOccurrence, unit_propagation=unit_propagation)

    @classmethod
    def static(cls, order: Sequence[int], unit_propagation=True):
        return cls(OrderKind.StaticList, tuple(order), unit_propagation=unit_propagation)

    @classmethod
    def random(cls, seed: int, unit_propagation=True):
        return cls(OrderKind.Random, seed=seed, unit_propagation=unit_propagation)

    def check(self, variables: Sequence[int]):
        if self.kind is OrderKind.StaticList and sorted(self.static_order) != sorted(variables):
            raise ValueError("static order must be a permutation of the variables")

    def describe(self) -> str:
        if self.kind is OrderKind.StaticList:
            base = "static"
        elif self.kind is OrderKind.Random:
            base = f"random:{self.seed}"
        else:
            base = "dynamic"
        return base + ("" if self.unit_propagation else "+no-up")


class Chooser:
    """Per-run variable selector (owns the RNG for ``Random`` policies)."""

    def __init__(self, policy: OrderPolicy):
        self.policy = policy
        self.rank = {v: i for i, v in enumerate(policy.static_order)}
        self.rng = random.Random(policy.seed)
        self.trace = []

    def pick(self, occurrences: dict):
        """``occurrences`` maps each candidate variable to its occurrence count."""
        if not occurrences:
            raise NoBranchableVariable("no variable left to branch on")
        kind = self.policy.kind
        if kind is OrderKind.StaticList:
            var = min(occurrences, key=lambda v: self.rank.get(v, len(self.rank) + v))
        elif kind is OrderKind.Random:
            var = self.rng.choice(sorted(occurrences))
        else:
            var = min(occurrences, key=lambda v: (-occurrences[v], v))
        self.trace.append(var)
        return var


_MISSING = object()


class CacheStore:
    """Key -> exact value map with hit/store/removal accounting.

    ``on_hit(key, value)`` is called on every hit; tests use it to re-solve
    the cached sub-problem from scratch.
    """

    MISSING = _MISSING

    def __init__(self, on_hit: Optional[Callable] = None):
        self._values = {}
        self.on_hit = on_hit
        self.hits = 0
        self.misses = 0
        self.stores = 0
        self.removals = 0
        self.peak = 0

    def lookup(self, key):
        value = self._values.get(key, _MISSING)
        if value is _MISSING:
            self.misses += 1
        else:
            self.hits += 1
            if self.on_hit is not None:
                self.on_hit(key, value)
        return value

    def peek(self, key):
        return self._values.get(key, _MISSING)

    def store(self, key, value):
        old = self._values.get(key, _MISSING)
        if old is not _MISSING:
            if old != value:
                raise AssertionError(f"cached value for {key!r} changed: {old} -> {value}")
            return
        self._values[key] = value
        self.stores += 1
        self.peak = max(self.peak, len(self._values))

    def remove(self, key):
        if self._values.pop(key, _MISSING) is not _MISSING:
            self.removals += 1

    def __contains__(self, key):
        return key in self._values

    def __len__(self):
        return len(self._values)

    def keys(self):
        return list(self._values)

    @property
    def lookups(self) -> int:
        return self.hits + self.misses


@dataclass
class SearchStats:
    decisions: int = 0
    up_propagations: int = 0
    cache_hits: int = 0
    cache_stores: int = 0
    cache_peak: int = 0
    components_created: int = 0
    conflicts: int = 0
    value: object = None

    def absorb_cache(self, cache: CacheStore):
        self.cache_hits = cache.hits
        self.cache_stores = cache.stores
        self.cache_peak = cache.peak

    def counters(self) -> dict:
        d = asdict(self)
        d.pop("value")
        return d
