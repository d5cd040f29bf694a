"""Preference weights and valued action sets.

The default weight structure is max-plus over the naturals with a bottom
element: choice keeps the larger weight, combination adds. Any object with
the same five members can be substituted.
"""
from __future__ import annotations

from typing import Any, Dict, Iterable, Iterator, Mapping, Optional, Tuple


class MaxPlus:
    name = "maxplus"
    zero = None
    one = 0

    @staticmethod
    def plus(a: Optional[int], b: Optional[int]) -> Optional[int]:
        if a is None:
            return b
        if b is None:
            return a
        return a if a >= b else b

    @staticmethod
    def times(a: Optional[int], b: Optional[int]) -> Optional[int]:
        if a is None or b is None:
            return None
        return a + b

    @staticmethod
    def better(a: Optional[int], b: Optional[int]) -> bool:
        """Strict preference of ``a`` over ``b``."""
        return MaxPlus.plus(a, b) == a and a != b


SEMIRINGS = {MaxPlus.name: MaxPlus}


def weight_key(w):
    """Sort key putting preferred weights first."""
    return float("inf") if w is None else -w


class ValuedActionSet(Mapping):
    """Finite map from action lists to weights; entries never carry the zero.

    ``+`` merges two sets keeping the preferred weight per list, ``*`` pairs
    every list of the left with every list of the right, concatenating the
    lists and combining the weights.
    """

    __slots__ = ("_items", "_hash", "sr")

    def __init__(self, items: Any = (), sr=MaxPlus):
        self.sr = sr
        d: Dict[Tuple, Any] = {}
        for key, w in dict(items).items():
            key = tuple(key)
            if w is sr.zero:
                continue
            d[key] = sr.plus(d[key], w) if key in d else w
        self._items = d
        self._hash = None

    @classmethod
    def zero(cls, sr=MaxPlus) -> "ValuedActionSet":
        return cls((), sr)

    @classmethod
    def one(cls, sr=MaxPlus) -> "ValuedActionSet":
        return cls({(): sr.one}, sr)

    @classmethod
    def single(cls, action, weight, sr=MaxPlus) -> "ValuedActionSet":
        return cls({(action,): weight}, sr)

    def __getitem__(self, key):
        return self._items[tuple(key)]

    def __iter__(self) -> Iterator[Tuple]:
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, ValuedActionSet):
            return self._items == other._items
        return NotImplemented

    def __add__(self, other: "ValuedActionSet") -> "ValuedActionSet":
        d = dict(self._items)
        for key, w in other._items.items():
            d[key] = self.sr.plus(d[key], w) if key in d else w
        return ValuedActionSet(d, self.sr)

    def __mul__(self, other: "ValuedActionSet") -> "ValuedActionSet":
        d: Dict[Tuple, Any] = {}
        for k1, w1 in self._items.items():
            for k2, w2 in other._items.items():
                key, w = k1 + k2, self.sr.times(w1, w2)
                if w is self.sr.zero:
                    continue
                d[key] = self.sr.plus(d[key], w) if key in d else w
        return ValuedActionSet(d, self.sr)

    def atoms(self) -> Iterable[Tuple[Any, Any]]:
        """``(action, weight)`` for the single-action entries."""
        return [(k[0], w) for k, w in self._items.items() if len(k) == 1]

    def ranked(self):
        """Entries ordered by preference, then by canonical print."""
        return sorted(self._items.items(),
                      key=lambda kw: (weight_key(kw[1]), ";".join(map(str, kw[0]))))

    def __str__(self):
        if not self._items:
            return "null"
        return " + ".join(f"({', '.join(map(str, k))}, {w})" for k, w in self.ranked())

    __repr__ = __str__
