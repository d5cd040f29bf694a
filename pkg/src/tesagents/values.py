"""Canonical values: locations, action names, immutable key-value maps."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Tuple


class Loc(NamedTuple):
    x: int
    y: int

    def __str__(self):
        return f"({self.x};{self.y})"


_LOC = re.compile(r"^\((-?\d+);(-?\d+)\)$")


def parse_loc(text: str):
    m = _LOC.match(text)
    return Loc(int(m.group(1)), int(m.group(2))) if m else None


def show(v: Any) -> str:
    """Canonical print used for ordering, hashing digests and events."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, (frozenset, set)):
        return "{" + ",".join(sorted(show(x) for x in v)) + "}"
    if isinstance(v, Loc):
        return str(v)
    if isinstance(v, tuple):
        return "[" + ",".join(show(x) for x in v) + "]"
    if v is None:
        return "undefined"
    return str(v)


@dataclass(frozen=True)
class Name:
    """An action name with parameters, e.g. ``move(E)`` or ``start(id(0),id(1))``."""

    kind: str
    args: Tuple[Any, ...] = ()

    def __str__(self):
        if not self.args:
            return self.kind
        return f"{self.kind}({','.join(show(a) for a in self.args)})"

    def __lt__(self, other):
        return str(self) < str(other)


IDLE = Name("idle")
END = Name("end")


class KV(Mapping):
    """Immutable map from keys to tagged scalar values.

    Keys are strings or locations; entries are ordered canonically when
    printed, so equal maps print identically.
    """

    __slots__ = ("_d", "_hash", "_show")

    def __init__(self, entries: Any = (), **kw):
        d = dict(entries)
        d.update(kw)
        self._d = d
        self._hash = None
        self._show = None

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, KV):
            return self._d == other._d
        return NotImplemented

    def set(self, key, value) -> "KV":
        d = dict(self._d)
        d[key] = value
        return KV(d)

    def remove(self, *keys) -> "KV":
        return KV({k: v for k, v in self._d.items() if k not in keys})

    def merge(self, other: Mapping) -> "KV":
        d = dict(self._d)
        d.update(other)
        return KV(d)

    def __str__(self):
        if self._show is None:
            items = sorted((show(k), show(v)) for k, v in self._d.items())
            self._show = "{" + ", ".join(f"{k}|->{v}" for k, v in items) + "}"
        return self._show

    __repr__ = __str__


EMPTY = KV()


def kv(entries: Iterable = (), **kw) -> KV:
    return KV(entries, **kw)
