"""Lazy, memoized sequences: nil or (head, thunk of rest).

Thunks are forced at most once, so a sequence can be re-read cheaply and
deterministically — tactics hand these around and `back` in the REPL walks
them more than once.
"""

from __future__ import annotations

from typing import Callable, Generic, Iterable, Iterator, Optional, TypeVar

A = TypeVar("A")
B = TypeVar("B")


class Seq(Generic[A]):
    __slots__ = ("_head", "_thunk", "_rest", "_empty", "_forced")

    def __init__(self, empty: bool, head=None, thunk=None):
        self._empty = empty
        self._head = head
        self._thunk = thunk
        self._rest: Optional["Seq[A]"] = None
        self._forced = False

    # ---- construction

    @staticmethod
    def empty() -> "Seq[A]":
        return _EMPTY

    @staticmethod
    def cons(head: A, thunk: Callable[[], "Seq[A]"]) -> "Seq[A]":
        return Seq(False, head, thunk)

    @staticmethod
    def single(x: A) -> "Seq[A]":
        return Seq.cons(x, Seq.empty)

    @staticmethod
    def of(*xs: A) -> "Seq[A]":
        return Seq.from_list(list(xs))

    @staticmethod
    def from_list(xs: list) -> "Seq[A]":
        s = _EMPTY
        for x in reversed(xs):
            s = Seq(False, x, (lambda rest: lambda: rest)(s))
        return s

    @staticmethod
    def from_iter(it: Iterable[A]) -> "Seq[A]":
        """Wrap an iterator; items are pulled lazily and memoized."""
        return seq_of_iter(it)

    @staticmethod
    def defer(thunk: Callable[[], "Seq[A]"]) -> "Seq[A]":
        """A sequence that computes itself on first use."""
        s = Seq(False, None, None)
        s._thunk = thunk
        s._head = _DEFERRED
        return s

    # ---- observation

    def _force_self(self):
        while self._head is _DEFERRED:
            inner = self._thunk()
            if inner._head is _DEFERRED:
                # collapse chains of defers iteratively
                self._thunk = inner._thunk
                continue
            self._empty = inner._empty
            self._head = inner._head
            self._thunk = inner._thunk
            self._rest = inner._rest
            self._forced = inner._forced

    def is_empty(self) -> bool:
        self._force_self()
        return self._empty

    def head(self) -> A:
        self._force_self()
        if self._empty:
            raise IndexError("head of empty Seq")
        return self._head

    def rest(self) -> "Seq[A]":
        self._force_self()
        if self._empty:
            raise IndexError("rest of empty Seq")
        if not self._forced:
            self._rest = self._thunk()
            self._forced = True
            self._thunk = None
        return self._rest

    def __iter__(self) -> Iterator[A]:
        s = self
        while not s.is_empty():
            yield s.head()
            s = s.rest()

    def take(self, n: int) -> list:
        out = []
        s = self
        while n > 0 and not s.is_empty():
            out.append(s.head())
            s = s.rest()
            n -= 1
        return out

    def first(self) -> Optional[A]:
        return None if self.is_empty() else self.head()

    # ---- combinators (all lazy)

    def append(self, other: Callable[[], "Seq[A]"] | "Seq[A]") -> "Seq[A]":
        thunk = other if callable(other) else (lambda: other)

        def go(s: "Seq[A]") -> "Seq[A]":
            if s.is_empty():
                return thunk()
            return Seq.cons(s.head(), lambda: go(s.rest()))

        return Seq.defer(lambda: go(self))

    def map(self, f: Callable[[A], B]) -> "Seq[B]":
        def go(s):
            if s.is_empty():
                return _EMPTY
            return Seq.cons(f(s.head()), lambda: go(s.rest()))

        return Seq.defer(lambda: go(self))

    def filter(self, p: Callable[[A], bool]) -> "Seq[A]":
        def go(s):
            while not s.is_empty() and not p(s.head()):
                s = s.rest()
            if s.is_empty():
                return _EMPTY
            return Seq.cons(s.head(), lambda: go(s.rest()))

        return Seq.defer(lambda: go(self))

    def flat_map(self, f: Callable[[A], "Seq[B]"]) -> "Seq[B]":
        def go(s: "Seq[A]") -> "Seq[B]":
            while not s.is_empty():
                inner = f(s.head())
                if not inner.is_empty():
                    # s.rest() must stay unforced until the inner results are
                    # exhausted, or backtracking work compounds eagerly
                    return _cat(inner, lambda s=s: go(s.rest()))
                s = s.rest()
            return _EMPTY

        return Seq.defer(lambda: go(self))


_DEFERRED = object()
_EMPTY: Seq = Seq(True)


def _cat(s: Seq, thunk: Callable[[], Seq]) -> Seq:
    if s.is_empty():
        return thunk()
    return Seq.cons(s.head(), lambda: _cat(s.rest(), thunk))


def seq_of_iter(it: Iterable[A]) -> Seq[A]:
    """Lazy memoized view of an iterator (the usual entry point)."""
    iterator = iter(it)

    def step() -> Seq[A]:
        try:
            x = next(iterator)
        except StopIteration:
            return _EMPTY
        return Seq.cons(x, step)

    return Seq.defer(step)
