"""Exact arithmetic and the value types shared by every other module.

All invariants are rationals (``fractions.Fraction``); integers are Python
ints, so nothing ever overflows or rounds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction

PRINCIPAL = "principal"
HJ_TAIL = "hj_tail"

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class InvalidData(ValueError):
    """Raised when a value violates the invariants of its type."""


@dataclass
class ValidationReport:
    """Every problem found, each naming the offending item; empty means valid."""

    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; sign on the numerator only."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise InvalidData(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidData(f"not a rational: {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise InvalidData(f"not a rational: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise InvalidData(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def remainder_sigma(m: int, n: int) -> int:
    """The representative of ``m`` modulo ``n`` in ``[0, n)``."""
    if n < 1:
        raise InvalidData(f"modulus must be positive, got {n}")
    return m % n


def gcd_all(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


@dataclass(frozen=True, order=True)
class Valency:
    """Rotation data ``(m, lambda, sigma)`` of a periodic action on a circle.

    ``m`` circles are permuted cyclically, and the return map on each one is
    rotation by ``sigma/lambda`` of a turn.
    """

    m: int
    lam: int
    sigma: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.lam < 1:
            raise InvalidData(f"valency {self.as_tuple()}: m and lambda must be positive")
        if not 0 <= self.sigma < self.lam:
            raise InvalidData(f"valency {self.as_tuple()}: need 0 <= sigma < lambda")
        if gcd(self.sigma, self.lam) != 1:
            raise InvalidData(f"valency {self.as_tuple()}: sigma and lambda not coprime")

    @classmethod
    def of(cls, triple: Sequence[int]) -> "Valency":
        if len(triple) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in triple):
            raise InvalidData(f"valency must be three integers, got {triple!r}")
        return cls(*triple)

    @property
    def order(self) -> int:
        """Sheet count of the periodic piece: ``m * lambda``."""
        return self.m * self.lam

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.lam, self.sigma)

    def __str__(self) -> str:
        return f"({self.m},{self.lam},{self.sigma})"


def interior_congruence_ok(entries: Sequence[int]) -> bool:
    return all(
        (entries[i - 1] + entries[i + 1]) % entries[i] == 0
        for i in range(1, len(entries) - 1)
    )


def interior_convex(entries: Sequence[int]) -> bool:
    return all(
        entries[i - 1] + entries[i + 1] >= 2 * entries[i]
        for i in range(1, len(entries) - 1)
    )


@dataclass(frozen=True)
class ChainSeq:
    """Multiplicity sequence of a principal chain or of an H-J tail.

    Tails are written from the principal component outward, so the first
    entry is the multiplicity of the component the tail hangs off.
    """

    entries: tuple[int, ...]
    kind: str = PRINCIPAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.kind not in (PRINCIPAL, HJ_TAIL):
            raise InvalidData(f"unknown chain kind {self.kind!r}")
        if len(self.entries) < 2:
            raise InvalidData(f"chain {self.entries} needs at least two entries")
        if any(not isinstance(a, int) or a < 1 for a in self.entries):
            raise InvalidData(f"chain {self.entries} has a non-positive entry")
        if not interior_congruence_ok(self.entries):
            raise InvalidData(f"chain {self.entries} fails the interior congruence")
        if self.kind == HJ_TAIL and self.entries[0] % self.entries[-1]:
            raise InvalidData(f"tail {self.entries}: last entry must divide the first")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def reversed(self) -> "ChainSeq":
        return ChainSeq(self.entries[::-1], self.kind)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.entries)) + ")"


def normalize_seq(a: ChainSeq | Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Split a sequence into its gcd ``d`` and the primitive sequence ``a/d``."""
    entries = tuple(a)
    if not entries:
        raise InvalidData("cannot normalize an empty sequence")
    d = gcd_all(entries)
    return d, tuple(x // d for x in entries)


@dataclass(frozen=True)
class NegativeTwistChain:
    """A principal chain that can arise from a negative-twist monodromy.

    Amphidrome chains are stored with the distinguished end (the component of
    multiplicity ``d``) last.
    """

    seq: ChainSeq
    amphidrome: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.seq, ChainSeq):
            object.__setattr__(self, "seq", ChainSeq(tuple(self.seq)))
        problem = chain_problem(self.seq.entries, self.amphidrome)
        if problem:
            raise InvalidData(f"chain {self.seq}: {problem}")

    @classmethod
    def of(cls, entries: Sequence[int], amphidrome: bool = False) -> "NegativeTwistChain":
        return cls(ChainSeq(tuple(entries)), amphidrome)

    @property
    def entries(self) -> tuple[int, ...]:
        return self.seq.entries

    @property
    def d(self) -> int:
        return gcd_all(self.seq.entries)

    @property
    def normalized(self) -> tuple[int, ...]:
        return normalize_seq(self.seq)[1]

    @property
    def m_gamma(self) -> int:
        """Length of the cut-curve orbit the chain corresponds to."""
        return self.d // 2 if self.amphidrome else self.d

    def __str__(self) -> str:
        return str(self.seq) + (" amph" if self.amphidrome else "")


def chain_problem(entries: Sequence[int], amphidrome: bool) -> str | None:
    """Why ``entries`` is not a negative-twist chain, or ``None`` if it is."""
    if len(entries) < 2 or any(a < 1 for a in entries):
        return "needs at least two positive entries"
    if not interior_congruence_ok(entries):
        return "interior congruence fails"
    if not interior_convex(entries):
        return "interior convexity fails (contains a (-1)-curve)"
    d = gcd_all(entries)
    if any(gcd(x, y) != d for x, y in zip(entries, entries[1:])):
        return "adjacent gcds are not constant"
    if amphidrome and (d % 2 or entries[-1] != d):
        return "amphidrome chain needs even d and last entry equal to d"
    return None
