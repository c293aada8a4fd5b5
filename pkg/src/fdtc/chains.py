"""Per-chain formulas: H-J tails, H(C), valencies, screw numbers, FDTCs.

Sign convention: screw numbers and twist coefficients are stored negative
(negative-twist monodromy); absolute values are taken at display time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .core import (
    HJ_TAIL,
    ChainSeq,
    InvalidData,
    NegativeTwistChain,
    Valency,
    lcm_all,
    normalize_seq,
    remainder_sigma,
)


class SearchError(LookupError):
    """Chain synthesis did not produce a unique answer within its caps."""


class ChainNotFound(SearchError):
    pass


class ChainAmbiguous(SearchError):
    pass


@dataclass(frozen=True)
class SearchCaps:
    max_len: int = 64
    max_entry: int = 10**6


DEFAULT_CAPS = SearchCaps()


def hj_expand(v: Valency) -> ChainSeq:
    """H-J tail of a multiple point, from the principal component outward.

    >>> hj_expand(Valency(2, 3, 2)).entries
    (6, 4, 2)
    """
    if v.lam < 2:
        raise InvalidData(f"valency {v} is a simple point; it has no tail")
    b = [v.lam, v.sigma]
    while b[-1] != 1:
        b.append(remainder_sigma(-b[-2], b[-1]))
    return ChainSeq(tuple(v.m * x for x in b), HJ_TAIL)


def hj_valency(t: ChainSeq | Sequence[int]) -> Valency:
    """Valency of the multiple point whose tail is ``t`` (inverse of hj_expand)."""
    entries = tuple(t)
    if len(entries) < 2:
        raise InvalidData(f"tail {entries} is too short")
    last = entries[-1]
    if entries[0] % last or any(a % last for a in entries):
        raise InvalidData(f"tail {entries}: entries are not multiples of the last entry")
    lam = entries[0] // last
    if lam < 2:
        raise InvalidData(f"tail {entries}: first entry must exceed the last")
    return Valency(last, lam, remainder_sigma(entries[1] // last, lam))


def is_hj_tail(t: ChainSeq | Sequence[int]) -> bool:
    try:
        return hj_expand(hj_valency(t)).entries == tuple(t)
    except InvalidData:
        return False


def chain_H(c: ChainSeq | Sequence[int]) -> Fraction:
    """``sum gcd(a_i, a_{i+1})^2 / (a_i a_{i+1})`` over adjacent pairs."""
    entries = tuple(c)
    if len(entries) < 2:
        raise InvalidData(f"chain {entries} is too short")
    return sum(
        (Fraction(gcd(x, y) ** 2, x * y) for x, y in zip(entries, entries[1:])),
        Fraction(0),
    )


def chain_valencies(c: NegativeTwistChain) -> tuple[Valency, Valency]:
    d, b = normalize_seq(c.seq)
    start = Valency(d, b[0], remainder_sigma(b[1], b[0]))
    if c.amphidrome:
        return start, start
    return start, Valency(d, b[-1], remainder_sigma(b[-2], b[-1]))


def screw_number(c: NegativeTwistChain) -> Fraction:
    h = chain_H(c.seq)
    return -2 * h if c.amphidrome else -h


def fdtc_from_chain(c: NegativeTwistChain) -> Fraction:
    d = c.d
    if c.amphidrome and d % 2:
        raise InvalidData(f"amphidrome chain {c.seq} has odd d={d}")
    return -chain_H(c.seq) / c.m_gamma


def fdtc_from_screw(s: Fraction, m_gamma: int, amphidrome: bool) -> Fraction:
    s = Fraction(s)
    if s >= 0:
        raise InvalidData(f"screw number {s} is not negative")
    if m_gamma < 1:
        raise InvalidData(f"orbit length {m_gamma} must be positive")
    return s / (2 * m_gamma) if amphidrome else s / m_gamma


def _residue_start(residue: int, modulus: int, floor: int) -> int:
    """Smallest x >= max(floor, 1) with x = residue (mod modulus)."""
    lo = max(floor, 1)
    return lo + (residue - lo) % modulus


def synthesize_chain(
    v1: Valency,
    v2: Valency,
    s: Fraction,
    amphidrome: bool,
    caps: SearchCaps = DEFAULT_CAPS,
) -> NegativeTwistChain:
    """Find the chain with boundary valencies ``v1``, ``v2`` and screw number ``s``.

    Depth-first over ``b_{i+1} = k*b_i - b_{i-1}`` (``k >= 2``), pruning once the
    running sum of ``1/(b_i b_{i+1})`` passes the target.  Entries of a convex
    sequence peak at its ends, so no entry exceeds ``max(b_0, b_l)``.

    Raises ChainNotFound or ChainAmbiguous; never picks between two answers.
    """
    s = Fraction(s)
    if s >= 0:
        raise InvalidData(f"screw number {s} is not negative")
    if v1.m != v2.m:
        raise InvalidData(f"boundary valencies {v1} and {v2} disagree on m")
    if amphidrome:
        if v1 != v2:
            raise InvalidData(f"amphidrome boundaries need equal valencies, got {v1}, {v2}")
        if v1.m % 2:
            raise InvalidData(f"amphidrome valency {v1} needs an even first entry")
        target = -s / 2
        lam_end, sigma_end = 1, 0
    else:
        target = -s
        lam_end, sigma_end = v2.lam, v2.sigma

    scale = v1.m
    bound = min(max(v1.lam, lam_end), caps.max_entry // scale)
    b0 = v1.lam
    if b0 > bound:
        raise ChainNotFound(f"no chain for {v1}, {v2}, s={s} within caps")

    solutions: list[tuple[int, ...]] = []
    num, den = target.numerator, target.denominator

    def closes(seq: list[int]) -> bool:
        return seq[-1] == lam_end and seq[-2] % lam_end == sigma_end

    # The running sum telescopes: with b_{j+1} u_j - b_j u_{j+1} = 1 it equals
    # u_0/b_0 - u_j/b_j, so every comparison is a single integer product.
    # Stack entries: (sequence so far, u_0, u_{j-1}, u_j).
    stack: list[tuple[list[int], int, int, int]] = []
    # push larger candidates first so smaller ones are explored first
    for b1 in reversed(range(_residue_start(v1.sigma, b0, 1), bound + 1, b0)):
        u0 = pow(b1, -1, b0) if b0 > 1 else 0
        stack.append(([b0, b1], u0, u0, (b1 * u0 - 1) // b0))

    while stack:
        seq, u0, u_prev, u_cur = stack.pop()
        cur = seq[-1]
        lhs = (u0 * cur - u_cur * b0) * den
        rhs = num * b0 * cur
        if lhs > rhs:
            continue
        if lhs == rhs:
            if closes(seq):
                solutions.append(tuple(seq))
                if len(solutions) > 1:
                    break
            continue
        if len(seq) >= caps.max_len:
            continue
        prev = seq[-2]
        lo = _residue_start(-prev, cur, 2 * cur - prev)
        for nxt in reversed(range(lo, bound + 1, cur)):
            k = (prev + nxt) // cur
            stack.append((seq + [nxt], u0, u_cur, k * u_cur - u_prev))

    if not solutions:
        raise ChainNotFound(f"no chain for {v1}, {v2}, s={s} within caps")
    if len(solutions) > 1:
        raise ChainAmbiguous(
            f"several chains for {v1}, {v2}, s={s}: "
            + ", ".join(str(sol) for sol in solutions)
        )
    return NegativeTwistChain.of(tuple(scale * x for x in solutions[0]), amphidrome)


def semistable_node_count(
    c: ChainSeq | Sequence[int], d: int | None = None, amphidrome: bool = False
) -> tuple[int, int]:
    """Nodes and preimage chains over ``c`` in the ``d``-th semistable model.

    Counted directly from the local base-change picture: the node between
    components of multiplicities ``a`` and ``a'`` lifts to
    ``d * gcd(a, a') / lcm(a, a')`` nodes.
    """
    entries = tuple(c)
    period = lcm_all(entries)
    if d is None:
        d = period
    if d < 1 or d % period:
        raise InvalidData(f"base change degree {d} is not a multiple of lcm{entries} = {period}")
    nodes = 0
    for x, y in zip(entries, entries[1:]):
        g = gcd(x, y)
        nodes += d * g // (x * y // g)
    dd = normalize_seq(entries)[0]
    return nodes, (dd // 2 if amphidrome else dd)


@dataclass(frozen=True)
class ChainReport:
    seq: ChainSeq
    d: int
    H: Fraction
    valency_start: Valency
    valency_end: Valency
    m_gamma: int
    s: Fraction
    c: Fraction
    amphidrome: bool


def chain_report(chain: NegativeTwistChain) -> ChainReport:
    v1, v2 = chain_valencies(chain)
    return ChainReport(
        seq=chain.seq,
        d=chain.d,
        H=chain_H(chain.seq),
        valency_start=v1,
        valency_end=v2,
        m_gamma=chain.m_gamma,
        s=screw_number(chain),
        c=fdtc_from_chain(chain),
        amphidrome=chain.amphidrome,
    )
