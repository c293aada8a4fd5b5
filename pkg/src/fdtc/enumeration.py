"""Exhaustive chain enumeration, extremal twist coefficients, random monodromies."""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import IO, Iterator

from .chains import chain_H, chain_valencies, screw_number
from .core import InvalidData, NegativeTwistChain, Valency, format_rational, gcd_all
from .monodromy import (
    AnnulusEnd,
    AnnulusOrbit,
    MonodromyData,
    PeriodicPart,
    lower_bound,
    part_euler,
    validate_monodromy,
)

ADMISSIBLE = "admissible"
ENVELOPE = "envelope"


@dataclass(frozen=True)
class EnumSpec:
    max_entry: int
    max_len: int
    genus: int | None = None
    m_cap: int | None = None
    amphidrome: bool | None = None  # None: both kinds

    def __post_init__(self) -> None:
        if self.max_entry < 1:
            raise InvalidData("max_entry must be at least 1")
        if self.max_len < 2:
            raise InvalidData("max_len must be at least 2")
        if self.m_cap is not None and self.m_cap < 1:
            raise InvalidData("m_cap must be at least 1")


def primitive_sequences(bound: int, max_len: int) -> dict[int, list[tuple[int, ...]]]:
    """Convex sequences with coprime neighbours and entries <= bound, by length.

    Every step is ``b_{i+1} = k*b_i - b_{i-1}`` with ``k >= 2``, which is the
    interior congruence plus convexity; coprimality then propagates.
    """
    out: dict[int, list[tuple[int, ...]]] = {n: [] for n in range(2, max_len + 1)}
    stack = [(b0, b1) for b0 in range(1, bound + 1) for b1 in range(1, bound + 1) if gcd(b0, b1) == 1]
    while stack:
        seq = stack.pop()
        out[len(seq)].append(seq)
        if len(seq) == max_len:
            continue
        prev, cur = seq[-2], seq[-1]
        nxt = 2 * cur - prev
        if nxt < 1:
            nxt += ((1 - nxt) + cur - 1) // cur * cur
        while nxt <= bound:
            stack.append(seq + (nxt,))
            nxt += cur
    return out


def _orbit_len(d: int, amphidrome: bool) -> int:
    return d // 2 if amphidrome else d


def enumerate_chains(spec: EnumSpec) -> Iterator[NegativeTwistChain]:
    """Every negative-twist chain within the caps, by length then entries.

    With ``amphidrome=None`` a sequence valid both ways is emitted twice,
    non-amphidrome first.
    """
    return _chains_from(primitive_sequences(spec.max_entry, spec.max_len), spec)


def _chains_from(prims: dict[int, list[tuple[int, ...]]], spec: EnumSpec) -> Iterator[NegativeTwistChain]:
    kinds = (False, True) if spec.amphidrome is None else (spec.amphidrome,)
    for length in range(2, spec.max_len + 1):
        batch: list[tuple[tuple[int, ...], bool]] = []
        for b in prims[length]:
            top = max(b)
            for d in range(1, spec.max_entry // top + 1):
                for amph in kinds:
                    if amph and (d % 2 or b[-1] != 1):
                        continue
                    if spec.m_cap is not None and _orbit_len(d, amph) > spec.m_cap:
                        continue
                    batch.append((tuple(d * x for x in b), amph))
        batch.sort()
        for entries, amph in batch:
            yield NegativeTwistChain.of(entries, amph)


# -- extremal search ------------------------------------------------------------


def end_orders(chain: NegativeTwistChain) -> tuple[int, int]:
    """Rotation orders ``lambda`` at the two boundaries of the cut curve."""
    v1, v2 = chain_valencies(chain)
    return v1.lam, v2.lam


def admissible(chain: NegativeTwistChain, g: int, i: int | None = None, mode: str = ADMISSIBLE) -> bool:
    """Whether ``chain`` passes the genus-``g`` filter (for type ``i`` if given).

    ``envelope`` keeps ``m <= g`` and both orders ``<= 4g+2``.  ``admissible``
    tightens the orders per type: ``<= 2g`` at both ends for type 0, and
    ``4i+2`` and ``4(g-i)+2`` at the two ends for type ``i >= 1``.  Without a
    type it is the union over all types.
    """
    if chain.m_gamma > g:
        return False
    l1, l2 = end_orders(chain)
    if mode == ENVELOPE:
        return l1 <= 4 * g + 2 and l2 <= 4 * g + 2
    if mode != ADMISSIBLE:
        raise InvalidData(f"unknown filter mode {mode!r}")
    types = range(g // 2 + 1) if i is None else (i,)
    for t in types:
        if t == 0:
            if l1 <= 2 * g and l2 <= 2 * g:
                return True
        else:
            a, b = 4 * t + 2, 4 * (g - t) + 2
            if (l1 <= a and l2 <= b) or (l1 <= b and l2 <= a):
                return True
    return False


def abs_fdtc(chain: NegativeTwistChain) -> Fraction:
    return chain_H(chain.seq) / chain.m_gamma


@dataclass(frozen=True)
class ExtremalResult:
    min_abs_c: Fraction
    witness: NegativeTwistChain
    examined: int
    bound: Fraction


def admissible_chains(
    spec: EnumSpec, i: int | None = None, mode: str = ADMISSIBLE
) -> Iterator[NegativeTwistChain]:
    g = spec.genus
    if g is None:
        raise InvalidData("extremal search needs a genus")
    # convex sequences peak at an end, so normalized entries never exceed the largest order
    prims = primitive_sequences(min(spec.max_entry, 4 * g + 2), spec.max_len)
    m_cap = g if spec.m_cap is None else min(g, spec.m_cap)
    narrowed = EnumSpec(spec.max_entry, spec.max_len, g, m_cap, spec.amphidrome)
    for chain in _chains_from(prims, narrowed):
        if admissible(chain, g, i, mode):
            yield chain


def extremal_fdtc(spec: EnumSpec, i: int | None = None, mode: str = ADMISSIBLE) -> ExtremalResult:
    """Smallest ``|c|`` over the admissible chains, with the first chain attaining it."""
    best: tuple[Fraction, NegativeTwistChain] | None = None
    count = 0
    for chain in admissible_chains(spec, i, mode):
        count += 1
        c = abs_fdtc(chain)
        if best is None or c < best[0]:
            best = (c, chain)
    if best is None:
        raise InvalidData("no admissible chain within the caps")
    g = spec.genus
    return ExtremalResult(best[0], best[1], count, lower_bound(g, i) if g >= 2 else Fraction(0))


CSV_COLUMNS = ("chain", "d", "H", "m", "c", "bound", "margin")


def extremal_rows(spec: EnumSpec, i: int | None = None, mode: str = ADMISSIBLE, top: int | None = 20):
    """The ``top`` admissible chains with the smallest ``|c|`` as CSV-ready rows."""
    bound = lower_bound(spec.genus, i)
    chains = sorted(admissible_chains(spec, i, mode), key=lambda ch: (abs_fdtc(ch), len(ch.entries), ch.entries))
    if top is not None:
        chains = chains[:top]
    for ch in chains:
        c = abs_fdtc(ch)
        yield {
            "chain": " ".join(map(str, ch.entries)) + (" amph" if ch.amphidrome else ""),
            "d": ch.d,
            "H": format_rational(chain_H(ch.seq)),
            "m": ch.m_gamma,
            "c": format_rational(-c),
            "bound": format_rational(bound),
            "margin": format_rational(c - bound),
        }


def write_csv(rows, fh: IO[str]) -> int:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    n = 0
    for row in rows:
        writer.writerow(row)
        n += 1
    return n


# -- random monodromy -----------------------------------------------------------


class GenerationError(RuntimeError):
    """No valid datum found within the retry budget."""


MAX_TRIES = 2000
_MULTS = (1, 1, 1, 2, 2, 3, 4, 6)


@lru_cache(maxsize=1)
def _chain_pool() -> dict[tuple[int, int, bool], list[NegativeTwistChain]]:
    pool: dict[tuple[int, int, bool], list[NegativeTwistChain]] = {}
    for ch in enumerate_chains(EnumSpec(max_entry=12, max_len=5)):
        pool.setdefault((ch.entries[0], ch.entries[-1], ch.amphidrome), []).append(ch)
    return pool


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _random_branch(rng: random.Random, n: int) -> Valency:
    m = rng.choice([k for k in _divisors(n) if k < n])
    lam = n // m
    return Valency(m, lam, rng.choice([s for s in range(1, lam) if gcd(s, lam) == 1]))


def _closing_branch(n: int, residue: int) -> Valency | None:
    """Multiple point making the rotation data of a part sum to zero mod ``n``."""
    r = residue % n
    if r == 0:
        return None
    m = gcd(r, n)
    return Valency(m, n // m, r // m)


def _attempt(rng: random.Random, g: int) -> MonodromyData | None:
    n_parts = rng.randint(1, min(3, g))
    mults = [rng.choice(_MULTS) for _ in range(n_parts)]
    pool = _chain_pool()

    # (end parts, amphidrome) per orbit: a spanning tree, then optional extras
    plan: list[tuple[int, int, bool]] = [(rng.randrange(k), k, False) for k in range(1, n_parts)]
    for _ in range(rng.choice((0, 0, 1, 1, 2))):
        kind = rng.random()
        a = rng.randrange(n_parts)
        if kind < 0.35:
            plan.append((a, a, True))
        else:
            plan.append((a, rng.randrange(n_parts), False))

    chains = []
    for a, b, amph in plan:
        if amph:
            options = [ch for (x, _y, am), chs in pool.items() if am and x == mults[a] for ch in chs]
        else:
            options = pool.get((mults[a], mults[b], False), [])
        if not options:
            return None
        chains.append(rng.choice(options))
    if sum(ch.m_gamma for ch in chains) > g:
        return None

    slots: list[list[tuple[str, Valency]]] = [[] for _ in range(n_parts)]
    annuli = []
    for k, ((a, b, amph), ch) in enumerate(zip(plan, chains)):
        v1, v2 = chain_valencies(ch)
        aid = f"A{k + 1}"
        s1 = f"{aid}a"
        slots[a].append((s1, v1))
        end1 = AnnulusEnd(f"P{a + 1}", s1, v1)
        if amph:
            end2 = end1
        else:
            s2 = f"{aid}b"
            slots[b].append((s2, v2))
            end2 = AnnulusEnd(f"P{b + 1}", s2, v2)
        annuli.append(AnnulusOrbit(aid, ch.m_gamma, screw_number(ch), amph, end1, end2))

    parts = []
    for k, n in enumerate(mults):
        slot_vs = [v for _s, v in slots[k]]
        branches: list[Valency] = []
        if n > 1:
            branches = [_random_branch(rng, n) for _ in range(rng.choice((0, 1, 1, 2)))]
            closing = _closing_branch(n, -sum(v.m * v.sigma for v in (*slot_vs, *branches)))
            if closing is not None:
                branches.append(closing)
        # a rational quotient forces the piece count; keep it unambiguous elsewhere
        pieces = gcd_all([n, *(v.m for v in (*slot_vs, *branches))])
        parts.append(PeriodicPart(f"P{k + 1}", n, 0, pieces, tuple(branches), tuple(s for s, _v in slots[k])))

    # raise quotient genera until the Euler characteristic matches g
    deficit = sum(part_euler(p) for p in parts) - (2 - 2 * g)
    if deficit < 0 or deficit % 2:
        return None
    genera = [0] * n_parts
    while deficit:
        fits = [k for k, n in enumerate(mults) if 2 * n <= deficit and parts[k].pieces == 1]
        if not fits:
            return None
        k = rng.choice(fits)
        genera[k] += 1
        deficit -= 2 * mults[k]
    parts = [
        PeriodicPart(p.id, p.mult, q, p.pieces, p.branch_valencies, p.slots) for p, q in zip(parts, genera)
    ]
    data = MonodromyData(g, tuple(parts), tuple(annuli))
    return data if validate_monodromy(data).ok else None


def random_monodromy(g: int, seed: int) -> MonodromyData:
    """A valid datum of genus ``g``, determined by ``(g, seed)``."""
    if g < 2:
        raise InvalidData(f"genus {g} is below 2")
    rng = random.Random(f"{g}:{seed}")
    for _ in range(MAX_TRIES):
        data = _attempt(rng, g)
        if data is not None:
            return data
    raise GenerationError(f"no datum for genus {g}, seed {seed} after {MAX_TRIES} tries")
