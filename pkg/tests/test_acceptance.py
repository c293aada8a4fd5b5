"""Acceptance criteria 1-8, each with its time limit.

One line per criterion is printed in the terminal summary.
"""
import json
import time
from fractions import Fraction
from functools import lru_cache

import pytest

from fdtc.chains import (
    chain_H,
    chain_valencies,
    fdtc_from_chain,
    hj_expand,
    screw_number,
    semistable_node_count,
    synthesize_chain,
)
from fdtc.cli import main
from fdtc.core import Valency, lcm_all
from fdtc.enumeration import EnumSpec, enumerate_chains, extremal_fdtc, random_monodromy
from fdtc.monodromy import (
    cut_curve_type,
    fdtc_all,
    part_euler,
    piece_genera,
    validate_monodromy,
    verify_main_identity,
)

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    assert ok, RESULTS[n]


@lru_cache(maxsize=1)
def corpus():
    return [(g, seed, random_monodromy(g, seed)) for g in (2, 3, 4, 5) for seed in range(250)]


@lru_cache(maxsize=1)
def chains_30_8():
    return list(enumerate_chains(EnumSpec(30, 8)))


def test_criterion_1_example_golden(capsys, data_dir):
    t0 = time.perf_counter()
    code = main(["analyze", str(data_dir / "worked_g2_fiber.json"), "--json"])
    out = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - t0
    valencies = sorted(tuple(t["valency"]) for t in out["tails"])
    ok = (
        code == 0
        and len(out["principal"]) == 2
        and [(c["seq"], c["H"]) for c in out["chains"]] == [([6, 5, 4], "1/12")]
        and valencies == sorted([(3, 2, 1), (2, 3, 2), (2, 2, 1), (1, 4, 1)])
        and out["delta"] == "1/12"
        and elapsed < 1
    )
    record(1, ok, f"chain (6,5,4), H = 1/12, delta = {out['delta']}, {elapsed:.3f}s")


def test_criterion_2_main_identity():
    t0 = time.perf_counter()
    data = corpus()
    mismatches = []
    for g, seed, d in data:
        r = verify_main_identity(d)
        same_types = all(a == b for a, b in r.per_type().values())
        if not (r.equal and same_types and r.fiber_side.total == r.map_side.total):
            mismatches.append((g, seed))
    elapsed = time.perf_counter() - t0
    ok = len(data) >= 1000 and not mismatches and elapsed < 300
    record(2, ok, f"{len(data)} data, {len(mismatches)} mismatches, {elapsed:.1f}s")


def test_criterion_3_chain_round_trips():
    t0 = time.perf_counter()
    chains = chains_30_8()
    failures = 0
    for chain in chains:
        v1, v2 = chain_valencies(chain)
        back = synthesize_chain(v1, v2, screw_number(chain), chain.amphidrome)
        if back != chain or abs(fdtc_from_chain(chain)) != chain_H(chain.seq) / chain.m_gamma:
            failures += 1
    elapsed = time.perf_counter() - t0
    record(3, failures == 0 and elapsed < 300, f"{len(chains)} chains, {failures} failures, {elapsed:.1f}s")


def test_criterion_4_semistable_oracle():
    t0 = time.perf_counter()
    chains = chains_30_8()
    failures = 0
    for chain in chains:
        d = lcm_all(chain.entries)
        nodes, _ = semistable_node_count(chain.seq, d)
        if nodes != d * chain_H(chain.seq):
            failures += 1
    example = semistable_node_count((6, 5, 4), 60)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and example == (5, 1) and elapsed < 60
    record(4, ok, f"{len(chains)} chains, (6,5,4) at d=60 gives {example[0]} nodes, {elapsed:.1f}s")


def test_criterion_5_bounds():
    t0 = time.perf_counter()
    g2 = extremal_fdtc(EnumSpec(60, 8, genus=2))
    g3 = extremal_fdtc(EnumSpec(60, 8, genus=3))
    t20 = extremal_fdtc(EnumSpec(60, 8, genus=2), 0)
    t21 = extremal_fdtc(EnumSpec(60, 8, genus=2), 1)
    elapsed = time.perf_counter() - t0
    ok = (
        g2.min_abs_c >= Fraction(1, 72)
        and g3.min_abs_c >= Fraction(1, 180)
        and t20.min_abs_c >= Fraction(1, 32)
        and t21.min_abs_c >= Fraction(1, 72)
        and elapsed < 600
    )
    record(
        5,
        ok,
        f"g=2 min {g2.min_abs_c}, g=3 min {g3.min_abs_c}, g=2 type 0 {t20.min_abs_c}, "
        f"type 1 {t21.min_abs_c}, {elapsed:.1f}s",
    )


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def test_criterion_6_hj_sum_identity():
    t0 = time.perf_counter()
    checked = failures = 0
    for lam in range(2, 201):
        for sigma in range(1, lam):
            g, x, _ = ext_gcd(sigma, lam)
            if g != 1:
                continue
            inverse = x % lam or lam
            b = hj_expand(Valency(1, lam, sigma)).entries
            total = sum((Fraction(1, p * q) for p, q in zip(b, b[1:])), Fraction(0))
            checked += 1
            if total != Fraction(inverse, lam):
                failures += 1
    elapsed = time.perf_counter() - t0
    record(6, failures == 0 and elapsed < 60, f"{checked} pairs, {failures} failures, {elapsed:.1f}s")


def test_criterion_7_vanishing():
    failures = 0
    for _g, _seed, d in corpus():
        r = verify_main_identity(d)
        coeffs = fdtc_all(d).values()
        if (r.map_side.total == 0) != all(c == 0 for c in coeffs):
            failures += 1
        if (r.fiber_side.total == 0) != all(c == 0 for c in coeffs):
            failures += 1
    record(7, failures == 0, f"{len(corpus())} data, {failures} failures")


def test_criterion_8_worked_datum(worked):
    chi = sum(part_euler(p) for p in worked.parts)
    genera = piece_genera(worked)
    kind = cut_curve_type(worked, "A1")
    delta_1 = verify_main_identity(worked).map_side.by_type[1]
    ok = (
        validate_monodromy(worked).ok
        and chi == -2
        and (genera["P1"], genera["P2"]) == (1, 1)
        and kind == 1
        and delta_1 == Fraction(1, 12)
    )
    record(8, ok, f"chi = {chi}, piece genera ({genera['P1']},{genera['P2']}), type {kind}, delta_1 = {delta_1}")
