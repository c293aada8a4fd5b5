"""Pseudo-periodic maps given combinatorially, and the fibers they produce.

A map is described orbit by orbit: periodic parts (an ``n``-sheeted cyclic
cover of a quotient surface, with multiple points and boundary slots) joined
by annulus orbits around the cut curves (orbit length, screw number,
amphidromy and the valency of each boundary).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .chains import DEFAULT_CAPS, SearchCaps, fdtc_from_screw, hj_expand, synthesize_chain
from .core import (
    InvalidData,
    ValidationReport,
    Valency,
    format_rational,
    gcd_all,
    parse_rational,
)
from .decomposition import CurveOrbit, curve_types
from .fiber import FiberGraph, Vertex, delta_invariants


class MonodromyFormatError(InvalidData):
    """Malformed monodromy description."""


@dataclass(frozen=True)
class PeriodicPart:
    id: str
    mult: int
    quotient_genus: int
    pieces: int
    branch_valencies: tuple[Valency, ...]
    slots: tuple[str, ...]


@dataclass(frozen=True)
class AnnulusEnd:
    part: str
    slot: str
    valency: Valency


@dataclass(frozen=True)
class AnnulusOrbit:
    """An orbit of annuli around cut curves.

    An amphidrome orbit folds onto itself, so both of its ends sit in the same
    slot with the same valency (first entry ``2 * orbit_len``).
    """

    id: str
    orbit_len: int
    screw: Fraction
    amphidrome: bool
    end1: AnnulusEnd
    end2: AnnulusEnd

    @property
    def ends(self) -> tuple[AnnulusEnd, ...]:
        return (self.end1,) if self.amphidrome else (self.end1, self.end2)


@dataclass(frozen=True)
class MonodromyData:
    genus: int
    parts: tuple[PeriodicPart, ...]
    annuli: tuple[AnnulusOrbit, ...]

    def part(self, pid: str) -> PeriodicPart:
        for p in self.parts:
            if p.id == pid:
                return p
        raise InvalidData(f"unknown part {pid!r}")

    def slot_valencies(self) -> dict[tuple[str, str], Valency]:
        out = {}
        for a in self.annuli:
            for e in a.ends:
                out[(e.part, e.slot)] = e.valency
        return out

    # -- JSON -------------------------------------------------------------

    @classmethod
    def from_json(cls, data: Any) -> "MonodromyData":
        if not isinstance(data, dict):
            raise MonodromyFormatError("monodromy must be a JSON object")
        _reject_unknown(data, {"genus", "parts", "annuli"}, "monodromy")
        for key in ("genus", "parts", "annuli"):
            if key not in data:
                raise MonodromyFormatError(f"missing key {key!r}")
        genus = _int(data["genus"], "genus")
        parts = []
        for k, raw in enumerate(data["parts"]):
            where = f"parts[{k}]"
            if not isinstance(raw, dict):
                raise MonodromyFormatError(f"{where} must be an object")
            _reject_unknown(raw, {"id", "mult", "quotient_genus", "pieces", "branch_valencies", "slots"}, where)
            pid = raw.get("id")
            if not isinstance(pid, str):
                raise MonodromyFormatError(f"{where}: 'id' must be a string")
            where = f"part {pid!r}"
            slots = raw.get("slots", [])
            if not (isinstance(slots, list) and all(isinstance(x, str) for x in slots)):
                raise MonodromyFormatError(f"{where}: 'slots' must be a list of strings")
            parts.append(
                PeriodicPart(
                    id=pid,
                    mult=_int(raw.get("mult"), f"{where}: mult"),
                    quotient_genus=_int(raw.get("quotient_genus", 0), f"{where}: quotient_genus"),
                    pieces=_int(raw.get("pieces", 1), f"{where}: pieces"),
                    branch_valencies=tuple(
                        _valency(v, f"{where}: branch_valencies[{j}]")
                        for j, v in enumerate(raw.get("branch_valencies", []))
                    ),
                    slots=tuple(slots),
                )
            )
        annuli = []
        for k, raw in enumerate(data["annuli"]):
            where = f"annuli[{k}]"
            if not isinstance(raw, dict):
                raise MonodromyFormatError(f"{where} must be an object")
            _reject_unknown(raw, {"id", "orbit_len", "screw", "amphidrome", "ends"}, where)
            aid = raw.get("id")
            if not isinstance(aid, str):
                raise MonodromyFormatError(f"{where}: 'id' must be a string")
            where = f"annulus {aid!r}"
            amph = raw.get("amphidrome", False)
            if not isinstance(amph, bool):
                raise MonodromyFormatError(f"{where}: 'amphidrome' must be true or false")
            try:
                screw = parse_rational(raw.get("screw"))
            except InvalidData as exc:
                raise MonodromyFormatError(f"{where}: screw: {exc}") from None
            ends_raw = raw.get("ends")
            if not isinstance(ends_raw, list) or not ends_raw:
                raise MonodromyFormatError(f"{where}: 'ends' must be a non-empty list")
            ends = [_end(e, f"{where}: ends[{j}]") for j, e in enumerate(ends_raw)]
            if amph:
                if len(ends) > 2 or (len(ends) == 2 and ends[0] != ends[1]):
                    raise MonodromyFormatError(f"{where}: an amphidrome orbit has a single end")
                end1 = end2 = ends[0]
            else:
                if len(ends) != 2:
                    raise MonodromyFormatError(f"{where}: needs exactly two ends")
                end1, end2 = ends
            annuli.append(AnnulusOrbit(aid, _int(raw.get("orbit_len"), f"{where}: orbit_len"), screw, amph, end1, end2))
        return cls(genus, tuple(parts), tuple(annuli))

    def to_json(self) -> dict:
        def end(e: AnnulusEnd) -> dict:
            return {"part": e.part, "slot": e.slot, "valency": list(e.valency.as_tuple())}

        return {
            "genus": self.genus,
            "parts": [
                {
                    "id": p.id,
                    "mult": p.mult,
                    "quotient_genus": p.quotient_genus,
                    "pieces": p.pieces,
                    "branch_valencies": [list(v.as_tuple()) for v in p.branch_valencies],
                    "slots": list(p.slots),
                }
                for p in self.parts
            ],
            "annuli": [
                {
                    "id": a.id,
                    "orbit_len": a.orbit_len,
                    "screw": format_rational(a.screw),
                    "amphidrome": a.amphidrome,
                    "ends": [end(e) for e in a.ends],
                }
                for a in self.annuli
            ],
        }


def _reject_unknown(obj: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise MonodromyFormatError(f"{where}: unknown key(s) {', '.join(map(repr, extra))}")


def _int(x: Any, where: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise MonodromyFormatError(f"{where} must be an integer, got {x!r}")
    return x


def _valency(raw: Any, where: str) -> Valency:
    try:
        return Valency.of(raw)
    except (InvalidData, TypeError) as exc:
        raise MonodromyFormatError(f"{where}: {exc}") from None


def _end(raw: Any, where: str) -> AnnulusEnd:
    if not isinstance(raw, dict):
        raise MonodromyFormatError(f"{where} must be an object")
    _reject_unknown(raw, {"part", "slot", "valency"}, where)
    part, slot = raw.get("part"), raw.get("slot")
    if not isinstance(part, str) or not isinstance(slot, str):
        raise MonodromyFormatError(f"{where}: 'part' and 'slot' must be strings")
    return AnnulusEnd(part, slot, _valency(raw.get("valency"), f"{where}: valency"))


def load_monodromy(path) -> MonodromyData:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MonodromyFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return MonodromyData.from_json(data)


# -- Riemann-Hurwitz bookkeeping ---------------------------------------------


def part_euler(p: PeriodicPart) -> int:
    """Euler characteristic of the whole part orbit (boundary circles kept open)."""
    return p.mult * (2 - 2 * p.quotient_genus - len(p.slots) - len(p.branch_valencies)) + sum(
        v.m for v in p.branch_valencies
    )


def piece_genus_rh(p: PeriodicPart, slot_ms: Sequence[int]) -> int:
    """Genus of one piece of ``p`` once its boundary circles are capped off.

    ``slot_ms`` lists the number of boundary circles in each slot (the first
    entry of the slot valency).
    """
    if len(slot_ms) != len(p.slots):
        raise InvalidData(f"part {p.id!r}: {len(p.slots)} slots but {len(slot_ms)} circle counts")
    closed = part_euler(p) + sum(slot_ms)
    if closed % p.pieces or (2 * p.pieces - closed) % (2 * p.pieces):
        raise InvalidData(f"part {p.id!r}: Riemann-Hurwitz gives a non-integral piece genus")
    h = (2 * p.pieces - closed) // (2 * p.pieces)
    if h < 0:
        raise InvalidData(f"part {p.id!r}: Riemann-Hurwitz gives a negative piece genus")
    return h


def _slot_ms(d: MonodromyData, p: PeriodicPart) -> list[int]:
    vals = d.slot_valencies()
    return [vals[(p.id, s)].m if (p.id, s) in vals else 0 for s in p.slots]


def piece_genera(d: MonodromyData) -> dict[str, int]:
    return {p.id: piece_genus_rh(p, _slot_ms(d, p)) for p in d.parts}


def validate_monodromy(d: MonodromyData) -> ValidationReport:
    report = ValidationReport()
    bad = report.problems.append
    if d.genus < 2:
        bad(f"genus {d.genus} is below 2")
    ids = Counter(p.id for p in d.parts)
    for pid, k in ids.items():
        if k > 1:
            bad(f"part id {pid!r} is repeated")
    for aid, k in Counter(a.id for a in d.annuli).items():
        if k > 1:
            bad(f"annulus id {aid!r} is repeated")
    parts = {p.id: p for p in d.parts}

    for p in d.parts:
        if p.mult < 1 or p.quotient_genus < 0 or p.pieces < 1:
            bad(f"part {p.id!r}: mult and pieces must be positive, quotient genus non-negative")
            continue
        for sid, k in Counter(p.slots).items():
            if k > 1:
                bad(f"part {p.id!r}: slot {sid!r} is repeated")
        for v in p.branch_valencies:
            if v.lam < 2:
                bad(f"part {p.id!r}: branch valency {v} is a simple point")
            if v.order != p.mult:
                bad(f"part {p.id!r}: branch valency {v} has m*lambda = {v.order}, expected {p.mult}")

    used: Counter = Counter()
    for a in d.annuli:
        if a.orbit_len < 1:
            bad(f"annulus {a.id!r}: orbit length must be positive")
        if a.screw >= 0:
            bad(f"annulus {a.id!r}: screw number {format_rational(a.screw)} is not negative")
        want_m = 2 * a.orbit_len if a.amphidrome else a.orbit_len
        for e in a.ends:
            used[(e.part, e.slot)] += 1
            p = parts.get(e.part)
            if p is None:
                bad(f"annulus {a.id!r}: unknown part {e.part!r}")
                continue
            if e.slot not in p.slots:
                bad(f"annulus {a.id!r}: part {e.part!r} has no slot {e.slot!r}")
            if e.valency.m != want_m:
                bad(f"annulus {a.id!r}: end valency {e.valency} should have first entry {want_m}")
            if e.valency.order != p.mult:
                bad(f"annulus {a.id!r}: end valency {e.valency} has m*lambda = {e.valency.order}, part {p.id!r} has {p.mult} sheets")
    for p in d.parts:
        for s in p.slots:
            if used[(p.id, s)] != 1:
                bad(f"part {p.id!r}: slot {s!r} is used by {used[(p.id, s)]} annulus ends")
    if report.problems:
        return report

    slot_vals = d.slot_valencies()
    chi_total = 0
    for p in d.parts:
        slot_vs = [slot_vals[(p.id, s)] for s in p.slots]
        # rotation numbers around all special orbits of a cyclic cover add up to zero
        holonomy = sum(v.m * v.sigma for v in (*slot_vs, *p.branch_valencies))
        if holonomy % p.mult:
            bad(f"part {p.id!r}: rotation data sum to {holonomy}, not divisible by {p.mult}")
        ms = [v.m for v in (*slot_vs, *p.branch_valencies)]
        common = gcd_all([p.mult, *ms])
        if common % p.pieces:
            bad(f"part {p.id!r}: {p.pieces} pieces do not divide gcd {common} of the orbit sizes")
        elif p.quotient_genus == 0 and p.pieces != common:
            bad(f"part {p.id!r}: a rational quotient forces {common} pieces, not {p.pieces}")
        chi = part_euler(p)
        chi_total += chi
        try:
            piece_genus_rh(p, [v.m for v in slot_vs])
        except InvalidData as exc:
            bad(str(exc))
        if chi >= 0:
            bad(f"part {p.id!r}: pieces are disks or annuli (Euler characteristic {chi}), so a cut curve is inessential or parallel")
    if chi_total != 2 - 2 * d.genus:
        bad(f"Euler characteristic {chi_total} does not match genus {d.genus} (expected {2 - 2 * d.genus})")
    curves = sum(a.orbit_len for a in d.annuli)
    if curves > d.genus:
        bad(f"{curves} cut curves exceed the genus {d.genus}")
    return report


def _require_valid(d: MonodromyData) -> None:
    report = validate_monodromy(d)
    if not report.ok:
        raise InvalidData("; ".join(report.problems))


# -- map side -----------------------------------------------------------------


def fdtc_all(d: MonodromyData) -> dict[str, Fraction]:
    _require_valid(d)
    return {a.id: fdtc_from_screw(a.screw, a.orbit_len, a.amphidrome) for a in d.annuli}


def _cut_curve_types(d: MonodromyData) -> dict[str, int | None]:
    genera = piece_genera(d)
    nodes = {p.id: [(p.pieces, genera[p.id])] for p in d.parts}
    orbits = [
        CurveOrbit(a.id, a.end1.part, a.end2.part, a.orbit_len, a.amphidrome) for a in d.annuli
    ]
    return curve_types(nodes, orbits, d.genus)


def cut_curve_types(d: MonodromyData) -> dict[str, int | None]:
    _require_valid(d)
    return _cut_curve_types(d)


def cut_curve_type(d: MonodromyData, a: AnnulusOrbit | str) -> int | None:
    """Type of the cut curves of orbit ``a``; ``None`` when the pieces can be glued
    in ways that disagree."""
    aid = a if isinstance(a, str) else a.id
    types = cut_curve_types(d)
    if aid not in types:
        raise InvalidData(f"unknown annulus {aid!r}")
    return types[aid]


@dataclass(frozen=True)
class DeltaSplit:
    genus: int
    by_type: dict[int, Fraction]
    untyped: Fraction
    total: Fraction

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "delta_by_type": {str(i): format_rational(q) for i, q in sorted(self.by_type.items())},
            "delta_untyped": format_rational(self.untyped),
            "delta": format_rational(self.total),
        }


def delta_from_map(d: MonodromyData) -> DeltaSplit:
    """Sum of ``|c|`` over every individual cut curve, split by curve type."""
    coeffs = fdtc_all(d)
    types = _cut_curve_types(d)
    by_type = {i: Fraction(0) for i in range(d.genus // 2 + 1)}
    untyped = Fraction(0)
    for a in d.annuli:
        share = a.orbit_len * abs(coeffs[a.id])
        if types[a.id] is None:
            untyped += share
        else:
            by_type[types[a.id]] += share
    return DeltaSplit(d.genus, by_type, untyped, sum(by_type.values(), untyped))


# -- fiber side ---------------------------------------------------------------


def assemble_fiber(d: MonodromyData, caps: SearchCaps = DEFAULT_CAPS) -> FiberGraph:
    """Dual graph of the minimal normal-crossing fiber whose monodromy is ``d``.

    One component per part (multiplicity ``n``), an H-J tail per multiple
    point, and per annulus orbit the chain with its boundary valencies and
    screw number.  An amphidrome chain ends at a component carrying two
    tails of multiplicity ``orbit_len``.
    """
    _require_valid(d)
    genera = piece_genera(d)
    vertices = [Vertex(p.id, p.mult, p.quotient_genus, genera[p.id]) for p in d.parts]
    edges: list[tuple[str, str]] = []

    def path(ids: list[str]) -> None:
        edges.extend(zip(ids, ids[1:]))

    for p in d.parts:
        for j, v in enumerate(p.branch_valencies):
            tail = hj_expand(v).entries
            ids = [p.id] + [f"{p.id}.t{j}.{i}" for i in range(1, len(tail))]
            vertices.extend(Vertex(x, m) for x, m in zip(ids[1:], tail[1:]))
            path(ids)

    for a in d.annuli:
        chain = synthesize_chain(a.end1.valency, a.end2.valency, a.screw, a.amphidrome, caps).entries
        if a.amphidrome:
            fold = f"{a.id}.fold"
            ids = [a.end1.part] + [f"{a.id}.{i}" for i in range(1, len(chain) - 1)] + [fold]
            vertices.extend(Vertex(x, m) for x, m in zip(ids[1:], chain[1:]))
            path(ids)
            for leaf in ("leaf1", "leaf2"):
                vertices.append(Vertex(f"{a.id}.{leaf}", a.orbit_len))
                edges.append((fold, f"{a.id}.{leaf}"))
        else:
            ids = [a.end1.part] + [f"{a.id}.{i}" for i in range(1, len(chain) - 1)] + [a.end2.part]
            vertices.extend(Vertex(x, m) for x, m in zip(ids[1:-1], chain[1:-1]))
            path(ids)
    return FiberGraph(tuple(vertices), tuple(edges), d.genus)


@dataclass(frozen=True)
class IdentityReport:
    fiber_side: DeltaSplit
    map_side: DeltaSplit

    @property
    def equal(self) -> bool:
        f, m = self.fiber_side, self.map_side
        return f.total == m.total and f.by_type == m.by_type and f.untyped == m.untyped

    def per_type(self) -> dict[int, tuple[Fraction, Fraction]]:
        return {i: (self.fiber_side.by_type[i], self.map_side.by_type[i]) for i in sorted(self.map_side.by_type)}

    def to_json(self) -> dict:
        return {
            "lhs": self.fiber_side.to_json(),
            "rhs": self.map_side.to_json(),
            "equal": self.equal,
        }


def verify_main_identity(d: MonodromyData, caps: SearchCaps = DEFAULT_CAPS) -> IdentityReport:
    """delta from the assembled fiber against delta from the twist coefficients."""
    report = delta_invariants(assemble_fiber(d, caps))
    fiber_side = DeltaSplit(d.genus, dict(report.delta_by_type), report.delta_untyped, report.delta_total)
    return IdentityReport(fiber_side, delta_from_map(d))


# -- bounds -------------------------------------------------------------------


def lower_bound(g: int, i: int | None = None) -> Fraction:
    """Smallest possible ``|c|`` of a cut curve (of type ``i`` if given) at genus ``g``."""
    if g < 2:
        raise InvalidData(f"genus {g} is below 2")
    if i is None:
        if g % 2 == 0:
            return Fraction(1, 4 * g * (g + 1) ** 2)
        return Fraction(1, 4 * g * g * (g + 2))
    if not 0 <= i <= g // 2:
        raise InvalidData(f"type {i} is outside 0..{g // 2}")
    if i == 0:
        return Fraction(1, 4 * g**3)
    return Fraction(1, g * (4 * i + 2) * (4 * (g - i) + 2))


@dataclass(frozen=True)
class BoundRow:
    annulus: str
    abs_c: Fraction
    type: int | None
    bound: Fraction
    type_bound: Fraction | None

    @property
    def ok(self) -> bool:
        return self.abs_c >= self.bound and (self.type_bound is None or self.abs_c >= self.type_bound)


def check_fdtc_bound(abs_c: Fraction, g: int, i: int | None = None, label: str = "") -> BoundRow:
    return BoundRow(label, Fraction(abs_c), i, lower_bound(g), None if i is None else lower_bound(g, i))


@dataclass(frozen=True)
class BoundsReport:
    rows: tuple[BoundRow, ...]

    @property
    def violations(self) -> tuple[BoundRow, ...]:
        return tuple(r for r in self.rows if not r.ok)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_bounds(d: MonodromyData) -> BoundsReport:
    """Compare every orbit's ``|c|`` against the genus bounds; never raises."""
    try:
        types = _cut_curve_types(d)
    except InvalidData:
        types = {}
    rows = []
    for a in d.annuli:
        if a.orbit_len < 1 or a.screw >= 0:
            abs_c = Fraction(0)
        else:
            abs_c = abs(fdtc_from_screw(a.screw, a.orbit_len, a.amphidrome))
        rows.append(check_fdtc_bound(abs_c, d.genus, types.get(a.id), a.id))
    return BoundsReport(tuple(rows))
