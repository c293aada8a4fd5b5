"""Decorated dual graphs of minimal normal-crossing fibers.

Vertices are components (multiplicity, genus, optional genus of the matching
piece of the smooth fiber); edges are nodes.  The analysis finds principal
components, splits the rest of the graph into principal chains and H-J tails,
types each chain, and sums ``H`` into the invariants ``delta_i``.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .chains import ChainReport, chain_H, chain_report, hj_valency, is_hj_tail
from .core import (
    HJ_TAIL,
    PRINCIPAL,
    ChainSeq,
    InvalidData,
    NegativeTwistChain,
    ValidationReport,
    Valency,
    chain_problem,
    format_rational,
    gcd_all,
    interior_convex,
    parse_rational,
)
from .decomposition import CurveOrbit, curve_types


class FiberFormatError(InvalidData):
    """Malformed fiber description (bad JSON shape, ids or values)."""


class ExtractionError(InvalidData):
    """The graph cannot be cut into principal chains and tails."""


@dataclass(frozen=True)
class Vertex:
    id: str
    mult: int
    genus: int = 0
    piece_genus: int | None = None


@dataclass(frozen=True)
class FiberGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[str, str], ...]
    genus_hint: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        seen: set[str] = set()
        for v in self.vertices:
            if v.id in seen:
                raise FiberFormatError(f"duplicate vertex id {v.id!r}")
            seen.add(v.id)
            if v.mult < 1:
                raise FiberFormatError(f"vertex {v.id!r}: multiplicity must be positive")
            if v.genus < 0 or (v.piece_genus is not None and v.piece_genus < 0):
                raise FiberFormatError(f"vertex {v.id!r}: genus must be non-negative")
        for a, b in self.edges:
            for end in (a, b):
                if end not in seen:
                    raise FiberFormatError(f"edge ({a!r}, {b!r}) names unknown vertex id {end!r}")
        if self.genus_hint is not None and self.genus_hint < 0:
            raise FiberFormatError("genus must be non-negative")

    @property
    def by_id(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    def incidence(self) -> dict[str, list[tuple[int, str]]]:
        """Edge-ends per vertex; a loop contributes two ends."""
        inc: dict[str, list[tuple[int, str]]] = {v.id: [] for v in self.vertices}
        for i, (a, b) in enumerate(self.edges):
            inc[a].append((i, b))
            inc[b].append((i, a))
        return inc

    def is_reduced(self) -> bool:
        return all(v.mult == 1 for v in self.vertices)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        inc = self.incidence()
        start = self.vertices[0].id
        seen = {start}
        todo = [start]
        while todo:
            for _e, w in inc[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    # -- JSON -------------------------------------------------------------

    @classmethod
    def from_json(cls, data: Any) -> "FiberGraph":
        if not isinstance(data, dict):
            raise FiberFormatError("fiber must be a JSON object")
        _reject_unknown(data, {"genus", "vertices", "edges"}, "fiber")
        if "vertices" not in data or "edges" not in data:
            raise FiberFormatError("fiber needs 'vertices' and 'edges'")
        genus = data.get("genus")
        if genus is not None and not _is_int(genus):
            raise FiberFormatError(f"'genus' must be an integer, got {genus!r}")
        vertices = []
        for k, raw in enumerate(data["vertices"]):
            where = f"vertices[{k}]"
            if not isinstance(raw, dict):
                raise FiberFormatError(f"{where} must be an object")
            _reject_unknown(raw, {"id", "mult", "genus", "piece_genus"}, where)
            vid = raw.get("id")
            if not isinstance(vid, str):
                raise FiberFormatError(f"{where}: 'id' must be a string")
            where = f"vertex {vid!r}"
            mult = raw.get("mult")
            vgenus = raw.get("genus", 0)
            piece = raw.get("piece_genus")
            if not _is_int(mult):
                raise FiberFormatError(f"{where}: 'mult' must be an integer")
            if not _is_int(vgenus):
                raise FiberFormatError(f"{where}: 'genus' must be an integer")
            if piece is not None and not _is_int(piece):
                raise FiberFormatError(f"{where}: 'piece_genus' must be an integer")
            vertices.append(Vertex(vid, mult, vgenus, piece))
        edges = []
        for k, raw in enumerate(data["edges"]):
            if not (isinstance(raw, list) and len(raw) == 2 and all(isinstance(x, str) for x in raw)):
                raise FiberFormatError(f"edges[{k}] must be a pair of vertex ids")
            edges.append((raw[0], raw[1]))
        return cls(tuple(vertices), tuple(edges), genus)

    def to_json(self) -> dict:
        out: dict[str, Any] = {}
        if self.genus_hint is not None:
            out["genus"] = self.genus_hint
        verts = []
        for v in self.vertices:
            item: dict[str, Any] = {"id": v.id, "mult": v.mult, "genus": v.genus}
            if v.piece_genus is not None:
                item["piece_genus"] = v.piece_genus
            verts.append(item)
        out["vertices"] = verts
        out["edges"] = [list(e) for e in self.edges]
        return out


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _reject_unknown(obj: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise FiberFormatError(f"{where}: unknown key(s) {', '.join(map(repr, extra))}")


def load_fiber(path) -> FiberGraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FiberFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return FiberGraph.from_json(data)


# -- structure --------------------------------------------------------------


def principal_components(g: FiberGraph) -> set[str]:
    """Components that are not smooth rational or meet the rest in >= 3 points."""
    principal = set()
    for vid, ends in g.incidence().items():
        loops = sum(1 for _e, w in ends if w == vid)
        if g.by_id[vid].genus > 0 or loops or len(ends) >= 3:
            principal.add(vid)
    return principal


@dataclass(frozen=True)
class PathPiece:
    """A principal chain (two principal ends) or a tail (one principal end)."""

    seq: ChainSeq
    start: str
    end: str | None  # None for tails
    vertices: tuple[str, ...]  # every vertex along the path, ends included
    edges: tuple[int, ...]


@dataclass(frozen=True)
class Extraction:
    principal: frozenset[str]
    chains: tuple[PathPiece, ...]
    tails: tuple[PathPiece, ...]


def extract_chains(g: FiberGraph) -> Extraction:
    """Cut the graph into principal chains and H-J tails; every edge is used once."""
    principal = principal_components(g)
    if not principal:
        raise ExtractionError("fiber has no principal component to anchor chains")
    inc = g.incidence()
    mult = {v.id: v.mult for v in g.vertices}
    used: set[int] = set()
    chains: list[PathPiece] = []
    tails: list[PathPiece] = []
    for u in sorted(principal):
        for e, w in inc[u]:
            if e in used:
                continue
            verts, path_edges = [u, w], [e]
            prev, cur = e, w
            while cur not in principal:
                onward = [(e2, x) for e2, x in inc[cur] if e2 != prev]
                if not onward:
                    break
                if len(onward) > 1:
                    raise ExtractionError(f"non-principal vertex {cur!r} has degree >= 3")
                prev, cur = onward[0]
                verts.append(cur)
                path_edges.append(prev)
            used.update(path_edges)
            seq_entries = tuple(mult[x] for x in verts)
            if cur in principal:
                chains.append(PathPiece(ChainSeq(seq_entries, PRINCIPAL), u, cur, tuple(verts), tuple(path_edges)))
            else:
                tails.append(PathPiece(_tail_seq(seq_entries), u, None, tuple(verts), tuple(path_edges)))
    if len(used) != len(g.edges):
        raise ExtractionError("part of the graph is a cycle of non-principal components")
    return Extraction(frozenset(principal), tuple(chains), tuple(tails))


def _tail_seq(entries: tuple[int, ...]) -> ChainSeq:
    try:
        return ChainSeq(entries, HJ_TAIL)
    except InvalidData:
        # keep malformed tails visible to validation rather than failing here
        seq = object.__new__(ChainSeq)
        object.__setattr__(seq, "entries", entries)
        object.__setattr__(seq, "kind", HJ_TAIL)
        return seq


# -- validation ---------------------------------------------------------------


def validate_fiber(g: FiberGraph) -> ValidationReport:
    report = ValidationReport()
    if not g.is_connected():
        report.problems.append("graph is not connected")
    inc = g.incidence()
    mult = {v.id: v.mult for v in g.vertices}
    for v in g.vertices:
        total = sum(mult[w] for _e, w in inc[v.id])
        if total % v.mult:
            report.problems.append(
                f"vertex {v.id!r}: neighbour multiplicities sum to {total}, not divisible by {v.mult}"
            )
    try:
        ext = extract_chains(g)
    except ExtractionError as exc:
        report.problems.append(str(exc))
        return report
    for t in ext.tails:
        if not is_hj_tail(t.seq.entries):
            report.problems.append(f"branch {'-'.join(t.vertices)} at {t.start!r} is not an H-J tail {tuple(t.seq)}")
    for c in ext.chains:
        if not interior_convex(c.seq.entries):
            report.problems.append(f"chain {'-'.join(c.vertices)} contains a redundant (-1)-curve")
    if g.genus_hint is not None and g.is_reduced() and g.is_connected():
        computed = _reduced_genus(g)
        if computed != g.genus_hint:
            report.problems.append(f"declared genus {g.genus_hint} but the nodal curve has genus {computed}")
    return report


def _reduced_genus(g: FiberGraph) -> int:
    return sum(v.genus for v in g.vertices) + len(g.edges) - len(g.vertices) + 1


def fiber_genus(g: FiberGraph) -> int:
    if g.is_reduced():
        return _reduced_genus(g)
    if g.genus_hint is None:
        raise InvalidData("non-reduced fiber without a declared genus")
    return g.genus_hint


# -- typing and invariants ----------------------------------------------------


@dataclass(frozen=True)
class FiberChain:
    start: str
    end: str
    seq: ChainSeq
    H: Fraction
    amphidrome: bool
    report: ChainReport | None  # None when the chain is not a negative-twist chain
    type: int | None


@dataclass(frozen=True)
class FiberTail:
    anchor: str
    seq: ChainSeq
    valency: Valency | None
    fold: bool  # hangs off the end of an amphidrome chain


@dataclass(frozen=True)
class FiberReport:
    genus: int | None
    principal_ids: tuple[str, ...]
    chains: tuple[FiberChain, ...]
    tails: tuple[FiberTail, ...]
    delta_by_type: dict[int, Fraction]
    delta_untyped: Fraction
    delta_total: Fraction

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "principal": list(self.principal_ids),
            "chains": [
                {
                    "start": c.start,
                    "end": c.end,
                    "seq": list(c.seq),
                    "H": format_rational(c.H),
                    "amphidrome": c.amphidrome,
                    "type": c.type,
                    **(
                        {
                            "d": c.report.d,
                            "valencies": [list(c.report.valency_start.as_tuple()), list(c.report.valency_end.as_tuple())],
                            "m": c.report.m_gamma,
                            "screw": format_rational(c.report.s),
                            "fdtc": format_rational(c.report.c),
                        }
                        if c.report
                        else {}
                    ),
                }
                for c in self.chains
            ],
            "tails": [
                {
                    "anchor": t.anchor,
                    "seq": list(t.seq),
                    "valency": list(t.valency.as_tuple()) if t.valency else None,
                    "fold": t.fold,
                }
                for t in self.tails
            ],
            "delta_by_type": {str(i): format_rational(q) for i, q in sorted(self.delta_by_type.items())},
            "delta_untyped": format_rational(self.delta_untyped),
            "delta": format_rational(self.delta_total),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiberReport":
        chains = []
        for c in data["chains"]:
            seq = ChainSeq(tuple(c["seq"]))
            report = None
            if "d" in c:
                v1, v2 = (Valency.of(v) for v in c["valencies"])
                report = ChainReport(
                    seq, c["d"], parse_rational(c["H"]), v1, v2, c["m"],
                    parse_rational(c["screw"]), parse_rational(c["fdtc"]), c["amphidrome"],
                )
            chains.append(FiberChain(c["start"], c["end"], seq, parse_rational(c["H"]), c["amphidrome"], report, c["type"]))
        tails = tuple(
            FiberTail(t["anchor"], _tail_seq(tuple(t["seq"])), Valency.of(t["valency"]) if t["valency"] else None, t["fold"])
            for t in data["tails"]
        )
        return cls(
            genus=data["genus"],
            principal_ids=tuple(data["principal"]),
            chains=tuple(chains),
            tails=tails,
            delta_by_type={int(i): parse_rational(q) for i, q in data["delta_by_type"].items()},
            delta_untyped=parse_rational(data["delta_untyped"]),
            delta_total=parse_rational(data["delta"]),
        )


def _fold_vertices(g: FiberGraph, ext: Extraction) -> set[str]:
    """Principal ends of amphidrome chains.

    Such a component is rational, has multiplicity ``d`` equal to the gcd of its
    chain, and carries exactly two one-vertex tails of multiplicity ``d/2``.
    """
    by_id = g.by_id
    tails_at: dict[str, list[PathPiece]] = defaultdict(list)
    for t in ext.tails:
        tails_at[t.start].append(t)
    ends_at: dict[str, list[PathPiece]] = defaultdict(list)
    for c in ext.chains:
        ends_at[c.start].append(c)
        ends_at[c.end].append(c)
    folds = set()
    for vid in ext.principal:
        v = by_id[vid]
        if v.genus or v.mult % 2 or len(ends_at[vid]) != 1 or len(tails_at[vid]) != 2:
            continue
        chain = ends_at[vid][0]
        if chain.start == chain.end:
            continue
        if all(t.seq.entries == (v.mult, v.mult // 2) for t in tails_at[vid]) and gcd_all(chain.seq) == v.mult:
            folds.add(vid)
    # a chain folded at both ends is not something a monodromy produces
    for c in ext.chains:
        if c.start in folds and c.end in folds:
            folds.discard(c.start)
            folds.discard(c.end)
    return folds


def _orient(c: PathPiece, folds: set[str]) -> PathPiece:
    flip = False
    if c.start in folds:
        flip = True
    elif c.end in folds:
        flip = False
    elif c.start > c.end:
        flip = True
    elif c.start == c.end:
        flip = c.seq.entries[::-1] < c.seq.entries
    if not flip:
        return c
    return PathPiece(c.seq.reversed(), c.end, c.start, c.vertices[::-1], c.edges[::-1])


def _piece_candidates(
    v: Vertex, slot_ms: list[int], branch_ms: list[int]
) -> list[tuple[int, int]]:
    """Possible (pieces, piece genus) of the smooth-fiber part over ``v``.

    Riemann-Hurwitz over the component: a ``mult``-sheeted cyclic cover of a
    genus-``genus`` curve, branched at the tails and bounded at the chain ends.
    The number of pieces divides every orbit size; it is exactly their gcd
    when the component is rational.
    """
    n = v.mult
    beta, s = len(slot_ms), len(branch_ms)
    euler = n * (2 - 2 * v.genus - beta - s) + sum(branch_ms)
    closed = euler + sum(slot_ms)  # Euler characteristic with boundaries capped
    common = gcd_all([n, *slot_ms, *branch_ms])
    ks = [common] if v.genus == 0 else [k for k in range(1, common + 1) if common % k == 0]
    out = []
    for k in ks:
        if (2 * k - closed) % (2 * k):
            continue
        h = (2 * k - closed) // (2 * k)
        if h < 0:
            continue
        if v.piece_genus is not None and v.piece_genus != h:
            continue
        out.append((k, h))
    return out


def _analyse(g: FiberGraph):
    ext = extract_chains(g)
    folds = _fold_vertices(g, ext)
    chains = sorted(
        (_orient(c, folds) for c in ext.chains),
        key=lambda c: (c.start, c.end, c.seq.entries),
    )
    return ext, folds, chains


def _chain_types(g: FiberGraph, ext: Extraction, folds: set[str], chains: list[PathPiece], genus: int | None):
    if genus is None:
        return [None] * len(chains)
    by_id = g.by_id
    slot_ms: dict[str, list[int]] = defaultdict(list)
    branch_ms: dict[str, list[int]] = defaultdict(list)
    for c in chains:
        d = gcd_all(c.seq)
        slot_ms[c.start].append(d)
        if c.end not in folds:
            slot_ms[c.end].append(d)
    for t in ext.tails:
        if t.start not in folds:
            branch_ms[t.start].append(t.seq.entries[-1])
    nodes = {
        vid: _piece_candidates(by_id[vid], slot_ms[vid], branch_ms[vid])
        for vid in sorted(ext.principal - folds)
    }
    orbits = []
    for i, c in enumerate(chains):
        d = gcd_all(c.seq)
        amph = c.end in folds
        orbits.append(CurveOrbit(i, c.start, c.start if amph else c.end, d // 2 if amph else d, amph))
    types = curve_types(nodes, orbits, genus)
    return [types[i] for i in range(len(chains))]


def _genus_or_none(g: FiberGraph) -> int | None:
    try:
        return fiber_genus(g)
    except InvalidData:
        return None


def chain_type(g: FiberGraph, start: str, end: str, seq: Iterable[int] | None = None) -> int | None:
    """Type of the principal chain between ``start`` and ``end`` (either orientation)."""
    ext, folds, chains = _analyse(g)
    types = _chain_types(g, ext, folds, chains, _genus_or_none(g))
    want = tuple(seq) if seq is not None else None
    for c, t in zip(chains, types):
        for a, b, entries in ((c.start, c.end, c.seq.entries), (c.end, c.start, c.seq.entries[::-1])):
            if a == start and b == end and (want is None or want == entries):
                return t
    raise InvalidData(f"no principal chain between {start!r} and {end!r}")


def delta_invariants(g: FiberGraph) -> FiberReport:
    ext, folds, chains = _analyse(g)
    genus = _genus_or_none(g)
    types = _chain_types(g, ext, folds, chains, genus)
    out_chains = []
    for c, t in zip(chains, types):
        amph = c.end in folds
        report = None
        if chain_problem(c.seq.entries, amph) is None:
            report = chain_report(NegativeTwistChain(c.seq, amph))
        out_chains.append(FiberChain(c.start, c.end, c.seq, chain_H(c.seq), amph, report, t))
    out_tails = []
    for t in sorted(ext.tails, key=lambda t: (t.start, t.seq.entries)):
        valency = hj_valency(t.seq) if is_hj_tail(t.seq.entries) else None
        out_tails.append(FiberTail(t.start, t.seq, valency, t.start in folds))
    by_type: dict[int, Fraction] = {i: Fraction(0) for i in range(genus // 2 + 1)} if genus is not None else {}
    untyped = Fraction(0)
    for c in out_chains:
        if c.type is None:
            untyped += c.H
        else:
            by_type[c.type] = by_type.get(c.type, Fraction(0)) + c.H
    total = sum((c.H for c in out_chains), Fraction(0))
    return FiberReport(
        genus=genus,
        principal_ids=tuple(sorted(ext.principal)),
        chains=tuple(out_chains),
        tails=tuple(out_tails),
        delta_by_type=by_type,
        delta_untyped=untyped,
        delta_total=total,
    )


@dataclass(frozen=True)
class FamilyDelta:
    genus: int | None
    by_type: dict[int, Fraction]
    untyped: Fraction
    total: Fraction


def family_delta(fibers: Iterable[FiberReport]) -> FamilyDelta:
    fibers = list(fibers)
    genera = {f.genus for f in fibers}
    if len(genera) > 1:
        raise InvalidData(f"fibers of different genera: {sorted(genera, key=str)}")
    genus = genera.pop() if genera else None
    by_type: dict[int, Fraction] = {i: Fraction(0) for i in range(genus // 2 + 1)} if genus is not None else {}
    untyped = Fraction(0)
    total = Fraction(0)
    for f in fibers:
        for i, q in f.delta_by_type.items():
            by_type[i] = by_type.get(i, Fraction(0)) + q
        untyped += f.delta_untyped
        total += f.delta_total
    return FamilyDelta(genus, by_type, untyped, total)
