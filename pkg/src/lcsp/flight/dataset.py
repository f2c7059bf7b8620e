"""Flight dataset files.

A dataset directory holds::

    waypoints.csv   id,lat,lon
    segments.csv    tail,head
    levels.csv      level,alt_m          (the highest level is the optimal one)
    tfrs.txt        one restriction per line
    od_pairs.csv    origin,destination

A TFR line reads ``<id>: <clause> | <clause> ...`` where a clause is a
whitespace-separated conjunction of literals ``kind:id[:lmin-lmax][:neg]``.
Segment ids are written ``TAIL>HEAD``.  ``#`` starts a comment line.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from ..io import ParseError
from .compiler import KINDS, Tfr, TfrLiteral
from .model import LevelTable
from .network import ProjectedNetwork, Waypoint

FILES = ("waypoints.csv", "segments.csv", "levels.csv", "tfrs.txt", "od_pairs.csv")
_RESERVED = set(" \t:|>#,")


def parse_literal(text: str, line: int = 0, column: int = 0, source: str = "") -> TfrLiteral:
    parts = text.split(":")
    if len(parts) < 2 or parts[0] not in KINDS:
        raise ParseError(f"bad literal {text!r}", line, column, source)
    kind, ident = parts[0], parts[1]
    negated = False
    lo = hi = None
    rest = parts[2:]
    if rest and rest[-1] == "neg":
        negated = True
        rest = rest[:-1]
    if len(rest) > 1:
        raise ParseError(f"bad literal {text!r}", line, column, source)
    if rest:
        try:
            a, b = rest[0].split("-")
            lo, hi = int(a), int(b)
        except ValueError:
            raise ParseError(f"bad level interval in {text!r}", line, column, source) from None
        if lo > hi:
            raise ParseError(f"empty level interval in {text!r}", line, column, source)
    if kind == "segment":
        ends = ident.split(">")
        if len(ends) != 2 or not all(ends):
            raise ParseError(f"segment id must be TAIL>HEAD in {text!r}", line, column, source)
        element = (ends[0], ends[1])
    else:
        if not ident:
            raise ParseError(f"empty element id in {text!r}", line, column, source)
        element = ident
    return TfrLiteral(kind, element, lo, hi, negated)


def format_literal(lit: TfrLiteral) -> str:
    ident = ">".join(lit.element) if lit.kind == "segment" else lit.element
    out = f"{lit.kind}:{ident}"
    if lit.level_min is not None or lit.level_max is not None:
        out += f":{lit.level_min}-{lit.level_max}"
    if lit.negated:
        out += ":neg"
    return out


def parse_tfrs(text: str, source: str = "") -> list[Tfr]:
    tfrs = []
    ids = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition(":")
        if not sep or not head.strip():
            raise ParseError("expected '<id>: <clauses>'", lineno, 1, source)
        tid = head.strip()
        if tid in ids:
            raise ParseError(f"duplicate TFR id {tid!r}", lineno, 1, source)
        ids.add(tid)
        clauses = []
        col = len(head) + 2
        for chunk in body.split("|"):
            toks = chunk.split()
            if not toks:
                raise ParseError("empty clause", lineno, col, source)
            clauses.append([parse_literal(t, lineno, col, source) for t in toks])
            col += len(chunk) + 1
        tfrs.append(Tfr(tid, clauses))
    return tfrs


def format_tfrs(tfrs) -> str:
    lines = []
    for t in tfrs:
        body = " | ".join(" ".join(format_literal(l) for l in c) for c in t.clauses)
        lines.append(f"{t.id}: {body}")
    return "".join(line + "\n" for line in lines)


def _rows(text: str, header: tuple[str, ...], source: str):
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise ParseError("empty file", 1, 1, source) from None
    if tuple(c.strip() for c in first) != header:
        raise ParseError(f"expected header {','.join(header)}", 1, 1, source)
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns", lineno, 1, source)
        yield lineno, [c.strip() for c in row]


def _check_id(wp: str, lineno: int, source: str) -> str:
    if not wp or _RESERVED & set(wp):
        raise ParseError(f"invalid waypoint id {wp!r}", lineno, 1, source)
    return wp


@dataclass
class FlightDataset:
    network: ProjectedNetwork
    levels: LevelTable
    tfrs: list[Tfr] = field(default_factory=list)
    od_pairs: list[tuple[str, str]] = field(default_factory=list)

    def validate(self) -> None:
        for tfr in self.tfrs:
            for clause in tfr.clauses:
                for lit in clause:
                    lit.validate(self.levels)
                    for wp in lit.waypoints():
                        if wp not in self.network:
                            raise ValueError(f"TFR {tfr.id} references unknown waypoint {wp!r}")
        for o, d in self.od_pairs:
            for wp in (o, d):
                if wp not in self.network:
                    raise ValueError(f"OD pair references unknown waypoint {wp!r}")

    @classmethod
    def parse(cls, texts: dict[str, str], source: str = "") -> "FlightDataset":
        def src(name):
            return f"{source}/{name}" if source else name

        wps = []
        for lineno, (wid, lat, lon) in _rows(texts["waypoints.csv"], ("id", "lat", "lon"), src("waypoints.csv")):
            try:
                wps.append(Waypoint(_check_id(wid, lineno, src("waypoints.csv")), float(lat), float(lon)))
            except ValueError as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError("bad coordinate", lineno, 2, src("waypoints.csv")) from None
        segs = [(u, v) for _, (u, v) in _rows(texts["segments.csv"], ("tail", "head"), src("segments.csv"))]
        alts = []
        for lineno, (lvl, alt) in _rows(texts["levels.csv"], ("level", "alt_m"), src("levels.csv")):
            try:
                if int(lvl) != len(alts) + 1:
                    raise ParseError("levels must be numbered 1..L in order", lineno, 1, src("levels.csv"))
                alts.append(float(alt))
            except ValueError as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError("bad level row", lineno, 1, src("levels.csv")) from None
        od = [(o, d) for _, (o, d) in _rows(texts.get("od_pairs.csv", "origin,destination\n"),
                                            ("origin", "destination"), src("od_pairs.csv"))]
        try:
            network = ProjectedNetwork(wps, segs)
            levels = LevelTable(alts)
            ds = cls(network, levels, parse_tfrs(texts.get("tfrs.txt", ""), src("tfrs.txt")), od)
            ds.validate()
        except ParseError:
            raise
        except ValueError as e:
            raise ParseError(str(e), 0, 0, source) from None
        return ds

    def format(self) -> dict[str, str]:
        def table(header, rows):
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            return buf.getvalue()

        return {
            "waypoints.csv": table(("id", "lat", "lon"),
                                   [(w.id, repr(w.lat), repr(w.lon)) for w in self.network.waypoints]),
            "segments.csv": table(("tail", "head"), self.network.segments),
            "levels.csv": table(("level", "alt_m"),
                                [(i, repr(a)) for i, a in enumerate(self.levels.altitudes, 1)]),
            "tfrs.txt": format_tfrs(self.tfrs),
            "od_pairs.csv": table(("origin", "destination"), self.od_pairs),
        }

    @classmethod
    def load(cls, directory) -> "FlightDataset":
        d = FsPath(directory)
        texts = {}
        for name in FILES:
            p = d / name
            if p.exists():
                texts[name] = p.read_text()
            elif name in FILES[:3]:
                raise FileNotFoundError(p)
        return cls.parse(texts, str(d))

    def save(self, directory) -> None:
        d = FsPath(directory)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in self.format().items():
            (d / name).write_text(text)


def synthetic_dataset(seed: int = 0, rows: int = 5, cols: int = 8, n_levels: int = 6,
                      n_tfrs: int = 12, spacing_deg: float = 1.0,
                      origin: tuple[float, float] = (47.0, 2.0)) -> FlightDataset:
    """A jittered grid network with random vertex/segment TFRs, for demos
    and tests.  The OD pair joins the middle of the west and east borders."""
    rng = random.Random(seed)
    wps = []
    names = {}
    for r in range(rows):
        for c in range(cols):
            wid = f"W{r}{c:02d}"
            names[r, c] = wid
            lat = origin[0] + r * spacing_deg + rng.uniform(-0.2, 0.2) * spacing_deg
            lon = origin[1] + c * spacing_deg + rng.uniform(-0.2, 0.2) * spacing_deg
            wps.append(Waypoint(wid, round(lat, 4), round(lon, 4)))
    segs = []
    for r in range(rows):
        for c in range(cols):
            for dr, dc in ((0, 1), (1, 0), (1, 1), (-1, 1)):
                rr, cc = r + dr, c + dc
                if (rr, cc) in names:
                    segs.append((names[r, c], names[rr, cc]))
                    segs.append((names[rr, cc], names[r, c]))
    levels = LevelTable.linear(n_levels, 1100.0, 11300.0)
    mid = rows // 2
    s, t = names[mid, 0], names[mid, cols - 1]
    tfrs = []
    for i in range(n_tfrs):
        clauses = []
        # mostly "not both" style rules: a disjunction of negated elements
        for _ in range(rng.randint(2, 3)):
            clause = []
            for _ in range(1 if rng.random() < 0.7 else 2):
                if rng.random() < 0.5:
                    # rules cluster around the direct route, where they bite
                    r = min(rows - 1, max(0, mid + rng.choice((-1, 0, 0, 1))))
                    wp = names[r, rng.randrange(1, cols - 1)]
                    lo = rng.randint(1, n_levels)
                    hi = rng.randint(lo, n_levels)
                    lit = TfrLiteral("vertex", wp, lo, hi, rng.random() < 0.85)
                else:
                    c = rng.randrange(cols - 1)
                    u, v = names[mid, c], names[min(rows - 1, max(0, mid + rng.choice((-1, 0, 1)))), c + 1]
                    lit = TfrLiteral("segment", (u, v), None, None, rng.random() < 0.85)
                clause.append(lit)
            clauses.append(clause)
        tfrs.append(Tfr(f"R{i}", clauses))
    return FlightDataset(ProjectedNetwork(wps, segs), levels, tfrs, [(s, t)])
