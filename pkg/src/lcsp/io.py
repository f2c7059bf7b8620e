"""Text format for core LCSP instances.

::

    vertices <n>
    source <v>
    target <v>
    scale <units per natural unit>        (optional, default 1)
    arc <id> <tail> <head> <weight>       (ids 0..m-1)
    p cnf <vars> <clauses>
    <signed 1-based literals> 0           (one clause per line)
    map <var> <arc-id>                    (unmapped variables are free)
    def <var> and|or <signed literals> 0  (optional free-variable definitions)
    h <vertex> <value>                    (optional heuristic values)

Lines starting with ``c`` are comments.
"""

from __future__ import annotations

from pathlib import Path as FsPath

from .dag import Dag
from .logic import CnfFormula, Definition
from .solver import LcspInstance


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        loc = f"{source}:" if source else ""
        super().__init__(f"{loc}{line}:{column}: {message}")
        self.line = line
        self.column = column


def _to_lit(tok: int) -> int:
    return tok - 1 if tok > 0 else ~(-tok - 1)


def _from_lit(lit: int) -> int:
    return lit + 1 if lit >= 0 else -((~lit) + 1)


def parse_lcsp(text: str, source: str = "") -> LcspInstance:
    n_vertices = s = t = None
    scale = 1
    arcs: dict[int, tuple[int, int, int]] = {}
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    maps: dict[int, int] = {}
    defs: dict[int, Definition] = {}
    heur: dict[int, float] = {}
    arc_line: dict[int, int] = {}

    def err(msg, lineno, col=1):
        return ParseError(msg, lineno, col, source)

    def ints(toks, lineno, first_col):
        out = []
        for i, tok in enumerate(toks):
            try:
                out.append(int(tok))
            except ValueError:
                raise err(f"expected integer, got {tok!r}", lineno, first_col + i) from None
        return out

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        kw = toks[0]
        if kw == "vertices":
            (n_vertices,) = ints(toks[1:2], lineno, 2) or [None]
        elif kw == "source":
            (s,) = ints(toks[1:2], lineno, 2)
        elif kw == "target":
            (t,) = ints(toks[1:2], lineno, 2)
        elif kw == "scale":
            (scale,) = ints(toks[1:2], lineno, 2)
        elif kw == "arc":
            if len(toks) != 5:
                raise err("arc line needs: arc <id> <tail> <head> <weight>", lineno)
            a, u, v, w = ints(toks[1:], lineno, 2)
            if a in arcs:
                raise err(f"duplicate arc id {a}", lineno, 2)
            arcs[a] = (u, v, w)
            arc_line[a] = lineno
        elif kw == "p":
            if len(toks) != 4 or toks[1] != "cnf":
                raise err("expected 'p cnf <vars> <clauses>'", lineno)
            header = tuple(ints(toks[2:], lineno, 3))
        elif kw == "map":
            if len(toks) != 3:
                raise err("map line needs: map <var> <arc-id>", lineno)
            x, a = ints(toks[1:], lineno, 2)
            if a not in arcs:
                raise err(f"map references unknown arc {a}", lineno, 3)
            if header is None or not 1 <= x <= header[0]:
                raise err(f"map references unknown variable {x}", lineno, 2)
            if x - 1 in maps:
                raise err(f"variable {x} mapped twice", lineno, 2)
            maps[x - 1] = a
        elif kw == "def":
            if len(toks) < 4 or toks[2] not in ("and", "or") or toks[-1] != "0":
                raise err("def line needs: def <var> and|or <lits> 0", lineno)
            x = ints(toks[1:2], lineno, 2)[0]
            lits = ints(toks[3:-1], lineno, 4)
            if header is None or not 1 <= x <= header[0] or any(not 1 <= abs(l) <= header[0] for l in lits):
                raise err("def references unknown variable", lineno, 2)
            defs[x - 1] = Definition(toks[2], tuple(_to_lit(l) for l in lits))
        elif kw == "h":
            if len(toks) != 3:
                raise err("h line needs: h <vertex> <value>", lineno)
            v = ints(toks[1:2], lineno, 2)[0]
            try:
                val = float(toks[2])
            except ValueError:
                raise err(f"bad heuristic value {toks[2]!r}", lineno, 3) from None
            heur[v] = int(val) if val.is_integer() else val
        elif kw.lstrip("-").isdigit():
            if header is None:
                raise err("clause before 'p cnf' header", lineno)
            for i, val in enumerate(ints(toks, lineno, 1)):
                if val == 0:
                    clauses.append(current)
                    current = []
                else:
                    if abs(val) > header[0]:
                        raise err(f"literal {val} exceeds variable count", lineno, i + 1)
                    current.append(_to_lit(val))
        else:
            raise err(f"unknown directive {kw!r}", lineno)
    if current:
        raise err("unterminated clause at end of input", lineno)
    if n_vertices is None or s is None or t is None:
        raise err("missing vertices/source/target", 0)
    if header is None:
        header = (len(maps), 0)
    if len(clauses) != header[1]:
        raise err(f"header announces {header[1]} clauses, found {len(clauses)}", 0)
    if sorted(arcs) != list(range(len(arcs))):
        raise err("arc ids must be 0..m-1", 0)
    for a, (u, v, w) in arcs.items():
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise err(f"arc {a} references a missing vertex", arc_line[a], 3)
    try:
        dag = Dag(n_vertices, [arcs[a] for a in range(len(arcs))], s, t,
                  {a: x for x, a in maps.items()}, weight_scale=scale)
    except ValueError as e:
        raise err(str(e), 0) from None
    formula = CnfFormula(header[0], clauses, graph_vars=maps)
    h = None
    if heur:
        h = [0] * n_vertices
        for v, val in heur.items():
            h[v] = val
    return LcspInstance(dag, formula, defs, h)


def write_lcsp(inst: LcspInstance) -> str:
    dag, formula = inst.dag, inst.formula
    out = [f"vertices {dag.num_vertices}", f"source {dag.source}", f"target {dag.target}"]
    if dag.weight_scale != 1:
        out.append(f"scale {dag.weight_scale}")
    for a in range(dag.num_arcs):
        out.append(f"arc {a} {dag.tails[a]} {dag.heads[a]} {dag.weights[a]}")
    out.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    for clause in formula.clauses:
        out.append(" ".join([str(_from_lit(l)) for l in clause] + ["0"]))
    for x in sorted(dag.var_arc):
        out.append(f"map {x + 1} {dag.var_arc[x]}")
    for x, d in inst.definitions.items():
        out.append(" ".join([f"def {x + 1} {d.op}"] + [str(_from_lit(l)) for l in d.literals] + ["0"]))
    if inst.heuristic is not None:
        for v, val in enumerate(inst.heuristic):
            if val:
                out.append(f"h {v} {val}")
    return "\n".join(out) + "\n"


def load(path) -> LcspInstance:
    p = FsPath(path)
    inst = parse_lcsp(p.read_text(), str(p))
    inst.name = inst.name or p.stem
    return inst


def save(inst: LcspInstance, path) -> None:
    FsPath(path).write_text(write_lcsp(inst))
