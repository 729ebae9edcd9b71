"""Command-line surface: text formats, report documents, and subcommands.

Files are diff-friendly plain text, 1-based: a square is a line "n" followed
by n rows of n integers; a partition looks the same but holds region labels;
a system file is square blocks separated by blank lines with an optional
trailing block opened by a "PARTITION" line (and, for witnesses, a
"TRANSVERSAL" block of cell coordinates).  Inline generator specs avoid
file plumbing: cayley:3, cayley:2x2, kron:(A,B), power:(A,2), rows:3,
boxes:4, classes:(A).

Exit codes: 0 ok, 1 validation failure, 2 I/O or parse error, 3 search
limit exceeded, 4 invalid parameters, 5 certified inequality violated.

Structured reports are deterministic: exact counts are decimal strings,
every value carries a unit and the operation that produced it, and nothing
schedule- or time-dependent (thread counts, timings) is included.  Tables
are for people and may show timings.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import bounds as bounds_mod
from . import construct as construct_mod
from .arrays import cell_profile, system_to_noa
from .core import (
    LatinSquare,
    MolsSystem,
    RegionPartition,
    Square,
    Transversal,
    is_transversal,
    partition_boxes,
    partition_from_square,
    partition_rows,
    validate_latin,
    validate_mols,
)
from .errors import (
    FormatError,
    InvalidParams,
    LimitExceeded,
    MolscopeError,
    NotFoundWithinLimit,
    ViolationAt,
)
from .search import (
    Exact,
    ExtensionCount,
    SearchOptions,
    count_extensions,
    count_latin_direct,
    count_mates,
    count_mols,
    count_mols_direct,
    count_sudoku_direct,
    count_transversal_partitions,
    enumerate_transversals,
    extension_census,
    max_extensions,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_LIMIT = 3
EXIT_PARAMS = 4
EXIT_VIOLATION = 5


# --------------------------------------------------------------------------
# text formats (1-based externally)


def format_square(grid: Sequence[Sequence[int]]) -> str:
    n = len(grid)
    lines = [str(n)]
    for row in grid:
        lines.append(" ".join(str(x + 1) for x in row))
    return "\n".join(lines) + "\n"


def format_partition_block(p: RegionPartition) -> str:
    n = p.order
    lines = ["PARTITION"]
    for i in range(n):
        lines.append(" ".join(str(p.labels[i * n + j] + 1) for j in range(n)))
    return "\n".join(lines) + "\n"


def format_transversal_block(cells: Sequence[tuple[int, int]]) -> str:
    lines = ["TRANSVERSAL"]
    for i, j in sorted(cells):
        lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def format_document(
    squares: Sequence[Sequence[Sequence[int]]],
    partition: Optional[RegionPartition] = None,
    transversal: Optional[Sequence[tuple[int, int]]] = None,
) -> str:
    parts = [format_square(g) for g in squares]
    if partition is not None:
        parts.append(format_partition_block(partition))
    if transversal is not None:
        parts.append(format_transversal_block(transversal))
    return "\n".join(parts)


@dataclass
class ParsedDocument:
    squares: list[Square]
    partition: Optional[RegionPartition]
    transversal: Optional[list[tuple[int, int]]]


def _parse_int_row(line: str, lineno: int) -> list[int]:
    out = []
    for tok in line.split():
        try:
            out.append(int(tok))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {tok!r} is not an integer") from exc
    return out


def parse_document(text: str) -> ParsedDocument:
    """Parse a square/system document (see module docstring for the grammar)."""
    lines = text.splitlines()
    blocks: list[list[tuple[int, str]]] = []
    cur: list[tuple[int, str]] = []
    for no, raw in enumerate(lines, 1):
        if raw.strip():
            cur.append((no, raw.strip()))
        elif cur:
            blocks.append(cur)
            cur = []
    if cur:
        blocks.append(cur)
    if not blocks:
        raise FormatError("empty document")

    squares: list[Square] = []
    partition: Optional[RegionPartition] = None
    transversal: Optional[list[tuple[int, int]]] = None
    for block in blocks:
        no0, head = block[0]
        if head == "PARTITION":
            if partition is not None:
                raise FormatError(f"line {no0}: second PARTITION block")
            rows = [_parse_int_row(s, no) for no, s in block[1:]]
            n = len(rows)
            if n == 0 or any(len(r) != n for r in rows):
                raise FormatError(f"line {no0}: PARTITION block must be square")
            labels = [x - 1 for row in rows for x in row]
            if any(not 0 <= x < n for x in labels):
                raise FormatError(f"line {no0}: region labels must be 1..{n}")
            try:
                partition = RegionPartition(n, labels)
            except MolscopeError as exc:
                raise FormatError(f"line {no0}: {exc}") from exc
        elif head == "TRANSVERSAL":
            if transversal is not None:
                raise FormatError(f"line {no0}: second TRANSVERSAL block")
            transversal = []
            for no, s in block[1:]:
                row = _parse_int_row(s, no)
                if len(row) != 2:
                    raise FormatError(f"line {no}: expected 'row col'")
                transversal.append((row[0] - 1, row[1] - 1))
        else:
            head_row = _parse_int_row(head, no0)
            if len(head_row) != 1:
                raise FormatError(
                    f"line {no0}: a square block starts with its order on a line"
                )
            n = head_row[0]
            body = block[1:]
            if len(body) != n:
                raise FormatError(
                    f"line {no0}: expected {n} rows after the order line, got {len(body)}"
                )
            rows = []
            for no, s in body:
                row = _parse_int_row(s, no)
                if len(row) != n:
                    raise FormatError(f"line {no}: expected {n} entries")
                if any(not 1 <= x <= n for x in row):
                    raise FormatError(f"line {no}: symbols must be 1..{n}")
                rows.append([x - 1 for x in row])
            squares.append(Square(rows))
    return ParsedDocument(squares, partition, transversal)


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _split_top_level(s: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise FormatError(f"unbalanced parentheses in {s!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise FormatError(f"unbalanced parentheses in {s!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _spec_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise FormatError(f"{what}: {text!r} is not an integer") from exc


def resolve_square_spec(spec: str) -> LatinSquare:
    """A square from an inline generator spec or from a file path."""
    spec = spec.strip()
    if spec.startswith("cayley:"):
        dims = [_spec_int(d, "cayley spec") for d in spec[7:].split("x")]
        return construct_mod.cayley_table(construct_mod.GroupSpec(dims))
    if spec.startswith("kron:(") and spec.endswith(")"):
        args = _split_top_level(spec[6:-1])
        if len(args) != 2:
            raise FormatError("kron:(A,B) takes exactly two arguments")
        return construct_mod.kronecker(
            resolve_square_spec(args[0]), resolve_square_spec(args[1])
        )
    if spec.startswith("power:(") and spec.endswith(")"):
        args = _split_top_level(spec[7:-1])
        if len(args) != 2:
            raise FormatError("power:(A,k) takes exactly two arguments")
        return construct_mod.power(
            resolve_square_spec(args[0]), _spec_int(args[1], "power spec")
        )
    doc = parse_document(_read_file(spec))
    if len(doc.squares) != 1:
        raise FormatError(f"{spec}: expected exactly one square")
    return validate_latin(doc.squares[0])


def resolve_partition_spec(spec: str) -> RegionPartition:
    """A partition from rows:n, boxes:n, classes:(SPEC), or a file path."""
    spec = spec.strip()
    if spec.startswith("rows:"):
        return partition_rows(_spec_int(spec[5:], "rows spec"))
    if spec.startswith("boxes:"):
        return partition_boxes(_spec_int(spec[6:], "boxes spec"))
    if spec.startswith("classes:(") and spec.endswith(")"):
        inner = resolve_square_spec(spec[9:-1])
        return partition_from_square(inner.square)
    doc = parse_document(_read_file(spec))
    if doc.partition is not None and not doc.squares:
        return doc.partition
    if len(doc.squares) == 1 and doc.partition is None:
        # a bare square-shaped grid of labels
        return RegionPartition(
            doc.squares[0].order, [x for row in doc.squares[0].grid for x in row]
        )
    raise FormatError(f"{spec}: expected a partition document")


# --------------------------------------------------------------------------
# report documents


@dataclass
class ReportField:
    name: str
    value: object
    unit: Optional[str] = None  # "exact count" | "nats" | None
    provenance: Optional[str] = None  # operation id
    exact: Optional[bool] = None  # for counts: full count vs "at least"
    asymptotic_only: Optional[bool] = None
    note: Optional[str] = None


@dataclass
class ReportDocument:
    command: str
    params: dict
    fields: list[ReportField] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name, value, **kw) -> None:
        self.fields.append(ReportField(name, value, **kw))

    def to_structured(self) -> str:
        def render_value(v):
            if isinstance(v, bool):
                return v
            if isinstance(v, int):
                return str(v)  # decimal string: arbitrary precision survives
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)  # keep the JSON strictly valid
            return v

        results = []
        for f in self.fields:
            item: dict = {"name": f.name, "value": render_value(f.value)}
            if f.unit is not None:
                item["unit"] = f.unit
            if f.provenance is not None:
                item["provenance"] = f.provenance
            if f.exact is not None:
                item["exact"] = f.exact
            if f.asymptotic_only:
                item["asymptotic_only"] = True
            if f.note is not None:
                item["note"] = f.note
            results.append(item)
        doc = {
            "command": self.command,
            "params": {k: render_value(v) for k, v in self.params.items()},
            "results": results,
        }
        if self.notes:
            doc["notes"] = list(self.notes)
        return json.dumps(doc, indent=2) + "\n"

    def to_table(self, elapsed: Optional[float] = None) -> str:
        lines = [f"== {self.command} =="]
        if self.params:
            lines.append(
                "   " + "  ".join(f"{k}={v}" for k, v in self.params.items())
            )
        width = max((len(f.name) for f in self.fields), default=0)
        for f in self.fields:
            val = f.value
            unit = f" {f.unit}" if f.unit else ""
            prov = f"  [{f.provenance}]" if f.provenance else ""
            extra = ""
            if f.exact is False:
                extra += "  (at least: search stopped at threshold)"
            if f.asymptotic_only:
                extra += "  (asymptotic reference, not a valid finite-n bound)"
            if f.note:
                extra += f"  ({f.note})"
            lines.append(f"  {f.name.ljust(width)}  {val}{unit}{prov}{extra}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        if elapsed is not None:
            lines.append(f"  elapsed: {elapsed:.3f} s")
        return "\n".join(lines) + "\n"


def _emit(doc: ReportDocument, args, started: float) -> None:
    if args.format == "structured":
        sys.stdout.write(doc.to_structured())
    else:
        sys.stdout.write(doc.to_table(elapsed=time.monotonic() - started))


def _count_field(
    doc: ReportDocument, name: str, res: ExtensionCount, provenance: str
) -> None:
    assert isinstance(res.value, Exact)
    doc.add(
        name,
        res.value.count,
        unit="exact count",
        provenance=provenance,
        exact=res.exact_flag,
    )


# --------------------------------------------------------------------------
# witness emission


def _write_witnesses(args, docs: list[str]) -> int:
    outdir = args.emit_witnesses
    os.makedirs(outdir, exist_ok=True)
    for idx, text in enumerate(docs, 1):
        path = os.path.join(outdir, f"witness-{idx:06d}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return len(docs)


def _witness_cap(args) -> Optional[int]:
    if args.cap is not None:
        return args.cap
    if getattr(args, "emit_witnesses", None):
        return 1000  # default emission cap; override with --cap
    return None


def _search_options(args, cap: Optional[int]) -> SearchOptions:
    threads = args.threads if args.threads else (os.cpu_count() or 1)
    return SearchOptions(
        cap=cap,
        stop_threshold=args.threshold,
        parallel=threads > 1,
        threads=threads,
    )


# --------------------------------------------------------------------------
# subcommand: verify


def cmd_verify(args) -> int:
    code = EXIT_OK
    for path in args.paths:
        try:
            doc = parse_document(_read_file(path))
            latins = [validate_latin(s) for s in doc.squares]
            if latins:
                validate_mols(latins, doc.partition)
            if doc.transversal is not None:
                if not latins:
                    raise FormatError("TRANSVERSAL block without a square")
                if not is_transversal(latins[0], doc.transversal):
                    raise InvalidParams(
                        "cells do not hit every row, column, and symbol "
                        "exactly once"
                    )
            print(f"{path}: ok")
        except FormatError as exc:
            print(f"{path}: parse error: {exc}", file=sys.stderr)
            code = max(code, EXIT_IO)
        except MolscopeError as exc:
            print(f"{path}: invalid: {exc}", file=sys.stderr)
            code = max(code, EXIT_INVALID)
    return code


# --------------------------------------------------------------------------
# subcommand: count


def _system_from_args(args) -> MolsSystem:
    if getattr(args, "system", None):
        doc = parse_document(_read_file(args.system))
        latins = [validate_latin(s) for s in doc.squares]
        partition = doc.partition
        if partition is None:
            partition = partition_rows(latins[0].order if latins else 1)
        return validate_mols(latins, partition)
    squares = [resolve_square_spec(s) for s in args.square or []]
    if not squares and not getattr(args, "partition", None):
        raise InvalidParams("need --system, --square, or --partition")
    if getattr(args, "partition", None):
        partition = resolve_partition_spec(args.partition)
    else:
        partition = partition_rows(squares[0].order)
    order = squares[0].order if squares else partition.order
    return validate_mols(squares, partition, order=order)


def _single_square_arg(args) -> str:
    if not args.square or len(args.square) != 1:
        raise InvalidParams("this operation takes exactly one --square")
    return args.square[0]


def cmd_count(args) -> int:
    started = time.monotonic()
    kind = args.kind
    cap = _witness_cap(args)
    opts = _search_options(args, cap)
    witness_docs: list[str] = []

    if kind == "transversals":
        spec = _single_square_arg(args)
        square = resolve_square_spec(spec)
        doc = ReportDocument("count transversals", {"square": spec})
        res = enumerate_transversals(square, opts)
        _count_field(doc, "transversals", res, "row-backtracking")
        if args.emit_witnesses and res.witnesses:
            witness_docs = [
                format_document([square.grid], transversal=w) for w in res.witnesses
            ]
    elif kind == "partitions":
        spec = _single_square_arg(args)
        square = resolve_square_spec(spec)
        doc = ReportDocument("count partitions", {"square": spec})
        res = count_transversal_partitions(square, opts)
        _count_field(doc, "transversal_partitions", res, "exact-cover")
        if res.exact_flag:
            mates = res.value.count * math.factorial(square.order)
            doc.add(
                "mates_implied",
                mates,
                unit="exact count",
                provenance="partitions-times-factorial",
                exact=True,
            )
        if args.emit_witnesses and res.witnesses:
            for partition_cells in res.witnesses:
                labels = [0] * (square.order**2)
                for t, part in enumerate(partition_cells):
                    for i, j in part:
                        labels[i * square.order + j] = t
                witness_docs.append(
                    format_document(
                        [square.grid],
                        partition=RegionPartition(square.order, labels),
                    )
                )
    elif kind == "mates":
        spec = _single_square_arg(args)
        square = resolve_square_spec(spec)
        doc = ReportDocument("count mates", {"square": spec})
        res = count_mates(square, opts)
        _count_field(doc, "mates", res, "extension-engine")
        if args.emit_witnesses and res.witnesses:
            n = square.order
            for col in res.witnesses:
                mate = [list(col[i * n : (i + 1) * n]) for i in range(n)]
                witness_docs.append(format_document([square.grid, mate]))
    elif kind == "extensions":
        system = _system_from_args(args)
        noa = system_to_noa(system)
        params = {}
        if getattr(args, "system", None):
            params["system"] = args.system
        if getattr(args, "square", None):
            params["squares"] = list(args.square)
        if getattr(args, "partition", None):
            params["partition"] = args.partition
        doc = ReportDocument("count extensions", params)
        res = count_extensions(noa, opts)
        _count_field(doc, "extensions", res, "extension-engine")
        if args.emit_witnesses and res.witnesses:
            n = system.order
            for col in res.witnesses:
                grids = [s.grid for s in system.squares]
                grids.append([list(col[i * n : (i + 1) * n]) for i in range(n)])
                witness_docs.append(
                    format_document(grids, partition=system.partition)
                )
    elif kind == "mols":
        if args.n is None:
            raise InvalidParams("count mols needs --n")
        doc = ReportDocument("count mols", {"n": args.n, "k": args.k})
        res = count_mols(args.n, args.k, opts)
        _count_field(doc, "count", res, "chained-extension-engine")
        if res.exact_flag and (args.k <= 1 or (args.k == 2 and args.n <= 4)):
            direct = count_mols_direct(args.n, args.k)
            doc.add(
                "direct_count",
                direct,
                unit="exact count",
                provenance="direct-backtracking",
                exact=True,
            )
            doc.add(
                "engines_agree",
                direct == res.value.count,
                provenance="cross-check",
            )
            if direct != res.value.count:
                _emit(doc, args, started)
                return EXIT_VIOLATION
    elif kind == "sudoku":
        if args.n is None:
            raise InvalidParams("count sudoku needs --n")
        doc = ReportDocument("count sudoku", {"n": args.n})
        base = validate_mols([], partition_boxes(args.n))
        res = count_extensions(system_to_noa(base), opts)
        _count_field(doc, "sudoku_squares", res, "extension-engine")
        if res.exact_flag:
            direct = count_sudoku_direct(args.n)
            doc.add(
                "direct_count",
                direct,
                unit="exact count",
                provenance="direct-backtracking",
                exact=True,
            )
            doc.add(
                "engines_agree",
                direct == res.value.count,
                provenance="cross-check",
            )
            if direct != res.value.count:
                _emit(doc, args, started)
                return EXIT_VIOLATION
        if args.emit_witnesses and res.witnesses:
            n = args.n
            for col in res.witnesses:
                grid = [list(col[i * n : (i + 1) * n]) for i in range(n)]
                witness_docs.append(
                    format_document([grid], partition=partition_boxes(n))
                )
    else:
        raise InvalidParams(f"unknown count kind {kind!r}")

    if args.emit_witnesses and witness_docs:
        written = _write_witnesses(args, witness_docs)
        doc.notes.append(f"wrote {written} witness files")
    _emit(doc, args, started)
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: bound


def _add_report_entries(doc: ReportDocument, report) -> None:
    for e in report.entries:
        doc.add(
            e.name,
            e.value,
            unit="nats",
            provenance=e.source,
            asymptotic_only=e.asymptotic_only or None,
        )
    doc.add(
        "quadrature_error",
        report.quadrature_error,
        unit="nats",
        provenance="quadrature",
    )


def cmd_bound(args) -> int:
    started = time.monotonic()
    kind = args.kind
    tol = args.tol if args.tol is not None else bounds_mod.DEFAULT_TOL
    n = int(args.n) if float(args.n).is_integer() else args.n
    if kind == "extension":
        doc = ReportDocument("bound extension", {"n": n, "k": args.k})
        val = bounds_mod.extension_bound_mols(int(n), args.k)
        doc.add("extension_bound", val, unit="nats", provenance="per-cell-integral")
    elif kind == "mols-count":
        doc = ReportDocument("bound mols-count", {"n": n, "k": args.k})
        report = bounds_mod.mols_count_bound(n, args.k, tol)
        _add_report_entries(doc, report)
    elif kind == "sudoku":
        doc = ReportDocument("bound sudoku", {"n": n, "k": args.k})
        report = bounds_mod.sudoku_extension_bound(int(n), args.k, tol)
        _add_report_entries(doc, report)
    elif kind == "reference":
        doc = ReportDocument("bound reference", {"n": n, "k": args.k})
        report = bounds_mod.reference_asymptotics(n, args.k)
        _add_report_entries(doc, report)
    else:
        raise InvalidParams(f"unknown bound kind {kind!r}")
    _emit(doc, args, started)
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommand: certify


def cmd_certify(args) -> int:
    started = time.monotonic()
    target = args.target
    tol = args.tol if args.tol is not None else 1e-6
    ok_all = True

    if target == "extension":
        if args.n is None:
            raise InvalidParams("certify extension needs --n")
        n = args.n
        ks = list(range(0, max(n - 1, 1))) if args.all_k else [args.k or 0]
        doc = ReportDocument(
            "certify extension", {"n": n, "k": "all" if args.all_k else ks[0]}
        )
        for k in ks:
            if k > n - 2:
                continue
            systems = count_mols(n, k).value.count
            res, _witness = max_extensions(n, k)
            bound = bounds_mod.extension_bound_mols(n, k)
            mx = res.value.count
            ok = (math.log(mx) if mx else float("-inf")) <= bound + tol
            ok_all &= ok
            doc.add(f"systems_k{k}", systems, unit="exact count",
                    provenance="chained-extension-engine", exact=True)
            doc.add(f"max_extensions_k{k}", mx, unit="exact count",
                    provenance="extension-engine", exact=True)
            doc.add(f"bound_k{k}", bound, unit="nats",
                    provenance="per-cell-integral")
            doc.add(f"dominates_k{k}", ok, provenance="comparison")
    elif target == "gerechte":
        if args.n is None:
            raise InvalidParams("certify gerechte needs --n")
        n = args.n
        doc = ReportDocument("certify gerechte", {"n": n})
        kmax = max(n - 2, 0)
        suites: list[tuple[str, list[RegionPartition]]] = []
        if args.partition:
            suites.append((args.partition, [resolve_partition_spec(args.partition)]))
        else:
            m = math.isqrt(n)
            if m * m == n and n >= 4:
                suites.append(("boxes", [partition_boxes(n)]))
            from .search import iter_latin_direct

            classes = [
                partition_from_square(Square(g)) for g in iter_latin_direct(n)
            ]
            suites.append(("symbol-classes", classes))
        for label, partitions in suites:
            per_k_max = [0] * (kmax + 1)
            per_k_systems = [0] * (kmax + 1)
            profile = cell_profile(
                system_to_noa(validate_mols([], partitions[0]))
            )
            for p in partitions:
                prof = cell_profile(system_to_noa(validate_mols([], p)))
                if (prof.r, prof.c) != (profile.r, profile.c):
                    raise InvalidParams(
                        "partitions in one suite must share a profile"
                    )
                census = extension_census(p, kmax)
                for k, hist in enumerate(census):
                    for cnt, mult in hist.items():
                        per_k_systems[k] += mult
                        per_k_max[k] = max(per_k_max[k], cnt)
            for k in range(kmax + 1):
                bound = bounds_mod.extension_bound_general(profile, k + 3)
                mx = per_k_max[k]
                ok = (math.log(mx) if mx else float("-inf")) <= bound + tol
                ok_all &= ok
                doc.add(f"{label}_systems_k{k}", per_k_systems[k],
                        unit="exact count", provenance="extension-engine",
                        exact=True)
                doc.add(f"{label}_max_extensions_k{k}", mx, unit="exact count",
                        provenance="extension-engine", exact=True)
                doc.add(f"{label}_bound_k{k}", bound, unit="nats",
                        provenance="general-profile-bound")
                doc.add(f"{label}_dominates_k{k}", ok, provenance="comparison")
    elif target == "product":
        if not args.base:
            raise InvalidParams("certify product needs --base")
        base = resolve_square_spec(args.base)
        doc = ReportDocument("certify product", {"base": args.base})
        n1 = base.order
        q = count_mates(base).value.count
        logq = math.log(q) if q else float("-inf")
        product = construct_mod.kronecker(base, base)
        n = product.order
        bound_exact = construct_mod.product_mate_bound_exact(n1, n1, q, q)
        fact = math.factorial(n)
        threshold = args.threshold or max(1, -(-bound_exact // fact))  # ceil
        opts = _search_options(args, None)
        opts = SearchOptions(
            cap=None, stop_threshold=threshold,
            parallel=opts.parallel, threads=opts.threads,
        )
        res = count_transversal_partitions(product, opts)
        found = res.value.count
        mates_certified = found * fact
        certified = mates_certified >= bound_exact
        ok_all &= certified
        doc.add("base_mates", q, unit="exact count",
                provenance="extension-engine", exact=True)
        doc.add("product_order", n, provenance="block-product")
        doc.add("bound_exact", bound_exact, unit="exact count",
                provenance="product-bound")
        doc.add("bound_nats",
                construct_mod.product_mate_bound(n1, n1, logq, logq),
                unit="nats", provenance="product-bound")
        doc.add("partitions_threshold", threshold, unit="exact count",
                provenance="product-bound")
        _count_field(doc, "partitions_found", res, "exact-cover")
        doc.add("mates_certified", mates_certified, unit="exact count",
                provenance="partitions-times-factorial",
                exact=res.exact_flag)
        doc.add("certified", certified, provenance="comparison")
    elif target == "power":
        if args.m is None or args.q is None or args.k is None:
            raise InvalidParams("certify power needs --m, --q, and --k")
        doc = ReportDocument(
            "certify power", {"m": args.m, "q": args.q, "k": args.k}
        )
        logq = math.log(args.q) if args.q else float("-inf")
        ctol = args.tol if args.tol is not None else 1e-9
        for kk in range(1, args.k + 1):
            lhs = construct_mod.product_mate_bound(
                args.m**kk, args.m,
                construct_mod.power_mate_bound(args.m, logq, kk), logq,
            )
            rhs = construct_mod.power_mate_bound(args.m, logq, kk + 1)
            ok = lhs >= rhs - ctol or (lhs == rhs == float("-inf"))
            ok_all &= ok
            doc.add(f"step_bound_k{kk}", lhs, unit="nats",
                    provenance="product-bound")
            doc.add(f"power_bound_k{kk + 1}", rhs, unit="nats",
                    provenance="power-bound")
            doc.add(f"recursion_holds_k{kk}", ok, provenance="comparison")
    elif target == "constant":
        if args.constant is None:
            raise InvalidParams("certify constant needs --constant")
        doc = ReportDocument(
            "certify constant",
            {"constant": args.constant, "limit": args.limit, "power": args.power},
        )
        cert = construct_mod.construct_for_constant(
            args.constant, args.limit, args.power
        )
        need = cert.order**2 * math.log(args.constant)
        certified = cert.log_lower_bound >= need - 1e-9
        ok_all &= certified
        doc.add("base_order", cert.base.order, provenance="exhaustive-search")
        doc.add("base_mates", cert.base_mates, unit="exact count",
                provenance="exact-cover", exact=True)
        doc.add("construction", cert.description, provenance=cert.derivation)
        doc.add("certified_log_mates", cert.log_lower_bound, unit="nats",
                provenance=cert.derivation)
        doc.add("required_log_mates", need, unit="nats",
                provenance="target-constant")
        doc.add("certified", certified, provenance="comparison")
    elif target == "estimate":
        doc = ReportDocument("certify estimate", {"max_n": args.max_n})
        ctol = args.tol if args.tol is not None else 2e-9
        worst = float("-inf")
        points = 0
        ns = [n for n in range(2, 51) if n <= args.max_n]
        ns += [n for n in (100, 500, 1000) if n <= args.max_n]
        for n in ns:
            for d in range(2, n + 1):
                gap = bounds_mod.integral_I(n, d) - bounds_mod.closed_form_estimate(n, d)
                worst = max(worst, gap)
                points += 1
        ok = worst <= ctol
        ok_all &= ok
        doc.add("grid_points", points, unit="exact count",
                provenance="quadrature-sweep")
        doc.add("worst_gap", worst, unit="nats", provenance="quadrature-sweep")
        doc.add("tolerance", ctol, unit="nats", provenance="quadrature-sweep")
        doc.add("dominates", ok, provenance="comparison")
    else:
        raise InvalidParams(f"unknown certify target {target!r}")

    _emit(doc, args, started)
    return EXIT_OK if ok_all else EXIT_VIOLATION


# --------------------------------------------------------------------------
# subcommand: construct


def cmd_construct(args) -> int:
    started = time.monotonic()
    kind = args.kind
    if kind in ("cayley", "translate-mates") and not args.group:
        raise InvalidParams(f"construct {kind} needs --group")
    if kind == "kron" and not (args.a and args.b):
        raise InvalidParams("construct kron needs --a and --b")
    if kind == "power" and not args.base:
        raise InvalidParams("construct power needs --base")
    if kind == "constant" and args.constant is None:
        raise InvalidParams("construct constant needs --constant")
    if kind == "cayley":
        dims = [_spec_int(d, "--group") for d in args.group.split("x")]
        square = construct_mod.cayley_table(construct_mod.GroupSpec(dims))
        text = format_square(square.grid)
        params = {"group": args.group}
    elif kind == "kron":
        square = construct_mod.kronecker(
            resolve_square_spec(args.a), resolve_square_spec(args.b)
        )
        text = format_square(square.grid)
        params = {"a": args.a, "b": args.b}
    elif kind == "power":
        square = construct_mod.power(resolve_square_spec(args.base), args.k)
        text = format_square(square.grid)
        params = {"base": args.base, "k": args.k}
    elif kind == "translate-mates":
        dims = [_spec_int(d, "--group") for d in args.group.split("x")]
        g = construct_mod.GroupSpec(dims)
        table = construct_mod.cayley_table(g)
        if args.transversal:
            tdoc = parse_document(_read_file(args.transversal))
            if tdoc.transversal is None:
                raise FormatError(f"{args.transversal}: no TRANSVERSAL block")
            cells = tdoc.transversal
        else:
            res = enumerate_transversals(table, SearchOptions(cap=1))
            if not res.witnesses:
                raise NotFoundWithinLimit(
                    f"the order-{g.order} table has no transversal"
                )
            cells = list(res.witnesses[0])
        t = Transversal.of(table, cells)
        partition, mates = construct_mod.translate_mates(g, t, args.count)
        blocks = [format_document([table.grid], partition=partition,
                                  transversal=t.sorted_cells())]
        emitted = 0
        witness_docs = []
        for mate in mates:
            witness_docs.append(format_document([table.grid, mate.grid]))
            emitted += 1
        if args.emit_witnesses:
            _write_witnesses(args, witness_docs)
        text = blocks[0]
        params = {"group": args.group, "count": args.count}
        doc = ReportDocument("construct translate-mates", params)
        doc.add("mates_emitted", emitted, unit="exact count",
                provenance="translate-construction", exact=True)
        doc.add("partition_parts", partition.order, provenance="translate-construction")
        if args.format == "structured":
            doc.fields.append(ReportField("document", text))
            _emit(doc, args, started)
        else:
            sys.stdout.write(text)
            _emit(doc, args, started)
        return EXIT_OK
    elif kind == "constant":
        cert = construct_mod.construct_for_constant(
            args.constant, args.limit, args.power
        )
        text = format_square(cert.base.grid)
        params = {
            "constant": args.constant,
            "limit": args.limit,
            "power": args.power,
        }
        doc = ReportDocument("construct constant", params)
        doc.add("construction", cert.description, provenance=cert.derivation)
        doc.add("base_mates", cert.base_mates, unit="exact count",
                provenance="exact-cover", exact=True)
        doc.add("certified_log_mates", cert.log_lower_bound, unit="nats",
                provenance=cert.derivation)
        if args.format == "structured":
            doc.fields.append(ReportField("document", text))
            _emit(doc, args, started)
        else:
            sys.stdout.write(text)
            _emit(doc, args, started)
        return EXIT_OK
    else:
        raise InvalidParams(f"unknown construct kind {kind!r}")

    if args.format == "structured":
        doc = ReportDocument(f"construct {kind}", params)
        doc.fields.append(ReportField("document", text))
        _emit(doc, args, started)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: all cores)")
    p.add_argument("--cap", type=int, default=None,
                   help="max witnesses to collect")
    p.add_argument("--threshold", type=int, default=None,
                   help="stop counting once at least this many are found")
    p.add_argument("--tol", type=float, default=None,
                   help="quadrature / comparison tolerance")
    p.add_argument("--emit-witnesses", metavar="DIR", default=None,
                   help="write witness files to this directory")
    p.add_argument("--format", choices=("table", "structured"),
                   default="table", help="report format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="molscope",
        description="Workbench for mutually orthogonal Latin squares and "
                    "gerechte designs: validate, count, bound, certify, "
                    "construct.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="validate square/system documents")
    p.add_argument("paths", nargs="+")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="exact enumeration")
    p.add_argument("kind", choices=(
        "transversals", "partitions", "mates", "extensions", "mols", "sudoku"))
    p.add_argument("--square", action="append",
                   help="square spec (file or generator); repeatable")
    p.add_argument("--system", help="system document file")
    p.add_argument("--partition", help="partition spec")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bound", help="numeric bound evaluation")
    p.add_argument("kind", choices=("extension", "mols-count", "sudoku", "reference"))
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--k", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("certify", help="check a bound against exact counts")
    p.add_argument("target", choices=(
        "extension", "gerechte", "product", "power", "constant", "estimate"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--all-k", action="store_true")
    p.add_argument("--partition", help="partition spec (gerechte)")
    p.add_argument("--base", help="base square spec (product)")
    p.add_argument("--m", type=int, help="base order (power)")
    p.add_argument("--q", type=int, help="base mate count (power)")
    p.add_argument("--constant", type=float, help="target constant")
    p.add_argument("--limit", type=int, default=5, help="max base order")
    p.add_argument("--power", type=int, default=2, help="power for the certificate")
    p.add_argument("--max-n", type=int, default=50, help="estimate sweep limit")
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("construct", help="emit constructed objects")
    p.add_argument("kind", choices=(
        "cayley", "kron", "power", "translate-mates", "constant"))
    p.add_argument("--group", help="cyclic factors, e.g. 3 or 2x2")
    p.add_argument("--a", help="first factor square spec")
    p.add_argument("--b", help="second factor square spec")
    p.add_argument("--base", help="base square spec")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--transversal", help="file with a TRANSVERSAL block")
    p.add_argument("--count", type=int, default=None,
                   help="how many mates to emit")
    p.add_argument("--constant", type=float)
    p.add_argument("--limit", type=int, default=5)
    p.add_argument("--power", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LimitExceeded, NotFoundWithinLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InvalidParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except MolscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
