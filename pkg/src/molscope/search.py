"""Exact enumeration: transversals, partitions, extension columns, systems.

One engine does the real work: counting the columns that extend a nearly
orthogonal array by one.  Orthogonal mates, gerechte mates, and k-tuple
extensions are all the same search with a different starting array.  A
second, structurally different backtracking enumerator over plain grids is
kept alongside it so headline counts can be confirmed by two engines that
share no code path.

Determinism contract: results never depend on thread count.  The search
tree is cut into branches at a fixed depth, branches are processed in
lexicographic order, counts are added in that order, and witnesses are
concatenated in that order.  Early stopping happens only at whole-branch
granularity, and a threshold-stopped count always reports exactly the
threshold (flagged inexact), so schedules cannot leak into output.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .arrays import NearlyOrthArray, system_to_noa
from .core import (
    Cell,
    LatinSquare,
    MolsSystem,
    RegionPartition,
    Square,
    partition_from_square,
    partition_rows,
    validate_gerechte,
    validate_mols,
)
from .errors import InvalidParams, LimitExceeded

# --------------------------------------------------------------------------
# count values


@dataclass(frozen=True)
class Exact:
    """An exact nonnegative integer count (arbitrary precision)."""

    count: int

    def __post_init__(self):
        if self.count < 0:
            raise InvalidParams("counts cannot be negative")

    def ln(self) -> float:
        return math.log(self.count) if self.count else float("-inf")


@dataclass(frozen=True)
class LogDomain:
    """A natural-log-domain real, used for bound values too large to hold."""

    value: float

    def ln(self) -> float:
        return self.value


CountValue = Union[Exact, LogDomain]


def ln_value(v: CountValue) -> float:
    return v.ln()


def leq(a: CountValue, b: CountValue, tol: float = 0.0) -> bool:
    """Compare counts/bounds in the log domain with a tolerance."""
    if isinstance(a, Exact) and isinstance(b, Exact):
        return a.count <= b.count
    return a.ln() <= b.ln() + tol


@dataclass(frozen=True)
class SearchOptions:
    """Knobs shared by all searches.

    ``cap`` limits how many witnesses are collected (None: collect none).
    ``stop_threshold`` lets a count stop early once it is known to be at
    least that large; the result is then reported as exactly the threshold
    with ``exact_flag`` False ("at least").  ``parallel`` distributes
    top-level branches over ``threads`` worker processes.
    """

    cap: Optional[int] = None
    stop_threshold: Optional[int] = None
    parallel: bool = False
    threads: Optional[int] = None

    def __post_init__(self):
        if self.cap is not None and self.cap <= 0:
            raise InvalidParams("cap must be positive")
        if self.stop_threshold is not None and self.stop_threshold <= 0:
            raise InvalidParams("stop_threshold must be positive")
        if self.threads is not None and self.threads <= 0:
            raise InvalidParams("threads must be positive")


@dataclass(frozen=True)
class ExtensionCount:
    """A search result: the count, whether it is the full count, and any
    collected witnesses (in lexicographic discovery order)."""

    value: CountValue
    exact_flag: bool
    witnesses: Optional[tuple] = None


DEFAULT_ENUM_LIMIT = 16  # transversals / single-column extensions
DEFAULT_MOLS_LIMIT = 5  # exhaustive k-tuple counts
DEFAULT_MAX_EXT_LIMIT = 4  # "enumerate every system" operations


def order_limit(default: int) -> int:
    """Effective order limit; MOLSCOPE_LIMIT_N overrides every default."""
    env = os.environ.get("MOLSCOPE_LIMIT_N")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidParams(f"MOLSCOPE_LIMIT_N={env!r} is not an integer") from exc
    return default


def _check_limit(n: int, default: int, what: str) -> None:
    lim = order_limit(default)
    if n > lim:
        raise LimitExceeded(
            f"{what} at order {n} exceeds the configured limit {lim} "
            f"(set MOLSCOPE_LIMIT_N to override)"
        )


# --------------------------------------------------------------------------
# the column-extension engine

_MIN_BRANCHES = 32  # fixed fan-out target so branch sets never depend on threads


def _availability(rows: Sequence[Sequence[int]], n: int) -> list[int]:
    """Per (column, symbol) bitmask of new-column symbols still available."""
    w = len(rows[0])
    return [(1 << n) - 1] * (w * n)


def _cell_keys(rows: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """For each cell, the availability-table slots its constraints live in."""
    return [tuple(c * n + row[c] for c in range(len(row))) for row in rows]


def _apply_prefix(av: list[int], keys: Sequence[tuple[int, ...]], prefix: Sequence[int]) -> None:
    for l, sym in enumerate(prefix):
        bit = 1 << sym
        for t in keys[l]:
            av[t] &= ~bit


def _count_rec(av: list[int], keys, cell: int, ncells: int) -> int:
    ks = keys[cell]
    m = av[ks[0]]
    for t in ks[1:]:
        m &= av[t]
    if cell + 1 == ncells:
        return m.bit_count()
    total = 0
    while m:
        b = m & -m
        m -= b
        nb = ~b
        for t in ks:
            av[t] &= nb
        total += _count_rec(av, keys, cell + 1, ncells)
        for t in ks:
            av[t] |= b
    return total


def _collect_rec(av, keys, cell, ncells, buf, out, cap) -> int:
    """Count while also appending completed columns to ``out`` up to cap."""
    ks = keys[cell]
    m = av[ks[0]]
    for t in ks[1:]:
        m &= av[t]
    total = 0
    last = cell + 1 == ncells
    while m:
        b = m & -m
        m -= b
        sym = b.bit_length() - 1
        buf[cell] = sym
        if last:
            total += 1
            if len(out) < cap:
                out.append(tuple(buf))
        else:
            nb = ~b
            for t in ks:
                av[t] &= nb
            total += _collect_rec(av, keys, cell + 1, ncells, buf, out, cap)
            for t in ks:
                av[t] |= b
    return total


def _column_prefixes(
    rows: Sequence[Sequence[int]], n: int, min_branches: int = _MIN_BRANCHES
) -> list[tuple[int, ...]]:
    """Valid assignments of the first few cells, in lexicographic order.

    The depth is the smallest one reaching ``min_branches`` prefixes (capped
    at one full row) — a function of the instance only, never of the thread
    count, so every run cuts the tree identically.
    """
    ncells = len(rows)
    keys = _cell_keys(rows, n)
    depth = 1
    while True:
        av = _availability(rows, n)
        out: list[tuple[int, ...]] = []
        buf = [0] * depth

        def rec(cell):
            ks = keys[cell]
            m = av[ks[0]]
            for t in ks[1:]:
                m &= av[t]
            while m:
                b = m & -m
                m -= b
                buf[cell] = b.bit_length() - 1
                if cell + 1 == depth:
                    out.append(tuple(buf))
                else:
                    nb = ~b
                    for t in ks:
                        av[t] &= nb
                    rec(cell + 1)
                    for t in ks:
                        av[t] |= b

        rec(0)
        if len(out) >= min_branches or depth >= min(n, ncells) or not out:
            return out
        depth += 1


def iter_extensions(a: NearlyOrthArray) -> Iterator[tuple[int, ...]]:
    """All columns that extend ``a``, in lexicographic order (sequential)."""
    n = a.order
    rows = a.rows
    keys = _cell_keys(rows, n)
    av = _availability(rows, n)
    ncells = n * n
    buf = [0] * ncells

    def rec(cell):
        ks = keys[cell]
        m = av[ks[0]]
        for t in ks[1:]:
            m &= av[t]
        while m:
            b = m & -m
            m -= b
            buf[cell] = b.bit_length() - 1
            if cell + 1 == ncells:
                yield tuple(buf)
            else:
                nb = ~b
                for t in ks:
                    av[t] &= nb
                yield from rec(cell + 1)
                for t in ks:
                    av[t] |= b

    if ncells:
        yield from rec(0)


# --------------------------------------------------------------------------
# deterministic branch aggregation (sequential or process pool)

_WORKER_STATE = None


def _worker_init(state):
    global _WORKER_STATE
    _WORKER_STATE = state


def _worker_run(idx: int):
    kind = _WORKER_STATE[0]
    if kind == "ext":
        _, rows, n, prefixes, cap = _WORKER_STATE
        return _ext_branch(rows, n, prefixes[idx], cap)
    if kind == "chain":
        _, rows, n, prefixes, remaining = _WORKER_STATE
        return _chain_branch(rows, n, prefixes[idx], remaining)
    if kind == "tr":
        _, grid, n, prefixes, cap = _WORKER_STATE
        return _transversal_branch(grid, n, prefixes[idx], cap)
    if kind == "part":
        _, masks, cellopts, n, branches, cap = _WORKER_STATE
        return _partition_branch(masks, cellopts, n, branches[idx], cap)
    raise AssertionError(kind)


def _aggregate(state, nbranches: int, opts: SearchOptions, collect: bool) -> ExtensionCount:
    """Run all branches in order, honoring threshold stop and witness cap.

    Each branch returns (exact subcount, witness list).  The accumulation
    loop is the same code for one process and many.
    """
    threshold = opts.stop_threshold
    cap = opts.cap if collect else None
    total = 0
    witnesses: list = []
    stopped = False

    def consume(result) -> bool:
        nonlocal total, stopped
        sub, wit = result
        total += sub
        if cap is not None and len(witnesses) < cap:
            witnesses.extend(wit[: cap - len(witnesses)])
        if threshold is not None and total >= threshold:
            stopped = True
            return True
        return False

    if opts.parallel and nbranches > 1:
        procs = min(opts.threads or os.cpu_count() or 1, nbranches)
        if procs > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(procs, initializer=_worker_init, initargs=(state,)) as pool:
                for result in pool.imap(_worker_run, range(nbranches)):
                    if consume(result):
                        pool.terminate()
                        break
        else:
            _sequential(state, nbranches, consume)
    else:
        _sequential(state, nbranches, consume)

    if stopped:
        # Report exactly the threshold: the deterministic "at least" value.
        value = Exact(threshold)
        if cap is not None:
            del witnesses[threshold:]
        return ExtensionCount(value, False, tuple(witnesses) if cap is not None else None)
    return ExtensionCount(Exact(total), True, tuple(witnesses) if cap is not None else None)


def _sequential(state, nbranches, consume):
    global _WORKER_STATE
    saved = _WORKER_STATE
    _WORKER_STATE = state
    try:
        for idx in range(nbranches):
            if consume(_worker_run(idx)):
                break
    finally:
        _WORKER_STATE = saved


# branch bodies -------------------------------------------------------------


def _ext_branch(rows, n, prefix, cap):
    ncells = n * n
    keys = _cell_keys(rows, n)
    av = _availability(rows, n)
    _apply_prefix(av, keys, prefix)
    s = len(prefix)
    if s == ncells:
        return 1, [tuple(prefix)] if cap is not None else []
    if cap is None:
        return _count_rec(av, keys, s, ncells), []
    out: list[tuple[int, ...]] = []
    buf = list(prefix) + [0] * (ncells - s)
    total = _collect_rec(av, keys, s, ncells, buf, out, cap)
    return total, out


def _chain_branch(rows, n, prefix, remaining):
    ncells = n * n
    keys = _cell_keys(rows, n)
    av = _availability(rows, n)
    _apply_prefix(av, keys, prefix)
    s = len(prefix)
    total = 0
    buf = list(prefix) + [0] * (ncells - s)

    def rec(cell):
        nonlocal total
        ks = keys[cell]
        m = av[ks[0]]
        for t in ks[1:]:
            m &= av[t]
        while m:
            b = m & -m
            m -= b
            buf[cell] = b.bit_length() - 1
            if cell + 1 == ncells:
                total += _chain_count(
                    [row + (buf[l],) for l, row in enumerate(rows)], n, remaining - 1
                )
            else:
                nb = ~b
                for t in ks:
                    av[t] &= nb
                rec(cell + 1)
                for t in ks:
                    av[t] |= b

    if s == ncells:
        total = _chain_count(
            [row + (prefix[l],) for l, row in enumerate(rows)], n, remaining - 1
        )
    else:
        rec(s)
    return total, []


def _chain_count(rows, n, remaining) -> int:
    """Sequential chained count: extend ``remaining`` more times."""
    if remaining == 0:
        return 1
    ncells = n * n
    keys = _cell_keys(rows, n)
    av = _availability(rows, n)
    if remaining == 1:
        return _count_rec(av, keys, 0, ncells)
    total = 0
    buf = [0] * ncells

    def rec(cell):
        nonlocal total
        ks = keys[cell]
        m = av[ks[0]]
        for t in ks[1:]:
            m &= av[t]
        while m:
            b = m & -m
            m -= b
            buf[cell] = b.bit_length() - 1
            if cell + 1 == ncells:
                total += _chain_count(
                    [row + (buf[l],) for l, row in enumerate(rows)], n, remaining - 1
                )
            else:
                nb = ~b
                for t in ks:
                    av[t] &= nb
                rec(cell + 1)
                for t in ks:
                    av[t] |= b

    rec(0)
    return total


def _transversal_branch(grid, n, prefix, cap):
    out: list[tuple[Cell, ...]] = []
    colmask = 0
    symmask = 0
    for i, j in enumerate(prefix):
        colmask |= 1 << j
        symmask |= 1 << grid[i][j]
    cols = list(prefix) + [0] * (n - len(prefix))
    total = 0

    def rec(i, colmask, symmask):
        nonlocal total
        if i == n:
            total += 1
            if cap is not None and len(out) < cap:
                out.append(tuple((r, cols[r]) for r in range(n)))
            return
        row = grid[i]
        for j in range(n):
            cb = 1 << j
            if colmask & cb:
                continue
            sb = 1 << row[j]
            if symmask & sb:
                continue
            cols[i] = j
            rec(i + 1, colmask | cb, symmask | sb)

    rec(len(prefix), colmask, symmask)
    return total, out


def _partition_branch(masks, cellopts, n, first, cap):
    ncells = n * n
    full = (1 << ncells) - 1
    out: list[tuple[tuple[Cell, ...], ...]] = []
    chosen = [first]
    total = 0

    def rec(cov):
        nonlocal total
        if cov == full:
            total += 1
            if cap is not None and len(out) < cap:
                out.append(
                    tuple(
                        tuple(divmod(l, n) for l in _mask_cells(masks[t], ncells))
                        for t in chosen
                    )
                )
            return
        free = ~cov & full
        c = (free & -free).bit_length() - 1
        for t in cellopts[c]:
            tm = masks[t]
            if not tm & cov:
                chosen.append(t)
                rec(cov | tm)
                chosen.pop()

    rec(masks[first])
    return total, out


def _mask_cells(mask: int, ncells: int) -> list[int]:
    cells = []
    while mask:
        b = mask & -mask
        mask -= b
        cells.append(b.bit_length() - 1)
    return cells


# --------------------------------------------------------------------------
# transversal helpers


def _all_transversals(l: LatinSquare) -> list[tuple[int, tuple[Cell, ...]]]:
    """Every transversal as (cell bitmask, sorted cells), lexicographic."""
    n = l.order
    grid = l.grid
    out: list[tuple[int, tuple[Cell, ...]]] = []
    cols = [0] * n

    def rec(i, colmask, symmask):
        if i == n:
            cells = tuple((r, cols[r]) for r in range(n))
            mask = 0
            for r, j in cells:
                mask |= 1 << (r * n + j)
            out.append((mask, cells))
            return
        row = grid[i]
        for j in range(n):
            cb = 1 << j
            if colmask & cb:
                continue
            sb = 1 << row[j]
            if symmask & sb:
                continue
            cols[i] = j
            rec(i + 1, colmask | cb, symmask | sb)

    rec(0, 0, 0)
    return out


# --------------------------------------------------------------------------
# public operations


def enumerate_transversals(l: LatinSquare, opts: SearchOptions | None = None) -> ExtensionCount:
    """Count (and optionally collect) all transversals of ``l``.

    Row-by-row backtracking over column choices with column and symbol
    bitmasks; witnesses are cell tuples sorted by row.
    """
    opts = opts or SearchOptions()
    n = l.order
    _check_limit(n, DEFAULT_ENUM_LIMIT, "transversal enumeration")
    grid = l.grid
    prefixes: list[tuple[int, ...]] = []

    def seed(i, colmask, symmask, prefix, depth):
        if i == depth:
            prefixes.append(tuple(prefix))
            return
        row = grid[i]
        for j in range(n):
            cb = 1 << j
            if colmask & cb:
                continue
            sb = 1 << row[j]
            if symmask & sb:
                continue
            prefix.append(j)
            seed(i + 1, colmask | cb, symmask | sb, prefix, depth)
            prefix.pop()

    depth = 1
    while True:
        prefixes.clear()
        seed(0, 0, 0, [], depth)
        if len(prefixes) >= _MIN_BRANCHES or depth >= n or not prefixes:
            break
        depth += 1
    state = ("tr", grid, n, prefixes, opts.cap)
    return _aggregate(state, len(prefixes), opts, collect=opts.cap is not None)


def count_transversal_partitions(
    l: LatinSquare, opts: SearchOptions | None = None
) -> ExtensionCount:
    """Unordered partitions of the cells into n disjoint transversals.

    Exact-cover search: cells are the items, transversals the options.  The
    part containing the lowest uncovered cell is always chosen next, so each
    partition is generated exactly once, with its parts in order of their
    minimal cells.  Orthogonal mates are in bijection with (partition,
    symbol assignment) pairs, so mates(l) = partitions(l) * n!.
    """
    opts = opts or SearchOptions()
    n = l.order
    _check_limit(n, DEFAULT_ENUM_LIMIT, "partition enumeration")
    trs = _all_transversals(l)
    collect = opts.cap is not None
    if not trs:
        return ExtensionCount(Exact(0), True, () if collect else None)
    masks = [m for m, _ in trs]
    cellopts: list[list[int]] = [[] for _ in range(n * n)]
    for idx, (mask, cells) in enumerate(trs):
        for i, j in cells:
            cellopts[i * n + j].append(idx)
    branches = cellopts[0]  # every partition has exactly one part through cell 0
    if not branches:
        return ExtensionCount(Exact(0), True, () if collect else None)
    state = ("part", masks, cellopts, n, branches, opts.cap)
    return _aggregate(state, len(branches), opts, collect=collect)


def count_extensions(a: NearlyOrthArray, opts: SearchOptions | None = None) -> ExtensionCount:
    """Count the columns whose appending keeps ``a`` a valid array.

    Cells are assigned in lexicographic order; each existing column keeps a
    per-symbol availability bitmask, and a cell's candidate set is the AND
    across its columns.  Every mate/extension count in the package funnels
    through here.
    """
    opts = opts or SearchOptions()
    n = a.order
    _check_limit(n, DEFAULT_ENUM_LIMIT, "extension counting")
    rows = a.rows
    prefixes = _column_prefixes(rows, n)
    if not prefixes:
        collect = opts.cap is not None
        return ExtensionCount(Exact(0), True, () if collect else None)
    state = ("ext", rows, n, prefixes, opts.cap)
    return _aggregate(state, len(prefixes), opts, collect=opts.cap is not None)


def count_mates(l: LatinSquare, opts: SearchOptions | None = None) -> ExtensionCount:
    """Orthogonal mates of ``l`` via the extension engine."""
    sys = validate_mols([l], partition_rows(l.order))
    return count_extensions(system_to_noa(sys), opts)


def count_mols(n: int, k: int, opts: SearchOptions | None = None) -> ExtensionCount:
    """The number of ordered k-tuples of pairwise orthogonal Latin squares,
    by chaining the extension engine one square at a time."""
    opts = opts or SearchOptions()
    if n < 1 or k < 0:
        raise InvalidParams("need n >= 1 and k >= 0")
    _check_limit(n, DEFAULT_MOLS_LIMIT, "exhaustive tuple counting")
    if k == 0:
        return ExtensionCount(Exact(1), True)
    if n >= 2 and k > n - 1:
        return ExtensionCount(Exact(0), True)
    base = system_to_noa(validate_mols([], partition_rows(n)))
    rows = base.rows
    prefixes = _column_prefixes(rows, n)
    if not prefixes:
        return ExtensionCount(Exact(0), True)
    state = ("chain", rows, n, prefixes, k)
    return _aggregate(state, len(prefixes), opts, collect=False)


def iter_mols_systems(n: int, k: int) -> Iterator[MolsSystem]:
    """All ordered k-tuples of pairwise orthogonal squares, lexicographically
    by the concatenated flattened grids (sequential)."""
    if n < 1 or k < 0:
        raise InvalidParams("need n >= 1 and k >= 0")
    if n >= 2 and k > n - 1:
        return
    base = system_to_noa(validate_mols([], partition_rows(n)))

    def rec(noa: NearlyOrthArray, depth: int, cols: list[tuple[int, ...]]):
        if depth == k:
            yield columns_to_system(n, cols)
            return
        for x in iter_extensions(noa):
            cols.append(x)
            yield from rec(noa.with_column(x), depth + 1, cols)
            cols.pop()

    yield from rec(base, 0, [])


def columns_to_system(n: int, cols: Sequence[Sequence[int]]) -> MolsSystem:
    """Reshape flat symbol columns into a validated system."""
    squares = [
        LatinSquare(Square([col[i * n : (i + 1) * n] for i in range(n)]))
        for col in cols
    ]
    return validate_mols(squares, order=n)


def max_extensions(
    n: int, k: int, opts: SearchOptions | None = None
) -> tuple[ExtensionCount, Optional[MolsSystem]]:
    """Maximum extension count over every k-tuple system of order n, with the
    lexicographically first maximizer as witness."""
    opts = opts or SearchOptions()
    if n < 1 or k < 0:
        raise InvalidParams("need n >= 1 and k >= 0")
    _check_limit(n, DEFAULT_MAX_EXT_LIMIT, "system-by-system maximisation")
    best = -1
    best_sys: Optional[MolsSystem] = None
    seq = SearchOptions()  # inner counts are tiny; keep them in-process
    for sys in iter_mols_systems(n, k):
        with_rows = validate_mols(list(sys.squares), partition_rows(n))
        c = count_extensions(system_to_noa(with_rows), seq).value.count
        if c > best:
            best = c
            best_sys = sys
    if best < 0:
        return ExtensionCount(Exact(0), True), None
    return ExtensionCount(Exact(best), True), best_sys


def extension_census(
    partition: RegionPartition, kmax: int
) -> list[dict[int, int]]:
    """For k = 0..kmax: the multiset of extension counts over all k-tuple
    systems gerechte for ``partition`` — {extension count: how many systems}.

    Lets a caller check a uniform bound against *every* system without
    materializing the systems.
    """
    n = partition.order
    if kmax < 0:
        raise InvalidParams("kmax must be nonnegative")
    _check_limit(n, DEFAULT_MAX_EXT_LIMIT, "census over all systems")
    out: list[dict[int, int]] = [dict() for _ in range(kmax + 1)]

    def rec(noa: NearlyOrthArray, depth: int):
        hist = out[depth]
        if depth == kmax:
            cnt = count_extensions(noa).value.count
            hist[cnt] = hist.get(cnt, 0) + 1
            return
        exts = list(iter_extensions(noa))
        hist[len(exts)] = hist.get(len(exts), 0) + 1
        for x in exts:
            rec(noa.with_column(x), depth + 1)

    base = system_to_noa(validate_mols([], partition))
    rec(base, 0)
    for hist in out:
        # deterministic key order for reporting
        items = sorted(hist.items())
        hist.clear()
        hist.update(items)
    return out


# --------------------------------------------------------------------------
# the independent direct engine (no array machinery)


def iter_latin_direct(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Straight cell-by-cell backtracking over grids with row and column
    bitmasks.  Shares nothing with the extension engine."""
    if n < 1:
        raise InvalidParams("order must be positive")
    full = (1 << n) - 1
    rowmask = [0] * n
    colmask = [0] * n
    grid = [[0] * n for _ in range(n)]

    def rec(cell):
        if cell == n * n:
            yield tuple(tuple(r) for r in grid)
            return
        i, j = divmod(cell, n)
        m = full & ~(rowmask[i] | colmask[j])
        while m:
            b = m & -m
            m -= b
            grid[i][j] = b.bit_length() - 1
            rowmask[i] |= b
            colmask[j] |= b
            yield from rec(cell + 1)
            rowmask[i] &= ~b
            colmask[j] &= ~b

    yield from rec(0)


def count_latin_direct(n: int) -> int:
    """Count Latin squares by the direct engine (fast, no witnesses)."""
    if n < 1:
        raise InvalidParams("order must be positive")
    full = (1 << n) - 1
    rowmask = [0] * n
    colmask = [0] * n
    ncells = n * n

    def rec(cell):
        i, j = divmod(cell, n)
        m = full & ~(rowmask[i] | colmask[j])
        if cell + 1 == ncells:
            return m.bit_count()
        total = 0
        while m:
            b = m & -m
            m -= b
            rowmask[i] |= b
            colmask[j] |= b
            total += rec(cell + 1)
            rowmask[i] &= ~b
            colmask[j] &= ~b
        return total

    return rec(0) if n > 1 else 1


def count_sudoku_direct(n: int) -> int:
    """Count order-n box-balanced Latin squares directly (three bitmasks)."""
    m = math.isqrt(n)
    if m * m != n:
        raise InvalidParams(f"order {n} is not a perfect square")
    full = (1 << n) - 1
    rowmask = [0] * n
    colmask = [0] * n
    boxmask = [0] * n
    ncells = n * n

    def rec(cell):
        i, j = divmod(cell, n)
        bx = (i // m) * m + (j // m)
        free = full & ~(rowmask[i] | colmask[j] | boxmask[bx])
        if cell + 1 == ncells:
            return free.bit_count()
        total = 0
        while free:
            b = free & -free
            free -= b
            rowmask[i] |= b
            colmask[j] |= b
            boxmask[bx] |= b
            total += rec(cell + 1)
            rowmask[i] &= ~b
            colmask[j] &= ~b
            boxmask[bx] &= ~b
        return total

    return rec(0) if n > 1 else 1


def count_mols_direct(n: int, k: int) -> int:
    """Tuple counts by the direct engine: full grids first, then pair checks.

    Supported for k <= 1 at any permitted order and k = 2 up to order 4;
    the cost is quadratic in the number of squares beyond that.
    """
    if k == 0:
        return 1
    if k == 1:
        _check_limit(n, DEFAULT_MOLS_LIMIT, "direct tuple counting")
        return count_latin_direct(n)
    if k == 2 and n <= 4:
        squares = list(iter_latin_direct(n))
        flat = [tuple(x for row in g for x in row) for g in squares]
        total = 0
        for a in flat:
            for b in flat:
                seen = 0
                ok = True
                for xa, xb in zip(a, b):
                    bit = 1 << (xa * n + xb)
                    if seen & bit:
                        ok = False
                        break
                    seen |= bit
                if ok:
                    total += 1
        return total
    raise LimitExceeded(
        f"direct engine supports k <= 1 (any order) or k = 2 up to order 4; "
        f"got n={n}, k={k}"
    )


def gerechte_mates_direct(l: LatinSquare) -> int:
    """Mates of ``l`` by direct enumeration and symbol-class filtering."""
    p = partition_from_square(l.square)
    total = 0
    for g in iter_latin_direct(l.order):
        m = LatinSquare(Square(g))
        if validate_gerechte(m, p):
            total += 1
    return total
