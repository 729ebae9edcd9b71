"""Product constructions and certified lower bounds on mate counts.

Cayley tables of finite abelian groups, the block product of two squares,
its iterated powers, the translate construction that turns one transversal
of a Cayley table into a family of orthogonal mates, and the arithmetic
that turns exact mate counts of small squares into astronomically large
certified counts for their products.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .core import (
    LatinSquare,
    RegionPartition,
    Square,
    Transversal,
    check_orthogonal,
    is_transversal,
)
from .errors import (
    InvalidParams,
    LimitExceeded,
    NotATransversal,
    NotFoundWithinLimit,
    TranslatesNotDisjoint,
)
from .bounds import log_factorial
from .search import (
    SearchOptions,
    count_transversal_partitions,
    iter_latin_direct,
    count_latin_direct,
    order_limit,
)

DEFAULT_CONSTRUCT_LIMIT = 64


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group as a product of cyclic factors, each >= 2.

    An empty factor list is the trivial group of order 1.  Elements are the
    mixed-radix tuples in lexicographic order.
    """

    factors: tuple[int, ...]

    def __init__(self, factors=()):
        fs = tuple(int(m) for m in factors)
        for m in fs:
            if m < 2:
                raise InvalidParams(f"cyclic factor {m} must be at least 2")
        object.__setattr__(self, "factors", fs)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(m) for m in self.factors)))

    def index_of(self, elem: tuple[int, ...]) -> int:
        idx = 0
        for x, m in zip(elem, self.factors):
            idx = idx * m + x
        return idx

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.factors))


def _check_construct_limit(order: int) -> None:
    lim = order_limit(DEFAULT_CONSTRUCT_LIMIT)
    if order > lim:
        raise LimitExceeded(
            f"construction of order {order} exceeds the configured limit {lim} "
            f"(set MOLSCOPE_LIMIT_N to override)"
        )


def cayley_table(g: GroupSpec) -> LatinSquare:
    """grid[a][b] = index of (element a + element b), elements lexicographic."""
    n = g.order
    _check_construct_limit(n)
    elems = g.elements()
    grid = [[g.index_of(g.add(a, b)) for b in elems] for a in elems]
    return LatinSquare(Square(grid))


def kronecker(a: LatinSquare, b: LatinSquare) -> LatinSquare:
    """Block product: cell ((i1,j1),(i2,j2)) holds (a(i1,i2), b(j1,j2)),
    with the fixed bijection (u, v) -> u*n2 + v applied to row, column, and
    symbol pairs alike.  That convention makes the product of two Cayley
    tables *equal* the Cayley table of the product group, not merely
    isomorphic to it.
    """
    n1, n2 = a.order, b.order
    n = n1 * n2
    _check_construct_limit(n)
    grid = [[0] * n for _ in range(n)]
    for i1 in range(n1):
        for j1 in range(n2):
            row = grid[i1 * n2 + j1]
            for i2 in range(n1):
                av = a.value(i1, i2) * n2
                for j2 in range(n2):
                    row[i2 * n2 + j2] = av + b.value(j1, j2)
    return LatinSquare(Square(grid))


def power(l: LatinSquare, k: int) -> LatinSquare:
    """Left-associated k-fold block product of ``l`` with itself."""
    if k < 1:
        raise InvalidParams("power needs k >= 1")
    _check_construct_limit(l.order**k)
    out = l
    for _ in range(k - 1):
        out = kronecker(out, l)
    return out


def translate_mates(
    g: GroupSpec, t: Transversal, count_to_emit: Optional[int] = None
) -> tuple[RegionPartition, Iterator[LatinSquare]]:
    """Shift one transversal around the group; the n shifted copies tile the
    table, and assigning the n symbols to the n tiles in any of the n! ways
    yields an orthogonal mate of the Cayley table.

    Returns the tiling as a partition plus a generator of mates in
    lexicographic symbol-assignment order (up to ``count_to_emit``).
    """
    n = g.order
    table = cayley_table(g)
    if t.order != n or not is_transversal(table, t.cells):
        raise NotATransversal(
            "the given cells are not a transversal of the group's table"
        )
    elems = g.elements()
    labels = [[-1] * n for _ in range(n)]
    cells = sorted(t.cells)
    for h, shift in enumerate(elems):
        for i, j in cells:
            jj = g.index_of(g.add(elems[j], shift))
            if labels[i][jj] != -1:
                raise TranslatesNotDisjoint(
                    "two shifted copies collide; the input is not a "
                    "transversal of an abelian table"
                )
            labels[i][jj] = h
    partition = RegionPartition(n, [x for row in labels for x in row])
    for h in range(n):
        part = partition.cells_of(h)
        if not is_transversal(table, part):
            raise TranslatesNotDisjoint(
                "a shifted copy is not itself a transversal"
            )

    def emit() -> Iterator[LatinSquare]:
        limit = count_to_emit if count_to_emit is not None else math.factorial(n)
        done = 0
        for perm in itertools.permutations(range(n)):
            if done >= limit:
                return
            grid = [[perm[labels[i][j]] for j in range(n)] for i in range(n)]
            mate = LatinSquare(Square(grid))
            if not check_orthogonal(table, mate):
                raise RuntimeError("emitted square is not a mate — tiling bug")
            yield mate
            done += 1

    return partition, emit()


# --------------------------------------------------------------------------
# certified lower-bound arithmetic


def product_mate_bound(n1: int, n2: int, log_q1: float, log_q2: float) -> float:
    """Log of the certified mate count of a block product:
    log q1 + n1^2 log q2 + log (n1 n2)! - log n1! - n1 log n2!.

    The log-q arguments are natural logs of mate counts; -inf propagates
    (no mates in a factor certifies nothing).
    """
    if n1 < 1 or n2 < 1:
        raise InvalidParams("orders must be positive")
    return (
        log_q1
        + n1 * n1 * log_q2
        + log_factorial(n1 * n2)
        - log_factorial(n1)
        - n1 * log_factorial(n2)
    )


def product_mate_bound_exact(n1: int, n2: int, q1: int, q2: int) -> int:
    """The same bound as an exact integer: q1 q2^(n1^2) (n1 n2)!/(n1! n2!^n1)."""
    if n1 < 1 or n2 < 1 or q1 < 0 or q2 < 0:
        raise InvalidParams("orders must be positive and counts nonnegative")
    num = math.factorial(n1 * n2)
    den = math.factorial(n1) * math.factorial(n2) ** n1
    q, r = divmod(num, den)
    if r:
        raise RuntimeError("factorial quotient is not integral — formula bug")
    return q1 * q2 ** (n1 * n1) * q


def power_exponent(m: int, k: int) -> int:
    """The exact exponent (m^(2k) - 1) / (m^2 - 1) of the power bound."""
    if m < 2 or k < 1:
        raise InvalidParams("need m >= 2 and k >= 1")
    q, r = divmod(m ** (2 * k) - 1, m * m - 1)
    if r:
        raise RuntimeError("exponent is not integral — formula bug")
    return q


def power_mate_bound(m: int, log_q: float, k: int) -> float:
    """Log of the certified mate count of the k-fold power: exponent * log q,
    with the exponent computed in exact integer arithmetic."""
    return power_exponent(m, k) * log_q


@dataclass(frozen=True)
class MateCertificate:
    """A lower bound on the mate count of a constructed square.

    ``derivation`` names the route: "enumeration" (an exact count backs the
    bound directly), "product-bound", or "power-bound" (the enumerated base
    count pushed through the corresponding formula).
    """

    description: str
    log_lower_bound: float
    derivation: str
    base: LatinSquare
    base_mates: int
    power: int
    order: int


def construct_for_constant(
    C: float, search_limit: int = 5, k: int = 2
) -> MateCertificate:
    """Find the smallest base order m <= search_limit whose best square has
    at least C^(m^2) mates (exact threshold comparison), then certify the
    k-fold power: its mate count is at least C^(n^2) with n = m^k.

    Only small C is satisfiable at desk scale; when no base square
    qualifies, the exhaustive outcome is reported honestly as
    :class:`NotFoundWithinLimit` rather than extrapolated.
    """
    if C <= 0:
        raise InvalidParams("C must be positive")
    if search_limit < 2:
        raise InvalidParams("search_limit must be at least 2")
    if k < 1:
        raise InvalidParams("k must be at least 1")
    frac_c = Fraction(C)
    for m in range(2, search_limit + 1):
        need = frac_c ** (m * m)
        threshold = math.ceil(need) if need > 1 else 1
        if count_latin_direct(m) < threshold:
            # even the total number of squares is too small for any of them
            # to have that many mates
            continue
        fact = math.factorial(m)
        for grid in iter_latin_direct(m):
            base = LatinSquare(Square(grid))
            if _transversals_through_origin(base) * fact < threshold:
                continue
            parts = count_transversal_partitions(base, SearchOptions()).value.count
            mates = parts * fact
            if mates >= threshold:
                n = m**k
                log_bound = power_mate_bound(m, math.log(mates), k)
                if log_bound < n * n * math.log(C) - 1e-9:
                    raise RuntimeError("power bound fell below C^(n^2) — bug")
                return MateCertificate(
                    description=(
                        f"order-{m} base square raised to the {k}-fold "
                        f"block product (order {n})"
                    ),
                    log_lower_bound=log_bound,
                    derivation="power-bound",
                    base=base,
                    base_mates=mates,
                    power=k,
                    order=n,
                )
    raise NotFoundWithinLimit(
        f"no Latin square of order <= {search_limit} has at least C^(m^2) "
        f"mates for C = {C}; larger bases are beyond exhaustive search"
    )


def _transversals_through_origin(l: LatinSquare) -> int:
    """Transversals containing cell (0, 0) — a cheap upper-bound gate, since
    every partition into transversals uses exactly one of them."""
    n = l.order
    grid = l.grid

    def rec(i, colmask, symmask):
        if i == n:
            return 1
        total = 0
        row = grid[i]
        for j in range(n):
            cb = 1 << j
            if colmask & cb:
                continue
            sb = 1 << row[j]
            if symmask & sb:
                continue
            total += rec(i + 1, colmask | cb, symmask | sb)
        return total

    return rec(1, 1, 1 << grid[0][0])
