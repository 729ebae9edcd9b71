import pytest

import oracles
from molscope.arrays import system_to_noa
from molscope.core import (
    Square,
    check_orthogonal,
    partition_boxes,
    partition_from_square,
    partition_rows,
    validate_gerechte,
    validate_latin,
    validate_mols,
)
from molscope.errors import InvalidParams, LimitExceeded
from molscope.search import (
    Exact,
    LogDomain,
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
    gerechte_mates_direct,
    iter_extensions,
    iter_latin_direct,
    iter_mols_systems,
    leq,
    max_extensions,
)

Z3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
Z4 = [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]]
K4 = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def L(grid):
    return validate_latin(Square(grid))


# --------------------------------------------------------------------------
# count values


def test_count_value_types():
    assert Exact(6).ln() == pytest.approx(1.791759469228055)
    assert Exact(0).ln() == float("-inf")
    with pytest.raises(InvalidParams):
        Exact(-1)
    assert LogDomain(2.5).ln() == 2.5
    assert leq(Exact(5), Exact(5))
    assert not leq(Exact(6), Exact(5))
    assert leq(Exact(12), LogDomain(2.4849), tol=1e-3)
    assert not leq(Exact(12), LogDomain(2.4), tol=1e-3)


def test_search_options_validation():
    with pytest.raises(InvalidParams):
        SearchOptions(cap=0)
    with pytest.raises(InvalidParams):
        SearchOptions(stop_threshold=0)
    with pytest.raises(InvalidParams):
        SearchOptions(threads=0)


# --------------------------------------------------------------------------
# transversals against the oracle


@pytest.mark.parametrize("grid", [Z3, Z4, K4])
def test_transversals_match_oracle(grid):
    res = enumerate_transversals(L(grid), SearchOptions(cap=1000))
    expected = oracles.transversals(grid)
    assert res.value.count == len(expected)
    assert res.exact_flag
    assert sorted(res.witnesses) == sorted(expected)


def test_transversal_known_counts():
    assert enumerate_transversals(L(Z3)).value.count == 3
    assert enumerate_transversals(L(Z4)).value.count == 0
    assert enumerate_transversals(L(K4)).value.count == 8


def test_transversals_without_cap_collect_nothing():
    res = enumerate_transversals(L(K4))
    assert res.witnesses is None


# --------------------------------------------------------------------------
# partitions against the oracle


@pytest.mark.parametrize("grid,expected", [(Z3, 1), (Z4, 0), (K4, 2)])
def test_partition_counts(grid, expected):
    res = count_transversal_partitions(L(grid))
    assert res.value.count == expected
    assert res.exact_flag


def test_partitions_match_oracle_exactly():
    res = count_transversal_partitions(L(K4), SearchOptions(cap=10))
    expected = oracles.transversal_partitions(K4)
    got = {frozenset(frozenset(part) for part in w) for w in res.witnesses}
    assert got == {frozenset(p) for p in expected}


def test_partition_witnesses_are_partitions():
    res = count_transversal_partitions(L(K4), SearchOptions(cap=10))
    for w in res.witnesses:
        cells = [c for part in w for c in part]
        assert len(cells) == 16 and len(set(cells)) == 16
        for part in w:
            assert len({i for i, _ in part}) == 4
            assert len({j for _, j in part}) == 4
            assert len({K4[i][j] for i, j in part}) == 4


# --------------------------------------------------------------------------
# mates: engine == factorial identity == oracle == direct engine


@pytest.mark.parametrize("grid", [Z3, Z4, K4])
def test_mates_three_ways(grid):
    n = len(grid)
    engine = count_mates(L(grid)).value.count
    brute = len(oracles.mates(grid))
    parts = count_transversal_partitions(L(grid)).value.count
    import math

    assert engine == brute == parts * math.factorial(n)
    assert gerechte_mates_direct(L(grid)) == engine


def test_mate_witnesses_verify():
    res = count_mates(L(Z3), SearchOptions(cap=6))
    assert res.value.count == 6
    assert len(res.witnesses) == 6
    for col in res.witnesses:
        mate = L([list(col[i * 3 : (i + 1) * 3]) for i in range(3)])
        assert check_orthogonal(L(Z3), mate)
    # lexicographic order of flattened mates
    assert list(res.witnesses) == sorted(res.witnesses)


# --------------------------------------------------------------------------
# the extension engine against brute force


def test_extension_columns_equal_brute_force_mates():
    sys = validate_mols([L(Z3)], partition_rows(3))
    noa = system_to_noa(sys)
    cols = list(iter_extensions(noa))
    expected = {
        tuple(x for row in m for x in row) for m in oracles.mates(Z3)
    }
    assert set(cols) == expected
    assert cols == sorted(cols)


def test_extensions_respect_gerechte_partition():
    base = validate_mols([], partition_boxes(4))
    noa = system_to_noa(base)
    res = count_extensions(noa)
    assert res.value.count == 288
    squares = oracles.brute_latin_squares(4)
    labels = [(i // 2) * 2 + (j // 2) for i in range(4) for j in range(4)]
    brute = [s for s in squares if oracles.gerechte(s, labels)]
    assert len(brute) == 288


def test_count_extensions_matches_with_column_validation():
    # every reported extension column must re-validate
    sys = validate_mols([L(Z3)], partition_rows(3))
    noa = system_to_noa(sys)
    for col in iter_extensions(noa):
        noa.with_column(col)  # raises on any engine bug


# --------------------------------------------------------------------------
# chained counts


@pytest.mark.parametrize(
    "n,k,expected",
    [
        (1, 1, 1),
        (2, 1, 2),
        (3, 1, 12),
        (4, 1, 576),
        (3, 2, 72),
        (4, 2, 6912),
        (4, 3, 165888),
        (2, 2, 0),  # k > n-1
        (3, 0, 1),
    ],
)
def test_count_mols_values(n, k, expected):
    assert count_mols(n, k).value.count == expected


def test_count_mols_matches_oracle_small():
    assert count_mols(3, 2).value.count == oracles.mols_tuples(3, 2)
    squares4 = oracles.brute_latin_squares(4)
    assert count_mols(4, 1).value.count == len(squares4)


def test_direct_engine_agrees():
    for n in range(1, 5):
        assert count_latin_direct(n) == count_mols(n, 1).value.count
    assert count_mols_direct(4, 2) == 6912
    assert count_mols_direct(3, 2) == 72
    assert count_mols_direct(5, 0) == 1
    assert count_latin_direct(5) == 161280
    with pytest.raises(LimitExceeded):
        count_mols_direct(5, 2)


def test_count_sudoku_direct():
    assert count_sudoku_direct(4) == 288
    assert count_sudoku_direct(1) == 1


# --------------------------------------------------------------------------
# determinism, thresholds, caps, parallelism


def test_parallel_equals_sequential():
    seq = count_mates(L(K4))
    par = count_mates(L(K4), SearchOptions(parallel=True, threads=3))
    assert par.value == seq.value
    assert par.exact_flag and seq.exact_flag

    seqw = enumerate_transversals(L(K4), SearchOptions(cap=5))
    parw = enumerate_transversals(
        L(K4), SearchOptions(cap=5, parallel=True, threads=3)
    )
    assert seqw.witnesses == parw.witnesses
    assert seqw.value == parw.value


def test_threshold_reports_exactly_threshold():
    for threads in (None, 3):
        opts = SearchOptions(
            stop_threshold=10,
            parallel=threads is not None,
            threads=threads,
        )
        res = count_mates(L(K4), opts)
        assert res.value.count == 10
        assert not res.exact_flag


def test_threshold_above_total_is_exact():
    res = count_mates(L(K4), SearchOptions(stop_threshold=100))
    assert res.value.count == 48
    assert res.exact_flag


def test_threshold_with_witnesses_truncates():
    res = count_mates(L(K4), SearchOptions(stop_threshold=10, cap=48))
    assert res.value.count == 10
    assert not res.exact_flag
    assert len(res.witnesses) <= 10


def test_cap_truncates_witnesses_but_not_count():
    res = count_mates(L(K4), SearchOptions(cap=7))
    assert res.value.count == 48
    assert res.exact_flag
    assert len(res.witnesses) == 7
    full = count_mates(L(K4), SearchOptions(cap=48))
    assert res.witnesses == full.witnesses[:7]


# --------------------------------------------------------------------------
# system iteration, maximisation, census


def test_iter_mols_systems():
    systems = list(iter_mols_systems(3, 2))
    assert len(systems) == 72
    for sys in systems[:5]:
        assert sys.k == 2
    assert list(iter_mols_systems(2, 2)) == []


def test_max_extensions_small():
    res, witness = max_extensions(3, 1)
    assert res.value.count == 6
    assert witness is not None and witness.k == 1
    # the lexicographically first 1-system achieving 6 is the cyclic table
    assert witness.squares[0].grid == tuple(tuple(r) for r in Z3)

    res0, w0 = max_extensions(3, 0)
    assert res0.value.count == 12
    assert w0 is not None and w0.k == 0


def test_max_extensions_matches_census():
    census = extension_census(partition_rows(3), 1)
    assert census[0] == {12: 1}
    assert census[1] == {6: 12}
    res, _ = max_extensions(3, 1)
    assert res.value.count == max(census[1])


def test_census_sudoku():
    census = extension_census(partition_boxes(4), 1)
    assert census[0] == {288: 1}
    assert set(census[1]) == {0, 24}
    assert sum(census[1].values()) == 288
    assert sum(c * m for c, m in census[1].items()) == 2304


def test_census_symbol_classes_order3():
    p = partition_from_square(Square(Z3))
    census = extension_census(p, 1)
    assert census[0] == {6: 1}
    assert census[1] == {0: 6}


# --------------------------------------------------------------------------
# limits


def test_order_limits(monkeypatch):
    with pytest.raises(LimitExceeded):
        count_mols(6, 1)
    with pytest.raises(LimitExceeded):
        max_extensions(5, 1)
    monkeypatch.setenv("MOLSCOPE_LIMIT_N", "3")
    with pytest.raises(LimitExceeded):
        count_mols(4, 1)
    with pytest.raises(LimitExceeded):
        enumerate_transversals(L(Z4))
    assert count_mols(3, 1).value.count == 12
    monkeypatch.setenv("MOLSCOPE_LIMIT_N", "bogus")
    with pytest.raises(InvalidParams):
        count_mols(3, 1)


def test_invalid_search_params():
    with pytest.raises(InvalidParams):
        count_mols(0, 1)
    with pytest.raises(InvalidParams):
        count_mols(3, -1)
    with pytest.raises(InvalidParams):
        extension_census(partition_rows(3), -1)


# --------------------------------------------------------------------------
# direct-engine iteration sanity


def test_iter_latin_direct_lexicographic_and_latin():
    grids = list(iter_latin_direct(3))
    assert len(grids) == 12
    flat = [tuple(x for row in g for x in row) for g in grids]
    assert flat == sorted(flat)
    for g in grids:
        assert oracles.is_latin(g)


def test_order4_mate_distribution():
    # order-4 mate counts take exactly the values 0 and 48
    values = {}
    squares = [validate_latin(Square(g)) for g in iter_latin_direct(4)]
    for l in squares:
        m = count_mates(l).value.count
        values[m] = values.get(m, 0) + 1
    assert values == {0: 432, 48: 144}
    # the independent direct engine agrees on a sample
    for l in squares[:12] + squares[-12:]:
        assert gerechte_mates_direct(l) == count_mates(l).value.count
