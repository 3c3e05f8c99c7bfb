import itertools
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amalgam.diagram import (
    AmalgamationDiagram,
    BlockRow,
    DiagramSyntaxError,
    InvariantError,
    NoAmalgam,
    Unitality,
    amalgam_extensions,
    compositions,
    deficit,
    dimension,
    iter_rows,
    iter_two_row_diagrams,
    min_value,
    parse_diagram,
    refine_to_unital_common,
    render_diagram,
    row_min_value,
    unitality_profile,
)


def D(text):
    return parse_diagram(text)


@st.composite
def rows(draw, n, max_size=7):
    blocks = tuple(draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)))
    slack = draw(st.integers(0, 2))
    return BlockRow(max(2, sum(blocks) + slack), blocks)


@st.composite
def diagrams(draw, n_rows=None):
    n = draw(st.integers(1, 3))
    k = n_rows or draw(st.sampled_from([2, 3]))
    return AmalgamationDiagram(tuple(draw(rows(n)) for _ in range(k)))


# --- parsing -----------------------------------------------------------------------

def test_parse_mixed_example():
    d = D("M3: 1 2 ; M4: 1 2 0")
    assert d.rows == (BlockRow(3, (1, 2)), BlockRow(4, (1, 2)))
    assert not d.rows[0].has_zero_box and d.rows[1].has_zero_box


@pytest.mark.parametrize(
    "text, code",
    [
        ("M3: 2 2 ; M3: 1 1", "sum-exceeds-ambient"),
        ("M3: 1 1 1 ; M3: 1 1", "row-arity-mismatch"),
        ("M3: 1 2 0 ; M3: 1 2", "zero-box-redundant"),
        ("M3: 1 0 1 ; M3: 1 1", "interior-zero-box"),
        ("M1: 1 ; M2: 1 1", "ambient-too-small"),
        ("M9: 9", "row-count"),
        ("M2: 1 1 ; M2: 1 1 ; M2: 1 1 ; M2: 1 1", "row-count"),
        ("M3: 0 ; M3: 3", "empty-row"),
        ("M2 * M1", "ambient-too-small"),
    ],
)
def test_invariant_errors(text, code):
    with pytest.raises(InvariantError) as info:
        parse_diagram(text)
    assert info.value.code == code


@pytest.mark.parametrize(
    "text, column",
    [("M3: 1 x ; M3: 3", 7), ("M3 1 2 ; M3: 3", 4), ("", 1), ("M2: 1 1 ; M2 * M3", 14)],
)
def test_syntax_errors_carry_column(text, column):
    with pytest.raises(DiagramSyntaxError) as info:
        parse_diagram(text)
    assert info.value.column == column
    assert info.value.line == 1


def test_missing_zero_box_is_inferred():
    assert D("M3:1 2;M4:1 2") == D("M3: 1 2 ; M4: 1 2 0")


@pytest.mark.parametrize(
    "text", ["M3: 1 2 ; M4: 1 2 0", "M2 * M3", "M2: 1 1 ; M2: 1 1 ; M2: 1 1", "M2 * M3 * M4"]
)
def test_render_canonical(text):
    assert render_diagram(D(text)) == text


def test_no_amalgam_value():
    assert D("M2 * M3") == NoAmalgam((2, 3))


@given(diagrams())
def test_round_trip(d):
    assert parse_diagram(render_diagram(d)) == d


@given(diagrams(), st.lists(st.sampled_from([" ", "  ", "\t", " \t "]), min_size=64, max_size=64))
def test_whitespace_is_insignificant(d, pads):
    # re-space the canonical text at every token boundary
    tokens = re.findall(r"M\d+|\d+|[:;*]", d.render())
    text = "".join(p + t for p, t in zip(itertools.cycle(pads), tokens))
    assert parse_diagram(text) == d
    assert parse_diagram(render_diagram(parse_diagram(text))) == d


# --- quantities --------------------------------------------------------------------

@pytest.mark.parametrize(
    "text, n",
    [("M3: 1 1 1 ; M3: 1 1 1", 3), ("M2: 2 ; M2: 2", 1), ("M4: 1 3 ; M2: 1 1", 2)],
)
def test_dimension(text, n):
    assert dimension(D(text)) == n


@pytest.mark.parametrize(
    "text, mv",
    [("M3: 1 1 1 ; M3: 1 1 1", 3), ("M4: 1 3 ; M2: 1 1", 2), ("M5: 1 2 0 ; M3: 1 2", 3)],
)
def test_min_value_columnwise(text, mv):
    assert min_value(D(text)) == mv


def test_row_and_column_readings_differ():
    d = D("M2: 1 1 ; M4: 2 2")
    assert min_value(d) == 2
    assert row_min_value(d) == 3


@pytest.mark.parametrize(
    "row, k", [(BlockRow(5, (1, 2)), 2), (BlockRow(3, (1, 2)), 0), (BlockRow(2, (1,)), 1)]
)
def test_deficit(row, k):
    assert deficit(row) == k


def test_unitality_profiles():
    assert unitality_profile(D("M2: 1 1 ; M2: 1 1")).kind is Unitality.ALL
    p = unitality_profile(D("M3: 1 2 ; M4: 1 1 0"))
    assert p.kind is Unitality.MIXED and p.nonunital_rows == (1,)
    assert unitality_profile(D("M2: 1 0 ; M4: 3 0")).kind is Unitality.NONE


@given(st.integers(1, 3).flatmap(rows))
def test_deficit_zero_iff_no_zero_box(r):
    assert (deficit(r) == 0) == (not r.has_zero_box) == r.unital


def _all_unital_two_row(max_size):
    for d in iter_two_row_diagrams(max_size):
        if unitality_profile(d).kind is Unitality.ALL:
            yield d


def test_min_value_never_one_exhaustive():
    checked = 0
    for d in _all_unital_two_row(8):
        checked += 1
        assert min_value(d) != 1
        assert min_value(d) >= dimension(d)
        assert min_value(d) <= min(d.sizes)
    assert checked > 1000


@given(diagrams(n_rows=2))
def test_min_value_bounded_by_sizes(d):
    assert min_value(d) <= min(d.sizes)


# --- refinement --------------------------------------------------------------------

def test_refine_examples():
    refined, _ = refine_to_unital_common(D("M3: 2 0 ; M3: 2 0"))
    assert refined == D("M3: 1 1 1 ; M3: 1 1 1")
    refined, m = refine_to_unital_common(D("M2: 1 0 ; M4: 3 0"))
    assert refined == D("M2: 1 1 ; M4: 3 1")
    assert m.origin == (0, None)
    assert refine_to_unital_common(D("M3: 1 2 ; M4: 1 1 0")) is None


def test_refine_canonical_split():
    refined, m = refine_to_unital_common(D("M5: 4 1 ; M6: 3 3"))
    assert refined.rows[0].blocks == (2, 1, 1, 1)
    assert refined.rows[1].blocks == (1, 1, 1, 3)
    assert m.origin == (0, 0, 0, 1)


@given(diagrams(n_rows=2))
def test_refine_invariants(d):
    out = refine_to_unital_common(d)
    kind = unitality_profile(d).kind
    assert (out is None) == (kind is Unitality.MIXED)
    if out is None:
        return
    refined, m = out
    assert unitality_profile(refined).kind is Unitality.ALL
    assert dimension(refined) >= dimension(d)
    assert len(m.origin) == dimension(refined)
    assert {c for c in m.origin if c is not None} == set(range(dimension(d)))
    # refined columns of each origin are contiguous and sum back to the original blocks
    for c, (a, b) in enumerate(d.columns()):
        idx = [i for i, o in enumerate(m.origin) if o == c]
        assert idx == list(range(idx[0], idx[-1] + 1))
        assert sum(refined.rows[0].blocks[i] for i in idx) == a
        assert sum(refined.rows[1].blocks[i] for i in idx) == b


# --- enumeration -------------------------------------------------------------------

def test_compositions_count():
    for total in range(1, 9):
        for parts in range(1, total + 1):
            got = list(compositions(total, parts))
            assert len(got) == len(set(got))
            expected = [c for c in itertools.product(range(1, total + 1), repeat=parts) if sum(c) == total]
            assert sorted(got) == sorted(expected)


def test_iter_rows_are_valid_and_distinct():
    got = list(iter_rows(5, 2))
    assert len(got) == len(set(got)) == sum(t - 1 for t in range(2, 6))


def _index_labels(row: BlockRow):
    labels = {}
    for c, idx in enumerate(row.index_ranges()):
        for p in idx:
            labels[p] = c
    for p in row.complement_indices():
        labels[p] = None
    return labels


def _amalgam_key(d: AmalgamationDiagram):
    return frozenset(zip(*(tuple(tuple(r) for r in row.index_ranges()) for row in d.rows)))


def _contains(coarse: AmalgamationDiagram, fine: AmalgamationDiagram) -> bool:
    """Every coarse column sits inside one fine column (or both zero boxes) in both rows."""
    for rc, rf in zip(coarse.rows, fine.rows):
        if rc.ambient_size != rf.ambient_size:
            return False
    lab = [_index_labels(r) for r in fine.rows]
    for c in range(coarse.rows[0].n):
        tags = []
        for i, r in enumerate(coarse.rows):
            seen = {lab[i][p] for p in r.index_ranges()[c]}
            if len(seen) != 1:
                return False
            tags.append(seen.pop())
        if len(set(tags)) != 1:
            return False
    # every fine column is covered (coarse amalgam contains the fine one)
    for i, r in enumerate(coarse.rows):
        covered = {p for idx in r.index_ranges() for p in idx}
        if not all(p in covered for p, t in lab[i].items() if t is not None):
            return False
    return True


@pytest.mark.parametrize("text", ["M3: 1 2 ; M3: 2 1", "M3: 2 0 ; M4: 2 0", "M4: 2 2 ; M4: 2 2", "M2: 1 0 ; M3: 1 0"])
def test_amalgam_extensions_brute_force(text):
    d = D(text)
    got = set(amalgam_extensions(d))
    assert d in got
    top, bottom = d.rows
    expected = set()
    for n in range(1, max(d.sizes) + 1):
        for a in iter_rows(top.ambient_size, n):
            for b in iter_rows(bottom.ambient_size, n):
                c = AmalgamationDiagram((a, b))
                if _contains(c, d):
                    expected.add(c)
    # extensions fix one column order; compare the amalgams as sets of index blocks
    assert all(_contains(c, d) for c in got)
    assert len(got) == len({_amalgam_key(c) for c in got})
    assert {_amalgam_key(c) for c in got} == {_amalgam_key(c) for c in expected}
