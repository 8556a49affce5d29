"""Tests for lift certificates and the lower-bound sequence machinery."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sierpack._data import MissingData, load_coloring, load_graph, load_map
from sierpack.certify import (
    CERTIFIED,
    EMPIRICAL,
    REFUTED,
    BaseTooSmall,
    BoundSequence,
    CornerColorMismatch,
    InvalidBlockColoring,
    boundary_profile,
    build_k4e_eleven_coloring,
    certify_generalized_tiling,
    certify_triangle_tiling,
    lower_bound_closed_form,
    lower_bound_sequence,
    monotonicity_check,
    tile_coloring,
)
from sierpack.graph_core import all_pairs_distances, bfs_distances
from sierpack.packing import max_color, verify_packing_coloring
from sierpack.sierpinski import (
    UnknownName,
    base_graph_library,
    extreme_vertices,
    gen_generalized,
    gen_triangle,
)

C4 = base_graph_library("C4")
K13 = base_graph_library("K13")
K4E = base_graph_library("K4E")


# ------------------------------------------------------------------ profiles


def test_boundary_profile_matches_bfs():
    g = gen_generalized(2, C4)
    dm = all_pairs_distances(g)
    prof = boundary_profile(dm, extreme_vertices("generalized", 2, C4))
    for lab in g.labels:
        for e, got in zip(prof.extremes, prof.to_extreme[lab]):
            assert got == bfs_distances(g, e)[lab]
    assert prof.d_min > 0
    assert prof.d_min == min(prof.between.values())


def test_triangle_profile_corner_distances():
    # corners of the dimension-m triangle block are pairwise 2^m apart
    for m in (1, 2, 3):
        dm = all_pairs_distances(gen_triangle(m))
        prof = boundary_profile(dm, extreme_vertices("triangle", m))
        assert set(prof.between.values()) == {2 ** m}


# ------------------------------------------------------------------- tiling


def test_tiled_c4_block_verifies_one_dimension_up():
    block = load_coloring("fig5_s3c4.coloring")
    tiled = tile_coloring("generalized", 3, block, 4, base=C4)
    g = gen_generalized(4, C4)
    assert verify_packing_coloring(g, tiled).ok
    assert max_color(tiled) == 5


def test_tiled_k13_block_verifies_two_dimensions_up():
    block = load_coloring("fig7_s2k13.coloring")
    tiled = tile_coloring("generalized", 2, block, 4, base=K13)
    g = gen_generalized(4, K13)
    assert verify_packing_coloring(g, tiled).ok
    assert max_color(tiled) == 3


def test_tile_restricts_to_block_on_every_copy():
    block = load_coloring("fig7_s2k13.coloring")
    tiled = tile_coloring("generalized", 2, block, 3, base=K13)
    for prefix in "0123":
        for word, color in block.items():
            assert tiled[prefix + word] == color


def test_triangle_tile_unequal_corners_rejected():
    block = {"00": 1, "01": 2, "02": 3, "11": 1, "12": 4, "22": 2}
    with pytest.raises(CornerColorMismatch):
        tile_coloring("triangle", 1, block, 2)


def test_triangle_tile_colors_identified_corners_once():
    block = load_coloring("fig13_st1.coloring")
    tiled = tile_coloring("triangle", 1, block, 2)
    g = gen_triangle(2)
    assert set(tiled) == set(g.labels)
    # junction 011 is corner 11 of block 0 and corner 00 of block 1; both
    # block corners carry color 1, so the identified vertex gets it too
    assert tiled["011"] == 1


def test_tile_rejects_partial_and_invalid_blocks():
    block = load_coloring("fig7_s2k13.coloring")
    partial = dict(block)
    del partial["00"]
    with pytest.raises(InvalidBlockColoring):
        tile_coloring("generalized", 2, partial, 3, base=K13)
    clashing = dict(block)
    clashing["00"] = 3  # second 3 within the block, too close to 11
    with pytest.raises(InvalidBlockColoring):
        tile_coloring("generalized", 2, clashing, 3, base=K13)


def test_tile_usage_errors():
    block = load_coloring("fig13_st1.coloring")
    with pytest.raises(ValueError):
        tile_coloring("triangle", 1, block, 0)
    with pytest.raises(UnknownName):
        tile_coloring("ring", 1, block, 2)
    with pytest.raises(UnknownName):
        tile_coloring("generalized", 1, block, 2)  # base graph missing


# ------------------------------------------------------------- certificates


def test_refined_certificate_c4_block():
    report = certify_generalized_tiling(C4, 3, load_coloring("fig5_s3c4.coloring"))
    assert report.status == CERTIFIED
    assert report.max_dimension == 5
    assert all(report.margin(c) >= 1 for c in report.margins)


def test_refined_certificate_k13_block():
    report = certify_generalized_tiling(K13, 2, load_coloring("fig7_s2k13.coloring"))
    assert report.status == CERTIFIED
    # color 3 is tight: nearest 3 sits one step from each hub extreme
    assert report.margin(3) == 1


def test_conservative_mode_loses_the_c4_block():
    report = certify_generalized_tiling(
        C4, 3, load_coloring("fig5_s3c4.coloring"), mode="conservative")
    assert report.status == EMPIRICAL
    assert report.max_dimension == 5
    # both 3-colored extremal neighbours collapse to bound 1+1+1 = 3
    assert report.margins[3]["cross"] == 0


def test_certificate_without_backstop_keeps_structural_result():
    report = certify_generalized_tiling(
        C4, 3, load_coloring("fig5_s3c4.coloring"), empirical_depth=0)
    assert report.status == CERTIFIED
    assert report.max_dimension == 3


def test_triangle_block_with_center_eight_is_refuted():
    block = load_coloring("fig14_st2.coloring")
    report = certify_triangle_tiling(2, block)
    assert report.status == REFUTED
    # the center cannot support 8: both corner distances are 2, 2+2 < 9
    assert report.margins[8]["corner_sum"] < 1
    # the reported violation really happens on the tiled graph
    n = report.refuted_dimension
    color, u, v, dist = report.violation
    tiled = tile_coloring("triangle", 2, block, n)
    assert tiled[u] == tiled[v] == color
    assert bfs_distances(gen_triangle(n), u)[v] == dist <= color


def test_small_triangle_block_is_refuted_when_tiled():
    report = certify_triangle_tiling(1, load_coloring("fig13_st1.coloring"))
    assert report.status == REFUTED
    assert report.refuted_dimension == 2
    assert report.max_dimension == 1


def test_triangle_corner_mismatch_raised_before_validity():
    block = {"00": 1, "01": 2, "02": 4, "11": 1, "12": 3, "22": 2}
    with pytest.raises(CornerColorMismatch):
        certify_triangle_tiling(1, block)


def test_certificate_report_text_shape():
    report = certify_generalized_tiling(K13, 2, load_coloring("fig7_s2k13.coloring"))
    lines = report.text_report().splitlines()
    assert lines[0].startswith("status CERTIFIED")
    assert lines[1:] == [f"color {c} margin {report.margin(c)}"
                        for c in sorted(report.margins)]


def test_refined_cross_bound_is_admissible():
    # the certificate's cross-block bound must never exceed true distance
    block = load_coloring("fig7_s2k13.coloring")
    m, g = 2, K13
    small = gen_generalized(m, g)
    dm = all_pairs_distances(small)
    letters = "0123"
    prof = boundary_profile(dm, [x * m for x in letters])
    base_edges = {frozenset((str(x), str(y))) for x, y in g.edges}

    def cross(u, v):
        best = None
        for xi, x in enumerate(letters):
            for yi, y in enumerate(letters):
                hop = 1 if frozenset((x, y)) in base_edges else 2 + prof.d_min
                b = prof.to_extreme[u][xi] + hop + prof.to_extreme[v][yi]
                best = b if best is None or b < best else best
        return best

    for n in (m + 1, m + 2):
        big = gen_generalized(n, g)
        dist = all_pairs_distances(big)
        labels = big.labels
        for i in range(0, len(labels), 7):
            for j in range(1, len(labels), 13):
                u, v = labels[i], labels[j]
                if u[:n - m] == v[:n - m]:
                    continue  # same block: bound does not apply
                assert dist.distance(u, v) >= cross(u[n - m:], v[n - m:])


def test_eleven_coloring_verifies_with_max_eleven():
    coloring = build_k4e_eleven_coloring()
    g = gen_generalized(5, K4E)
    assert set(coloring) == set(g.labels)
    assert verify_packing_coloring(g, coloring).ok
    assert max_color(coloring) == 11


# ------------------------------------------------------------- shipped data


def test_shipped_colorings_all_verify():
    cases = [
        ("fig5_s3c4.coloring", gen_generalized(3, C4), 5),
        ("fig7_s2k13.coloring", gen_generalized(2, K13), 3),
        ("fig10_s2k4e.coloring", gen_generalized(2, K4E), 6),
        ("fig11_s3k4e.coloring", gen_generalized(3, K4E), 8),
        ("fig13_st1.coloring", gen_triangle(1), 4),
        ("fig14_st2.coloring", gen_triangle(2), 8),
    ]
    for name, graph, top in cases:
        coloring = load_coloring(name)
        report = verify_packing_coloring(graph, coloring)
        assert report.ok, (name, report.violations[:3])
        assert max_color(coloring) == top, name


def test_shipped_partial_tile_has_six_open_positions():
    tile = load_coloring("fig12_s4k4e.coloring")
    g = gen_generalized(4, K4E)
    report = verify_packing_coloring(g, tile)
    assert not report.violations
    assert report.uncolored == ["1111", "1131", "1313", "3111", "3131", "3311"]


def test_missing_data_file_raises():
    with pytest.raises(MissingData):
        load_coloring("no_such_file.coloring")
    assert load_graph("h.graph").n == 22
    assert len(load_map("hprime_into_s2c4.map").pairs) == 8


# ------------------------------------------------------------- bound series


def test_sequence_starts_at_k():
    for k in range(4, 11):
        assert lower_bound_sequence(k, 1).values == (k,)


def test_known_terms_base_four_and_five():
    assert lower_bound_sequence(4, 4).values == (4, 10, 22, 46)
    assert lower_bound_sequence(5, 2).term(2) == 17


def test_closed_form_examples():
    assert lower_bound_closed_form(4, 1) == 4
    assert lower_bound_closed_form(4, 3) == 22
    assert lower_bound_closed_form(5, 2) == lower_bound_sequence(5, 2).term(2)


def test_closed_form_matches_recurrence_everywhere():
    for k in range(4, 11):
        seq = lower_bound_sequence(k, 30)
        for n in range(1, 31):
            assert lower_bound_closed_form(k, n) == seq.term(n), (k, n)


def test_base_four_terms_follow_doubling_pattern():
    # independent cross-check: for k=4 the closed form collapses to 3*2^n - 2
    seq = lower_bound_sequence(4, 20)
    for n in range(1, 21):
        assert seq.term(n) == 3 * 2 ** n - 2


def test_literal_recurrence_variant_is_smaller():
    assert lower_bound_sequence(4, 4, literal=True).values == (4, 7, 7, -17)
    for k in (4, 7, 10):
        canonical = lower_bound_sequence(k, 12).values
        literal = lower_bound_sequence(k, 12, literal=True).values
        assert literal[0] == canonical[0]
        assert all(l < c for l, c in zip(literal[1:], canonical[1:]))


def test_monotonicity_holds_for_all_supported_bases():
    for k in range(4, 11):
        assert monotonicity_check(k, 20)
    assert monotonicity_check(5, 1)  # vacuous


def test_small_bases_rejected():
    for fn in (lambda: lower_bound_sequence(3, 5),
               lambda: lower_bound_closed_form(2, 5),
               lambda: monotonicity_check(3, 5)):
        with pytest.raises(BaseTooSmall):
            fn()


@given(st.integers(min_value=4, max_value=10), st.integers(min_value=2, max_value=40))
@settings(max_examples=60, deadline=None)
def test_recurrence_step_identity(k, n):
    seq = lower_bound_sequence(k, n)
    a_prev, a_next = seq.term(n - 1), seq.term(n)
    assert a_next == k * a_prev - 2 ** n * (k - 1) + 2 * (k - 1)


def test_sequence_type_round_trip():
    seq = lower_bound_sequence(6, 5)
    assert isinstance(seq, BoundSequence)
    assert seq.k == 6
    assert len(seq.values) == 5
    assert seq.term(1) == seq.values[0]
