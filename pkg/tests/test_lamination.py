"""Normal-coordinate laminations: decoding, transport and intersections.

Expected weight vectors and intersection numbers were worked out by hand on
the reference triangulations (drawing the strands triangle by triangle) and
are frozen here; the annulus cases are cross-checked against the
independent winding-number oracle.
"""

import json

import pytest

from openbook_lab.lamination import (ARC, CLOSED, HomologyClass, Lamination,
                                     Terminal, algebraic_intersection,
                                     classify, curve_around, disjoint,
                                     edge_marker, from_weights, homology_class,
                                     intersection_number, is_isotopic,
                                     standard_arc, standard_curve,
                                     transport_flip)
from openbook_lab.surface import standard_triangulation

from oracles import annulus_intersection

REF1 = standard_triangulation(1)
REF2 = standard_triangulation(2)
REF3 = standard_triangulation(3)

# Edge ids on the reference triangulations, for readability: the disk with
# one hole has boundary edges 0 and 1, the spanning edge 2 and the return
# edge 3; each later stage t adds its boundary edge 5t-6 and interior
# edges s=5t-5, g1=5t-4, g2=5t-3, g3=5t-2.


def vec(base, entries):
    w = [0] * base.num_edges
    for e, v in entries.items():
        w[e] = v
    return tuple(w)


def curve_around_1_and_3():
    return curve_around(3, {1, 3})


# -- decoding ------------------------------------------------------------------


class TestFromWeights:
    def test_annulus_core(self):
        lam = from_weights(REF1, (0, 0, 1, 1))
        assert lam.kind == CLOSED
        assert lam.enclosed_holes == frozenset((1,))
        assert lam.essential is False  # parallel to the inner circle
        assert lam.homologically_essential is True
        assert lam.endpoints is None

    def test_closed_vectors_carry_no_loop_arc(self):
        # A loop arc leaves its basepoint through a single corner, crossing
        # the opposite edge twice; neither curve vector here has a weight-2
        # edge in the right place, so forcing an arc reading fails.
        with pytest.raises(ValueError, match="no single essential"):
            from_weights(REF1, (0, 0, 1, 1), kind=ARC)
        w = vec(REF2, {2: 1, 3: 1, 5: 2, 6: 1, 7: 1, 8: 1})
        assert from_weights(REF2, w).kind == CLOSED
        with pytest.raises(ValueError, match="no single essential"):
            from_weights(REF2, w, kind=ARC)

    def test_spanning_arc(self):
        lam = from_weights(REF1, (0, 0, 1, 0))
        assert lam.kind == ARC
        assert lam.endpoints == (0, 1)
        assert lam.terminals == (Terminal(0, 2, 0), Terminal(1, 0, 0))

    def test_empty_vector(self):
        with pytest.raises(ValueError, match="empty"):
            from_weights(REF1, (0, 0, 0, 0))

    def test_two_parallel_cores(self):
        with pytest.raises(ValueError, match="multiple components"):
            from_weights(REF1, (0, 0, 2, 2))

    def test_inconsistent_corner_counts(self):
        with pytest.raises(ValueError, match="inconsistent corner counts"):
            from_weights(REF1, (0, 0, 1, 3))

    def test_odd_parity_rejected_as_closed(self):
        with pytest.raises(ValueError, match="endpoints"):
            from_weights(REF1, (0, 0, 1, 0), kind=CLOSED)

    def test_boundary_weight(self):
        with pytest.raises(ValueError, match="boundary edge"):
            from_weights(REF1, (1, 0, 1, 0))

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="expected 4 weights"):
            from_weights(REF1, (0, 0, 1))

    def test_non_integer_weight(self):
        with pytest.raises(TypeError):
            from_weights(REF1, (0, 0, 1.0, 0))
        with pytest.raises(TypeError):
            from_weights(REF1, (0, 0, True, 0))

    def test_marker_encoding(self):
        assert from_weights(REF1, (0, 0, -1, 0)) == edge_marker(REF1, 2)
        with pytest.raises(ValueError, match="negative"):
            from_weights(REF1, (0, 0, -1, 1))
        with pytest.raises(ValueError, match="negative"):
            from_weights(REF1, (0, 0, -2, 0))
        with pytest.raises(ValueError, match="arc"):
            from_weights(REF1, (0, 0, -1, 0), kind=CLOSED)

    def test_marker_on_boundary_edge(self):
        with pytest.raises(ValueError, match="isotopic into the boundary"):
            from_weights(REF1, (-1, 0, 0, 0))

    def test_bad_kind(self):
        with pytest.raises(ValueError, match="kind"):
            from_weights(REF1, (0, 0, 1, 1), kind="curve")

    def test_loop_arc_around_second_hole(self):
        # The loop based at the outer marked point that dives past the
        # second circle's pocket mouth and wraps the hole inside.
        w = vec(REF2, {5: 2, 6: 1, 7: 1})
        loop = from_weights(REF2, w, kind=ARC)
        assert loop.endpoints == (0, 0)
        assert loop.enclosed_holes == frozenset((2,))
        assert loop.essential
        # kind=None reaches the same arc: no closed curve fits this vector.
        assert from_weights(REF2, w) == loop


class TestEdgeMarker:
    def test_spanning_marker(self):
        lam = edge_marker(REF1, 2)
        assert lam.kind == ARC
        assert lam.edge_parallel == 2
        assert lam.weights == (0, 0, 0, 0)
        assert lam.endpoints == (0, 1)
        assert lam.essential and lam.homologically_essential

    def test_loop_marker(self):
        lam = edge_marker(REF2, 5)  # the loop edge cutting off stage 2
        assert lam.endpoints == (1, 1)
        assert lam.enclosed_holes == frozenset((2,))
        assert lam.homologically_essential is False

    def test_boundary_marker_rejected(self):
        with pytest.raises(ValueError, match="isotopic into the boundary"):
            edge_marker(REF1, 0)

    def test_unknown_edge(self):
        with pytest.raises(ValueError, match="no edge"):
            edge_marker(REF1, 9)


# -- standard positions --------------------------------------------------------


class TestStandardArc:
    def test_adjacent_pairs_are_markers(self):
        assert standard_arc(1, 0, 1) == edge_marker(REF1, 2)
        assert standard_arc(2, 1, 2) == edge_marker(REF2, 6)
        assert standard_arc(3, 2, 3) == edge_marker(REF3, 11)

    def test_argument_order_is_irrelevant(self):
        assert standard_arc(2, 2, 0) == standard_arc(2, 0, 2)

    def test_dodge_one_hole(self):
        lam = standard_arc(2, 0, 2)
        assert lam.weights == vec(REF2, {5: 1})
        assert lam.endpoints == (0, 2)
        assert lam.essential

    def test_arc_past_one_circle(self):
        lam = standard_arc(3, 1, 3)
        assert lam.weights == vec(REF3, {10: 1, 7: 1})
        assert lam.endpoints == (1, 3)
        # Detouring on the other side of circle 2 costs an extra strand and
        # gives a genuinely different arc class.
        detour = from_weights(REF3, vec(REF3, {6: 1, 13: 1, 10: 1}), kind=ARC)
        assert detour.endpoints == (1, 3)
        assert not is_isotopic(lam, detour)

    def test_long_arc(self):
        lam = standard_arc(4, 0, 4)
        assert lam.weights == vec(standard_triangulation(4),
                                  {5: 1, 10: 1, 15: 1, 7: 1, 12: 1})
        assert lam.endpoints == (0, 4)

    def test_errors(self):
        with pytest.raises(ValueError, match="distinct"):
            standard_arc(2, 1, 1)
        with pytest.raises(ValueError, match="no boundary circle"):
            standard_arc(2, 0, 3)


class TestStandardCurve:
    def test_annulus_core(self):
        lam = standard_curve(1, {1})
        assert lam.weights == (0, 0, 1, 1)

    def test_single_holes(self):
        assert standard_curve(2, {1}).weights == vec(
            REF2, {2: 1, 3: 1, 5: 2, 6: 1, 7: 1, 8: 1})
        assert standard_curve(2, {2}).weights == vec(REF2, {6: 1, 7: 1})

    def test_pair(self):
        lam = standard_curve(2, {1, 2})
        assert lam.weights == vec(REF2, {2: 1, 3: 1, 8: 1})
        assert lam.enclosed_holes == frozenset((1, 2))
        assert lam.essential is False  # parallel to the outer circle

    def test_adjacent_pair_with_deeper_pocket(self):
        # Holes {1, 2} of three: the walk turns around circle 2 and must
        # still dip past the mouth of the third pocket.
        lam = standard_curve(3, {1, 2})
        assert lam.weights == vec(
            REF3, {2: 1, 3: 1, 5: 2, 7: 2, 8: 1, 10: 2, 11: 1, 12: 1})
        assert lam.enclosed_holes == frozenset((1, 2))
        assert lam.essential

    def test_full_set_is_outer_parallel(self):
        lam = standard_curve(3, {1, 2, 3})
        assert lam.weights == vec(REF3, {2: 1, 3: 1, 8: 1})
        assert lam.essential is False

    def test_wrap_run(self):
        # A run reaching the deepest circle encloses a whole pocket, so the
        # curve wraps its mouth without any rim crossings.
        lam = standard_curve(3, {2, 3})
        assert lam.weights == vec(REF3, {6: 1, 7: 1, 13: 1})
        assert lam.enclosed_holes == frozenset((2, 3))
        assert lam.essential

    def test_scattered_set(self):
        # Splitting around the skipped circle costs a full extra pass, so
        # the curve is much heavier than its consecutive cousins.
        lam = curve_around(3, {1, 3})
        assert lam.weights == vec(REF3, {2: 1, 3: 1, 5: 2, 6: 1, 7: 1, 8: 1,
                                         10: 2, 11: 1, 12: 1, 13: 1})
        assert lam.enclosed_holes == frozenset((1, 3))
        assert lam.essential

    def test_every_hole_set_decodes_to_itself(self):
        # curve_around asserts its own decode, so building is the check.
        for n in (4, 5):
            for bits in range(1, 1 << n):
                holes = {h for h in range(1, n + 1) if bits >> (h - 1) & 1}
                lam = curve_around(n, holes)
                assert lam.enclosed_holes == frozenset(holes)

    def test_errors(self):
        with pytest.raises(ValueError, match="null-homotopic"):
            standard_curve(2, set())
        with pytest.raises(ValueError, match="subset"):
            standard_curve(2, {0, 1})
        with pytest.raises(ValueError, match="subset"):
            curve_around(2, {3})
        with pytest.raises(ValueError, match="scattered"):
            standard_curve(3, {1, 3})


# -- transport under flips -----------------------------------------------------


class TestTransport:
    def test_quad_relation_on_inner_loop(self):
        # Around the flipped edge the square reads weights a=b=c=d=1 with
        # diagonal 2; the other diagonal then carries max(a+c, b+d) - 2 = 0.
        curve = standard_curve(2, {1})
        moved = transport_flip(curve, 5)
        assert moved.weights == vec(moved.base, {2: 1, 3: 1, 6: 1, 7: 1, 8: 1})
        assert moved.enclosed_holes == frozenset((1,))

    def test_double_flip_restores_weights(self):
        for lam in (standard_curve(2, {1}), standard_curve(2, {1, 2}),
                    standard_arc(2, 0, 2), edge_marker(REF2, 6)):
            back = transport_flip(transport_flip(lam, 6), 6)
            assert back.weights == lam.weights
            assert back.edge_parallel == lam.edge_parallel
            assert back.base.canonical_form() == lam.base.canonical_form()

    def test_reverse_transport_is_exact(self):
        for lam in (standard_curve(2, {1}), standard_arc(2, 0, 2),
                    edge_marker(REF2, 5),
                    from_weights(REF2, vec(REF2, {5: 2, 6: 1, 7: 1}), kind=ARC)):
            for e in REF2.interior_edges():
                square = REF2.flip(e)
                assert lam.transport(square).transport(square, reverse=True) == lam

    def test_marker_crosses_after_flip(self):
        marker = edge_marker(REF1, 2)
        square = REF1.flip(2)
        moved = marker.transport(square)
        assert moved.edge_parallel is None
        assert moved.weights[2] == 1 and moved.total_weight == 1
        assert moved.endpoints == (0, 1)
        assert moved.transport(square, reverse=True) == marker

    def test_unrelated_marker_only_changes_base(self):
        marker = edge_marker(REF2, 8)
        moved = transport_flip(marker, 5)
        assert moved.edge_parallel == 8
        assert moved.base == REF2.flip(5).after

    def test_arc_becomes_marker(self):
        # The hole-dodging arc runs corner to corner through the flipped
        # square, so one flip straightens it onto the new diagonal.
        moved = transport_flip(standard_arc(2, 0, 2), 5)
        assert moved.edge_parallel == 5
        assert moved.weights == (0,) * 9

    def test_annulus_arc_under_flip(self):
        # Flipping the spanning edge replaces it by its reflection, and the
        # arc one rung out now crosses the new edge twice.
        arc = from_weights(REF1, (0, 0, 1, 0))
        moved = transport_flip(arc, 2)
        assert moved.edge_parallel == 2
        far = transport_flip(from_weights(REF1, (0, 0, 0, 1)), 2)
        assert far.weights == (0, 0, 2, 1)

    def test_wrong_base(self):
        square = REF2.flip(5)
        with pytest.raises(ValueError, match="source"):
            standard_curve(3, {1}).transport(square)

    def test_classification_survives_flips(self):
        lam = curve_around_1_and_3()
        for e in (5, 7, 10, 12):
            lam = transport_flip(lam, e)
        assert lam.kind == CLOSED
        assert lam.enclosed_holes == frozenset((1, 3))
        assert homology_class(lam) == HomologyClass((1, 0, 1))


# -- intersections -------------------------------------------------------------


def annulus_arcs():
    # Arcs from the outer to the inner marked point, labelled by how far
    # they wind relative to the two triangulation edges.
    return {-2: from_weights(REF1, (0, 0, 1, 0)),
            -1: edge_marker(REF1, 3),
            0: edge_marker(REF1, 2),
            1: from_weights(REF1, (0, 0, 0, 1))}


class TestIntersectionNumber:
    def test_annulus_family_matches_oracle(self):
        arcs = annulus_arcs()
        for j, a in arcs.items():
            for k, b in arcs.items():
                expected = annulus_intersection(j, k)
                assert intersection_number(a, b) == expected, (j, k)
                assert disjoint(a, b) == (expected == 0)

    def test_self_intersection_is_zero(self):
        assert intersection_number(standard_curve(2, {1}),
                                   standard_curve(2, {1})) == 0

    def test_arc_against_curves(self):
        arc = standard_arc(2, 0, 2)
        assert intersection_number(arc, standard_curve(2, {1})) == 0
        assert intersection_number(arc, standard_curve(2, {2})) == 1
        assert intersection_number(arc, standard_curve(2, {1, 2})) == 1
        assert intersection_number(standard_curve(2, {1, 2}), arc) == 1

    def test_marker_reads_weight_directly(self):
        assert intersection_number(edge_marker(REF2, 2),
                                   standard_curve(2, {1})) == 1
        assert intersection_number(edge_marker(REF2, 2),
                                   standard_curve(2, {2})) == 0

    def test_disjoint_standard_arcs(self):
        assert intersection_number(standard_arc(2, 0, 1),
                                   standard_arc(2, 1, 2)) == 0
        assert disjoint(standard_arc(2, 0, 1), standard_arc(2, 1, 2))

    def test_nested_curves_are_disjoint(self):
        assert disjoint(standard_curve(2, {1}), standard_curve(2, {2}))
        assert disjoint(standard_curve(2, {1}), standard_curve(2, {1, 2}))

    def test_closed_closed_unsupported(self):
        with pytest.raises(NotImplementedError):
            intersection_number(standard_curve(2, {1}), standard_curve(2, {2}))

    def test_different_bases_rejected(self):
        moved = transport_flip(standard_curve(2, {1}), 5)
        with pytest.raises(ValueError, match="different"):
            intersection_number(moved, standard_curve(2, {2}))


class TestAlgebraicIntersection:
    def test_curve_against_arcs(self):
        curve = standard_curve(2, {1})
        assert algebraic_intersection(curve, standard_arc(2, 0, 1)) == 1
        assert algebraic_intersection(curve, standard_arc(2, 0, 2)) == 0
        assert algebraic_intersection(curve, standard_arc(2, 1, 2)) == -1

    def test_closed_closed_pairs_to_zero(self):
        assert algebraic_intersection(standard_curve(2, {1}),
                                      standard_curve(2, {2})) == 0

    def test_needs_closed_first(self):
        with pytest.raises(ValueError, match="closed"):
            algebraic_intersection(standard_arc(2, 0, 1), standard_curve(2, {1}))

    def test_bounded_by_geometric(self):
        arcs = [standard_arc(3, 0, 2), standard_arc(3, 1, 3),
                standard_arc(3, 0, 1)]
        curves = [standard_curve(3, {1}), curve_around_1_and_3(),
                  standard_curve(3, {2, 3})]
        for c in curves:
            for a in arcs:
                assert abs(algebraic_intersection(c, a)) <= intersection_number(a, c)


class TestHomology:
    def test_closed_classes(self):
        assert homology_class(curve_around_1_and_3()) == HomologyClass((1, 0, 1))
        assert homology_class(standard_curve(3, {1, 2, 3})) == HomologyClass((1, 1, 1))

    def test_arc_classes(self):
        assert homology_class(standard_arc(3, 0, 2)) == HomologyClass((0, 1, 0))
        assert homology_class(standard_arc(3, 1, 3)) == HomologyClass((1, 0, -1))

    def test_loop_arc_is_null_homologous(self):
        # A loop returning to its start can be pushed off every hole loop,
        # so its pairing vector vanishes even though the arc is essential.
        loop = from_weights(REF2, vec(REF2, {5: 2, 6: 1, 7: 1}), kind=ARC)
        assert loop.essential
        assert homology_class(loop).is_zero()

    def test_invariant_under_transport(self):
        lam = standard_arc(3, 1, 3)
        h = homology_class(lam)
        for e in (5, 10, 7):
            lam = transport_flip(lam, e)
            assert homology_class(lam) == h

    def test_rejects_large_coefficients(self):
        with pytest.raises(ValueError):
            HomologyClass((2, 0))


# -- value semantics and serialization ------------------------------------------


class TestValueSemantics:
    def test_equality_and_hash(self):
        a = standard_curve(2, {1})
        b = from_weights(REF2, a.weights)
        assert a == b and hash(a) == hash(b)
        assert len({a, b, standard_curve(2, {2})}) == 2

    def test_is_isotopic(self):
        assert is_isotopic(standard_arc(2, 0, 1), edge_marker(REF2, 2))
        assert not is_isotopic(standard_curve(2, {1}), standard_curve(2, {2}))
        moved = transport_flip(standard_curve(2, {1}), 5)
        with pytest.raises(ValueError, match="different"):
            is_isotopic(moved, standard_curve(2, {1}))

    def test_immutable(self):
        lam = standard_curve(2, {1})
        with pytest.raises(AttributeError):
            lam.kind = CLOSED

    def test_classify_record(self):
        rec = classify(standard_arc(2, 0, 2))
        assert rec.kind == ARC
        assert rec.endpoints == (0, 2)
        assert rec.essential and rec.homologically_essential
        assert rec.enclosed_holes is None

    def test_direct_constructor_validates(self):
        with pytest.raises(ValueError, match="terminals"):
            Lamination(REF1, (0, 0, 1, 0), ARC, (Terminal(0, 2, 0),))

    def test_json_round_trip(self):
        for lam in (standard_curve(2, {1, 2}), standard_arc(2, 0, 2),
                    edge_marker(REF2, 5)):
            data = json.loads(lam.dumps())
            assert Lamination.from_json(REF2, data) == lam

    def test_marker_serializes_with_minus_one(self):
        data = edge_marker(REF1, 2).to_json()
        assert data["weights"] == [0, 0, -1, 0]
        assert data["edge_parallel"] == 2
        assert data["kind"] == ARC

    def test_from_json_rejects_stray_weights(self):
        with pytest.raises(ValueError, match="stray"):
            Lamination.from_json(REF1, {"weights": [0, 0, 1, 1],
                                        "edge_parallel": 2})
