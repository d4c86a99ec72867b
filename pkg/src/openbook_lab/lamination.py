"""Arcs and simple closed curves as normal coordinates on a triangulation.

A :class:`Lamination` is one properly embedded essential arc or simple
closed curve, recorded by its geometric crossing counts with the edges of a
fixed :class:`~openbook_lab.surface.Triangulation` ("normal coordinates"),
plus endpoint bookkeeping for arcs.  Normal coordinates are injective on
essential classes, so isotopy testing is vector comparison; an arc isotopic
to an interior edge crosses nothing and is kept injective by an explicit
edge-parallel marker, serialized as weight ``-1`` on that edge.

Conventions
-----------
* Boundary edges always carry weight 0: a properly embedded curve meets the
  boundary only at marked points.
* Inside triangle ``t`` the strands split into corner arcs and terminal
  segments.  ``y[i]`` counts arcs cutting off corner ``i`` (crossing sides
  ``i`` and ``i+1``); ``z[c]`` counts segments running from the marked
  point at corner ``c`` across the opposite side ``c+2``.  They satisfy
  ``w(side j) = y[j-1] + y[j] + z[j+1]`` and the embeddedness condition
  ``y[i] * z[i] == 0`` (a segment leaving corner ``i`` crosses every arc
  cutting that corner off).
* Crossings along a side are numbered ``0 .. w-1`` from the side's tail to
  its head in the owning triangle's frame; the two slots of an interior
  edge run it in opposite directions, so position ``p`` on one side is
  position ``w - 1 - p`` on the other.  Along side ``j`` the crossings come
  in blocks ``[y[j-1] | z[j+1] | y[j]]`` from tail to head.
* An arc endpoint is a :class:`Terminal`: the segment leaves the marked
  point at ``corner`` of ``triangle`` and crosses side ``corner + 2`` at
  ``position``; valid positions form the contiguous block starting at
  ``y[corner+1]``.
* For closed curves ``enclosed_holes`` is the set of holes on the side of
  the curve away from the outer boundary circle.  For an arc with both
  endpoints at one marked point it is the set of holes the loop separates
  from the outer circle (which may include the hole the arc is based at).
* ``homology_class`` lives in the basis of loops around holes ``1..n``;
  arcs pair with those loops through their endpoints.  Signs are
  normalized so the first nonzero coefficient is positive; callers must
  not rely on more than the absolute value.

Weights are plain Python integers and may grow without bound; all
operations are pure and instances are immutable, so values can be shared
freely across threads.
"""

from __future__ import annotations

import heapq
import itertools
import json
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .surface import FlipSquare, Triangulation, standard_triangulation

ARC = "arc"
CLOSED = "closed"

_FLIP_BUDGET = 20000


class _InessentialError(ValueError):
    """A structurally valid arc that is isotopic into the boundary."""


@dataclass(frozen=True, order=True)
class Terminal:
    """One endpoint of an arc, anchored where it leaves its marked point.

    The terminal segment starts at the vertex at ``corner`` of ``triangle``
    and crosses the opposite side ``corner + 2`` at ``position`` (counted
    from that side's tail in the triangle's own frame).
    """

    triangle: int
    corner: int
    position: int


@dataclass(frozen=True)
class Classification:
    """What a lamination is: kind, endpoints and separation data."""

    kind: str
    endpoints: Optional[tuple]
    essential: bool
    homologically_essential: bool
    enclosed_holes: Optional[frozenset]


@dataclass(frozen=True)
class HomologyClass:
    """Coefficients over the loops around holes ``1..n``.

    Embedded curves and arcs on a planar surface only ever produce
    coefficients ``-1, 0, 1``, and the constructor enforces that.
    """

    coefficients: tuple

    def __post_init__(self):
        for v in self.coefficients:
            if isinstance(v, bool) or not isinstance(v, int) or abs(v) > 1:
                raise ValueError(f"coefficients must be -1, 0 or 1, got {v!r}")

    def is_zero(self) -> bool:
        return not any(self.coefficients)


# -- per-triangle decomposition -----------------------------------------------


def _corner_counts(side_weights, z):
    """Corner-arc counts ``y`` of one triangle, or ``None`` if infeasible.

    Solves ``w[j] = y[j-1] + y[j] + z[j+1]``; feasible when every ``y[i]``
    is a nonnegative integer, no corner carries both arcs and terminals,
    and only one corner carries terminals at all: a terminal strand cuts
    the triangle in two with its own corner's sides on opposite halves,
    so strands from two different corners would have to cross.
    """
    if sum(1 for v in z if v) > 1:
        return None
    hat = [side_weights[j] - z[(j + 1) % 3] for j in range(3)]
    y = []
    for i in range(3):
        val = hat[i] + hat[(i + 1) % 3] - hat[(i + 2) % 3]
        if val < 0 or val % 2:
            return None
        y.append(val // 2)
    if any(y[i] and z[i] for i in range(3)):
        return None
    return tuple(y)


def _triangle_tables(base, weights, terminals):
    """Per-triangle ``(y, z)`` splits, raising on any local obstruction."""
    z = [[0, 0, 0] for _ in base.triangles]
    for term in terminals:
        z[term.triangle][term.corner] += 1
    tables = []
    for t, tri in enumerate(base.triangles):
        y = _corner_counts(tuple(weights[e] for e in tri), tuple(z[t]))
        if y is None:
            raise ValueError(f"inconsistent corner counts in triangle {t}")
        tables.append((y, tuple(z[t])))
    blocks = defaultdict(list)
    for term in terminals:
        blocks[(term.triangle, term.corner)].append(term.position)
    for (t, c), positions in blocks.items():
        lo = tables[t][0][(c + 1) % 3]
        want = list(range(lo, lo + tables[t][1][c]))
        if sorted(positions) != want:
            raise ValueError(
                f"terminal positions at corner {c} of triangle {t} must fill "
                f"{want}, got {sorted(positions)}")
    return tables


@dataclass(frozen=True)
class _Component:
    """One traced strand: closed or an endpoint-to-endpoint path."""

    closed: bool
    edge_counts: tuple
    terminal_indices: tuple


def _trace(base, weights, terminals, tables):
    """Connected components of the strand diagram.

    Crossings are nodes keyed in the first slot's frame; inside each
    triangle corner arcs and terminal segments join them.  Every crossing
    must see exactly two continuations and every terminal one, otherwise
    the coordinates were inconsistent.
    """
    adj = defaultdict(list)

    def crossing(t, j, p):
        e = base.triangles[t][j]
        t0, j0 = base.slots_of(e)[0]
        return ("x", e, p if (t, j) == (t0, j0) else weights[e] - 1 - p)

    for t, (y, _z) in enumerate(tables):
        w3 = [weights[e] for e in base.triangles[t]]
        for i in range(3):
            for k in range(y[i]):
                u = crossing(t, i, w3[i] - 1 - k)
                v = crossing(t, (i + 1) % 3, k)
                adj[u].append(v)
                adj[v].append(u)
    for idx, term in enumerate(terminals):
        u = ("t", idx)
        v = crossing(term.triangle, (term.corner + 2) % 3, term.position)
        adj[u].append(v)
        adj[v].append(u)
    for node, nbrs in adj.items():
        if len(nbrs) != (1 if node[0] == "t" else 2):
            raise ValueError("inconsistent corner counts: strand continuations "
                             f"do not pair up at {node}")
    n_crossings = sum(1 for node in adj if node[0] == "x")
    if n_crossings != sum(weights[e] for e in base.interior_edges()):
        raise ValueError("inconsistent corner counts: crossings unaccounted for")

    components = []
    seen = set()
    for start in sorted(adj):
        if start in seen:
            continue
        stack, nodes = [start], []
        seen.add(start)
        while stack:
            cur = stack.pop()
            nodes.append(cur)
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        counts = [0] * base.num_edges
        terms = []
        for node in nodes:
            if node[0] == "x":
                counts[node[1]] += 1
            else:
                terms.append(node[1])
        components.append(_Component(closed=not terms,
                                     edge_counts=tuple(counts),
                                     terminal_indices=tuple(sorted(terms))))
    return components


# -- complement regions --------------------------------------------------------


def _regions(base, weights, terminals, tables):
    """Split the complement of the strands into regions.

    Within each triangle the strands are disjoint chords of a disk, so a
    single boundary walk with open-chord bookkeeping assigns a face to
    every gap between consecutive crossings; gaps are then glued across
    interior edges.  Returns ``(roots, boundary_root, holes_by_root)``
    where ``boundary_root[i]`` is the region whose closure contains the
    boundary circle ``i`` (not just its marked point).
    """
    by_corner = defaultdict(list)
    for term in terminals:
        by_corner[(term.triangle, term.corner)].append(term.position)

    parent = {}

    def find(x):
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        parent[find(x)] = find(y)

    face_ids = itertools.count()
    gap_face = {}
    for t, (y, _z) in enumerate(tables):
        w3 = [weights[e] for e in base.triangles[t]]
        partner = {}

        def pair(u, v):
            assert u not in partner and v not in partner
            partner[u] = v
            partner[v] = u

        for i in range(3):
            for k in range(y[i]):
                pair(("x", i, w3[i] - 1 - k), ("x", (i + 1) % 3, k))
        for c in range(3):
            for pos in by_corner.get((t, c), ()):
                pair(("z", c, pos), ("x", (c + 2) % 3, pos))
        # Counterclockwise boundary of the triangle: side j crossings tail
        # to head, then the fan of terminal ends at corner j, ordered by
        # descending landing position (the chord nearest side j lands
        # nearest the far end of side j+2).
        entries = []
        for j in range(3):
            entries.append(("gap", j, 0))
            for p in range(w3[j]):
                entries.append(("x", j, p))
                entries.append(("gap", j, p + 1))
            for pos in sorted(by_corner.get((t, j), ()), reverse=True):
                entries.append(("z", j, pos))
        start = (t, next(face_ids))
        cur = start
        open_faces = {}
        for entry in entries:
            if entry[0] == "gap":
                gap_face[(t, entry[1], entry[2])] = cur
                continue
            key = frozenset((entry, partner[entry]))
            if key in open_faces:
                cur = open_faces.pop(key)
            else:
                open_faces[key] = cur
                cur = (t, next(face_ids))
        if open_faces or cur != start:
            raise ValueError("strands do not close up inside a triangle")

    for e in base.interior_edges():
        (t1, j1), (t2, j2) = base.slots_of(e)
        for m in range(weights[e] + 1):
            union(gap_face[(t1, j1, m)], gap_face[(t2, j2, weights[e] - m)])

    roots = {find(f) for f in gap_face.values()}
    boundary_root = {}
    holes_by_root = defaultdict(set)
    for comp, e in enumerate(base.boundary_edges):
        (t, j), = base.slots_of(e)
        root = find(gap_face[(t, j, 0)])
        boundary_root[comp] = root
        holes_by_root[root].add(comp)
    return roots, boundary_root, dict(holes_by_root)


def _loop_essentiality(n, basepoint, raw):
    """Reject loop arcs isotopic into the boundary."""
    if not raw:
        raise _InessentialError("isotopic into the boundary: the loop cuts off a disk")
    if basepoint != 0 and raw == frozenset((basepoint,)):
        raise _InessentialError("isotopic into the boundary: the loop is parallel "
                                "to its own boundary circle")
    if basepoint == 0 and raw == frozenset(range(1, n + 1)):
        raise _InessentialError("isotopic into the boundary: the loop is parallel "
                                "to the outer circle")


def _pairs_with_some_hole_loop(n, p, q):
    """Whether pairing against some hole loop is nonzero (endpoint pairing)."""
    return any((i == p) != (i == q) for i in range(1, n + 1))


def _classify_strands(base, weights, terminals, tables, kind, endpoints):
    """``(essential, homologically_essential, enclosed)`` via region data.

    Raises for null-homotopic closed curves and boundary-parallel arcs;
    boundary-parallel closed curves are valid (they are twist curves) but
    reported as not essential.
    """
    roots, boundary_root, holes_by_root = _regions(base, weights, terminals, tables)
    n = base.n_holes
    root0 = boundary_root[0]
    if kind == CLOSED:
        if len(roots) != 2:
            raise ValueError("a simple closed curve on a planar surface must "
                             "cut it into two regions")
        other = next(r for r in roots if r != root0)
        enclosed = frozenset(holes_by_root.get(other, ()))
        if not enclosed:
            raise ValueError("trivial class: the curve bounds a disk (null-homotopic)")
        essential = len(enclosed) > 1 and enclosed != frozenset(range(1, n + 1))
        return essential, True, enclosed
    p, q = endpoints
    if p != q:
        if len(roots) != 1:
            raise ValueError("an arc between distinct boundary circles cannot separate")
        return True, _pairs_with_some_hole_loop(n, p, q), None
    if len(roots) != 2:
        raise ValueError("a loop arc must cut the surface into two regions")
    other = next(r for r in roots if r != root0)
    raw = frozenset(holes_by_root.get(other, ()))
    _loop_essentiality(n, p, raw)
    return True, False, raw


def _classify_marker(base, edge):
    """``(endpoints, essential, homologically_essential, enclosed)`` for an
    arc parallel to ``edge``, splitting the dual graph along it."""
    if base.is_boundary(edge):
        raise _InessentialError("isotopic into the boundary: no arc is parallel "
                                "to a boundary edge")
    tail, head = base.edge_ends(edge)
    n = base.n_holes
    if tail != head:
        p, q = sorted((tail, head))
        return (p, q), True, _pairs_with_some_hole_loop(n, p, q), None
    slots = base.slots_of(edge)
    if slots[0][0] == slots[1][0]:
        raise ValueError(f"edge {edge} bounds one triangle on both sides; "
                         "cannot classify its parallel arc")
    parent = list(range(len(base.triangles)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in base.interior_edges():
        if e == edge:
            continue
        (ta, _), (tb, _) = base.slots_of(e)
        parent[find(ta)] = find(tb)
    roots = {find(t) for t in range(len(base.triangles))}
    if len(roots) != 2:
        raise ValueError(f"loop edge {edge} does not separate the triangulation")
    comp_root = {}
    for comp, be in enumerate(base.boundary_edges):
        (t, _), = base.slots_of(be)
        comp_root[comp] = find(t)
    raw = frozenset(c for c, r in comp_root.items() if r != comp_root[0])
    _loop_essentiality(n, tail, raw)
    return (tail, tail), True, False, raw


# -- the lamination value ------------------------------------------------------


class Lamination:
    """A single essential arc or simple closed curve in normal position.

    Instances are immutable and hashable.  Equality compares the base
    triangulation, kind, weights and edge-parallel marker, which by
    injectivity of normal coordinates on essential classes decides isotopy.
    Decode a bare weight vector with :func:`from_weights`; the direct
    constructor expects an explicit terminal realization and re-validates
    everything, making it a safety net under coordinate transport.
    """

    __slots__ = ("base", "weights", "kind", "terminals", "edge_parallel",
                 "endpoints", "enclosed_holes", "essential",
                 "homologically_essential", "_hash")

    def __init__(self, base, weights, kind, terminals=(), edge_parallel=None):
        if not isinstance(base, Triangulation):
            raise TypeError(f"base must be a Triangulation, got {type(base).__name__}")
        weights = tuple(weights)
        if len(weights) != base.num_edges:
            raise ValueError(f"expected {base.num_edges} weights, got {len(weights)}")
        for e, v in enumerate(weights):
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError(f"weight on edge {e} must be an integer, got {v!r}")
        if kind not in (ARC, CLOSED):
            raise ValueError(f"kind must be {ARC!r} or {CLOSED!r}, got {kind!r}")
        terminals = tuple(sorted(terminals))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "terminals", terminals)
        object.__setattr__(self, "edge_parallel", edge_parallel)
        if edge_parallel is not None:
            if kind != ARC or terminals:
                raise ValueError("an edge-parallel lamination is an arc without "
                                 "crossing terminals")
            if any(weights):
                raise ValueError("an edge-parallel arc crosses no edge")
            if not (isinstance(edge_parallel, int)
                    and 0 <= edge_parallel < base.num_edges):
                raise ValueError(f"no edge {edge_parallel!r} to run parallel to")
            endpoints, essential, hom, enclosed = _classify_marker(base, edge_parallel)
        else:
            if any(v < 0 for v in weights):
                raise ValueError("negative weights occur only in the -1 "
                                 "edge-parallel encoding")
            if not any(weights):
                raise ValueError("empty: the zero vector describes no curve")
            for e in base.boundary_edges:
                if weights[e]:
                    raise ValueError(f"boundary edge {e} must have weight 0")
            for term in terminals:
                if not isinstance(term, Terminal):
                    raise TypeError(f"terminals must be Terminal records, got {term!r}")
                if not (0 <= term.triangle < len(base.triangles)
                        and 0 <= term.corner < 3):
                    raise ValueError(f"terminal {term} points outside the triangulation")
            if len(terminals) != (0 if kind == CLOSED else 2):
                raise ValueError(f"a {kind} needs "
                                 f"{0 if kind == CLOSED else 2} terminals, "
                                 f"got {len(terminals)}")
            tables = _triangle_tables(base, weights, terminals)
            components = _trace(base, weights, terminals, tables)
            if len(components) != 1:
                raise ValueError(f"multiple components: decoded {len(components)}; "
                                 "a lamination is a single curve")
            if components[0].closed != (kind == CLOSED):
                raise ValueError("kind does not match the traced strand")
            if kind == ARC:
                endpoints = tuple(sorted(base.corners[T.triangle][T.corner]
                                         for T in terminals))
            else:
                endpoints = None
            essential, hom, enclosed = _classify_strands(
                base, weights, terminals, tables, kind, endpoints)
        object.__setattr__(self, "endpoints", endpoints)
        object.__setattr__(self, "essential", essential)
        object.__setattr__(self, "homologically_essential", hom)
        object.__setattr__(self, "enclosed_holes", enclosed)
        object.__setattr__(self, "_hash", hash((base, kind, edge_parallel, weights)))

    def __setattr__(self, name, value):
        raise AttributeError("Lamination is immutable")

    def _key(self):
        return (self.base, self.kind, self.edge_parallel, self.weights)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.edge_parallel is not None:
            detail = f"parallel to edge {self.edge_parallel}"
        elif self.kind == ARC:
            detail = f"endpoints {self.endpoints}, weight {self.total_weight}"
        else:
            detail = (f"enclosing {sorted(self.enclosed_holes)}, "
                      f"weight {self.total_weight}")
        return f"Lamination({self.kind}, {detail})"

    # -- simple queries --------------------------------------------------------

    @property
    def is_arc(self) -> bool:
        return self.kind == ARC

    @property
    def is_closed(self) -> bool:
        return self.kind == CLOSED

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def n_components(self) -> int:
        """Always 1: multi-component vectors are rejected at construction."""
        return 1

    def classify(self) -> Classification:
        return Classification(kind=self.kind, endpoints=self.endpoints,
                              essential=self.essential,
                              homologically_essential=self.homologically_essential,
                              enclosed_holes=self.enclosed_holes)

    # -- transport under flips -------------------------------------------------

    def transport(self, square: FlipSquare, reverse: bool = False) -> "Lamination":
        """Coordinates of the same class on the other side of one flip.

        With ``reverse=False`` the lamination must live on ``square.before``
        and is rewritten onto ``square.after``; ``reverse=True`` undoes the
        same flip exactly, which is how transport paths are unwound without
        recomputing flips.

        The square reads ``p, q, r, s`` counterclockwise with sides
        ``a = pq, b = qr, c = rs, d = sp``; the source diagonal joins ``q``
        to ``s`` and the target diagonal joins ``p`` to ``r``.  Crossings
        of the source diagonal are cut into blocks by which square sides or
        corners their strands connect, and each block lands in a prescribed
        corner of the rewritten triangles.
        """
        src = square.after if reverse else square.before
        dst = square.before if reverse else square.after
        if self.base != src:
            raise ValueError("lamination does not live on the flip's source "
                             "triangulation")
        e = square.edge
        if reverse:
            a_s, b_s, c_s, d_s = (square.side_b, square.side_c,
                                  square.side_d, square.side_a)
            p_l, q_l, r_l, s_l = square.q, square.r, square.s, square.p
            f_a, f_b = (square.tri_b, 0), (square.tri_a, 0)
            f_c, f_d = (square.tri_b, square.rot_b), (square.tri_a, square.rot_a)
        else:
            a_s, b_s, c_s, d_s = (square.side_a, square.side_b,
                                  square.side_c, square.side_d)
            p_l, q_l, r_l, s_l = square.p, square.q, square.r, square.s
            f_a, f_b = (square.tri_a, square.rot_a), (square.tri_b, square.rot_b)
            f_c, f_d = (square.tri_b, 0), (square.tri_a, 0)

        def frame(tri_rot, tris):
            t, rot = tri_rot
            return (tuple(tris.triangles[t][(rot + i) % 3] for i in range(3)),
                    tuple(tris.corners[t][(rot + i) % 3] for i in range(3)))

        assert frame(f_a, src) == ((e, d_s, a_s), (s_l, p_l, q_l))
        assert frame(f_b, src) == ((e, b_s, c_s), (q_l, r_l, s_l))
        assert frame(f_c, dst) == ((e, a_s, b_s), (p_l, q_l, r_l))
        assert frame(f_d, dst) == ((e, c_s, d_s), (r_l, s_l, p_l))

        if self.edge_parallel is not None:
            if self.edge_parallel != e:
                return Lamination(dst, self.weights, ARC, (),
                                  edge_parallel=self.edge_parallel)
            # Parallel to the old diagonal: afterwards it crosses the new
            # diagonal once, running between its two off-diagonal corners.
            new_w = list(self.weights)
            new_w[e] = 1
            terms = (Terminal(f_c[0], (1 + f_c[1]) % 3, 0),
                     Terminal(f_d[0], (1 + f_d[1]) % 3, 0))
            return Lamination(dst, tuple(new_w), ARC, terms)

        w = self.weights
        w_e, w_a, w_c = w[e], w[a_s], w[c_s]

        in_a = [t for t in self.terminals if t.triangle == f_a[0]]
        in_b = [t for t in self.terminals if t.triangle == f_b[0]]
        passthrough = [t for t in self.terminals
                       if t.triangle not in (f_a[0], f_b[0])]

        def frame_counts(tri_rot, terms):
            t, rot = tri_rot
            z = [0, 0, 0]
            for term in terms:
                z[(term.corner - rot) % 3] += 1
            sides, _ = frame(tri_rot, src)
            y = _corner_counts(tuple(w[s] for s in sides), tuple(z))
            assert y is not None
            return y, tuple(z)

        y_a, z_a = frame_counts(f_a, in_a)
        y_b, z_b = frame_counts(f_b, in_b)

        # Positions on the old diagonal from the q end.  The first frame
        # stores them that way; the second frame runs s to q and converts
        # by position -> w_e - 1 - position.
        blk_a = {"a": (0, y_a[2]), "P": (y_a[2], y_a[2] + z_a[1]),
                 "d": (y_a[2] + z_a[1], w_e)}
        blk_b = {"b": (0, y_b[0]), "R": (y_b[0], y_b[0] + z_b[1]),
                 "c": (y_b[0] + z_b[1], w_e)}
        assert blk_a["d"][1] - blk_a["d"][0] == y_a[0]
        assert blk_b["c"][1] - blk_b["c"][0] == y_b[2]

        def over(u, v):
            lo = max(blk_a[u][0], blk_b[v][0])
            hi = min(blk_a[u][1], blk_b[v][1])
            return max(0, hi - lo)

        if over("P", "R"):
            # A strand from p to r through the old diagonal is an entire
            # arc, and afterwards it is parallel to the new diagonal.
            assert (w_e == 1 and self.total_weight == 1
                    and len(self.terminals) == 2)
            return Lamination(dst, (0,) * dst.num_edges, ARC, (),
                              edge_parallel=e)

        n_da, n_bc = y_a[1], y_b[1]
        zqa, zqb, zsa, zsb = z_a[2], z_b[0], z_a[0], z_b[2]
        y_c2 = (over("a", "c") + n_da + zsa, over("a", "b"),
                over("d", "b") + n_bc + zsb)
        z_c2 = (over("P", "b"), zqa + zqb, over("a", "R"))
        y_d2 = (over("a", "c") + n_bc + zqb, over("d", "c"),
                over("d", "b") + n_da + zqa)
        z_d2 = (over("d", "R"), zsa + zsb, over("P", "c"))
        w_f = (over("a", "c") + over("d", "b")
               + n_da + n_bc + zqa + zqb + zsa + zsb)
        new_w = list(w)
        new_w[e] = w_f
        assert _corner_counts((w_f, w[a_s], w[b_s]), z_c2) == y_c2
        assert _corner_counts((w_f, w[c_s], w[d_s]), z_d2) == y_d2

        new_terms = list(passthrough)

        def emit(tri_rot, corner, pos):
            t, rot = tri_rot
            new_terms.append(Terminal(t, (corner + rot) % 3, pos))

        def fan(terms, rot, corner):
            return sorted((t for t in terms if (t.corner - rot) % 3 == corner),
                          key=lambda t: t.position)

        # Terminal fans at the two surviving diagonal corners: at q the c
        # side enters before the d side, at s the a side before the b side.
        for rank, _t in enumerate(fan(in_b, f_b[1], 0)):
            emit(f_c, 1, y_c2[2] + rank)
        for rank, _t in enumerate(fan(in_a, f_a[1], 2)):
            emit(f_c, 1, y_c2[2] + zqb + rank)
        for rank, _t in enumerate(fan(in_a, f_a[1], 0)):
            emit(f_d, 1, y_d2[2] + rank)
        for rank, _t in enumerate(fan(in_b, f_b[1], 2)):
            emit(f_d, 1, y_d2[2] + zsa + rank)
        # Terminals at p and r crossed the old diagonal; they now cross an
        # outer side, determined by which block their strand sat in.
        for term in fan(in_a, f_a[1], 1):
            pos = term.position
            if pos < blk_b["b"][1]:
                emit(f_c, 0, pos)
            else:
                assert pos >= blk_b["c"][0]
                emit(f_d, 2, w_c - w_e + pos)
        for term in fan(in_b, f_b[1], 1):
            pos_q = w_e - 1 - term.position
            if pos_q < blk_a["a"][1]:
                emit(f_c, 2, w_a - w_e + term.position)
            else:
                assert pos_q >= blk_a["d"][0]
                emit(f_d, 0, term.position)
        return Lamination(dst, tuple(new_w), self.kind, tuple(new_terms))

    def relabel_edges(self, mapping) -> "Lamination":
        """The same class after exchanging edge ids on the base."""
        base = self.base.relabel_edges(mapping)
        new_w = [0] * base.num_edges
        for e, v in enumerate(self.weights):
            new_w[mapping.get(e, e)] = v
        marker = self.edge_parallel
        if marker is not None:
            marker = mapping.get(marker, marker)
        return Lamination(base, tuple(new_w), self.kind, self.terminals,
                          edge_parallel=marker)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        weights = list(self.weights)
        if self.edge_parallel is not None:
            weights[self.edge_parallel] = -1
        return {"weights": weights, "edge_parallel": self.edge_parallel,
                "kind": self.kind}

    @classmethod
    def from_json(cls, base, data: dict) -> "Lamination":
        marker = data.get("edge_parallel")
        weights = data["weights"]
        if marker is not None:
            for e, v in enumerate(weights):
                if v != 0 and (e, v) != (marker, -1):
                    raise ValueError("edge-parallel record carries stray weights")
            return edge_marker(base, marker)
        return from_weights(base, weights, kind=data.get("kind"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, base, text: str) -> "Lamination":
        return cls.from_json(base, json.loads(text))


# -- decoding ------------------------------------------------------------------


def _validated_vector(base, weights):
    weights = tuple(weights)
    if len(weights) != base.num_edges:
        raise ValueError(f"expected {base.num_edges} weights, got {len(weights)}")
    for e, v in enumerate(weights):
        if isinstance(v, bool) or not isinstance(v, int):
            raise TypeError(f"weight on edge {e} must be an integer, got {v!r}")
    return weights


def _single_terminals(base, weights, t):
    """Possible lone terminals in a triangle with odd crossing total."""
    out = []
    w3 = tuple(weights[e] for e in base.triangles[t])
    for c in range(3):
        y = _corner_counts(w3, tuple(int(i == c) for i in range(3)))
        if y is not None:
            out.append(Terminal(t, c, y[(c + 1) % 3]))
    return out


def _double_terminals(base, weights, t):
    """Possible terminal pairs when both arc ends sit in one triangle.

    Both terminals must leave through the same corner; _corner_counts
    rejects split placements as self-crossing.
    """
    out = []
    w3 = tuple(weights[e] for e in base.triangles[t])
    for c in range(3):
        y = _corner_counts(w3, tuple(2 * (i == c) for i in range(3)))
        if y is not None:
            lo = y[(c + 1) % 3]
            out.append((Terminal(t, c, lo), Terminal(t, c, lo + 1)))
    return out


def from_weights(base, weights, kind=None) -> Lamination:
    """Decode a weight vector into the lamination it carries.

    ``kind`` may force ``"arc"`` or ``"closed"``.  With ``kind=None`` an
    even-parity vector is read as a closed curve first and as a loop arc
    only when no closed curve fits (a loop's two terminal strands leave
    the marked point through one corner, so its vector never doubles as a
    curve's).  When several terminal placements are structurally valid
    the lexicographically least placement wins, making decoding
    deterministic.  A single ``-1`` entry is the edge-parallel arc
    encoding.

    Raises ``ValueError`` for inconsistent corner counts, multiple
    components, null-homotopic curves and boundary-parallel arcs.
    """
    if not isinstance(base, Triangulation):
        raise TypeError(f"base must be a Triangulation, got {type(base).__name__}")
    if kind not in (None, ARC, CLOSED):
        raise ValueError(f"kind must be None, {ARC!r} or {CLOSED!r}, got {kind!r}")
    weights = _validated_vector(base, weights)
    negative = [e for e, v in enumerate(weights) if v < 0]
    if negative:
        e = negative[0]
        if (len(negative), weights[e]) != (1, -1) or any(
                v for i, v in enumerate(weights) if i != e):
            raise ValueError("the only negative entry allowed is a single -1 "
                             "edge-parallel marker")
        if kind == CLOSED:
            raise ValueError("an edge-parallel marker encodes an arc")
        return edge_marker(base, e)
    for e in base.boundary_edges:
        if weights[e]:
            raise ValueError(f"boundary edge {e} must carry weight 0")

    odd = [t for t, tri in enumerate(base.triangles)
           if sum(weights[e] for e in tri) % 2]
    attempts = []
    failures = []
    if len(odd) == 2:
        if kind == CLOSED:
            raise ValueError("odd crossing totals force endpoints; "
                             "not a closed curve")
        for ta in _single_terminals(base, weights, odd[0]):
            for tb in _single_terminals(base, weights, odd[1]):
                attempts.append((ta, tb))
    elif not odd:
        if kind in (None, CLOSED):
            try:
                return Lamination(base, weights, CLOSED)
            except ValueError as exc:
                if kind == CLOSED:
                    raise
                failures.append(exc)
        for t in range(len(base.triangles)):
            attempts.extend(_double_terminals(base, weights, t))
    else:
        raise ValueError("inconsistent corner counts: odd crossing totals "
                         f"at triangles {odd}")

    solutions = []
    for terms in attempts:
        try:
            solutions.append(Lamination(base, weights, ARC, terms))
        except _InessentialError as exc:
            failures.append(exc)
        except ValueError:
            continue
    if solutions:
        return min(solutions, key=lambda lam: lam.terminals)
    for exc in failures:
        if isinstance(exc, _InessentialError):
            raise exc
    if failures:
        raise failures[0]
    raise ValueError("no single essential curve matches this weight vector")


def edge_marker(base, edge) -> Lamination:
    """The arc isotopic to interior edge ``edge`` (it crosses nothing)."""
    if not isinstance(base, Triangulation):
        raise TypeError(f"base must be a Triangulation, got {type(base).__name__}")
    if not (isinstance(edge, int) and 0 <= edge < base.num_edges):
        raise ValueError(f"no edge {edge!r}")
    return Lamination(base, (0,) * base.num_edges, ARC, (), edge_parallel=edge)


# -- standard positions --------------------------------------------------------


def _stage_edges(n):
    """Edge ids ``(s, g1, g2, g3)`` of recursion stage ``t`` for ``2 <= t <= n``."""
    return {t: (5 * t - 5, 5 * t - 4, 5 * t - 3, 5 * t - 2) for t in range(2, n + 1)}


def standard_arc(surface, i, j) -> Lamination:
    """The straight arc between the marked points of circles ``i`` and ``j``.

    Neighbouring circles (and circle 0 with circle 1) are joined by an arc
    parallel to a triangulation edge.  Otherwise the arc crosses each
    intermediate pocket mouth once and slips past each intermediate circle
    on its outward side, which is the unique position of minimal total
    weight.  Same-boundary arcs have no canonical straight position; build
    them with :func:`from_weights`.
    """
    base = standard_triangulation(surface)
    n = base.n_holes
    for k in (i, j):
        if not (isinstance(k, int) and 0 <= k <= n):
            raise ValueError(f"no boundary circle {k!r} on a surface with {n} holes")
    if i == j:
        raise ValueError("standard arcs join distinct boundary circles; "
                         "decode same-boundary arcs with from_weights")
    i, j = sorted((i, j))
    if j == i + 1:
        return edge_marker(base, 2 if i == 0 else 5 * i + 1)
    stage = _stage_edges(n)
    w = [0] * base.num_edges
    for t in range(i + 2, j + 1):
        w[stage[t][0]] += 1
    for t in range(max(2, i + 1), j):
        w[stage[t][2]] += 1
    lam = from_weights(base, w, kind=ARC)
    assert lam.endpoints == (i, j) and lam.essential
    return lam


def curve_around(surface, holes) -> Lamination:
    """The tight closed curve enclosing exactly the given nonempty hole set.

    The reference surface is nested: the loop edge of stage ``m`` cuts off
    a pocket holding circles ``m..n``.  The curve is a two-strand band
    traced pocket by pocket from its outermost enclosed circle inward.
    Once the remaining pockets' circles are all enclosed it wraps the
    current mouth and closes up; otherwise the band keeps walking, riding
    the outward edge of circles whose membership matches the previous
    one's, splitting around each circle where membership flips (the
    strands swap sides there), and finally turning back one pocket past
    the last enclosed circle (normal position cannot turn earlier).  Each
    step is forced, so the result is the canonical position of the class.
    """
    base = standard_triangulation(surface)
    n = base.n_holes
    holes = set(holes)
    if not holes:
        raise ValueError("a curve enclosing no holes is null-homotopic")
    if not all(isinstance(h, int) and not isinstance(h, bool) and 1 <= h <= n
               for h in holes):
        raise ValueError(f"holes must be a subset of 1..{n}, got {sorted(holes)!r}")

    def ring(m):
        # Inward edge, outward edge and the diagonal behind the mouth of
        # pocket m+1 (absent at the deepest stage).
        if m == 1:
            return 2, 3, (8 if n > 1 else None)
        return 5 * m - 4, 5 * m - 3, (5 * m + 3 if m < n else None)

    lo, hi = min(holes), max(holes)
    w = [0] * base.num_edges
    m = lo
    while True:
        d, f, g3 = ring(m)
        if holes >= set(range(m, n + 1)) or m > hi:
            # Wrap the whole remaining pocket, or turn back after the
            # last enclosed circle; either way the walk ends here.
            w[d] += 1
            w[f] += 1
            if g3 is not None:
                w[g3] += 1
            break
        if m == lo or (m in holes) != (m - 1 in holes):
            w[d] += 1
            w[f] += 1
            w[g3] += 1
        else:
            w[f] += 2
        w[5 * (m + 1) - 5] += 2
        m += 1
    lam = from_weights(base, w, kind=CLOSED)
    assert lam.enclosed_holes == frozenset(holes)
    return lam


def standard_curve(surface, holes) -> Lamination:
    """The tight closed curve enclosing a consecutive run of circles.

    The flat-model constructor accepts consecutive runs only; scattered
    sets still have canonical tight curves, built by :func:`curve_around`.
    ``holes == {1..n}`` gives the curve parallel to the outer circle, a
    singleton the curve parallel to that hole.
    """
    holes = set(holes)
    if holes and holes != set(range(min(holes), max(holes) + 1)):
        raise ValueError("holes must be consecutive circles; scattered sets "
                         f"like {sorted(holes)!r} are built by curve_around")
    return curve_around(surface, holes)


# -- operations ----------------------------------------------------------------


def transport_flip(lam: Lamination, edge) -> Lamination:
    """Flip ``edge`` in the base and rewrite ``lam`` onto the result."""
    return lam.transport(lam.base.flip(edge))


def _same_base(a, b):
    if not isinstance(a, Lamination) or not isinstance(b, Lamination):
        raise TypeError("expected two laminations")
    if a.base != b.base:
        raise ValueError("laminations live on different triangulations; "
                         "transport to a common one first")


def is_isotopic(a: Lamination, b: Lamination) -> bool:
    """Same isotopy class; on a shared base this is coordinate equality."""
    _same_base(a, b)
    return (a.kind, a.edge_parallel, a.weights) == (b.kind, b.edge_parallel, b.weights)


def classify(lam: Lamination) -> Classification:
    return lam.classify()


def disjoint(a: Lamination, b: Lamination) -> bool:
    """Whether the two classes have disjoint representatives.

    Decided without flips: normal coordinates add over disjoint unions, so
    the classes are disjoint exactly when the summed vector is feasible and
    its unique strand diagram falls apart into two components carrying the
    two original weight vectors.  This is independent of the flip-based
    :func:`intersection_number` and cross-checks it in the test suite.
    """
    _same_base(a, b)
    if a.edge_parallel is not None and b.edge_parallel is not None:
        return True
    if a.edge_parallel is not None:
        return b.weights[a.edge_parallel] == 0
    if b.edge_parallel is not None:
        return a.weights[b.edge_parallel] == 0
    total = tuple(x + y for x, y in zip(a.weights, b.weights))
    z = [[0, 0, 0] for _ in a.base.triangles]
    for term in a.terminals + b.terminals:
        z[term.triangle][term.corner] += 1
    tables = []
    for t, tri in enumerate(a.base.triangles):
        y = _corner_counts(tuple(total[e] for e in tri), tuple(z[t]))
        if y is None:
            return False
        tables.append((y, tuple(z[t])))
    terms = []
    for t, (y, zz) in enumerate(tables):
        for c in range(3):
            lo = y[(c + 1) % 3]
            terms.extend(Terminal(t, c, lo + k) for k in range(zz[c]))
    try:
        components = _trace(a.base, total, tuple(terms), tables)
    except ValueError:
        return False
    if len(components) != 2:
        return False
    got = sorted((CLOSED if comp.closed else ARC, comp.edge_counts)
                 for comp in components)
    want = sorted(((a.kind, a.weights), (b.kind, b.weights)))
    return got == want


@lru_cache(maxsize=512)
def _marker_path(arc: Lamination):
    """Flips carrying ``arc`` to an edge-parallel position.

    Best-first search on total weight with a deterministic tie-break;
    plateau moves are allowed, so this is a search, not greedy descent.
    Returns ``(squares, marker)``.
    """
    if arc.edge_parallel is not None:
        return (), arc
    counter = itertools.count()
    heap = [(arc.total_weight, next(counter), arc, ())]
    seen = {(arc.base, arc.weights)}
    budget = _FLIP_BUDGET
    while heap:
        _, _, lam, path = heapq.heappop(heap)
        budget -= 1
        if budget < 0:
            raise RuntimeError("edge-parallel normalization gave up after "
                               f"{_FLIP_BUDGET} flips")
        for edge in lam.base.interior_edges():
            if not lam.base.is_flippable(edge):
                continue
            square = lam.base.flip(edge)
            moved = lam.transport(square)
            if moved.edge_parallel is not None:
                return path + (square,), moved
            key = (moved.base, moved.weights)
            if key in seen:
                continue
            seen.add(key)
            heapq.heappush(heap, (moved.total_weight, next(counter), moved,
                                  path + (square,)))
    raise RuntimeError("flip search exhausted without an edge-parallel position")


def intersection_number(a: Lamination, b: Lamination) -> int:
    """Minimal number of interior crossings between representatives.

    Endpoints shared at marked points are never counted.  At least one
    argument must be an arc: the arc is flipped to an edge-parallel
    position, the companion is transported along, and its weight on that
    edge is the answer (weights count exactly the minimal crossings with an
    edge).  Two distinct closed curves are not supported; no workflow here
    needs that case.
    """
    _same_base(a, b)
    if is_isotopic(a, b):
        return 0
    if ARC not in (a.kind, b.kind):
        raise NotImplementedError(
            "geometric intersection of two distinct closed curves is not "
            "implemented; pair a closed curve with an arc instead")
    arc, other = (a, b) if a.kind == ARC else (b, a)
    path, marker = _marker_path(arc)
    for square in path:
        other = other.transport(square)
    return other.weights[marker.edge_parallel]


def algebraic_intersection(curve: Lamination, other: Lamination) -> int:
    """Signed crossing count of a closed curve with an arc or curve.

    Computed homologically: the curve is the sum of the loops around its
    enclosed holes, and each such loop meets an arc once per endpoint on
    that hole's circle.  Arcs are oriented from their lower-indexed
    endpoint; only the absolute value is convention-free.  Two closed
    curves on a planar surface always pair to 0.
    """
    _same_base(curve, other)
    if curve.kind != CLOSED:
        raise ValueError("first argument must be a closed curve")
    if other.kind == CLOSED:
        return 0
    p, q = other.endpoints
    return int(q in curve.enclosed_holes) - int(p in curve.enclosed_holes)


def homology_class(lam: Lamination) -> HomologyClass:
    """The class over the hole-loop basis, sign-normalized.

    Closed curves give the indicator vector of their enclosed holes; arcs
    give their pairing vector against the hole loops (so arcs with both
    endpoints on one circle are null-homologous rel boundary).
    """
    n = lam.base.n_holes
    if lam.kind == CLOSED:
        coeff = [int(i in lam.enclosed_holes) for i in range(1, n + 1)]
    else:
        p, q = lam.endpoints
        coeff = [int(i == p) - int(i == q) for i in range(1, n + 1)]
        for v in coeff:
            if v:
                if v < 0:
                    coeff = [-x for x in coeff]
                break
    return HomologyClass(tuple(coeff))
