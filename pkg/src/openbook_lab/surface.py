"""Triangulated planar pages (disks with holes) and edge flips.

Conventions relied on by every other module:

* ``S(n)`` is a closed disk with ``n`` open round subdisks removed.  Boundary
  components are numbered ``0..n``, component 0 being the outer circle, and
  each carries one marked point; vertex ``i`` is the marked point of
  component ``i``.
* Every boundary component is covered by a single *boundary edge*, a loop
  based at its marked point.  Interior edges are arcs between marked points
  (loops allowed).  Curves and arcs never touch boundary edges except at
  marked points.
* A triangle is an ordered triple of edge ids listed counterclockwise.
  In a triangle ``(s0, s1, s2)`` corner ``i`` lies between side ``i`` and
  side ``i+1`` and is the head of side ``i``; side ``i`` runs from corner
  ``i-1`` to corner ``i``.  ``corners[t][i]`` is the vertex sitting at
  corner ``i`` of triangle ``t``.
* The reference triangulation of ``S(n)`` is built recursively.  ``S(1)``
  is the annulus::

        (B0, d, f2)   outer triangle, corners (0, 1, 0)
        (f2, B1, d)   inner triangle, corners (1, 1, 0)

  with ``B0, B1`` the boundary loops and ``d, f2`` the two arcs joining the
  marked points.  To pass from the reference of ``S(m-1)`` to the reference
  of ``S(m)`` take the unique triangle containing the last boundary loop,
  written in the rotated frame ``(X, B, Y)`` with corners ``(v, v, w)``
  where ``v`` is the last marked point, and replace it by four triangles::

        west   (X,  s,  g3)   corners (v, v, w)
        east   (g3, B,  Y)    corners (v, v, w)
        tent   (Bm, g1, g2)   corners (m, v, m)
        collar (s,  g1, g2)   corners (v, m, v)

  Here ``Bm`` is the new boundary loop, ``s`` a loop at ``v`` guarding the
  inserted region, ``g1`` and ``g2`` the two arcs from ``v`` to the new
  marked point (``g1`` is the bridge used by standard arcs), and ``g3`` a
  chord from ``w`` to ``v`` splitting the remainder of the old triangle.
  Each stage adds one boundary edge and four interior edges, so ``S(n)``
  has ``n + 1`` boundary edges, ``4n - 2`` interior edges and ``3n - 1``
  triangles.

Edge ids are assigned in construction order and never move: ``B0=0, B1=1,
d=2, f2=3`` and stage ``m >= 2`` appends ``Bm, s, g1, g2, g3`` at ids
``5m-6 .. 5m-2``.  This makes the inclusion of the ``S(n)`` reference into
the ``S(n+1)`` reference the identity on edge ids and on all triangle
indices except the single replaced one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class MarkedSurface:
    """A disk with ``n_holes`` holes, one marked point per boundary circle."""

    n_holes: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_holes, int) or self.n_holes < 0:
            raise ValueError(f"n_holes must be a nonnegative integer, got {self.n_holes!r}")

    @property
    def euler_characteristic(self) -> int:
        return 1 - self.n_holes

    @property
    def n_boundary(self) -> int:
        return self.n_holes + 1


def make_surface(n_holes: int) -> MarkedSurface:
    """Return the disk with ``n_holes`` holes."""
    return MarkedSurface(n_holes)


@dataclass(frozen=True)
class StageInfo:
    """Bookkeeping for one recursion stage of the reference triangulation.

    ``hole`` is the inserted hole (also its marked point and the index of
    its boundary circle).  ``west`` is the triangle index that replaced the
    old triangle in place; ``frame_rotation`` rotates the old triangle's
    tuple into the ``(X, B, Y)`` frame used by the insertion.
    """

    hole: int
    b: int
    s: int
    g1: int
    g2: int
    g3: int
    west: int
    east: int
    tent: int
    collar: int
    x_edge: int
    y_edge: int
    prev_b: int
    w_vertex: int
    frame_rotation: int


@dataclass(frozen=True)
class FlipSquare:
    """The quadrilateral data of one edge flip.

    Before the flip the two triangles adjacent to ``edge`` are, rotated so
    the flipped edge comes first, ``(e, d, a)`` with corners ``(s, p, q)``
    at triangle ``tri_a`` and ``(e, b, c)`` with corners ``(q, r, s)`` at
    triangle ``tri_b``; the square reads ``p, q, r, s`` counterclockwise
    with sides ``a = pq, b = qr, c = rs, d = sp`` and old diagonal
    ``e = qs``.  After the flip the new diagonal keeps the id ``edge`` and
    the triangles are rewritten in place as ``(e, c, d)`` with corners
    ``(r, s, p)`` at ``tri_a`` and ``(e, a, b)`` with corners ``(p, q, r)``
    at ``tri_b``.  ``rot_a``/``rot_b`` record where ``edge`` sat in the old
    unrotated tuples.
    """

    before: "Triangulation"
    after: "Triangulation"
    edge: int
    tri_a: int
    tri_b: int
    rot_a: int
    rot_b: int
    side_a: int
    side_b: int
    side_c: int
    side_d: int
    p: int
    q: int
    r: int
    s: int


class Triangulation:
    """An immutable triangulation of a marked planar surface."""

    __slots__ = ("n_holes", "triangles", "corners", "boundary_edges", "num_edges",
                 "stages", "_slots", "_hash")

    def __init__(self, n_holes, triangles, corners, boundary_edges, stages=()):
        object.__setattr__(self, "n_holes", n_holes)
        object.__setattr__(self, "triangles", tuple(tuple(t) for t in triangles))
        object.__setattr__(self, "corners", tuple(tuple(c) for c in corners))
        object.__setattr__(self, "boundary_edges", tuple(boundary_edges))
        object.__setattr__(self, "stages", tuple(stages))
        num_edges = 1 + max(e for tri in self.triangles for e in tri)
        object.__setattr__(self, "num_edges", num_edges)
        slots = {}
        for t, tri in enumerate(self.triangles):
            for i, e in enumerate(tri):
                slots.setdefault(e, []).append((t, i))
        object.__setattr__(self, "_slots", {e: tuple(v) for e, v in slots.items()})
        object.__setattr__(self, "_hash", hash(self._key()))
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("Triangulation is immutable")

    def _key(self):
        return (self.n_holes, self.triangles, self.corners, self.boundary_edges)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"Triangulation(n_holes={self.n_holes}, "
                f"{len(self.triangles)} triangles, {self.num_edges} edges)")

    # -- validation ---------------------------------------------------------

    def _validate(self):
        n = self.n_holes
        if len(self.boundary_edges) != n + 1:
            raise ValueError("expected one boundary edge per boundary component")
        if len(self.triangles) != 3 * n - 1 or self.num_edges != 5 * n - 1:
            raise ValueError("triangle or edge count is off for a disk with "
                             f"{n} holes")
        if len(self.corners) != len(self.triangles):
            raise ValueError("corner table must parallel the triangle table")
        boundary = set(self.boundary_edges)
        for e in range(self.num_edges):
            want = 1 if e in boundary else 2
            got = len(self._slots.get(e, ()))
            if got != want:
                raise ValueError(f"edge {e} bounds {got} triangle sides, expected {want}")
        # Each edge is traversed once in each direction; its two slots must
        # see the same endpoints, swapped.
        for e, slots in self._slots.items():
            ends = [(self.corners[t][(i - 1) % 3], self.corners[t][i]) for t, i in slots]
            if len(ends) == 2 and ends[0] != (ends[1][1], ends[1][0]):
                raise ValueError(f"inconsistent corner labels around edge {e}")
        for comp, e in enumerate(self.boundary_edges):
            (t, i), = self._slots[e]
            if not (self.corners[t][(i - 1) % 3] == self.corners[t][i] == comp):
                raise ValueError(f"boundary edge {e} is not a loop at marked point {comp}")

    # -- simple queries ------------------------------------------------------

    def is_boundary(self, e) -> bool:
        return e in set(self.boundary_edges)

    def is_interior(self, e) -> bool:
        return 0 <= e < self.num_edges and not self.is_boundary(e)

    def interior_edges(self):
        boundary = set(self.boundary_edges)
        return tuple(e for e in range(self.num_edges) if e not in boundary)

    def slots_of(self, e):
        """The (triangle, side) slots bounded by edge ``e``, in scan order."""
        return self._slots[e]

    def other_slot(self, t, i):
        """The slot on the far side of the edge at side ``i`` of triangle
        ``t``, or ``None`` for a boundary edge."""
        slots = self._slots[self.triangles[t][i]]
        if len(slots) == 1:
            return None
        return slots[1] if slots[0] == (t, i) else slots[0]

    def side_tail(self, t, i) -> int:
        return self.corners[t][(i - 1) % 3]

    def side_head(self, t, i) -> int:
        return self.corners[t][i]

    def edge_ends(self, e):
        """The two endpoint vertices of ``e`` (equal for loops)."""
        t, i = self._slots[e][0]
        return (self.side_tail(t, i), self.side_head(t, i))

    def sectors_around(self, v):
        """Corners at vertex ``v`` in order, from one end of its boundary
        loop to the other.

        Returns a tuple of ``(triangle, corner)`` pairs.  Consecutive
        sectors are separated by the interior edge crossed between them;
        the full linear order of edge ends around ``v`` is the boundary
        loop, then the crossed edges in walk order, then the boundary loop
        again.
        """
        b_edge = self.boundary_edges[v]
        (t, c), = self._slots[b_edge]
        sectors = []
        while True:
            assert self.corners[t][c] == v
            sectors.append((t, c))
            nxt = self.triangles[t][(c + 1) % 3]
            if nxt == b_edge:
                return tuple(sectors)
            t, c = self.other_slot(t, (c + 1) % 3)

    def canonical_form(self):
        """Presentation-independent key: triangle tuples up to rotation and
        reordering.  Two triangulations describe the same labeled complex
        exactly when their canonical forms agree."""
        normalized = []
        for tri, cor in zip(self.triangles, self.corners):
            rots = [(tri[r:] + tri[:r], cor[r:] + cor[:r]) for r in range(3)]
            normalized.append(min(rots))
        return (self.n_holes, tuple(sorted(normalized)), self.boundary_edges)

    # -- flips ---------------------------------------------------------------

    def is_flippable(self, e) -> bool:
        if not self.is_interior(e):
            return False
        (t1, k1), (t2, k2) = self._slots[e]
        if t1 == t2:
            return False
        a = self.triangles[t1][(k1 + 2) % 3]
        b = self.triangles[t2][(k2 + 1) % 3]
        c = self.triangles[t2][(k2 + 2) % 3]
        d = self.triangles[t1][(k1 + 1) % 3]
        return a != b and c != d

    def flip(self, e) -> FlipSquare:
        """Flip interior edge ``e``, returning the full quadrilateral data.

        The new diagonal reuses the id ``e`` and the two rewritten triangles
        keep their indices, so edge-indexed and triangle-indexed data stay
        aligned across a flip.
        """
        if not self.is_interior(e):
            raise ValueError(f"cannot flip boundary edge {e}")
        (t1, k1), (t2, k2) = self._slots[e]
        if t1 == t2:
            raise ValueError(f"edge {e} has both sides on one triangle; not flippable")
        tri_a, cor_a = self.triangles[t1], self.corners[t1]
        tri_b, cor_b = self.triangles[t2], self.corners[t2]
        d = tri_a[(k1 + 1) % 3]
        a = tri_a[(k1 + 2) % 3]
        b = tri_b[(k2 + 1) % 3]
        c = tri_b[(k2 + 2) % 3]
        if a == b or c == d:
            raise ValueError(f"flipping edge {e} would create a self-folded triangle")
        s = cor_a[k1]
        p = cor_a[(k1 + 1) % 3]
        q = cor_a[(k1 + 2) % 3]
        assert (cor_b[k2], cor_b[(k2 + 2) % 3]) == (q, s)
        r = cor_b[(k2 + 1) % 3]
        triangles = list(self.triangles)
        corners = list(self.corners)
        triangles[t1], corners[t1] = (e, c, d), (r, s, p)
        triangles[t2], corners[t2] = (e, a, b), (p, q, r)
        after = Triangulation(self.n_holes, triangles, corners,
                              self.boundary_edges, self.stages)
        return FlipSquare(before=self, after=after, edge=e, tri_a=t1, tri_b=t2,
                          rot_a=k1, rot_b=k2, side_a=a, side_b=b, side_c=c,
                          side_d=d, p=p, q=q, r=r, s=s)

    def relabel_edges(self, mapping) -> "Triangulation":
        """Exchange edge ids according to ``mapping`` (missing ids fixed)."""
        f = lambda e: mapping.get(e, e)
        stages = tuple(StageInfo(hole=st.hole, b=f(st.b), s=f(st.s), g1=f(st.g1),
                                 g2=f(st.g2), g3=f(st.g3), west=st.west,
                                 east=st.east, tent=st.tent, collar=st.collar,
                                 x_edge=f(st.x_edge), y_edge=f(st.y_edge),
                                 prev_b=f(st.prev_b), w_vertex=st.w_vertex,
                                 frame_rotation=st.frame_rotation)
                       for st in self.stages)
        return Triangulation(self.n_holes,
                             [tuple(f(e) for e in tri) for tri in self.triangles],
                             self.corners,
                             [f(e) for e in self.boundary_edges],
                             stages)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n_holes": self.n_holes,
            "triangles": [list(t) for t in self.triangles],
            "corners": [list(c) for c in self.corners],
            "boundary_edges": list(self.boundary_edges),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        tri = cls(data["n_holes"], data["triangles"], data["corners"],
                  data["boundary_edges"])
        ref = standard_triangulation(tri.n_holes)
        if tri == ref:
            return ref
        return tri

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Triangulation":
        return cls.from_json(json.loads(text))


def _with_end_tent(ref: Triangulation) -> Triangulation:
    """The reference triangulation with one more hole appended at the end."""
    m = ref.n_holes + 1
    base = 5 * m - 6
    b_new, s, g1, g2, g3 = base, base + 1, base + 2, base + 3, base + 4
    prev_b = ref.boundary_edges[m - 1]
    (rt, pos), = ref.slots_of(prev_b)
    rot = (pos - 1) % 3
    old_tri, old_cor = ref.triangles[rt], ref.corners[rt]
    frame_tri = tuple(old_tri[(rot + i) % 3] for i in range(3))
    frame_cor = tuple(old_cor[(rot + i) % 3] for i in range(3))
    x_edge, y_edge = frame_tri[0], frame_tri[2]
    v, w = frame_cor[0], frame_cor[2]
    assert frame_tri[1] == prev_b and frame_cor[1] == v == m - 1
    triangles = list(ref.triangles)
    corners = list(ref.corners)
    triangles[rt], corners[rt] = (x_edge, s, g3), (v, v, w)
    east, tent, collar = len(triangles), len(triangles) + 1, len(triangles) + 2
    triangles += [(g3, prev_b, y_edge), (b_new, g1, g2), (s, g1, g2)]
    corners += [(v, v, w), (m, v, m), (v, m, v)]
    stage = StageInfo(hole=m, b=b_new, s=s, g1=g1, g2=g2, g3=g3, west=rt,
                      east=east, tent=tent, collar=collar, x_edge=x_edge,
                      y_edge=y_edge, prev_b=prev_b, w_vertex=w,
                      frame_rotation=rot)
    return Triangulation(m, triangles, corners,
                         ref.boundary_edges + (b_new,), ref.stages + (stage,))


@lru_cache(maxsize=None)
def _standard(n: int) -> Triangulation:
    if n == 1:
        return Triangulation(1,
                             [(0, 2, 3), (3, 1, 2)],
                             [(0, 1, 0), (1, 1, 0)],
                             (0, 1))
    return _with_end_tent(_standard(n - 1))


def standard_triangulation(surface) -> Triangulation:
    """The reference triangulation of a surface (or of ``S(n)`` for int n).

    The disk without holes admits no triangulation in this scheme; passing
    ``n = 0`` is an error.
    """
    n = surface.n_holes if isinstance(surface, MarkedSurface) else surface
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"expected a surface or a hole count, got {surface!r}")
    if n == 0:
        raise ValueError("the disk with no holes has no marked-point triangulation; "
                         "handle it as a degenerate case upstream")
    return _standard(n)
