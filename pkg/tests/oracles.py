"""Independent oracles used to cross-check the package.

Everything here is computed from first principles with no imports from
``openbook_lab``, so a bug in the package cannot leak into its own
expected values.

Annulus model: the essential arcs of a marked annulus, up to isotopy, are
the connectors ``a_j`` between the two marked points, indexed by winding
number ``j`` relative to ``a_0``.  Two such arcs can be isotoped to meet in
exactly ``max(|j - k| - 1, 0)`` interior points, the core twist acts by
``j -> j + s``, and since adjacency in the arc complex means ``|j - k| <= 1``
the arc-complex distance is ``|j - k|`` (each step moves the winding by at
most one, and a path stepping by one realizes the bound).
"""


def annulus_intersection(j, k):
    """Geometric intersection number of winding arcs ``a_j`` and ``a_k``."""
    return max(abs(j - k) - 1, 0)


def annulus_twist(s, j):
    """Index of the image of ``a_j`` under ``s`` core twists."""
    return j + s


def annulus_distance(j, k):
    """Arc-complex distance between ``a_j`` and ``a_k``."""
    return abs(j - k)


def annulus_translation_distance(s):
    """Arc-complex translation distance of ``s`` core twists.

    ``d(a_j, a_{j+s}) = |s|`` independently of ``j``, so the infimum over
    starting arcs is ``|s|`` on the nose.
    """
    return abs(s)


def annulus_right_veering(s):
    """Whether ``s`` core twists send every arc (weakly) to the right.

    The identity is vacuously right-veering; a negative twist moves every
    connector to the left at both ends.
    """
    return s >= 0
