"""Exact integer linear algebra and finite-presentation utilities.

Everything in this module is arbitrary precision.  The matrices that show
up elsewhere in the package are small (a handful of rows per boundary
component or twist), but elimination can grow entries quickly, so no
floating point is used anywhere.

Conventions:

- An ``IntMatrix`` presenting an abelian group has one row per generator
  and one column per relation: the group is Z^nrows / (column span).
- Group words are strings over single-letter generator names, with an
  uppercase letter standing for the inverse of the lowercase generator
  (so ``"abA"`` is the conjugate a b a^-1).  Juxtaposition is group
  multiplication; permutations act on the left, so the rightmost letter
  of a word is applied first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) and g >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class IntMatrix:
    """An immutable rectangular matrix of Python ints.

    Zero-row and zero-column matrices are allowed; for those the missing
    dimension must be passed explicitly because it cannot be inferred
    from the entries.
    """

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        frozen = tuple(tuple(row) for row in rows)
        if frozen:
            width = len(frozen[0])
            if ncols is not None and ncols != width:
                raise ValueError(f"ncols={ncols} but rows have {width} entries")
            ncols = width
        elif ncols is None:
            ncols = 0
        for row in frozen:
            if len(row) != ncols:
                raise ValueError("ragged rows in matrix")
            for entry in row:
                if not isinstance(entry, int):
                    raise ValueError(f"non-integer entry {entry!r}")
        object.__setattr__(self, "_rows", frozen)
        object.__setattr__(self, "nrows", len(frozen))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self._rows[i][j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self._rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(
                f"shape mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}"
            )
        out = []
        for i in range(self.nrows):
            row = self._rows[i]
            out.append(
                [
                    sum(row[k] * other._rows[k][j] for k in range(self.ncols))
                    for j in range(other.ncols)
                ]
            )
        return IntMatrix(out, ncols=other.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._rows == other._rows and self.ncols == other.ncols

    def __hash__(self) -> int:
        return hash((self._rows, self.ncols))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(row) for row in self._rows]!r})"

    def to_json(self) -> list[list[str]]:
        """Entries as strings, protecting big integers from JSON readers."""
        return [[str(entry) for entry in row] for row in self._rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]], ncols: int | None = None) -> "IntMatrix":
        return cls([[int(entry) for entry in row] for row in data], ncols=ncols)


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Raises ValueError on a non-square matrix.  The determinant of the
    empty 0x0 matrix is 1.
    """
    if a.nrows != a.ncols:
        raise ValueError(f"determinant of non-square {a.nrows}x{a.ncols} matrix")
    n = a.nrows
    if n == 0:
        return 1
    m = [list(row) for row in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # Exact by Sylvester's identity: prev divides the product.
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def smith_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (d, u, v) with u @ a @ v == d in Smith normal form.

    d is diagonal with nonnegative entries d_1 | d_2 | ... ; u and v are
    unimodular.  All three claims are asserted before returning, so a
    wrong answer cannot escape silently.
    """
    nr, nc = a.nrows, a.ncols
    m = [list(row) for row in a.rows]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i1: int, i2: int) -> None:
        m[i1], m[i2] = m[i2], m[i1]
        u[i1], u[i2] = u[i2], u[i1]

    def swap_cols(j1: int, j2: int) -> None:
        for row in m:
            row[j1], row[j2] = row[j2], row[j1]
        for row in v:
            row[j1], row[j2] = row[j2], row[j1]

    def add_row(src: int, dst: int, q: int) -> None:
        # row[dst] += q * row[src]
        m_src, m_dst = m[src], m[dst]
        for j in range(nc):
            m_dst[j] += q * m_src[j]
        u_src, u_dst = u[src], u[dst]
        for j in range(nr):
            u_dst[j] += q * u_src[j]

    def add_col(src: int, dst: int, q: int) -> None:
        # col[dst] += q * col[src]
        for row in m:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i: int) -> None:
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        # Choose the smallest-magnitude nonzero entry of the trailing
        # submatrix as pivot; small pivots keep the Euclidean loop short.
        pivot_pos = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0 and (
                    pivot_pos is None
                    or abs(m[i][j]) < abs(m[pivot_pos[0]][pivot_pos[1]])
                ):
                    pivot_pos = (i, j)
        if pivot_pos is None:
            break
        if pivot_pos[0] != t:
            swap_rows(t, pivot_pos[0])
        if pivot_pos[1] != t:
            swap_cols(t, pivot_pos[1])

        while True:
            # Clear column t below the pivot.  A nonzero remainder after
            # division becomes the new, strictly smaller pivot.
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    add_row(t, i, -q)
                    if m[i][t] != 0:
                        swap_rows(t, i)
            if any(m[i][t] for i in range(t + 1, nr)):
                continue
            # Clear row t right of the pivot; a column swap here can put
            # nonzeros back into column t, hence the outer loop.
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    add_col(t, j, -q)
                    if m[t][j] != 0:
                        swap_cols(t, j)
            if any(m[t][j] for j in range(t + 1, nc)):
                continue
            if any(m[i][t] for i in range(t + 1, nr)):
                continue
            break

        # Divisibility: the pivot must divide every remaining entry.  If
        # it does not, fold the offending row into row t and redo the
        # clearing; |pivot| strictly shrinks, so this terminates.
        pivot = m[t][t]
        offender = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if m[i][j] % pivot != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, t, 1)
            continue
        t += 1

    for i in range(limit):
        if m[i][i] < 0:
            negate_row(i)

    d = IntMatrix(m, ncols=nc)
    u_mat = IntMatrix(u, ncols=nr)
    v_mat = IntMatrix(v, ncols=nc)

    assert u_mat @ a @ v_mat == d, "SNF recomposition failed"
    assert abs(determinant(u_mat)) == 1, "left transform not unimodular"
    assert abs(determinant(v_mat)) == 1, "right transform not unimodular"
    for i in range(limit):
        for j in range(nc):
            if i != j:
                assert d[i, j] == 0, "SNF result not diagonal"
        if i + 1 < limit and d[i, i] != 0:
            assert d[i + 1, i + 1] % d[i, i] == 0, "SNF divisibility chain broken"
        if d[i, i] == 0 and i + 1 < limit:
            assert d[i + 1, i + 1] == 0, "zero before nonzero on SNF diagonal"
    return d, u_mat, v_mat


def cokernel_invariants(a: IntMatrix) -> list[int]:
    """Invariant factors of Z^nrows / (column span of a).

    Returns the torsion factors > 1 in divisibility order, followed by
    one 0 per free summand.  The product of the returned list (empty
    product = 1) is the group order, with 0 meaning infinite.
    """
    d, _, _ = smith_normal_form(a)
    diag = [d[i, i] for i in range(min(a.nrows, a.ncols))]
    rank = sum(1 for x in diag if x != 0)
    torsion = [x for x in diag if x > 1]
    return torsion + [0] * (a.nrows - rank)


def group_order_from_invariants(invariants: Sequence[int]) -> int:
    """Product of invariant factors: the group order, 0 meaning infinite."""
    order = 1
    for factor in invariants:
        order *= factor
    return order


@dataclass(frozen=True)
class FinitePresentation:
    """A finite group presentation with single-letter generator names.

    Relators are words in the letter convention described in the module
    docstring.  Only validation and quotient checking live here; no
    general decision procedures are attempted.
    """

    generators: tuple[str, ...]
    relators: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for g in self.generators:
            if len(g) != 1 or not g.isalpha() or not g.islower():
                raise ValueError(f"generator {g!r} is not a single lowercase letter")
            if g in seen:
                raise ValueError(f"duplicate generator {g!r}")
            seen.add(g)
        for word in self.relators:
            for letter in word:
                if letter.lower() not in seen:
                    raise ValueError(f"relator {word!r} uses undeclared letter {letter!r}")


Permutation = tuple[int, ...]


def _check_permutation(p: Permutation, degree: int, label: str) -> None:
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise ValueError(f"image of {label!r} is not a permutation of {degree} symbols")


def _perm_mul(p: Permutation, q: Permutation) -> Permutation:
    """Composite p after q: (p*q)[i] = p[q[i]]."""
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_inv(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, image in enumerate(p):
        out[image] = i
    return tuple(out)


def evaluate_word(word: str, images: dict[str, Permutation]) -> Permutation:
    """Evaluate a word at the given generator images.

    The rightmost letter acts first (left action convention).
    """
    degrees = {len(p) for p in images.values()}
    if len(degrees) != 1:
        raise ValueError("generator images act on different symbol sets")
    result = tuple(range(degrees.pop()))
    for letter in reversed(word):
        base = images.get(letter.lower())
        if base is None:
            raise ValueError(f"word uses letter {letter!r} with no image")
        result = _perm_mul(base if letter.islower() else _perm_inv(base), result)
    return result


@dataclass(frozen=True)
class QuotientReport:
    holds: bool
    image_order: int
    abelian: bool


def check_finite_quotient(
    presentation: FinitePresentation, images: dict[str, Permutation]
) -> QuotientReport:
    """Check whether generator images define a quotient of the presentation.

    ``holds`` is true iff every relator evaluates to the identity
    permutation.  ``image_order`` is the order of the subgroup generated
    by the images (computed by closure, feasible for the small brute
    force searches this package performs) and ``abelian`` reports
    whether that subgroup is abelian.
    """
    declared = set(presentation.generators)
    given = set(images)
    if given != declared:
        extra = sorted(given - declared)
        missing = sorted(declared - given)
        raise ValueError(
            f"generator images do not match presentation (extra={extra}, missing={missing})"
        )
    degrees = {len(p) for p in images.values()}
    if len(degrees) != 1:
        raise ValueError("generator images act on different symbol sets")
    degree = degrees.pop()
    for name, p in images.items():
        _check_permutation(p, degree, name)

    holds = all(
        evaluate_word(word, images) == tuple(range(degree))
        for word in presentation.relators
    )

    generators = list(images.values())
    identity = tuple(range(degree))
    closure = {identity}
    frontier = [identity]
    while frontier:
        current = frontier.pop()
        for g in generators:
            nxt = _perm_mul(g, current)
            if nxt not in closure:
                closure.add(nxt)
                frontier.append(nxt)

    abelian = all(
        _perm_mul(g, h) == _perm_mul(h, g)
        for i, g in enumerate(generators)
        for h in generators[i + 1 :]
    )
    return QuotientReport(holds=holds, image_order=len(closure), abelian=abelian)
