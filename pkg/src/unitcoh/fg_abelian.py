"""Exact integer linear algebra for finitely generated abelian groups.

Everything runs over Python's unbounded integers: Smith normal form with
unimodular transforms, linear solving modulo a relation lattice, quotient
presentations and element orders.  Matrices are dense; the module sizes in
this package (a few hundred generators at most) never justify sparsity.
"""

from fractions import Fraction
from math import gcd, lcm, prod

from .errors import InfiniteOrder, NoSolution


class IntMatrix:
    """Dense integer matrix.  Zero-dimensional shapes are allowed."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        if self.nrows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise ValueError("ragged rows")
        else:
            if ncols is None:
                raise ValueError("need ncols for a 0-row matrix")
            self.ncols = ncols

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, r, c):
        return cls([[0] * c for _ in range(r)], ncols=c)

    @classmethod
    def from_cols(cls, cols, nrows):
        return cls([[col[i] for col in cols] for i in range(nrows)], ncols=len(cols))

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)],
                   ncols=n)

    def copy(self):
        return IntMatrix([r[:] for r in self.rows], ncols=self.ncols)

    def col(self, j):
        return [r[j] for r in self.rows]

    def transpose(self):
        return IntMatrix([[self.rows[i][j] for i in range(self.nrows)]
                          for j in range(self.ncols)], ncols=self.nrows)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("row mismatch")
        return IntMatrix([a + b for a, b in zip(self.rows, other.rows)],
                         ncols=self.ncols + other.ncols)

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise ValueError("column mismatch")
        return IntMatrix(self.rows + other.rows, ncols=self.ncols)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            ot = other.transpose().rows
            return IntMatrix(
                [[sum(a * b for a, b in zip(row, col)) for col in ot]
                 for row in self.rows],
                ncols=other.ncols)
        # vector
        if len(other) != self.ncols:
            raise ValueError("shape mismatch")
        return [sum(a * b for a, b in zip(row, other)) for row in self.rows]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.ncols == other.ncols \
            and self.rows == other.rows

    def __repr__(self):
        return f"IntMatrix({self.rows!r})"

    def det(self):
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        if n == 0:
            return 1
        a = [r[:] for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse_unimodular(self):
        """Exact inverse; the matrix must be invertible over Q with integer inverse."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of non-square matrix")
        a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
             for i, row in enumerate(self.rows)]
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                raise ValueError("matrix is singular")
            a[k], a[piv] = a[piv], a[k]
            inv = 1 / a[k][k]
            a[k] = [x * inv for x in a[k]]
            for i in range(n):
                if i != k and a[i][k] != 0:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        out = []
        for i in range(n):
            row = []
            for j in range(n, 2 * n):
                if a[i][j].denominator != 1:
                    raise ValueError("inverse is not integral")
                row.append(int(a[i][j]))
            out.append(row)
        return IntMatrix(out, ncols=n)


def smith_normal_form(A):
    """Return (U, D, V) with U @ A @ V = D, U and V unimodular, D diagonal
    with d1 | d2 | ... and nonnegative entries.

    Pivoting rule is fixed (smallest nonzero absolute value, ties row-major)
    so the output is deterministic for a given input.
    """
    m, k = A.nrows, A.ncols
    D = [row[:] for row in A.rows]
    U = IntMatrix.identity(m).rows
    V = IntMatrix.identity(k).rows  # stored row-wise; column ops act on all rows

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, k):
        # pivot: smallest nonzero |entry| in the trailing submatrix, row-major ties
        best = None
        for i in range(t, m):
            for j in range(t, k):
                v = abs(D[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])

        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, k):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the rest of the submatrix for the chain
            piv = D[t][t]
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, k):
                    if D[i][j] % piv:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)

        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    return (IntMatrix(U, ncols=m), IntMatrix(D, ncols=k), IntMatrix(V, ncols=k))


def solve_mod_lattice(A, b, R):
    """Solve A @ x == b modulo the column span of R.

    Returns (x, hom) where x is one solution and hom is a generating set of
    all homogeneous solutions (x projections of the integer kernel of
    [A | R]).  Raises NoSolution with a certificate otherwise.
    """
    if A.nrows != len(b) or A.nrows != R.nrows:
        raise ValueError("shape mismatch")
    n = A.ncols
    stacked = A.hstack(R)
    U, D, V = smith_normal_form(stacked)
    c = U @ b
    w = stacked.ncols
    z = [0] * w
    for i in range(A.nrows):
        d = D.rows[i][i] if i < w else 0
        if d == 0:
            if c[i] != 0:
                raise NoSolution("inconsistent system", certificate=(U.rows[i], 0))
        else:
            if c[i] % d:
                raise NoSolution("divisibility obstruction",
                                 certificate=(U.rows[i], d))
            z[i] = c[i] // d
    xy = V @ z
    x = xy[:n]
    hom = []
    for j in range(w):
        if j >= A.nrows or D.rows[j][j] == 0:
            g = V.col(j)[:n]
            if any(g):
                hom.append(g)
    return x, hom


class FgAbelianPresentation:
    """Z^m modulo the column span of an integer relation matrix."""

    def __init__(self, ngens, relations):
        if relations.nrows != ngens:
            raise ValueError("relation matrix must have one row per generator")
        self.ngens = ngens
        self.relations = relations
        self._snf = None
        self._uinv = None

    def __repr__(self):
        return f"FgAbelianPresentation(ngens={self.ngens}, factors={self.invariant_factors()})"

    def snf(self):
        if self._snf is None:
            self._snf = smith_normal_form(self.relations)
        return self._snf

    def diagonal(self):
        """Length-ngens list of elementary divisors; 0 marks a free direction."""
        _, D, _ = self.snf()
        out = []
        for i in range(self.ngens):
            out.append(D.rows[i][i] if i < D.ncols else 0)
        return out

    def invariant_factors(self):
        return [d for d in self.diagonal() if d != 1]

    def is_finite(self):
        return all(d != 0 for d in self.diagonal())

    def order(self):
        if not self.is_finite():
            return None
        return prod(self.diagonal())

    def _u_inverse(self):
        if self._uinv is None:
            U, _, _ = self.snf()
            self._uinv = U.inverse_unimodular()
        return self._uinv

    def contains(self, x):
        """Is x in the relation lattice, i.e. zero in the presented group?"""
        U, _, _ = self.snf()
        y = U @ list(x)
        for yi, d in zip(y, self.diagonal()):
            if d == 0:
                if yi != 0:
                    return False
            elif yi % d:
                return False
        return True

    def reduce(self, x):
        """Canonical coset representative of x."""
        U, _, _ = self.snf()
        y = U @ list(x)
        y = [yi % d if d else yi for yi, d in zip(y, self.diagonal())]
        return tuple(self._u_inverse() @ y)

    def element_order(self, x):
        U, _, _ = self.snf()
        y = U @ list(x)
        order = 1
        for yi, d in zip(y, self.diagonal()):
            if d == 0:
                if yi != 0:
                    raise InfiniteOrder(f"free direction with coordinate {yi}")
                continue
            order = lcm(order, d // gcd(d, yi % d))
        return order


def quotient_presentation(P, subgroup_generators):
    """Present P modulo the subgroup generated by the given coordinate vectors.

    The quotient keeps P's generators, so the coordinate projection is the
    identity map.
    """
    if subgroup_generators:
        S = IntMatrix.from_cols([list(g) for g in subgroup_generators], P.ngens)
        rel = P.relations.hstack(S)
    else:
        rel = P.relations
    Q = FgAbelianPresentation(P.ngens, rel)
    return Q, lambda x: tuple(x)


def element_order(P, x):
    return P.element_order(x)


def subgroup_contains(P, generators, x):
    """Is x in the subgroup of P generated by the given vectors?"""
    if not generators:
        return P.contains(x)
    G = IntMatrix.from_cols([list(g) for g in generators], P.ngens)
    try:
        solve_mod_lattice(G, list(x), P.relations)
        return True
    except NoSolution:
        return False


def subgroups_equal(P, gens_a, gens_b):
    """Two-way generator membership inside the presentation P."""
    return all(subgroup_contains(P, gens_b, g) for g in gens_a) and \
        all(subgroup_contains(P, gens_a, g) for g in gens_b)
