"""Exact linear algebra over the rationals (and any exact field).

Everything here is division-based Gauss-Jordan over exact field elements;
no floating point ever decides a rank.  The functions are generic over
the entry type: anything with +, -, *, /, == 0 works, so the same code
serves rational scalars and rational functions.

``GramRank`` maintains the rank of a growing family of vectors through
an incremental exact LDL^T factorization of their Gram matrix.  Over an
ordered field rank(G) = rank of the family, and positive semidefiniteness
makes pivot skipping safe: a zero pivot certifies a dependent vector.
"""

from .scalars import QQ, ZERO, ONE

__all__ = [
    "mat_mul",
    "mat_vec",
    "identity_like",
    "rref",
    "rank",
    "nullspace_sparse",
    "nullspace_dense",
    "solve_particular",
    "det",
    "GramRank",
]


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    assert len(A[0]) == k, "inner dimensions must agree"
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(m):
            acc = Ai[0] * B[0][j]
            for t in range(1, k):
                acc = acc + Ai[t] * B[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_vec(A, v):
    out = []
    for row in A:
        acc = row[0] * v[0]
        for t in range(1, len(v)):
            acc = acc + row[t] * v[t]
        out.append(acc)
    return tuple(out)


def identity_like(n, one, zero):
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def rref(rows):
    """Reduced row echelon form.  Returns (pivot column list, reduced rows).

    Zero rows are dropped; the reduced rows are a canonical basis of the
    row space, so two row sets span the same space iff their rref output
    is equal.
    """
    work = [list(r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, len(work)):
            if work[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        inv = work[r][c]
        work[r] = [x / inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                wr = work[r]
                work[i] = [a - f * b for a, b in zip(work[i], wr)]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return pivots, [tuple(row) for row in work[:r]]


def rank(rows):
    return len(rref(rows)[0])


def nullspace_sparse(rows, ncols):
    """Kernel basis as sparse dicts {column: coefficient}, one per free column.

    The basis is the reduced-echelon one: vector for free column f has a 1
    at f and -rref[r][f] at each pivot column, zeros elsewhere.
    """
    pivots, red = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec = {f: ONE}
        for r, p in enumerate(pivots):
            c = red[r][f]
            if c != 0:
                vec[p] = -c
        basis.append(vec)
    return pivots, basis


def nullspace_dense(rows, ncols):
    pivots, basis = nullspace_sparse(rows, ncols)
    dense = []
    for vec in basis:
        dense.append(tuple(vec.get(j, ZERO) for j in range(ncols)))
    return pivots, dense


def solve_particular(A, b):
    """One exact solution of A x = b with free variables set to 0, or None."""
    if not A:
        return None
    ncols = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    pivots, red = rref(aug)
    if ncols in pivots:
        return None  # inconsistent: pivot in the constant column
    x = [ZERO] * ncols
    for r, p in enumerate(pivots):
        x[p] = red[r][ncols]
    return tuple(x)


def det(A):
    """Determinant by exact elimination with division; generic over fields."""
    n = len(A)
    work = [list(row) for row in A]
    sign = 1
    result = None
    for c in range(n):
        sel = None
        for i in range(c, n):
            if work[i][c] != 0:
                sel = i
                break
        if sel is None:
            return work[0][0] - work[0][0]  # a zero of the right type
        if sel != c:
            work[c], work[sel] = work[sel], work[c]
            sign = -sign
        piv = work[c][c]
        result = piv if result is None else result * piv
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] / piv
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    if sign < 0:
        result = -result
    return result


class GramRank:
    """Rank of a growing vector family via exact incremental LDL^T.

    ``pair(a, b)`` must return the exact inner product of the vectors
    labeled a and b.  ``add(label)`` reports whether the new vector is
    independent of those already accepted; dependent vectors are
    discarded (their Schur complement row is identically zero because
    the Gram matrix is positive semidefinite over Q).
    """

    def __init__(self, pair):
        self.pair = pair
        self.labels = []       # labels of independent vectors, in order
        self._w = []           # per pivot: coefficients against earlier pivots
        self._d = []           # per pivot: nonzero LDL diagonal entry

    @property
    def rank(self):
        return len(self.labels)

    def _forward(self, label):
        b = [self.pair(label, lj) for lj in self.labels]
        c = self.pair(label, label)
        w = []
        for t in range(len(self.labels)):
            s = b[t]
            wt = self._w[t]
            for j in range(t):
                s -= w[j] * wt[j] * self._d[j]
            w.append(s / self._d[t])
        dnew = c
        for j in range(len(w)):
            dnew -= w[j] * w[j] * self._d[j]
        return w, dnew

    def add(self, label):
        w, dnew = self._forward(label)
        if dnew == 0:
            return False
        self.labels.append(label)
        self._w.append(w)
        self._d.append(dnew)
        return True

    def in_span(self, label):
        """True iff the labeled vector lies in the span of accepted ones."""
        return self._forward(label)[1] == 0
