"""Exact dense linear algebra over a FieldCtx.

Matrices are immutable tuples of tuples of element codes.  Subspaces are held
in reduced row echelon form, so equal subspaces compare equal and hash equal.
Everything here is plain Gaussian elimination; a numpy-table fast path for
rank over small fields lives at the bottom for the Monte Carlo loops.
"""

from __future__ import annotations

import itertools
import random

from .errors import CapExceededError, InvalidConfigError
from .gf import FieldCtx

ENUM_CAP = 10**7


class Matrix:
    __slots__ = ("ctx", "rows", "nrows", "ncols")

    def __init__(self, ctx: FieldCtx, rows):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise InvalidConfigError("ragged matrix rows")
        self.ctx = ctx
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0

    @classmethod
    def zero(cls, ctx, nrows, ncols):
        return cls(ctx, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def random(cls, ctx, nrows, ncols, rng: random.Random):
        return cls(ctx, [[rng.randrange(ctx.order) for _ in range(ncols)] for _ in range(nrows)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def add(self, other):
        f = self.ctx.add
        return Matrix(self.ctx, [[f(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def sub(self, other):
        f = self.ctx.sub
        return Matrix(self.ctx, [[f(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def neg(self):
        f = self.ctx.neg
        return Matrix(self.ctx, [[f(a) for a in r] for r in self.rows])

    def scale(self, c):
        f = self.ctx.mul
        return Matrix(self.ctx, [[f(c, a) for a in r] for r in self.rows])

    def mul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise InvalidConfigError("shape mismatch %s @ %s" % (self.shape, other.shape))
        ctx = self.ctx
        cols = list(zip(*other.rows)) if other.rows else []
        out = []
        for row in self.rows:
            new = []
            for col in cols:
                acc = 0
                for a, b in zip(row, col):
                    if a and b:
                        acc = ctx.add(acc, ctx.mul(a, b))
                new.append(acc)
            out.append(new)
        return Matrix(ctx, out)

    def transpose(self):
        return Matrix(self.ctx, list(zip(*self.rows)) if self.rows else [])

    def apply(self, vec):
        """Matrix times column vector (vec given as a flat tuple)."""
        ctx = self.ctx
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, vec):
                if a and b:
                    acc = ctx.add(acc, ctx.mul(a, b))
            out.append(acc)
        return tuple(out)

    def is_zero(self):
        return all(all(a == 0 for a in r) for r in self.rows)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.ctx == other.ctx and self.rows == other.rows

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.e, self.rows))

    def __repr__(self):
        return "Matrix(%dx%d over GF(%d^%d))" % (self.nrows, self.ncols, self.ctx.p, self.ctx.e)


def rref(rows, ctx: FieldCtx):
    """Reduced row echelon form. Returns (nonzero rows as tuples, pivot columns)."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = ctx.inv(mat[r][c])
        if inv != 1:
            mat[r] = [ctx.mul(inv, a) for a in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


class Subspace:
    """A subspace of ctx^ambient_dim held as a canonical RREF basis."""

    __slots__ = ("ctx", "ambient_dim", "basis", "pivots")

    def __init__(self, ctx: FieldCtx, ambient_dim: int, basis, pivots=None):
        self.ctx = ctx
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(r) for r in basis)
        if pivots is None:
            pivots = tuple(next(j for j, a in enumerate(row) if a) for row in self.basis)
        self.pivots = tuple(pivots)

    @classmethod
    def from_vectors(cls, ctx, ambient_dim, vectors):
        vectors = [tuple(v) for v in vectors]
        if any(len(v) != ambient_dim for v in vectors):
            raise InvalidConfigError("vector length != ambient dimension")
        basis, pivots = rref(vectors, ctx)
        return cls(ctx, ambient_dim, basis, pivots)

    @classmethod
    def zero(cls, ctx, ambient_dim):
        return cls(ctx, ambient_dim, [], [])

    @classmethod
    def full(cls, ctx, ambient_dim):
        return cls(
            ctx,
            ambient_dim,
            [[1 if i == j else 0 for j in range(ambient_dim)] for i in range(ambient_dim)],
            range(ambient_dim),
        )

    @property
    def dim(self):
        return len(self.basis)

    def reduce(self, vec):
        """Residue of vec modulo the subspace (zero iff vec is a member)."""
        ctx = self.ctx
        vec = list(vec)
        for row, c in zip(self.basis, self.pivots):
            f = vec[c]
            if f:
                vec = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(vec, row)]
        return tuple(vec)

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def enumerate_vectors(self, cap=ENUM_CAP):
        n = self.ctx.order**self.dim
        if n > cap:
            raise CapExceededError("subspace has %d vectors, cap %d" % (n, cap))
        ctx = self.ctx
        for coeffs in itertools.product(range(ctx.order), repeat=self.dim):
            vec = [0] * self.ambient_dim
            for c, row in zip(coeffs, self.basis):
                if c:
                    for j, b in enumerate(row):
                        if b:
                            vec[j] = ctx.add(vec[j], ctx.mul(c, b))
            yield tuple(vec)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ctx == other.ctx
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return "Subspace(dim %d of GF(%d^%d)^%d)" % (self.dim, self.ctx.p, self.ctx.e, self.ambient_dim)


class EchelonAccumulator:
    """Incremental span tracker: feed vectors, watch the rank grow."""

    def __init__(self, ctx: FieldCtx, ambient_dim: int):
        self.ctx = ctx
        self.ambient_dim = ambient_dim
        self.rows = []  # (pivot index, reduced row)

    @property
    def rank(self):
        return len(self.rows)

    def residue(self, vec):
        ctx = self.ctx
        vec = list(vec)
        for c, row in self.rows:
            f = vec[c]
            if f:
                vec = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(vec, row)]
        return vec

    def add(self, vec) -> bool:
        """Returns True when vec enlarged the span."""
        vec = self.residue(vec)
        pivot = next((j for j, a in enumerate(vec) if a), None)
        if pivot is None:
            return False
        inv = self.ctx.inv(vec[pivot])
        if inv != 1:
            vec = [self.ctx.mul(inv, a) for a in vec]
        self.rows.append((pivot, vec))
        self.rows.sort(key=lambda t: t[0])
        return True

    def copy(self) -> "EchelonAccumulator":
        out = EchelonAccumulator(self.ctx, self.ambient_dim)
        out.rows = list(self.rows)
        return out

    def subspace(self) -> Subspace:
        return Subspace.from_vectors(self.ctx, self.ambient_dim, [r for _, r in self.rows])


def rank_nullspace(m: Matrix):
    """(rank, row space, null space) of m, the latter two canonical."""
    basis, pivots = rref(m.rows, m.ctx)
    rank = len(basis)
    rowspace = Subspace(m.ctx, m.ncols, basis, pivots)
    ctx = m.ctx
    free = [j for j in range(m.ncols) if j not in pivots]
    null_vecs = []
    for j in free:
        vec = [0] * m.ncols
        vec[j] = 1
        for row, c in zip(basis, pivots):
            vec[c] = ctx.neg(row[j])
        null_vecs.append(vec)
    nullspace = Subspace.from_vectors(ctx, m.ncols, null_vecs)
    if nullspace.dim != m.ncols - rank:
        raise InvalidConfigError("rank-nullity bookkeeping failed")  # pragma: no cover
    return rank, rowspace, nullspace


def gaussian_binomial(n: int, l: int, q: int) -> int:
    """Number of l-dimensional subspaces of an n-dimensional space over GF(q)."""
    if l < 0 or l > n:
        return 0
    num = 1
    den = 1
    for i in range(l):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def enumerate_subspaces(ambient_dim: int, l: int, ctx: FieldCtx, cap=ENUM_CAP):
    """Yield every l-dimensional subspace exactly once, via RREF patterns."""
    total = gaussian_binomial(ambient_dim, l, ctx.order)
    if total > cap:
        raise CapExceededError("%d subspaces exceed cap %d" % (total, cap))
    if l == 0:
        yield Subspace.zero(ctx, ambient_dim)
        return
    order = ctx.order
    for pivots in itertools.combinations(range(ambient_dim), l):
        pivset = set(pivots)
        free = [
            (i, j)
            for i in range(l)
            for j in range(pivots[i] + 1, ambient_dim)
            if j not in pivset
        ]
        for values in itertools.product(range(order), repeat=len(free)):
            rows = [[0] * ambient_dim for _ in range(l)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield Subspace(ctx, ambient_dim, rows, pivots)


def enumerate_superspaces(sub: Subspace, l: int, cap=ENUM_CAP):
    """Yield the l-dimensional subspaces containing sub (lift from the quotient)."""
    n, d = sub.ambient_dim, sub.dim
    if l < d or l > n:
        return
    ctx = sub.ctx
    complement = [j for j in range(n) if j not in sub.pivots]
    for qspace in enumerate_subspaces(len(complement), l - d, ctx, cap):
        vecs = list(sub.basis)
        for row in qspace.basis:
            lifted = [0] * n
            for idx, j in enumerate(complement):
                lifted[j] = row[idx]
            vecs.append(lifted)
        yield Subspace.from_vectors(ctx, n, vecs)


def random_matrix(ctx, nrows, ncols, rng: random.Random) -> Matrix:
    return Matrix.random(ctx, nrows, ncols, rng)


def random_subspace(ambient_dim: int, l: int, ctx: FieldCtx, rng: random.Random) -> Subspace:
    """Uniformly random l-dimensional subspace, by full-rank rejection sampling."""
    if l < 0 or l > ambient_dim:
        raise InvalidConfigError("need 0 <= l <= ambient_dim")
    while True:
        m = Matrix.random(ctx, l, ambient_dim, rng)
        basis, pivots = rref(m.rows, ctx)
        if len(basis) == l:
            return Subspace(ctx, ambient_dim, basis, pivots)


# ---------------------------------------------------------------------------
# field element matrix <-> prime field vector flattening.
# Convention used everywhere: entries row-major, each entry expanded into its
# e coefficient coordinates, lowest degree first.

def flatten_matrix(m: Matrix) -> tuple:
    out = []
    for row in m.rows:
        for a in row:
            out.extend(m.ctx.to_vector(a))
    return tuple(out)


def unflatten_matrix(vec, ctx: FieldCtx, nrows: int, ncols: int) -> Matrix:
    e = ctx.e
    if len(vec) != nrows * ncols * e:
        raise InvalidConfigError("flattened length mismatch")
    rows = []
    k = 0
    for _ in range(nrows):
        row = []
        for _ in range(ncols):
            row.append(ctx.from_vector(vec[k : k + e]))
            k += e
        rows.append(row)
    return Matrix(ctx, rows)


# ---------------------------------------------------------------------------
# numpy fast path used by the Monte Carlo loops

def np_rank(mat, ctx: FieldCtx) -> int:
    """Rank of a 2-d numpy array of element codes over ctx (order <= 512)."""
    import numpy as np

    a = np.array(mat, dtype=np.int16)
    if a.size == 0:
        return 0
    nrows, ncols = a.shape
    if ctx.e == 1:
        p = ctx.p
        rank = 0
        for col in range(ncols):
            nz = np.nonzero(a[rank:, col])[0]
            if nz.size == 0:
                continue
            piv = rank + nz[0]
            a[[rank, piv]] = a[[piv, rank]]
            row = (a[rank] * pow(int(a[rank, col]), -1, p)) % p
            a[rank] = row
            factors = a[:, col].copy()
            factors[rank] = 0
            a = (a - np.outer(factors, row)) % p
            rank += 1
            if rank == nrows:
                break
        return rank
    add_t, mul_t, neg_t, inv_t = ctx.table_arrays()
    rank = 0
    for col in range(ncols):
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        a[[rank, piv]] = a[[piv, rank]]
        row = mul_t[int(inv_t[a[rank, col]]), a[rank]]
        a[rank] = row
        factors = a[:, col].copy()
        factors[rank] = 0
        delta = mul_t[neg_t[factors][:, None], row[None, :]]
        a = add_t[a, delta]
        rank += 1
        if rank == nrows:
            break
    return rank
