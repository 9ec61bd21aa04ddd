"""Matrix systems, their hom spaces, block constructions, bimaps, and the
right nucleus.

A hom pair (A, B) for systems Phi (s x b) and Ups (a x t) satisfies
A Phi_i = sign * Ups_i B^t for every i.  The solution space is computed as
one flat linear system over the common field: a*s + b*t unknowns (entries of
A then B, row-major) and c*a*b equations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceededError, InvalidConfigError, PropertyViolationError
from .gf import FieldCtx, make_field
from .linalg import EchelonAccumulator, Matrix, Subspace, rank_nullspace, rref

_ROOT_SEARCH_CAP = 1 << 20


class MatrixSystem:
    """An ordered list of equally shaped matrices over one field."""

    __slots__ = ("ctx", "shape", "mats")

    def __init__(self, ctx: FieldCtx, shape, mats):
        self.ctx = ctx
        self.shape = (int(shape[0]), int(shape[1]))
        mats = tuple(mats)
        for m in mats:
            if m.ctx != ctx:
                raise InvalidConfigError("system members over different fields")
            if m.shape != self.shape:
                raise InvalidConfigError("system members differ in shape")
        self.mats = mats

    @classmethod
    def from_matrices(cls, mats) -> "MatrixSystem":
        mats = list(mats)
        if not mats:
            raise InvalidConfigError("cannot infer shape from an empty system")
        return cls(mats[0].ctx, mats[0].shape, mats)

    @classmethod
    def random(cls, ctx, shape, c, rng) -> "MatrixSystem":
        return cls(ctx, shape, [Matrix.random(ctx, shape[0], shape[1], rng) for _ in range(c)])

    def __len__(self):
        return len(self.mats)

    def __iter__(self):
        return iter(self.mats)

    def __getitem__(self, i):
        return self.mats[i]

    def transpose(self) -> "MatrixSystem":
        return MatrixSystem(self.ctx, (self.shape[1], self.shape[0]), [m.transpose() for m in self.mats])

    def __repr__(self):
        return "MatrixSystem(%dx%d, c=%d, F%d)" % (*self.shape, len(self.mats), self.ctx.order)


@dataclass(frozen=True)
class HomSpace:
    """Pairs of matrices spanning a solution space, with both dimension counts."""

    ctx: FieldCtx
    basis: tuple  # of (A, B) Matrix pairs
    dim_k: int
    dim_fp: int

    def contains(self, A: Matrix, B: Matrix) -> bool:
        probe = _flatten_pair(A, B)
        acc = EchelonAccumulator(self.ctx, len(probe))
        for pa, pb in self.basis:
            acc.add(_flatten_pair(pa, pb))
        return not any(acc.residue(probe))


def _flatten_pair(A: Matrix, B: Matrix) -> tuple:
    out = []
    for row in A.rows:
        out.extend(row)
    for row in B.rows:
        out.extend(row)
    return tuple(out)


def _hom_equations(phi: MatrixSystem, ups: MatrixSystem, sign: int):
    """Rows of the flat system; unknowns are A (a x s) then B (b x t)."""
    if len(phi) != len(ups):
        raise InvalidConfigError("systems differ in length")
    if phi.ctx != ups.ctx:
        raise InvalidConfigError("systems over different fields")
    if sign not in (1, -1):
        raise InvalidConfigError("sign must be +1 or -1")
    ctx = phi.ctx
    s, b = phi.shape
    a, t = ups.shape
    na, nb = a * s, b * t
    rows = []
    for P, U in zip(phi.mats, ups.mats):
        for r in range(a):
            urow = U.rows[r]
            for j in range(b):
                row = [0] * (na + nb)
                for k in range(s):
                    row[r * s + k] = P.rows[k][j]
                for k in range(t):
                    # coefficient of B[j,k] is -sign * U[r,k]
                    row[na + (j * t + k)] = ctx.neg(urow[k]) if sign == 1 else urow[k]
                rows.append(row)
    return rows, (a, s, b, t)


def hom_space(phi: MatrixSystem, ups: MatrixSystem, sign: int = 1) -> HomSpace:
    """Basis of {(A,B) : A Phi_i = sign * Ups_i B^t for all i}."""
    ctx = phi.ctx
    rows, (a, s, b, t) = _hom_equations(phi, ups, sign)
    na, nb = a * s, b * t
    if not rows:
        vecs = [tuple(1 if k == i else 0 for k in range(na + nb)) for i in range(na + nb)]
    else:
        _, _, null = rank_nullspace(Matrix(ctx, rows))
        vecs = list(null.basis)
    basis = []
    for v in vecs:
        A = Matrix(ctx, [v[r * s : (r + 1) * s] for r in range(a)])
        B = Matrix(ctx, [v[na + r * t : na + (r + 1) * t] for r in range(b)])
        basis.append((A, B))
    for A, B in basis:
        for P, U in zip(phi.mats, ups.mats):
            lhs = A.mul(P)
            rhs = U.mul(B.transpose())
            if sign == -1:
                rhs = rhs.neg()
            if lhs != rhs:
                raise PropertyViolationError("hom basis pair fails its defining equation")
    dim_k = len(basis)
    return HomSpace(ctx=ctx, basis=tuple(basis), dim_k=dim_k, dim_fp=ctx.e * dim_k)


def hom_dim(phi: MatrixSystem, ups: MatrixSystem, sign: int = 1, fast=True) -> int:
    """dim_K of the hom space without materializing a basis."""
    rows, (a, s, b, t) = _hom_equations(phi, ups, sign)
    n_unknowns = a * s + b * t
    if not rows:
        return n_unknowns
    if fast:
        try:
            from .linalg import np_rank

            return n_unknowns - np_rank(rows, phi.ctx)
        except InvalidConfigError:
            pass
    rank, _, _ = rank_nullspace(Matrix(phi.ctx, rows))
    return n_unknowns - rank


def end_space(phi: MatrixSystem) -> HomSpace:
    return hom_space(phi, phi, 1)


def lambda_build(phi: MatrixSystem) -> MatrixSystem:
    """Block systems [[0, P], [-P^t, 0]]; each member is antisymmetric."""
    ctx = phi.ctx
    a, b = phi.shape
    n = a + b
    out = []
    for P in phi.mats:
        rows = [[0] * n for _ in range(n)]
        for i in range(a):
            for j in range(b):
                rows[i][a + j] = P.rows[i][j]
                rows[a + j][i] = ctx.neg(P.rows[i][j])
        out.append(Matrix(ctx, rows))
    return MatrixSystem(ctx, (n, n), out)


# ---------------------------------------------------------------------------
# bimaps and the right nucleus

class Bimap:
    """A bilinear map given by structure constants: one left x right matrix
    per target coordinate."""

    __slots__ = ("ctx", "left_dim", "right_dim", "target_dim", "structure")

    def __init__(self, ctx, structure):
        structure = tuple(structure)
        if not structure:
            raise InvalidConfigError("need at least one target coordinate")
        self.ctx = ctx
        self.structure = structure
        self.left_dim = structure[0].nrows
        self.right_dim = structure[0].ncols
        self.target_dim = len(structure)
        for m in structure:
            if m.ctx != ctx or m.shape != (self.left_dim, self.right_dim):
                raise InvalidConfigError("inconsistent structure constants")

    @classmethod
    def from_function(cls, ctx, left_dim, right_dim, target_dim, f) -> "Bimap":
        """Tabulate f on basis pairs; f maps (left vec, right vec) to a target vec."""
        tables = [[[0] * right_dim for _ in range(left_dim)] for _ in range(target_dim)]
        for i in range(left_dim):
            ei = tuple(ctx.one if k == i else 0 for k in range(left_dim))
            for j in range(right_dim):
                ej = tuple(ctx.one if k == j else 0 for k in range(right_dim))
                out = f(ei, ej)
                if len(out) != target_dim:
                    raise InvalidConfigError("target dimension mismatch")
                for k in range(target_dim):
                    tables[k][i][j] = out[k]
        return cls(ctx, [Matrix(ctx, t) for t in tables])

    def evaluate(self, u, v) -> tuple:
        ctx = self.ctx
        if len(u) != self.left_dim or len(v) != self.right_dim:
            raise InvalidConfigError("argument dimension mismatch")
        out = []
        for S in self.structure:
            acc = 0
            for i, ui in enumerate(u):
                if not ui:
                    continue
                row = S.rows[i]
                part = 0
                for j, vj in enumerate(v):
                    if vj and row[j]:
                        part = ctx.add(part, ctx.mul(row[j], vj))
                acc = ctx.add(acc, ctx.mul(ui, part))
            out.append(acc)
        return tuple(out)

    def __repr__(self):
        return "Bimap(%d x %d -> %d, F%d)" % (
            self.left_dim, self.right_dim, self.target_dim, self.ctx.order)


def matrix_multiplication_bimap(ctx, a: int, c: int, d: int) -> Bimap:
    """The bimap M_{a x c} x M_{c x d} -> M_{a x d}, all spaces flattened row-major."""

    def f(u, v):
        X = Matrix(ctx, [u[i * c : (i + 1) * c] for i in range(a)])
        Y = Matrix(ctx, [v[i * d : (i + 1) * d] for i in range(c)])
        Z = X.mul(Y)
        return tuple(x for row in Z.rows for x in row)

    return Bimap.from_function(ctx, a * c, c * d, a * d, f)


def right_nucleus(bm: Bimap, left_sub: Subspace) -> HomSpace:
    """Pairs (g, h) with [q, g v] = h [q, v] for all q in left_sub and all v.

    g acts on the right space, h on the target.  The result is closed under
    composition and contains the identity pair; both facts are checked.
    """
    ctx = bm.ctx
    if left_sub.ambient_dim != bm.left_dim or left_sub.ctx != ctx:
        raise InvalidConfigError("left subspace does not match the bimap")
    r, t = bm.right_dim, bm.target_dim
    ng, nh = r * r, t * t
    rows = []
    for q in left_sub.basis:
        # W[k][j'] = (q^t S_k)_{j'}
        W = []
        for S in bm.structure:
            wk = [0] * r
            for i, qi in enumerate(q):
                if not qi:
                    continue
                srow = S.rows[i]
                for j2 in range(r):
                    if srow[j2]:
                        wk[j2] = ctx.add(wk[j2], ctx.mul(qi, srow[j2]))
            W.append(wk)
        for j in range(r):
            for k in range(t):
                row = [0] * (ng + nh)
                for j2 in range(r):
                    row[j2 * r + j] = W[k][j2]
                for m in range(t):
                    row[ng + k * t + m] = ctx.neg(W[m][j])
                rows.append(row)
    if not rows:
        vecs = [tuple(1 if k == i else 0 for k in range(ng + nh)) for i in range(ng + nh)]
    else:
        _, _, null = rank_nullspace(Matrix(ctx, rows))
        vecs = list(null.basis)
    basis = []
    for v in vecs:
        g = Matrix(ctx, [v[i * r : (i + 1) * r] for i in range(r)])
        h = Matrix(ctx, [v[ng + i * t : ng + (i + 1) * t] for i in range(t)])
        basis.append((g, h))
    space = HomSpace(ctx=ctx, basis=tuple(basis), dim_k=len(basis), dim_fp=ctx.e * len(basis))
    ident = (Matrix.identity(ctx, r), Matrix.identity(ctx, t))
    if not space.contains(*ident):
        raise PropertyViolationError("nucleus lost the identity pair")
    for g1, h1 in basis:
        for g2, h2 in basis:
            if not space.contains(g1.mul(g2), h1.mul(h2)):
                raise PropertyViolationError("nucleus not closed under composition")
    return space


# ---------------------------------------------------------------------------
# explicit witness systems with scalar endomorphism ring

def _block_identity(ctx, m: int, n: int, offset: int) -> Matrix:
    rows = [[0] * n for _ in range(m)]
    for i in range(m):
        rows[i][offset + i] = 1
    return Matrix(ctx, rows)


def _embed_root(E: FieldCtx, K: FieldCtx) -> int:
    """A root in E of the defining polynomial of K (coefficients in F_p)."""
    if E.order > _ROOT_SEARCH_CAP:
        raise CapExceededError("extension too large for root search")
    coeffs = K.modulus
    for beta in range(E.order):
        acc = 0
        power = E.one
        for c in coeffs:
            if c:
                acc = E.add(acc, E.mul(c % E.p, power))
            power = E.mul(power, beta)
        if acc == 0:
            return beta
    raise PropertyViolationError("no root of the subfield polynomial found")


class _KCoords:
    """Coordinates of elements of E in the K-basis {alpha^i}, via the
    F_p-basis {beta^j alpha^i}."""

    def __init__(self, E: FieldCtx, K: FieldCtx, beta: int, alpha: int, m: int):
        self.E, self.K, self.m = E, K, m
        e = K.e
        d = e * m
        Fp = make_field(K.p, 1)
        cols = []
        for i in range(m):
            ai = E.pow(alpha, i)
            for j in range(e):
                x = E.mul(ai, E.pow(beta, j))
                cols.append(E.to_vector(x))
        # invert the basis matrix over F_p by row reducing [M | I]
        aug = []
        for rr in range(d):
            aug.append([cols[cc][rr] for cc in range(d)] + [1 if k == rr else 0 for k in range(d)])
        red, pivots = rref(aug, Fp)
        if list(pivots) != list(range(d)):
            raise PropertyViolationError("power basis is not an F_p-basis")
        self._inv = [row[d:] for row in red]
        self._fp = Fp

    def coords(self, x: int) -> tuple:
        """K-coordinates (length m) of x in the alpha power basis."""
        E, K, m = self.E, self.K, self.m
        e = K.e
        vec = E.to_vector(x)
        d = e * m
        z = [0] * d
        for rr in range(d):
            acc = 0
            row = self._inv[rr]
            for cc in range(d):
                if row[cc] and vec[cc]:
                    acc = (acc + row[cc] * vec[cc]) % K.p
            z[rr] = acc
        out = []
        for i in range(m):
            digits = z[i * e : (i + 1) * e]
            out.append(K.from_vector(digits))
        return tuple(out)


def witness_system(m: int, n: int, K: FieldCtx) -> MatrixSystem:
    """An explicit m x n system over K whose End is the scalars.

    For m == n this is {I, multiplication by a primitive element, the
    relative Frobenius} written in the power basis of a degree-m extension;
    for m < n it is the family of shifted identity blocks.
    """
    if not (1 <= m <= n):
        raise InvalidConfigError("need 1 <= m <= n")
    if m < n:
        mats = [_block_identity(K, m, n, 0)]
        for i in range(1, (n - 1) // m + 1):
            mats.append(_block_identity(K, m, n, 1 + m * (i - 1)))
        mats.append(_block_identity(K, m, n, n - m))
        return MatrixSystem(K, (m, n), mats)
    if m == 1:
        alpha = K.primitive if K.order > 2 else K.one
        return MatrixSystem(K, (1, 1), [
            Matrix(K, [[1]]), Matrix(K, [[alpha]]), Matrix(K, [[1]])])
    E = make_field(K.p, K.e * m)
    beta = _embed_root(E, K)
    alpha = E.primitive
    coords = _KCoords(E, K, beta, alpha, m)
    basis = [E.pow(alpha, i) for i in range(m)]
    def map_matrix(fn):
        cols = [coords.coords(fn(x)) for x in basis]
        return Matrix(K, [[cols[j][i] for j in range(m)] for i in range(m)])
    ident = Matrix.identity(K, m)
    mult_alpha = map_matrix(lambda x: E.mul(alpha, x))
    sigma = map_matrix(lambda x: E.frobenius(x, K.e))
    return MatrixSystem(K, (m, m), [ident, mult_alpha, sigma])
