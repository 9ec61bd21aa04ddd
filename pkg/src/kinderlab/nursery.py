"""Module nurseries: filtered p-groups cut out of a ring acting on a module.

A nursery packages an F_p-algebra R, given concretely by a basis of
matrices acting on an F_p-space M, together with a marked generating set
S of R containing the unit and a probe set T of module elements whose
annihilators intersect trivially.  The attached group is the set of
triples (x, u, w) with x in R and u, w in M under

    (x, u, w) * (x', u', w') = (x + x', u + u', w + w' + x.u'),

filtered by Gamma_2 = {x = 0} > Gamma_3 = {x = 0, u = 0} > Gamma_4 = 1.
Subgroups squeezed between Gamma_2 and Gamma_1 ("kinder") correspond to
F_p-subspaces of R, and `reconstruct` recovers the whole filtration from
one such subgroup presented as an abstract multiplication table.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

from . import smallgrp
from .errors import CapExceededError, InvalidConfigError, PropertyViolationError
from .gf import FieldCtx, make_field
from .linalg import (
    EchelonAccumulator,
    Matrix,
    Subspace,
    enumerate_superspaces,
    flatten_matrix,
    gaussian_binomial,
    rank_nullspace,
    rref,
    unflatten_matrix,
)

GROUP_ORDER_CAP = 1 << 14
# below this Gamma_1 order the constructor checks the filtration on every
# pair of elements instead of only on basis transversals
EXHAUSTIVE_ORDER_CAP = 1 << 9


class _CoordSolver:
    """Coordinates with respect to a fixed independent family of rows.

    Row-reduces [rows | I] once; `coords` then expresses any vector in the
    original family (not the echelon one) or returns None.
    """

    def __init__(self, rows, ctx: FieldCtx):
        n = len(rows[0]) if rows else 0
        k = len(rows)
        aug = []
        for i, row in enumerate(rows):
            tail = [0] * k
            tail[i] = 1
            aug.append(list(row) + tail)
        basis, pivots = rref(aug, ctx)
        if len(basis) != k or any(piv >= n for piv in pivots):
            raise InvalidConfigError("coordinate rows are linearly dependent")
        self.ctx = ctx
        self.n = n
        self.k = k
        self.rows = basis
        self.pivots = pivots

    def coords(self, vec):
        ctx = self.ctx
        work = list(vec) + [0] * self.k
        for row, piv in zip(self.rows, self.pivots):
            c = work[piv]
            if c:
                for j, r in enumerate(row):
                    if r:
                        work[j] = ctx.sub(work[j], ctx.mul(c, r))
        if any(work[: self.n]):
            return None
        return tuple(ctx.neg(x) for x in work[self.n :])


class ModuleNursery:
    """An F_p-algebra of matrices with marked generators and module probes.

    `rbasis` lists independent mdim x mdim matrices over GF(p) whose span
    is closed under multiplication and contains the identity; S and T are
    checked at construction (S generates, the T annihilators meet in 0),
    as is the commutator law gamma([x, u]) = x.u on basis transversals.
    """

    def __init__(self, kind, rbasis, s_matrices, t_vectors, meta=None):
        if not rbasis:
            raise InvalidConfigError("empty algebra basis")
        ctx = rbasis[0].ctx
        if ctx.e != 1:
            raise InvalidConfigError("nursery coordinates must be over a prime field")
        self.kind = kind
        self.ctx = ctx
        self.p = ctx.p
        self.mdim = rbasis[0].nrows
        self.rdim = len(rbasis)
        self.meta = dict(meta or {})
        for b in rbasis:
            if b.ctx != ctx or b.shape != (self.mdim, self.mdim):
                raise InvalidConfigError("algebra basis matrices must share one shape")
        self.rbasis = tuple(rbasis)
        self._solver = _CoordSolver([flatten_matrix(b) for b in rbasis], ctx)
        self.one_coords = self.r_coords(Matrix.identity(ctx, self.mdim))
        if self.one_coords is None:
            raise InvalidConfigError("algebra span lacks a unit")
        self._check_closure()
        seen = []
        for s in s_matrices:
            c = self.r_coords(s)
            if c is None:
                raise InvalidConfigError("generating set leaves the algebra span")
            if c not in seen:
                seen.append(c)
        if self.one_coords not in seen:
            raise InvalidConfigError("generating set must contain the unit")
        self.s_coords = tuple(seen)
        self.t_vectors = tuple(tuple(t) for t in t_vectors)
        for t in self.t_vectors:
            if len(t) != self.mdim:
                raise InvalidConfigError("module probe has the wrong length")
        self._check_s_generates()
        self._check_annihilators()
        self._rows_cache = {}
        self._check_transversal_commutators()
        if self.order <= EXHAUSTIVE_ORDER_CAP:
            self._check_exhaustive()

    # -- validation ---------------------------------------------------

    def _check_closure(self):
        for a in self.rbasis:
            for b in self.rbasis:
                if self.r_coords(a.mul(b)) is None:
                    raise InvalidConfigError("algebra basis span is not closed under products")

    def _check_s_generates(self):
        acc = EchelonAccumulator(self.ctx, self.mdim * self.mdim)
        mats = [self.r_matrix(c) for c in self.s_coords]
        for m in mats:
            acc.add(flatten_matrix(m))
        while True:
            grew = False
            for a, b in itertools.product(list(mats), repeat=2):
                prod = a.mul(b)
                if acc.add(flatten_matrix(prod)):
                    mats.append(prod)
                    grew = True
            if not grew:
                break
        if acc.rank != self.rdim:
            raise InvalidConfigError("S generates a proper subalgebra")

    def _check_annihilators(self):
        # x in R annihilates every probe iff the stacked action rows kill x
        rows = []
        for b in self.rbasis:
            row = []
            for t in self.t_vectors:
                row.extend(b.apply(t))
            rows.append(row)
        basis, _ = rref(rows, self.ctx)
        if len(basis) != self.rdim:
            raise InvalidConfigError("annihilator condition unsatisfiable for this T")

    def _check_transversal_commutators(self):
        zr = (0,) * self.rdim
        zm = (0,) * self.mdim
        for i in range(self.rdim):
            x = tuple(1 if k == i else 0 for k in range(self.rdim))
            g = (x, zm, zm)
            for j in range(self.mdim):
                u = tuple(1 if k == j else 0 for k in range(self.mdim))
                h = (zr, u, zm)
                got = self.commutator_label(g, h)
                want = (zr, zm, tuple(self.rbasis[i].apply(u)))
                if got != want:
                    raise PropertyViolationError("commutator does not realize the action")
        for j in range(self.mdim):
            u = tuple(1 if k == j else 0 for k in range(self.mdim))
            for jj in range(self.mdim):
                v = tuple(1 if k == jj else 0 for k in range(self.mdim))
                if self.commutator_label((zr, u, zm), (zr, v, zm)) != self.identity_label():
                    raise PropertyViolationError("second filtration term is not abelian")

    def _check_exhaustive(self):
        idl = self.identity_label()
        labels = list(self.labels())
        for g in labels:
            for h in labels:
                c = self.commutator_label(g, h)
                if any(c[0]) or any(c[1]):
                    raise PropertyViolationError("a commutator escapes the third term")
                if not any(g[0]) and not any(h[0]) and c != idl:
                    raise PropertyViolationError("second filtration term is not abelian")

    # -- algebra ------------------------------------------------------

    def r_coords(self, mat: Matrix):
        """Coordinates of a matrix in the rbasis, or None when outside R."""
        return self._solver.coords(flatten_matrix(mat))

    def r_matrix(self, coords) -> Matrix:
        m = Matrix.zero(self.ctx, self.mdim, self.mdim)
        for c, b in zip(coords, self.rbasis):
            if c:
                m = m.add(b.scale(c))
        return m

    def act(self, x_coords, u):
        rows = self._rows_cache.get(x_coords)
        if rows is None:
            rows = self.r_matrix(x_coords).rows
            self._rows_cache[x_coords] = rows
        p = self.p
        return tuple(sum(a * b for a, b in zip(row, u)) % p for row in rows)

    # -- the group ----------------------------------------------------

    @property
    def order(self) -> int:
        return self.p ** (self.rdim + 2 * self.mdim)

    def identity_label(self):
        return ((0,) * self.rdim, (0,) * self.mdim, (0,) * self.mdim)

    def mul_label(self, g, h):
        p = self.p
        shift = self.act(g[0], h[1])
        return (
            tuple((a + b) % p for a, b in zip(g[0], h[0])),
            tuple((a + b) % p for a, b in zip(g[1], h[1])),
            tuple((a + b + c) % p for a, b, c in zip(g[2], h[2], shift)),
        )

    def inverse_label(self, g):
        p = self.p
        back = self.act(g[0], g[1])
        return (
            tuple(-a % p for a in g[0]),
            tuple(-a % p for a in g[1]),
            tuple((b - a) % p for a, b in zip(g[2], back)),
        )

    def commutator_label(self, g, h):
        gh = self.mul_label(g, h)
        hg = self.mul_label(h, g)
        return self.mul_label(self.inverse_label(hg), gh)

    def labels(self, x_vectors=None):
        p = self.p
        if x_vectors is None:
            x_vectors = [tuple(v) for v in itertools.product(range(p), repeat=self.rdim)]
        mvecs = [tuple(v) for v in itertools.product(range(p), repeat=self.mdim)]
        for x in x_vectors:
            for u in mvecs:
                for w in mvecs:
                    yield (x, u, w)

    def gamma1_group(self, cap=GROUP_ORDER_CAP) -> smallgrp.SmallGroup:
        if self.order > cap:
            raise CapExceededError("group order %d over cap %d" % (self.order, cap))
        name = "%s nursery Gamma_1" % self.kind
        return smallgrp.SmallGroup(list(self.labels()), self.mul_label, name=name)

    def gamma2_labels(self):
        zr = (0,) * self.rdim
        return frozenset((zr, u, w) for _, u, w in self.labels(x_vectors=[zr]))

    def gamma3_labels(self):
        zr = (0,) * self.rdim
        zm = (0,) * self.mdim
        return frozenset(
            (zr, zm, tuple(w))
            for w in itertools.product(range(self.p), repeat=self.mdim)
        )

    def s_subspace(self) -> Subspace:
        return Subspace.from_vectors(self.ctx, self.rdim, list(self.s_coords))

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "rdim": self.rdim,
            "mdim": self.mdim,
            "order": self.order,
            "s_size": len(self.s_coords),
            "t_size": len(self.t_vectors),
            **self.meta,
        }

    def __repr__(self):
        return "ModuleNursery(%s, |R|=%d^%d, |M|=%d^%d)" % (
            self.kind,
            self.p,
            self.rdim,
            self.p,
            self.mdim,
        )


class Kind:
    """A subgroup Gamma_2 <= Q <= Gamma_1 cut out by a subspace V of R."""

    def __init__(self, nursery: ModuleNursery, subspace: Subspace):
        self.nursery = nursery
        self.subspace = subspace
        self._group = None

    @property
    def order(self) -> int:
        n = self.nursery
        return n.p ** (self.subspace.dim + 2 * n.mdim)

    def labels(self):
        xs = [tuple(v) for v in self.subspace.enumerate_vectors()]
        return self.nursery.labels(x_vectors=xs)

    def group(self, cap=GROUP_ORDER_CAP) -> smallgrp.SmallGroup:
        if self._group is not None:
            return self._group
        if self.order > cap:
            raise CapExceededError("kind order %d over cap %d" % (self.order, cap))
        name = "%s kind dim %d" % (self.nursery.kind, self.subspace.dim)
        self._group = smallgrp.SmallGroup(list(self.labels()), self.nursery.mul_label, name=name)
        return self._group

    def __repr__(self):
        return "Kind(dim V = %d, order %d)" % (self.subspace.dim, self.order)


def kind_from_subspace(nursery: ModuleNursery, subspace: Subspace, relaxed=False) -> Kind:
    if subspace.ambient_dim != nursery.rdim or subspace.ctx != nursery.ctx:
        raise InvalidConfigError("subspace does not live in the algebra coordinates")
    if not relaxed:
        for s in nursery.s_coords:
            if not subspace.contains(s):
                raise InvalidConfigError("subspace misses the marked generating set")
    return Kind(nursery, subspace)


def random_kind(nursery: ModuleNursery, ell: int, rng, relaxed=False) -> Kind:
    """A uniform dimension-ell kind; anchored to contain S unless relaxed."""
    base = [] if relaxed else list(nursery.s_coords)
    acc = EchelonAccumulator(nursery.ctx, nursery.rdim)
    rows = []
    for v in base:
        if acc.add(v):
            rows.append(v)
    if ell < acc.rank or ell > nursery.rdim:
        raise InvalidConfigError("no kinder of dimension %d here" % ell)
    p = nursery.p
    while acc.rank < ell:
        v = tuple(rng.randrange(p) for _ in range(nursery.rdim))
        if acc.add(v):
            rows.append(v)
    return kind_from_subspace(
        nursery, Subspace.from_vectors(nursery.ctx, nursery.rdim, rows), relaxed=relaxed
    )


def derived_equals_gamma3(kind: Kind) -> bool:
    """Whether [Q,Q] is all of Gamma_3, i.e. V.M spans M."""
    n = kind.nursery
    acc = EchelonAccumulator(n.ctx, n.mdim)
    for xc in kind.subspace.basis:
        mat = n.r_matrix(tuple(xc))
        for col in zip(*mat.rows):
            if acc.add(col) and acc.rank == n.mdim:
                return True
    return acc.rank == n.mdim


class Reconstruction(NamedTuple):
    X: frozenset
    Y: frozenset
    Z: frozenset
    chi: dict


def random_frames(kind: Kind, rng):
    """Random valid (rho, mu) transversal maps for `reconstruct`."""
    n = kind.nursery
    p = n.p
    zr = (0,) * n.rdim

    def rvec():
        return tuple(rng.randrange(p) for _ in range(n.mdim))

    rho = {s: (s, rvec(), rvec()) for s in n.s_coords}
    mu = {t: (zr, t, rvec()) for t in n.t_vectors}
    return rho, mu


def reconstruct(kind: Kind, rho: dict, mu: dict) -> Reconstruction:
    """Recover (Gamma_2, Gamma_3, Gamma_4) and the R-embedding from Q alone.

    The group is consulted only through its multiplication; the beta and
    gamma coordinate maps are applied once X and Y have been identified,
    and the stored coordinates are used afterwards purely to verify the
    answer.  A mu probe pointing at an element with too large an
    annihilator inflates X and is reported, not accepted.
    """
    n = kind.nursery
    G = kind.group()
    p = n.p
    gamma2_size = p ** (2 * n.mdim)
    def member(label, who):
        try:
            return G.index_of(label)
        except KeyError:
            raise InvalidConfigError("%s image is not an element of Q" % who) from None

    for s in n.s_coords:
        if s not in rho:
            raise InvalidConfigError("rho must be defined on all of S")
        member(rho[s], "rho")
        if rho[s][0] != s:
            raise InvalidConfigError("rho image has the wrong alpha part")
    for t in n.t_vectors:
        if t not in mu:
            raise InvalidConfigError("mu must be defined on all of T")
        member(mu[t], "mu")
        if any(mu[t][0]):
            raise InvalidConfigError("mu image lies outside the second term")

    mu_idx = [G.index_of(mu[t]) for t in n.t_vectors]
    x_idx = [
        i
        for i in range(G.n)
        if all(G.mul_idx(i, m) == G.mul_idx(m, i) for m in mu_idx)
    ]
    if len(x_idx) != gamma2_size:
        raise PropertyViolationError(
            "recovered second term has order %d, expected %d: "
            "the mu probes leave a nontrivial common annihilator" % (len(x_idx), gamma2_size)
        )

    one_idx = G.index_of(rho[n.one_coords])
    comms = {G.commutator_idx(one_idx, x) for x in x_idx}
    y_idx = G.closure_idx(comms)
    if len(y_idx) != p**n.mdim:
        raise PropertyViolationError("bracketing with rho(1) missed the third term")
    z_seed = {
        G.commutator_idx(a, b) for a, b in itertools.combinations(x_idx, 2)
    }
    z_idx = G.closure_idx(z_seed)
    if len(z_idx) != 1:
        raise PropertyViolationError("the recovered second term is not abelian")

    # beta reads off X, gamma reads off Y: both are nursery data now that
    # X and Y are pinned down
    beta_rep = {}
    for i in x_idx:
        label = G.labels[i]
        beta_rep.setdefault(label[1], i)
    chi = {}
    y_set = set(y_idx)
    for i in range(G.n):
        cols = []
        for j in range(n.mdim):
            unit = tuple(1 if k == j else 0 for k in range(n.mdim))
            c = G.commutator_idx(i, beta_rep[unit])
            if c not in y_set:
                raise PropertyViolationError("a chi column escapes the third term")
            cols.append(G.labels[c][2])
        coords = n.r_coords(Matrix(n.ctx, list(zip(*cols))))
        if coords is None:
            raise PropertyViolationError("chi image escapes the algebra")
        chi[G.labels[i]] = coords
    if len(set(chi.values())) != G.n // gamma2_size:
        raise PropertyViolationError("chi does not separate the X-cosets")
    for s in n.s_coords:
        if chi[rho[s]] != s:
            raise PropertyViolationError("chi disagrees with rho on the generators")

    # posterior check against the stored coordinates
    x_labels = frozenset(G.labels[i] for i in x_idx)
    y_labels = frozenset(G.labels[i] for i in y_idx)
    z_labels = frozenset(G.labels[i] for i in z_idx)
    zr = (0,) * n.rdim
    zm = (0,) * n.mdim
    if any(label[0] != zr for label in x_labels):
        raise PropertyViolationError("X differs from the stored second term")
    if any(label[0] != zr or label[1] != zm for label in y_labels):
        raise PropertyViolationError("Y differs from the stored third term")
    if z_labels != {n.identity_label()}:
        raise PropertyViolationError("Z is not the stored fourth term")
    if any(chi[label] != label[0] for label in chi):
        raise PropertyViolationError("chi disagrees with the stored alpha projection")
    return Reconstruction(x_labels, y_labels, z_labels, chi)


# ---------------------------------------------------------------------------
# counting bounds


def _gl_order(nn: int, q: int) -> int:
    out = 1
    for i in range(nn):
        out *= q**nn - q**i
    return out


def bound_log(formula: str, **params) -> float:
    """Exact base-p exponents of the counting bounds, clamped at 0."""
    if formula == "nursery_count":
        r, ell, s, m, t = (params[k] for k in ("r", "ell", "s", "m", "t"))
        return float(max(0, (ell - s) * (r - ell) - ell * s - m * t))
    if formula == "coro_ud_lower":
        a, e, ell = (params[k] for k in ("a", "e", "ell"))
        return float(max(0, (ell - 3) * (a * a * e - ell) - 3 * ell - a * a * e))
    if formula == "orbit_upper":
        a, b, c, e, p = (params[k] for k in ("a", "b", "c", "e", "p"))
        if min(a, b, c, e) < 1:
            raise InvalidConfigError("block sizes and degree must be positive")
        q = p**e
        if a > c >= 1:
            order = e * _gl_order(a, q) * _gl_order(b, q) * _gl_order(c, q) // (q - 1)
        elif a == c > 1:
            order = 2 * e * _gl_order(a, q) ** 2 * _gl_order(b, q) // (q - 1)
        elif a == c == 1:
            sp = q ** (b * b)
            for i in range(1, b + 1):
                sp *= q ** (2 * i) - 1
            order = e * (q - 1) * sp
        else:
            raise InvalidConfigError("orbit bound takes the blocks with a >= c")
        return math.log(order, p)
    raise InvalidConfigError("unknown bound formula %r" % formula)


# ---------------------------------------------------------------------------
# census


class CensusReport(NamedTuple):
    nursery: dict
    ell: int
    relaxed: bool
    kinder_count: int
    class_count: int
    bound_exponent: float | None
    classes: list

    def to_payload(self) -> dict:
        return {
            "nursery": self.nursery,
            "ell": self.ell,
            "relaxed": self.relaxed,
            "kinder_count": self.kinder_count,
            "class_count": self.class_count,
            "bound_exponent": self.bound_exponent,
            "classes": self.classes,
        }


def census(
    nursery: ModuleNursery,
    ell: int,
    relaxed=False,
    max_kinder=4096,
    max_order=GROUP_ORDER_CAP,
) -> CensusReport:
    """Enumerate and classify every dimension-ell kind of the nursery.

    Strict mode anchors the kinder to contain S and checks the class count
    against the clamped counting bound; relaxed mode runs over all
    subspaces, where the bound has no claim.
    """
    base = Subspace.zero(nursery.ctx, nursery.rdim) if relaxed else nursery.s_subspace()
    if ell < base.dim or ell > nursery.rdim:
        raise InvalidConfigError("no kinder of dimension %d here" % ell)
    total = gaussian_binomial(nursery.rdim - base.dim, ell - base.dim, nursery.p)
    if total > max_kinder:
        raise CapExceededError("%d kinder over cap %d" % (total, max_kinder))
    order = nursery.p ** (ell + 2 * nursery.mdim)
    if order > max_order:
        raise CapExceededError("kind order %d over cap %d" % (order, max_order))

    spaces = list(enumerate_superspaces(base, ell))
    assert len(spaces) == total
    groups = [kind_from_subspace(nursery, v, relaxed=relaxed).group(cap=max_order) for v in spaces]
    classes, _ = smallgrp.iso_classes(groups)
    table = []
    for members in classes:
        rep = members[0]
        fp = groups[rep].fingerprint()
        table.append(
            {
                "members": len(members),
                "order": fp.order,
                "exponent": fp.exponent,
                "center_order": fp.center_order,
                "derived_orders": list(fp.derived_orders),
                "representative_basis": [list(row) for row in spaces[rep].basis],
            }
        )

    bound = None
    if not relaxed:
        bound = bound_log(
            "nursery_count",
            r=nursery.rdim,
            ell=ell,
            s=len(nursery.s_coords),
            m=nursery.mdim,
            t=len(nursery.t_vectors),
        )
        if len(classes) < nursery.p ** int(round(bound)):
            raise PropertyViolationError(
                "census found %d classes, below the guaranteed %d"
                % (len(classes), nursery.p ** int(round(bound)))
            )
    return CensusReport(
        nursery=nursery.describe(),
        ell=ell,
        relaxed=relaxed,
        kinder_count=len(spaces),
        class_count=len(classes),
        bound_exponent=bound,
        classes=table,
    )


# ---------------------------------------------------------------------------
# the four stock constructions


def _action_matrix(pf: FieldCtx, images) -> Matrix:
    # images[j] = flattened image of the j-th standard basis vector
    return Matrix(pf, [list(row) for row in zip(*images)])


def _matrix_kind(a: int, c: int, ctx: FieldCtx) -> ModuleNursery:
    if a < 1 or c < 1:
        raise InvalidConfigError("block sizes must be positive")
    pf = make_field(ctx.p, 1)
    e = ctx.e
    munits = []
    for i in range(a):
        for j in range(c):
            for d in range(e):
                vec = [0] * (a * c * e)
                vec[(i * c + j) * e + d] = 1
                munits.append(unflatten_matrix(vec, ctx, a, c))

    def left_action(x: Matrix) -> Matrix:
        return _action_matrix(pf, [flatten_matrix(x.mul(u)) for u in munits])

    rbasis = []
    for i in range(a):
        for j in range(a):
            for d in range(e):
                vec = [0] * (a * a * e)
                vec[(i * a + j) * e + d] = 1
                rbasis.append(left_action(unflatten_matrix(vec, ctx, a, a)))

    omega = ctx.primitive if ctx.order > 2 else 1
    ident = Matrix.identity(ctx, a)
    corner = Matrix(ctx, [[omega if i == j == 0 else 0 for j in range(a)] for i in range(a)])
    # the cyclic shift sending row i to row i+1 (so with the corner unit it
    # reaches every matrix position)
    cycle = Matrix(ctx, [[1 if j == (i + 1) % a else 0 for j in range(a)] for i in range(a)])
    s_matrices = [left_action(ident), left_action(corner), left_action(cycle)]
    t_vectors = []
    for i in range(a):
        for j in range(c):
            vec = [0] * (a * c * e)
            vec[(i * c + j) * e] = 1
            t_vectors.append(tuple(vec))
    meta = {"a": a, "c": c, "field": "GF(%d^%d)" % (ctx.p, ctx.e)}
    return ModuleNursery("matrix", rbasis, s_matrices, t_vectors, meta=meta)


def _field_action_nursery(kind, K: FieldCtx, scale: int, s_elements, meta) -> ModuleNursery:
    # R = M = K with x.u = scale*x*u; the matrix picture absorbs the twist
    pf = make_field(K.p, 1)
    basis = [K.from_vector(tuple(1 if i == d else 0 for i in range(K.e))) for d in range(K.e)]

    def mult_matrix(g: int) -> Matrix:
        images = [K.to_vector(K.mul(K.mul(scale, g), b)) for b in basis]
        return _action_matrix(pf, images)

    rbasis = [mult_matrix(g) for g in basis]
    s_matrices = [mult_matrix(g) for g in s_elements]
    t_vectors = [K.to_vector(1)]
    return ModuleNursery(kind, rbasis, s_matrices, t_vectors, meta=meta)


def _b2_odd_kind(ctx: FieldCtx) -> ModuleNursery:
    if ctx.p == 2:
        raise InvalidConfigError("this construction needs odd characteristic")
    inv2 = ctx.inv(2)
    s_elements = [inv2]
    if ctx.e > 1:
        s_elements.append(ctx.primitive)
    meta = {"field": "GF(%d^%d)" % (ctx.p, ctx.e), "action": "x.u = 2xu"}
    return _field_action_nursery("b2_odd", ctx, 2, s_elements, meta)


def _ree_small_kind(e: int) -> ModuleNursery:
    if e < 1:
        raise InvalidConfigError("need e >= 1 for the degree 2e+1 field")
    K = make_field(3, 2 * e + 1)
    s_elements = [1, K.primitive]
    meta = {"field": "GF(3^%d)" % K.e, "action": "x.u = xu"}
    return _field_action_nursery("ree_small", K, 1, s_elements, meta)


def _unitary_kind(p: int, e: int) -> ModuleNursery:
    if e < 1:
        raise InvalidConfigError("need e >= 1 for the degree 2e field")
    F = make_field(p, 2 * e)
    pf = make_field(p, 1)
    basis = [F.from_vector(tuple(1 if i == d else 0 for i in range(F.e))) for d in range(F.e)]

    def kernel_of(combine):
        # columns = images of the digit basis, so the right nullspace holds
        # the coefficient vectors of the solutions
        cols = [list(F.to_vector(combine(F.frobenius(b, e), b))) for b in basis]
        _, _, null = rank_nullspace(Matrix(pf, cols).transpose())
        return [F.from_vector(v) for v in null.basis]

    fixed = kernel_of(F.sub)  # alpha^sigma = alpha
    skew = kernel_of(F.add)  # alpha^sigma = -alpha
    if len(fixed) != e or len(skew) != e:
        raise InvalidConfigError("sigma eigenspaces have unexpected dimensions")
    skew_solver = _CoordSolver([F.to_vector(v) for v in skew], pf)

    def mult_matrix(g: int) -> Matrix:
        images = []
        for v in skew:
            coords = skew_solver.coords(F.to_vector(F.mul(g, v)))
            if coords is None:
                raise InvalidConfigError("fixed field does not preserve the skew space")
            images.append(coords)
        return _action_matrix(pf, images)

    rbasis = [mult_matrix(g) for g in fixed]
    s_matrices = [mult_matrix(1)]
    if e > 1:
        # norm of a multiplicative generator: generates the fixed field
        s_matrices.append(mult_matrix(F.pow(F.primitive, 1 + p**e)))
    t_vectors = [tuple(1 if i == 0 else 0 for i in range(e))]
    meta = {"field": "GF(%d^%d)" % (p, 2 * e), "fixed_degree": e}
    return ModuleNursery("unitary", rbasis, s_matrices, t_vectors, meta=meta)


def make_nursery(kind: str, **params) -> ModuleNursery:
    """Stock nurseries: matrix(a, c, ctx), unitary(p, e), b2_odd(ctx), ree_small(e)."""
    if kind == "matrix":
        return _matrix_kind(params["a"], params["c"], params["ctx"])
    if kind == "unitary":
        return _unitary_kind(params["p"], params["e"])
    if kind == "b2_odd":
        return _b2_odd_kind(params["ctx"])
    if kind == "ree_small":
        return _ree_small_kind(params["e"])
    raise InvalidConfigError("unknown nursery kind %r" % kind)
