"""Concrete finite groups small enough to enumerate, with subgroup and
isomorphism-class census tooling.

A SmallGroup wraps an explicit element list plus a multiplication callable on
labels.  Everything downstream works on integer indices; generator columns of
the multiplication table are cached lazily so that full n x n tables are never
materialized.

The isomorphism test is a backtracking search over generator images, pruned
by element invariants, with the homomorphism property enforced incrementally
during closure.  When the search exhausts, the groups really are
non-isomorphic; a found map is verified on every (element, generator) pair,
which is sufficient by induction on word length.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import gcd

from . import arith
from .errors import CapExceededError, InvalidConfigError, PropertyViolationError

SUBGROUP_ORDER_CAP = 2048
ISO_ORDER_CAP = 512
_SUBGROUP_COUNT_CAP = 100000
_ISO_NODE_BUDGET = 5 * 10**6


class SmallGroup:
    def __init__(self, labels, mul, name=None):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.name = name
        self._idx = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._idx) != self.n:
            raise InvalidConfigError("duplicate labels")
        self._mul_label = mul
        self._col_cache = {}
        self._orders = None
        self._inverses = None
        self._classes = None
        self._gens = None
        self._fp = None
        # direct label products: mul_idx here would allocate a column per element
        idempotents = [
            i for i, lab in enumerate(self.labels) if self._mul_label(lab, lab) == lab
        ]
        if len(idempotents) != 1:
            raise InvalidConfigError("element set is not a group (idempotents: %d)" % len(idempotents))
        self.identity = idempotents[0]

    # -- construction helpers

    @classmethod
    def from_generators(cls, mul, gens, cap=SUBGROUP_ORDER_CAP, name=None):
        """Closure of the given labels under mul (BFS, deterministic order)."""
        seen = dict.fromkeys(gens)
        queue = list(seen)
        for x in queue:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    if len(seen) >= cap:
                        raise CapExceededError("closure exceeded cap %d" % cap)
                    seen[y] = None
                    queue.append(y)
        labels = list(seen)
        try:
            labels.sort()
        except TypeError:
            pass
        return cls(labels, mul, name=name)

    def index_of(self, label) -> int:
        return self._idx[label]

    def mul_idx(self, i: int, j: int) -> int:
        col = self._col_cache.get(j)
        if col is not None:
            v = col[i]
            if v >= 0:
                return v
        else:
            col = self._col_cache[j] = [-1] * self.n
        v = self._idx[self._mul_label(self.labels[i], self.labels[j])]
        col[i] = v
        return v

    def inverse_idx(self, i: int) -> int:
        if self._inverses is None:
            self._inverses = [-1] * self.n
        if self._inverses[i] < 0:
            y = self.identity
            while self.mul_idx(y, i) != self.identity:
                y = self.mul_idx(y, i)
            self._inverses[i] = y
        return self._inverses[i]

    def order_of(self, i: int) -> int:
        if self._orders is None:
            self._orders = [0] * self.n
        if not self._orders[i]:
            k = 1
            x = i
            while x != self.identity:
                x = self.mul_idx(x, i)
                k += 1
            self._orders[i] = k
        return self._orders[i]

    def element_orders(self):
        return [self.order_of(i) for i in range(self.n)]

    def commutator_idx(self, i: int, j: int) -> int:
        a = self.mul_idx(self.inverse_idx(i), self.inverse_idx(j))
        return self.mul_idx(self.mul_idx(a, i), j)

    def conjugate_idx(self, i: int, g: int) -> int:
        """g^-1 * i * g"""
        return self.mul_idx(self.mul_idx(self.inverse_idx(g), i), g)

    # -- structural subsets (all as sorted index tuples)

    def closure_idx(self, seeds) -> tuple:
        seeds = list(dict.fromkeys(seeds)) or [self.identity]
        seen = set(seeds)
        queue = list(seeds)
        for x in queue:
            for g in seeds:
                y = self.mul_idx(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        seen.add(self.identity)
        return tuple(sorted(seen))

    def generating_set(self) -> tuple:
        """A small generating set, greedy by closure growth."""
        if self._gens is not None:
            return self._gens
        if self.n == 1:
            self._gens = ()
            return self._gens
        orders = self.element_orders()
        first = max(range(self.n), key=lambda i: (orders[i], -i))
        gens = [first]
        current = set(self.closure_idx(gens))
        while len(current) < self.n:
            outside = [i for i in range(self.n) if i not in current]
            best = None
            best_size = -1
            for cand in outside[:48]:
                size = len(self.closure_idx(gens + [cand]))
                if size > best_size:
                    best, best_size = cand, size
                if size == self.n:
                    break
            gens.append(best)
            current = set(self.closure_idx(gens))
        # drop redundant generators, smallest sets help the iso search
        changed = True
        while changed and len(gens) > 1:
            changed = False
            for k in range(len(gens)):
                trial = gens[:k] + gens[k + 1 :]
                if len(self.closure_idx(trial)) == self.n:
                    gens = trial
                    changed = True
                    break
        self._gens = tuple(gens)
        return self._gens

    def conjugacy_classes(self):
        if self._classes is None:
            gens = self.generating_set()
            unseen = set(range(self.n))
            classes = []
            while unseen:
                start = min(unseen)
                orbit = {start}
                queue = [start]
                for x in queue:
                    for g in gens:
                        y = self.conjugate_idx(x, g)
                        if y not in orbit:
                            orbit.add(y)
                            queue.append(y)
                unseen -= orbit
                classes.append(tuple(sorted(orbit)))
            self._classes = classes
        return self._classes

    def center_idx(self) -> tuple:
        gens = self.generating_set()
        out = [
            i
            for i in range(self.n)
            if all(self.mul_idx(i, g) == self.mul_idx(g, i) for g in gens)
        ]
        return tuple(out)

    def normal_closure_idx(self, seeds) -> tuple:
        gens = self.generating_set()
        current = set(self.closure_idx(seeds))
        while True:
            extra = [
                y
                for x in current
                for g in gens
                if (y := self.conjugate_idx(x, g)) not in current
            ]
            if not extra:
                return tuple(sorted(current))
            current = set(self.closure_idx(list(current) + extra))

    def derived_subgroup_idx(self) -> tuple:
        gens = self.generating_set()
        comms = [self.commutator_idx(i, j) for i in gens for j in gens]
        return self.normal_closure_idx(comms)

    def derived_series_orders(self) -> tuple:
        out = [self.n]
        current = self
        while True:
            d = current.derived_subgroup_idx()
            if len(d) == len(current.labels):
                break
            current = current.subgroup(d)
            out.append(current.n)
            if current.n == 1:
                break
        return tuple(out)

    def subgroup(self, idx_subset) -> "SmallGroup":
        labs = [self.labels[i] for i in idx_subset]
        return SmallGroup(labs, self._mul_label)

    def quotient(self, normal_idx) -> "SmallGroup":
        """Quotient by a normal subgroup given as an index collection."""
        nset = set(normal_idx)
        coset_of = {}
        reps = []
        for i in range(self.n):
            if i in coset_of:
                continue
            members = sorted(self.mul_idx(i, k) for k in nset)
            rep = members[0]
            reps.append(rep)
            for m in members:
                if m in coset_of and coset_of[m] != rep:
                    raise InvalidConfigError("subset is not normal")
                coset_of[m] = rep
        def qmul(a, b):
            return coset_of[self.mul_idx(a, b)]
        return SmallGroup(sorted(reps), qmul)

    def is_abelian(self) -> bool:
        gens = self.generating_set()
        return all(self.mul_idx(a, b) == self.mul_idx(b, a) for a in gens for b in gens)

    def exponent(self) -> int:
        out = 1
        for o in set(self.element_orders()):
            out = out * o // gcd(out, o)
        return out

    # -- invariants

    def element_invariant(self, i: int):
        classes = self.conjugacy_classes()
        if not hasattr(self, "_class_size_of"):
            self._class_size_of = [0] * self.n
            for cl in classes:
                for x in cl:
                    self._class_size_of[x] = len(cl)
        return (self.order_of(i), self._class_size_of[i])

    def fingerprint(self) -> "IsoFingerprint":
        if self._fp is None:
            hist = {}
            for o in self.element_orders():
                hist[o] = hist.get(o, 0) + 1
            profile = {}
            for i in range(self.n):
                key = self.element_invariant(i)
                profile[key] = profile.get(key, 0) + 1
            derived = self.derived_series_orders()
            ab = self.quotient(self.derived_subgroup_idx())
            ab_hist = {}
            for o in ab.element_orders():
                ab_hist[o] = ab_hist.get(o, 0) + 1
            self._fp = IsoFingerprint(
                order=self.n,
                order_hist=tuple(sorted(hist.items())),
                center_order=len(self.center_idx()),
                derived_orders=derived,
                abelian_hist=tuple(sorted(ab_hist.items())),
                exponent=self.exponent(),
                class_profile=tuple(sorted(profile.items())),
            )
        return self._fp

    def __repr__(self):
        return "SmallGroup(n=%d%s)" % (self.n, ", %s" % self.name if self.name else "")


@dataclass(frozen=True)
class IsoFingerprint:
    order: int
    order_hist: tuple
    center_order: int
    derived_orders: tuple
    abelian_hist: tuple
    exponent: int
    class_profile: tuple


# ---------------------------------------------------------------------------
# isomorphism search

def find_isomorphism(G: SmallGroup, H: SmallGroup, node_budget=_ISO_NODE_BUDGET):
    """An explicit isomorphism G -> H as an index list, or None.

    None means proven non-isomorphic (search space exhausted).  Raises
    CapExceededError when the node budget runs out first.
    """
    if G.n != H.n:
        return None
    if G.n == 1:
        return [H.identity]
    if G.fingerprint() != H.fingerprint():
        return None
    gens = G.generating_set()
    buckets = {}
    for j in range(H.n):
        buckets.setdefault(H.element_invariant(j), []).append(j)
    candidates = []
    for g in gens:
        cand = buckets.get(G.element_invariant(g), [])
        if not cand:
            return None
        candidates.append(cand)

    gmap = [-1] * G.n
    hmap = [-1] * H.n
    gmap[G.identity] = H.identity
    hmap[H.identity] = G.identity
    budget = [node_budget]

    def extend(depth: int, assigned: list) -> bool:
        """Close the partial map over <gens[0..depth]>; log additions in assigned."""
        known = [i for i in range(G.n) if gmap[i] >= 0]
        active = gens[: depth + 1]
        queue = list(known)
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            fx = gmap[x]
            for g in active:
                y = G.mul_idx(x, g)
                fy = H.mul_idx(fx, gmap[g])
                if gmap[y] < 0:
                    if hmap[fy] >= 0:
                        return False
                    gmap[y] = fy
                    hmap[fy] = y
                    assigned.append(y)
                    queue.append(y)
                elif gmap[y] != fy:
                    return False
        return True

    def dfs(depth: int) -> bool:
        if depth == len(gens):
            return all(v >= 0 for v in gmap)
        g = gens[depth]
        if gmap[g] >= 0:
            # already forced by closure at an earlier level
            assigned = []
            if extend(depth, assigned) and dfs(depth + 1):
                return True
            for y in assigned:
                hmap[gmap[y]] = -1
                gmap[y] = -1
            return False
        for h in candidates[depth]:
            if hmap[h] >= 0:
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise CapExceededError("isomorphism search budget exhausted")
            gmap[g] = h
            hmap[h] = g
            assigned = [g]
            if extend(depth, assigned) and dfs(depth + 1):
                return True
            for y in assigned:
                hmap[gmap[y]] = -1
                gmap[y] = -1
        return False

    if dfs(0):
        return list(gmap)
    return None


def verify_isomorphism(G: SmallGroup, H: SmallGroup, mapping) -> bool:
    """Check mapping on every (element, generator) product; that suffices."""
    if sorted(mapping) != list(range(H.n)):
        return False
    gens = G.generating_set() or (G.identity,)
    if mapping[G.identity] != H.identity:
        return False
    for x in range(G.n):
        for g in gens:
            if mapping[G.mul_idx(x, g)] != H.mul_idx(mapping[x], mapping[g]):
                return False
    return True


# ---------------------------------------------------------------------------
# subgroup lattice and census

def all_subgroups(G: SmallGroup, cap_order=SUBGROUP_ORDER_CAP, cap_count=_SUBGROUP_COUNT_CAP):
    """Every subgroup of G as sorted index tuples (bottom-up join closure)."""
    if G.n > cap_order:
        raise CapExceededError("group order %d over enumeration cap %d" % (G.n, cap_order))
    trivial = (G.identity,)
    cyclic = {}
    for i in range(G.n):
        c = G.closure_idx([i])
        if c not in cyclic:
            cyclic[c] = (i,)
    subs = {trivial: ()}
    subs.update(cyclic)
    frontier = list(subs)
    cyclic_items = sorted(cyclic.items(), key=lambda kv: (len(kv[0]), kv[0]))
    while frontier:
        fresh = []
        for S in frontier:
            sset = set(S)
            sgens = subs[S]
            for C, cgens in cyclic_items:
                if set(C) <= sset:
                    continue
                gens = tuple(dict.fromkeys(sgens + cgens))
                J = G.closure_idx(gens)
                if J not in subs:
                    if len(subs) >= cap_count:
                        raise CapExceededError("subgroup count cap %d hit" % cap_count)
                    subs[J] = gens
                    fresh.append(J)
        frontier = fresh
    return sorted(subs, key=lambda t: (len(t), t))


def iso_classes(groups, node_budget=_ISO_NODE_BUDGET):
    """Partition groups into isomorphism classes.

    Returns (classes, witnesses): classes is a list of index lists, each led
    by its representative; witnesses maps a member index to a verified
    mapping list from the class representative onto that member.
    """
    buckets = {}
    for k, g in enumerate(groups):
        buckets.setdefault(g.fingerprint(), []).append(k)
    classes = []
    witnesses = {}
    for fp in sorted(buckets, key=lambda f: (f.order, f.order_hist, f.class_profile)):
        reps = []  # indices into classes
        for k in buckets[fp]:
            placed = False
            for ci in reps:
                rep_idx = classes[ci][0]
                mapping = find_isomorphism(groups[rep_idx], groups[k], node_budget)
                if mapping is not None:
                    if not verify_isomorphism(groups[rep_idx], groups[k], mapping):
                        raise InvalidConfigError("search returned a non-isomorphism")
                    classes[ci].append(k)
                    witnesses[k] = mapping
                    placed = True
                    break
            if not placed:
                reps.append(len(classes))
                classes.append([k])
    classes.sort(key=lambda c: c[0])
    return classes, witnesses


def sigma_counts(G: SmallGroup, cap_order=SUBGROUP_ORDER_CAP, iso_order_cap=ISO_ORDER_CAP):
    """(number of subgroups, number of isomorphism types of subgroups)."""
    subs = all_subgroups(G, cap_order=cap_order)
    if any(len(s) > iso_order_cap for s in subs):
        raise CapExceededError("a subgroup exceeds the iso cap %d" % iso_order_cap)
    groups = [G.subgroup(s) for s in subs]
    classes, _ = iso_classes(groups)
    sigma = len(subs)
    sigma_iso = len(classes)
    assert sigma_iso <= sigma
    if math.log2(sigma) > arith.wall_log_bound(G.n) + 1e-9:
        raise PropertyViolationError("subgroup count violates the generation bound")
    return sigma, sigma_iso


# ---------------------------------------------------------------------------
# stock constructions for tests and oracles

def _pcompose(a, b):
    # apply b first, then a
    return tuple(a[x] for x in b)


def perm_parity(p) -> int:
    seen = [False] * len(p)
    parity = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def symmetric_group(n: int) -> SmallGroup:
    return SmallGroup(sorted(itertools.permutations(range(n))), _pcompose, name="Sym%d" % n)


def alternating_group(n: int) -> SmallGroup:
    labs = [p for p in itertools.permutations(range(n)) if perm_parity(p) == 0]
    return SmallGroup(sorted(labs), _pcompose, name="Alt%d" % n)


def cyclic_group(n: int) -> SmallGroup:
    return SmallGroup(range(n), lambda a, b: (a + b) % n, name="C%d" % n)


def dihedral_group(n: int) -> SmallGroup:
    """Dihedral group of order 2n (symmetries of the n-gon)."""
    if n < 3:
        raise InvalidConfigError("dihedral groups need n >= 3")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((n - i) % n for i in range(n))
    return SmallGroup.from_generators(_pcompose, [rot, ref], name="D%d" % (2 * n))


def direct_product(G: SmallGroup, H: SmallGroup) -> SmallGroup:
    labels = [(a, b) for a in G.labels for b in H.labels]
    gm, hm = G._mul_label, H._mul_label
    return SmallGroup(labels, lambda x, y: (gm(x[0], y[0]), hm(x[1], y[1])))


def unitriangular_group(d: int, ctx) -> SmallGroup:
    """Upper unitriangular d x d matrices over the given field."""
    from .linalg import Matrix

    positions = [(i, j) for i in range(d) for j in range(i + 1, d)]
    labels = []
    for vals in itertools.product(range(ctx.order), repeat=len(positions)):
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        for (i, j), v in zip(positions, vals):
            rows[i][j] = v
        labels.append(tuple(tuple(r) for r in rows))
    def mul(a, b):
        return Matrix(ctx, a).mul(Matrix(ctx, b)).rows
    return SmallGroup(labels, mul, name="U%d(GF%d)" % (d, ctx.order))
