"""Nurseries, kinder, and the reconstruction pipeline."""

import math
import random

import pytest

from kinderlab import genericity, nursery, smallgrp
from kinderlab.errors import CapExceededError, InvalidConfigError, PropertyViolationError
from kinderlab.gf import make_field
from kinderlab.linalg import Subspace, enumerate_subspaces, gaussian_binomial

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)


def test_matrix_11_f2_is_heisenberg():
    N = nursery.make_nursery("matrix", a=1, c=1, ctx=F2)
    assert (N.order, N.rdim, N.mdim) == (8, 1, 1)
    G1 = N.gamma1_group()
    U3 = smallgrp.unitriangular_group(3, F2)
    assert smallgrp.find_isomorphism(G1, U3) is not None
    assert smallgrp.sigma_counts(G1) == (10, 5)


def test_matrix_21_f2_shape():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    assert N2.order == 256
    assert len(N2.s_coords) == 3
    assert N2.s_subspace().dim == 3
    K = nursery.kind_from_subspace(N2, N2.s_subspace())
    assert K.order == 128
    assert K.group().n == 128


def test_matrix_extension_field():
    N = nursery.make_nursery("matrix", a=1, c=1, ctx=F4)
    assert N.rdim == 2 and N.mdim == 2 and N.order == 64
    G = N.gamma1_group()
    assert G.n == 64


def test_unitary_kinds():
    NU = nursery.make_nursery("unitary", p=2, e=1)
    assert (NU.order, NU.rdim, NU.mdim) == (8, 1, 1)
    NU3 = nursery.make_nursery("unitary", p=3, e=1)
    G = NU3.gamma1_group()
    assert G.n == 27 and G.exponent() == 3
    assert G.fingerprint().derived_orders == (27, 3, 1)
    NU22 = nursery.make_nursery("unitary", p=2, e=2)
    assert NU22.rdim == 2 and NU22.mdim == 2 and NU22.order == 64
    assert len(NU22.s_coords) == 2


def test_b2_odd_extraspecial():
    N3 = nursery.make_nursery("b2_odd", ctx=F3)
    assert N3.order == 27
    G3 = N3.gamma1_group()
    fp = G3.fingerprint()
    assert fp.center_order == 3 and fp.derived_orders == (27, 3, 1) and G3.exponent() == 3


def test_ree_small():
    NR = nursery.make_nursery("ree_small", e=1)
    assert NR.order == 3**9 and NR.rdim == 3 and NR.mdim == 3


def test_make_nursery_rejects_unknown():
    with pytest.raises(InvalidConfigError):
        nursery.make_nursery("mystery")


def test_kind_validation():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    with pytest.raises(InvalidConfigError):
        nursery.kind_from_subspace(N2, Subspace.zero(F2, 4))  # misses S
    with pytest.raises(InvalidConfigError):
        nursery.kind_from_subspace(N2, Subspace.zero(F2, 3))  # wrong ambient
    # relaxed mode admits it
    K0 = nursery.kind_from_subspace(N2, Subspace.zero(F2, 4), relaxed=True)
    assert K0.order == 16


def test_random_kind_anchoring():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    rng = random.Random(0)
    for ell in (3, 4):
        K = nursery.random_kind(N2, ell, rng)
        assert K.subspace.dim == ell
        for s in N2.s_coords:
            assert K.subspace.contains(s)
    with pytest.raises(InvalidConfigError):
        nursery.random_kind(N2, 1, rng)  # below dim span(S)


def test_derived_equals_gamma3():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    assert nursery.derived_equals_gamma3(
        nursery.kind_from_subspace(N2, Subspace.full(F2, 4))
    )
    e11 = Subspace.from_vectors(F2, 4, [[1, 0, 0, 0]])
    assert not nursery.derived_equals_gamma3(
        nursery.kind_from_subspace(N2, e11, relaxed=True)
    )
    scal = Subspace.from_vectors(F2, 4, [[1, 0, 0, 1]])
    assert nursery.derived_equals_gamma3(
        nursery.kind_from_subspace(N2, scal, relaxed=True)
    )


def test_derived_fraction_matches_genericity():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    rep = genericity.exhaustive_mode("derived_full", {"a": 2, "b": 2, "c": 1, "q": 2, "ell": 2})
    cnt = 0
    total = 0
    for V in enumerate_subspaces(4, 2, F2):
        total += 1
        cnt += nursery.derived_equals_gamma3(nursery.kind_from_subspace(N2, V, relaxed=True))
    assert total == gaussian_binomial(4, 2, 2) == 35
    assert (cnt, total) == (rep.success, rep.trials)


def test_reconstruct_exact():
    N = nursery.make_nursery("matrix", a=1, c=1, ctx=F2)
    K1 = nursery.kind_from_subspace(N, Subspace.full(F2, 1))
    rng = random.Random(7)
    rho, mu = nursery.random_frames(K1, rng)
    rec = nursery.reconstruct(K1, rho, mu)
    assert rec.X == frozenset(N.gamma2_labels())
    assert rec.Y == frozenset(N.gamma3_labels())
    assert rec.Z == frozenset([N.identity_label()])
    assert len(rec.X) == 4 and len(rec.Y) == 2


@pytest.mark.parametrize(
    "kindspec",
    [("matrix", dict(a=2, c=1, ctx=F2)), ("matrix", dict(a=1, c=1, ctx=F4)), ("unitary", dict(p=3, e=1))],
    ids=["matrix-2-1-F2", "matrix-1-1-F4", "unitary-3-1"],
)
def test_reconstruct_random_kinder(kindspec):
    name, params = kindspec
    N = nursery.make_nursery(name, **params)
    g2 = frozenset(N.gamma2_labels())
    g3 = frozenset(N.gamma3_labels())
    rng = random.Random(42)
    lo = N.s_subspace().dim
    for _ in range(10):
        K = nursery.random_kind(N, rng.randint(lo, N.rdim), rng)
        rho, mu = nursery.random_frames(K, rng)
        rec = nursery.reconstruct(K, rho, mu)
        assert rec.X == g2 and rec.Y == g3 and rec.Z == frozenset([N.identity_label()])


def test_reconstruct_rejects_collapsed_probes():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    K = nursery.kind_from_subspace(N2, Subspace.full(F2, 4))
    rng = random.Random(5)
    rho, mu = nursery.random_frames(K, rng)
    zr = (0,) * 4
    bad = {t: (zr, (0, 1), (0, 0)) for t in N2.t_vectors}
    with pytest.raises(PropertyViolationError):
        nursery.reconstruct(K, rho, bad)


def test_bound_log():
    assert nursery.bound_log("nursery_count", r=4, ell=2, s=1, m=2, t=1) == 0.0
    assert nursery.bound_log("coro_ud_lower", a=2, e=1, ell=2) == 0.0
    ob = nursery.bound_log("orbit_upper", a=2, b=2, c=1, e=1, p=2)
    assert abs(ob - math.log2(36)) < 1e-12
    assert nursery.bound_log("nursery_count", r=8, ell=4, s=3, m=4, t=2) == float(
        max(0, (4 - 3) * (8 - 4) - 4 * 3 - 4 * 2)
    )
    with pytest.raises(InvalidConfigError):
        nursery.bound_log("unknown_formula")


def test_census_against_subgroup_oracle():
    N = nursery.make_nursery("matrix", a=1, c=1, ctx=F2)
    rep0 = nursery.census(N, 0, relaxed=True)
    rep1 = nursery.census(N, 1, relaxed=True)
    assert (rep0.kinder_count, rep0.class_count) == (1, 1)
    assert (rep1.kinder_count, rep1.class_count) == (1, 1)
    G1 = N.gamma1_group()
    gam2 = set(N.gamma2_labels())
    over = [
        s
        for s in smallgrp.all_subgroups(G1)
        if gam2 <= {G1.labels[i] for i in s}
    ]
    assert len(over) == rep0.kinder_count + rep1.kinder_count


def test_census_strict_and_relaxed():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    rep = nursery.census(N2, 3)
    assert (rep.kinder_count, rep.class_count) == (1, 1)
    assert rep.bound_exponent == 0.0
    repr_ = nursery.census(N2, 2, relaxed=True)
    assert repr_.kinder_count == 35
    assert sum(c["members"] for c in repr_.classes) == 35
    payload = repr_.to_payload()
    import json

    json.dumps(payload)


def test_census_caps():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    with pytest.raises(CapExceededError):
        nursery.census(N2, 2, relaxed=True, max_kinder=10)
    with pytest.raises(InvalidConfigError):
        nursery.census(N2, 9)


def test_kind_group_cap():
    N2 = nursery.make_nursery("matrix", a=2, c=1, ctx=F2)
    K = nursery.kind_from_subspace(N2, Subspace.full(F2, 4))
    with pytest.raises(CapExceededError):
        K.group(cap=16)
