"""Code subgroups of (Sym_3)^k: weight recovery and class counting."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from kinderlab import altcodes, smallgrp
from kinderlab.errors import CapExceededError, InvalidConfigError
from kinderlab.gf import make_field
from kinderlab.linalg import Subspace, enumerate_subspaces, rref

F2 = make_field(2, 1)


def test_sym3_tables():
    assert altcodes.SIGN3 == (0, 1, 1, 0, 0, 1)
    assert altcodes.MUL3[0] == (0, 1, 2, 3, 4, 5)
    # MUL3 is a group table: associativity and inverses
    for a in range(6):
        for b in range(6):
            assert altcodes.SIGN3[altcodes.MUL3[a][b]] == (
                altcodes.SIGN3[a] ^ altcodes.SIGN3[b]
            )
            for c in range(6):
                assert (
                    altcodes.MUL3[altcodes.MUL3[a][b]][c]
                    == altcodes.MUL3[a][altcodes.MUL3[b][c]]
                )


def test_build_gamma_shapes():
    G1 = altcodes.build_gamma(1)
    assert G1.group.n == 6 and len(G1.gamma2_idx) == 3
    assert smallgrp.find_isomorphism(G1.group, smallgrp.symmetric_group(3)) is not None
    G2 = altcodes.build_gamma(2)
    assert G2.group.n == 36
    G3 = altcodes.build_gamma(3)
    Q = G3.quotient()
    assert Q.n == 8 and Q.is_abelian() and Q.exponent() == 2


def test_build_gamma_cap():
    with pytest.raises(CapExceededError):
        altcodes.build_gamma(7)


def test_subgroup_orders():
    G3 = altcodes.build_gamma(3)
    assert altcodes.subgroup_from_code(G3, Subspace.zero(F2, 3)).n == 27
    assert altcodes.subgroup_from_code(G3, Subspace.full(F2, 3)).n == 216
    line = Subspace.from_vectors(F2, 3, [[1, 1, 0]])
    assert altcodes.subgroup_from_code(G3, line).n == 54
    with pytest.raises(InvalidConfigError):
        altcodes.subgroup_from_code(G3, Subspace.zero(F2, 2))


def test_hamming_examples():
    G3 = altcodes.build_gamma(3)
    H = altcodes.subgroup_from_code(G3, Subspace.full(F2, 3))
    assert altcodes.hamming_recover(H, (0, 0, 0)) == 0
    assert altcodes.hamming_recover(H, (3, 0, 4)) == 0  # inside Gamma_2
    assert altcodes.hamming_recover(H, (1, 0, 1)) == 2
    line = altcodes.subgroup_from_code(G3, Subspace.from_vectors(F2, 3, [[1, 1, 0]]))
    with pytest.raises(InvalidConfigError):
        altcodes.hamming_recover(line, (1, 0, 1))  # not a member


def test_hamming_exhaustive_k3():
    G3 = altcodes.build_gamma(3)
    for ell in range(4):
        for code in enumerate_subspaces(3, ell, F2):
            H = altcodes.subgroup_from_code(G3, code)
            for lab in H.labels:
                assert altcodes.hamming_recover(H, lab) == G3.weight(lab)


def test_hamming_relabeling_invariant():
    G3 = altcodes.build_gamma(3)
    H = altcodes.subgroup_from_code(
        G3, Subspace.from_vectors(F2, 3, [[1, 1, 0], [0, 1, 1]])
    )
    rng = random.Random(11)
    perm = list(range(H.n))
    rng.shuffle(perm)
    newlab = {H.labels[i]: "x%03d" % perm[i] for i in range(H.n)}
    back = {v: k for k, v in newlab.items()}
    H2 = smallgrp.SmallGroup(
        sorted(newlab.values()),
        lambda a, b: newlab[altcodes._mul_tuple(back[a], back[b])],
    )
    for lab in H.labels[:40]:
        assert altcodes.hamming_recover(H2, newlab[lab]) == altcodes.hamming_recover(H, lab)


def test_code_classes_frozen():
    for k in (1, 2, 3, 4):
        cnt, bnd = altcodes.code_classes(k, 0)
        assert cnt == 1 and bnd == Fraction(1, math.factorial(k))
    assert altcodes.code_classes(2, 1) == (2, Fraction(1))
    c42, b42 = altcodes.code_classes(4, 2)
    assert b42 == Fraction(16, 24)
    assert c42 >= math.ceil(b42)
    with pytest.raises(InvalidConfigError):
        altcodes.code_classes(3, 4)
    with pytest.raises(CapExceededError):
        altcodes.code_classes(7, 2)


def _classes_bruteforce(k, l):
    """Canonical min-RREF over all k! coordinate permutations."""
    perms = list(itertools.permutations(range(k)))
    canon = set()
    for S in enumerate_subspaces(k, l, F2):
        best = None
        for p in perms:
            rows = [[row[p[i]] for i in range(k)] for row in S.basis]
            basis, _ = rref(rows, F2)
            if best is None or basis < best:
                best = basis
        canon.add(best)
    return len(canon)


def test_code_classes_vs_bruteforce():
    for k in range(1, 5):
        for l in range(k + 1):
            assert altcodes.code_classes(k, l)[0] == _classes_bruteforce(k, l)


def test_iso_classes_match_code_classes_k3():
    G3 = altcodes.build_gamma(3)
    groups = [
        altcodes.subgroup_from_code(G3, S)
        for l in range(4)
        for S in enumerate_subspaces(3, l, F2)
    ]
    classes, _ = smallgrp.iso_classes(groups)
    total = sum(altcodes.code_classes(3, l)[0] for l in range(4))
    assert len(classes) == total == 8


def test_code_class_table_payload():
    import json

    table = altcodes.code_class_table(4, 2)
    json.dumps(table)
    assert table["subspaces"] == 35
    assert table["classes"] == altcodes.code_classes(4, 2)[0]
    assert sum(c["size"] for c in table["table"]) == 35
    assert table["bound"] == {"numerator": 2, "denominator": 3}
