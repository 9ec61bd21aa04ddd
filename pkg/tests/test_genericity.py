"""Frequency experiments: exact enumerations, seeded sampling, bounds."""

from fractions import Fraction

import pytest

from kinderlab import genericity as gn
from kinderlab.errors import CapExceededError, InvalidConfigError


def test_span_exhaustive_frozen():
    r = gn.exhaustive_mode("span", {"n": 2, "s": 3, "q": 2})
    assert (r.trials, r.success) == (64, 42)
    assert r.frequency == Fraction(21, 32)
    assert r.bound == Fraction(5, 8)
    assert r.exact
    r2 = gn.exhaustive_mode("span", {"n": 1, "s": 1, "q": 2})
    assert r2.frequency == Fraction(1, 2) and r2.bound == Fraction(1, 2)


def test_span_exhaustive_formula():
    # spanning s-tuples in F_q^n number prod_i (q^s - q^i)
    for n in range(1, 4):
        for s in range(1, 4):
            for q in (2, 3):
                r = gn.exhaustive_mode("span", {"n": n, "s": s, "q": q})
                expect = 1
                for i in range(n):
                    expect *= max(q**s - q**i, 0)
                assert r.success == expect


def test_span_bound_formula():
    for n, s, q in ((2, 3, 2), (3, 2, 3), (1, 4, 2)):
        want = 1 - (Fraction(q) ** (n - s) - Fraction(1, q**s)) / (q - 1)
        assert gn.span_bound(n, s, q) == want
    assert gn.span_bound(3, 2, 3) == Fraction(-4, 9)  # the bound may go vacuous


def test_estimate_deterministic():
    r1 = gn.estimate("span", {"n": 2, "s": 3, "q": 2}, 2000, seed=11)
    r2 = gn.estimate("span", {"n": 2, "s": 3, "q": 2}, 2000, seed=11)
    assert (r1.success, r1.histogram) == (r2.success, r2.histogram)
    r3 = gn.estimate("span", {"n": 2, "s": 3, "q": 2}, 2000, seed=12)
    assert (r3.success, r3.histogram) != (r1.success, r1.histogram)


def test_estimate_near_exact():
    exact = float(gn.exhaustive_mode("span", {"n": 2, "s": 3, "q": 2}).frequency)
    r = gn.estimate("span", {"n": 2, "s": 3, "q": 2}, 4000, seed=11)
    assert abs(float(r.frequency) - exact) < 0.03


def test_histogram_totals():
    r = gn.estimate("end_generic", {"m": 2, "n": 2, "s": 2, "q": 3}, 500, seed=1)
    assert sum(r.histogram.values()) == 500 == r.trials
    assert r.success == r.histogram.get(1, 0)


def test_end_generic_exhaustive_tiny():
    r = gn.exhaustive_mode("end_generic", {"m": 1, "n": 1, "s": 1, "q": 2})
    assert r.trials == 2 and r.frequency == Fraction(1, 2)
    assert r.histogram == {1: 1, 2: 1}


def test_derived_full_exhaustive_frozen():
    r = gn.exhaustive_mode("derived_full", {"a": 2, "b": 2, "ell": 3, "q": 2})
    assert r.bound == Fraction(15, 16)
    assert r.frequency >= r.bound
    assert gn.derived_full_bound(2, 2, 3, 2) == Fraction(15, 16)
    assert gn.derived_full_bound(2, 1, 2, 3) == Fraction(26, 27)
    assert gn.derived_full_bound(1, 2, 1, 3) == -2  # vacuous below aL <= b


def test_derived_full_sampled_close():
    re = gn.exhaustive_mode("derived_full", {"a": 2, "b": 2, "ell": 2, "q": 2})
    rs = gn.estimate("derived_full", {"a": 2, "b": 2, "ell": 2, "q": 2}, 3000, seed=5)
    f = float(re.frequency)
    assert abs(float(rs.frequency) - f) <= 0.05


def test_lambda_end_extras():
    r = gn.estimate("lambda_end", {"a": 2, "b": 3, "c": 4, "q": 3}, 300, seed=9)
    x = r.extra
    for key in ("modal_dim", "modal_diag", "modal_offdiag", "diag_hist", "offdiag_hist", "supports"):
        assert key in x, key
    assert x["modal_diag"] == 2
    assert sum(x["diag_hist"].values()) == 300
    assert r.success == r.histogram[x["modal_dim"]]


def test_lambda_end_square_supports():
    r = gn.estimate("lambda_end", {"a": 3, "b": 3, "c": 4, "q": 3}, 200, seed=9)
    assert r.extra["modal_dim"] == 2
    assert "End(Lambda) = K+K" in r.extra["supports"]


def test_nucleus_histogram():
    r = gn.estimate("nucleus", {"a": 2, "b": 2, "c": 1, "ell": 2, "q": 3}, 300, seed=2)
    assert sum(r.histogram.values()) == 300
    assert r.success == r.histogram.get(1, 0)  # c^2 = 1


def test_kinds_and_validation():
    assert set(gn.KINDS) == {
        "span",
        "end_generic",
        "hom_pm_transpose",
        "lambda_end",
        "nucleus",
        "derived_full",
    }
    with pytest.raises(InvalidConfigError):
        gn.estimate("nope", {"q": 2}, 10, seed=0)
    with pytest.raises(CapExceededError):
        gn.exhaustive_mode("lambda_end", {"a": 2, "b": 3, "c": 4, "q": 3})
