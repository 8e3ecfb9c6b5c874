"""Step-set validation, classification, canonicalization, and decompositions."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import symmetric_models
from orthantwalks.laurent import LaurentPoly
from orthantwalks.stepset import (
    HIGHLY_SYMMETRIC,
    MISSING_ONE_AXIS,
    UNSUPPORTED,
    StepSetError,
    UnsupportedModelError,
    build_stepset,
    classify,
    decompose,
    stepset_from_document,
)


def test_highly_symmetric_classification():
    s = build_stepset(2, ["N", "S", "E", "W"])
    cls = classify(s)
    assert cls.kind == HIGHLY_SYMMETRIC and cls.drift_sign == 0
    assert s.axis_order == (0, 1)


def test_positive_drift_example():
    s = build_stepset(2, ["NE", "NW", "S"])
    cls = classify(s)
    assert cls.kind == MISSING_ONE_AXIS and cls.drift_sign == 1
    d = decompose(s)
    assert d.A == LaurentPoly.const(1, 1)
    assert d.Q.is_zero()
    assert d.B == LaurentPoly(1, {(1,): 1, (-1,): 1})
    assert d.drift == 1
    assert d.b_scalars == (Fraction(1),)


def test_negative_drift_example():
    s = build_stepset(2, ["N", "SE", "S", "SW"])
    d = decompose(s)
    assert d.A == LaurentPoly(1, {(1,): 1, (0,): 1, (-1,): 1})
    assert d.Q.is_zero()
    assert d.B == LaurentPoly.const(1, 1)
    assert d.drift == -2
    assert classify(s).drift_sign == -1


def test_bq_and_abprime_splits():
    d = decompose(build_stepset(2, ["N", "SE", "S", "SW"]))
    B1, Q1 = d.BQ_pairs[0]
    assert B1 == LaurentPoly(1, {(1,): 1})
    assert Q1 == LaurentPoly(1, {(1,): 1, (-1,): 1})
    Ap, Bp, App, Bpp = d.ABprime[0]
    assert (Ap, App) == (LaurentPoly.const(0, 1), LaurentPoly.const(0, 1))
    assert (Bp, Bpp) == (LaurentPoly.zero(0), LaurentPoly.const(0, 1))


def test_no_symmetry_model_is_unsupported():
    s = build_stepset(2, ["N", "W", "SE"])
    assert classify(s).kind == UNSUPPORTED
    with pytest.raises(UnsupportedModelError):
        decompose(s)


def test_zero_drift_non_hs_is_unsupported():
    # weighted model with balanced drift but asymmetric vertical weighting
    steps = [((1, 0), 1), ((-1, 0), 1),
             ((1, 1), 2), ((-1, 1), 2), ((0, 1), 1),
             ((1, -1), 1), ((-1, -1), 1), ((0, -1), 3)]
    s = build_stepset(2, steps)
    cls = classify(s)
    assert cls.kind == UNSUPPORTED and cls.drift_sign == 0


def test_canonical_order_moves_drift_axis_last():
    # same walk as NE,NW,S but with the roles of the axes swapped
    s = build_stepset(2, [((1, 1), 1), ((1, -1), 1), ((-1, 0), 1)])
    assert s.axis_order == (1, 0)
    d = decompose(s)
    assert d.A == LaurentPoly.const(1, 1)
    assert d.B == LaurentPoly(1, {(1,): 1, (-1,): 1})
    assert s.to_canonical_axes({0}) == frozenset({1})


def test_validation_errors():
    with pytest.raises(StepSetError):
        build_stepset(1, [])
    with pytest.raises(StepSetError):
        build_stepset(2, ["N", "S", "E"])  # no backward step on axis 1
    with pytest.raises(StepSetError):
        build_stepset(2, [("N", 0), "S", "E", "W"])
    with pytest.raises(StepSetError):
        build_stepset(2, ["N", "N", "S", "E", "W"])
    with pytest.raises(StepSetError):
        build_stepset(2, [((2, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])
    with pytest.raises(StepSetError):
        build_stepset(2, [((0, 0), 1), ("N", 1), ("S", 1), ("E", 1), ("W", 1)])


def test_decimal_weights_parse_exactly():
    s = build_stepset(2, [("N", "0.5"), ("S", "1/2"), ("E", 1), ("W", 1)])
    assert s.total_weight() == 3


def test_model_document_parsing():
    doc = {"dimension": 2,
           "steps": [{"vector": [0, 1], "weight": "1"},
                     {"vector": "SE", "weight": "3/2"},
                     "S",
                     {"vector": [-1, -1], "weight": "1.5"}]}
    s = stepset_from_document(doc)
    assert s.total_weight() == Fraction(5)
    assert classify(s).kind == MISSING_ONE_AXIS


@settings(max_examples=40, deadline=None)
@given(symmetric_models(), st.sampled_from([Fraction(2), Fraction(3, 2), Fraction(1, 3)]))
def test_weight_scaling_invariance(s, lam):
    d = decompose(s)
    sd = decompose(s.scaled(lam))
    ones = (1,) * (s.dim - 1)
    assert sd.total_weight == lam * d.total_weight
    assert sd.A.eval(ones) == lam * d.A.eval(ones)
    assert sd.B.eval(ones) == lam * d.B.eval(ones)
    assert sd.b_scalars == tuple(lam * b for b in d.b_scalars)
    assert classify(s.scaled(lam)) == classify(s)


@settings(max_examples=40, deadline=None)
@given(symmetric_models())
def test_reflection_closure(s):
    cls = classify(s)
    sym_axes = [j for j in range(s.dim) if j != cls.axis]
    for j in sym_axes:
        reflected = []
        for v, w in s.steps:
            rv = list(v)
            rv[j] = -rv[j]
            reflected.append((tuple(rv), w))
        r = build_stepset(s.dim, reflected)
        assert decompose(r) == decompose(s)


@settings(max_examples=30, deadline=None)
@given(symmetric_models(dims=(3,)))
def test_symmetric_axis_relabeling(s):
    cls = classify(s)
    drift_axis = s.axis_order[s.dim - 1]
    sym = [j for j in range(s.dim) if j != drift_axis]
    for perm in itertools.permutations(sym):
        mapping = dict(zip(sym, perm))
        mapping[drift_axis] = drift_axis
        relabeled = [(tuple(v[mapping[j]] for j in range(s.dim)), w) for v, w in s.steps]
        r = build_stepset(s.dim, relabeled)
        dr, ds = decompose(r), decompose(s)
        assert dr.total_weight == ds.total_weight
        assert dr.drift == ds.drift
        assert sorted(dr.b_scalars) == sorted(ds.b_scalars)
        assert classify(r).kind == cls.kind
