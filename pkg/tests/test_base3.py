import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlinkpred.base3 import (
    ComponentScores,
    InterpolationWeights,
    Scheme,
    base3_score,
    interpolate,
    parse_weights,
    weights_for,
)

flags = st.sampled_from([0, 1])
unit = st.floats(0.0, 1.0)
schemes = st.sampled_from(list(Scheme))


def test_uniform_weights_ignore_flags():
    assert weights_for("uniform", 1, 0).as_tuple() == (1 / 3, 1 / 3, 1 / 3)


def test_eb_conf_tables():
    assert weights_for("eb_conf", 1, 0).as_tuple() == (0.5, 0.2, 0.3)
    assert weights_for("eb_conf", 1, 1).as_tuple() == (0.5, 0.2, 0.3)
    assert weights_for("eb_conf", 0, 1).as_tuple() == (0.2, 0.3, 0.5)


@pytest.mark.parametrize(
    "eb, pt, expected",
    [(1, 1, (0.35, 0.45, 0.20)), (1, 0, (0.45, 0.25, 0.30)), (0, 1, (0.15, 0.70, 0.15)), (0, 0, (0.20, 0.45, 0.35))],
)
def test_multi_conf_table(eb, pt, expected):
    assert weights_for(Scheme.MULTI_CONF, eb, pt).as_tuple() == expected


@pytest.mark.parametrize(
    "scheme, scores, expected",
    [
        ("uniform", (1, 1, 1.0), 1.0),
        ("uniform", (1, 0, 0.0), 1 / 3),
        ("multi_conf", (0, 1, 0.5), 0.775),
        ("eb_conf", (0, 0, 1.0), 0.5),
    ],
)
def test_base3_examples(scheme, scores, expected):
    assert base3_score(ComponentScores(*scores), scheme) == pytest.approx(expected, abs=1e-12)


def test_default_scheme_is_multi_conf():
    s = ComponentScores(0, 1, 0.5)
    assert base3_score(s) == base3_score(s, "multi_conf")


def test_invalid_inputs():
    with pytest.raises(ValueError):
        InterpolationWeights(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        InterpolationWeights(1.2, -0.2, 0.0)
    with pytest.raises(ValueError):
        ComponentScores(2, 0, 0.1)
    with pytest.raises(ValueError):
        ComponentScores(0, 0, 1.5)
    with pytest.raises(ValueError):
        weights_for("nope", 0, 0)


def test_parse_weights():
    assert parse_weights("1,0,0").as_tuple() == (1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        parse_weights("1,0")


@given(scheme=schemes, eb=flags, pt=flags)
def test_every_table_row_is_convex(scheme, eb, pt):
    w = weights_for(scheme, eb, pt)
    assert min(w.as_tuple()) >= 0
    assert abs(sum(w.as_tuple()) - 1.0) <= 1e-9
    assert weights_for(scheme, eb, pt) == w


@given(scheme=schemes, eb=flags, pt=flags, cm=unit)
def test_score_in_unit_interval(scheme, eb, pt, cm):
    assert 0.0 <= base3_score(ComponentScores(eb, pt, cm), scheme) <= 1.0 + 1e-12


@given(scheme=schemes, eb=flags, pt=flags, c1=unit, c2=unit)
def test_monotone_in_cm(scheme, eb, pt, c1, c2):
    lo, hi = sorted((c1, c2))
    assert base3_score(ComponentScores(eb, pt, lo), scheme) <= base3_score(ComponentScores(eb, pt, hi), scheme)


@given(eb=flags, pt=flags, cm=unit, scheme=schemes)
def test_degenerate_overrides(eb, pt, cm, scheme):
    s = ComponentScores(eb, pt, cm)
    assert base3_score(s, scheme, InterpolationWeights(1, 0, 0)) == eb
    assert base3_score(s, scheme, InterpolationWeights(0, 1, 0)) == pt
    assert base3_score(s, scheme, InterpolationWeights(0, 0, 1)) == cm


@given(
    scheme=schemes,
    rows=st.lists(st.tuples(flags, flags, unit), min_size=1, max_size=30),
)
def test_interpolate_matches_scalar(scheme, rows):
    eb, pt, cm = (np.array(c) for c in zip(*rows))
    got = interpolate(eb, pt, cm.astype(float), scheme)
    want = [base3_score(ComponentScores(*r), scheme) for r in rows]
    assert got.tolist() == pytest.approx(want, abs=1e-15)
