import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo import descriptors as ds
from warpgeo.errors import DescriptorError, InvalidRegime

DESC_DIR = Path(__file__).resolve().parents[1] / "descriptors"
FILES = sorted(DESC_DIR.glob("*.json"))


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.name)
def test_roundtrip(path):
    d = ds.parse(path)
    text = ds.serialize(d)
    again = ds.parse(text)
    assert again.spec == d.spec
    assert ds.serialize(again) == text


@pytest.mark.parametrize("path", [p for p in FILES if p.name != "invalid_regime.json"], ids=lambda p: p.name)
def test_build(path):
    assert ds.build(ds.parse(path)) is not None


def test_invalid_regime_is_a_math_error():
    with pytest.raises(InvalidRegime):
        ds.build(ds.parse(DESC_DIR / "invalid_regime.json"))


@pytest.mark.parametrize(
    "bad",
    [
        "[1, 2]",
        "{not json",
        {"kind": "nope"},
        {"kind": "warped", "k": 1, "profile": {"type": "power", "p": 1}},
        {"kind": "warped", "k": 0, "profile": {"type": "power", "p": 1}, "fiber": {"type": "sphere", "dim": 2}},
        {"kind": "warped", "k": 1, "profile": {"type": "bogus"}, "fiber": {"type": "sphere", "dim": 2}},
        {"kind": "profile", "mode": "k", "profile": {"type": "user-table", "r": [1, 2, 3], "w": [1, 1, 1]}},
        {"kind": "profile", "mode": "k", "profile": {"type": "user-table", "r": [1, 2, 3, 4], "w": [1, -1, 1, 1]}},
        {"kind": "pair", "potential": {"type": "quadratic", "n": 3}, "metric": "h"},
        {"kind": "hessian", "potential": {"type": "polynomial", "nvars": 2, "terms": [[1, [2, 0, 1]]], "probe": [1, 1]}},
    ],
)
def test_rejects_bad_descriptors(bad):
    with pytest.raises(DescriptorError):
        ds.parse(bad if isinstance(bad, str) else json.dumps(bad))


@settings(max_examples=30, deadline=None)
@given(p=st.floats(-5, 5, allow_nan=False), coef=st.floats(0.01, 100), k=st.floats(0.01, 10), dim=st.integers(1, 4))
def test_warped_roundtrip_property(p, coef, k, dim):
    spec = {"kind": "warped", "k": k, "profile": {"type": "power", "p": p, "coef": coef}, "fiber": {"type": "flat", "dim": dim}}
    d = ds.parse(spec)
    assert ds.parse(ds.serialize(d)).spec == d.spec
    W = ds.build(d)
    assert W.k == k and W.fiber.dim == dim
