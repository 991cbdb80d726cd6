import json

import pytest
from hypothesis import given, settings, strategies as st

from transdiag.diagonal import DiagonalStream
from transdiag.sigma import (
    LayerAboveLevel,
    build_sigma,
    index_of,
    layer_element,
    load_checkpoint,
    save_checkpoint,
)
from transdiag.streams import AlgebraicStream


def scan(level: int, upto: int) -> dict:
    """(layer, element) -> index by walking the resolver, the brute-force reference."""
    sigma = build_sigma(level)
    found = {}
    for i in range(1, upto + 1):
        prov = sigma.provenance(i)
        found.setdefault((prov.layer, prov.element), i)
    return found


def test_merge_alternates():
    s1 = build_sigma(1)
    s0 = s1.base
    assert [s1[i] for i in (1, 2, 3, 4)] == [s0[1], s1.family[1], s0[2], s1.family[2]]
    assert isinstance(s1[2], DiagonalStream) and s1[2].offset == 0


def test_index_of_examples():
    assert index_of(1, 7, 1) == 14
    assert index_of(0, 1, 1) == 1
    assert index_of(1, 1, 3) == 2 * (2 * 2 - 1) - 1 == 5
    with pytest.raises(LayerAboveLevel):
        index_of(3, 1, 2)


def test_index_of_matches_resolver_scan():
    found = scan(3, 820)
    for layer in range(4):
        for element in range(1, 101):
            assert found[(layer, element)] == index_of(layer, element, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.integers(1, 10 ** 6), st.integers(0, 5))
def test_index_of_inverts_provenance(layer, element, extra):
    level = layer + extra
    i = index_of(layer, element, level)
    prov = build_sigma(level).provenance(i)
    assert (prov.layer, prov.element) == (layer, element)


def test_provenance_json():
    s2 = build_sigma(2)
    assert s2.provenance(1).to_json() == {"layer": 0, "generator": {"algebraic_index": 0}}
    assert s2.provenance(2).to_json() == {"layer": 2, "generator": {"offset": 0, "level": 1}}
    assert s2.provenance(3).to_json() == {"layer": 1, "generator": {"offset": 0, "level": 0}}


def test_layer_elements_match_sigma():
    s3 = build_sigma(3)
    for layer in range(4):
        for element in (1, 2, 9, 30):
            direct = layer_element(layer, element)
            assert s3[index_of(layer, element, 3)].prefix(64) == direct.prefix(64)
    assert isinstance(layer_element(0, 1), AlgebraicStream)


def test_fresh_layers_differ_from_previous_level():
    for depth in (1, 2, 3):
        sigma = build_sigma(depth)
        base = sigma.base
        for k in (1, 2, 5):
            d = sigma.family[k]
            for v in range(1, 201):
                assert d.digit_at(v) != base[v].digit_at(v + k - 1)


def test_consistent_across_builds():
    a, b = build_sigma(2), build_sigma(2)
    assert [a[i].prefix(64) for i in range(1, 20)] == [b[i].prefix(64) for i in range(1, 20)]


def test_checkpoint_round_trip(tmp_path):
    path = str(tmp_path / "ck.json")
    assert load_checkpoint(path, 2, (0, 1)) == {}
    sigma = build_sigma(2)
    ledger = {i: sigma[i].prefix(40) for i in (1, 2, 5)}
    save_checkpoint(path, 2, (0, 1), ledger)
    assert load_checkpoint(path, 2, (0, 1)) == ledger
    with pytest.raises(ValueError):
        load_checkpoint(path, 3, (0, 1))
    fresh = build_sigma(2)
    fresh.seed(ledger)
    assert fresh[5].computed >= 40
    assert fresh[5].prefix(80) == sigma[5].prefix(80)


def test_checkpoint_rejects_corruption(tmp_path):
    path = tmp_path / "ck.json"
    save_checkpoint(str(path), 1, (0, 1), {1: "0101"})
    data = json.loads(path.read_text())
    data["digits"]["1"] = "01x1"
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        load_checkpoint(str(path), 1, (0, 1))
    sigma = build_sigma(1)
    assert sigma[1].prefix(8) == "10000000"
    with pytest.raises(ValueError):
        sigma.seed({1: "0"})
