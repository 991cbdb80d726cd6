import copy
import json
import random
from fractions import Fraction as F

import pytest

from tamper import mutate
from transdiag.algebraic import AlgebraicReal, isolate_roots
from transdiag.diagonal import FunctionSequence, ListSequence, diagonalize
from transdiag.polynomial import IntPolynomial
from transdiag.segments import hunt_target
from transdiag.sigma import build_sigma
from transdiag.streams import AlgebraicStream, ConstantStream, OracleStream, PeriodicStream
from transdiag.verifier import (
    canonical_json,
    certify_chain,
    certify_diagonal,
    certify_nonalgebraic,
    certify_real_difference,
    check_certificate,
    digest,
    load_certificates,
    scan_collisions,
    write_certificates,
)


def sqrt2_minus_1():
    p = IntPolynomial((-1, 2, 1))
    (iso,) = isolate_roots(p, (F(0), F(1)))
    return AlgebraicStream(AlgebraicReal(p, iso))


def resealed(cert: dict) -> dict:
    """Recompute the digest so that only the semantic checks can object."""
    cert = copy.deepcopy(cert)
    cert["digest"] = digest(cert)
    return cert


@pytest.fixture(scope="module")
def certificates():
    sigma0 = build_sigma(0)
    d = diagonalize(sigma0)
    report = hunt_target(OracleStream("liouville"), 16)
    return {
        "digit": certify_diagonal(d, sigma0, 0, 30).to_json(),
        "real": certify_real_difference(d, sigma0[3]).to_json(),
        "nonalg": certify_nonalgebraic(d, 4, 3, 64).to_json(),
        "nonalg_fail": certify_nonalgebraic(ConstantStream(F(1, 2)), 3, 1, 16).to_json(),
        "chain": certify_chain(report, OracleStream("liouville")).to_json(),
        "scan": scan_collisions(sigma0, 12).to_json(),
    }


def test_all_generated_certificates_validate(certificates):
    for name, cert in certificates.items():
        assert check_certificate(cert) == [], name


def test_zero_source_witnesses():
    zeros = FunctionSequence(lambda v: ConstantStream(0), {"kind": "zeros"})
    cert = certify_diagonal(diagonalize(zeros), zeros, 0, 10)
    rows = cert.witness["rows"]
    assert [r["position"] for r in rows] == list(range(1, 11))
    assert all(r["output_bit"] == 1 and r["source_bit"] == 0 for r in rows)


def test_canonical_sigma0_hundred_rows():
    sigma0 = build_sigma(0)
    cert = certify_diagonal(diagonalize(sigma0), sigma0, 0, 100, budget=512)
    assert cert.outcome["digit_witnesses"] == 100
    assert cert.outcome["real_proved"] == 100
    assert check_certificate(cert.to_json()) == []


def test_twin_row_recorded_as_unresolved():
    src = ListSequence([ConstantStream(F(1, 2))], lambda v: ConstantStream(0))
    cert = certify_diagonal(diagonalize(src), src, 0, 4, budget=64)
    assert cert.witness["rows"][0]["real"] == {"status": "unresolved", "budget": 64}
    assert cert.outcome["real_unresolved"] == 1
    assert check_certificate(cert.to_json()) == []


def test_nonalgebraic_examples():
    half = certify_nonalgebraic(ConstantStream(F(1, 2)), 3, 1, 16)
    assert not half.succeeded and half.witness["violations"] == [[-1, 2]]
    assert certify_nonalgebraic(OracleStream("liouville"), 4, 3, 64).succeeded
    r = certify_nonalgebraic(sqrt2_minus_1(), 4, 2, 64)
    assert not r.succeeded and [-1, 2, 1] in r.witness["violations"]


def test_nonalgebraic_monotone():
    d = diagonalize(build_sigma(0))
    assert certify_nonalgebraic(d, 5, 3, 96).succeeded
    for h, deg, p in [(5, 3, 96), (3, 3, 96), (5, 2, 96), (5, 3, 128), (2, 1, 200)]:
        assert certify_nonalgebraic(d, h, deg, p).succeeded


def test_collision_scans():
    sigma0 = build_sigma(0)
    c = scan_collisions(sigma0, 50)
    assert c.outcome == {"status": "valid", "proved": 1225, "unresolved": 0}
    c1 = scan_collisions(build_sigma(1), 50)
    assert c1.outcome["proved"] + c1.outcome["unresolved"] == 1225
    assert check_certificate(c1.to_json()) == []
    dup = ListSequence([ConstantStream(F(1, 2)), PeriodicStream("0", "1"), ConstantStream(F(1, 3))],
                       lambda v: ConstantStream(0))
    for budget in (16, 256):
        c = scan_collisions(dup, 3, budget)
        assert c.witness["unresolved"] == [[1, 2]]


def test_digest_is_canonical(certificates):
    cert = certificates["real"]
    reordered = json.loads(json.dumps(cert, sort_keys=False))
    assert digest(reordered) == cert["digest"]
    assert canonical_json({"b": 1, "a": [2]}) == '{"a":[2],"b":1}'


def test_random_single_field_mutations_fail(certificates):
    rng = random.Random(7)
    names = sorted(certificates)
    for trial in range(120):
        cert = certificates[names[trial % len(names)]]
        bad, path = mutate(cert, rng)
        assert check_certificate(bad) != [], path


def test_semantic_tampering_caught_after_resealing(certificates):
    digit = copy.deepcopy(certificates["digit"])
    digit["witness"]["rows"][4]["output_bit"] ^= 1
    assert check_certificate(resealed(digit))

    digit = copy.deepcopy(certificates["digit"])
    digit["witness"]["rows"][4]["position"] += 1
    assert check_certificate(resealed(digit))

    digit = copy.deepcopy(certificates["digit"])
    row = digit["witness"]["rows"][2]
    pos = row["position"]
    row["source_prefix"] = row["source_prefix"][:pos - 1] + str(1 - row["source_bit"]) + row["source_prefix"][pos:]
    row["source_bit"] ^= 1
    assert check_certificate(resealed(digit))

    real = copy.deepcopy(certificates["real"])
    real["witness"]["right_prefix"] = real["witness"]["left_prefix"]
    assert check_certificate(resealed(real))

    fail = copy.deepcopy(certificates["nonalg_fail"])
    fail["witness"]["violations"] = [[-1, 3]]
    assert check_certificate(resealed(fail))

    ok = copy.deepcopy(certificates["nonalg"])
    ok["witness"]["splits"] = ok["witness"]["splits"][1:]
    assert check_certificate(resealed(ok)) or not certificates["nonalg"]["witness"]["splits"]

    chain = copy.deepcopy(certificates["chain"])
    links = chain["witness"]["links"]
    links[0], links[-1] = links[-1], links[0]
    assert check_certificate(resealed(chain))

    scan = copy.deepcopy(certificates["scan"])
    scan["witness"]["proved"].pop()
    scan["outcome"]["proved"] -= 1
    assert check_certificate(resealed(scan))


def test_file_round_trip(tmp_path, certificates):
    from transdiag.verifier import Certificate

    sigma0 = build_sigma(0)
    cert = certify_real_difference(sigma0[1], sigma0[2])
    path = str(tmp_path / "c.json")
    write_certificates(path, [cert])
    assert load_certificates(path) == [cert.to_json()]
    write_certificates(path, [cert, cert])
    assert len(load_certificates(path)) == 2
    assert isinstance(cert, Certificate)
