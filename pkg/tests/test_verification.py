import dataclasses

import pytest

from src.services.verification_service import RandomSampler


def _strip_timing(report):
    return [{k: v for k, v in r.items() if k != "elapsed_ms"} for r in report["reports"]]


def test_verify_is_clean_and_deterministic(service):
    first = service.verify("S3_Z", (-12, 12), 3, 4, 30)
    second = service.verify("S3_Z", (-12, 12), 3, 4, 30)
    assert first["failures"] == 0
    assert _strip_timing(first) == _strip_timing(second)


@pytest.mark.parametrize("model_id", ["Circle_Z", "RP3_Z", "SO_even_Q(1)", "SO_odd_F2(2)"])
def test_verify_catalog_models(service, model_id):
    report = service.verify(model_id, (-12, 12), 2, 0, 25)
    assert report["failures"] == 0, [r for r in report["reports"] if r["failures"]]


def test_suite_contents(service):
    checks = {r["check"] for r in service.verify("RP3_Q", (-8, 8), 2, 0, 10)["reports"]}
    assert {"oracle", "path_agreement", "reconstruction", "golden"} <= checks

    checks = {r["check"] for r in service.verify("RP3_Z", (-8, 8), 2, 0, 10)["reports"]}
    assert "oracle" not in checks
    assert "path_agreement" not in checks


def test_models_outside_the_catalog_skip_golden(service, catalog):
    copy = dataclasses.replace(catalog.get("S3_Z"))
    checks = {r["check"] for r in service.verify(copy, (-8, 8), 2, 0, 10)["reports"]}
    assert "golden" not in checks


def test_sampler_is_seeded(catalog, algebra_service):
    model = catalog.get("SO_odd_Q(2)")
    first = RandomSampler(model, algebra_service, 3, (-24, 24), seed=9).loop_triples(5)
    second = RandomSampler(model, algebra_service, 3, (-24, 24), seed=9).loop_triples(5)
    assert first == second
    assert all(e.degree_of() != "mixed" for triple in first for e in triple)
