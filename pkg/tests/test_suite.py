import json

import pytest

from orlicz_lorentz.suite import CHECKS, run_suite, runs_for

MODULES = {"stepfn", "orliczfn", "level", "modular", "duality", "pathology"}


def test_every_module_has_checks():
    assert {c.module for c in CHECKS} == MODULES
    assert len({c.name for c in CHECKS}) == len(CHECKS)


@pytest.fixture(scope="module")
def summary():
    return run_suite(2, 12)


def test_all_checks_pass(summary):
    failing = [c for c in summary["checks"] if c["failed"]]
    assert summary["all_passed"], failing


def test_summary_fields(summary):
    for row in summary["checks"]:
        assert row["passed"] + row["failed"] == row["runs"]
        assert row["worst_residual"] <= row["tolerance"]


def test_run_counts_follow_shares():
    for c in CHECKS:
        assert runs_for(c, 0) == 0
        assert runs_for(c, 100) == (1 if c.share == 0 else max(1, round(100 * c.share)))


def test_filter_by_module_or_name():
    by_module = run_suite(0, 2, ("level",))
    assert {c["module"] for c in by_module["checks"]} == {"level"}
    by_name = run_suite(0, 2, ("holder",))
    assert [c["name"] for c in by_name["checks"]] == ["holder"]


def test_deterministic():
    a = json.dumps(run_suite(4, 3, ("stepfn", "orliczfn")), sort_keys=True)
    b = json.dumps(run_suite(4, 3, ("stepfn", "orliczfn")), sort_keys=True)
    assert a == b


def test_empty():
    assert run_suite(0, 0) == {"seed": 0, "cases": 0, "checks": [], "all_passed": True}
