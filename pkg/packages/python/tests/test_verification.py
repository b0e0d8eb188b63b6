import pytest
from entanglement_atlas import verification
from entanglement_atlas.errors import InvalidArgument
from entanglement_atlas.verification import CheckResult, VerificationReport, run_verification, selected_checks


def test_selected_checks():
    fast = selected_checks("n3")
    everything = selected_checks("n3", slow=True)
    assert ("n3", "M-sets") in fast
    assert ("n3", "M-set (3,3,3)") not in fast
    assert ("n3", "M-set (3,3,3)") in everything
    assert {suite for suite, _ in selected_checks()} == set(verification.SUITES)


def test_unknown_suite():
    with pytest.raises(InvalidArgument):
        run_verification("n5")


def test_structural_suite(small_settings):
    report = run_verification("structural", small_settings)
    assert report.passed
    assert [result.name for result in report.results] == ["structural identities"]
    assert report.results[0].detail == "6 states over 3 shapes"


def test_failures_are_reported(monkeypatch, small_settings):
    def broken(settings):
        return False, "bad"

    def raising(settings):
        raise InvalidArgument("boom")

    monkeypatch.setattr(verification, "_CHECKS", [
        verification._Check("n3", "broken", broken),
        verification._Check("n3", "raising", raising),
        verification._Check("n4", "skipped", broken),
    ])
    report = run_verification("n3", small_settings)
    assert not report.passed
    assert [result.detail for result in report.failures] == ["bad", "InvalidArgument: boom"]


def test_render_text():
    report = VerificationReport("n3", (
        CheckResult("n3", "first", True, "ok"),
        CheckResult("n3", "second", False, "bad"),
    ))
    assert report.render_text() == (
        "verification suite: n3\n"
        "PASS  [n3] first: ok\n"
        "FAIL  [n3] second: bad\n"
        "1/2 checks passed\n"
    )


def test_json_report():
    report = VerificationReport("all", (CheckResult("n4", "orbits", True, "27 orbits"),))
    assert report.to_json_dict() == {
        "suite": "all",
        "passed": True,
        "checks": [{"suite": "n4", "name": "orbits", "passed": True, "detail": "27 orbits"}],
    }


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["n3", "n4"])
def test_table_suites(suite, small_settings):
    report = run_verification(suite, small_settings)
    assert report.passed, report.render_text()


def test_classical_suite(small_settings):
    report = run_verification("classical", small_settings)
    assert report.passed, report.render_text()
    details = {result.name: result.detail for result in report.results}
    assert details["collision groups (2,2,2,2)"] == "18 patterns, 18 tabulated"
