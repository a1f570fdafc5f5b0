import pytest

from superexpander.errors import HypothesisViolation
from superexpander.verify import SUITES, VerifySuiteConfig, run_verify, summary_table

FAST = [s for s in SUITES if s != "products-oracle"]


@pytest.mark.parametrize("suite", FAST)
def test_suites_pass(suite):
    report = run_verify(VerifySuiteConfig(suite, count=3, seed=11))
    assert report["passed"], report["failures"][:3]
    assert report["comparisons"] > 0


@pytest.mark.slow
def test_oracle_suite_passes():
    assert run_verify(VerifySuiteConfig("products-oracle", count=2, seed=3))["passed"]


# the decay bound carries a constant near 2e6, so shrinking it by 1e-3 still holds
@pytest.mark.parametrize("suite", ["cotype", "products-euclid", "prelim-lemmas"])
def test_corrupted_run_fails(suite):
    report = run_verify(VerifySuiteConfig(suite, count=2, corrupt=True))
    assert not report["passed"]
    assert "reproduce: --suite" in summary_table(report)


def test_suite_is_deterministic():
    cfg = VerifySuiteConfig("calculus", count=3, seed=4)
    assert run_verify(cfg) == run_verify(cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        VerifySuiteConfig("nope")
    with pytest.raises(ValueError):
        VerifySuiteConfig("cotype", count=0)
    with pytest.raises(ValueError):
        VerifySuiteConfig("cotype", tolerance=0)
    with pytest.raises((ValueError, HypothesisViolation)):
        VerifySuiteConfig("cotype", K_p=0.5)
