import math

import pytest

from idslab.core.errors import ConfigError
from idslab.lab.approximation import approximation_check


def test_free_bracket_holds(free_spec, settings) -> None:
    report = approximation_check(
        free_spec, 0.1, 0.02, n=16, samples=2, seed=1, theta_nodes=16, workers=1, config=settings
    )
    # sqrt(E)/pi increments on [E -+ eps/2] and [E -+ 2 eps]
    assert report.lower == pytest.approx((math.sqrt(0.11) - math.sqrt(0.09)) / math.pi, abs=4e-3)
    assert report.upper == pytest.approx((math.sqrt(0.14) - math.sqrt(0.06)) / math.pi, abs=4e-3)
    # Dirichlet box of 129 cells: 11 eigenvalues below 0.08, 14 below 0.12
    assert report.middle == pytest.approx(3.0 / 129.0, rel=1e-12)
    assert report.lower <= report.middle <= report.upper
    assert report.holds
    assert report.lower_stderr == report.middle_stderr == report.upper_stderr == 0.0
    assert report.samples == 2
    assert report.remainder == pytest.approx(math.exp(-50.0))
    assert report.width == pytest.approx(report.upper - report.lower)
    assert not report.coupling_satisfied


def test_coupling_flag(free_spec, settings) -> None:
    report = approximation_check(free_spec, 1.0, 0.5, n=2, samples=1, theta_nodes=8, workers=1, config=settings)
    assert report.coupling_satisfied
    assert report.remainder == pytest.approx(math.exp(-2.0))


def test_random_bracket_reports_sample_errors(half_bernoulli_spec, settings) -> None:
    report = approximation_check(
        half_bernoulli_spec, 0.3, 0.1, n=2, samples=6, seed=5, theta_nodes=8, workers=1, config=settings
    )
    assert report.samples == 6
    assert report.upper >= report.lower
    assert min(report.lower_stderr, report.middle_stderr, report.upper_stderr) >= 0.0


def test_argument_checks(free_spec, settings) -> None:
    with pytest.raises(ConfigError):
        approximation_check(free_spec, 0.1, 0.0, n=2, samples=1, config=settings)
    with pytest.raises(ConfigError):
        approximation_check(free_spec, 0.1, 0.02, n=2, samples=0, config=settings)


def test_bracket_narrows_as_epsilon_shrinks(half_bernoulli_spec, settings) -> None:
    kwargs = dict(samples=4, seed=3, theta_nodes=16, workers=1, config=settings)
    coarse = approximation_check(half_bernoulli_spec, 0.1, 0.02, n=16, **kwargs)
    fine = approximation_check(half_bernoulli_spec, 0.1, 0.01, n=32, **kwargs)
    assert coarse.holds
    assert fine.holds
    assert 0.0 < fine.width < coarse.width
