import math

import pytest
from pydantic import ValidationError

from idslab.core.errors import ConfigError, RangeError
from idslab.lab.sandwich import build_sandwich_report, sandwich_check, sandwich_scan, window_energies
from idslab.schemas.field import BernoulliLaw
from idslab.schemas.ids import IdsCurve, IdsMetadata
from idslab.schemas.reports import SandwichParams

from conftest import make_spec


def _curve(energies, values, method: str = "finite-volume") -> IdsCurve:
    metadata = IdsMetadata(method=method, bc="dirichlet", dimension=1, mesh=4, extent_cells=5)
    return IdsCurve(energies=energies, values=values, stderr=[0.0] * len(values), metadata=metadata)


def test_window_energies() -> None:
    points = window_energies([0.25, 4.0], [0.5])
    assert points == pytest.approx([0.75, 2.0, 6.0])
    # E - E^alpha <= 0 below E = 1 is dropped
    assert all(p > 0.0 for p in window_energies([0.01, 0.1], [0.5, 0.9]))


def test_fitted_constant_covers_the_gap() -> None:
    ids_curve = _curve([0.25], [0.3])
    homogenized = _curve([0.5, 1.0], [0.1, 0.2], method="homogenized")
    decay = math.exp(-2.0)

    fitted = build_sandwich_report(ids_curve, homogenized, SandwichParams(alpha=1.0, energies=[0.25], tau=0.5))
    assert fitted.C_required == pytest.approx(0.2 / decay)
    assert fitted.C == fitted.C_required
    row = fitted.rows[0]
    assert row.nbar_lower == 0.0
    assert row.nbar_upper == pytest.approx(0.1)
    assert row.trend_gap == pytest.approx(0.2)

    strict = build_sandwich_report(ids_curve, homogenized, SandwichParams(alpha=1.0, energies=[0.25], tau=0.5, C=1.0))
    assert not strict.rows[0].upper_pass
    assert not strict.all_pass
    assert strict.rows[0].remainder == pytest.approx(decay)

    loose = build_sandwich_report(ids_curve, homogenized, SandwichParams(alpha=1.0, energies=[0.25], tau=0.5, C=2.0))
    assert loose.all_pass
    assert loose.rows[0].upper_margin == pytest.approx(0.1 + 2.0 * decay - 0.3)


def test_unreachable_gap_reports_infinite_constant() -> None:
    ids_curve = _curve([1e-6], [0.5])
    homogenized = _curve([2e-6], [0.0], method="homogenized")
    report = build_sandwich_report(ids_curve, homogenized, SandwichParams(alpha=1.0, energies=[1e-6]))
    assert math.isinf(report.C_required)
    assert report.C == 1.0
    assert not report.all_pass


def test_report_needs_every_energy_on_the_curve() -> None:
    ids_curve = _curve([0.1, 0.2], [0.1, 0.2])
    homogenized = _curve([0.5, 1.0], [0.2, 0.3], method="homogenized")
    with pytest.raises(RangeError):
        build_sandwich_report(ids_curve, homogenized, SandwichParams(alpha=0.5, energies=[0.15]))


def test_params_validation() -> None:
    with pytest.raises(ConfigError):
        SandwichParams(alpha=0.5, energies=[])
    with pytest.raises(ConfigError):
        SandwichParams(alpha=0.5, energies=[0.2, 0.1])
    with pytest.raises(ValidationError):
        SandwichParams(alpha=0.0, energies=[0.1])
    with pytest.raises(ValidationError):
        SandwichParams(alpha=0.5, energies=[0.1], C=0.5)


def test_constant_field_is_sandwiched(free_spec, settings) -> None:
    reports = sandwich_scan(
        free_spec, [0.5, 0.8], [0.05, 0.1, 0.2], n=10, samples=2,
        theta_nodes=8, supercell=9, workers=1, config=settings,
    )
    assert [r.alpha for r in reports] == [0.5, 0.8]
    for report in reports:
        assert report.all_pass
        assert report.C_required == 1.0
        assert report.homogenized == "arithmetic"
        for row in report.rows:
            assert row.stderr == 0.0
            assert row.nbar_lower == 0.0
            assert row.n <= row.nbar_upper


def test_scan_reuses_a_precomputed_curve(free_spec, settings) -> None:
    given = _curve([0.05, 0.1], [0.0, 0.0])
    report = sandwich_scan(
        free_spec, [0.7], [0.05, 0.1], n=10, samples=1, theta_nodes=8, supercell=5,
        harmonic=True, workers=1, config=settings, ids_curve=given,
    )[0]
    assert [row.n for row in report.rows] == [0.0, 0.0]
    assert report.homogenized == "harmonic"


def test_sandwich_check_single_alpha(free_spec, settings) -> None:
    report = sandwich_check(
        free_spec, SandwichParams(alpha=0.6, energies=[0.1]), n=5, samples=1,
        theta_nodes=8, supercell=5, workers=1, config=settings,
    )
    assert report.alpha == 0.6
    assert report.tau == 0.5
    assert len(report.rows) == 1


def test_bernoulli_field_is_sandwiched_with_a_fitted_constant(half_bernoulli_spec, settings) -> None:
    energies = [0.02, 0.05, 0.1, 0.2]
    report = sandwich_scan(
        half_bernoulli_spec, [0.7], energies, n=20, samples=6, seed=1,
        theta_nodes=8, supercell=9, workers=1, config=settings,
    )[0]
    assert [row.energy for row in report.rows] == energies
    assert math.isfinite(report.C_required)
    assert report.C == report.C_required
    assert report.all_pass
    for row in report.rows:
        assert row.lower_margin >= -3.0 * row.stderr
        assert row.upper_margin >= -3.0 * row.stderr


def test_degenerate_disorder_needs_no_constant(settings) -> None:
    spec = make_spec(plus=1.0, bump=1.0, law=BernoulliLaw(p=0.5, v0=0.5, v1=0.5))
    report = sandwich_scan(
        spec, [0.7], [0.05, 0.1, 0.2], n=20, samples=3, C=1.0,
        theta_nodes=8, supercell=9, workers=1, config=settings,
    )[0]
    assert report.C == 1.0
    assert report.C_required == 1.0
    assert report.all_pass
    for row in report.rows:
        assert row.stderr == 0.0
        assert row.lower_margin >= 0.0
        assert row.upper_margin >= 0.0
