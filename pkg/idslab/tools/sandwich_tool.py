"""
Sandwich Tool - two-sided comparison of N with the homogenized IDS.

One finite-volume N curve is shared by every alpha. With --harmonic the
harmonic-mean comparison is reported next to the arithmetic one.
"""

from typing import Any, Dict, List

from idslab.io.export import write_curve, write_report
from idslab.lab.ids import finite_volume_ids
from idslab.lab.sandwich import sandwich_scan
from idslab.schemas.reports import SandwichReport
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


def _rows(reports: List[SandwichReport]) -> List[Dict[str, Any]]:
    rows = []
    for report in reports:
        for row in report.rows:
            rows.append(
                {
                    "homogenized": report.homogenized,
                    "alpha": report.alpha,
                    "E": row.energy,
                    "N": row.n,
                    "stderr": row.stderr,
                    "nbar_lower": row.nbar_lower,
                    "nbar_upper": row.nbar_upper,
                    "remainder": row.remainder,
                    "lower_margin": row.lower_margin,
                    "upper_margin": row.upper_margin,
                    "trend_gap": row.trend_gap,
                    "lower_pass": row.lower_pass,
                    "upper_pass": row.upper_pass,
                }
            )
    return rows


class SandwichTool(BaseTool):
    """Tool for the sandwich experiment."""

    name = "sandwich"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        energies = self.energies(run)
        bc = self.boundary(run)
        out = self.output_dir(run)
        resolved = self.resolved(run, spec)

        curve = finite_volume_ids(spec, run.n, bc, energies, run.samples, run.seed, run.workers, config=self.config)
        common = dict(
            spec=spec, alphas=run.alphas, energies=energies, n=run.n, samples=run.samples, seed=run.seed,
            bc=bc, theta_nodes=run.theta_nodes, workers=run.workers, config=self.config, ids_curve=curve,
        )
        reports = sandwich_scan(**common)
        if run.harmonic:
            reports += sandwich_scan(harmonic=True, **common)

        curve_paths = write_curve(curve, out, resolved)
        report_paths = write_report(
            "sandwich", reports, out, spec.dimension, run.n, run.seed, resolved, rows=_rows(reports)
        )
        verdicts = "; ".join(
            f"{r.homogenized} alpha={r.alpha:g}: C_required={r.C_required:.4g} all_pass={r.all_pass}"
            for r in reports
        )
        summary = [
            self.curve_summary(curve_paths[0], curve),
            f"{curve_paths[1].name}: metadata and resolved config",
        ] + [f"{p.name}: {verdicts}" for p in report_paths]
        return self.success(
            f"Sandwich check over {len(run.alphas)} alpha value(s) and {len(energies)} energies",
            list(curve_paths) + report_paths,
            summary,
            data={"all_pass": [r.all_pass for r in reports]},
        )
