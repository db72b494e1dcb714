"""
Approx Check Tool - bracket N(E+eps) - N(E-eps) by periodic approximants.

The energy is the first --E value (default 0.1).
"""

from idslab.io.export import write_report
from idslab.lab.approximation import approximation_check
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class ApproxCheckTool(BaseTool):
    name = "approx-check"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        energy = run.energies[0] if run.energies else run.energy
        report = approximation_check(
            spec,
            energy,
            run.epsilon,
            run.n,
            run.samples,
            seed=run.seed,
            bc=self.boundary(run),
            theta_nodes=run.theta_nodes,
            workers=run.workers,
            config=self.config,
        )
        row = report.model_dump()
        row["holds"] = report.holds
        paths = write_report(
            "approx-check", report, self.output_dir(run), spec.dimension, run.n, run.seed,
            self.resolved(run, spec), rows=[row],
        )
        line = (
            f"E={report.energy:g} eps={report.epsilon:g}: {report.lower:.6g} <= {report.middle:.6g} <= "
            f"{report.upper:.6g} (width {report.width:.4g}) holds={report.holds}"
        )
        if not report.coupling_satisfied:
            line += " coupling n >= eps^-rho not met"
        return self.success(line, paths, [f"{p.name}: {line}" for p in paths], data={"holds": report.holds})
