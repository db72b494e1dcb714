"""
IDS Tool - integrated density of states of the random operator.

--method finite-volume: Monte Carlo over `samples` boxes of radius n with --bc.
--method floquet: theta-averaged IDS of one periodized realization.
"""

from idslab.io.export import write_curve
from idslab.lab.coeff_field import periodize, sample_field
from idslab.lab.ids import finite_volume_ids, floquet_ids
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class IdsTool(BaseTool):
    """Tool for N(E) curves."""

    name = "ids"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        energies = self.energies(run)
        if run.method == "floquet":
            realization, _ = sample_field(spec, run.n, run.seed, run.sample_index, self.config)
            curve = floquet_ids(
                periodize(realization, spec), energies, run.theta_nodes, run.workers, config=self.config
            )
        else:
            curve = finite_volume_ids(
                spec, run.n, self.boundary(run), energies, run.samples, run.seed, run.workers, config=self.config
            )
        if curve.metadata.failed_samples:
            self.logger.warning("%d samples failed: %s", len(curve.metadata.failed_samples), curve.metadata.failed_samples)

        paths = write_curve(curve, self.output_dir(run), self.resolved(run, spec))
        return self.success(
            f"Computed {curve.metadata.method} IDS at {len(energies)} energies",
            paths,
            [self.curve_summary(paths[0], curve), f"{paths[1].name}: metadata and resolved config"],
            data={"energies": curve.energies, "values": curve.values},
        )
