"""Homogenized Tool - Floquet IDS of the mean (or harmonic-mean) field."""

from idslab.io.export import write_curve
from idslab.lab.ids import homogenized_ids
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class HomogenizedTool(BaseTool):
    name = "homogenized"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        energies = self.energies(run)
        curve = homogenized_ids(
            spec,
            energies,
            run.theta_nodes,
            harmonic=run.harmonic,
            supercell=self.config.HOMOGENIZED_SUPERCELL,
            workers=run.workers,
            config=self.config,
        )
        curve = curve.model_copy(update={"metadata": curve.metadata.model_copy(update={"seed": run.seed})})
        paths = write_curve(curve, self.output_dir(run), self.resolved(run, spec))
        return self.success(
            f"Computed {curve.metadata.method} IDS with {curve.metadata.theta_nodes} theta nodes per axis",
            paths,
            [self.curve_summary(paths[0], curve), f"{paths[1].name}: metadata and resolved config"],
            data={"energies": curve.energies, "values": curve.values},
        )
