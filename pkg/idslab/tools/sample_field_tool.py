"""
Sample Field Tool - draw one realization of the coefficient field.

Writes the field as CSV (coordinates and value per sample point), as a
binary dump, and the site variables omega with the resolved config as JSON.
With a wrapping --bc the periodized field is written instead.
"""

from idslab.io.export import result_name, write_field_binary, write_field_csv, write_report
from idslab.lab.coeff_field import periodize, sample_field
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class SampleFieldTool(BaseTool):
    """Tool for drawing and exporting one coefficient field."""

    name = "sample-field"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        out = self.output_dir(run)
        realization, field = sample_field(spec, run.n, run.seed, run.sample_index, self.config)
        if self.boundary(run).wraps:
            field = periodize(realization, spec)

        kind = f"field-i{run.sample_index}"
        csv_path = write_field_csv(field, out / result_name(kind, spec.dimension, run.n, run.seed, "csv"))
        bin_path = write_field_binary(field, out / result_name(kind, spec.dimension, run.n, run.seed, "bin"))
        (json_path,) = write_report(kind, realization, out, spec.dimension, run.n, run.seed, self.resolved(run, spec))

        values = field.values
        stats = f"{field.kind.value} field min={values.min():.6g} max={values.max():.6g} mean={values.mean():.6g}"
        summary = [
            f"{csv_path.name}: {values.size} points, {stats}",
            f"{bin_path.name}: {values.size} float64 values",
            f"{json_path.name}: {realization.omega.size} site variables, mean omega={realization.omega.mean():.6g}",
        ]
        return self.success(
            f"Sampled a {spec.dimension}d field on {field.extent_cells} cells per axis",
            [csv_path, bin_path, json_path],
            summary,
            data={"mean": float(values.mean())},
        )
