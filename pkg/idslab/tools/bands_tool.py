"""
Bands Tool - Floquet band functions of one periodized realization.

Takes sample `sample_index` on the box of radius n, periodizes it and
computes the lowest bands on the midpoint theta grid.
"""

from idslab.io.export import write_report
from idslab.lab.coeff_field import periodize, sample_field
from idslab.lab.ids import band_structure
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class BandsTool(BaseTool):
    """Tool for band-structure tables."""

    name = "bands"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        realization, _ = sample_field(spec, run.n, run.seed, run.sample_index, self.config)
        field = periodize(realization, spec)
        nodes = run.theta_nodes or self.config.THETA_START
        structure = band_structure(field, nodes, run.bands, run.workers, config=self.config)

        rows = []
        for theta, energies in zip(structure.thetas, structure.bands):
            row = {f"theta{axis}": value for axis, value in enumerate(theta)}
            row.update({f"E{k}": value for k, value in enumerate(energies)})
            rows.append(row)
        paths = write_report(
            "bands", structure, self.output_dir(run), spec.dimension, run.n, run.seed,
            self.resolved(run, spec), rows=rows,
        )
        lipschitz = "n/a" if structure.lipschitz is None else f"{structure.lipschitz:.6g}"
        line = f"{len(structure.bands[0])} bands at {len(structure.thetas)} theta nodes, Lipschitz {lipschitz}"
        return self.success(
            f"Computed {line}",
            paths,
            [f"{p.name}: {line}" for p in paths],
            data={"lipschitz": structure.lipschitz},
        )
