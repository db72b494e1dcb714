"""
LD Rate Tool - exact or bounded tail of the empirical site mean.

The law comes from --law, else from the config file's [disorder] table.
"""

import math

from idslab.io.export import write_report
from idslab.io.spec_file import parse_law
from idslab.schemas.run import RunConfig, ToolResult
from idslab.lab.large_deviations import ld_rate
from idslab.tools.base_tool import BaseTool


class LdRateTool(BaseTool):
    name = "ld-rate"

    def execute(self, run: RunConfig) -> ToolResult:
        if run.law:
            law = parse_law(run.law)
            resolved = self.resolved(run)
            resolved["law"] = law.model_dump(mode="json")
            dimension = run.dimension or 1
        else:
            spec = self.load_spec(run)
            law = spec.disorder
            resolved = self.resolved(run, spec)
            dimension = spec.dimension
        rate = ld_rate(law, run.threshold, run.cells)

        kind = f"ld-rate-m{run.cells}"
        paths = write_report(kind, rate, self.output_dir(run), dimension, 0, run.seed, resolved)
        label = "exact" if rate.exact else "bound"
        rate_text = "inf" if math.isinf(rate.rate) else f"{rate.rate:.6g}"
        line = (
            f"{law} m={run.cells} t={run.threshold:g}: P={rate.probability:.6g} ({label}) "
            f"hoeffding={rate.hoeffding_bound:.6g} chernoff={rate.chernoff_bound:.6g} rate={rate_text}"
        )
        return self.success(line, paths, [f"{p.name}: {line}" for p in paths], data=rate.model_dump())
