"""
Deviation Tool - Monte Carlo frequency of the deviation event.

Runs every (alpha, n, E) combination from --alpha, --ns (or --n) and --E
(default 0.1). With two or more energies a tail fit
log(-log p) = tau log(1/E) + b is reported per (alpha, n).
"""

from typing import List

import numpy as np

from idslab.io.export import write_report
from idslab.lab.deviation import deviation_event_probability
from idslab.lab.large_deviations import fit_tail
from idslab.schemas.reports import DeviationEstimate
from idslab.schemas.run import RunConfig, ToolResult
from idslab.tools.base_tool import BaseTool


class DeviationTool(BaseTool):
    """Tool for the deviation-event estimator and its tail fit."""

    name = "deviation"

    def execute(self, run: RunConfig) -> ToolResult:
        spec = self.load_spec(run)
        ns = run.ns or [run.n]
        energies = run.energies or [run.energy]

        estimates: List[DeviationEstimate] = []
        fits = []
        trends = []
        for alpha in run.alphas:
            for n in ns:
                batch = [
                    deviation_event_probability(
                        spec, n, energy, alpha, run.trials, seed=run.seed, cutoff=run.cutoff,
                        kinetic_bound=run.kinetic_bound, workers=run.workers, config=self.config,
                    )
                    for energy in energies
                ]
                estimates.extend(batch)
                if len(batch) >= 2:
                    fit = fit_tail(batch)
                    fits.append({"alpha": alpha, "n": n, **fit.model_dump(mode="json")})
            if len(ns) >= 2:
                for energy in energies:
                    p = [e.p_hat for e in estimates if e.alpha == alpha and e.energy == energy]
                    trends.append(
                        {"alpha": alpha, "energy": energy, "non_increasing_in_n": bool(np.all(np.diff(p) <= 0.0))}
                    )
                    if not trends[-1]["non_increasing_in_n"]:
                        self.logger.warning("p_hat at alpha=%g E=%g is not non-increasing in n: %s", alpha, energy, p)

        rows = [e.model_dump(exclude={"diagnostic"}) for e in estimates]
        paths = write_report(
            "deviation", estimates, self.output_dir(run), spec.dimension, max(ns), run.seed,
            self.resolved(run, spec), rows=rows, extra={"tail_fits": fits, "n_trend": trends},
        )
        hits = sum(e.hits for e in estimates)
        line = f"{len(estimates)} estimates, {hits} hits in {sum(e.trials for e in estimates)} trials"
        if fits:
            line += "; tail fits: " + ", ".join(f"n={f['n']} {f['status']}" for f in fits)
        return self.success(line, paths, [f"{p.name}: {line}" for p in paths], data={"p_hat": [e.p_hat for e in estimates]})
