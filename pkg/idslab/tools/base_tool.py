"""Base class for all lab tools."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Sequence

from idslab.core.config import Settings, settings as default_settings
from idslab.core.logging import get_logger
from idslab.io.spec_file import load_spec
from idslab.lab.ids import energy_grid
from idslab.schemas.field import CoefficientSpec
from idslab.schemas.ids import IdsCurve
from idslab.schemas.operator import BoundaryCondition
from idslab.schemas.run import RunConfig, ToolResult

# Keys that never change results and so stay out of the sidecars.
_UNRESOLVED = {"workers", "output_dir"}
_SETTINGS_KEYS = (
    "EIG_REL_TOL",
    "RESIDUAL_REL_TOL",
    "COUNT_RETRIES",
    "DENSE_MAX_DOF",
    "DENSE_SPECTRUM_MAX",
    "DENSE_LDL_MAX",
    "ENERGIES_PER_DECADE",
    "THETA_START",
    "THETA_CAP",
    "THETA_REL_TOL",
    "HOMOGENIZED_SUPERCELL",
    "SANDWICH_TAU",
    "APPROX_RHO",
    "APPROX_ETA",
)


class BaseTool(ABC):
    """
    One CLI subcommand. Subclasses turn a validated RunConfig into lab calls
    and result files:
    - load the coefficient spec named by the run
    - call the lab module(s)
    - write CSV/JSON results and return one summary line per file
    """

    name: ClassVar[str]

    def __init__(self, config: Optional[Settings] = None):
        self.config = config or default_settings
        self.logger = get_logger(f"tools.{self.name}")

    @abstractmethod
    def execute(self, run: RunConfig) -> ToolResult:
        """Execute the tool."""

    def load_spec(self, run: RunConfig) -> CoefficientSpec:
        spec = load_spec(run.spec_path, dimension=run.dimension, mesh=run.mesh, law=run.law)
        self.logger.info("spec %s: d=%d m=%d law=%s", run.spec_path or "free", spec.dimension, spec.mesh, spec.disorder)
        return spec

    def output_dir(self, run: RunConfig) -> Path:
        if not run.output_dir:
            self.config.ensure_directories()
            return Path(self.config.OUTPUT_DIR)
        path = Path(run.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def boundary(self, run: RunConfig) -> BoundaryCondition:
        return BoundaryCondition(tag=run.bc)

    def energies(self, run: RunConfig) -> List[float]:
        if run.energies:
            return list(run.energies)
        return energy_grid(run.e_min, run.e_max, config=self.config)

    def resolved(self, run: RunConfig, spec: Optional[CoefficientSpec] = None) -> Dict[str, Any]:
        """Everything a result depends on: run flags, the materialized spec and numerical settings."""
        payload: Dict[str, Any] = {
            "run": run.model_dump(mode="json", exclude=_UNRESOLVED),
            "settings": {key: getattr(self.config, key) for key in _SETTINGS_KEYS},
        }
        if spec is not None:
            payload["spec"] = spec.model_dump(mode="json")
        return payload

    @staticmethod
    def curve_summary(path: Path, curve: IdsCurve, limit: int = 5) -> str:
        points = list(zip(curve.energies, curve.values, curve.stderr))
        if len(points) > limit:
            points = [points[0], points[-1]]
            prefix = f"{len(curve.energies)} energies, "
        else:
            prefix = ""
        body = ", ".join(f"N({e:.6g})={v:.6g}±{s:.2g}" for e, v, s in points)
        return f"{path.name}: {prefix}{body}"

    def success(
        self,
        message: str,
        files: Sequence[Path],
        summary: Sequence[str],
        data: Optional[Dict[str, Any]] = None,
    ) -> ToolResult:
        self.logger.info(message)
        return ToolResult(
            status="success",
            tool=self.name,
            message=message,
            files=[str(f) for f in files],
            summary=list(summary),
            data=data,
        )
