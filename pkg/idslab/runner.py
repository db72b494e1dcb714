"""
Lab runner: dispatches a validated RunConfig to the tool for its subcommand.

Library errors become error results carrying the exit code of their class;
anything else propagates.
"""

from typing import Dict, Optional

from pydantic import ValidationError

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import IdsLabError
from idslab.core.logging import get_logger
from idslab.schemas.run import RunConfig, Subcommand, ToolResult
from idslab.tools import (
    ApproxCheckTool,
    BandsTool,
    BaseTool,
    DeviationTool,
    HomogenizedTool,
    IdsTool,
    LdRateTool,
    SampleFieldTool,
    SandwichTool,
    SelftestTool,
)

logger = get_logger("runner")


class LabRunner:
    """Maps each subcommand to its tool and runs it."""

    def __init__(self, config: Optional[Settings] = None):
        self.config = config or default_settings
        self.tools: Dict[Subcommand, BaseTool] = {
            Subcommand.SAMPLE_FIELD: SampleFieldTool(self.config),
            Subcommand.BANDS: BandsTool(self.config),
            Subcommand.IDS: IdsTool(self.config),
            Subcommand.HOMOGENIZED: HomogenizedTool(self.config),
            Subcommand.SANDWICH: SandwichTool(self.config),
            Subcommand.APPROX_CHECK: ApproxCheckTool(self.config),
            Subcommand.DEVIATION: DeviationTool(self.config),
            Subcommand.LD_RATE: LdRateTool(self.config),
            Subcommand.SELFTEST: SelftestTool(self.config),
        }

    def run(self, run: RunConfig) -> ToolResult:
        logger.info("Processing: subcommand=%s seed=%d", run.subcommand.value, run.seed)
        tool = self.tools.get(run.subcommand)
        if tool is None:
            return ToolResult(
                status="error",
                tool=str(run.subcommand),
                message=f"Unknown subcommand: {run.subcommand}",
                data={"available": [s.value for s in self.tools]},
                exit_code=2,
            )
        try:
            return tool.execute(run)
        except IdsLabError as exc:
            logger.error("%s failed: %s", tool.name, exc)
            return ToolResult(status="error", tool=tool.name, message=str(exc), exit_code=exc.exit_code)
        except ValidationError as exc:
            logger.error("%s rejected its input: %s", tool.name, exc)
            return ToolResult(status="error", tool=tool.name, message=str(exc), exit_code=2)
