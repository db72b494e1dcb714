"""Selftest Tool - run the exact in-process checks and report each one."""

from idslab.schemas.run import RunConfig, ToolResult
from idslab.selftest import run_selftest
from idslab.tools.base_tool import BaseTool


class SelftestTool(BaseTool):
    name = "selftest"

    def execute(self, run: RunConfig) -> ToolResult:
        results = run_selftest(self.config)
        summary = [f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "") for name, ok, detail in results]
        failed = sum(not ok for _, ok, _ in results)
        if failed:
            return ToolResult(
                status="error",
                tool=self.name,
                message=f"{failed} of {len(results)} checks failed",
                summary=summary,
                exit_code=1,
            )
        return self.success(f"all {len(results)} checks passed", [], summary)
