"""
Tools module: one tool per CLI subcommand.

Available Tools:
- sample_field_tool: draw and export one coefficient field
- bands_tool: Floquet band functions of a periodized realization
- ids_tool: finite-volume or Floquet IDS curves
- homogenized_tool: IDS of the mean or harmonic-mean field
- sandwich_tool: two-sided comparison with the homogenized IDS
- approx_check_tool: periodic-approximant bracket of IDS increments
- deviation_tool: deviation-event frequencies and tail fits
- ld_rate_tool: empirical-mean tail probabilities
- selftest_tool: exact in-process checks
"""

from .base_tool import BaseTool
from .sample_field_tool import SampleFieldTool
from .bands_tool import BandsTool
from .ids_tool import IdsTool
from .homogenized_tool import HomogenizedTool
from .sandwich_tool import SandwichTool
from .approx_check_tool import ApproxCheckTool
from .deviation_tool import DeviationTool
from .ld_rate_tool import LdRateTool
from .selftest_tool import SelftestTool

__all__ = [
    "BaseTool",
    "SampleFieldTool",
    "BandsTool",
    "IdsTool",
    "HomogenizedTool",
    "SandwichTool",
    "ApproxCheckTool",
    "DeviationTool",
    "LdRateTool",
    "SelftestTool",
]
