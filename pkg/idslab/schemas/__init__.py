"""Pydantic schemas for lab inputs, intermediate objects and reports."""

from .field import (
    BernoulliLaw,
    UniformLaw,
    DisorderLaw,
    CoefficientSpec,
    Realization,
    FieldKind,
    FieldOnGrid,
    is_degenerate,
    support_radius,
)
from .operator import (
    BCType,
    BoundaryCondition,
    StiffnessMatrix,
    SpectrumSlice,
    InertiaCount,
)
from .ids import (
    IdsMetadata,
    IdsCurve,
    TestFunction,
    SmoothedDos,
    BandStructure,
)
from .reports import (
    SandwichParams,
    SandwichRow,
    SandwichReport,
    ApproximationReport,
    DeviationEstimate,
    LdRate,
    TailFit,
)
from .run import Subcommand, RunConfig, ToolResult

__all__ = [
    "BernoulliLaw",
    "UniformLaw",
    "DisorderLaw",
    "CoefficientSpec",
    "Realization",
    "FieldKind",
    "FieldOnGrid",
    "is_degenerate",
    "support_radius",
    "BCType",
    "BoundaryCondition",
    "StiffnessMatrix",
    "SpectrumSlice",
    "InertiaCount",
    "IdsMetadata",
    "IdsCurve",
    "TestFunction",
    "SmoothedDos",
    "BandStructure",
    "SandwichParams",
    "SandwichRow",
    "SandwichReport",
    "ApproximationReport",
    "DeviationEstimate",
    "LdRate",
    "TailFit",
    "Subcommand",
    "RunConfig",
    "ToolResult",
]
