"""
Coefficient-field config files.

TOML with a [field] table, a [disorder] table and an optional [run] table of
defaults for command-line overrides:

    [field]
    dimension = 1
    mesh = 8
    rho_plus = "constant:1"
    rho_bump = "box:1,0.5"

    [disorder]
    law = "bernoulli"
    p = 0.5

    [run]
    n = 20
    samples = 200
"""

import math
import tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from idslab.core.errors import ConfigError
from idslab.schemas.field import BernoulliLaw, CoefficientSpec, DisorderLaw, UniformLaw

ProfileValue = Union[float, str, List[float], List[List[float]]]


class FieldSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimension: Optional[int] = Field(None, ge=1, le=2)
    mesh: Optional[int] = Field(None, ge=1)
    rho_plus: ProfileValue = "constant:1"
    rho_bump: ProfileValue = "zero"
    rho_lower: Optional[float] = None
    rho_upper: Optional[float] = None


class DisorderSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    law: str = "constant"
    p: Optional[float] = None
    v0: float = 0.0
    v1: float = 1.0
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None


class SpecFile(BaseModel):
    """Parsed config file, before profiles are evaluated on a grid."""
    model_config = ConfigDict(extra="forbid")

    field: FieldSection = Field(default_factory=FieldSection)
    disorder: DisorderSection = Field(default_factory=DisorderSection)
    run: Dict[str, Any] = Field(default_factory=dict)
    source: Optional[str] = None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SpecFile":
        path = Path(path)
        try:
            with path.open("rb") as handle:
                raw = tomllib.load(handle)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        try:
            return cls(source=str(path), **raw)
        except ValidationError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def _numbers(text: str, count: int, name: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",")] if text else []
    except ValueError as exc:
        raise ConfigError(f"profile '{name}' needs numeric parameters, got '{text}'") from exc
    if len(values) != count:
        raise ConfigError(f"profile '{name}' takes {count} parameter(s), got {len(values)}")
    return values


def parse_law(text: str) -> DisorderLaw:
    """bernoulli:p[:v0:v1], uniform:a:b or constant:c."""
    kind, _, rest = text.strip().partition(":")
    parts = [p for p in rest.split(":") if p] if rest else []
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"law '{text}' has a non-numeric parameter") from exc
    try:
        if kind == "bernoulli" and len(values) in (1, 3):
            return BernoulliLaw(p=values[0], **({"v0": values[1], "v1": values[2]} if len(values) == 3 else {}))
        if kind == "uniform" and len(values) == 2:
            return UniformLaw(a=values[0], b=values[1])
        if kind == "constant" and len(values) == 1:
            return BernoulliLaw(p=1.0, v0=values[0], v1=values[0])
    except ValidationError as exc:
        raise ConfigError(f"law '{text}': {exc.errors()[0]['msg']}") from exc
    raise ConfigError(f"unrecognised law '{text}'; expected bernoulli:p[:v0:v1], uniform:a:b or constant:c")


def law_from_section(section: DisorderSection) -> DisorderLaw:
    if ":" in section.law:
        return parse_law(section.law)
    if section.law == "bernoulli":
        if section.p is None:
            raise ConfigError("[disorder] bernoulli law needs p")
        return parse_law(f"bernoulli:{section.p}:{section.v0}:{section.v1}")
    if section.law == "uniform":
        if section.a is None or section.b is None:
            raise ConfigError("[disorder] uniform law needs a and b")
        return parse_law(f"uniform:{section.a}:{section.b}")
    if section.law == "constant":
        return parse_law(f"constant:{1.0 if section.c is None else section.c}")
    raise ConfigError(f"[disorder] unknown law '{section.law}'")


def _centers(mesh: int) -> np.ndarray:
    return (np.arange(mesh) + 0.5) / mesh


def evaluate_profile(value: ProfileValue, dimension: int, mesh: int, name: str) -> np.ndarray:
    """m^d samples of one unit cell from a profile string, a number or an inline array."""
    shape = (mesh,) * dimension
    if isinstance(value, (int, float)):
        return np.full(shape, float(value))
    if isinstance(value, list):
        array = np.asarray(value, dtype=float)
        if array.shape != shape:
            raise ConfigError(f"{name}: inline array of shape {array.shape} does not match (m,)*d = {shape}")
        return array

    kind, _, params = value.partition(":")
    grids = np.meshgrid(*([_centers(mesh)] * dimension), indexing="ij")
    if kind == "zero":
        return np.zeros(shape)
    if kind == "constant":
        (c,) = _numbers(params, 1, kind)
        return np.full(shape, c)
    if kind == "two-phase":
        a, b = _numbers(params, 2, kind)
        return np.where(grids[0] < 0.5, a, b)
    if kind == "cosine":
        mean, amplitude = _numbers(params, 2, kind)
        wave = sum(np.cos(2.0 * math.pi * g) for g in grids) / dimension
        return mean + amplitude * wave
    if kind == "box":
        c, width = _numbers(params, 2, kind)
        if not 0.0 < width <= 1.0:
            raise ConfigError(f"{name}: box width must lie in (0, 1], got {width}")
        inside = np.ones(shape, dtype=bool)
        for g in grids:
            inside &= np.abs(g - 0.5) < 0.5 * width
        return np.where(inside, c, 0.0)
    raise ConfigError(f"{name}: unknown profile '{value}'")


def _inline_shape(value: ProfileValue) -> Optional[tuple]:
    if isinstance(value, list):
        return np.asarray(value, dtype=float).shape
    return None


def build_spec(
    spec_file: SpecFile,
    dimension: Optional[int] = None,
    mesh: Optional[int] = None,
    law: Optional[str] = None,
) -> CoefficientSpec:
    """Evaluate profiles on the grid and validate the resulting CoefficientSpec."""
    section = spec_file.field
    inline = _inline_shape(section.rho_plus) or _inline_shape(section.rho_bump)
    d = dimension or section.dimension or (len(inline) if inline else 1)
    m = mesh or section.mesh or (inline[0] if inline else 8)
    if inline and (len(inline) != d or inline[0] != m):
        raise ConfigError(f"inline profile of shape {inline} conflicts with d={d}, m={m}")
    disorder = parse_law(law) if law else law_from_section(spec_file.disorder)
    try:
        return CoefficientSpec(
            dimension=d,
            mesh=m,
            rho_plus=evaluate_profile(section.rho_plus, d, m, "rho_plus"),
            rho_bump=evaluate_profile(section.rho_bump, d, m, "rho_bump"),
            disorder=disorder,
            rho_lower=section.rho_lower,
            rho_upper=section.rho_upper,
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid coefficient spec: {exc}") from exc


def load_spec(
    path: Optional[Union[str, Path]] = None,
    dimension: Optional[int] = None,
    mesh: Optional[int] = None,
    law: Optional[str] = None,
) -> CoefficientSpec:
    """Config file (or the free operator rho = 1 when path is None) to CoefficientSpec."""
    spec_file = SpecFile.load(path) if path else SpecFile()
    return build_spec(spec_file, dimension=dimension, mesh=mesh, law=law)
