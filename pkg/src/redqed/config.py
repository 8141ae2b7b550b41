"""Scenario configuration: YAML files validated by pydantic models.

Unknown keys are rejected everywhere and every error names the dotted path of
the offending key.  Parameter blocks live under ``params`` and are validated
against the model registered for the chosen scenario.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError

from . import kspace as ks
from .constants import PhysicalConstants
from .errors import ConfigurationError

SCENARIO_NAMES = ("algebra-check", "spinors", "gauss-check", "photon-energy", "gauge", "boundstate",
                  "longwave", "coulomb")

Vec3 = tuple[float, float, float]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class ConstantsBlock(Strict):
    hbar: PositiveFloat = 1.0
    c: PositiveFloat = 1.0
    ell: PositiveFloat = 1.0
    lam: PositiveFloat = Field(1.0, alias="lambda")
    kappa: PositiveFloat = 1.0
    q_el: PositiveFloat = 1.0
    mu0: PositiveFloat = 1.0

    def physical(self) -> PhysicalConstants:
        return PhysicalConstants(self.hbar, self.c, self.ell, self.lam, self.kappa, self.q_el, self.mu0)


class SphericalGrid(Strict):
    K_max: PositiveFloat
    n_radial: PositiveInt
    n_polar: PositiveInt
    n_azimuthal: PositiveInt

    def build(self) -> ks.QuadratureGrid:
        return ks.make_grid(self.K_max, self.n_radial, self.n_polar, self.n_azimuthal)


class GaussianBlock(Strict):
    amplitude: float = 0.8
    center: Vec3 = (0.0, 0.0, 0.0)
    width: PositiveFloat = 0.5


class AmplitudeBlock(Strict):
    amplitude: float = 0.1
    center: Vec3 = (0.0, 0.0, 0.0)
    width: PositiveFloat = 1.0
    k0: PositiveFloat = 0.5
    photon_width: Optional[PositiveFloat] = None


# ---------------------------------------------------------------- scenario parameters

class AlgebraParams(Strict):
    oscillator_cutoff: int = Field(20, ge=2)
    photon_cutoff: int = Field(16, ge=2)
    safe_levels: int = Field(12, ge=1)
    samples: PositiveInt = 30


class SpinorParams(Strict):
    samples: PositiveInt = 1000
    momentum_scale: PositiveFloat = 3.0
    field_grid: SphericalGrid = SphericalGrid(K_max=2.0, n_radial=6, n_polar=6, n_azimuthal=6)
    point: tuple[float, float, float, float] = (0.3, 0.2, -0.1, 0.4)
    steps: tuple[PositiveFloat, ...] = (0.1, 0.05, 0.025)


class GaussParams(Strict):
    samples: PositiveInt = 10_000
    momentum_scale: PositiveFloat = 2.0
    point: tuple[float, float, float, float] = (0.3, -0.1, 0.2, 0.5)


class PhotonEnergyParams(Strict):
    radial_points: tuple[PositiveInt, ...] = (8, 16, 32)
    angular_points: PositiveInt = 32
    oscillator_cutoff: int = Field(32, ge=2)
    photon_cutoff: int = Field(8, ge=2)
    scalar: GaussianBlock = GaussianBlock(amplitude=0.8, center=(0.5, -0.2, 0.1), width=0.4)
    photon_h: GaussianBlock = GaussianBlock(amplitude=0.5, center=(0.0, 0.3, -0.2), width=0.4)
    photon_v: GaussianBlock = GaussianBlock(amplitude=0.3, center=(0.2, 0.0, 0.1), width=0.35)


class GaugeParams(Strict):
    lattice_spacing: PositiveFloat = 0.5
    lattice_radius: PositiveFloat = 1.5
    photon_vectors: tuple[Vec3, ...] = ((0.5, 0.0, 0.0), (0.0, 0.5, 0.5), (0.5, -0.5, 0.0))
    photon_weight: PositiveFloat = 0.3
    random_profiles: PositiveInt = 10
    counterexample: Optional[Literal["longitudinal"]] = "longitudinal"
    counterexample_scale: PositiveFloat = 1.0


class BoundstateParams(Strict):
    photon_grid: SphericalGrid = SphericalGrid(K_max=2.0, n_radial=6, n_polar=4, n_azimuthal=6)
    electron_grid: SphericalGrid = SphericalGrid(K_max=3.0, n_radial=6, n_polar=4, n_azimuthal=6)
    method: Literal["closed-form", "spinor"] = "closed-form"
    profiles: tuple[AmplitudeBlock, ...] = (
        AmplitudeBlock(amplitude=0.3, center=(0.0, 0.0, 0.0), width=1.0, k0=0.5),
        AmplitudeBlock(amplitude=0.2, center=(0.5, 0.0, 0.2), width=0.7, k0=0.3, photon_width=1.0),
        AmplitudeBlock(amplitude=0.5, center=(0.0, 0.4, 0.0), width=1.5, k0=1.0),
    )
    infeasible_control: Optional[AmplitudeBlock] = AmplitudeBlock(amplitude=5.0)


class LongwaveParams(Strict):
    k: Vec3 = (0.3, 0.2, -0.5)
    directions: tuple[Vec3, ...] = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0.3, -1, 0.2))
    include_parallel: bool = True
    magnitude_min: PositiveFloat = 1e-4
    magnitude_max: PositiveFloat = 1e-2
    points: int = Field(12, ge=3)


class TranslatingBlock(Strict):
    charge: float = 1.0
    sigma: PositiveFloat = 1.0
    velocity: Vec3 = (0.5, 0.0, 0.0)


class CoulombParams(Strict):
    sizes: tuple[int, ...] = (32, 48, 64)
    length: PositiveFloat = 10.0
    periodic: bool = False
    density: Literal["gaussian", "dipole"] = "gaussian"
    charge: float = 1.0
    sigma: PositiveFloat = 1.0
    far_zone: tuple[PositiveFloat, PositiveFloat] = (3.0, 4.5)
    continuity_profiles: tuple[TranslatingBlock, ...] = (
        TranslatingBlock(),
        TranslatingBlock(charge=-0.7, sigma=0.8, velocity=(0.2, -0.3, 0.4)),
    )
    dump_volume: bool = False


PARAM_MODELS: dict[str, type[Strict]] = {
    "algebra-check": AlgebraParams,
    "spinors": SpinorParams,
    "gauss-check": GaussParams,
    "photon-energy": PhotonEnergyParams,
    "gauge": GaugeParams,
    "boundstate": BoundstateParams,
    "longwave": LongwaveParams,
    "coulomb": CoulombParams,
}


class _TopLevel(Strict):
    scenario: Optional[Literal[SCENARIO_NAMES]] = None
    constants: ConstantsBlock = ConstantsBlock()
    seed: int = 0
    params: dict = {}
    tolerances: dict[str, PositiveFloat] = {}


class ScenarioConfig(Strict):
    scenario: Literal[SCENARIO_NAMES]
    constants: ConstantsBlock = ConstantsBlock()
    seed: int = 0
    params: Strict
    tolerances: dict[str, float] = {}

    def physical_constants(self) -> PhysicalConstants:
        return self.constants.physical()

    def resolved(self) -> dict:
        """Plain-data form of the full configuration including defaults."""
        return {
            "scenario": self.scenario,
            "constants": self.constants.model_dump(by_alias=True),
            "seed": self.seed,
            "params": self.params.model_dump(mode="json"),
            "tolerances": dict(sorted(self.tolerances.items())),
        }

    def digest(self) -> str:
        text = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _format_errors(err: ValidationError, prefix: tuple = ()) -> str:
    parts = []
    for e in err.errors():
        path = ".".join(str(p) for p in prefix + tuple(e["loc"])) or "<root>"
        parts.append(f"{path}: {e['msg']}")
    return "; ".join(parts)


def build_config(data: dict | None, scenario: str | None = None, seed: int | None = None,
                 tolerance_names=None) -> ScenarioConfig:
    """Validate raw mapping data. ``scenario`` and ``seed`` override the file values."""
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigurationError("<root>: configuration must be a mapping")
    try:
        top = _TopLevel.model_validate(data)
    except ValidationError as err:
        raise ConfigurationError(_format_errors(err)) from None
    name = scenario or top.scenario
    if name is None:
        raise ConfigurationError("scenario: no scenario given")
    if name not in PARAM_MODELS:
        raise ConfigurationError(f"scenario: unknown scenario {name!r}")
    if top.scenario is not None and scenario is not None and top.scenario != scenario:
        raise ConfigurationError(f"scenario: file is for {top.scenario!r}, requested {scenario!r}")
    try:
        params = PARAM_MODELS[name].model_validate(top.params)
    except ValidationError as err:
        raise ConfigurationError(_format_errors(err, ("params",))) from None
    if tolerance_names is not None:
        for key in top.tolerances:
            if key not in tolerance_names:
                raise ConfigurationError(f"tolerances.{key}: unknown tolerance for scenario {name!r}")
    return ScenarioConfig(scenario=name, constants=top.constants, seed=top.seed if seed is None else seed,
                          params=params, tolerances=dict(top.tolerances))


def load_yaml(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"<root>: cannot read config {path}: {exc.strerror}") from None
    try:
        return yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"<root>: invalid YAML in {path}: {exc}") from None
