"""
Experiment configuration files (JSON syntax, strict schema).

:func:`parse_config` validates the whole file and collects every error
with its key path before raising :class:`ConfigError`; nothing runs on an
invalid file.
"""

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import pydantic
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

from .directional import EpsGrid
from .domains import build_domain
from .fields import FieldConfigError, FSpec, build_field
from .tail import SGrid
from .verifier import THEOREM_IDS, CheckConfigError, TheoremCheck, validate_check

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config", "build_checks"]

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """All problems found in a config file, one ``path: message`` line each."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Budgets(_Strict):
    pairs: Optional[PositiveInt] = None
    spatial_samples: Optional[PositiveInt] = None
    sphere_resolution: Optional[PositiveInt] = None
    block_size: Optional[PositiveInt] = None


class SGridSpec(_Strict):
    s_min: PositiveFloat
    s_max: PositiveFloat
    per_decade: PositiveInt = 4


class EpsGridSpec(_Strict):
    eps_max: PositiveFloat
    eps_min: PositiveFloat
    per_decade: PositiveInt = 4


class Tolerances(_Strict):
    rel_tol: Optional[float] = Field(None, ge=0)
    plateau_tol: Optional[float] = Field(None, ge=0)
    min_decades: Optional[float] = Field(None, gt=0)
    detect_threshold: Optional[float] = Field(None, ge=0)


class Support(_Strict):
    lo: list[float]
    hi: list[float]


Vector = list[float]


class LinearSpec(_Strict):
    name: str
    kind: Literal["linear"]
    slope: Union[Vector, list[Vector]]
    offset: Union[float, Vector] = 0.0


class GaussianSpec(_Strict):
    name: str
    kind: Literal["gaussian"]
    center: Vector
    amplitude: float = 1.0
    width: PositiveFloat = 1.0


class ConstantSpec(_Strict):
    name: str
    kind: Literal["constant"]
    dim: PositiveInt
    value: Union[float, Vector] = 0.0


class StepSpec(_Strict):
    name: str
    kind: Literal["step"]
    normal: Vector
    offset: float
    jump: Union[float, Vector]
    base: Union[float, Vector] = 0.0


class RadialSpec(_Strict):
    name: str
    kind: Literal["cusp", "power-singularity"]
    center: Vector
    exponent: float
    support: Support
    amplitude: float = 1.0


class GridSample(_Strict):
    field: dict
    lo: Vector
    hi: Vector
    n: PositiveInt


class GridSpec(_Strict):
    name: str
    kind: Literal["grid"]
    lo: Optional[Vector] = None
    spacing: Optional[PositiveFloat] = None
    values: Optional[list] = None
    sample: Optional[GridSample] = None


FieldSpec = Annotated[Union[LinearSpec, GaussianSpec, ConstantSpec, StepSpec, RadialSpec, GridSpec],
                      Field(discriminator="kind")]


class BoxSpec(_Strict):
    name: str
    kind: Literal["box"]
    lo: Vector
    hi: Vector


class BallSpec(_Strict):
    name: str
    kind: Literal["ball"]
    center: Vector
    radius: PositiveFloat


class BoxMinusBoxSpec(_Strict):
    name: str
    kind: Literal["box-minus-box"]
    lo: Vector
    hi: Vector
    hole_lo: Vector
    hole_hi: Vector


DomainSpec = Annotated[Union[BoxSpec, BallSpec, BoxMinusBoxSpec], Field(discriminator="kind")]


class FSpecModel(_Strict):
    q: float
    cap: Optional[float] = Field(None, ge=0)


class CheckSpec(_Strict):
    name: Optional[str] = None
    theorem: Literal[THEOREM_IDS]
    field: str
    domain: str
    inner: Optional[str] = None
    q: float = 2.0
    r: Optional[float] = Field(None, ge=0)
    F: Optional[FSpecModel] = None
    directions: PositiveInt = 16
    seed: Optional[int] = Field(None, ge=0)
    budgets: Budgets = Budgets()
    s_grid: Optional[SGridSpec] = None
    eps_grid: Optional[EpsGridSpec] = None
    tolerances: Tolerances = Tolerances()


class RunConfig(_Strict):
    version: Literal[CONFIG_VERSION] = CONFIG_VERSION
    seed: int = Field(0, ge=0)
    out_dir: Optional[str] = None
    budgets: Budgets = Budgets()
    s_grid: SGridSpec = SGridSpec(s_min=10.0, s_max=1e4)
    eps_grid: EpsGridSpec = EpsGridSpec(eps_max=0.1, eps_min=1e-3)
    tolerances: Tolerances = Tolerances()
    fields: list[FieldSpec]
    domains: list[DomainSpec]
    checks: list[CheckSpec]


def _loc(loc):
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        elif part in ("linear", "gaussian", "constant", "step", "cusp", "power-singularity", "grid",
                      "box", "ball", "box-minus-box"):
            continue  # union tag inserted by pydantic
        else:
            out += ("." if out else "") + str(part)
    return out or "<root>"


def _spec_dict(model):
    d = model.model_dump(exclude_none=True)
    d.pop("name", None)
    return d


def _dup_names(items, key):
    seen, errs = set(), []
    for i, it in enumerate(items):
        if it.name in seen:
            errs.append(f"{key}[{i}].name: duplicate name {it.name!r}")
        seen.add(it.name)
    return errs


def load_config(data):
    """Validate a parsed JSON document; returns (RunConfig, checks)."""
    try:
        cfg = RunConfig.model_validate(data)
    except pydantic.ValidationError as exc:
        raise ConfigError([f"{_loc(e['loc'])}: {e['msg']}" for e in exc.errors()]) from None
    return cfg, build_checks(cfg)


def parse_config(path):
    """Read and validate a config file; raises :class:`ConfigError` listing every problem."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read ({exc.strerror})"]) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"]) from None
    return load_config(data)


def _merge(base, over, cls):
    d = base.model_dump(exclude_none=True)
    d.update(over.model_dump(exclude_none=True))
    return cls(**d)


def build_checks(cfg):
    """Resolve names and build engine objects; every failure is collected."""
    errors = _dup_names(cfg.fields, "fields") + _dup_names(cfg.domains, "domains")
    fields, domains = {}, {}
    for i, fs in enumerate(cfg.fields):
        try:
            fields[fs.name] = (build_field(_spec_dict(fs), (f"fields[{i}]",)), _spec_dict(fs))
        except FieldConfigError as exc:
            errors.append(f"{'.'.join(exc.path) or f'fields[{i}]'}: {str(exc).split(': ', 1)[-1]}")
        except (ValueError, TypeError) as exc:
            errors.append(f"fields[{i}]: {exc}")
    for i, ds in enumerate(cfg.domains):
        try:
            domains[ds.name] = (build_domain(_spec_dict(ds)), _spec_dict(ds))
        except (ValueError, TypeError) as exc:
            errors.append(f"domains[{i}]: {exc}")

    defaults = {
        "pairs": 1_000_000, "spatial_samples": 200_000, "sphere_resolution": 256, "block_size": 1 << 16,
        "rel_tol": 0.05, "plateau_tol": 0.02, "min_decades": 1.0, "detect_threshold": 0.1,
    }
    checks = []
    for i, c in enumerate(cfg.checks):
        where = f"checks[{i}]"
        bad = False
        if not c.q >= 1:
            errors.append(f"{where}.q: q must be >= 1")
            bad = True
        if c.field not in fields:
            errors.append(f"{where}.field: unknown field name {c.field!r}")
            bad = True
        if c.domain not in domains:
            errors.append(f"{where}.domain: unknown domain name {c.domain!r}")
            bad = True
        if c.inner is not None and c.inner not in domains:
            errors.append(f"{where}.inner: unknown domain name {c.inner!r}")
            bad = True
        f = None
        if c.F is not None:
            try:
                f = FSpec(c.F.q, c.F.cap)
            except ValueError as exc:
                errors.append(f"{where}.F: {exc}")
                bad = True
        if bad:
            continue
        budgets = _merge(cfg.budgets, c.budgets, Budgets)
        tols = _merge(cfg.tolerances, c.tolerances, Tolerances)
        opts = dict(defaults)
        opts.update(budgets.model_dump(exclude_none=True))
        opts.update(tols.model_dump(exclude_none=True))
        sg = c.s_grid or cfg.s_grid
        eg = c.eps_grid or cfg.eps_grid
        field, fspec = fields[c.field]
        domain, dspec = domains[c.domain]
        try:
            tc = TheoremCheck(
                theorem_id=c.theorem, field=field, domain=domain, q=c.q, r=c.r,
                name=c.name or f"{c.theorem}:{c.field}", field_spec=fspec, domain_spec=dspec,
                s_grid=SGrid(sg.s_min, sg.s_max, sg.per_decade),
                eps_grid=EpsGrid(eg.eps_max, eg.eps_min, eg.per_decade),
                f=f, inner=None if c.inner is None else domains[c.inner][0],
                directions=c.directions, seed=cfg.seed if c.seed is None else c.seed, **opts)
            sg_vals = tc.s_grid.values()
            tc.eps_grid.values()
            if len(sg_vals) < 8:
                raise CheckConfigError("s_grid must contain at least 8 thresholds")
            validate_check(tc)
        except (CheckConfigError, ValueError) as exc:
            errors.append(f"{where}: {exc}")
            continue
        checks.append(tc)
    if errors:
        raise ConfigError(errors)
    return checks
