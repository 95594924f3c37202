"""Configuration and parameter types shared by every module.

All types are frozen dataclasses. Range and cross-field invariants (for
example ``n <= L*N``) are checked by :func:`validate` only, so tests can
build toy instances that a production config would reject.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, NamedTuple

from .errors import ParseError, ValidationError

__all__ = [
    "NetworkConfig",
    "LinkBudget",
    "RobustnessBounds",
    "SolverParams",
    "ConfigBundle",
    "load_config",
    "load_config_dict",
    "validate",
    "serialize",
    "dump_config",
    "apply_overrides",
]

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class NetworkConfig:
    """Deployment geometry and dimensions.

    ``pathloss_ref_db`` is a normalized reference: the large-scale gain in dB
    is ``-pathloss_ref_db - 10 * pathloss_exponent * log10(d / 1 m)`` with unit
    noise power, so the default of -74 dB puts the 0 dB gain point at 100 m.
    """

    num_aps: int = 16
    antennas_per_ap: int = 4
    num_ues: int = 32
    num_scheduled: int = 16
    area_side: float = 1000.0
    pathloss_exponent: float = 3.7
    pathloss_ref_db: float = -74.0
    shadowing_sigma_db: float = 8.0
    min_distance: float = 10.0
    seed: int = 0

    @property
    def num_antennas(self) -> int:
        return self.num_aps * self.antennas_per_ap


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power scale, noise variance and precoder power cap."""

    rho_f: float = 1.0
    noise_var: float = 1.0
    power_budget: float = 1.0

    @classmethod
    def from_snr_db(cls, snr_db: float, noise_var: float = 1.0,
                    power_budget: float = 1.0) -> "LinkBudget":
        return cls(rho_f=noise_var * 10.0 ** (snr_db / 10.0),
                   noise_var=noise_var, power_budget=power_budget)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.rho_f / self.noise_var)


@dataclass(frozen=True)
class RobustnessBounds:
    """Admissible interval of the CSI imperfection level.

    The per-UE error-power bounds used by the scheduler are
    ``alpha_lo * ||Gamma_k||^2`` and ``alpha_hi * ||Gamma_k||^2``; the global
    bounds used by the worst-case power allocator are the same fractions of
    ``||V_err||^2``. Mapping either pair back to alpha therefore returns
    ``(alpha_lo, alpha_hi)`` exactly, which is how all solvers consume them.
    """

    alpha_lo: float = 0.05
    alpha_hi: float = 0.3

    def error_power_bounds(self, gamma_sq: float) -> tuple[float, float]:
        return self.alpha_lo * gamma_sq, self.alpha_hi * gamma_sq

    @property
    def width(self) -> float:
        return self.alpha_hi - self.alpha_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.alpha_lo + self.alpha_hi)

    def clip(self, alpha):
        return min(max(alpha, self.alpha_lo), self.alpha_hi)


@dataclass(frozen=True)
class SolverParams:
    """Step sizes, iteration counts and oracle sample sizes.

    ``step_d`` is relative to the curvature of the MSE at the starting
    estimate (the actual step is ``step_d / (2 rho max_j C_jj)``), so values
    below 1 give a monotone descent regardless of channel scaling. The two
    alpha steps are relative to the interval width over the gradient
    magnitude at the start point.
    """

    step_d: float = 0.5
    step_alpha_sched: float = 0.5
    step_alpha_ascent: float = 0.5
    iters_d: int = 50
    iters_alpha: int = 50
    iters_reop: int = 50
    hessian_tol: float = 1e-8
    mc_samples: int = 2000
    backtracking: bool = True


@dataclass(frozen=True)
class ConfigBundle:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    link: LinkBudget = field(default_factory=LinkBudget)
    robustness: RobustnessBounds = field(default_factory=RobustnessBounds)
    solver: SolverParams = field(default_factory=SolverParams)

    def __iter__(self):
        # allows ``net, link, bounds, params = bundle``
        return iter((self.network, self.link, self.robustness, self.solver))


_SECTIONS = {
    "network": NetworkConfig,
    "link": LinkBudget,
    "robustness": RobustnessBounds,
    "solver": SolverParams,
}
# sections parsed elsewhere (the experiment harness); passed through untouched
_FOREIGN_SECTIONS = ("experiment",)


class _Violation(NamedTuple):
    where: str
    message: str


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_fields(obj) -> Iterable[_Violation]:
    name = type(obj).__name__
    for f in fields(obj):
        value = getattr(obj, f.name)
        where = f"{name}.{f.name}"
        if f.type in ("int",) and not _is_int(value):
            yield _Violation(where, f"must be an integer, got {value!r}")
        elif f.type == "float" and (isinstance(value, bool)
                                    or not isinstance(value, (int, float))
                                    or not math.isfinite(value)):
            yield _Violation(where, f"must be a finite number, got {value!r}")
        elif f.type == "bool" and not isinstance(value, bool):
            yield _Violation(where, f"must be a boolean, got {value!r}")


def _violations(bundle: ConfigBundle) -> Iterable[_Violation]:
    for section in bundle:
        yield from _check_fields(section)

    net, link, rb, sp = bundle
    for name in ("num_aps", "antennas_per_ap", "num_ues", "num_scheduled"):
        if _is_int(getattr(net, name)) and getattr(net, name) < 1:
            yield _Violation(f"NetworkConfig.{name}", "must be >= 1")
    if net.area_side <= 0:
        yield _Violation("NetworkConfig.area_side", "must be > 0")
    if net.pathloss_exponent <= 0:
        yield _Violation("NetworkConfig.pathloss_exponent", "must be > 0")
    if net.shadowing_sigma_db < 0:
        yield _Violation("NetworkConfig.shadowing_sigma_db", "must be >= 0")
    if net.min_distance < 0:
        yield _Violation("NetworkConfig.min_distance", "must be >= 0")
    if _is_int(net.seed) and not 0 <= net.seed <= SEED_MAX:
        yield _Violation("NetworkConfig.seed", "must be a 64-bit unsigned integer")
    if all(_is_int(getattr(net, a)) for a in ("num_aps", "antennas_per_ap", "num_ues",
                                               "num_scheduled")):
        if net.num_scheduled > net.num_antennas:
            yield _Violation("NetworkConfig.num_scheduled",
                             f"n={net.num_scheduled} exceeds M=L*N={net.num_antennas}")
        if net.num_ues <= net.num_scheduled:
            yield _Violation("NetworkConfig.num_ues",
                             f"K={net.num_ues} must exceed n={net.num_scheduled}")

    for name in ("rho_f", "noise_var", "power_budget"):
        if getattr(link, name) <= 0:
            yield _Violation(f"LinkBudget.{name}", "must be > 0")

    if not 0 < rb.alpha_lo < rb.alpha_hi < 1:
        yield _Violation("RobustnessBounds",
                         f"need 0 < alpha_lo < alpha_hi < 1, got "
                         f"alpha_lo={rb.alpha_lo}, alpha_hi={rb.alpha_hi}")

    for name in ("step_d", "step_alpha_sched", "step_alpha_ascent"):
        if getattr(sp, name) <= 0:
            yield _Violation(f"SolverParams.{name}", "must be > 0")
    for name in ("iters_d", "iters_alpha", "iters_reop", "mc_samples"):
        if _is_int(getattr(sp, name)) and getattr(sp, name) < 1:
            yield _Violation(f"SolverParams.{name}", "must be >= 1")
    if sp.hessian_tol < 0:
        yield _Violation("SolverParams.hessian_tol", "must be >= 0")


def validate(bundle: ConfigBundle) -> ValidationError | None:
    """Return the first violated invariant as a ValidationError, or None."""
    try:
        first = next(iter(_violations(bundle)))
    except StopIteration:
        return None
    except TypeError as exc:  # comparisons on wrongly typed values
        return ValidationError(f"type error while validating: {exc}")
    return ValidationError(f"{first.where}: {first.message}")


def serialize(bundle: ConfigBundle) -> dict[str, dict[str, Any]]:
    return {name: dataclasses.asdict(section)
            for name, section in zip(_SECTIONS, bundle)}


def _coerce_ints(cls, values: dict) -> dict:
    # JSON writers often emit 16.0 for integers
    out = dict(values)
    for f in fields(cls):
        v = out.get(f.name)
        if f.type == "int" and isinstance(v, float) and v.is_integer():
            out[f.name] = int(v)
    return out


def load_config_dict(raw: dict) -> ConfigBundle:
    """Build and validate a bundle from an already-parsed mapping."""
    if not isinstance(raw, dict):
        raise ParseError("config root must be a JSON object")
    unknown = set(raw) - set(_SECTIONS) - set(_FOREIGN_SECTIONS)
    if unknown:
        raise ValidationError(f"unknown config section(s): {sorted(unknown)}")

    sections = {}
    for name, cls in _SECTIONS.items():
        values = raw.get(name, {})
        if not isinstance(values, dict):
            raise ParseError(f"section {name!r} must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(values) - known
        if extra:
            raise ValidationError(f"unknown key(s) in {name!r}: {sorted(extra)}")
        sections[name] = cls(**_coerce_ints(cls, values))

    bundle = ConfigBundle(**sections)
    err = validate(bundle)
    if err is not None:
        raise err
    return bundle


def read_raw(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: config root must be a JSON object")
    return raw


def load_config(path: str | Path, overrides: Iterable[str] = ()) -> ConfigBundle:
    """Parse, override and validate a JSON config file.

    Returns a :class:`ConfigBundle`, which unpacks as
    ``(NetworkConfig, LinkBudget, RobustnessBounds, SolverParams)``.
    Absent keys take their dataclass defaults.
    """
    raw = read_raw(path)
    if overrides:
        raw = apply_overrides(raw, overrides)
    return load_config_dict(raw)


def dump_config(bundle: ConfigBundle, path: str | Path, extra: dict | None = None) -> None:
    data = serialize(bundle)
    if extra:
        data.update(extra)
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, overrides: Iterable[str]) -> dict:
    """Apply ``key=value`` overrides to a raw config mapping.

    Keys are either dotted (``network.num_ues``) or bare field names that
    are unique across sections (``num_ues``). Values are parsed as JSON,
    falling back to plain strings.
    """
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in raw.items()}
    owners: dict[str, list[str]] = {}
    for sec, cls in _SECTIONS.items():
        for f in fields(cls):
            owners.setdefault(f.name, []).append(sec)

    for item in overrides:
        key, sep, text = item.partition("=")
        if not sep:
            raise ParseError(f"override {item!r} is not of the form key=value")
        key = key.strip()
        if "." in key:
            sec, _, name = key.partition(".")
        else:
            candidates = owners.get(key, [])
            if len(candidates) != 1:
                raise ValidationError(f"override key {key!r} is unknown or ambiguous")
            sec, name = candidates[0], key
        section = out.setdefault(sec, {})
        if not isinstance(section, dict):
            raise ParseError(f"section {sec!r} must be a JSON object")
        section[name] = _parse_value(text.strip())
    return out
