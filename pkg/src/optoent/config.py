"""Flat ``key = value`` parameter files.

Keys are the :class:`~optoent.params.PhysicalParams` field names with values
in SI / rad/s, plus two conveniences:

``detuning_ratio``
    effective detuning in units of omega_m (alternative to ``detuning_s``)
``angular_quotes``
    read the quoted MHz defaults as rad/s instead of multiplying by 2*pi

Missing keys take the default operating point. Later assignments win.
"""

from __future__ import annotations

import dataclasses

from .params import ParameterError, PhysicalParams, default_params

FIELD_NAMES = tuple(f.name for f in dataclasses.fields(PhysicalParams))
EXTRA_KEYS = ("detuning_ratio", "angular_quotes")
_BOOL_FIELDS = {"drop_gamma_in_drift", "angular_quotes"}
_STR_FIELDS = {"diffusion_xs_power"}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigParseError(ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(where + message)


class ConfigValidationError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def _convert(key: str, raw: str, line_no: int | None):
    if key in _BOOL_FIELDS:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigValidationError(key, f"expected a boolean, got {raw!r}")
    if key in _STR_FIELDS:
        return raw
    try:
        return float(raw)
    except ValueError:
        raise ConfigValidationError(key, f"expected a number, got {raw!r}") from None


def parse_assignments(text: str) -> list[tuple[str, str, int]]:
    """(key, raw value, line number) triples in file order."""
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(f"expected 'key = value', got {line.strip()!r}", n)
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigParseError(f"empty key or value in {line.strip()!r}", n)
        out.append((key, value, n))
    return out


def resolve(assignments) -> tuple[PhysicalParams, tuple[str, ...]]:
    """Build parameters from assignments; also return the keys left at defaults."""
    unknown = sorted({k for k, _, _ in assignments if k not in FIELD_NAMES + EXTRA_KEYS})
    if unknown:
        raise ConfigParseError(f"unknown keys: {', '.join(unknown)}")
    values: dict = {}
    for key, raw, n in assignments:
        val = _convert(key, raw, n)
        # the two detuning spellings share one slot
        if key == "detuning_ratio":
            values.pop("detuning_s", None)
        elif key == "detuning_s":
            values.pop("detuning_ratio", None)
        values[key] = val

    angular = values.pop("angular_quotes", False)
    ratio = values.pop("detuning_ratio", None)
    defaults = default_params(angular_quotes=angular)
    merged = dataclasses.asdict(defaults)
    merged.update(values)
    if "detuning_s" not in values:
        r = defaults.detuning_ratio if ratio is None else ratio
        merged["detuning_s"] = r * merged["mech_freq_omega_m"]
    try:
        params = PhysicalParams(**merged)
    except ParameterError as exc:
        raise ConfigValidationError(exc.field, str(exc)) from exc
    explicit = set(values) | ({"detuning_s"} if ratio is not None else set())
    inherited = tuple(name for name in FIELD_NAMES if name not in explicit)
    return params, inherited


def parse_config(text: str) -> PhysicalParams:
    return resolve(parse_assignments(text))[0]


def load_config(path=None, overrides=()) -> tuple[PhysicalParams, tuple[str, ...]]:
    """Parse an optional file, then apply ``KEY=VALUE`` overrides in order."""
    assignments = []
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            assignments.extend(parse_assignments(fh.read()))
    for item in overrides:
        if "=" not in item:
            raise ConfigParseError(f"override {item!r} is not KEY=VALUE")
        key, _, value = item.partition("=")
        assignments.append((key.strip(), value.strip(), None))
    return resolve(assignments)


def format_config(p: PhysicalParams) -> str:
    lines = ["# optoent parameters (SI units, angular frequencies in rad/s)"]
    for name in FIELD_NAMES:
        v = getattr(p, name)
        if isinstance(v, bool):
            text = "true" if v else "false"
        elif isinstance(v, float):
            text = repr(v)
        else:
            text = str(v)
        lines.append(f"{name} = {text}")
    return "\n".join(lines) + "\n"
