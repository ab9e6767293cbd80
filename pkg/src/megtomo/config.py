"""YAML scenario configs, dotted-path overrides and shipped presets.

Schema (``dim``, ``scheme`` and ``evolution`` are required)::

    dim: 3                      # Hilbert space dimension
    scheme: mub                 # mub | pauli
    evolution: stationary       # stationary | pauli_z | random_hermitian
    t_tot: 300                  # iterations per run
    n_states: 50                # Haar-random prepared states
    n_noise_repeats: 20         # independent noise realizations per state
    master_seed: 2022
    threshold: 0.1              # infidelity threshold for convergence speed
    noise:
      signal_rate: 1.0e6        # signal photons per window
      dark_rate: 100
      background_rate: 50
      extra_background_rate: 0  # light bulb
      subtract_offsets: false
    meg:
      learning_rate: 5
      log_floor: 1.0e-12
      schedule: constant        # constant | inverse_sqrt
"""
import copy
from dataclasses import asdict
from importlib import resources

import yaml

from .bench import ScenarioConfig
from .meg import MegConfig
from .photons import NoiseConfig

REQUIRED = ("dim", "scheme", "evolution")
TOP_FIELDS = {
    "dim": int, "scheme": str, "evolution": str, "t_tot": int, "n_states": int,
    "n_noise_repeats": int, "master_seed": int, "threshold": float,
}
NOISE_FIELDS = {
    "signal_rate": float, "dark_rate": float, "background_rate": float,
    "extra_background_rate": float, "subtract_offsets": bool,
}
MEG_FIELDS = {"learning_rate": float, "log_floor": float, "schedule": str}


class ConfigError(ValueError):
    def __init__(self, message, field=None, line=None, source=None):
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = ", ".join(where) + ": " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


def _line_map(node, prefix="", out=None):
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = f"{prefix}{key.value}"
            out[path] = key.start_mark.line + 1
            _line_map(value, path + ".", out)
    return out


def parse_config_text(text, source=None):
    """Parse YAML text into ``(mapping, {dotted_field: line})``."""
    try:
        data = yaml.safe_load(text)
        lines = _line_map(yaml.compose(text)) if data is not None else {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"malformed YAML: {getattr(exc, 'problem', exc)}", line=line,
                          source=source) from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", line=1, source=source)
    return data, lines


def load_config_file(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=path) from None
    return parse_config_text(text, source=path)


def list_presets():
    root = resources.files("megtomo") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_preset(name):
    path = resources.files("megtomo") / "presets" / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return parse_config_text(path.read_text(), source=f"preset {name}")


def apply_overrides(data, overrides):
    """Apply ``key.sub=value`` strings; values are parsed as YAML scalars."""
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ConfigError(f"cannot parse override value {raw!r}", field=key) from None
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"{part!r} is not a section", field=key)
        node[parts[-1]] = value
    return data


def _coerce(value, kind, field, lines, source):
    line = lines.get(field)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError("expected true/false", field, line, source)
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"expected an integer, got {value!r}", field, line, source)
        return int(value)
    if kind is float:
        if isinstance(value, bool):
            raise ConfigError(f"expected a number, got {value!r}", field, line, source)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {value!r}", field, line, source) from None
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", field, line, source)
    return value


def _section(data, fields, lines, source, prefix=""):
    out = {}
    for key, value in data.items():
        path = prefix + str(key)
        if key not in fields:
            raise ConfigError("unknown field", path, lines.get(path), source)
        out[key] = _coerce(value, fields[key], path, lines, source)
    return out


def scenario_from_dict(data, lines=None, source=None):
    """Validate a parsed mapping and build a ``ScenarioConfig``.

    Raises:
        ConfigError: naming the offending field (and its line, when known).
    """
    lines = lines or {}
    for name in REQUIRED:
        if name not in data:
            raise ConfigError("missing required field", name, None, source)
    data = dict(data)
    noise = data.pop("noise", None) or {}
    meg = data.pop("meg", None) or {}
    for name, section in (("noise", noise), ("meg", meg)):
        if not isinstance(section, dict):
            raise ConfigError("expected a mapping", name, lines.get(name), source)
    top = _section(data, TOP_FIELDS, lines, source)
    noise_kw = _section(noise, NOISE_FIELDS, lines, source, "noise.")
    meg_kw = _section(meg, MEG_FIELDS, lines, source, "meg.")
    try:
        return ScenarioConfig(
            noise=NoiseConfig(**noise_kw),
            meg=MegConfig(dim=top["dim"], **meg_kw),
            **top,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), source=source) from None


def scenario_to_dict(cfg):
    """Fully resolved config, suitable for echoing into outputs."""
    out = asdict(cfg)
    out["meg"].pop("dim", None)
    return out
