"""
Experiment configuration: a flat YAML mapping.

Example::

    mode: distributed
    objective: quadratic_network
    n: 100
    p: 10
    topology: complete
    weights: sinkhorn
    rule: bb1
    max_iter: 50
    seed: 0

Every key of :class:`ExperimentConfig` may appear; ``mode``, ``objective``
and ``max_iter`` are required. Unknown keys are rejected.
"""

import math
from dataclasses import asdict, dataclass, fields

import yaml

from ..bb_core import ClampMode, StepRule, StepVariant
from ..exceptions import ConfigParseError, ConfigurationError

MODES = ("centralized", "distributed")
OBJECTIVES = ("quadratic_network", "least_squares", "identity")
TOPOLOGIES = ("complete", "ring", "erdos_renyi")
WEIGHTS = ("metropolis", "sinkhorn", "uniform")
REQUIRED = ("mode", "objective", "max_iter")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    objective: str
    max_iter: int
    n: int = 100
    p: int = 10
    m: int = None
    topology: str = "complete"
    er_prob: float = None
    weights: str = "metropolis"
    condition_cap: float = 100.0
    aligned: bool = False
    rule: str = "bb1"
    alpha0: float = None
    clamp_mode: str = "raw"
    alternate_every: int = None
    eps: float = 1e-8
    seed: int = 0
    output_path: str = "run.csv"

    @property
    def step_rule(self):
        return StepRule(self.rule, alpha0=self.alpha0, clamp_mode=self.clamp_mode,
                        alternate_every=self.alternate_every)

    def replace(self, **changes):
        data = asdict(self)
        data.update(changes)
        return build_config(data)


KEYS = tuple(f.name for f in fields(ExperimentConfig))


def _integer(key, value, minimum=1):
    if isinstance(value, bool):
        raise ConfigParseError(key, f"expected an integer, got {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigParseError(key, f"expected an integer, got {value!r}") from None
    if isinstance(value, float):
        if not value.is_integer():
            raise ConfigParseError(key, f"expected an integer, got {value!r}")
        value = int(value)
    if not isinstance(value, int):
        raise ConfigParseError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigParseError(key, f"must be >= {minimum}, got {value}")
    return value


def _real(key, value, positive=True):
    if isinstance(value, bool):
        raise ConfigParseError(key, f"expected a number, got {value!r}")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigParseError(key, f"expected a number, got {value!r}") from None
    if not math.isfinite(value) or (positive and value <= 0):
        raise ConfigParseError(key, f"must be a positive finite number, got {value!r}")
    return value


def _choice(key, value, options):
    if value not in options:
        raise ConfigParseError(key, f"must be one of {', '.join(options)}; got {value!r}")
    return value


def _flag(key, value):
    if not isinstance(value, bool):
        raise ConfigParseError(key, f"expected true or false, got {value!r}")
    return value


def build_config(data):
    """Validate a mapping and return a normalized :class:`ExperimentConfig`."""
    if not isinstance(data, dict):
        raise ConfigParseError(None, "configuration must be a mapping of keys to values")
    for key in data:
        if key not in KEYS:
            raise ConfigParseError(key, "unknown key")
    for key in REQUIRED:
        if data.get(key) is None:
            raise ConfigParseError(key, "missing required key")
    defaults = {f.name: f.default for f in fields(ExperimentConfig) if f.name not in REQUIRED}
    raw = {**defaults, **{k: v for k, v in data.items() if v is not None}}

    out = {
        "mode": _choice("mode", raw["mode"], MODES),
        "objective": _choice("objective", raw["objective"], OBJECTIVES),
        "max_iter": _integer("max_iter", raw["max_iter"]),
        "n": _integer("n", raw["n"]),
        "p": _integer("p", raw["p"]),
        "topology": _choice("topology", raw["topology"], TOPOLOGIES),
        "weights": _choice("weights", raw["weights"], WEIGHTS),
        "condition_cap": _real("condition_cap", raw["condition_cap"]),
        "aligned": _flag("aligned", raw["aligned"]),
        "rule": _choice("rule", raw["rule"], tuple(v.value for v in StepVariant)),
        "clamp_mode": _choice("clamp_mode", raw["clamp_mode"], tuple(c.value for c in ClampMode)),
        "eps": _real("eps", raw["eps"]),
        "seed": _integer("seed", raw["seed"], minimum=0),
        "output_path": str(raw["output_path"]),
    }
    if out["condition_cap"] < 1:
        raise ConfigParseError("condition_cap", "must be >= 1")
    if out["seed"] >= 2**64:
        raise ConfigParseError("seed", "must fit in 64 bits")
    out["m"] = None if raw["m"] is None else _integer("m", raw["m"])
    if out["objective"] == "least_squares":
        if out["m"] is None:
            out["m"] = out["p"]
        if out["m"] < out["p"]:
            raise ConfigParseError("m", f"must be >= p ({out['p']}) for a strongly convex fit")
    elif out["m"] is not None:
        raise ConfigParseError("m", "only applies to the least_squares objective")
    out["alpha0"] = None if raw["alpha0"] is None else _real("alpha0", raw["alpha0"])
    out["alternate_every"] = (None if raw["alternate_every"] is None
                              else _integer("alternate_every", raw["alternate_every"]))
    if out["topology"] == "erdos_renyi":
        if raw["er_prob"] is None:
            raise ConfigParseError("er_prob", "required for erdos_renyi topology")
        out["er_prob"] = _real("er_prob", raw["er_prob"])
        if out["er_prob"] > 1:
            raise ConfigParseError("er_prob", "must be at most 1")
    elif raw["er_prob"] is not None:
        raise ConfigParseError("er_prob", "only applies to erdos_renyi topology")
    else:
        out["er_prob"] = None
    if out["mode"] == "centralized":
        out["n"] = 1
    elif out["n"] < 2:
        raise ConfigParseError("n", "distributed runs need at least 2 agents")
    if out["weights"] == "uniform" and out["mode"] == "distributed" and out["topology"] != "complete":
        raise ConfigParseError("weights", "uniform weights need the complete topology")
    try:
        StepRule(out["rule"], alpha0=out["alpha0"], clamp_mode=out["clamp_mode"],
                 alternate_every=out["alternate_every"])
    except ConfigurationError as exc:
        raise ConfigParseError("rule", str(exc)) from None
    return ExperimentConfig(**out)


def parse_config(text):
    """Parse YAML text into a validated :class:`ExperimentConfig`."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(None, f"malformed YAML: {exc}") from None
    return build_config({} if data is None else data)


def normalize(data):
    """Canonical mapping for a raw config mapping (defaults filled, types fixed)."""
    return asdict(build_config(data))


def serialize_config(config):
    """Canonical YAML text; ``parse_config(serialize_config(c)) == c``."""
    return yaml.safe_dump(asdict(config), sort_keys=False, default_flow_style=False)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
