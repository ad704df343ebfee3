"""
Run configuration files.

One setting per line as ``section.key = value``; ``#`` starts a comment.
Values are numbers, ``true``/``false``, or strings (quotes optional)::

    # minimal electromagnetic run
    scenario.field_kind = electromagnetic
    scenario.q_A = 0.5
    scenario.d = 1
    scenario.D = 100
    scenario.T_A = 80
    scenario.T_B = 80

    sweep.axis1 = T_A log 1 100 13
    output.format = json

Every key has a default (see ``DEFAULTS``), so a file with only
``scenario.*`` lines is complete. Unknown keys and malformed lines are
rejected with their line and column.
"""

import copy
import math
import re
from dataclasses import dataclass

from .scenario import Scenario, ScenarioError

DEFAULTS = {
    "scenario": {
        "field_kind": "electromagnetic",
        "q_A": 1.0,
        "m_A": 1.0,
        "d": 1.0,
        "D": 100.0,
        "T_A": 50.0,
        "T_B": 50.0,
        "q_B": 1.0,
        "m_B": 1.0,
        "ramp": "smoothstep",
        "bob_threshold": 1.0,
        "alice_threshold": 1.0,
    },
    "basis": {
        "n_modes": 2048,
        "omega_min_factor": 1e-3,
        "omega_max_factor": 64.0,
        "coefficient": None,
    },
    "history": {
        "samples_per_ramp": None,
        "split_factor": 20.0,
        "hold_factor": 2.0,
    },
    "audit": {
        "trials": 10000,
        "seed": 0,
        "max_modes": 64,
        # None draws the field/probe split per trial, up to max_modes in total
        "n_field": None,
        "n_probe": None,
        "squeeze_bound": 0.0,
    },
    "sweep": {
        "axis1": None,
        "axis2": None,
        "outputs": "d_alice, d_bob, n_entangling, snr, regime, inequality_margin",
    },
    "output": {
        "path": None,
        "format": None,
    },
}

_LINE = re.compile(r"^(?P<key>[^=]*?)\s*=\s*(?P<value>.*?)\s*$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*\.[A-Za-z_][A-Za-z0-9_]*$")
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class ConfigError(ValueError):
    def __init__(self, message, line=None, column=None, source="<config>"):
        self.line, self.column, self.source = line, column, source
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


def parse_value(text):
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null", ""):
        return None
    if _NUMBER.match(text):
        if re.match(r"^[+-]?\d+$", text):
            return int(text)
        return float(text)
    return text


def _set(tree, dotted, value, line=None, column=None, source="<config>"):
    if not _KEY.match(dotted):
        raise ConfigError(f"malformed key {dotted!r}; expected 'section.key'",
                          line, column, source)
    section, key = dotted.split(".")
    if section not in DEFAULTS:
        raise ConfigError(f"unknown section {section!r}; known: {sorted(DEFAULTS)}",
                          line, column, source)
    if key not in DEFAULTS[section]:
        raise ConfigError(f"unknown key {dotted!r}; known keys in [{section}]: "
                          f"{sorted(DEFAULTS[section])}", line, column, source)
    tree[section][key] = value


def parse_text(text, source="<config>"):
    """Parse config text into ``{section: {key: value}}`` of explicit settings."""
    tree = {s: {} for s in DEFAULTS}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = _LINE.match(body)
        indent = len(body) - len(body.lstrip())
        if m is None:
            raise ConfigError("expected 'section.key = value'", lineno, indent + 1, source)
        key = m.group("key").strip()
        column = indent + 1
        if not key:
            raise ConfigError("missing key before '='", lineno, column, source)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})",
                              lineno, column, source)
        seen[key] = lineno
        _set(tree, key, parse_value(m.group("value")), lineno, column, source)
    return tree


def _strip_comment(line):
    out = []
    quote = None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration: every section with defaults filled in."""

    values: dict
    source: str = "<config>"

    @classmethod
    def from_text(cls, text, source="<config>", overrides=()):
        tree = parse_text(text, source)
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"override {item!r} must look like section.key=value",
                                  source="--set")
            key, value = item.split("=", 1)
            _set(tree, key.strip(), parse_value(value.strip()), source="--set")
        merged = copy.deepcopy(DEFAULTS)
        for section, entries in tree.items():
            merged[section].update(entries)
        cfg = cls(merged, source)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path, overrides=()):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", source=str(path)) from None
        except UnicodeDecodeError:
            raise ConfigError("config must be UTF-8 text", source=str(path)) from None
        return cls.from_text(text, str(path), overrides)

    def section(self, name):
        return self.values[name]

    def scenario(self):
        try:
            return Scenario(**self.values["scenario"])
        except (ScenarioError, TypeError) as exc:
            raise ConfigError(f"invalid scenario: {exc}", source=self.source) from None

    def radiation_options(self):
        b, h = self.values["basis"], self.values["history"]
        return {
            "n_modes": int(b["n_modes"]),
            "omega_min_factor": float(b["omega_min_factor"]),
            "omega_max_factor": float(b["omega_max_factor"]),
            "coefficient": b["coefficient"],
            "samples": h["samples_per_ramp"],
            "split_factor": float(h["split_factor"]),
            "hold_factor": float(h["hold_factor"]),
        }

    def validate(self):
        self.scenario()
        b = self.values["basis"]
        _require(isinstance(b["n_modes"], int) and b["n_modes"] >= 2,
                 "basis.n_modes must be an integer >= 2", self.source)
        for key in ("omega_min_factor", "omega_max_factor"):
            _require(_positive(b[key]), f"basis.{key} must be a positive number", self.source)
        _require(b["coefficient"] is None or _positive(b["coefficient"]),
                 "basis.coefficient must be a positive number", self.source)
        h = self.values["history"]
        _require(h["samples_per_ramp"] is None
                 or (isinstance(h["samples_per_ramp"], int) and h["samples_per_ramp"] > 0),
                 "history.samples_per_ramp must be a positive integer", self.source)
        _require(_positive(h["split_factor"]), "history.split_factor must be positive", self.source)
        _require(_number(h["hold_factor"]) and h["hold_factor"] >= 0,
                 "history.hold_factor must be non-negative", self.source)
        a = self.values["audit"]
        for key in ("trials", "seed", "max_modes"):
            _require(_count(a[key]), f"audit.{key} must be a non-negative integer", self.source)
        _require(a["trials"] >= 1, "audit.trials must be at least 1 (an empty audit proves nothing)",
                 self.source)
        _require(2 <= a["max_modes"] <= 64, "audit.max_modes must lie in [2, 64]", self.source)
        nf, npr = a["n_field"], a["n_probe"]
        _require((nf is None) == (npr is None),
                 "set both audit.n_field and audit.n_probe, or neither", self.source)
        if nf is not None:
            _require(_count(nf) and _count(npr) and nf >= 1 and npr >= 1,
                     "audit.n_field and audit.n_probe must be positive integers", self.source)
            _require(nf + npr <= a["max_modes"],
                     "audit needs n_field + n_probe <= max_modes", self.source)
        _require(a["squeeze_bound"] == 0,
                 "audit.squeeze_bound must be 0: squeezing takes coherent labels out of "
                 "the coherent family, so the audit uses passive measurements only", self.source)
        fmt = self.values["output"]["format"]
        _require(fmt in (None, "csv", "json"), "output.format must be csv or json", self.source)

    def resolved(self):
        """Plain dict of all settings after defaults, for embedding in outputs."""
        return copy.deepcopy(self.values)


def _number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _count(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def _positive(v):
    return _number(v) and v > 0


def _require(cond, message, source):
    if not cond:
        raise ConfigError(message, source=source)
