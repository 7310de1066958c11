"""INI-style run configuration with a fixed schema.

Sections and keys are listed in :data:`SCHEMA`.  Unknown sections or keys are
rejected with their line number; missing required keys are reported as
``section.key``.  Every value read (explicit or defaulted) is recorded so the
resolved configuration can be echoed into output headers.
"""

from __future__ import annotations

import configparser
import re
from pathlib import Path

from .errors import ConfigError

FLOAT, INT, STR, FLOATS, STRS = "float", "int", "str", "floats", "strs"

SCHEMA: dict[str, dict[str, str]] = {
    "medium": {"c": FLOAT, "alpha0": FLOAT, "y": FLOAT},
    "grid": {"n": INT, "h": FLOAT, "boundary": STR},
    "model": {"kind": STR, "eta": FLOAT, "variant": STR, "gamma": FLOAT, "spatial_path": STR},
    "pulse": {"f0": FLOAT, "bandwidth": FLOAT, "amplitude": FLOAT, "kind": STR},
    "experiment": {
        # dispersion
        "omega_min": FLOAT, "omega_max": FLOAT, "n_omega": INT,
        # simulate (wave models)
        "source": STR, "source_x": FLOAT, "width": FLOAT, "probes": FLOATS, "duration": FLOAT,
        "dt": FLOAT, "kcut": FLOAT,
        # simulate (Burgers)
        "t_end": FLOAT, "snapshots": INT, "initial": STR, "background": FLOAT, "amplitude": FLOAT,
        "mode": INT,
        # attenuate / sweep
        "x_source": FLOAT, "x1": FLOAT, "x2": FLOAT, "snr_gate": FLOAT, "window_sigmas": FLOAT,
        "taper": FLOAT, "band_min": FLOAT, "band_max": FLOAT, "kcut_factor": FLOAT,
        "models": STRS, "ys": FLOATS, "alpha0s": FLOATS,
        # operators
        "power": FLOAT,
    },
    "output": {"prefix": STR},
}

_REQUIRED = object()


def _convert(kind: str, raw: str, where: str):
    try:
        if kind == FLOAT:
            return float(raw)
        if kind == INT:
            return int(raw)
        if kind == STR:
            return raw.strip()
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        return [float(p) for p in parts] if kind == FLOATS else parts
    except ValueError:
        raise ConfigError(f"{where}: cannot read {raw!r} as {kind}") from None


def _line_numbers(text: str) -> dict[tuple[str, str | None], int]:
    """Line number of each section header and key, for error messages."""
    where: dict[tuple[str, str | None], int] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            where.setdefault((section, None), lineno)
            continue
        m = re.match(r"([^=:]+?)\s*[=:]", s)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip().lower()), lineno)
    return where


class RunConfig:
    """Parsed configuration plus the record of every value the run resolved."""

    def __init__(self, values: dict[str, dict[str, object]], source: str = "<string>"):
        self.values = values
        self.source = source
        self.resolved: dict[tuple[str, str], object] = {}

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None, strict=True,
                                           comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        lines = _line_numbers(text)
        values: dict[str, dict[str, object]] = {}
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"{source}:{lines.get((section, None), '?')}: unknown section [{section}]")
            values[section] = {}
            for key, raw in parser.items(section):
                if key not in SCHEMA[section]:
                    line = lines.get((section, key), "?")
                    raise ConfigError(f"{source}:{line}: unknown key {section}.{key}")
                values[section][key] = _convert(SCHEMA[section][key], raw, f"{source}:{lines.get((section, key), '?')}: {section}.{key}")
        return cls(values, source)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_text(text, str(path))

    def has(self, dotted: str) -> bool:
        section, key = dotted.split(".")
        return key in self.values.get(section, {})

    def get(self, dotted: str, default=_REQUIRED):
        section, key = dotted.split(".")
        if key not in SCHEMA.get(section, {}):
            raise KeyError(dotted)
        if key in self.values.get(section, {}):
            value = self.values[section][key]
        elif default is _REQUIRED:
            raise ConfigError(f"{self.source}: missing required key {dotted}")
        else:
            value = default
        self.resolved[(section, key)] = value
        return value

    def echo(self) -> list[tuple[str, str]]:
        """Resolved values as ``(section.key, text)`` in schema order, then anything set but unused."""
        out = []
        seen = set()
        for section, keys in SCHEMA.items():
            for key in keys:
                if (section, key) in self.resolved:
                    out.append((f"{section}.{key}", _text(self.resolved[(section, key)])))
                    seen.add((section, key))
        for section, keys in SCHEMA.items():
            for key in keys:
                if key in self.values.get(section, {}) and (section, key) not in seen:
                    out.append((f"{section}.{key}", _text(self.values[section][key])))
        return out


def _text(value) -> str:
    from .csvio import fmt

    if value is None:
        return "none"
    if isinstance(value, list):
        return ",".join(fmt(v) for v in value)
    return fmt(value)
