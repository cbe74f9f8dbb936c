"""Run configuration: flat key/value text with one section per concern.

All rationals are exact strings like "1/4"; nothing is ever parsed as a
float.  Invalid values raise ConfigError, which the CLI maps to exit
code 2.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional


class ConfigError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not an exact rational: {text!r} ({e})")
    return f


def parse_rational_list(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_rational(t) for t in text.split(","))


def parse_int_list(text: str):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as e:
        raise ConfigError(f"not an integer list: {text!r} ({e})")


@dataclass
class RunConfig:
    command: str = "selftest"
    seed: int = 0
    workers: int = 1
    budget: int = 10**7
    out: Optional[str] = None
    fmt: str = "json"
    p: int = 3
    k: int = 1
    q: int = 3
    max_rank: int = 2
    sections: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        read = cp.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path!r}")
        cfg = cls()
        if cp.has_section("run"):
            run = cp["run"]
            cfg.command = run.get("command", cfg.command)
            cfg.seed = _get_int(run, "seed", cfg.seed)
            cfg.workers = _get_int(run, "workers", cfg.workers)
            cfg.budget = _get_int(run, "budget", cfg.budget)
            cfg.out = run.get("out", cfg.out)
            cfg.fmt = run.get("format", cfg.fmt)
        if cp.has_section("field"):
            fld = cp["field"]
            cfg.p = _get_int(fld, "p", cfg.p)
            cfg.k = _get_int(fld, "k", cfg.k)
            cfg.q = cfg.p**cfg.k
        for name in cp.sections():
            if name in ("run", "field"):
                continue
            cfg.sections[name] = dict(cp[name])
        cfg.validate()
        return cfg

    def validate(self):
        if self.fmt not in ("json", "md"):
            raise ConfigError(f"format must be json or md, got {self.fmt!r}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.p % 2 == 0 or self.p < 3:
            raise ConfigError("the characteristic must be an odd prime")
        # rationals anywhere in free sections must parse exactly
        for name, sec in self.sections.items():
            for key, val in sec.items():
                if key in ("witt", "aniso", "coords", "coords2", "witt2", "aniso2"):
                    parse_rational_list(val)


def _get_int(section, key, default):
    if key not in section:
        return default
    try:
        return int(section[key])
    except ValueError as e:
        raise ConfigError(f"key {key!r}: {e}")
