"""Parameter spaces, sampled parameter vectors, and seeded sampling.

Sampling uses one independent substream per (salt, seed, parameter name), so
adding or removing a parameter never perturbs the draws of the others, and a
fixed seed reproduces bit-identical vectors across machines and processes.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidParameterError, MissingParameterError, RangeError

SALT_ENV_VAR = "ARTIGEN_SEED_SALT"


@dataclass(frozen=True)
class Continuous:
    lo: float
    hi: float
    units: str = ""

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParameterError(f"continuous range needs lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, value) -> bool:
        return isinstance(value, (int, float)) and self.lo <= float(value) <= self.hi


@dataclass(frozen=True)
class Discrete:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise InvalidParameterError("discrete parameter needs at least 2 labels")
        if len(set(labels)) != len(labels):
            raise InvalidParameterError("discrete labels must be unique")
        object.__setattr__(self, "labels", labels)

    def contains(self, value) -> bool:
        return isinstance(value, int) and 0 <= value < len(self.labels)


@dataclass(frozen=True)
class Count:
    min: int
    max: int

    def __post_init__(self):
        if self.min > self.max:
            raise InvalidParameterError(f"count range needs min <= max, got [{self.min}, {self.max}]")

    def contains(self, value) -> bool:
        return isinstance(value, int) and self.min <= value <= self.max


Entry = Continuous | Discrete | Count


class ParameterSpace:
    """Ordered, named inventory of a generator's inputs."""

    def __init__(self, entries: Mapping[str, Entry] | list[tuple[str, Entry]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self.entries: dict[str, Entry] = {}
        for name, entry in items:
            self.add(name, entry)

    def add(self, name: str, entry: Entry) -> None:
        if name in self.entries:
            raise InvalidParameterError(f"duplicate parameter name {name!r}")
        if not isinstance(entry, (Continuous, Discrete, Count)):
            raise InvalidParameterError(f"unknown entry type for {name!r}: {entry!r}")
        self.entries[name] = entry

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __getitem__(self, name: str) -> Entry:
        return self.entries[name]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def continuous_names(self) -> list[str]:
        return [n for n, e in self.entries.items() if isinstance(e, Continuous)]

    @property
    def continuous_dims(self) -> int:
        return len(self.continuous_names)

    def label_index(self, name: str, label: str) -> int:
        entry = self.entries[name]
        if not isinstance(entry, Discrete):
            raise InvalidParameterError(f"{name!r} is not a discrete parameter")
        return entry.labels.index(label)

    def label_of(self, name: str, index: int) -> str:
        entry = self.entries[name]
        if not isinstance(entry, Discrete):
            raise InvalidParameterError(f"{name!r} is not a discrete parameter")
        return entry.labels[int(index)]

    def check_value(self, name: str, value) -> None:
        if name not in self.entries:
            raise MissingParameterError(f"unknown parameter {name!r}")
        if not self.entries[name].contains(value):
            raise RangeError(f"value {value!r} outside bounds of parameter {name!r}")

    def validate_vector(self, params: "ParamVector") -> None:
        for name in self.entries:
            if name not in params.values:
                raise MissingParameterError(f"parameter {name!r} missing from vector")
            self.check_value(name, params.values[name])

    def to_json_list(self) -> list:
        """Insertion-ordered entry list (arrays keep order under key sorting)."""
        out = []
        for name, e in self.entries.items():
            if isinstance(e, Continuous):
                out.append({"name": name, "kind": "continuous", "lo": e.lo, "hi": e.hi,
                            "units": e.units})
            elif isinstance(e, Discrete):
                out.append({"name": name, "kind": "discrete", "labels": list(e.labels)})
            else:
                out.append({"name": name, "kind": "count", "min": e.min, "max": e.max})
        return out

    @staticmethod
    def from_json_list(data) -> "ParameterSpace":
        space = ParameterSpace()
        allowed = {
            "continuous": {"name", "kind", "lo", "hi", "units"},
            "discrete": {"name", "kind", "labels"},
            "count": {"name", "kind", "min", "max"},
        }
        for spec in data:
            if not isinstance(spec, Mapping) or "name" not in spec:
                raise InvalidParameterError(f"bad parameter entry {spec!r}")
            name = spec["name"]
            kind = spec.get("kind")
            if kind not in allowed:
                raise InvalidParameterError(f"unknown parameter kind {kind!r} for {name!r}")
            extra = set(spec) - allowed[kind]
            if extra:
                raise InvalidParameterError(f"unknown keys {sorted(extra)} in parameter {name!r}")
            if kind == "continuous":
                space.add(name, Continuous(spec["lo"], spec["hi"], spec.get("units", "")))
            elif kind == "discrete":
                space.add(name, Discrete(tuple(spec["labels"])))
            else:
                space.add(name, Count(int(spec["min"]), int(spec["max"])))
        return space

    def __eq__(self, other):
        return isinstance(other, ParameterSpace) and list(self.entries.items()) == list(
            other.entries.items()
        )


@dataclass(frozen=True)
class ParamVector:
    """One sampled realization of a parameter space plus the seed that produced it."""

    values: Mapping[str, float | int]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, name: str):
        try:
            return self.values[name]
        except KeyError:
            raise MissingParameterError(f"parameter {name!r} missing from vector") from None

    def get(self, name: str, default=None):
        return self.values.get(name, default)

    def __contains__(self, name: str) -> bool:
        return name in self.values


def _substream(salt: str, seed: int, name: str) -> random.Random:
    digest = hashlib.sha256(f"{salt}|{seed}|{name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _sample_continuous(entry: Continuous, rng: random.Random, override) -> float:
    lo, hi = entry.lo, entry.hi
    if override:
        if "fixed" in override:
            return float(override["fixed"])
        lo = float(override.get("lo", lo))
        hi = float(override.get("hi", hi))
        if "mean" in override or "std" in override:
            mean = float(override.get("mean", 0.5 * (lo + hi)))
            std = float(override.get("std", (hi - lo) / 6.0))
            return min(hi, max(lo, rng.gauss(mean, std)))
    return rng.uniform(lo, hi)


def sample_parameters(
    space: ParameterSpace,
    seed: int,
    overrides: Mapping[str, Mapping] | None = None,
    salt: str | None = None,
) -> ParamVector:
    """Draw a ParamVector: uniform per entry, with per-name distribution overrides.

    Continuous overrides accept {"lo", "hi"}, {"fixed"}, or {"mean", "std"}
    (normal, clamped). Discrete/Count accept {"fixed"} or {"choices": [...]}.
    """
    if salt is None:
        salt = os.environ.get(SALT_ENV_VAR, "")
    overrides = overrides or {}
    for name in overrides:
        if name not in space:
            raise MissingParameterError(f"override references unknown parameter {name!r}")
    values: dict[str, float | int] = {}
    for name, entry in space.entries.items():
        rng = _substream(salt, seed, name)
        ov = overrides.get(name)
        if isinstance(entry, Continuous):
            values[name] = _sample_continuous(entry, rng, ov)
        elif isinstance(entry, Discrete):
            if ov and "fixed" in ov:
                values[name] = int(ov["fixed"])
            elif ov and "choices" in ov:
                values[name] = int(rng.choice(list(ov["choices"])))
            else:
                values[name] = rng.randrange(len(entry.labels))
        else:
            if ov and "fixed" in ov:
                values[name] = int(ov["fixed"])
            elif ov and "choices" in ov:
                values[name] = int(rng.choice(list(ov["choices"])))
            else:
                values[name] = rng.randint(entry.min, entry.max)
    return ParamVector(values, seed)


def load_overrides(path) -> dict:
    """Read a parameter-override file (JSON object keyed by parameter name)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise InvalidParameterError("override file must hold a JSON object")
    return data


def merge_overrides(space: ParameterSpace, overrides: Mapping | None) -> ParameterSpace:
    """The effective space after overrides merge by name: continuous bounds
    stretch to contain overridden ranges and fixed values."""
    if not overrides:
        return space
    merged = ParameterSpace()
    for name, entry in space.entries.items():
        ov = overrides.get(name)
        if ov and isinstance(entry, Continuous):
            lo, hi = entry.lo, entry.hi
            for key in ("lo", "hi", "fixed", "mean"):
                if key in ov:
                    lo = min(lo, float(ov[key]))
                    hi = max(hi, float(ov[key]))
            merged.add(name, Continuous(lo, hi, entry.units))
        else:
            merged.add(name, entry)
    return merged
