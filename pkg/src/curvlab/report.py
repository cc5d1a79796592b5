"""Machine-readable verification reports.

A report is a schema-versioned record of one experiment run: config echo,
one record per check (name, numbers, tolerance, rule, verdict), optional
profile tables for plotting, and an overall verdict. Verdicts are derived
solely from the recorded value, tolerance and rule, so they can be
re-derived from the JSON alone. Serialization sorts keys and keeps
timestamps in a single top-level field, which makes two runs with the
same config and seed byte-identical once that field is dropped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

SCHEMA_VERSION = 1

_RULES = {
    "abs_le": lambda value, tol: abs(value) <= tol,
    "le": lambda value, tol: value <= tol,
    "ge": lambda value, tol: value >= tol,
    "gt": lambda value, tol: value > tol,
    "is_true": lambda value, tol: bool(value),
    "is_false": lambda value, tol: not bool(value),
}


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def check_record(name: str, value, rule: str, tolerance: float = 0.0, **extra) -> dict:
    """Build one check record; the verdict follows from (value, rule, tolerance)."""
    if rule not in _RULES:
        raise ValueError(f"unknown verdict rule {rule!r}")
    record = {
        "name": name,
        "value": _plain(value),
        "rule": rule,
        "tolerance": tolerance,
        "verdict": "pass" if _RULES[rule](value, tolerance) else "fail",
    }
    for key, val in extra.items():
        record[key] = _plain(val)
    return record


def skipped_record(name: str, reason: str, **extra) -> dict:
    record = {"name": name, "verdict": "skipped", "reason": reason}
    for key, val in extra.items():
        record[key] = _plain(val)
    return record


@dataclass
class VerificationReport:
    experiment: str
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    profiles: dict = field(default_factory=dict)
    started: str = ""
    finished: str = ""

    def start(self):
        self.started = datetime.now(timezone.utc).isoformat()
        return self

    def finish(self):
        self.finished = datetime.now(timezone.utc).isoformat()
        return self

    def add(self, record: dict):
        self.checks.append(record)
        return record

    def add_profile(self, name: str, x, y, xlabel: str = "r", ylabel: str = "value"):
        self.profiles[name] = {
            "x": _plain(np.asarray(x)), "y": _plain(np.asarray(y)),
            "xlabel": xlabel, "ylabel": ylabel,
        }

    def extend(self, records):
        self.checks.extend(records)

    @property
    def overall_pass(self) -> bool:
        return all(c.get("verdict") == "pass" for c in self.checks)

    @property
    def any_skipped(self) -> bool:
        return any(c.get("verdict") == "skipped" for c in self.checks)

    def exit_status(self) -> int:
        return 0 if self.overall_pass else 1

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "timestamps": {"started": self.started, "finished": self.finished},
            "config": _plain(self.config),
            "checks": self.checks,
            "profiles": self.profiles,
            "overall_pass": self.overall_pass,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def summary_lines(self):
        for c in self.checks:
            verdict = c.get("verdict", "?").upper()
            value = c.get("value", c.get("reason", ""))
            if isinstance(value, float):
                value = f"{value:.6g}"
            yield f"[{verdict:>7}] {c['name']}: {value}"


def strip_timestamps(report_dict: dict) -> dict:
    out = dict(report_dict)
    out.pop("timestamps", None)
    return out


def write_profile_csv(path, profile: dict):
    """One row per profile point, fixed columns (xlabel, ylabel)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([profile.get("xlabel", "x"), profile.get("ylabel", "y")])
        for x, y in zip(profile["x"], profile["y"]):
            writer.writerow([repr(float(x)), repr(float(y))])


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
