"""Experiment configuration: a flat, human-editable key-value format.

Grammar: one `key = value` per line; '#' starts a comment; lists are
comma-separated.  The format round-trips losslessly through
``ExperimentConfig.to_text`` / ``parse_config``, and the canonical text is
what gets hashed into run manifests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ExperimentConfig:
    pattern: str = "C3"
    n_values: list[int] = field(default_factory=lambda: [50])
    trials: int = 1
    seed: int = 0
    stop: str = "exhaustion"          # exhaustion | horizon | steps:<k>
    eps: Optional[str] = None         # rational literal, e.g. "0.1" or "1/10"
    mu: Optional[str] = None
    checkpoints: str = "auto"         # auto | off | comma list of steps
    monitors: bool = False
    cuv_samples: int = 0
    intersection_samples: int = 100
    slack: float = 3.0
    density_k: int = 0                # 0 disables the density scan
    density_mode: str = "exact"       # exact | heuristic
    density_budget: int = 0           # 0 = unlimited
    copy_patterns: list[str] = field(default_factory=list)
    traj_log: str = "off"             # off | checkpoints | full
    workers: int = 1

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_values:
            raise ValueError("need at least one n value")
        if self.stop not in ("exhaustion", "horizon") and not self.stop.startswith("steps:"):
            raise ValueError(f"bad stop rule {self.stop!r}")
        if self.stop.startswith("steps:"):
            body = self.stop[len("steps:"):]
            if not body.isdigit():
                raise ValueError(f"bad step count in stop rule {self.stop!r}")
        if self.density_mode not in ("exact", "heuristic"):
            raise ValueError(f"bad density mode {self.density_mode!r}")
        if self.traj_log not in ("off", "checkpoints", "full"):
            raise ValueError(f"bad traj_log {self.traj_log!r}")
        if self.checkpoints not in ("auto", "off"):
            for tok in self.checkpoints.split(","):
                if not tok.strip().isdigit():
                    raise ValueError(f"bad checkpoint list {self.checkpoints!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def checkpoint_list(self) -> Optional[list[int]]:
        if self.checkpoints == "auto":
            return None
        if self.checkpoints == "off":
            return []
        return sorted({int(tok.strip()) for tok in self.checkpoints.split(",")})

    def trial_seed(self, n_index: int, trial_index: int) -> int:
        """Deterministic per-trial stream: base + n-index offset + trial."""
        return self.seed + n_index * self.trials + trial_index

    def to_text(self) -> str:
        lines = [
            f"pattern = {self.pattern}",
            f"n = {', '.join(str(x) for x in self.n_values)}",
            f"trials = {self.trials}",
            f"seed = {self.seed}",
            f"stop = {self.stop}",
        ]
        if self.eps is not None:
            lines.append(f"eps = {self.eps}")
        if self.mu is not None:
            lines.append(f"mu = {self.mu}")
        lines += [
            f"checkpoints = {self.checkpoints}",
            f"monitors = {'on' if self.monitors else 'off'}",
            f"cuv_samples = {self.cuv_samples}",
            f"intersection_samples = {self.intersection_samples}",
            f"slack = {self.slack:.12g}",
            f"density_k = {self.density_k}",
            f"density_mode = {self.density_mode}",
            f"density_budget = {self.density_budget}",
            f"copy_patterns = {', '.join(self.copy_patterns) if self.copy_patterns else 'off'}",
            f"traj_log = {self.traj_log}",
            f"workers = {self.workers}",
        ]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key == "pattern":
            cfg.pattern = value
        elif key == "n":
            cfg.n_values = [int(tok.strip()) for tok in value.split(",")]
        elif key == "trials":
            cfg.trials = int(value)
        elif key == "seed":
            cfg.seed = int(value)
        elif key == "stop":
            cfg.stop = value
        elif key == "eps":
            cfg.eps = value
        elif key == "mu":
            cfg.mu = value
        elif key == "checkpoints":
            cfg.checkpoints = value.replace(" ", "") if value not in ("auto", "off") else value
        elif key == "monitors":
            cfg.monitors = _parse_bool(value, lineno)
        elif key == "cuv_samples":
            cfg.cuv_samples = int(value)
        elif key == "intersection_samples":
            cfg.intersection_samples = int(value)
        elif key == "slack":
            cfg.slack = float(value)
        elif key == "density_k":
            cfg.density_k = int(value)
        elif key == "density_mode":
            cfg.density_mode = value
        elif key == "density_budget":
            cfg.density_budget = int(value)
        elif key == "copy_patterns":
            cfg.copy_patterns = ([] if value == "off"
                                 else [tok.strip() for tok in value.split(",")])
        elif key == "traj_log":
            cfg.traj_log = value
        elif key == "workers":
            cfg.workers = int(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    cfg.validate()
    return cfg


def _parse_bool(value: str, lineno: int) -> bool:
    if value in ("on", "true", "1", "yes"):
        return True
    if value in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"line {lineno}: expected on/off, got {value!r}")
