"""Run configuration: a flat JSON-serializable dataclass, validated before any solve."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import InvalidConfig, IoFailure
from .radial import MIN_INTERVALS

MODES = ("radial", "planar", "sweep-t", "geodesic", "mt-scan", "bounds", "lambda1", "uniqueness")
OUTPUT_ENV = "RICCI_MA_OUT"
DEFAULT_GRID = {"radial": 4096, "sweep-t": 4096, "uniqueness": 4096, "mt-scan": 4096,
                "geodesic": 2048, "planar": 64, "lambda1": 64}


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


@dataclass
class RunConfig:
    mode: str
    n: int = 1
    R: Optional[float] = None  # None: the exact-solution radius 1/sqrt(2n+1)
    domain: Optional[dict] = None
    gridSize: Optional[int] = None  # radial nodes, or planar nodes per radius/half-side
    tol: float = 1e-10
    maxIter: int = 500
    t: float = 1.0
    tGrid: Optional[list] = None
    phi0: str = "zero"
    outputDir: Optional[str] = None
    threadCount: int = 1
    # geodesic
    source: Optional[str] = None
    target: Optional[str] = None
    samples: int = 16
    # mt-scan
    family: list = field(default_factory=lambda: ["unif", "star"])
    beta: Optional[float] = None
    sMax: float = 8.0
    familySize: int = 33
    # lambda1
    solution: Optional[str] = None
    # uniqueness
    starts: list = field(default_factory=lambda: ["zero", "paraboloid", "paraboloid:3"])
    plots: bool = True

    @property
    def grid(self) -> int:
        return self.gridSize if self.gridSize is not None else DEFAULT_GRID.get(self.mode, 4096)

    @property
    def out(self) -> Path:
        return Path(self.outputDir) if self.outputDir else default_output_root() / self.mode

    def problems(self) -> list[str]:
        p = []
        if self.mode not in MODES:
            return [f"mode: unknown {self.mode!r}, expected one of {', '.join(MODES)}"]
        if not isinstance(self.n, int) or self.n < 1:
            p.append(f"n: must be a positive integer, got {self.n!r}")
        if self.R is not None and not self.R > 0:
            p.append(f"R: must be positive, got {self.R!r}")
        if self.gridSize is not None and self.gridSize < MIN_INTERVALS + 1:
            p.append(f"gridSize: {self.gridSize} is below the minimum of {MIN_INTERVALS + 1} nodes")
        for name in ("tol", "maxIter", "threadCount", "samples", "sMax", "familySize"):
            if not getattr(self, name) > 0:
                p.append(f"{name}: must be positive, got {getattr(self, name)!r}")
        if not self.t > 0:
            p.append(f"t: must be positive, got {self.t!r}")
        if self.mode == "sweep-t":
            if not self.tGrid:
                p.append("tGrid: required for mode sweep-t")
            elif any(not x > 0 for x in self.tGrid) or any(b <= a for a, b in zip(self.tGrid, self.tGrid[1:])):
                p.append("tGrid: must be positive and strictly increasing")
        if self.mode == "planar" and not self.domain:
            p.append("domain: required for mode planar")
        if self.mode == "lambda1" and not self.domain:
            p.append("domain: required for mode lambda1")
        if self.mode == "geodesic":
            for name in ("source", "target"):
                if not getattr(self, name):
                    p.append(f"{name}: required for mode geodesic")
        if self.mode == "geodesic" and self.samples < 4:
            p.append("samples: concavity check needs at least 4 segments")
        if self.mode == "uniqueness" and len(self.starts) < 2:
            p.append("starts: need at least two initial data")
        if self.mode == "uniqueness" and self.R is not None and not self.R < 1:
            p.append("R: uniqueness regime requires R < 1")
        if self.beta is not None and not 0 < self.beta < 1:
            p.append(f"beta: must lie in (0, 1), got {self.beta!r}")
        if self.mode == "mt-scan" and not set(self.family) <= {"unif", "star"}:
            p.append("family: members must be 'unif' or 'star'")
        if self.mode in ("radial", "sweep-t") and self.phi0 not in ("zero", "paraboloid") \
                and not Path(self.phi0).is_file():
            p.append(f"phi0: {self.phi0!r} is neither zero, paraboloid nor an existing file")
        return p

    def validate(self) -> "RunConfig":
        p = self.problems()
        if p:
            raise InvalidConfig(p)
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise InvalidConfig([f"{k}: unknown field" for k in extra])
        if "mode" not in d:
            raise InvalidConfig(["mode: required"])
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise IoFailure(f"cannot read config {path}: {exc}") from exc
