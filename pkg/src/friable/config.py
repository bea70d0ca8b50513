"""Run configuration: built-in defaults < environment < JSON file < flags."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from friable.errors import ArgumentError

TABLE_LIMIT_ENV = "FRIABLE_TABLE_LIMIT"
DEFAULT_TABLE_LIMIT = 50_000_000
FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class DeBruijnCorridor:
    """Empirical envelope for log Psi / Z on a fixed grid.

    de Bruijn's estimate carries an unspecified O-constant, so these bounds
    are an engineering envelope rather than a theorem.
    """

    lo: float = 0.3
    hi: float = 3.0
    grid_x: tuple[int, ...] = (10**3, 10**4, 10**5, 10**6, 10**7)
    grid_y: tuple[int, ...] = (5, 11, 31, 101, 1009)

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ArgumentError(f"corridor needs 0 < lo < hi, got [{self.lo}, {self.hi}]")

    def points(self):
        return [(x, y) for x in self.grid_x for y in self.grid_y if y <= x]

    def contains(self, ratio: float) -> bool:
        return self.lo <= ratio <= self.hi


@dataclass(frozen=True)
class RunConfig:
    table_limit: int = DEFAULT_TABLE_LIMIT
    threshold: str | None = None
    format: str = "json"
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    max_nodes: int = 1_000_000
    max_set_size: int | None = None
    max_certificates: int | None = None
    enumeration_budget: int = 2_000_000
    corridor_lo: float = 0.3
    corridor_hi: float = 3.0

    def __post_init__(self):
        if self.table_limit < 1:
            raise ArgumentError("table_limit must be positive")
        if self.format not in FORMATS:
            raise ArgumentError(f"format must be one of {FORMATS}")
        if self.threads < 1 or self.max_nodes < 1 or self.enumeration_budget < 1:
            raise ArgumentError("threads, max_nodes and enumeration_budget must be positive")
        if not self.corridor_lo < self.corridor_hi:
            raise ArgumentError("corridor lower bound must be below the upper bound")

    @property
    def corridor(self) -> DeBruijnCorridor:
        return DeBruijnCorridor(self.corridor_lo, self.corridor_hi)

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: dict | None = None,
             environ: dict | None = None) -> "RunConfig":
        environ = os.environ if environ is None else environ
        values: dict = {}
        if environ.get(TABLE_LIMIT_ENV):
            try:
                values["table_limit"] = int(environ[TABLE_LIMIT_ENV])
            except ValueError as exc:
                raise ArgumentError(f"{TABLE_LIMIT_ENV} must be an integer") from exc
        if path is not None:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ArgumentError(f"cannot read config {path}: {exc}") from exc
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ArgumentError(f"unknown config keys: {sorted(unknown)}")
            values.update(data)
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return replace(cls(), **values)
