"""Run configuration and seeded random streams."""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 0xC0FFEE
COMMANDS = ("constants", "minimize", "verify-extremal", "oracle3d", "identity-check", "sweep", "accept")
FORMATS = ("json", "csv", "text")


class UsageError(ValueError):
    """Bad command, flag value or range."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int = 3
    nu: int = 1
    K_max: int = 30
    tol: float = 1e-6
    seed: int = DEFAULT_SEED
    grid_n: int = 48
    box_L: float = 7.0
    lam: float = 1.0
    output_format: str = "json"
    output_path: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.N < 3:
            raise UsageError("--N must be >= 3")
        if self.nu < 1:
            raise UsageError("--nu must be >= 1")
        if not 2 <= self.K_max <= 64:
            raise UsageError("--K-max must lie in [2, 64]")
        if self.grid_n < 2:
            raise UsageError("--grid-n must be >= 2")
        if not (self.box_L > 0 and self.lam > 0):
            raise UsageError("--box-L and --lambda must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must fit in 64 unsigned bits")
        return self


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named consumer.

    The stream is keyed by (seed, crc32(name)) through SeedSequence, so a
    consumer's draws do not depend on which other consumers ran first.
    """
    key = zlib.crc32(name.encode())
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))
