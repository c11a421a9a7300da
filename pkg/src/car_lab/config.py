"""Run configuration: window sizes, tolerances, seeds, sector caps.

A single config object is threaded through the verification suites and the
CLI.  Values can be overridden from a JSON or TOML file (``CAR_LAB_CONFIG``
environment variable or ``--config`` flag).
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class LabConfig:
    # default symmetric mode window [-n_max, n_max]
    n_max: int = 8
    # occupation-space window for Fock computations (dimension 2^(2n+1))
    fock_n_max: int = 6
    # algebraic identities (matrix equalities, exact cancellations)
    tol_algebraic: float = 1e-12
    # quadrature / cross-route comparisons
    tol_quadrature: float = 1e-10
    # window-independence contract: scalars move less than this under n_max+4
    tol_window: float = 1e-8
    # coefficient tail cutoff for exponential series composition
    series_tol: float = 1e-14
    # singular values below this count as zero in rank decisions
    rank_threshold: float = 1e-7
    # smallest admissible nonzero singular value (gap requirement)
    rank_gap: float = 1e-3
    # quadrature grid sizes (powers of two; exact for band-limited integrands)
    grid_schwinger: int = 512
    grid_winding: int = 1024
    # cap on charge-sector dimension for dense matrix exponentials
    sector_cap: int = 1 << 16
    seed: int = 20230613

    def replace(self, **kwargs) -> "LabConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path: str | None = None) -> LabConfig:
    """Load a config file (JSON or TOML), falling back to defaults.

    When ``path`` is None the ``CAR_LAB_CONFIG`` environment variable is
    consulted; if that is also unset, defaults are returned.  Unknown keys
    are rejected so typos fail loudly.
    """
    if path is None:
        path = os.environ.get("CAR_LAB_CONFIG")
    if not path:
        return LabConfig()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError as exc:  # tomllib is stdlib only from 3.11
            raise CarLabConfigError(
                "TOML config requires Python >= 3.11; use JSON instead"
            ) from exc
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    known = {f.name for f in dataclasses.fields(LabConfig)}
    unknown = set(raw) - known
    if unknown:
        raise CarLabConfigError(f"unknown config keys: {sorted(unknown)}")
    return LabConfig(**raw)


class CarLabConfigError(ValueError):
    pass
