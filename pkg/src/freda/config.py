"""Pipeline configuration: one TOML file of flat keys, overridden by CLI flags."""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class FredaConfig:
    corpus_path: Optional[str] = None
    schema_path: Optional[str] = None
    kb_pairs_dir: Optional[str] = None
    event_log_path: Optional[str] = None
    export_dir: Optional[str] = None
    split_ratio: float = 0.1
    split_seed: int = 0
    lease_minutes: float = 10.0


def load_config(path=None) -> FredaConfig:
    if path is None:
        return FredaConfig()
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = {f.name for f in fields(FredaConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return FredaConfig(**raw)
