"""Enumeration caps and runtime switches."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import ResourceCapError, UsageError


@dataclass(frozen=True)
class Caps:
    subgroup_order: int = 128
    embedding_order: int = 64
    hom_order: int = 128
    factor_degree: int = 12
    system_size: int = 4096
    fiber_materialize: int = 10**6

    def updated(self, overrides: dict) -> "Caps":
        known = {f.name for f in fields(self)}
        bad = set(overrides) - known
        if bad:
            raise UsageError(f"unknown caps: {sorted(bad)}")
        return replace(self, **{k: int(v) for k, v in overrides.items()})

    def check(self, name: str, requested: int) -> None:
        limit = getattr(self, name)
        if requested > limit:
            raise ResourceCapError(name, limit, requested)


_caps = Caps()


def get_caps() -> Caps:
    return _caps


def set_caps(caps: Caps) -> Caps:
    """Install ``caps`` globally and return the previous value."""
    global _caps
    old, _caps = _caps, caps
    return old


def jobs() -> int:
    """Worker count for internally parallel enumerations (``GALSYS_JOBS``)."""
    try:
        return max(1, int(os.environ.get("GALSYS_JOBS", "1")))
    except ValueError:
        return 1


_seed: int | None = None


def get_seed() -> int | None:
    """Seed for randomized factorization shifts; None means the fixed default sequence."""
    return _seed


def set_seed(seed: int | None) -> int | None:
    global _seed
    old, _seed = _seed, seed
    return old
