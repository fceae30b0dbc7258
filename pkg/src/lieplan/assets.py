"""Location of the bundled robot and path files."""

from __future__ import annotations

import os
from pathlib import Path

DATA_ENV = "SLITHERS_DATA_DIR"

ROBOTS = ("ur5e_husky", "ur5e_xdrive")
PATHS = ("vertical_helix", "sine_wave", "horizontal_helix")


def data_dir() -> Path:
    """Bundled asset directory, overridable through ``$SLITHERS_DATA_DIR``."""
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def resolve(name: str, kind: str) -> Path:
    """Resolve a robot/path argument: an existing file, or a bundled stem."""
    p = Path(name)
    if p.exists():
        return p
    sub = data_dir() / kind / (name if name.endswith(".json") else name + ".json")
    if sub.exists():
        return sub
    return p
