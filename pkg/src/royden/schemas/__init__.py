"""Bundled JSON schemas for the CLI output payloads."""

from __future__ import annotations

import json
from importlib import resources


def schema_for(command: str) -> dict:
    """Load the output schema for a subcommand (or "error")."""
    ref = resources.files(__package__).joinpath(f"{command}.json")
    return json.loads(ref.read_text())


def available() -> tuple:
    out = []
    for entry in resources.files(__package__).iterdir():
        name = entry.name
        if name.endswith(".json"):
            out.append(name[:-5])
    return tuple(sorted(out))
