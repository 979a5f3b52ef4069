"""Access to the data files shipped with the package (fixtures, band table)."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

_FIXTURES = (
    "ariane.jsonl",
    "checklist_all_true.json",
    "checklist_env_change.json",
    "modular_two_state.json",
    "nhpp_growth.json",
    "sil_bands_default.json",
    "superposition_weibull500.json",
    "therac_1985.jsonl",
    "therac_1987.jsonl",
)


def fixture_path(name: str) -> Path:
    """Filesystem path of a shipped data file."""
    if name not in _FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {sorted(_FIXTURES)}")
    return Path(str(resources.files("provenuse").joinpath("data", name)))


def fixture_names() -> tuple[str, ...]:
    return _FIXTURES
