"""Paths to data files shipped with the package."""

from importlib import resources
from pathlib import Path


def sample_catalog_path() -> Path:
    return Path(resources.files("whysched").joinpath("data/sample_catalog.json"))


def prompt_path(name: str) -> Path:
    return Path(resources.files("whysched").joinpath(f"prompts/{name}"))
