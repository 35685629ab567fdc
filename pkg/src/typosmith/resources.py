"""Paths to data files bundled with the package."""

from importlib import resources
from pathlib import Path


def _data_root() -> Path:
    return Path(resources.files("typosmith")) / "data"


def default_stats_path() -> Path:
    return _data_root() / "stats" / "english-default.json"


def layout_path(name: str) -> Path:
    """Path of a bundled keyboard layout (e.g. "qwerty-us", "russian")."""
    return _data_root() / "layouts" / f"{name}.json"


def wordlist_path(name: str = "pseudo-english-10k") -> Path:
    return _data_root() / "wordlists" / f"{name}.txt"


def load_wordlist(name: str = "pseudo-english-10k") -> list:
    return wordlist_path(name).read_text(encoding="utf-8").split()
