"""Keyboard layouts and cross-layout transfer of typo statistics.

Layouts are data, not code: JSON files listing physical keys with their
base and shift characters. Transfer maps confusion rows through the shared
physical key grid (same key, same layer), drops what has no image in the
target layout, and renormalizes. Edit-kind frequencies and the position
curve are layout-independent and pass through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .stats import TypoStats

BASE = "base"
SHIFT = "shift"


class KeyboardError(ValueError):
    """Raised for malformed layouts or degenerate transfers."""


@dataclass
class KeyboardLayout:
    name: str
    # key_id -> (base char or None, shift char or None)
    keys: Dict[str, Tuple[Optional[str], Optional[str]]]

    def __post_init__(self):
        self._by_char: Dict[str, Tuple[str, str]] = {}
        for key_id, (base, shift) in self.keys.items():
            for layer, ch in ((BASE, base), (SHIFT, shift)):
                if ch is not None and ch not in self._by_char:
                    self._by_char[ch] = (key_id, layer)

    def find(self, ch: str) -> Optional[Tuple[str, str]]:
        """(key_id, layer) producing ``ch``, or None. Base layer wins when
        a character appears on both layers of different keys."""
        return self._by_char.get(ch)

    def char_at(self, key_id: str, layer: str) -> Optional[str]:
        entry = self.keys.get(key_id)
        if entry is None:
            return None
        return entry[0] if layer == BASE else entry[1]


def layout_from_dict(doc: dict) -> KeyboardLayout:
    try:
        name = doc["name"]
        raw_keys = doc["keys"]
    except (KeyError, TypeError) as exc:
        raise KeyboardError(f"malformed layout document: {exc}") from exc
    if not isinstance(name, str) or not name:
        raise KeyboardError("layout name must be a non-empty string")
    keys: Dict[str, Tuple[Optional[str], Optional[str]]] = {}
    for entry in raw_keys:
        key_id = entry.get("key_id")
        if not key_id or key_id in keys:
            raise KeyboardError(f"missing or duplicate key_id {key_id!r}")
        base = entry.get("base")
        shift = entry.get("shift")
        for ch in (base, shift):
            if ch is not None and len(ch) != 1:
                raise KeyboardError(
                    f"key {key_id}: characters must be single codepoints, "
                    f"got {ch!r}")
        keys[key_id] = (base, shift)
    return KeyboardLayout(name=name, keys=keys)


def load_layout(path) -> KeyboardLayout:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise KeyboardError(
                f"layout file is not valid JSON: {exc}") from exc
    return layout_from_dict(doc)


def map_char(ch: str, source: KeyboardLayout,
             target: KeyboardLayout) -> Optional[str]:
    """Character on the same physical key and layer in the target layout,
    or None if the key or layer has no character there."""
    found = source.find(ch)
    if found is None:
        return None
    key_id, layer = found
    return target.char_at(key_id, layer)


def transfer_stats(stats: TypoStats, source: KeyboardLayout,
                   target: KeyboardLayout, return_report: bool = False):
    """Re-key confusion rows from one layout to another.

    Rows or entries whose characters have no image in the target are
    dropped and the affected rows renormalized; losing more than half of
    the total confusion mass is an error. type_freq and position_cdf are
    layout-independent and are passed through unchanged.
    """
    total_mass = float(len(stats.confusion))
    dropped_mass = 0.0
    dropped_rows: List[str] = []
    dropped_entries: List[Tuple[str, str]] = []
    mapped: Dict[str, Dict[str, float]] = {}
    for old, row in sorted(stats.confusion.items()):
        new_old = map_char(old, source, target)
        if new_old is None:
            dropped_mass += 1.0
            dropped_rows.append(old)
            continue
        out_row = mapped.setdefault(new_old, {})
        for ch, p in sorted(row.items()):
            new_ch = map_char(ch, source, target)
            if new_ch is None or new_ch == new_old:
                dropped_mass += p
                dropped_entries.append((old, ch))
                continue
            out_row[new_ch] = out_row.get(new_ch, 0.0) + p
    empty = [k for k, row in mapped.items() if not row]
    for k in empty:
        del mapped[k]
        dropped_rows.append(k)
    dropped_fraction = dropped_mass / total_mass if total_mass else 0.0
    if total_mass and dropped_fraction > 0.5:
        raise KeyboardError(
            f"transfer {source.name} -> {target.name} would drop "
            f"{dropped_fraction:.0%} of confusion mass")
    confusion = {}
    for old, row in sorted(mapped.items()):
        row_sum = sum(row.values())
        confusion[old] = {ch: p / row_sum for ch, p in sorted(row.items())}
    out = TypoStats(type_freq=dict(stats.type_freq), confusion=confusion,
                    position_cdf=stats.position_cdf.copy(),
                    sample_count=stats.sample_count)
    out.validate()
    if return_report:
        report = {
            "source": source.name,
            "target": target.name,
            "dropped_mass_fraction": dropped_fraction,
            "dropped_rows": sorted(dropped_rows),
            "dropped_entries": sorted(dropped_entries),
        }
        return out, report
    return out
