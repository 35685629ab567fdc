"""
Transferring error statistics across keyboard layouts
=====================================================

English confusion rows come from which keys sit next to each other.
Fingers behave the same on a Russian keyboard, so re-keying the rows by
physical key position gives a Russian error model with no Russian data.
"""

from typosmith.keyboard import load_layout, map_char, transfer_stats
from typosmith.resources import default_stats_path, layout_path
from typosmith.stats import load_stats

stats = load_stats(default_stats_path())
qwerty = load_layout(layout_path("qwerty-us"))
russian = load_layout(layout_path("russian"))

print("physical-key correspondence (same key, different engraving):")
for ch in "qwes":
    print(f"  {ch} -> {map_char(ch, qwerty, russian)}")

russian_stats, report = transfer_stats(stats, qwerty, russian,
                                       return_report=True)
print(f"\ndropped confusion mass: {report['dropped_mass_fraction']:.2%}")

row = "s"
mapped = map_char(row, qwerty, russian)
print(f"\nconfusion row {row!r} (QWERTY neighbours):")
for ch, p in sorted(stats.confusion[row].items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {ch}  {p:.3f}")
print(f"same row re-keyed as {mapped!r}:")
for ch, p in sorted(russian_stats.confusion[mapped].items(),
                    key=lambda kv: -kv[1])[:5]:
    print(f"  {ch}  {p:.3f}")

# the transfer is invertible when every key maps both ways
back = transfer_stats(russian_stats, russian, qwerty)
drift = max(abs(back.confusion[r][c] - p)
            for r, row_ in stats.confusion.items()
            for c, p in row_.items())
print(f"\nround-trip drift QWERTY -> Russian -> QWERTY: {drift:.2e}")

# Setswana reuses the Latin block unchanged, so the transfer is identity
setswana = load_layout(layout_path("setswana"))
same = transfer_stats(stats, qwerty, setswana)
drift = max(abs(same.confusion[r][c] - p)
            for r, row_ in stats.confusion.items()
            for c, p in row_.items())
print(f"Setswana transfer drift (identity on Latin letters): {drift:.2e}")
