"""Gazetteer construction from a typed-entity dump.

The statistical builder scores every source type against every fine label by
how much of the reference corpus' gold entities it covers, then donates the
type's surfaces to the top-k labels. A manual one-to-one mapping is kept as
the baseline it is measured against.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import taxonomy
from .corpus import Sentence, extract_entities

log = logging.getLogger(__name__)

Surface = tuple[str, ...]


@dataclass(frozen=True)
class TypeRecord:
    surface: Surface      # lowercased tokens
    source_type: str      # opaque source-ontology type id


@dataclass
class Gazetteer:
    """Fine label index -> set of lowercased surface token sequences."""

    buckets: dict[int, set[Surface]] = field(default_factory=dict)

    def add(self, label: int | str, surface: Surface) -> None:
        if not surface:
            raise ValueError("empty surface")
        fine = taxonomy.resolve_fine(label)
        norm = tuple(t.lower() for t in surface)
        self.buckets.setdefault(fine, set()).add(norm)

    def surfaces(self, label: int | str) -> set[Surface]:
        return self.buckets.get(taxonomy.resolve_fine(label), set())

    def sorted_surfaces(self, label: int | str) -> list[Surface]:
        """Bucket contents in a stable order, for seeded draws."""
        return sorted(self.surfaces(label))

    def has(self, surface: Surface, label: int | str) -> bool:
        norm = tuple(t.lower() for t in surface)
        return norm in self.buckets.get(taxonomy.resolve_fine(label), ())

    def labels_of(self, surface: Surface) -> set[int]:
        norm = tuple(t.lower() for t in surface)
        return {fine for fine, surfs in self.buckets.items() if norm in surfs}

    def items(self):
        for fine in sorted(self.buckets):
            for surface in sorted(self.buckets[fine]):
                yield fine, surface

    @property
    def n_entries(self) -> int:
        return sum(len(s) for s in self.buckets.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gazetteer):
            return NotImplemented
        mine = {k: v for k, v in self.buckets.items() if v}
        theirs = {k: v for k, v in other.buckets.items() if v}
        return mine == theirs


@dataclass
class CoverageReport:
    per_type_label: dict[tuple[str, int], float]
    per_label_rate: dict[int, float]
    overall_rate: float
    label_agnostic_rate: float
    total_entries: int
    total_gold_entities: int

    def to_json(self) -> str:
        per_type = {}
        for (source_type, fine), frac in sorted(self.per_type_label.items()):
            per_type.setdefault(source_type, {})[taxonomy.FINE_LABELS[fine]] = frac
        payload = {
            "per_type_label": per_type,
            "per_label_rate": {
                taxonomy.FINE_LABELS[f]: r for f, r in sorted(self.per_label_rate.items())
            },
            "overall_rate": self.overall_rate,
            "label_agnostic_rate": self.label_agnostic_rate,
            "total_entries": self.total_entries,
            "total_gold_entities": self.total_gold_entities,
        }
        return json.dumps(payload, indent=2)


def _gold_surfaces_by_label(reference: list[Sentence]) -> dict[int, list[Surface]]:
    """Gold entity occurrences per fine label, surfaces lowercased."""
    out: dict[int, list[Surface]] = {}
    for s in reference:
        for e in extract_entities(s):
            surface = tuple(t.lower() for t in s.tokens[e.start : e.end + 1])
            out.setdefault(e.fine_label, []).append(surface)
    return out


def _surfaces_by_type(records: list[TypeRecord]) -> dict[str, set[Surface]]:
    out: dict[str, set[Surface]] = {}
    for r in records:
        if not r.surface:
            raise ValueError("record with empty surface")
        out.setdefault(r.source_type, set()).add(tuple(t.lower() for t in r.surface))
    return out


def type_label_coverage(
    records: list[TypeRecord], reference: list[Sentence]
) -> dict[tuple[str, int], float]:
    """Fraction of gold occurrences of each label covered by each source type.

    Labels with zero gold occurrences get coverage 0 (and a log note).
    """
    gold = _gold_surfaces_by_label(reference)
    empty_labels = [f for f in range(taxonomy.N_FINE) if not gold.get(f)]
    if empty_labels and records:
        log.debug(
            "%d labels have no gold entities in the reference; coverage set to 0",
            len(empty_labels),
        )
    coverage: dict[tuple[str, int], float] = {}
    for source_type, surfaces in sorted(_surfaces_by_type(records).items()):
        for fine in range(taxonomy.N_FINE):
            occurrences = gold.get(fine, [])
            if not occurrences:
                coverage[(source_type, fine)] = 0.0
                continue
            hit = sum(1 for surf in occurrences if surf in surfaces)
            coverage[(source_type, fine)] = hit / len(occurrences)
    return coverage


def build_statistical(
    records: list[TypeRecord], reference: list[Sentence], k: int = 2
) -> Gazetteer:
    """Donate each source type's surfaces to its k best-covered labels.

    Ties break toward the lower label index; all-zero coverage rows
    contribute nothing.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not reference:
        raise ValueError("empty reference corpus: coverage is undefined")
    coverage = type_label_coverage(records, reference)
    g = Gazetteer()
    for source_type, surfaces in sorted(_surfaces_by_type(records).items()):
        row = np.array([coverage[(source_type, f)] for f in range(taxonomy.N_FINE)])
        # stable argsort of -row keeps ties in ascending label-index order
        order = np.argsort(-row, kind="stable")
        for fine in order[:k]:
            if row[fine] <= 0.0:
                break
            for surface in surfaces:
                g.add(int(fine), surface)
    return g


def build_one_to_one(
    records: list[TypeRecord], mapping: dict[str, int | str]
) -> Gazetteer:
    """Each mapped type's surfaces go to exactly one label; unmapped types drop."""
    resolved = {t: taxonomy.resolve_fine(lbl) for t, lbl in mapping.items()}
    g = Gazetteer()
    for source_type, surfaces in sorted(_surfaces_by_type(records).items()):
        fine = resolved.get(source_type)
        if fine is None:
            continue
        for surface in surfaces:
            g.add(fine, surface)
    return g


def argmax_mapping(
    records: list[TypeRecord], reference: list[Sentence]
) -> dict[str, int]:
    """One-to-one mapping sending each type to its best-covered label.

    Types with all-zero coverage are left out, mirroring the statistical
    builder's treatment.
    """
    coverage = type_label_coverage(records, reference)
    mapping: dict[str, int] = {}
    for source_type in sorted(_surfaces_by_type(records)):
        row = np.array([coverage[(source_type, f)] for f in range(taxonomy.N_FINE)])
        best = int(np.argmax(row))  # argmax takes the lowest index on ties
        if row[best] > 0.0:
            mapping[source_type] = best
    return mapping


def coverage_rate(
    g: Gazetteer, reference: list[Sentence], require_label: bool = True
) -> float:
    """Fraction of gold entity occurrences found in the gazetteer.

    With ``require_label`` the surface must sit in the bucket of its gold
    label (the primary metric); without it, any bucket counts.
    """
    if not reference:
        raise ValueError("empty reference corpus")
    total = 0
    hit = 0
    for s in reference:
        for e in extract_entities(s):
            total += 1
            surface = tuple(t.lower() for t in s.tokens[e.start : e.end + 1])
            if require_label:
                hit += surface in g.buckets.get(e.fine_label, ())
            else:
                hit += any(surface in surfs for surfs in g.buckets.values())
    if total == 0:
        raise ValueError("reference corpus contains no entities")
    return hit / total


def make_coverage_report(
    g: Gazetteer, reference: list[Sentence], records: list[TypeRecord] | None = None
) -> CoverageReport:
    gold = _gold_surfaces_by_label(reference)
    per_label: dict[int, float] = {}
    for fine, occurrences in sorted(gold.items()):
        bucket = g.buckets.get(fine, set())
        per_label[fine] = sum(1 for surf in occurrences if surf in bucket) / len(occurrences)
    return CoverageReport(
        per_type_label=type_label_coverage(records, reference) if records else {},
        per_label_rate=per_label,
        overall_rate=coverage_rate(g, reference, require_label=True),
        label_agnostic_rate=coverage_rate(g, reference, require_label=False),
        total_entries=g.n_entries,
        total_gold_entities=sum(len(v) for v in gold.values()),
    )


GAZETTEER_HEADER = "surface\tfine_label"


def save_gazetteer(g: Gazetteer, path) -> None:
    """TSV with one `surface<TAB>fine_label` row per entry; header row first."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(GAZETTEER_HEADER + "\n")
        for fine, surface in g.items():
            f.write(f"{' '.join(surface)}\t{taxonomy.FINE_LABELS[fine]}\n")


def load_gazetteer(path) -> Gazetteer:
    g = Gazetteer()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or (lineno == 1 and line == GAZETTEER_HEADER):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise ValueError(f"{path}:{lineno}: malformed gazetteer row {line!r}")
            surface, label = parts
            g.add(label, tuple(surface.split(" ")))
    return g


def load_type_records(path) -> list[TypeRecord]:
    """Read the dump TSV: one `surface<TAB>source_type_id` per line."""
    records: list[TypeRecord] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise ValueError(f"{path}:{lineno}: malformed dump row {line!r}")
            surface, source_type = parts
            records.append(
                TypeRecord(tuple(surface.lower().split(" ")), source_type)
            )
    return records
