"""Label taxonomy: 33 fine-grained entity types, 6 coarse groups, 67 BIO tags.

The tag space is fixed: index 0 is ``O``, followed by a ``(B-X, I-X)`` pair
for each fine label in listing order. All feature vectors, logits and
checkpoints in this package index tags by this order, so it must never be
reshuffled.
"""

from __future__ import annotations

# Coarse group -> fine labels, in the canonical listing order.
COARSE_TO_FINE: dict[str, tuple[str, ...]] = {
    "Location": ("Facility", "OtherLOC", "HumanSettlement", "Station"),
    "CreativeWork": ("VisualWork", "MusicalWork", "WrittenWork", "ArtWork", "Software"),
    "Group": (
        "MusicalGRP",
        "PublicCORP",
        "PrivateCORP",
        "AerospaceManufacturer",
        "SportsGRP",
        "CarManufacturer",
        "ORG",
    ),
    "Person": (
        "Scientist",
        "Artist",
        "Athlete",
        "Politician",
        "Cleric",
        "SportsManager",
        "OtherPER",
    ),
    "Product": ("Clothing", "Vehicle", "Food", "Drink", "OtherPROD"),
    "Medical": (
        "Medication/Vaccine",
        "MedicalProcedure",
        "AnatomicalStructure",
        "Symptom",
        "Disease",
    ),
}

COARSE_LABELS: tuple[str, ...] = tuple(COARSE_TO_FINE)
FINE_LABELS: tuple[str, ...] = tuple(
    fine for group in COARSE_TO_FINE.values() for fine in group
)

N_FINE = len(FINE_LABELS)
N_COARSE = len(COARSE_LABELS)
N_TAGS = 2 * N_FINE + 1

# O first, then (B-X, I-X) pairs in fine-label order.
TAGS: tuple[str, ...] = ("O",) + tuple(
    f"{prefix}-{fine}" for fine in FINE_LABELS for prefix in ("B", "I")
)

O_TAG = 0

_FINE_INDEX: dict[str, int] = {name: i for i, name in enumerate(FINE_LABELS)}
_COARSE_INDEX: dict[str, int] = {name: i for i, name in enumerate(COARSE_LABELS)}
_TAG_INDEX: dict[str, int] = {name: i for i, name in enumerate(TAGS)}

_COARSE_OF_FINE: tuple[int, ...] = tuple(
    _COARSE_INDEX[coarse]
    for coarse, fines in COARSE_TO_FINE.items()
    for _ in fines
)


def fine_index(name: str) -> int:
    """Resolve a fine label name to its index."""
    try:
        return _FINE_INDEX[name]
    except KeyError:
        raise KeyError(f"unknown fine label: {name!r}") from None


def resolve_fine(label: int | str) -> int:
    """Accept a fine label as index or name and return the index."""
    if isinstance(label, str):
        return fine_index(label)
    if not 0 <= label < N_FINE:
        raise IndexError(f"fine label index out of range: {label}")
    return label


def coarse_of(fine: int) -> int:
    """Map a fine label index to its coarse group index."""
    if not 0 <= fine < N_FINE:
        raise IndexError(f"fine label index out of range: {fine}")
    return _COARSE_OF_FINE[fine]


def tag_index(name: str) -> int:
    """Resolve a BIO tag name (``O``, ``B-X``, ``I-X``) to its index."""
    try:
        return _TAG_INDEX[name]
    except KeyError:
        raise KeyError(f"unknown tag: {name!r}") from None


def b_tag(fine: int) -> int:
    """Tag index of ``B-<fine>``."""
    return 1 + 2 * fine


def i_tag(fine: int) -> int:
    """Tag index of ``I-<fine>``."""
    return 2 + 2 * fine


def split_tag(tag: int) -> tuple[str, int | None]:
    """Return (prefix, fine index) for a tag index; ``("O", None)`` for O."""
    if tag == O_TAG:
        return "O", None
    if not 0 < tag < N_TAGS:
        raise IndexError(f"tag index out of range: {tag}")
    fine, rem = divmod(tag - 1, 2)
    return ("B" if rem == 0 else "I"), fine
