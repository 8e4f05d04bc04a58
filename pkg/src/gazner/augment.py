"""Data augmentation: gazetteer-driven entity replacement and template slotting."""

from __future__ import annotations

import logging
import random

from . import taxonomy
from .corpus import Sentence, extract_entities
from .gazetteer import Gazetteer

log = logging.getLogger(__name__)


def entity_replace_augment(
    sentences: list[Sentence],
    gazetteer: Gazetteer,
    rate: float,
    seed: int,
) -> list[Sentence]:
    """Replace each gold entity, with probability ``rate``, by a same-label
    gazetteer entry (whitespace-retokenized), rewriting BIO tags to the new
    span length. Deterministic given the seed.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    rng = random.Random(seed)
    skipped_empty = 0
    out: list[Sentence] = []
    for s in sentences:
        tokens: list[str] = []
        tags: list[int] = []
        cursor = 0
        for e in extract_entities(s):
            tokens.extend(s.tokens[cursor : e.start])
            tags.extend(s.tags[cursor : e.start])
            replace = rng.random() < rate
            bucket = gazetteer.sorted_surfaces(e.fine_label) if replace else []
            if replace and not bucket:
                skipped_empty += 1
                replace = False
            if replace:
                surface = bucket[rng.randrange(len(bucket))]
                tokens.extend(surface)
                tags.append(taxonomy.b_tag(e.fine_label))
                tags.extend([taxonomy.i_tag(e.fine_label)] * (len(surface) - 1))
            else:
                tokens.extend(s.tokens[e.start : e.end + 1])
                tags.extend(s.tags[e.start : e.end + 1])
            cursor = e.end + 1
        tokens.extend(s.tokens[cursor:])
        tags.extend(s.tags[cursor:])
        out.append(Sentence(id=s.id, tokens=tuple(tokens), tags=tuple(tags)))
    if skipped_empty:
        log.warning(
            "entity replacement: %d entit(ies) kept, gazetteer bucket empty",
            skipped_empty,
        )
    return out


def _slot_label(token: str, tag: int) -> int | None:
    """A slot is a `[Label]` token tagged B-Label."""
    prefix, fine = taxonomy.split_tag(tag)
    if prefix == "B" and token == f"[{taxonomy.FINE_LABELS[fine]}]":
        return fine
    return None


def slot_templates(
    templates: list[Sentence],
    gazetteer: Gazetteer,
    seed: int,
) -> list[Sentence]:
    """Fill each `[Label]` slot with a drawn same-label gazetteer entry.

    Templates whose slots hit an empty bucket are skipped with a warning.
    """
    rng = random.Random(seed)
    skipped = 0
    out: list[Sentence] = []
    for t in templates:
        tokens: list[str] = []
        tags: list[int] = []
        ok = True
        for token, tag in zip(t.tokens, t.tags):
            fine = _slot_label(token, tag)
            if fine is None:
                tokens.append(token)
                tags.append(tag)
                continue
            bucket = gazetteer.sorted_surfaces(fine)
            if not bucket:
                ok = False
                break
            surface = bucket[rng.randrange(len(bucket))]
            tokens.extend(surface)
            tags.append(taxonomy.b_tag(fine))
            tags.extend([taxonomy.i_tag(fine)] * (len(surface) - 1))
        if ok:
            out.append(Sentence(id=f"t{len(out)}", tokens=tuple(tokens), tags=tuple(tags)))
        else:
            skipped += 1
    if skipped:
        log.warning("template slotting: skipped %d template(s) with empty buckets", skipped)
    return out
