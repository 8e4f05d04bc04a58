"""CoNLL-style corpus I/O, BIO span semantics, and subword alignment.

File format: one ``token<TAB or space>tag`` per line, UTF-8, blank line
between sentences. Tags are the exact strings from :mod:`gazner.taxonomy`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import taxonomy

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Malformed corpus input (bad line, unknown tag, BIO violation)."""


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[str, ...]
    tags: tuple[int, ...]  # indices into taxonomy.TAGS

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise CorpusError(
                f"sentence {self.id}: {len(self.tokens)} tokens vs {len(self.tags)} tags"
            )

    def tag_names(self) -> tuple[str, ...]:
        return tuple(taxonomy.TAGS[t] for t in self.tags)


@dataclass(frozen=True)
class Entity:
    start: int  # token index
    end: int    # token index, inclusive
    fine_label: int


@dataclass(frozen=True)
class TokenizedSentence:
    subwords: tuple[str, ...]
    word_of_subword: tuple[int, ...]
    first_subword_of_word: tuple[int, ...]

    @property
    def n_subwords(self) -> int:
        return len(self.subwords)

    @property
    def n_words(self) -> int:
        return len(self.first_subword_of_word)


def bio_violations(tags: tuple[int, ...]) -> list[int]:
    """Positions where an I-tag does not continue a same-label B/I run."""
    bad = []
    for i, tag in enumerate(tags):
        prefix, fine = taxonomy.split_tag(tag)
        if prefix != "I":
            continue
        if i == 0:
            bad.append(i)
            continue
        prev_prefix, prev_fine = taxonomy.split_tag(tags[i - 1])
        if prev_prefix == "O" or prev_fine != fine:
            bad.append(i)
    return bad


def repair_bio(tags: list[int] | tuple[int, ...]) -> tuple[int, ...]:
    """Map every orphan I-X to B-X (standard lenient CoNLL repair)."""
    out = list(tags)
    for i in bio_violations(tuple(out)):
        _, fine = taxonomy.split_tag(out[i])
        out[i] = taxonomy.b_tag(fine)
    return tuple(out)


def parse_conll(text: str, strict: bool = True) -> list[Sentence]:
    """Parse CoNLL text into sentences.

    In strict mode a BIO violation raises, naming the sentence; in lenient
    mode orphan I-X tags are repaired to B-X and the repair is logged.
    """
    sentences: list[Sentence] = []
    tokens: list[str] = []
    tags: list[int] = []
    repaired = 0

    def flush():
        nonlocal tokens, tags, repaired
        if not tokens:
            return
        sid = f"s{len(sentences)}"
        tag_tuple = tuple(tags)
        if bio_violations(tag_tuple):
            if strict:
                raise CorpusError(f"sentence {sid}: invalid BIO tag sequence")
            tag_tuple = repair_bio(tag_tuple)
            repaired += 1
        sentences.append(Sentence(id=sid, tokens=tuple(tokens), tags=tag_tuple))
        tokens, tags = [], []

    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            flush()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CorpusError(f"line {lineno}: expected `token tag`, got {line!r}")
        token, tag_name = parts
        try:
            tag = taxonomy.tag_index(tag_name)
        except KeyError:
            raise CorpusError(f"line {lineno}: unknown tag {tag_name!r}") from None
        tokens.append(token)
        tags.append(tag)
    flush()

    if repaired:
        log.warning("repaired BIO violations in %d sentence(s)", repaired)
    return sentences


def emit_conll(sentences: list[Sentence]) -> str:
    """Render sentences back to CoNLL text; inverse of :func:`parse_conll`."""
    blocks = []
    for s in sentences:
        lines = [f"{tok} {taxonomy.TAGS[tag]}" for tok, tag in zip(s.tokens, s.tags)]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def load_conll(path, strict: bool = True) -> list[Sentence]:
    with open(path, encoding="utf-8") as f:
        return parse_conll(f.read(), strict=strict)


def save_conll(sentences: list[Sentence], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(emit_conll(sentences))


def extract_entities(s: Sentence) -> list[Entity]:
    """Maximal B-initiated spans, left to right. Tags must be BIO-valid."""
    entities: list[Entity] = []
    start = None
    fine = None
    for i, tag in enumerate(s.tags):
        prefix, tag_fine = taxonomy.split_tag(tag)
        if prefix == "I":
            continue  # extends the open span
        if start is not None:
            entities.append(Entity(start, i - 1, fine))
            start, fine = None, None
        if prefix == "B":
            start, fine = i, tag_fine
    if start is not None:
        entities.append(Entity(start, len(s.tags) - 1, fine))
    return entities


def tags_of_entities(entities: list[Entity], length: int) -> tuple[int, ...]:
    """BIO tag sequence containing exactly the given (non-overlapping) spans."""
    tags = [taxonomy.O_TAG] * length
    for e in entities:
        tags[e.start] = taxonomy.b_tag(e.fine_label)
        for i in range(e.start + 1, e.end + 1):
            tags[i] = taxonomy.i_tag(e.fine_label)
    return tuple(tags)


def subword_tokenize(s: Sentence, mode: str = "identity", k: int = 3) -> TokenizedSentence:
    """Split words into subwords.

    ``identity`` keeps one subword per word; ``fixed_chunk`` splits each word
    into consecutive chunks of ``k`` characters (a stand-in for a learned
    subword tokenizer that still exercises first-subword alignment).
    """
    subwords: list[str] = []
    word_of: list[int] = []
    first_of: list[int] = []
    if mode == "identity":
        for w, tok in enumerate(s.tokens):
            first_of.append(len(subwords))
            subwords.append(tok)
            word_of.append(w)
    elif mode == "fixed_chunk":
        if k < 1:
            raise ValueError(f"chunk size must be >= 1, got {k}")
        for w, tok in enumerate(s.tokens):
            first_of.append(len(subwords))
            for off in range(0, len(tok), k):
                subwords.append(tok[off : off + k])
                word_of.append(w)
            if not tok:  # degenerate empty token still owns one subword
                subwords.append("")
                word_of.append(w)
    else:
        raise ValueError(f"unknown tokenize mode: {mode!r}")
    return TokenizedSentence(tuple(subwords), tuple(word_of), tuple(first_of))
