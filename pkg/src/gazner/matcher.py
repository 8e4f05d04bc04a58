"""Token-level prefix tree over gazetteer surfaces and BIO featurization.

Matching emits, for every (start position, fine label), the single longest
gazetteer surface beginning there. Each match then paints B/I slots of a
67-column multi-hot matrix; the O column marks tokens no match touches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import taxonomy
from .corpus import TokenizedSentence
from .gazetteer import Gazetteer


@dataclass
class TreeNode:
    children: dict[str, "TreeNode"] = field(default_factory=dict)
    labels: set[int] = field(default_factory=set)  # surfaces ending here


@dataclass(frozen=True)
class Match:
    start: int
    end: int  # inclusive
    fine_label: int


class SearchTree:
    def __init__(self):
        self.root = TreeNode()

    def insert(self, surface: tuple[str, ...], fine: int) -> None:
        node = self.root
        for token in surface:
            node = node.children.setdefault(token, TreeNode())
        node.labels.add(fine)

    def contains(self, surface: tuple[str, ...], fine: int) -> bool:
        node = self.root
        for token in surface:
            node = node.children.get(token)
            if node is None:
                return False
        return fine in node.labels


def build_tree(g: Gazetteer) -> SearchTree:
    tree = SearchTree()
    for fine, surface in g.items():
        tree.insert(surface, fine)
    return tree


def match_sentence(tree: SearchTree, tokens: list[str] | tuple[str, ...]) -> list[Match]:
    """Longest match per (start, label); output sorted by (start, label)."""
    matches: list[Match] = []
    n = len(tokens)
    for start in range(n):
        node = tree.root
        best: dict[int, int] = {}  # label -> furthest end seen
        for j in range(start, n):
            node = node.children.get(tokens[j])
            if node is None:
                break
            for fine in node.labels:
                best[fine] = j
        for fine in sorted(best):
            matches.append(Match(start, best[fine], fine))
    return matches


def featurize(matches: list[Match], n_tokens: int) -> np.ndarray:
    """(n_tokens, 67) multi-hot matrix: B-l at match starts, I-l inside,
    O on tokens untouched by any match."""
    feats = np.zeros((n_tokens, taxonomy.N_TAGS))
    for m in matches:
        if not 0 <= m.start <= m.end < n_tokens:
            raise ValueError(f"match {m} out of range for {n_tokens} tokens")
        feats[m.start, taxonomy.b_tag(m.fine_label)] = 1.0
        for i in range(m.start + 1, m.end + 1):
            feats[i, taxonomy.i_tag(m.fine_label)] = 1.0
    untouched = feats[:, 1:].sum(axis=1) == 0
    feats[untouched, taxonomy.O_TAG] = 1.0
    return feats


def align_to_subwords(matrix: np.ndarray, ts: TokenizedSentence) -> np.ndarray:
    """Copy each word's row to its first subword; other subword rows stay 0."""
    if matrix.shape[0] != ts.n_words:
        raise ValueError(
            f"matrix has {matrix.shape[0]} rows but sentence has {ts.n_words} words"
        )
    out = np.zeros((ts.n_subwords, matrix.shape[1]))
    out[list(ts.first_subword_of_word)] = matrix
    return out


def sentence_features(
    tree: SearchTree, tokens: tuple[str, ...], ts: TokenizedSentence
) -> np.ndarray:
    """Match (case-insensitively), featurize, and align in one step."""
    lowered = [t.lower() for t in tokens]
    word_feats = featurize(match_sentence(tree, lowered), len(tokens))
    return align_to_subwords(word_feats, ts)
