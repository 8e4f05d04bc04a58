"""Backend classifier heads: softmax tagger, linear-chain CRF, span pointers.

All decoders return BIO-valid tag sequences (orphan I-tags repaired where a
head can emit them).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import taxonomy
from .autograd import Tensor, concat, log_softmax, logsumexp, reshape, tmean, tsum
from .corpus import Entity, repair_bio, tags_of_entities

N_SPAN = taxonomy.N_FINE + 1  # per-boundary classes: none + 33 fine labels


def cross_entropy(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of integer targets under row softmax."""
    targets = np.asarray(targets, dtype=np.intp)
    n = logits.shape[0]
    if targets.shape != (n,):
        raise ValueError(f"targets shape {targets.shape} vs logits {logits.shape}")
    log_probs = log_softmax(logits, axis=-1)
    picked = log_probs[np.arange(n), targets]
    return -tmean(picked)


# softmax head ---------------------------------------------------------


def softmax_loss(emissions: Tensor, gold_tags) -> Tensor:
    return cross_entropy(emissions, np.asarray(gold_tags))


def softmax_decode(emissions: Tensor | np.ndarray) -> tuple[int, ...]:
    data = emissions.data if isinstance(emissions, Tensor) else emissions
    return repair_bio([int(t) for t in data.argmax(axis=-1)])


# CRF head -------------------------------------------------------------


@dataclass
class CrfParams:
    trans: Tensor  # (K, K): trans[a, b] scores a -> b
    start: Tensor  # (K,)
    end: Tensor    # (K,)

    def tensors(self) -> dict[str, Tensor]:
        return {"trans": self.trans, "start": self.start, "end": self.end}


def init_crf(rng: np.random.Generator, k: int) -> CrfParams:
    scale = 1.0 / np.sqrt(k)
    return CrfParams(
        trans=Tensor(rng.uniform(-scale, scale, size=(k, k)), requires_grad=True),
        start=Tensor(np.zeros(k), requires_grad=True),
        end=Tensor(np.zeros(k), requires_grad=True),
    )


def _bio_transition_mask(k: int) -> np.ndarray:
    """Additive penalty matrix: -1e4 on transitions into an orphan I tag."""
    penalty = np.zeros((k, k))
    for b in range(k):
        prefix_b, fine_b = taxonomy.split_tag(b)
        if prefix_b != "I":
            continue
        for a in range(k):
            prefix_a, fine_a = taxonomy.split_tag(a)
            if prefix_a == "O" or fine_a != fine_b:
                penalty[a, b] = -1e4
    return penalty


def crf_log_z(emissions: Tensor, crf: CrfParams, bio_mask: bool = False) -> Tensor:
    """Log-partition over all tag paths, by the forward algorithm in log space."""
    n, k = emissions.shape
    trans = crf.trans
    if bio_mask:
        trans = trans + Tensor(_bio_transition_mask(k))
    alpha = reshape(crf.start, (1, k)) + emissions[0:1]
    for t in range(1, n):
        scores = alpha.T + trans  # (K_prev, K_next)
        alpha = logsumexp(scores, axis=0, keepdims=True) + emissions[t : t + 1]
    return logsumexp(alpha + reshape(crf.end, (1, k)))


def crf_path_score(
    emissions: Tensor, crf: CrfParams, tags, bio_mask: bool = False
) -> Tensor:
    tags = np.asarray(tags, dtype=np.intp)
    n = emissions.shape[0]
    if tags.shape != (n,):
        raise ValueError(f"tags shape {tags.shape} vs emissions {emissions.shape}")
    trans = crf.trans
    if bio_mask:
        trans = trans + Tensor(_bio_transition_mask(emissions.shape[1]))
    score = crf.start[tags[0]] + tsum(emissions[np.arange(n), tags]) + crf.end[tags[-1]]
    if n > 1:
        score = score + tsum(trans[tags[:-1], tags[1:]])
    return score


def crf_nll(
    emissions: Tensor, crf: CrfParams, gold_tags, bio_mask: bool = False
) -> Tensor:
    """-(score(gold path) - log Z)."""
    return crf_log_z(emissions, crf, bio_mask) - crf_path_score(
        emissions, crf, gold_tags, bio_mask
    )


def crf_viterbi(
    emissions: Tensor | np.ndarray, crf: CrfParams, bio_mask: bool = False
) -> tuple[int, ...]:
    """Best-scoring path; ties break toward the lower tag index."""
    em = emissions.data if isinstance(emissions, Tensor) else np.asarray(emissions)
    trans = crf.trans.data.copy()
    if bio_mask:
        trans += _bio_transition_mask(em.shape[1])
    n, k = em.shape
    delta = crf.start.data + em[0]
    back = np.zeros((n, k), dtype=np.intp)
    for t in range(1, n):
        scores = delta[:, None] + trans  # (K_prev, K_next)
        back[t] = scores.argmax(axis=0)  # argmax keeps the lowest index on ties
        delta = scores[back[t], np.arange(k)] + em[t]
    delta = delta + crf.end.data
    path = [int(delta.argmax())]
    for t in range(n - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return repair_bio(path)


# span head ------------------------------------------------------------


def span_gold_boundaries(tags: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Per-token boundary classes: 0 = none, fine label + 1 at entity
    starts (for the start classifier) and ends (for the end classifier)."""
    from .corpus import Sentence, extract_entities

    sentence = Sentence(id="_", tokens=("",) * len(tags), tags=tuple(tags))
    starts = np.zeros(len(tags), dtype=np.intp)
    ends = np.zeros(len(tags), dtype=np.intp)
    for e in extract_entities(sentence):
        starts[e.start] = e.fine_label + 1
        ends[e.end] = e.fine_label + 1
    return starts, ends


def span_loss(start_logits: Tensor, end_logits: Tensor, gold_tags) -> Tensor:
    """Mean cross-entropy over start boundaries plus mean over end boundaries."""
    starts, ends = span_gold_boundaries(tuple(gold_tags))
    return cross_entropy(start_logits, starts) + cross_entropy(end_logits, ends)


def span_decode_entities(
    start_logits: Tensor | np.ndarray, end_logits: Tensor | np.ndarray
) -> list[Entity]:
    """Pair each predicted start with the nearest same-label end at or after
    it, greedily left to right without overlaps; unmatched boundaries drop."""
    s = start_logits.data if isinstance(start_logits, Tensor) else np.asarray(start_logits)
    e = end_logits.data if isinstance(end_logits, Tensor) else np.asarray(end_logits)
    start_pred = s.argmax(axis=-1)
    end_pred = e.argmax(axis=-1)
    n = len(start_pred)
    entities: list[Entity] = []
    covered_until = -1
    for i in range(n):
        if start_pred[i] == 0 or i <= covered_until:
            continue
        label = int(start_pred[i]) - 1
        for j in range(i, n):
            if end_pred[j] == start_pred[i]:
                entities.append(Entity(i, j, label))
                covered_until = j
                break
    return entities


def span_decode(
    start_logits: Tensor | np.ndarray, end_logits: Tensor | np.ndarray
) -> tuple[int, ...]:
    entities = span_decode_entities(start_logits, end_logits)
    n = (
        start_logits.shape[0]
        if isinstance(start_logits, Tensor)
        else np.asarray(start_logits).shape[0]
    )
    return tags_of_entities(entities, n)


def span_logits_concat(start_logits: np.ndarray, end_logits: np.ndarray) -> np.ndarray:
    """Side-by-side (N, 68) layout used for logit averaging across models."""
    return np.concatenate([start_logits, end_logits], axis=1)


def span_logits_split(stacked: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return stacked[:, :N_SPAN], stacked[:, N_SPAN:]
