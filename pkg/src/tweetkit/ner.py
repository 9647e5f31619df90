"""Named-entity extraction: BIO tag decoding to character spans.

Decoding is total: orphan I-tags are repaired to B-tags (leading I, or I
whose type differs from the running entity), so any tag sequence over
known types decodes cleanly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import Token
from .errors import EncoderFailure, MalformedTags, WrongProblemType
from .preprocessing import normalize
from .registry import ModelHandle


@dataclass(frozen=True)
class EntitySpan:
    surface: str
    type: str
    start: int  # char offset, inclusive
    end: int    # char offset, exclusive
    confidence: float = 1.0


@dataclass(frozen=True)
class TagSequence:
    tokens: list[Token]
    tags: list[str]
    confidences: list[float] | None = None

    def __post_init__(self):
        if len(self.tags) != len(self.tokens):
            raise MalformedTags("tags and tokens must align")


def repair_tags(tags: list[str], known_types: set[str] | None = None) -> list[str]:
    """Apply BIO repair: leading/orphan I-t -> B-t; I-t after a different
    type -> B-t. Valid sequences pass through unchanged."""
    repaired = []
    prev_type = None
    for tag in tags:
        if tag == "O":
            repaired.append(tag)
            prev_type = None
            continue
        if "-" not in tag or tag.split("-", 1)[0] not in ("B", "I"):
            raise MalformedTags(f"unknown tag {tag!r}")
        prefix, etype = tag.split("-", 1)
        if known_types is not None and etype not in known_types:
            raise MalformedTags(f"unknown entity type {etype!r}")
        if prefix == "I" and etype != prev_type:
            prefix = "B"
        repaired.append(f"{prefix}-{etype}")
        prev_type = etype
    return repaired


def decode_bio(seq: TagSequence, known_types: set[str] | None = None) -> list[EntitySpan]:
    """Decode maximal B-t (I-t)* runs into character-offset entity spans.

    Span confidence is the mean of member-token tag confidences. Surfaces
    must come from one underlying text: the span covers the characters
    from the first to the last member token.
    """
    tags = repair_tags(seq.tags, known_types)
    confs = seq.confidences or [1.0] * len(tags)
    spans = []
    run = None  # (type, first_token_idx, last_token_idx)
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if run:
                spans.append(run)
            run = [tag[2:], i, i]
        elif tag.startswith("I-"):
            run[2] = i
        else:
            if run:
                spans.append(run)
            run = None
    if run:
        spans.append(run)
    out = []
    for etype, first, last in spans:
        t0, t1 = seq.tokens[first], seq.tokens[last]
        surface = _surface(seq.tokens, first, last)
        conf = float(np.mean(confs[first:last + 1]))
        out.append(EntitySpan(surface=surface, type=etype, start=t0.start, end=t1.end,
                              confidence=conf))
    return out


def _surface(tokens, first, last):
    # reconstruct the covered text with single spaces between gaps unknown;
    # when offsets are contiguous within one text the joined surface is exact
    parts = [tokens[first].surface]
    for prev, tok in zip(tokens[first:last], tokens[first + 1:last + 1]):
        parts.append(" " * max(1, tok.start - prev.end) if tok.start > prev.end else "")
        parts.append(tok.surface)
    return "".join(parts)


def encode_bio(spans: list[EntitySpan], tokens: list[Token]) -> list[str]:
    """Inverse of decode_bio for valid non-overlapping spans."""
    tags = ["O"] * len(tokens)
    for span in spans:
        inside = [i for i, t in enumerate(tokens) if t.start >= span.start and t.end <= span.end]
        for j, i in enumerate(inside):
            tags[i] = ("B-" if j == 0 else "I-") + span.type
    return tags


def extract_entities(handle: ModelHandle, text: str) -> list[EntitySpan]:
    """Run the tagger backend and decode per-token argmax tags to spans."""
    if handle.spec.problem_type != "sequence_label":
        raise WrongProblemType(f"extract_entities() needs a sequence_label task, got {handle.spec.problem_type}")
    clean = normalize(text).text
    try:
        tokens, logits = handle.backend.tag_logits(clean)
    except Exception as exc:
        raise EncoderFailure(str(exc)) from exc
    if not tokens:
        return []
    logits = np.asarray(logits, dtype=float)
    z = logits - logits.max(axis=1, keepdims=True)
    probs = np.exp(z)
    probs /= probs.sum(axis=1, keepdims=True)
    idx = probs.argmax(axis=1)
    tag_names = handle.backend.tag_names
    tags = [tag_names[i] for i in idx]
    confs = [float(probs[row, i]) for row, i in enumerate(idx)]
    seq = TagSequence(tokens=list(tokens), tags=tags, confidences=confs)
    return decode_bio(seq, known_types=set(handle.spec.labels))


def tag_spans(tags: list[str]) -> list[tuple[int, int, str]]:
    """Token-index (start, end, type) spans from a BIO tag list, with the
    same repair rules as decode_bio. Used by span-level evaluation."""
    repaired = repair_tags(list(tags))
    spans = []
    run = None
    for i, tag in enumerate(repaired):
        if tag.startswith("B-"):
            if run:
                spans.append(tuple(run))
            run = [i, i + 1, tag[2:]]
        elif tag.startswith("I-"):
            run[1] = i + 1
        else:
            if run:
                spans.append(tuple(run))
            run = None
    if run:
        spans.append(tuple(run))
    return spans
