"""Tweet normalization: mask user mentions and URLs with fixed placeholders.

The placeholders ("@user" / "http") match the preprocessing the released
classifier checkpoints were fine-tuned with, so they must not be changed.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime

from .errors import EmptyInput, NoMaskPresent

MENTION_PLACEHOLDER = "@user"
URL_PLACEHOLDER = "http"

# Twitter handles are 1-15 chars of [A-Za-z0-9_]; longer @-runs are left alone.
_MENTION_RE = re.compile(r"(?<![A-Za-z0-9_@])@[A-Za-z0-9_]{1,15}(?![A-Za-z0-9_])")
# Scheme-prefixed URLs only; bare domains are ordinary text.
_URL_RE = re.compile(r"https?://\S+")


@dataclass(frozen=True)
class RawTweet:
    text: str
    id: str | None = None
    created_at: datetime | None = None
    lang: str | None = None


@dataclass(frozen=True)
class Substitution:
    """One placeholder replacement.

    ``start``/``end`` index the placeholder in the *normalized* text;
    ``original`` is the replaced source text, so the input can be
    reconstructed exactly.
    """

    start: int
    end: int
    kind: str  # "mention" or "url"
    original: str


@dataclass(frozen=True)
class NormalizedTweet:
    text: str
    substitutions: tuple[Substitution, ...] = field(default_factory=tuple)

    def reconstruct(self) -> str:
        """Rebuild the original input from the normalized text and records."""
        out = []
        cursor = 0
        for sub in self.substitutions:
            out.append(self.text[cursor:sub.start])
            out.append(sub.original)
            cursor = sub.end
        out.append(self.text[cursor:])
        return "".join(out)


def normalize(tweet: RawTweet | str) -> NormalizedTweet:
    """Replace @-mentions with "@user" and http(s) URLs with "http".

    All other characters are preserved verbatim. Unicode NFC normalization
    is applied first. No-op replacements (input already a placeholder) are
    not recorded, which makes repeated normalization stable.
    """
    text = tweet.text if isinstance(tweet, RawTweet) else tweet
    text = unicodedata.normalize("NFC", text)
    if not text.strip():
        raise EmptyInput("tweet text is empty or whitespace-only")

    url_spans = [(m.start(), m.end()) for m in _URL_RE.finditer(text)]
    matches = [(s, e, "url", URL_PLACEHOLDER) for s, e in url_spans]
    for m in _MENTION_RE.finditer(text):
        # an @-token inside a URL belongs to the URL replacement
        if any(s <= m.start() < e for s, e in url_spans):
            continue
        matches.append((m.start(), m.end(), "mention", MENTION_PLACEHOLDER))
    matches.sort()

    pieces = []
    subs = []
    cursor = 0
    out_len = 0
    for start, end, kind, placeholder in matches:
        pieces.append(text[cursor:start])
        out_len += start - cursor
        original = text[start:end]
        pieces.append(placeholder)
        if original != placeholder:
            subs.append(Substitution(out_len, out_len + len(placeholder), kind, original))
        out_len += len(placeholder)
        cursor = end
    pieces.append(text[cursor:])
    return NormalizedTweet(text="".join(pieces), substitutions=tuple(subs))


def validate_mask_input(text: str, mask_token: str) -> int:
    """Count mask-token occurrences; at least one is required."""
    count = text.count(mask_token)
    if count == 0:
        raise NoMaskPresent(f"input contains no occurrence of {mask_token!r}")
    return count
