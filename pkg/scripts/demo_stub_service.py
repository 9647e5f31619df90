#!/usr/bin/env python3
"""Exercise the library surface end to end with deterministic stub models:
classification, NER span extraction, mask filling, and tweet similarity.

No downloads, no GPU — useful as a smoke test and as a worked example of
the registry/backend wiring.
"""
import numpy as np

from tweetkit import classification, masked_lm, ner
from tweetkit.backends import StubClassifier, StubEmbedder, StubMlm, StubTagger
from tweetkit.embeddings.tweets import tweet_similarity
from tweetkit.registry import ModelCard, ModelHandle, builtin_tasks

SPECS = {s.name: s for s in builtin_tasks()}


def handle(task, backend, kind="encoder_classifier"):
    card = ModelCard(task=task, language_scope="english",
                     source_uri=f"stub://{task}", revision="demo", backend_kind=kind)
    return ModelHandle(card=card, spec=SPECS[task], backend=backend)


def main():
    rng = np.random.default_rng(0)
    sentiment = handle("sentiment", StubClassifier(
        3, logits_fn=lambda text: rng.normal(size=3)))
    pred = classification.predict(sentiment, "what a day @friend http://x.test/1")
    print("sentiment:", pred.label, {k: round(v, 3) for k, v in pred.distribution.items()})

    tagger = handle("ner", StubTagger(SPECS["ner"].labels), kind="encoder_tagger")
    spans = ner.extract_entities(tagger, "B-person I-person O B-location")
    for s in spans:
        print(f"entity: {s.type:10s} [{s.start}:{s.end}] {s.surface!r}")

    mlm = handle("language_model", StubMlm(
        ["paris", "pizza", "you", "<mask>"], probs=[0.5, 0.3, 0.15, 0.05]),
        kind="encoder_mlm")
    for m in masked_lm.predict_mask(mlm, "i love <mask>", k=2):
        print("mask candidates:", m.candidates)

    embedder = StubEmbedder(16)
    print("self-similarity:", round(tweet_similarity(embedder, "same text", "same text"), 2))
    print("cross-similarity:", round(tweet_similarity(embedder, "one thing", "another"), 2))


if __name__ == "__main__":
    main()
