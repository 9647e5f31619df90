import numpy as np
import pytest

from tweetkit.backends import StubClassifier, StubEmbedder, StubMlm, StubTagger
from tweetkit.registry import ModelCard, ModelHandle, Registry, builtin_tasks

SPECS = {s.name: s for s in builtin_tasks()}


def make_handle(task, backend, target=None):
    spec = SPECS[task]
    card = ModelCard(task=task, language_scope="english", source_uri=f"stub://{task}",
                     revision="test", backend_kind="encoder_classifier", target=target)
    return ModelHandle(card=card, spec=spec, backend=backend)


@pytest.fixture
def sentiment_uniform():
    return make_handle("sentiment", StubClassifier(3))


@pytest.fixture
def stub_registry():
    """Registry whose backend factory builds deterministic stubs per kind."""

    def factory(card, spec):
        if card.backend_kind == "encoder_classifier":
            return StubClassifier(len(spec.labels) or 2)
        if card.backend_kind == "encoder_tagger":
            return StubTagger(spec.labels)
        if card.backend_kind == "encoder_mlm":
            return StubMlm(["paris", "pizza", "you", "<mask>", "<s>"])
        if card.backend_kind == "encoder_embedder":
            return StubEmbedder(8)
        raise AssertionError(card.backend_kind)

    from tweetkit.registry import default_manifest_text, parse_manifest
    return Registry(cards=parse_manifest(default_manifest_text()), backend_factory=factory)


def softmax_oracle(logits):
    """Independent softmax for expected-value computation in tests."""
    import math
    exps = [math.exp(x) for x in logits]
    s = sum(exps)
    return [e / s for e in exps]
