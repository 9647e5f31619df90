"""tweetkit: social-media NLP toolkit.

Typical use mirrors the task-oriented entry point:

    import tweetkit
    model = tweetkit.load("sentiment")
    tweetkit.predict(model, "I love Paris!!")
"""
from .classification import (Prediction, predict, predict_batch,
                             predict_multilabel, predict_stance, predict_topk)
from .masked_lm import MaskPrediction, predict_mask
from .ner import EntitySpan, TagSequence, decode_bio, extract_entities
from .preprocessing import NormalizedTweet, RawTweet, normalize, validate_mask_input
from .registry import (ModelCard, ModelHandle, Registry, TaskSpec,
                       builtin_tasks, default_registry)

__version__ = "0.1.0"


def load(task: str, model_id: str | None = None, language: str | None = None,
         target: str | None = None):
    """Load a ready-to-use model handle from the default registry."""
    return default_registry().load(task, model_id=model_id, language=language,
                                   target=target)


def list_tasks():
    return default_registry().list_tasks()


__all__ = [
    "Prediction", "predict", "predict_batch", "predict_multilabel",
    "predict_stance", "predict_topk", "MaskPrediction", "predict_mask",
    "EntitySpan", "TagSequence", "decode_bio", "extract_entities",
    "NormalizedTweet", "RawTweet", "normalize", "validate_mask_input",
    "ModelCard", "ModelHandle", "Registry", "TaskSpec", "builtin_tasks",
    "default_registry", "load", "list_tasks",
]
