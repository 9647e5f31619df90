from .words import (WordTable, fnv1a_64, load_word_table, nearest_neighbors,
                    word_ngrams, word_similarity, word_vector)
from .tweets import embed_tweet, tweet_similarity
from .infonce import ContrastiveConfig, infonce_loss, infonce_loss_torch
from .training import (LinearVectorEncoder, TrainResult, retrieval_accuracy_at_1,
                       train_tweet_encoder)

__all__ = [
    "WordTable", "fnv1a_64", "load_word_table", "nearest_neighbors",
    "word_ngrams", "word_similarity", "word_vector",
    "embed_tweet", "tweet_similarity",
    "ContrastiveConfig", "infonce_loss", "infonce_loss_torch",
    "LinearVectorEncoder", "TrainResult", "retrieval_accuracy_at_1",
    "train_tweet_encoder",
]
