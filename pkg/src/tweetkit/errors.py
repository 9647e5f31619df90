"""Exception types shared across the toolkit."""


class TweetKitError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class EmptyInput(TweetKitError):
    code = "empty_input"


class NoMaskPresent(TweetKitError):
    code = "no_mask_present"


class UnknownTask(TweetKitError):
    code = "unknown_task"


class UnsupportedLanguage(TweetKitError):
    code = "unsupported_language"

    def __init__(self, task, language):
        super().__init__(f"task {task!r} has no model covering language {language!r}")
        self.task = task
        self.language = language


class UnknownTarget(TweetKitError):
    code = "unknown_target"


class ModelFetchError(TweetKitError):
    """Network or model-store failure; retryable."""

    code = "model_fetch_error"


class IncompatibleHead(TweetKitError):
    """Backend output size does not match the task's label count."""

    code = "incompatible_head"


class WrongProblemType(TweetKitError):
    code = "wrong_problem_type"


class EncoderFailure(TweetKitError):
    """Backend inference error; non-retryable."""

    code = "encoder_failure"


class KTooLarge(TweetKitError):
    code = "k_too_large"


class MalformedTags(TweetKitError):
    code = "malformed_tags"


class OutOfVocabulary(TweetKitError):
    code = "out_of_vocabulary"


class ZeroVector(TweetKitError):
    code = "zero_vector"


class BatchTooSmall(TweetKitError):
    code = "batch_too_small"


class NonNormalizedInput(TweetKitError):
    code = "non_normalized_input"


class DataExhausted(TweetKitError):
    code = "data_exhausted"


class DivergedLoss(TweetKitError):
    code = "diverged_loss"


class HeldoutOverlap(TweetKitError):
    """Held-out pairs must be disjoint from training pairs."""

    code = "heldout_overlap"


class FormatError(TweetKitError):
    code = "format_error"

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class LengthMismatch(TweetKitError):
    code = "length_mismatch"


class DegenerateInput(TweetKitError):
    code = "degenerate_input"


class TaskMismatch(TweetKitError):
    code = "task_mismatch"


class EmptyGrid(TweetKitError):
    code = "empty_grid"


class MissingTimestamp(TweetKitError):
    code = "missing_timestamp"

    def __init__(self, index):
        super().__init__(f"tweet at index {index} has no created_at timestamp")
        self.index = index


class AuthError(TweetKitError):
    """Upstream rejected the credentials; non-retryable."""

    code = "auth_error"


class RateLimited(TweetKitError):
    """Upstream rate limit; retryable after ``retry_after`` seconds."""

    code = "rate_limited"

    def __init__(self, retry_after=None):
        super().__init__(f"rate limited (retry after {retry_after}s)")
        self.retry_after = retry_after


class UpstreamError(TweetKitError):
    """Upstream 5xx or malformed payload; retryable with backoff."""

    code = "upstream_error"

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
