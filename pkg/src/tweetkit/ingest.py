"""Rate-limited tweet-search client, reply-pair sampling, and time-bucketed
aggregation of predictions.

The HTTP transport is injectable (httpx transport) so every behavior is
testable against deterministic mock upstreams. One request is in flight
per client at a time; the bearer token comes from an environment variable
and is never logged.
"""
from __future__ import annotations

import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import httpx

from .classification import Prediction
from .errors import AuthError, MissingTimestamp, RateLimited, UpstreamError
from .preprocessing import RawTweet

log = logging.getLogger(__name__)

BEARER_TOKEN_ENV = "TWEETKIT_BEARER_TOKEN"
API_BASE_ENV = "TWEETKIT_API_BASE"
DEFAULT_API_BASE = "https://api.twitter.com"
SEARCH_PATH = "/2/tweets/search/recent"
DEFAULT_PAGE_SIZE = 100
MAX_ATTEMPTS = 5


@dataclass(frozen=True)
class SearchQuery:
    query: str
    start: datetime
    end: datetime
    language: str | None = None
    max_results: int = 100

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("start must be before end")
        if self.max_results < 1:
            raise ValueError("max_results must be >= 1")


@dataclass
class FetchResult:
    tweets: list[RawTweet]
    capped: bool = False
    pages: int = 0
    retries: int = 0


def _parse_time(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


class TweetSearchClient:
    """Client for the recent-search endpoint with pagination and retries.

    Retry policy: 429 waits the advertised retry-after; 5xx retries with
    exponential backoff; both give up after MAX_ATTEMPTS attempts per page.
    401/403 fail immediately.
    """

    def __init__(self, bearer_token: str | None = None, base_url: str | None = None,
                 transport: httpx.BaseTransport | None = None,
                 page_size: int = DEFAULT_PAGE_SIZE,
                 sleep=time.sleep, backoff_base: float = 1.0):
        self._token = bearer_token or os.environ.get(BEARER_TOKEN_ENV, "")
        self._base = base_url or os.environ.get(API_BASE_ENV, DEFAULT_API_BASE)
        self._client = httpx.Client(base_url=self._base, transport=transport)
        self._page_size = page_size
        self._sleep = sleep
        self._backoff_base = backoff_base
        self._lock = threading.Lock()  # one in-flight request per credential
        self.retries = 0

    def close(self):
        self._client.close()

    def _request(self, params: dict) -> dict:
        headers = {"Authorization": f"Bearer {self._token}"}
        for attempt in range(MAX_ATTEMPTS):
            resp = self._client.get(SEARCH_PATH, params=params, headers=headers)
            if resp.status_code in (401, 403):
                raise AuthError(f"upstream rejected credentials ({resp.status_code})")
            if resp.status_code == 429:
                retry_after = float(resp.headers.get("retry-after", 1))
                if attempt == MAX_ATTEMPTS - 1:
                    raise RateLimited(retry_after)
                self.retries += 1
                log.warning("rate limited; backing off %.1fs", retry_after)
                self._sleep(retry_after)
                continue
            if resp.status_code >= 500:
                if attempt == MAX_ATTEMPTS - 1:
                    raise UpstreamError(f"upstream failure {resp.status_code} after {MAX_ATTEMPTS} attempts",
                                        payload=resp.text)
                self.retries += 1
                self._sleep(self._backoff_base * 2 ** attempt)
                continue
            try:
                payload = resp.json()
            except ValueError as exc:
                raise UpstreamError("non-JSON upstream payload", payload=resp.text) from exc
            if resp.status_code != 200:
                raise UpstreamError(f"unexpected status {resp.status_code}", payload=payload)
            return payload
        raise UpstreamError("retry loop exhausted")  # pragma: no cover

    def fetch_tweets(self, query: SearchQuery) -> FetchResult:
        """Fetch up to max_results tweets matching the query window,
        following next_token pagination; duplicate ids are dropped."""
        q = query.query
        if query.language:
            q = f"{q} lang:{query.language}"
        params = {
            "query": q,
            "start_time": query.start.astimezone(timezone.utc).isoformat(),
            "end_time": query.end.astimezone(timezone.utc).isoformat(),
            "max_results": min(self._page_size, query.max_results),
            "tweet.fields": "created_at,lang",
        }
        tweets: list[RawTweet] = []
        seen: set[str] = set()
        pages = 0
        capped = False
        next_token = None
        with self._lock:
            while True:
                page_params = dict(params)
                if next_token:
                    page_params["next_token"] = next_token
                payload = self._request(page_params)
                pages += 1
                for item in payload.get("data", []):
                    if "id" not in item or "text" not in item:
                        raise UpstreamError("tweet record missing required fields",
                                            payload=payload)
                    if item["id"] in seen:
                        continue
                    seen.add(item["id"])
                    created = _parse_time(item["created_at"]) if "created_at" in item else None
                    tweets.append(RawTweet(text=item["text"], id=item["id"],
                                           created_at=created, lang=item.get("lang")))
                    if len(tweets) >= query.max_results:
                        capped = True
                        break
                if capped:
                    break
                next_token = payload.get("meta", {}).get("next_token")
                if not next_token:
                    break
        return FetchResult(tweets=tweets, capped=capped, pages=pages, retries=self.retries)


def fetch_tweets(query: SearchQuery, client: TweetSearchClient) -> list[RawTweet]:
    return client.fetch_tweets(query).tweets


@dataclass
class PairSample:
    pairs: list[tuple[RawTweet, RawTweet]]
    skipped_without_replies: int = 0


def sample_tweet_reply_pairs(tweets, replies_by_tweet: dict, rng_seed: int) -> PairSample:
    """One (tweet, reply) pair per tweet with replies; for tweets with
    several replies one is chosen uniformly by the seeded generator."""
    rng = random.Random(rng_seed)
    pairs = []
    skipped = 0
    for tweet in tweets:
        replies = replies_by_tweet.get(tweet.id)
        if not replies:
            skipped += 1
            continue
        pairs.append((tweet, rng.choice(list(replies))))
    return PairSample(pairs=pairs, skipped_without_replies=skipped)


@dataclass
class TimeBucketedAggregate:
    bucket_width: timedelta
    buckets: list[tuple[datetime, dict[str, int], int]]  # (start, label counts, total)

    @property
    def total(self) -> int:
        return sum(t for _, _, t in self.buckets)

    def to_dict(self):
        return {
            "bucket_width_seconds": self.bucket_width.total_seconds(),
            "buckets": [
                {"start": start.isoformat(), "counts": counts, "total": total}
                for start, counts, total in self.buckets
            ],
        }


def _predicted_labels(pred: Prediction) -> list[str]:
    if pred.label is not None:
        return [pred.label]
    return sorted(pred.labels)


def aggregate_over_time(tweets, predictions, bucket_width: timedelta) -> TimeBucketedAggregate:
    """Bucket tweets by floor(created_at / width) and count predicted
    labels per bucket; empty buckets between first and last are retained."""
    if len(tweets) != len(predictions):
        raise ValueError("tweets and predictions must align")
    width = bucket_width.total_seconds()
    keyed = []
    for i, (tweet, pred) in enumerate(zip(tweets, predictions)):
        if tweet.created_at is None:
            raise MissingTimestamp(i)
        epoch = tweet.created_at.timestamp()
        keyed.append((int(epoch // width), pred))
    if not keyed:
        return TimeBucketedAggregate(bucket_width=bucket_width, buckets=[])
    lo = min(k for k, _ in keyed)
    hi = max(k for k, _ in keyed)
    counts = {k: {} for k in range(lo, hi + 1)}
    totals = {k: 0 for k in range(lo, hi + 1)}
    for k, pred in keyed:
        for label in _predicted_labels(pred):
            counts[k][label] = counts[k].get(label, 0) + 1
        totals[k] += 1
    buckets = [
        (datetime.fromtimestamp(k * width, tz=timezone.utc), counts[k], totals[k])
        for k in range(lo, hi + 1)
    ]
    return TimeBucketedAggregate(bucket_width=bucket_width, buckets=buckets)
