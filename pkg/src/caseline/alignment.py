"""Event-string distance metrics and best-match timeline alignment.

The matcher repeatedly selects the globally closest (reference, predicted)
event pair among the remaining events, breaking distance ties by smaller
reference index and then smaller predicted index, and removes both events.
It stops when either side is exhausted, so the result is a one-to-one
mapping of size min(|ref|, |pred|) in selection order.

Usage:
    pairs = best_match(ref, pred, EditDistanceMetric())
    kept = apply_threshold(pairs, tau=0.1, ref_size=len(ref))
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
import requests

from .corpus import TimelineAnnotation
from .errors import BackendUnavailable, EmptyReference

EMBED_URL_ENV = "EMBED_URL"
EMBED_BATCH_LIMIT = 512


class DistanceMetric(Protocol):
    """Contract for event-string distances.

    ``distance(a, b)`` is ≥ 0, symmetric up to 1e-9, and 0 (up to 1e-9) for
    identical strings. ``prepare`` is called once per timeline pair with all
    event strings so remote metrics can batch their lookups.
    """

    name: str

    def prepare(self, ref_events: Sequence[str], pred_events: Sequence[str]) -> None:
        ...

    def distance(self, a: str, b: str) -> float:
        ...


def levenshtein_ops(a: str, b: str) -> int:
    """Minimum number of single-character edits turning ``a`` into ``b``."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    current = [0] * (len(b) + 1)
    for i, ch_a in enumerate(a, start=1):
        current[0] = i
        for j, ch_b in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ch_a != ch_b),
            )
        previous, current = current, previous
    return previous[len(b)]


def normalized_edit_distance(a: str, b: str) -> float:
    """Edit operations divided by the longer length; 0.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein_ops(a, b) / longest


class EditDistanceMetric:
    """Normalized character-level edit distance, range [0, 1]."""

    name = "edit"

    def prepare(self, ref_events: Sequence[str], pred_events: Sequence[str]) -> None:
        return None

    def distance(self, a: str, b: str) -> float:
        return normalized_edit_distance(a, b)


class EmbeddingMetric:
    """Cosine distance (1 − dot product) over service-provided embeddings.

    Vectors come from the embedding service's ``POST /embed`` endpoint in
    batches of up to 512 texts and are cached by string for the lifetime of
    the metric. Received vectors are re-normalized client-side so the
    self-distance contract holds at float precision, and tiny negative
    distances from rounding are clamped to 0. Range [0, 2].

    The service base URL comes from the constructor or the ``EMBED_URL``
    environment variable.
    """

    name = "embedding"

    def __init__(
        self,
        url: str | None = None,
        session: requests.Session | None = None,
        timeout_seconds: float = 60.0,
    ) -> None:
        resolved = url or os.environ.get(EMBED_URL_ENV)
        if not resolved:
            raise BackendUnavailable(
                f"no embedding service URL; pass one or set {EMBED_URL_ENV}"
            )
        self.url = resolved.rstrip("/")
        self.session = session or requests.Session()
        self.timeout_seconds = timeout_seconds
        self._vectors: dict[str, np.ndarray] = {}

    def health(self) -> dict:
        """The service's /health payload; raises if it is not ready."""
        try:
            response = self.session.get(
                f"{self.url}/health", timeout=self.timeout_seconds
            )
        except requests.RequestException as exc:
            raise BackendUnavailable(f"embedding service unreachable: {exc}") from exc
        if response.status_code != 200:
            raise BackendUnavailable(
                f"embedding service not ready: HTTP {response.status_code}"
            )
        return response.json()

    def _fetch(self, texts: list[str]) -> None:
        for start in range(0, len(texts), EMBED_BATCH_LIMIT):
            chunk = texts[start : start + EMBED_BATCH_LIMIT]
            try:
                response = self.session.post(
                    f"{self.url}/embed",
                    json={"texts": chunk},
                    timeout=self.timeout_seconds,
                )
            except requests.RequestException as exc:
                raise BackendUnavailable(
                    f"embedding service unreachable: {exc}"
                ) from exc
            if response.status_code != 200:
                raise BackendUnavailable(
                    f"embed request failed: HTTP {response.status_code}: "
                    f"{response.text[:200]}"
                )
            try:
                vectors = response.json()["vectors"]
            except (ValueError, KeyError) as exc:
                raise BackendUnavailable(f"malformed embed response: {exc}") from exc
            if len(vectors) != len(chunk):
                raise BackendUnavailable(
                    f"embed response length {len(vectors)} != request {len(chunk)}"
                )
            for text, vector in zip(chunk, vectors):
                array = np.asarray(vector, dtype=np.float64)
                norm = np.linalg.norm(array)
                if norm == 0:
                    raise BackendUnavailable(f"zero-norm embedding for {text!r:.60}")
                self._vectors[text] = array / norm

    def prepare(self, ref_events: Sequence[str], pred_events: Sequence[str]) -> None:
        """Fetch every uncached event string in one batched pass."""
        wanted: list[str] = []
        seen = set()
        for text in list(ref_events) + list(pred_events):
            if text not in self._vectors and text not in seen:
                wanted.append(text)
                seen.add(text)
        if wanted:
            self._fetch(wanted)

    def distance(self, a: str, b: str) -> float:
        self.prepare((a,), (b,))
        similarity = float(np.dot(self._vectors[a], self._vectors[b]))
        return max(1.0 - similarity, 0.0)


@dataclass(frozen=True)
class MatchedPair:
    """One aligned (reference, predicted) event pair."""

    ref_event: str
    pred_event: str
    distance: float
    t_ref: float
    t_pred: float
    ref_index: int
    pred_index: int


def match_distance_matrix(distances: np.ndarray) -> list[tuple[int, int, float]]:
    """Best-match selection over a precomputed distance matrix.

    Rows index reference events, columns predicted events; entries must be
    finite. Returns (row, column, distance) triples in selection order:
    repeatedly the globally minimal entry, ties broken by smaller row then
    smaller column, with the chosen row and column removed from play.
    """
    remaining = np.array(distances, dtype=float, copy=True)
    if remaining.ndim != 2:
        raise ValueError("distance matrix must be 2-dimensional")
    n_ref, n_pred = remaining.shape
    selections: list[tuple[int, int, float]] = []
    for _ in range(min(n_ref, n_pred)):
        flat = int(np.argmin(remaining))
        row, column = divmod(flat, n_pred)
        selections.append((row, column, float(remaining[row, column])))
        remaining[row, :] = np.inf
        remaining[:, column] = np.inf
    return selections


def best_match(
    ref: TimelineAnnotation,
    pred: TimelineAnnotation,
    metric: DistanceMetric,
) -> list[MatchedPair]:
    """Align two timelines one-to-one by greedy global-minimum selection.

    Empty input on either side yields an empty list. The first returned pair
    always attains the global minimum distance over the full cross product.
    """
    if not ref.events or not pred.events:
        return []
    ref_texts = ref.texts()
    pred_texts = pred.texts()
    metric.prepare(ref_texts, pred_texts)
    matrix = np.empty((len(ref_texts), len(pred_texts)), dtype=float)
    for i, a in enumerate(ref_texts):
        for j, b in enumerate(pred_texts):
            matrix[i, j] = metric.distance(a, b)
    return [
        MatchedPair(
            ref_event=ref.events[i].event,
            pred_event=pred.events[j].event,
            distance=d,
            t_ref=ref.events[i].time_hours,
            t_pred=pred.events[j].time_hours,
            ref_index=i,
            pred_index=j,
        )
        for i, j, d in match_distance_matrix(matrix)
    ]


@dataclass(frozen=True)
class ThresholdResult:
    """Pairs surviving a distance threshold, with the event match rate."""

    matched: tuple[MatchedPair, ...]
    match_rate: float


def apply_threshold(
    pairs: Sequence[MatchedPair], tau: float, ref_size: int
) -> ThresholdResult:
    """Keep pairs with distance ≤ tau; rate them against the reference size.

    Args:
        pairs: Output of best_match.
        tau: Inclusive distance threshold, ≥ 0.
        ref_size: Number of reference events (the match-rate denominator).

    Raises:
        EmptyReference: ``ref_size`` is 0, making the rate undefined.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if ref_size == 0:
        raise EmptyReference("match rate is undefined for an empty reference")
    matched = tuple(p for p in pairs if p.distance <= tau)
    return ThresholdResult(matched=matched, match_rate=len(matched) / ref_size)
