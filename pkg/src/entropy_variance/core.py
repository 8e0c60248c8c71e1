"""Validated distribution and histogram values, plus file ingestion.

Both types wrap read-only numpy arrays and are immutable after construction.
All downstream modules consume these rather than raw sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import AllZero, NegativeEntry, ParseError, SumNotOne

SUM_TOLERANCE = 1e-9
# Inputs closer than this to unit sum are stored untouched, which keeps
# save/load round trips bit-exact.
_RENORMALIZE_THRESHOLD = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """Probabilities ``probs`` over ``m`` bins, non-negative and summing to one.

    Zero entries are legal; use :func:`restrict_to_support` before calling
    functionals that need strictly positive probabilities.
    """

    probs: np.ndarray
    strictly_positive: bool = field(init=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        object.__setattr__(self, "probs", _frozen(probs))
        object.__setattr__(self, "strictly_positive", bool(np.all(probs > 0)))

    @property
    def m(self) -> int:
        return int(self.probs.size)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def __len__(self):
        return self.m

    def __eq__(self, other):
        if not isinstance(other, ProbabilityDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"ProbabilityDistribution(m={self.m}, probs={self.probs.tolist()!r})"


@dataclass(frozen=True, eq=False)
class CountHistogram:
    """Visit counts per bin; ``n`` is the total number of observations."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", _frozen(counts))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def m(self) -> int:
        return int(self.counts.size)

    @property
    def m_support(self) -> int:
        """Number of bins with at least one visit."""
        return int(np.count_nonzero(self.counts))

    @property
    def rates(self) -> np.ndarray:
        return self.counts / self.n

    def __len__(self):
        return self.m

    def __eq__(self, other):
        if not isinstance(other, CountHistogram):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash(self.counts.tobytes())

    def __repr__(self):
        return f"CountHistogram(n={self.n}, counts={self.counts.tolist()!r})"


def make_distribution(values: Sequence[float], normalize: bool = False) -> ProbabilityDistribution:
    """Validate ``values`` and wrap them as a :class:`ProbabilityDistribution`.

    With ``normalize=True`` the entries are divided by their sum. Otherwise
    they must already sum to one within ``1e-9``; small drift is then removed
    by renormalizing.

    >>> make_distribution([1, 2, 3, 4, 5], normalize=True).probs[0] * 15
    1.0
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise AllZero("distribution has no entries")
    if not np.all(np.isfinite(arr)):
        raise ParseError("distribution contains non-finite values")
    if np.any(arr < 0):
        i = int(np.flatnonzero(arr < 0)[0])
        raise NegativeEntry(f"entry {i} is negative ({arr[i]!r})")
    total = math.fsum(arr)
    if total == 0:
        raise AllZero("all entries are zero")
    if not normalize and abs(total - 1.0) > SUM_TOLERANCE:
        raise SumNotOne(f"entries sum to {total!r}, not 1 (tolerance {SUM_TOLERANCE})")
    if normalize or abs(total - 1.0) > _RENORMALIZE_THRESHOLD:
        arr = arr / total
    return ProbabilityDistribution(arr)


def make_histogram(counts: Sequence[int]) -> CountHistogram:
    arr = np.asarray(counts)
    if arr.size == 0:
        raise AllZero("histogram has no bins")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise ParseError("histogram counts must be integers")
    elif arr.dtype.kind not in "iub":
        raise ParseError(f"histogram counts must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64).ravel()
    if np.any(arr < 0):
        i = int(np.flatnonzero(arr < 0)[0])
        raise NegativeEntry(f"bin {i} has negative count ({arr[i]})")
    if not np.any(arr > 0):
        raise AllZero("histogram has no observations")
    return CountHistogram(arr)


def restrict_to_support(dist: ProbabilityDistribution) -> ProbabilityDistribution:
    """Drop zero-probability bins, keeping the order of the rest."""
    if dist.strictly_positive:
        return dist
    return ProbabilityDistribution(dist.probs[dist.support])


def uniform(m: int) -> ProbabilityDistribution:
    return ProbabilityDistribution(np.full(m, 1.0 / m))


def arithmetic(m: int) -> ProbabilityDistribution:
    """Distribution with ``s_i`` proportional to ``i`` for ``i = 1..m``."""
    return make_distribution(np.arange(1, m + 1, dtype=float), normalize=True)


# -- file ingestion ---------------------------------------------------------


def _parse_number(token: str, line: int, path, integer: bool):
    try:
        return int(token) if integer else float(token)
    except ValueError:
        pass
    if integer:
        try:
            value = float(token)
        except ValueError:
            value = None
        if value is not None and math.isfinite(value) and value.is_integer():
            return int(value)
        if value is not None:
            raise ParseError(f"expected an integer count, got {token!r}", line, path)
    raise ParseError(f"cannot parse {token!r} as a number", line, path)


def _read_values(path, integer: bool) -> list:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    stripped = text.strip()
    if not stripped:
        raise ParseError("file is empty", None, path)

    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
        if not isinstance(data, list):
            raise ParseError("JSON input must be an array of numbers", None, path)
        values = []
        for i, item in enumerate(data):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ParseError(f"JSON element {i} is not a number: {item!r}", None, path)
            if integer and not float(item).is_integer():
                raise ParseError(f"JSON element {i} is not an integer count: {item!r}", None, path)
            values.append(int(item) if integer else float(item))
        return values

    values = []
    header_line = _first_content_line(text)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip().rstrip(",").strip()
        if not token or token.startswith("#"):
            continue
        if "," in token:
            raise ParseError("expected a single column", lineno, path)
        if lineno == header_line:
            try:
                float(token)
            except ValueError:
                # optional CSV header
                continue
        values.append(_parse_number(token, lineno, path, integer))
    if not values:
        raise ParseError("no numeric values found", None, path)
    return values


def _first_content_line(text: str) -> int:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip()
        if token and not token.startswith("#"):
            return lineno
    return 0


def load_distribution(path, normalize: bool = False) -> ProbabilityDistribution:
    """Read a distribution from a text, single-column CSV or JSON-array file."""
    return make_distribution(_read_values(path, integer=False), normalize=normalize)


def load_histogram(path) -> CountHistogram:
    return make_histogram(_read_values(path, integer=True))


def save_distribution(dist: ProbabilityDistribution, path) -> None:
    # repr() is the shortest string that parses back to the same double
    Path(path).write_text("".join(f"{float(p)!r}\n" for p in dist.probs), encoding="utf-8")


def save_histogram(hist: CountHistogram, path) -> None:
    Path(path).write_text("".join(f"{int(c)}\n" for c in hist.counts), encoding="utf-8")
