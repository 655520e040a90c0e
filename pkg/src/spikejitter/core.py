"""Canonical spike-train data model.

Spike trains, trial sets and their concatenated view, jitter-window
partitions, per-window spike counts, and the pattern decomposition /
encoding that conditions pattern jitter.  All types are immutable after
construction and safe to share across concurrent workers; the operations
here are pure functions.

Conventions
-----------
* Windows and trials are half-open ``[a, a + width)``; a spike exactly on
  a boundary belongs to the window on the right.
* A trailing partial window (length < delta) is *frozen*: spikes in it
  are conditioned on and never moved by any resampler.
* Discrete trains (``resolution > 0``) keep every spike on the sampling
  grid and allow at most one spike per time bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpikeTrain",
    "TrialSet",
    "WindowPartition",
    "IntervalCounts",
    "PatternEncoding",
    "interval_counts",
    "pattern_decompose",
    "pattern_encode",
    "history_bins",
]

# Relative slack used when validating grid alignment of discrete times.
_GRID_RTOL = 1e-6


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """A sorted sequence of spike times on ``[0, duration)``.

    Parameters
    ----------
    times : array_like
        Spike times in seconds, non-decreasing.
    duration : float
        Total observation length in seconds.
    resolution : float, optional
        Sampling bin width in seconds; ``0`` means continuous time.
        Discrete times are snapped onto the grid and must be unique
        per bin.
    """

    times: np.ndarray
    duration: float
    resolution: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1:
            raise ValueError("spike times must be one-dimensional")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.resolution < 0:
            raise ValueError("resolution must be >= 0")
        if self.resolution > 0:
            bins = np.round(times / self.resolution)
            off = np.abs(times - bins * self.resolution)
            if off.size and off.max() > _GRID_RTOL * self.resolution:
                raise ValueError("discrete spike times are not on the sampling grid")
            times = bins * self.resolution
            if np.any(np.diff(bins) < 1):
                raise ValueError("discrete trains allow at most one spike per bin")
        elif np.any(np.diff(times) < 0):
            raise ValueError("spike times must be sorted")
        if times.size and (times[0] < 0 or times[-1] >= self.duration):
            raise ValueError("spike times must lie in [0, duration)")
        object.__setattr__(self, "times", _readonly(times))

    @property
    def n_spikes(self) -> int:
        return int(self.times.size)

    @property
    def is_discrete(self) -> bool:
        return self.resolution > 0

    def bins(self) -> np.ndarray:
        """Integer bin index of every spike (discrete trains only)."""
        if not self.is_discrete:
            raise ValueError("bins() requires a discrete train")
        return np.round(self.times / self.resolution).astype(np.int64)

    @property
    def n_bins(self) -> int:
        if not self.is_discrete:
            raise ValueError("n_bins requires a discrete train")
        return int(round(self.duration / self.resolution))

    @classmethod
    def from_bins(cls, bins, duration: float, resolution: float) -> "SpikeTrain":
        bins = np.asarray(bins, dtype=np.int64)
        return cls(bins * resolution, duration=duration, resolution=resolution)

    def replace_times(self, times) -> "SpikeTrain":
        return SpikeTrain(times, duration=self.duration, resolution=self.resolution)


@dataclass(frozen=True, eq=False)
class TrialSet:
    """Per-(neuron, trial) spike trains plus the concatenated view.

    ``trains[neuron][trial]`` holds trial-relative times on
    ``[0, trial_length)``.  The concatenated view maps trial ``k``
    (0-based) onto the absolute interval ``[k, k+1) * trial_length``;
    trial-relative time is recovered as absolute time mod trial_length.
    """

    trial_length: float
    trains: tuple[tuple[SpikeTrain, ...], ...]
    resolution: float = 0.0

    def __post_init__(self) -> None:
        if self.trial_length <= 0:
            raise ValueError("trial_length must be positive")
        trains = tuple(tuple(row) for row in self.trains)
        if not trains or not trains[0]:
            raise ValueError("need at least one neuron and one trial")
        n_trials = len(trains[0])
        for row in trains:
            if len(row) != n_trials:
                raise ValueError("all neurons must have the same number of trials")
            for tr in row:
                if abs(tr.duration - self.trial_length) > 1e-12 * max(1.0, self.trial_length):
                    raise ValueError("trial duration differs from trial_length")
                if tr.resolution != self.resolution:
                    raise ValueError("train resolution differs from trial set resolution")
        if self.resolution > 0:
            ratio = self.trial_length / self.resolution
            if abs(ratio - round(ratio)) > _GRID_RTOL:
                raise ValueError("trial_length must be a multiple of the resolution")
        object.__setattr__(self, "trains", trains)

    @property
    def n_neurons(self) -> int:
        return len(self.trains)

    @property
    def n_trials(self) -> int:
        return len(self.trains[0])

    @property
    def duration(self) -> float:
        """Length of the concatenated recording."""
        return self.n_trials * self.trial_length

    def concatenated(self, neuron: int) -> SpikeTrain:
        """Single absolute-time train over ``[0, n_trials * trial_length)``."""
        parts = [
            tr.times + k * self.trial_length
            for k, tr in enumerate(self.trains[neuron])
        ]
        times = np.concatenate(parts) if parts else np.empty(0)
        return SpikeTrain(times, duration=self.duration, resolution=self.resolution)

    @classmethod
    def from_concatenated(
        cls,
        trains,
        n_trials: int,
        trial_length: float,
        resolution: float = 0.0,
    ) -> "TrialSet":
        """Split absolute-time trains back into trials (half-open boundaries)."""
        boundaries = np.arange(n_trials + 1) * trial_length
        rows = []
        for tr in trains:
            idx = np.searchsorted(boundaries, tr.times, side="right") - 1
            if tr.times.size and (idx.min() < 0 or idx.max() >= n_trials):
                raise ValueError("concatenated spike outside the trial span")
            row = []
            for k in range(n_trials):
                rel = tr.times[idx == k] - boundaries[k]
                row.append(SpikeTrain(rel, duration=trial_length, resolution=resolution))
            rows.append(tuple(row))
        return cls(trial_length=trial_length, trains=tuple(rows), resolution=resolution)

    def with_neuron(self, neuron: int, trials) -> "TrialSet":
        """Copy of this trial set with one neuron's trials replaced."""
        rows = list(self.trains)
        rows[neuron] = tuple(trials)
        return TrialSet(
            trial_length=self.trial_length,
            trains=tuple(rows),
            resolution=self.resolution,
        )

    def pooled_relative(self, neuron: int) -> np.ndarray:
        """All trial-relative spike times of one neuron, sorted."""
        parts = [tr.times for tr in self.trains[neuron]]
        return np.sort(np.concatenate(parts)) if parts else np.empty(0)

    def counts_per_trial(self, neuron: int) -> np.ndarray:
        return np.array([tr.n_spikes for tr in self.trains[neuron]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class WindowPartition:
    """Tiling of ``[origin, duration)`` into half-open windows of length delta.

    Windows are ``[origin + k*delta, origin + (k+1)*delta)`` for
    ``k = 0 .. n_windows-1``.  Whatever is left over at the end (and
    anything before ``origin``) is the frozen region.
    """

    delta: float
    duration: float
    origin: float = 0.0
    boundaries: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValueError("partition delta must be positive")
        if not 0 <= self.origin < self.duration:
            raise ValueError("origin must lie in [0, duration)")
        n_full = int((self.duration - self.origin) / self.delta + 1e-9)
        if n_full < 1:
            raise ValueError("partition must contain at least one full window")
        bnds = self.origin + self.delta * np.arange(n_full + 1)
        object.__setattr__(self, "boundaries", _readonly(bnds))

    @property
    def n_windows(self) -> int:
        return int(self.boundaries.size - 1)

    @property
    def has_frozen_tail(self) -> bool:
        return bool(self.boundaries[-1] < self.duration - 1e-12)

    def window_index(self, times) -> np.ndarray:
        """Window index per time; -1 marks the frozen region."""
        times = np.asarray(times, dtype=np.float64)
        idx = np.searchsorted(self.boundaries, times, side="right") - 1
        idx[idx == self.n_windows] = -1
        return idx

    def window_bounds(self, k: int) -> tuple[float, float]:
        return float(self.boundaries[k]), float(self.boundaries[k + 1])

    def bins_per_window(self, resolution: float) -> int:
        """Number of sampling bins per window (discrete use only)."""
        if resolution <= 0:
            raise ValueError("bins_per_window requires a positive resolution")
        for name, value in (("delta", self.delta), ("origin", self.origin)):
            ratio = value / resolution
            if abs(ratio - round(ratio)) > _GRID_RTOL:
                raise ValueError(f"partition {name} is not a multiple of the resolution")
        return int(round(self.delta / resolution))


@dataclass(frozen=True, eq=False)
class IntervalCounts:
    """Spike counts per full window, with frozen-region spikes kept apart."""

    counts: np.ndarray
    frozen: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", _readonly(counts))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalCounts):
            return NotImplemented
        return self.frozen == other.frozen and np.array_equal(self.counts, other.counts)


def interval_counts(train: SpikeTrain, part: WindowPartition) -> IntervalCounts:
    """Count spikes per window of ``part`` (frozen spikes reported separately)."""
    if train.duration > part.duration + 1e-12:
        raise ValueError("train extends beyond the partition span")
    idx = part.window_index(train.times)
    frozen = int(np.count_nonzero(idx < 0))
    counts = np.bincount(idx[idx >= 0], minlength=part.n_windows)
    return IntervalCounts(counts=counts, frozen=frozen)


def history_bins(history: float, resolution: float) -> int:
    """Largest bin gap still joined into a pattern: gap*res <= history."""
    return int(np.floor(history / resolution + _GRID_RTOL))


def _pattern_breaks(train: SpikeTrain, history: float) -> np.ndarray:
    """Boolean per spike: True where a new pattern starts."""
    n = train.n_spikes
    starts = np.ones(n, dtype=bool)
    if n > 1:
        if train.is_discrete:
            gaps = np.diff(train.bins())
            starts[1:] = gaps > history_bins(history, train.resolution)
        else:
            starts[1:] = np.diff(train.times) > history
    return starts


def pattern_decompose(train: SpikeTrain, history: float) -> list[np.ndarray]:
    """Split a train into maximal runs with consecutive gaps <= history.

    A gap exactly equal to ``history`` stays inside the pattern.  Returns
    the list of per-pattern spike-time arrays, in temporal order.
    """
    if history < 0:
        raise ValueError("history must be >= 0")
    starts = _pattern_breaks(train, history)
    edges = np.flatnonzero(starts)
    return [train.times[a:b] for a, b in zip(edges, np.append(edges[1:], train.n_spikes))]


@dataclass(frozen=True, eq=False)
class PatternEncoding:
    """The per-spike encoding conditioning pattern jitter.

    Row ``l`` holds a pattern-start flag and, for starts, the jitter
    window containing the spike; for non-starts, the preceding
    interspike interval.  For discrete trains the interval is also kept
    in exact integer bins, which is what equality compares.
    """

    flags: np.ndarray
    windows: np.ndarray
    isis: np.ndarray
    isi_bins: np.ndarray | None
    history: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "flags", _readonly(np.asarray(self.flags, dtype=np.int8)))
        object.__setattr__(self, "windows", _readonly(np.asarray(self.windows, dtype=np.int64)))
        object.__setattr__(self, "isis", _readonly(np.asarray(self.isis, dtype=np.float64)))
        if self.isi_bins is not None:
            object.__setattr__(
                self, "isi_bins", _readonly(np.asarray(self.isi_bins, dtype=np.int64))
            )

    @property
    def n_spikes(self) -> int:
        return int(self.flags.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PatternEncoding):
            return NotImplemented
        if self.history != other.history:
            return False
        if not np.array_equal(self.flags, other.flags):
            return False
        if not np.array_equal(self.windows, other.windows):
            return False
        if self.isi_bins is not None and other.isi_bins is not None:
            return np.array_equal(self.isi_bins, other.isi_bins)
        return np.array_equal(self.isis, other.isis)


def pattern_encode(train: SpikeTrain, history: float, part: WindowPartition) -> PatternEncoding:
    """Encode pattern structure and pattern-start windows of a train.

    Any train with an equal encoding has the identical pattern sequence
    and identical pattern-start windows, which is exactly the event that
    pattern jitter conditions on.
    """
    if history < 0:
        raise ValueError("history must be >= 0")
    starts = _pattern_breaks(train, history)
    windows = np.where(starts, part.window_index(train.times), -1)
    isis = np.diff(train.times, prepend=np.nan)
    isis[starts] = np.nan
    isi_bins = None
    if train.is_discrete:
        isi_bins = np.diff(train.bins(), prepend=-1)
        isi_bins[starts] = -1
    return PatternEncoding(
        flags=starts.astype(np.int8),
        windows=windows,
        isis=isis,
        isi_bins=isi_bins,
        history=history,
    )
