"""Synthetic spike-train generators for the simulation studies.

Implements the bump-mixture intensities, Cox trial sets, the
variance-reduction coupling across bandwidths, injected synchrony, and
the burst construction.  Everything is driven by :func:`~spikejitter.rng.substream`
keys, so a given (seed, purpose, neuron, trial) always reproduces the
same spikes no matter how trials are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SpikeTrain, TrialSet
from .rng import substream

__all__ = [
    "BumpIntensity",
    "PiecewiseConstantIntensity",
    "FIG4_CENTERS",
    "sample_poisson",
    "sample_cox_trialset",
    "fixed_intensity_trialset",
    "piecewise_constant_trialset",
    "inject_synchrony",
    "burstify",
]

# Fixed sorted bump centers used by the bandwidth-family experiments.
FIG4_CENTERS = np.array([
    0.032, 0.034, 0.036, 0.046, 0.097, 0.098, 0.127, 0.142, 0.158, 0.171,
    0.277, 0.278, 0.317, 0.392, 0.422, 0.485, 0.547, 0.632, 0.655, 0.656,
    0.679, 0.695, 0.706, 0.743, 0.758, 0.792, 0.800, 0.815, 0.823, 0.849,
    0.906, 0.913, 0.916, 0.934, 0.950, 0.957, 0.958, 0.959, 0.965, 0.971,
])


def _wrap_reach(scale: float) -> int:
    # Enough +-1 copies that the discarded tail mass is < 1e-10.
    return max(2, int(np.ceil(1.0 + 23.0 * scale)))


@dataclass(frozen=True)
class BumpIntensity:
    """Baseline plus wrapped double-exponential bumps on one trial.

    ``rate(t) = baseline + sum_j laplace(t; center_j, sigma/sqrt(2))``
    with each bump wrapped around ``[0, trial_length)`` so its integral
    stays exactly 1; the total integral is ``baseline * trial_length +
    len(centers)`` for every bandwidth.
    """

    baseline: float
    centers: np.ndarray
    sigma: float
    trial_length: float = 1.0

    def __post_init__(self) -> None:
        centers = np.asarray(self.centers, dtype=np.float64)
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.baseline < 0:
            raise ValueError("baseline must be >= 0")
        if centers.size and (centers.min() < 0 or centers.max() >= self.trial_length):
            raise ValueError("centers must lie in [0, trial_length)")
        object.__setattr__(self, "centers", centers)

    @property
    def scale(self) -> float:
        return self.sigma / np.sqrt(2.0)

    @property
    def integral(self) -> float:
        return self.baseline * self.trial_length + self.centers.size

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        b = self.scale
        reach = _wrap_reach(b / self.trial_length)
        shifts = np.arange(-reach, reach + 1) * self.trial_length
        # (n, centers, shifts)
        d = t[:, None, None] + shifts[None, None, :] - self.centers[None, :, None]
        bumps = np.exp(-np.abs(d) / b).sum(axis=(1, 2)) / (2.0 * b)
        out = self.baseline + bumps
        out[(t < 0) | (t >= self.trial_length)] = 0.0
        return out

    def upper_bound(self) -> float:
        """Exact sup of the rate (piecewise-convex between centers)."""
        if not self.centers.size:
            return self.baseline
        return float(self(self.centers).max())

    def sample_bump(self, j: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw from bump ``j``: double exponential wrapped mod trial_length."""
        u = rng.random(size)
        raw = self.centers[j] - self.scale * np.sign(u - 0.5) * np.log1p(-2.0 * np.abs(u - 0.5))
        return np.mod(raw, self.trial_length)


@dataclass(frozen=True)
class PiecewiseConstantIntensity:
    """Rate that is constant on successive windows of length delta."""

    rates: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        rates = np.asarray(self.rates, dtype=np.float64)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if np.any(rates < 0):
            raise ValueError("rates must be >= 0")
        object.__setattr__(self, "rates", rates)

    @property
    def trial_length(self) -> float:
        return self.rates.size * self.delta

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        idx = np.clip((t / self.delta).astype(np.int64), 0, self.rates.size - 1)
        out = self.rates[idx]
        out = np.where((t < 0) | (t >= self.trial_length), 0.0, out)
        return out

    def upper_bound(self) -> float:
        return float(self.rates.max()) if self.rates.size else 0.0


def sample_poisson(rate_fn, duration: float, rng: np.random.Generator) -> SpikeTrain:
    """Draw one inhomogeneous Poisson train by thinning.

    ``rate_fn`` must be callable on a time array and expose
    ``upper_bound()``; candidates are generated homogeneously at the
    bound and accepted with probability ``rate(t)/bound``.
    """
    bound = float(rate_fn.upper_bound())
    if bound < 0:
        raise ValueError("rate must be non-negative")
    if bound == 0:
        return SpikeTrain(np.empty(0), duration=duration)
    n = rng.poisson(bound * duration)
    t = rng.uniform(0.0, duration, size=n)
    rates = rate_fn(t)
    if np.any(rates < 0):
        raise ValueError("rate must be non-negative")
    keep = rng.random(n) * bound < rates
    return SpikeTrain(np.sort(t[keep]), duration=duration)


def sample_cox_trialset(
    n_trials: int,
    n_neurons: int,
    sigma: float,
    seed: int,
    baseline: float = 10.0,
    n_bumps: int = 40,
    trial_length: float = 1.0,
    purpose: str = "cox",
) -> TrialSet:
    """Cox trial set: fresh uniform bump centers per trial, shared by all neurons.

    Each trial draws new centers; every neuron is an independent Poisson
    realization of that trial's shared random intensity.
    """
    if n_trials < 1 or n_neurons < 1:
        raise ValueError("need at least one trial and one neuron")
    rows = [[] for _ in range(n_neurons)]
    for k in range(n_trials):
        centers = substream(seed, purpose, "centers", k).uniform(0.0, trial_length, size=n_bumps)
        intensity = BumpIntensity(baseline, centers, sigma, trial_length)
        for i in range(n_neurons):
            train = sample_poisson(intensity, trial_length, substream(seed, purpose, i, k))
            rows[i].append(train)
    return TrialSet(trial_length=trial_length, trains=tuple(tuple(r) for r in rows))


def fixed_intensity_trialset(
    sigma: float,
    centers,
    n_trials: int,
    seed: int,
    n_neurons: int = 2,
    baseline: float = 10.0,
    trial_length: float = 1.0,
    purpose: str = "fixedband",
) -> TrialSet:
    """Fixed-center trial set with the bandwidth-coupling construction.

    For a given seed, the baseline spikes and the per-(trial, bump)
    Poisson counts are identical for every ``sigma``; only the bump
    sample positions respond to the bandwidth (through common random
    numbers), so datasets with different bandwidths are maximally
    comparable.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    centers = np.asarray(centers, dtype=np.float64)
    intensity = BumpIntensity(baseline, centers, sigma, trial_length)
    rows = []
    for i in range(n_neurons):
        counts = substream(seed, purpose, "counts", i).poisson(
            1.0, size=(n_trials, centers.size)
        )
        trials = []
        for k in range(n_trials):
            base_rng = substream(seed, purpose, "baseline", i, k)
            n_base = base_rng.poisson(baseline * trial_length)
            times = [base_rng.uniform(0.0, trial_length, size=n_base)]
            for j in range(centers.size):
                m = int(counts[k, j])
                if m:
                    bump_rng = substream(seed, purpose, "bump", i, k, j)
                    times.append(intensity.sample_bump(j, m, bump_rng))
            trials.append(SpikeTrain(np.sort(np.concatenate(times)), duration=trial_length))
        rows.append(tuple(trials))
    return TrialSet(trial_length=trial_length, trains=tuple(rows))


def piecewise_constant_trialset(
    rates_per_window,
    delta: float,
    n_trials: int,
    n_neurons: int,
    seed: int,
    purpose: str = "pwconst",
) -> TrialSet:
    """Independent Poisson trains with per-window constant rates.

    ``rates_per_window`` has shape (n_neurons, n_windows); each trial is
    an independent realization.  This is the canonical member of the
    interval-jitter null when delta matches the jitter windows.
    """
    rates = np.asarray(rates_per_window, dtype=np.float64)
    if rates.ndim != 2 or rates.shape[0] != n_neurons:
        raise ValueError("rates_per_window must have shape (n_neurons, n_windows)")
    trial_length = rates.shape[1] * delta
    rows = [[] for _ in range(n_neurons)]
    for i in range(n_neurons):
        lam = rates[i] * delta
        for k in range(n_trials):
            rng = substream(seed, purpose, i, k)
            counts = rng.poisson(lam)
            starts = np.repeat(np.arange(rates.shape[1]) * delta, counts)
            times = starts + rng.random(counts.sum()) * delta
            rows[i].append(SpikeTrain(np.sort(times), duration=trial_length))
    return TrialSet(trial_length=trial_length, trains=tuple(tuple(r) for r in rows))


def inject_synchrony(
    base: TrialSet,
    donor: TrialSet,
    h: float,
    seed: int,
    full_rate: float = 50.0,
    offset: float = 0.0,
    purpose: str = "inject",
) -> TrialSet:
    """Thin two trains and superimpose shared donor spikes at rate ``h``.

    Every spike of the two base trains survives independently with
    probability ``1 - h/full_rate``; the donor's spikes selected with
    probability ``h/full_rate`` are added to *both* outputs.  Marginal
    single-train distributions are preserved while lag-0 dependence is
    injected.  ``offset > 0`` optionally displaces each injected copy by
    an independent uniform ``+-offset/2`` (off by default; injected
    spikes are then no longer bitwise shared).

    The same seed reuses identical elimination variables across
    different ``h``, so datasets for an ``h`` grid are coupled; ``h=0``
    returns the base data unchanged.
    """
    if not 0 <= h <= full_rate:
        raise ValueError("h must lie in [0, full_rate]")
    if base.n_neurons != 2 or donor.n_neurons != 1:
        raise ValueError("base must have 2 neurons and donor 1")
    if base.n_trials != donor.n_trials:
        raise ValueError("base and donor must have the same number of trials")
    p = h / full_rate
    rows = [[], []]
    for k in range(base.n_trials):
        donor_times = donor.trains[0][k].times
        u_donor = substream(seed, purpose, "donor", k).random(donor_times.size)
        picked = donor_times[u_donor < p]
        for i in (0, 1):
            times = base.trains[i][k].times
            u = substream(seed, purpose, i, k).random(times.size)
            kept = times[u <= 1.0 - p]
            injected = picked
            if offset > 0 and picked.size:
                shift = substream(seed, purpose, "offset", i, k).uniform(
                    -offset / 2, offset / 2, size=picked.size
                )
                injected = np.clip(picked + shift, 0.0, np.nextafter(base.trial_length, 0.0))
            merged = np.sort(np.concatenate([kept, injected]))
            rows[i].append(SpikeTrain(merged, duration=base.trial_length))
    return TrialSet(trial_length=base.trial_length, trains=(tuple(rows[0]), tuple(rows[1])))


def burstify(
    ts: TrialSet,
    seed: int,
    gap1: tuple[float, float] = (0.008, 0.009),
    gap2: tuple[float, float] = (0.016, 0.017),
    purpose: str = "burst",
    max_attempts: int = 10_000,
) -> TrialSet:
    """Turn each trial into bursting triplets, conserving spike counts.

    With ``d = floor(N/3)`` per (neuron, trial): remove ``2d`` spikes at
    random, then pick ``d`` of the survivors and give each two extra
    spikes, lagged uniformly in ``gap1`` and ``gap2`` after it.  If any
    new spike lands outside the trial, the whole trial is redone.
    """
    if ts.trial_length <= gap2[1]:
        raise ValueError("trial_length must exceed the burst span")
    rows = []
    for i in range(ts.n_neurons):
        trials = []
        for k in range(ts.n_trials):
            times = ts.trains[i][k].times
            n = times.size
            d = n // 3
            if d == 0:
                trials.append(ts.trains[i][k])
                continue
            rng = substream(seed, purpose, i, k)
            for attempt in range(max_attempts):
                survivors = rng.choice(n, size=n - 2 * d, replace=False)
                kept = times[np.sort(survivors)]
                leaders = np.sort(rng.choice(kept.size, size=d, replace=False))
                first = kept[leaders] + rng.uniform(gap1[0], gap1[1], size=d)
                second = kept[leaders] + rng.uniform(gap2[0], gap2[1], size=d)
                new = np.concatenate([kept, first, second])
                if new.max() < ts.trial_length:
                    trials.append(SpikeTrain(np.sort(new), duration=ts.trial_length))
                    break
            else:
                raise RuntimeError(
                    f"burstify could not place bursts in trial {k} of neuron {i}"
                )
        rows.append(tuple(trials))
    return TrialSet(trial_length=ts.trial_length, trains=tuple(rows))
