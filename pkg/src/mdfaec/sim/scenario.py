"""Synthetic echo scenarios: far end played through a switching room response plus near-end talk and noise."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError
from .wavio import read_wav


@dataclass(frozen=True)
class ScenarioConfig:
    sample_rate: int = 8000
    duration_s: float = 32.0
    # None disables the echo path change
    path_change_at_s: Optional[float] = 16.0
    # explicit (before, after) responses; generated from the seed when None
    impulse_responses: Optional[tuple] = None
    ir_length: int = 1024
    decay_ms: float = 25.0
    # correlation between the responses before and after the change
    path_similarity: float = 0.5
    # -inf switches the near-end talker off
    nfr_db: float = 0.0
    # -inf switches the background noise off
    noise_db: float = -20.0
    far_wav: Optional[str] = None
    near_wav: Optional[str] = None
    far_level: float = 0.1
    burst_on_s: float = 1.0
    burst_off_s: float = 1.0
    seed: int = 0
    block_size: int = 64
    partitions: int = 16

    def __post_init__(self):
        if self.sample_rate <= 0 or self.duration_s <= 0:
            raise ConfigError("sample_rate and duration_s must be positive")
        if self.block_size < 1 or self.block_size & (self.block_size - 1) or self.partitions < 1:
            raise ConfigError("block_size must be a power of two and partitions >= 1")
        if self.impulse_responses is not None:
            if len(self.impulse_responses) != 2:
                raise ConfigError("impulse_responses needs exactly two responses")
            longest = max(len(h) for h in self.impulse_responses)
        else:
            longest = self.ir_length
        if longest > self.block_size * self.partitions:
            raise ConfigError(
                f"impulse response of {longest} taps exceeds the modeled {self.block_size * self.partitions}"
            )
        if self.path_change_at_s is not None and not 0.0 <= self.path_change_at_s < self.duration_s:
            raise ConfigError("path_change_at_s must fall inside the recording")
        if not -1.0 <= self.path_similarity <= 1.0:
            raise ConfigError("path_similarity must lie in [-1, 1]")
        if self.burst_on_s < 0 or self.burst_off_s < 0 or self.burst_on_s + self.burst_off_s <= 0:
            raise ConfigError("burst durations must be non-negative and not both zero")
        for name in ("nfr_db", "noise_db"):
            v = getattr(self, name)
            if math.isnan(v) or v == math.inf:
                raise ConfigError(f"{name} must be finite or -inf")

    @property
    def num_samples(self):
        return int(round(self.duration_s * self.sample_rate))

    @property
    def change_sample(self):
        """First sample played through the second response (num_samples when there is no change)."""
        if self.path_change_at_s is None:
            return self.num_samples
        return int(round(self.path_change_at_s * self.sample_rate))


@dataclass
class Signals:
    far: np.ndarray
    mic: np.ndarray
    echo: np.ndarray
    near: np.ndarray
    # near-end talker alone, without background noise
    talk: np.ndarray
    paths: tuple = field(default_factory=tuple)
    change_sample: int = 0


def gen_impulse_response(seed, length=1024, decay_ms=25.0, sample_rate=8000):
    """White Gaussian taps under an exponential envelope, scaled to unit energy."""
    rng = np.random.default_rng(seed)
    taps = rng.standard_normal(length)
    decay = decay_ms * 1e-3 * sample_rate
    if decay > 0:
        taps *= np.exp(-np.arange(length) / decay)
    else:
        taps[1:] = 0.0
    return taps / np.linalg.norm(taps)


def related_impulse_response(h, similarity, seed, decay_ms=25.0, sample_rate=8000):
    """Unit-energy response whose inner product with the unit-energy ``h`` is about ``similarity``."""
    h = np.asarray(h, dtype=float)
    fresh = gen_impulse_response(seed, h.size, decay_ms, sample_rate)
    g = similarity * h + math.sqrt(max(0.0, 1.0 - similarity**2)) * fresh
    return g / np.linalg.norm(g)


def burst_envelope(n, sample_rate, on_s, off_s):
    """1 during talk bursts, 0 otherwise; each period starts with the silent part."""
    period = on_s + off_s
    t = np.arange(n) / sample_rate
    return (np.mod(t, period) >= off_s).astype(float)


def _fit(x, n):
    out = np.zeros(n)
    out[: min(n, x.size)] = x[:n]
    return out


def _load(path, config):
    rate, data = read_wav(path)
    if rate != config.sample_rate:
        raise ConfigError(f"{path}: sample rate {rate} Hz, scenario expects {config.sample_rate} Hz")
    return _fit(data, config.num_samples)


def _scale_to(x, reference_power, level_db):
    p = float(np.mean(x**2)) if x.size else 0.0
    if level_db == -math.inf or p == 0.0 or reference_power == 0.0:
        return np.zeros_like(x)
    return x * math.sqrt(reference_power * 10.0 ** (level_db / 10.0) / p)


def synthesize(config, far=None, near=None):
    """Build the far-end, microphone, echo and near-end streams of a scenario.

    ``far`` and ``near`` override the configured sources. The near-end
    talker is scaled so that its power over the whole file sits ``nfr_db``
    relative to the echo power; background noise is scaled the same way
    with ``noise_db``.
    """
    n = config.num_samples
    streams = np.random.SeedSequence(config.seed).spawn(5)

    if config.impulse_responses is not None:
        h1, h2 = (np.asarray(h, dtype=float) for h in config.impulse_responses)
    else:
        h1 = gen_impulse_response(streams[0], config.ir_length, config.decay_ms, config.sample_rate)
        h2 = related_impulse_response(h1, config.path_similarity, streams[1], config.decay_ms, config.sample_rate)

    if far is not None:
        far = _fit(np.asarray(far, dtype=float), n)
    elif config.far_wav is not None:
        far = _load(config.far_wav, config)
    else:
        far = config.far_level * np.random.default_rng(streams[2]).standard_normal(n)

    c = config.change_sample
    echo = np.empty(n)
    echo[:c] = np.convolve(far[:c], h1)[:c]
    if c < n:
        echo[c:] = np.convolve(far, h2)[c:n]

    if near is not None:
        source = _fit(np.asarray(near, dtype=float), n)
    elif config.near_wav is not None:
        source = _load(config.near_wav, config)
    else:
        env = burst_envelope(n, config.sample_rate, config.burst_on_s, config.burst_off_s)
        source = env * np.random.default_rng(streams[3]).standard_normal(n)

    echo_power = float(np.mean(echo**2))
    talk = _scale_to(source, echo_power, config.nfr_db)
    noise = _scale_to(np.random.default_rng(streams[4]).standard_normal(n), echo_power, config.noise_db)
    v = talk + noise
    return Signals(far=far, mic=echo + v, echo=echo, near=v, talk=talk, paths=(h1, h2), change_sample=c)
