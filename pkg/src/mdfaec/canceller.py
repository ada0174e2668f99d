"""Frame-in/frame-out echo canceller combining the MDF filter with a rate policy."""
from dataclasses import dataclass

import numpy as np

from . import dsp
from .errors import ConfigError
from .mdf import NORMALIZATIONS, MdfFilter
from .rate import NccPolicy, ProposedPolicy, compute_mu_fixed

POLICIES = ("proposed", "fixed", "ncc")


@dataclass(frozen=True)
class CancellerConfig:
    block_size: int = 64
    partitions: int = 16
    policy: str = "proposed"
    # fixed policy
    mu: float = 0.25
    # proposed policy
    rho: float = 1.0
    alpha: float = 0.9
    mu_max: float = 0.75
    bootstrap_mu: float = 0.25
    eta_init: float = 0.1
    eta_min: float = 1e-4
    eta_max: float = 1.0
    activity_threshold: float = 1e-5
    # power estimation
    smoothing: float = 0.9
    floor: float = 1e-6
    normalization: str = "summed"
    # ncc policy
    ncc_threshold: float = 0.35
    ncc_mu: float = 0.25
    ncc_window: float = 0.95
    ncc_hangover: int = 8

    def __post_init__(self):
        n = self.block_size
        if not isinstance(n, (int, np.integer)) or n < 1 or n & (n - 1):
            raise ConfigError(f"block_size must be a power of two, got {n}")
        if self.partitions < 1:
            raise ConfigError(f"partitions must be >= 1, got {self.partitions}")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}, expected one of {POLICIES}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        for name in ("mu", "mu_max", "bootstrap_mu", "ncc_mu", "alpha", "ncc_window"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 < self.smoothing < 1.0:
            raise ConfigError(f"smoothing must lie in (0, 1), got {self.smoothing}")
        if self.floor <= 0.0 or self.rho < 0.0 or self.ncc_hangover < 0:
            raise ConfigError("floor must be positive, rho and ncc_hangover non-negative")
        if not 0.0 < self.eta_min <= self.eta_init <= self.eta_max:
            raise ConfigError("need 0 < eta_min <= eta_init <= eta_max")


@dataclass(frozen=True)
class FrameDiagnostics:
    eta: float
    mu_mean: float
    residual_energy: float
    prediction_energy: float
    bootstrap_active: bool
    # ncc policy only: whether adaptation was frozen this frame
    gated: bool = False


class EchoCanceller:
    """Streaming echo canceller.

    >>> aec = EchoCanceller(CancellerConfig(block_size=4, partitions=2))
    >>> out, diag = aec.process_frame(np.zeros(4), np.ones(4))
    >>> out.tolist()
    [1.0, 1.0, 1.0, 1.0]
    """

    def __init__(self, config=None):
        self.config = config if config is not None else CancellerConfig()
        c = self.config
        self.filter = MdfFilter(c.block_size, c.partitions, c.smoothing, c.floor, c.normalization)
        shape = (c.partitions, 2 * c.block_size)
        self.policy = None
        if c.policy == "proposed":
            self.policy = ProposedPolicy(
                shape, rho=c.rho, alpha=c.alpha, mu_max=c.mu_max, bootstrap_mu=c.bootstrap_mu,
                eta_init=c.eta_init, eta_min=c.eta_min, eta_max=c.eta_max, floor=c.floor,
                activity_threshold=c.activity_threshold,
            )
        elif c.policy == "ncc":
            self.policy = NccPolicy(
                shape[0] * shape[1], threshold=c.ncc_threshold, mu_on=c.ncc_mu, window=c.ncc_window,
                hangover=c.ncc_hangover, floor=c.floor, activity_threshold=c.activity_threshold,
            )
        self.reset()

    @property
    def block_size(self):
        return self.config.block_size

    def reset(self):
        self.filter.reset()
        if self.policy is not None:
            self.policy.reset()
        n2 = 2 * self.config.block_size
        self.echo_power = np.full(n2, self.config.floor)
        self.error_power = np.full(n2, self.config.floor)

    def process_frame(self, far, mic):
        c = self.config
        far = dsp.check_length(np.asarray(far, dtype=float), c.block_size, "far-end block")
        mic = dsp.check_length(np.asarray(mic, dtype=float), c.block_size, "microphone block")
        f = self.filter
        f.ingest_far_end(far)
        y_hat, _ = f.predict_echo()
        e, e_spec, _ = f.form_error(mic, y_hat)
        self.echo_power = dsp.update_power(self.echo_power, f.echo_spectrum, c.smoothing, c.floor)
        self.error_power = dsp.update_power(self.error_power, e_spec, c.smoothing, c.floor)

        n2 = 2 * c.block_size
        eta = float("nan")
        gated = False
        if c.policy == "proposed":
            self.policy.bootstrap_tick(far)
            bootstrap = self.policy.bootstrap_active
            mu = self.policy.compute_mu(self.echo_power, self.error_power)
        elif c.policy == "ncc":
            self.policy.bootstrap_tick(far)
            bootstrap = self.policy.bootstrap_active
            mu = self.policy.compute_mu(y_hat, mic, n2)
            gated = self.policy.gated
        else:
            bootstrap = False
            mu = compute_mu_fixed(c.mu, n2)

        gradient = f.compute_gradient(e_spec)
        f.apply_update(mu)
        if c.policy == "proposed":
            self.policy.update_eta(gradient, float(self.echo_power.sum()), float(self.error_power.sum()))
            eta = self.policy.eta

        diag = FrameDiagnostics(
            eta=eta,
            mu_mean=float(np.mean(mu)),
            residual_energy=float(np.dot(e, e)),
            prediction_energy=float(np.dot(y_hat, y_hat)),
            bootstrap_active=bool(bootstrap),
            gated=gated,
        )
        return e, diag

    def process(self, far, mic):
        """Run whole streams; a trailing partial block is dropped.

        Returns the output stream and the list of per-frame diagnostics.
        """
        far = np.asarray(far, dtype=float)
        mic = np.asarray(mic, dtype=float)
        if far.shape != mic.shape or far.ndim != 1:
            raise ConfigError("far and mic must be 1-D streams of equal length")
        n = self.block_size
        frames = far.size // n
        out = np.zeros(frames * n)
        diags = []
        for i in range(frames):
            s = slice(i * n, (i + 1) * n)
            out[s], d = self.process_frame(far[s], mic[s])
            diags.append(d)
        return out, diags
