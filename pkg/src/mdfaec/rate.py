"""
Per-bin learning-rate policies.

``ProposedPolicy`` is the closed-loop rule: the rate in bin k is
min(eta * Pyy_k / Pee_k, mu_max), where eta is adapted multiplicatively from
the correlation between the current gradient and a smoothed history of past
gradients. ``NccPolicy`` gates a constant rate with a normalized
cross-correlation double-talk detector; ``compute_mu_fixed`` is the no-DTD
baseline.
"""
import math

import numpy as np

from .errors import ContractError


def compute_mu_fixed(mu, size):
    if not 0.0 <= mu <= 1.0:
        raise ContractError(f"fixed rate must lie in [0, 1], got {mu}")
    return np.full(size, float(mu))


class Bootstrap:
    """Counts active far-end samples until twice the filter length has been seen."""

    def __init__(self, span, threshold=1e-5):
        self.span = span
        self.threshold = threshold
        self.active_samples = 0

    @property
    def active(self):
        return self.active_samples < self.span

    def tick(self, far):
        if self.active:
            self.active_samples += int(np.count_nonzero(np.abs(far) > self.threshold))

    def reset(self):
        self.active_samples = 0


class ProposedPolicy:
    """Gradient-adaptive misalignment surrogate driving a per-bin rate.

    Parameters
    ----------
    shape: tuple
        (K, 2N), the shape of the filter gradient
    rho: float
        step size of the eta adaptation
    alpha: float
        gradient smoothing factor
    mu_max: float
        per-bin rate ceiling
    bootstrap_mu: float
        constant rate used until the bootstrap span has elapsed
    eta_init, eta_min, eta_max: float
        initial value and clamp bounds of eta
    floor: float
        guard for the eta update denominator
    activity_threshold: float
        far-end amplitude counted as active for the bootstrap
    """

    def __init__(self, shape, rho=1.0, alpha=0.9, mu_max=0.75, bootstrap_mu=0.25, eta_init=0.1,
                 eta_min=1e-4, eta_max=1.0, floor=1e-6, activity_threshold=1e-5):
        if not 0.0 < eta_min <= eta_init <= eta_max:
            raise ContractError("need 0 < eta_min <= eta_init <= eta_max")
        self.shape = tuple(shape)
        self.rho = rho
        self.alpha = alpha
        self.mu_max = mu_max
        self.bootstrap_mu = bootstrap_mu
        self.eta_init = eta_init
        self.eta_min = eta_min
        self.eta_max = eta_max
        self.floor = floor
        # K * 2N samples: twice the modeled filter length
        self.bootstrap = Bootstrap(self.shape[0] * self.shape[1], activity_threshold)
        self.reset()

    def reset(self):
        self.eta = self.eta_init
        self.psi = np.zeros(self.shape, dtype=complex)
        self.bootstrap.reset()

    @property
    def bootstrap_active(self):
        return self.bootstrap.active

    def bootstrap_tick(self, far):
        self.bootstrap.tick(far)

    def compute_mu(self, echo_power, error_power):
        echo_power = np.asarray(echo_power, dtype=float)
        if self.bootstrap.active:
            return np.full(echo_power.shape, self.bootstrap_mu)
        error_power = np.asarray(error_power, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(error_power > 0.0, echo_power / error_power, 0.0)
        return np.clip(self.eta * ratio, 0.0, self.mu_max)

    def update_eta(self, gradient, echo_energy, error_energy):
        """One multiplicative eta step followed by gradient smoothing.

        ``echo_energy`` and ``error_energy`` are the bin sums of the echo
        estimate and error power spectra; their ratio, capped at 1, weights
        the step so that frames dominated by near-end signal barely move eta.
        """
        inner = np.real(np.conj(self.psi) * gradient)
        denom = float(np.sum(np.abs(inner)))
        if denom >= self.floor and error_energy > 0.0:
            confidence = min(echo_energy / error_energy, 1.0)
            exponent = self.rho * confidence * float(np.sum(inner)) / denom
            self.eta = min(max(self.eta * math.exp(exponent), self.eta_min), self.eta_max)
        self.smooth_gradient(gradient)

    def smooth_gradient(self, gradient):
        self.psi = self.alpha * self.psi + gradient


class NccPolicy:
    """Constant rate frozen whenever the echo-estimate/microphone correlation drops below a threshold.

    The statistic is E{y_hat d} / sqrt(E{y_hat^2} E{d^2} + floor) with
    exponentially weighted expectations. A detection freezes adaptation for
    the current frame and the following ``hangover`` frames. Gating only
    starts once the bootstrap span has elapsed; before that the estimate is
    still zero and the statistic carries no information.
    """

    def __init__(self, span, threshold=0.35, mu_on=0.25, window=0.95, hangover=8, floor=1e-6,
                 activity_threshold=1e-5):
        self.threshold = threshold
        self.mu_on = mu_on
        self.window = window
        self.hangover = hangover
        self.floor = floor
        self.bootstrap = Bootstrap(span, activity_threshold)
        self.reset()

    def reset(self):
        self.r_yd = 0.0
        self.r_yy = 0.0
        self.r_dd = 0.0
        self.statistic = 0.0
        self.frozen_frames = 0
        self.gated = False
        self.bootstrap.reset()

    @property
    def bootstrap_active(self):
        return self.bootstrap.active

    def bootstrap_tick(self, far):
        self.bootstrap.tick(far)

    def compute_mu(self, y_hat, desired, size):
        w = self.window
        self.r_yd = w * self.r_yd + (1.0 - w) * float(np.dot(y_hat, desired))
        self.r_yy = w * self.r_yy + (1.0 - w) * float(np.dot(y_hat, y_hat))
        self.r_dd = w * self.r_dd + (1.0 - w) * float(np.dot(desired, desired))
        self.statistic = self.r_yd / math.sqrt(self.r_yy * self.r_dd + self.floor)
        if not self.bootstrap.active and self.statistic < self.threshold:
            self.frozen_frames = self.hangover + 1
        self.gated = self.frozen_frames > 0
        if self.gated:
            self.frozen_frames -= 1
            return np.zeros(size)
        return np.full(size, self.mu_on)
