"""Multidelay block frequency-domain (MDF) adaptive filter."""
import numpy as np

from . import dsp
from .errors import ConfigError, ContractError

NORMALIZATIONS = ("summed", "partition0")


class MdfFilter:
    """K-partition overlap-save adaptive filter with block size N.

    The filter models K*N taps. Per frame the caller drives the steps in
    order: ``ingest_far_end``, ``predict_echo``, ``form_error``,
    ``compute_gradient`` and ``apply_update``.

    Parameters
    ----------
    block_size: int
        N, a power of two.
    partitions: int
        K >= 1.
    smoothing: float
        forgetting factor of the far-end power normalization (default 0.9)
    floor: float
        lower bound on every normalization bin (default 1e-6)
    normalization: str
        ``"summed"`` tracks the far-end power summed over all partitions,
        ``"partition0"`` tracks the newest partition only.
    """

    def __init__(self, block_size=64, partitions=16, smoothing=0.9, floor=1e-6, normalization="summed"):
        if block_size < 1 or block_size & (block_size - 1):
            raise ConfigError(f"block size must be a power of two, got {block_size}")
        if partitions < 1:
            raise ConfigError(f"need at least one partition, got {partitions}")
        if not 0.0 < smoothing < 1.0:
            raise ConfigError(f"smoothing must lie in (0, 1), got {smoothing}")
        if floor <= 0.0:
            raise ConfigError("power floor must be positive")
        if normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {normalization!r}")
        self.block_size = block_size
        self.partitions = partitions
        self.smoothing = smoothing
        self.floor = floor
        self.normalization = normalization
        self.reset()

    @property
    def fft_size(self):
        return 2 * self.block_size

    @property
    def filter_length(self):
        return self.block_size * self.partitions

    def reset(self):
        n2 = self.fft_size
        self.frame_index = 0
        self.far_history = np.zeros((self.partitions, n2), dtype=complex)
        self.weights = np.zeros((self.partitions, n2), dtype=complex)
        self.phi_xx = np.full(n2, self.floor)
        self.last_far_block = np.zeros(self.block_size)
        self.last_gradient = np.zeros((self.partitions, n2), dtype=complex)
        self.ingested = 0

    def ingest_far_end(self, far):
        far = dsp.check_length(np.asarray(far, dtype=float), self.block_size, "far-end block")
        self.far_history = np.roll(self.far_history, 1, axis=0)
        self.far_history[0] = dsp.forward_transform(np.concatenate([self.last_far_block, far]))
        src = self.far_history if self.normalization == "summed" else self.far_history[0]
        self.phi_xx = dsp.update_power(self.phi_xx, src, self.smoothing, self.floor)
        self.last_far_block = far.copy()
        self.ingested += 1

    def predict_echo(self):
        """Return the echo estimate block and the power of its constrained spectrum."""
        if not self.ingested:
            raise ContractError("predict_echo called before any far-end block was ingested")
        spec = dsp.constrain_output(np.sum(self.far_history * self.weights, axis=0))
        self.echo_spectrum = spec
        y_hat = np.fft.ifft(spec).real[self.block_size:]
        return y_hat, np.abs(spec) ** 2

    def form_error(self, desired, y_hat):
        desired = dsp.check_length(np.asarray(desired, dtype=float), self.block_size, "desired block")
        y_hat = dsp.check_length(np.asarray(y_hat, dtype=float), self.block_size, "echo estimate")
        e = desired - y_hat
        spec = dsp.forward_transform(np.concatenate([np.zeros(self.block_size), e]))
        return e, spec, np.abs(spec) ** 2

    def compute_gradient(self, error_spectrum):
        error_spectrum = dsp.check_length(error_spectrum, self.fft_size, "error spectrum")
        self.last_gradient = np.conj(self.far_history) * error_spectrum / self.phi_xx
        return self.last_gradient

    def apply_update(self, mu):
        mu = dsp.check_length(np.asarray(mu, dtype=float), self.fft_size, "rate vector")
        if np.any(mu < 0.0) or np.any(mu > 1.0) or not np.all(np.isfinite(mu)):
            raise ContractError("learning rates must lie in [0, 1]")
        if np.any(mu):
            self.weights = self.weights + dsp.constrain_gradient(mu * self.last_gradient)
        self.frame_index += 1

    def export_impulse_response(self):
        """Time-domain taps, partition k filling taps kN .. kN+N-1."""
        taps = np.fft.ifft(self.weights, axis=-1).real[:, : self.block_size]
        return taps.reshape(-1)

    def import_impulse_response(self, taps):
        """Load weights from K*N (or fewer, zero-padded) time-domain taps."""
        taps = np.asarray(taps, dtype=float)
        if taps.ndim != 1 or taps.size > self.filter_length:
            raise ContractError(f"expected at most {self.filter_length} taps")
        padded = np.zeros(self.filter_length)
        padded[: taps.size] = taps
        blocks = padded.reshape(self.partitions, self.block_size)
        ext = np.concatenate([blocks, np.zeros_like(blocks)], axis=1)
        self.weights = dsp.forward_transform(ext)
