"""
Block transforms and overlap-save constraint projections.

All spectra are full length-2N complex vectors (no compact Hermitian storage).
The forward transform is unnormalized; the inverse carries the 1/2N factor.
Every function accepts a leading batch axis, so a (K, 2N) array of partition
spectra is handled in one call.
"""
import numpy as np

from .errors import HermitianError, SizeMismatchError

HERMITIAN_RTOL = 1e-10


def check_length(a, n, what="block"):
    a = np.asarray(a)
    if a.ndim == 0 or a.shape[-1] != n:
        got = a.shape[-1] if a.ndim else 0
        raise SizeMismatchError(f"{what} has length {got}, expected {n}")
    return a


def _even_length(a, what):
    a = np.asarray(a)
    if a.ndim == 0 or a.shape[-1] < 2 or a.shape[-1] % 2:
        raise SizeMismatchError(f"{what} length must be an even 2N, got shape {a.shape}")
    return a


def forward_transform(block, size=None):
    """Unnormalized DFT of a real extended block (last axis)."""
    block = _even_length(block, "extended block") if size is None else check_length(block, size, "extended block")
    return np.fft.fft(block, axis=-1)


def is_hermitian(spec, rtol=HERMITIAN_RTOL):
    spec = np.asarray(spec)
    mirrored = np.conj(np.roll(spec[..., ::-1], 1, axis=-1))
    scale = max(float(np.max(np.abs(spec), initial=0.0)), 1e-300)
    return float(np.max(np.abs(spec - mirrored), initial=0.0)) <= rtol * scale


def inverse_transform(spec, size=None):
    """Inverse DFT (with 1/2N) of a Hermitian spectrum; returns real samples.

    Raises HermitianError when the input could not have come from a real
    block, which usually means an upstream computation went wrong.
    """
    spec = _even_length(spec, "spectrum") if size is None else check_length(spec, size, "spectrum")
    if not is_hermitian(spec):
        raise HermitianError("spectrum is not Hermitian-symmetric")
    return np.fft.ifft(spec, axis=-1).real


def _project(spec, keep_first, size):
    spec = _even_length(spec, "spectrum") if size is None else check_length(spec, size, "spectrum")
    n = spec.shape[-1] // 2
    t = np.fft.ifft(spec, axis=-1)
    if keep_first:
        t[..., n:] = 0.0
    else:
        t[..., :n] = 0.0
    return np.fft.fft(t, axis=-1)


def constrain_output(spec, size=None):
    """Zero the first N time samples (the G1 projection)."""
    return _project(spec, keep_first=False, size=size)


def constrain_gradient(spec, size=None):
    """Zero the last N time samples (the per-partition G2 projection)."""
    return _project(spec, keep_first=True, size=size)


def power(spec):
    """Per-bin |X|^2, summed over any leading partition axes."""
    p = np.abs(np.asarray(spec)) ** 2
    return p.reshape(-1, p.shape[-1]).sum(axis=0)


def update_power(acc, spec, smoothing, floor=1e-6):
    """Exponentially smoothed power spectrum, floored at ``floor``.

    ``spec`` may be a single spectrum or a stack of them; stacked spectra
    contribute the sum of their squared magnitudes.
    """
    acc = np.asarray(acc, dtype=float)
    inst = power(check_length(spec, acc.shape[-1], "spectrum"))
    out = smoothing * acc + (1.0 - smoothing) * inst
    return np.maximum(out, floor)
