import numpy as np

ERLE_RANGE_DB = (-20.0, 100.0)
MISALIGNMENT_RANGE_DB = (-100.0, 100.0)


def frame_energies(x, block_size):
    x = np.asarray(x, dtype=float)
    frames = x.size // block_size
    return np.sum(x[: frames * block_size].reshape(frames, block_size) ** 2, axis=1)


def erle_series(y, y_hat, block_size, window=16):
    """Per-frame ERLE in dB over a trailing window of ``window`` frames.

    ``y`` is the true echo (only available in simulation) and ``y_hat`` the
    canceller's estimate. Silent windows report 0 dB; values are clamped to
    [-20, 100] dB.
    """
    y = np.asarray(y, dtype=float)
    residual = y - np.asarray(y_hat, dtype=float)
    kernel = np.ones(window)
    frames = y.size // block_size
    echo = np.convolve(frame_energies(y, block_size), kernel)[:frames]
    res = np.convolve(frame_energies(residual, block_size), kernel)[:frames]
    out = np.empty(frames)
    silent = echo <= 0.0
    perfect = (res <= 0.0) & ~silent
    normal = ~silent & ~perfect
    out[silent] = 0.0
    out[perfect] = ERLE_RANGE_DB[1]
    out[normal] = 10.0 * np.log10(echo[normal] / res[normal])
    return np.clip(out, *ERLE_RANGE_DB)


def misalignment_db(h_true, estimate):
    """Normalized misalignment 10 log10(|h - h_est|^2 / |h|^2), zero-padding the shorter vector."""
    h_true = np.asarray(h_true, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    n = max(h_true.size, estimate.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: h_true.size] = h_true
    b[: estimate.size] = estimate
    ref = float(np.dot(a, a))
    err = float(np.dot(a - b, a - b))
    if ref == 0.0:
        return 0.0 if err == 0.0 else MISALIGNMENT_RANGE_DB[1]
    if err == 0.0:
        return MISALIGNMENT_RANGE_DB[0]
    return float(np.clip(10.0 * np.log10(err / ref), *MISALIGNMENT_RANGE_DB))


def misalignment_series(h_true, estimates):
    """Misalignment per frame; ``h_true`` is one response or one per frame."""
    estimates = list(estimates)
    if np.ndim(h_true) == 1:
        h_true = [h_true] * len(estimates)
    return np.array([misalignment_db(h, e) for h, e in zip(h_true, estimates)])
