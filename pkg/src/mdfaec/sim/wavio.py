"""16-bit PCM mono WAV input/output."""
import wave

import numpy as np


class WavFormatError(OSError):
    pass


def read_wav(path):
    """Return (sample_rate, samples) with samples scaled to [-1, 1) by 1/32768."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1:
                raise WavFormatError(f"{path}: expected mono, got {w.getnchannels()} channels")
            if w.getsampwidth() != 2:
                raise WavFormatError(f"{path}: expected 16-bit PCM, got {8 * w.getsampwidth()}-bit")
            rate = w.getframerate()
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    return rate, np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0


def write_wav(path, samples, sample_rate):
    """Write samples in [-1, 1) as 16-bit PCM mono, clipping out-of-range values."""
    pcm = np.clip(np.round(np.asarray(samples, dtype=float) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sample_rate))
        w.writeframes(pcm.tobytes())
