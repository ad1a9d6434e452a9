"""WAV input/output and the framing/windowing primitives shared by all extractors."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyAudio, NotWav, SignalTooShort, UnsupportedEncoding

PCM_SCALE = 32768.0  # int16 full scale
MIN_SAMPLE_RATE = 8000  # speech-band floor
MAX_OVERLAP = 0.8


@dataclass(frozen=True)
class AudioSignal:
    """Mono sample sequence plus its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate) < MIN_SAMPLE_RATE:
            raise ValueError(f"sample_rate must be >= {MIN_SAMPLE_RATE} Hz")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FrameMatrix:
    """Stacked analysis frames (frame_count x frame_length)."""

    frames: np.ndarray
    frame_length_samples: int
    hop_samples: int
    sample_rate: int

    def __post_init__(self):
        if not 0 < self.hop_samples <= self.frame_length_samples:
            raise ValueError("hop must satisfy 0 < hop <= frame_length")
        # overlap = 1 - hop/frame must stay within [0, MAX_OVERLAP]
        if self.hop_samples * 5 < self.frame_length_samples:
            raise ValueError("frame overlap above 80% is not supported")

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]


def load_wav(path) -> AudioSignal:
    """Read a mono 16-bit PCM RIFF/WAVE file into a normalized AudioSignal.

    Chunks other than fmt/data are skipped. Multi-channel or non-PCM16
    content is rejected rather than converted.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(12)
    if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
        raise NotWav(f"{path}: not a RIFF/WAVE file")

    try:
        with wave.open(str(path), "rb") as wav:
            n_channels = wav.getnchannels()
            sample_width = wav.getsampwidth()
            comp_type = wav.getcomptype()
            sample_rate = wav.getframerate()
            n_frames = wav.getnframes()
            if n_channels != 1:
                raise UnsupportedEncoding(f"{path}: expected mono, got {n_channels} channels")
            if sample_width != 2 or comp_type != "NONE":
                raise UnsupportedEncoding(f"{path}: expected 16-bit PCM")
            if n_frames == 0:
                raise EmptyAudio(f"{path}: zero data samples")
            raw = wav.readframes(n_frames)
    except wave.Error as exc:
        raise UnsupportedEncoding(f"{path}: {exc}") from exc

    pcm = np.frombuffer(raw, dtype="<i2")
    if pcm.size == 0:
        raise EmptyAudio(f"{path}: zero data samples")
    return AudioSignal(samples=pcm.astype(np.float64) / PCM_SCALE, sample_rate=sample_rate)


def write_wav(path, signal: AudioSignal) -> None:
    """Write an AudioSignal as a mono 16-bit PCM WAV file."""
    pcm = np.clip(np.round(signal.samples * PCM_SCALE), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(pcm.tobytes())


def frame_signal(signal: AudioSignal, frame_ms: float, hop_ms: float) -> FrameMatrix:
    """Slice a signal into overlapping frames; trailing partial frames are dropped."""
    if not 10.0 <= frame_ms <= 50.0:
        raise ValueError("frame_ms must lie in [10, 50]")
    if hop_ms <= 0:
        raise ValueError("hop_ms must be positive")
    frame_length = int(round(frame_ms * signal.sample_rate / 1000.0))
    hop = int(round(hop_ms * signal.sample_rate / 1000.0))
    if len(signal) < frame_length:
        raise SignalTooShort(
            f"signal of {len(signal)} samples is shorter than one {frame_length}-sample frame"
        )
    windows = np.lib.stride_tricks.sliding_window_view(signal.samples, frame_length)
    frames = windows[::hop].copy()
    return FrameMatrix(
        frames=frames,
        frame_length_samples=frame_length,
        hop_samples=hop,
        sample_rate=signal.sample_rate,
    )


def hamming_window(frame_length: int) -> np.ndarray:
    """Raised-cosine taper w(n) = 0.54 - 0.46*cos(2*pi*n/(N-1))."""
    if frame_length < 2:
        raise ValueError("frame_length must be >= 2")
    n = np.arange(frame_length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (frame_length - 1))
