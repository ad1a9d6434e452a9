"""Short-term spectral feature extractors: MFCC, LPCC and PLP.

All three share the framing/windowing primitives from audio_io and emit a
FeatureMatrix of one cepstral vector per frame.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.fft import dct, idct

from .audio_io import AudioSignal, frame_signal, hamming_window
from .errors import FilterbankTooDense, UnstableRecursion

LOG_FLOOR = 1e-10  # keeps log of empty bands finite
EXTRACTOR_KINDS = ("mfcc", "lpcc", "plp")

MEL_SLOPE = 1125.0
MEL_KNEE_HZ = 700.0
BARK_SCALE_RADS = 1200.0 * np.pi

DEFAULT_MEL_FILTERS = 26
DEFAULT_BARK_BANDS = 21
# trapezoidal critical band: flat within +-0.5 bark of the center, zero beyond +-1.5
BARK_FLAT_HALF_WIDTH = 0.5
BARK_ZERO_HALF_WIDTH = 1.5


@dataclass(frozen=True)
class ExtractorConfig:
    """Knobs shared by the three extractors; see default_config for presets."""

    kind: str
    pre_emphasis_a: float = 0.97
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int = 512
    filter_count: int = DEFAULT_MEL_FILTERS
    lpc_order_q: int = 12
    num_ceps: int = 13
    dct_kind: str = "dct2"
    include_c0: bool = False

    def __post_init__(self):
        if self.kind not in EXTRACTOR_KINDS:
            raise ValueError(f"kind must be one of {EXTRACTOR_KINDS}")
        if not 0.9 <= self.pre_emphasis_a <= 1.0:
            raise ValueError("pre_emphasis_a must lie in [0.9, 1]")
        if self.fft_size < 2 or self.fft_size & (self.fft_size - 1):
            raise ValueError("fft_size must be a power of two")
        if not 8 <= self.lpc_order_q <= 16:
            raise ValueError("lpc_order_q must lie in [8, 16]")
        if not 12 <= self.num_ceps <= 15:
            raise ValueError("num_ceps must lie in [12, 15]")
        if self.dct_kind not in ("dct2", "idct"):
            raise ValueError("dct_kind must be 'dct2' or 'idct'")


def default_config(kind: str, **overrides) -> ExtractorConfig:
    """Build the standard config for an extractor kind."""
    if kind == "plp":
        overrides.setdefault("filter_count", DEFAULT_BARK_BANDS)
    return replace(ExtractorConfig(kind=kind), **overrides)


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-frame feature vectors with provenance metadata."""

    values: np.ndarray
    config: ExtractorConfig
    speaker_label: Optional[int] = None
    source: Optional[str] = None
    unstable_frames: int = 0

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] < 1:
            raise ValueError("values must be a non-empty frame x coefficient matrix")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")

    @property
    def frame_count(self) -> int:
        return self.values.shape[0]


def pre_emphasize(signal: AudioSignal, a: float) -> AudioSignal:
    """First-order high-pass y[n] = x[n] - a*x[n-1], with y[0] = x[0]."""
    if not 0.9 <= a <= 1.0:
        raise ValueError("pre-emphasis coefficient must lie in [0.9, 1]")
    x = signal.samples
    y = np.concatenate(([x[0]], x[1:] - a * x[:-1]))
    return AudioSignal(samples=y, sample_rate=signal.sample_rate)


# --- Mel path -------------------------------------------------------------

def mel_scale(f) -> np.ndarray:
    """Perceptual pitch value of a frequency in Hz."""
    return MEL_SLOPE * np.log1p(np.asarray(f, dtype=np.float64) / MEL_KNEE_HZ)


def mel_to_hz(m) -> np.ndarray:
    return MEL_KNEE_HZ * np.expm1(np.asarray(m, dtype=np.float64) / MEL_SLOPE)


def mel_filter_edges(filter_count: int, sample_rate: int) -> np.ndarray:
    """Filter edge frequencies in Hz: filter_count centers plus the two outer edges."""
    edges_mel = np.linspace(0.0, float(mel_scale(sample_rate / 2.0)), filter_count + 2)
    return mel_to_hz(edges_mel)


def mel_filterbank(config: ExtractorConfig, sample_rate: int) -> np.ndarray:
    """Triangular filters with centers uniformly spaced on the mel axis.

    Each triangle rises from the previous center and falls to the next one
    (50% overlap). Rows are evaluated at the FFT bin frequencies.
    """
    if config.filter_count < 2:
        raise ValueError("filter_count must be >= 2")
    n_bins = config.fft_size // 2 + 1
    if config.filter_count > n_bins - 2:
        raise FilterbankTooDense(
            f"{config.filter_count} filters cannot fit into {n_bins} FFT bins"
        )
    edges = mel_filter_edges(config.filter_count, sample_rate)
    bin_freqs = np.fft.rfftfreq(config.fft_size, d=1.0 / sample_rate)

    bank = np.zeros((config.filter_count, n_bins))
    for i in range(config.filter_count):
        left, center, right = edges[i], edges[i + 1], edges[i + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        bank[i] = np.maximum(0.0, np.minimum(rising, falling))
    if not (bank > 0).any(axis=1).all():
        raise FilterbankTooDense("filter spacing is finer than the FFT resolution")
    return bank


def windowed_frames(signal: AudioSignal, config: ExtractorConfig) -> np.ndarray:
    """Frame a signal and apply the Hamming taper to each row."""
    fm = frame_signal(signal, config.frame_ms, config.hop_ms)
    if config.fft_size < fm.frame_length_samples:
        raise ValueError("fft_size must be >= the frame length in samples")
    return fm.frames * hamming_window(fm.frame_length_samples)


def mel_energies(signal: AudioSignal, config: ExtractorConfig) -> np.ndarray:
    """Per-frame mel filterbank energies of the pre-emphasized signal."""
    emphasized = pre_emphasize(signal, config.pre_emphasis_a)
    frames = windowed_frames(emphasized, config)
    magnitude = np.abs(np.fft.rfft(frames, config.fft_size, axis=1))
    return magnitude @ mel_filterbank(config, signal.sample_rate).T


def mfcc(
    signal: AudioSignal,
    config: ExtractorConfig,
    speaker_label: Optional[int] = None,
    source: Optional[str] = None,
) -> FeatureMatrix:
    """Mel-frequency cepstral coefficients, one row per frame."""
    if config.kind != "mfcc":
        raise ValueError("config.kind must be 'mfcc'")
    log_energies = np.log(np.maximum(mel_energies(signal, config), LOG_FLOOR))
    if config.dct_kind == "dct2":
        ceps = dct(log_energies, type=2, norm="ortho", axis=1)
    else:
        ceps = idct(log_energies, type=2, norm="ortho", axis=1)
    lo = 0 if config.include_c0 else 1
    return FeatureMatrix(
        values=ceps[:, lo : lo + config.num_ceps],
        config=config,
        speaker_label=speaker_label,
        source=source,
    )


# --- LPC path -------------------------------------------------------------

def levinson_durbin(autocorr) -> tuple[np.ndarray, float]:
    """Solve the Toeplitz normal equations for predictor coefficients.

    Input is autocorrelation lags 0..Q; output a satisfies
    Toeplitz(r[0..Q-1]) @ a = r[1..Q], plus the residual prediction error.
    """
    r = np.asarray(autocorr, dtype=np.float64)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("autocorr must hold lags 0..Q with Q >= 1")
    if r[0] <= 0:
        raise ValueError("autocorr[0] must be positive")
    order = r.size - 1
    a = np.zeros(order)
    err = float(r[0])
    for i in range(1, order + 1):
        k = (r[i] - np.dot(a[: i - 1], r[i - 1 : 0 : -1])) / err
        if abs(k) >= 1.0:
            raise UnstableRecursion(f"reflection coefficient {k:.6g} at order {i}")
        prev = a[: i - 1].copy()
        a[: i - 1] = prev - k * prev[::-1]
        a[i - 1] = k
        err *= 1.0 - k * k
    return a, err


def lpc_to_cepstrum(lpc, gain: float, num_ceps: int) -> np.ndarray:
    """Cepstral coefficients c1..c_num_ceps of an all-pole model.

    Uses the recursion c_n = a_n + (1/n) * sum_{k=1..n-1} k*c_k*a_{n-k},
    with a_n = 0 beyond the model order.
    """
    a = np.asarray(lpc, dtype=np.float64)
    q = a.size
    c = np.zeros(num_ceps + 1)
    c[0] = np.log(max(gain, LOG_FLOOR))
    for n in range(1, num_ceps + 1):
        direct = a[n - 1] if n <= q else 0.0
        ks = np.arange(max(1, n - q), n)
        c[n] = direct + np.dot(ks * c[ks], a[n - ks - 1]) / n
    return c[1:]


def lpc_analysis(frames: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-frame LPC via biased autocorrelation plus Levinson-Durbin.

    Frames that are silent or numerically unstable yield zero coefficient
    rows; their count is returned for diagnostics.
    """
    n_frames, frame_len = frames.shape
    nfft = 1 << int(np.ceil(np.log2(2 * frame_len - 1)))
    spectra = np.abs(np.fft.rfft(frames, nfft, axis=1)) ** 2
    autocorr = np.fft.irfft(spectra, nfft, axis=1)[:, : order + 1] / frame_len

    coeffs = np.zeros((n_frames, order))
    errors = np.zeros(n_frames)
    unstable = 0
    for i in range(n_frames):
        if autocorr[i, 0] <= LOG_FLOOR:
            unstable += 1
            continue
        try:
            coeffs[i], errors[i] = levinson_durbin(autocorr[i])
        except UnstableRecursion:
            unstable += 1
    return coeffs, errors, unstable


def lpcc(
    signal: AudioSignal,
    config: ExtractorConfig,
    speaker_label: Optional[int] = None,
    source: Optional[str] = None,
) -> FeatureMatrix:
    """Linear-prediction cepstral coefficients, one row per frame."""
    if config.kind != "lpcc":
        raise ValueError("config.kind must be 'lpcc'")
    emphasized = pre_emphasize(signal, config.pre_emphasis_a)
    frames = windowed_frames(emphasized, config)
    coeffs, errors, unstable = lpc_analysis(frames, config.lpc_order_q)
    values = np.zeros((frames.shape[0], config.num_ceps))
    for i in range(frames.shape[0]):
        if errors[i] > 0:
            values[i] = lpc_to_cepstrum(coeffs[i], errors[i], config.num_ceps)
    return FeatureMatrix(
        values=values,
        config=config,
        speaker_label=speaker_label,
        source=source,
        unstable_frames=unstable,
    )


# --- PLP path -------------------------------------------------------------

def bark_scale(omega) -> np.ndarray:
    """Critical-band rate of an angular frequency (rad/s)."""
    return 6.0 * np.arcsinh(np.asarray(omega, dtype=np.float64) / BARK_SCALE_RADS)


def equal_loudness(omega) -> np.ndarray:
    """Ear-sensitivity weight at an angular frequency (rad/s)."""
    w2 = np.asarray(omega, dtype=np.float64) ** 2
    return ((w2 + 56.8e6) * w2 ** 2) / ((w2 + 6.3e6) ** 2 * (w2 + 0.38e9))


def bark_band_centers(band_count: int, sample_rate: int) -> np.ndarray:
    """Band center frequencies (rad/s), uniform on the bark axis up to Nyquist."""
    nyquist_bark = float(bark_scale(np.pi * sample_rate))
    centers_bark = np.linspace(0.0, nyquist_bark, band_count + 2)[1:-1]
    return BARK_SCALE_RADS * np.sinh(centers_bark / 6.0)


def bark_band_loudness(
    signal: AudioSignal, config: ExtractorConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame critical-band loudness and the band centers (rad/s).

    Power spectra are integrated through trapezoidal bark-axis windows,
    weighted by the equal-loudness curve at each band center, then
    compressed by the cube root (intensity to loudness).
    """
    frames = windowed_frames(signal, config)
    power = np.abs(np.fft.rfft(frames, config.fft_size, axis=1)) ** 2

    bin_bark = bark_scale(2.0 * np.pi * np.fft.rfftfreq(config.fft_size, 1.0 / signal.sample_rate))
    centers = bark_band_centers(config.filter_count, signal.sample_rate)
    offsets = np.abs(bin_bark[None, :] - bark_scale(centers)[:, None])
    windows = np.clip(
        (BARK_ZERO_HALF_WIDTH - offsets) / (BARK_ZERO_HALF_WIDTH - BARK_FLAT_HALF_WIDTH),
        0.0,
        1.0,
    )
    if not (windows > 0).any(axis=1).all():
        raise FilterbankTooDense("band spacing is finer than the FFT resolution")

    loudness = np.cbrt((power @ windows.T) * equal_loudness(centers))
    return loudness, centers


def plp(
    signal: AudioSignal,
    config: ExtractorConfig,
    speaker_label: Optional[int] = None,
    source: Optional[str] = None,
) -> FeatureMatrix:
    """Perceptual linear prediction cepstra, one row per frame.

    The band loudness values are treated as samples of a symmetric spectrum;
    its inverse DFT yields autocorrelation lags for the all-pole fit.
    """
    if config.kind != "plp":
        raise ValueError("config.kind must be 'plp'")
    if 2 * (config.filter_count + 1) < config.lpc_order_q + 1:
        raise ValueError("filter_count too small for the requested LPC order")
    loudness, _ = bark_band_loudness(signal, config)

    padded = np.concatenate([loudness[:, :1], loudness, loudness[:, -1:]], axis=1)
    symmetric = np.concatenate([padded, padded[:, -2:0:-1]], axis=1)
    autocorr = np.fft.ifft(symmetric, axis=1).real[:, : config.lpc_order_q + 1]

    n_frames = loudness.shape[0]
    values = np.zeros((n_frames, config.num_ceps))
    unstable = 0
    for i in range(n_frames):
        if autocorr[i, 0] <= LOG_FLOOR:
            unstable += 1
            continue
        try:
            coeffs, err = levinson_durbin(autocorr[i])
        except UnstableRecursion:
            unstable += 1
            continue
        values[i] = lpc_to_cepstrum(coeffs, err, config.num_ceps)
    return FeatureMatrix(
        values=values,
        config=config,
        speaker_label=speaker_label,
        source=source,
        unstable_frames=unstable,
    )


def extract(
    signal: AudioSignal,
    config: ExtractorConfig,
    speaker_label: Optional[int] = None,
    source: Optional[str] = None,
) -> FeatureMatrix:
    """Dispatch to the extractor selected by config.kind."""
    fn = {"mfcc": mfcc, "lpcc": lpcc, "plp": plp}[config.kind]
    return fn(signal, config, speaker_label=speaker_label, source=source)
