"""Monte Carlo estimate of gate infidelity under narrow-band amplitude noise.

Each noise realization is a finite Fourier sum over ``bins`` frequency bins
spanning the band,

    β(t) = A_0 + Σ_k [A_k exp(i 2π f_k t) + c.c.],

with ``Re A_k, Im A_k ~ ½ sqrt(S Δf) N(0, 1)`` (and a real ``A_0 ~ sqrt(S Δf) N(0, 1)``
when a bin sits at f = 0).  The one-sided PSD is flat, ``S = σ² / f_band``.

Random draws come from Philox streams keyed by ``(seed, stream, trial)``;
within a stream the bin index fixes the counter position, so any trial can be
regenerated on its own and results do not depend on evaluation order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .sequences import PulseSequence, batch_infidelity, sequence_unitary

__all__ = [
    "NoiseModel",
    "NoiseRealization",
    "ScanResult",
    "sample_noise",
    "sample_batch",
    "propagate",
    "propagate_batch",
    "pulse_angles",
    "mc_infidelities",
    "mc_scan",
]

DEFAULT_BAND = 2.0  # Hz
DEFAULT_BINS = 16
DEFAULT_TRIALS = 2000
DEFAULT_STEPS = 256
MIN_STEPS = 16


@dataclass(frozen=True)
class NoiseModel:
    """Flat one-sided PSD of width ``f_band`` (Hz) centred on ``f_center``.

    ``rms`` is the RMS amplitude error σ in rad/s.  If the band reaches below
    zero it is clipped at f = 0 and the lowest bin is the real DC bin.
    """

    f_center: float
    rms: float
    f_band: float = DEFAULT_BAND
    bins: int = DEFAULT_BINS
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.rms < 0:
            raise ValueError("rms must be non-negative")
        if not self.f_band > 0:
            raise ValueError("f_band must be positive")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.f_center < 0:
            raise ValueError("f_center must be non-negative")

    @property
    def f_low(self) -> float:
        return max(0.0, self.f_center - self.f_band / 2)

    @property
    def f_high(self) -> float:
        return self.f_center + self.f_band / 2

    @property
    def bin_width(self) -> float:
        return (self.f_high - self.f_low) / self.bins

    @property
    def psd_level(self) -> float:
        """One-sided PSD amplitude A, with A times the occupied band equal to σ²."""
        return self.rms ** 2 / (self.f_high - self.f_low)

    @property
    def has_dc(self) -> bool:
        return self.f_low == 0.0

    def frequencies(self) -> np.ndarray:
        """Bin frequencies (Hz); the first is exactly 0 when the band touches DC."""
        df = self.bin_width
        f = self.f_low + (np.arange(self.bins) + 0.5) * df
        if self.has_dc:
            f[0] = 0.0
        return f


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    """One draw of β(t); ``coefficients[k]`` pairs with ``frequencies[k]``."""

    frequencies: np.ndarray
    coefficients: np.ndarray

    def __call__(self, t):
        return evaluate(self.frequencies, self.coefficients[None, :], np.atleast_1d(t))[0]


def evaluate(freqs: np.ndarray, coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """β(t) for a batch of coefficient rows; shape ``(trials, len(t))``."""
    dc = freqs == 0
    e = np.exp(2j * np.pi * np.outer(freqs, t))
    e[~dc] *= 2.0  # A e + c.c. = 2 Re(A e)
    return (coeffs @ e).real


def _keyed_normals(seed: int, stream: int, trial: int, count: int) -> np.ndarray:
    key = np.random.SeedSequence([seed, stream, trial]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).standard_normal(count)


def sample_batch(model: NoiseModel, trials) -> np.ndarray:
    """Coefficient matrix ``(len(trials), bins)`` for the given trial indices."""
    trials = np.atleast_1d(trials)
    freqs = model.frequencies()
    scale = np.where(freqs == 0, 1.0, 0.5) * math.sqrt(model.psd_level * model.bin_width)
    out = np.empty((trials.size, model.bins), dtype=complex)
    for i, tr in enumerate(trials):
        z = _keyed_normals(model.seed, model.stream, int(tr), 2 * model.bins)
        out[i] = z[0::2] + 1j * z[1::2]
    out.imag[:, freqs == 0] = 0.0
    return out * scale


def sample_noise(model: NoiseModel, trial: int) -> NoiseRealization:
    """Deterministic realization number ``trial`` of ``model``."""
    return NoiseRealization(model.frequencies(), sample_batch(model, [trial])[0])


def _step_basis(seq: PulseSequence, freqs: np.ndarray, steps: int):
    """Midpoint weights for the rotation angle of each pulse.

    Returns ``(nominal, basis)`` where ``nominal[l]`` is the error-free angle
    and ``basis[k, l] = Σ_j g_j dt_j exp(i ω_k t_j)`` over the midpoints of
    pulse ``l``, with times in seconds.
    """
    if steps < MIN_STEPS:
        raise ValueError(f"steps_per_pulse must be >= {MIN_STEPS}")
    env = seq.envelope
    n = len(seq)
    du = env.width / steps
    u_mid = (np.arange(steps) + 0.5) * du
    g = env.shape(u_mid) * du  # dimensionless weights, Σ g = π up to quadrature error
    t_mid = (u_mid[None, :] + env.width * np.arange(n)[:, None]) / seq.rabi  # (N, steps)
    nominal = np.full(n, g.sum())
    ph = np.exp(2j * np.pi * freqs[:, None, None] * t_mid[None, :, :])  # (K, N, steps)
    basis = ph @ g / seq.rabi  # (K, N), seconds
    return nominal, basis


def pulse_angles(seq: PulseSequence, freqs, coeffs, steps_per_pulse: int = DEFAULT_STEPS) -> np.ndarray:
    """Rotation angle of every pulse for a batch of noise draws; shape ``(trials, N)``.

    Each pulse keeps a fixed axis, so the step exponentials commute and their
    product is one rotation by the summed midpoint angle ``Σ_j g_j (Ω + β(t_j)) dt``.
    """
    freqs = np.asarray(freqs, dtype=float)
    coeffs = np.atleast_2d(coeffs)
    nominal, basis = _step_basis(seq, freqs, steps_per_pulse)
    weight = np.where(freqs == 0, 1.0, 2.0)
    return nominal[None, :] + (coeffs @ (weight[:, None] * basis)).real


def propagate_batch(seq: PulseSequence, freqs, coeffs, steps_per_pulse: int = DEFAULT_STEPS) -> np.ndarray:
    """Final propagators ``U(τ)`` for each coefficient row; shape ``(trials, 2, 2)``."""
    return sequence_unitary(seq, pulse_angles(seq, freqs, coeffs, steps_per_pulse))


def propagate(seq: PulseSequence, beta, steps_per_pulse: int = DEFAULT_STEPS) -> np.ndarray:
    """Propagator ``U(τ)`` of ``seq`` under amplitude error ``beta``.

    ``beta`` is a :class:`NoiseRealization` or a constant error in rad/s.
    """
    if isinstance(beta, NoiseRealization):
        freqs, coeffs = beta.frequencies, beta.coefficients
    else:
        freqs, coeffs = np.zeros(1), np.array([float(beta)], dtype=complex)
    return propagate_batch(seq, freqs, coeffs[None, :], steps_per_pulse)[0]


def mc_infidelities(seq: PulseSequence, model: NoiseModel, trials: int = DEFAULT_TRIALS,
                    steps_per_pulse: int = DEFAULT_STEPS, chunk: int = 4096) -> np.ndarray:
    """``1 - F`` for trials ``0 .. trials-1`` of ``model``."""
    u0 = sequence_unitary(seq)
    freqs = model.frequencies()
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        idx = np.arange(start, min(trials, start + chunk))
        u = propagate_batch(seq, freqs, sample_batch(model, idx), steps_per_pulse)
        out[idx] = batch_infidelity(u0, u)
    return out


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Per-frequency Monte Carlo statistics of the infidelity."""

    f_center: np.ndarray  # Hz
    mean: np.ndarray
    stderr: np.ndarray
    trials: np.ndarray
    rabi: float
    name: str = ""
    samples: list = field(default_factory=list, repr=False)

    @property
    def omega_ratio(self) -> np.ndarray:
        return 2 * np.pi * self.f_center / self.rabi

    def rows(self):
        for i in range(self.f_center.size):
            yield self.f_center[i], self.omega_ratio[i], self.mean[i], self.stderr[i], int(self.trials[i])


def _default_threads() -> int:
    env = os.environ.get("PLA_FORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def mc_scan(seq: PulseSequence, f_centers, rms: float, trials: int = DEFAULT_TRIALS,
            steps_per_pulse: int = DEFAULT_STEPS, seed: int = 0, f_band: float = DEFAULT_BAND,
            bins: int = DEFAULT_BINS, threads: int | None = None, keep_samples: bool = False) -> ScanResult:
    """Scan the noise centre frequency and average ``1 - F`` at each point.

    Point ``i`` draws from stream ``i`` of ``seed``, so points are independent
    and the result is identical for any thread count.
    """
    fcs = np.atleast_1d(np.asarray(f_centers, dtype=float))
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")

    def one(i):
        model = NoiseModel(fcs[i], rms, f_band, bins, seed, stream=i)
        return mc_infidelities(seq, model, trials, steps_per_pulse)

    threads = threads or _default_threads()
    if threads > 1 and fcs.size > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(fcs.size)))
    else:
        results = [one(i) for i in range(fcs.size)]

    mean = np.array([math.fsum(r) / r.size for r in results])
    stderr = np.array([np.std(r, ddof=1) / math.sqrt(r.size) for r in results])
    return ScanResult(fcs, mean, stderr, np.full(fcs.size, trials), seq.rabi, seq.name,
                      results if keep_samples else [])
