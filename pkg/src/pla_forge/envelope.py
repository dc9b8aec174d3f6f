"""Pulse envelopes and their moment integrals.

An envelope is stored in dimensionless time ``u = rabi * t``.  The shape
``g(u)`` lives on ``[0, width]`` and is normalized so that ``∫ g du = π``,
which makes every pulse a π rotation at nominal amplitude.  Converting back
to SI is a matter of dividing by powers of the Rabi frequency:

    I_m = ∫ G(t) t^m dt = J_m / rabi**(m + 1),   J_m = ∫ g(u) u^m du

The functions at the bottom of the module evaluate constraint moments,
filter functions and the DC second-order term for an arbitrary envelope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import TYPE_CHECKING

import numpy as np
from scipy import integrate

if TYPE_CHECKING:
    from .sequences import PulseSequence

__all__ = [
    "Envelope",
    "square",
    "raised_cosine",
    "truncated_gaussian",
    "from_samples",
    "moment",
    "continuous_moment_env",
    "dc_second_order_env",
    "filter_function_env",
]

KINDS = ("square", "raised_cosine", "truncated_gaussian", "custom_sampled")

# default dimensionless widths (rabi * t_d); the non-square ones keep peak
# Rabi frequency at or near the nominal value
DEFAULT_WIDTH = {"square": np.pi, "raised_cosine": 2 * np.pi, "truncated_gaussian": 2 * np.pi}

NORM_RTOL = 1e-10
_GAUSS_WIDTHS = 6.0  # truncation at ±3 standard deviations


@dataclass(frozen=True, eq=False)
class Envelope:
    """Identical shape shared by every pulse of a sequence.

    Parameters
    ----------
    kind : str
        One of ``square``, ``raised_cosine``, ``truncated_gaussian`` or
        ``custom_sampled``.
    width : float
        Pulse duration in units of ``1/rabi`` (``rabi * t_d``).
    samples : ndarray, optional
        ``(M, 2)`` array of ``(u, g)`` points for ``custom_sampled``; the
        abscissae must span ``[0, width]``.  Values are rescaled on
        construction so that the area is π.
    """

    kind: str = "square"
    width: float = np.pi
    samples: np.ndarray | None = None
    _scale: float = field(init=False, repr=False, default=1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.width > 0:
            raise ValueError("envelope width must be positive")
        if self.kind == "square" and not np.isclose(self.width, np.pi, rtol=NORM_RTOL):
            raise ValueError("a square envelope must last exactly π/rabi")
        if self.kind == "custom_sampled":
            if self.samples is None:
                raise ValueError("custom_sampled envelope needs samples")
            s = np.array(self.samples, dtype=float)
            if s.ndim != 2 or s.shape[1] != 2 or len(s) < 2:
                raise ValueError("samples must be an (M, 2) array with M >= 2")
            if np.any(np.diff(s[:, 0]) <= 0):
                raise ValueError("sample abscissae must be strictly increasing")
            if np.any(s[:, 1] < 0):
                raise ValueError("envelope samples must be non-negative")
            s[:, 0] *= self.width / s[-1, 0]
            s.setflags(write=False)
            object.__setattr__(self, "samples", s)
        raw = self._raw_area()
        if not raw > 0:
            raise ValueError("envelope has zero area")
        object.__setattr__(self, "_scale", np.pi / raw)
        if abs(self.moment(0) - np.pi) > NORM_RTOL * np.pi:
            raise ValueError("envelope normalization failed")

    # -- shape ---------------------------------------------------------------

    def _raw(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u >= 0) & (u <= self.width)
        if self.kind == "square":
            g = np.ones_like(u)
        elif self.kind == "raised_cosine":
            g = 1.0 - np.cos(2 * np.pi * u / self.width)
        elif self.kind == "truncated_gaussian":
            sd = self.width / _GAUSS_WIDTHS
            g = np.exp(-0.5 * ((u - 0.5 * self.width) / sd) ** 2)
        else:
            g = np.interp(u, self.samples[:, 0], self.samples[:, 1])
        return np.where(inside, g, 0.0)

    def _raw_area(self) -> float:
        if self.kind == "square":
            return self.width
        if self.kind == "raised_cosine":
            return self.width
        return self._quad(lambda u: self._raw(u))

    def _quad(self, fn, **kw) -> float:
        if self.kind == "custom_sampled" and "weight" not in kw:
            kw["points"] = self.samples[1:-1, 0]
        # absolute floor relative to the pulse area π keeps near-zero parts quiet
        val, _ = integrate.quad(fn, 0.0, self.width, epsabs=1e-15 * np.pi,
                                epsrel=1e-13, limit=400, **kw)
        return val

    def shape(self, u):
        """Normalized shape ``g(u)``; zero outside ``[0, width]``."""
        return self._scale * self._raw(u)

    def __call__(self, u):
        return self.shape(u)

    # -- moments -------------------------------------------------------------

    @cached_property
    def _moment_cache(self) -> dict:
        return {}

    def moment(self, m: int) -> float:
        """Dimensionless moment ``J_m = ∫ g(u) u^m du``."""
        if m < 0:
            raise ValueError("moment order must be non-negative")
        cache = self._moment_cache
        if m not in cache:
            if self.kind == "square":
                cache[m] = self.width ** (m + 1) / (m + 1)
            else:
                cache[m] = self._quad(lambda u: self.shape(u) * u ** m)
        return cache[m]

    def fourier(self, w):
        """``∫ g(u) exp(i w u) du`` for dimensionless angular frequency ``w``."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.empty(w.shape, dtype=complex)
        for i, wi in enumerate(w):
            if self.kind == "square":
                # (exp(i w T) - 1) / (i w), written to stay accurate as w -> 0
                half = 0.5 * wi * self.width
                out[i] = self.width * np.exp(1j * half) * np.sinc(half / np.pi)
            elif wi == 0.0:
                out[i] = self.moment(0)
            else:
                # oscillatory weights (QAWO) stay accurate at large w
                re = self._quad(self.shape, weight="cos", wvar=wi)
                im = self._quad(self.shape, weight="sin", wvar=wi)
                out[i] = re + 1j * im
        return out

    # -- conversions ---------------------------------------------------------

    def duration(self, rabi: float) -> float:
        """Pulse duration ``t_d`` in seconds."""
        return self.width / rabi

    def to_json(self, rabi: float) -> dict:
        d = {"kind": self.kind, "t_d_s": self.duration(rabi)}
        if self.samples is not None:
            d["samples"] = [[u / rabi, g] for u, g in self.samples.tolist()]
        return d

    @classmethod
    def from_json(cls, d, rabi: float) -> "Envelope":
        """Build from the envelope JSON object or a bare kind name."""
        if isinstance(d, str):
            return by_name(d)
        kind = d["kind"]
        width = d["t_d_s"] * rabi if "t_d_s" in d else DEFAULT_WIDTH.get(kind)
        if width is None:
            raise ValueError("custom_sampled envelope JSON needs t_d_s")
        samples = d.get("samples")
        if samples is not None:
            samples = np.array(samples, dtype=float)
            samples[:, 0] *= rabi
        return cls(kind, float(width), samples)

    @property
    def is_square(self) -> bool:
        return self.kind == "square"

    def is_default(self) -> bool:
        return self.samples is None and np.isclose(self.width, DEFAULT_WIDTH.get(self.kind, -1.0))


def square() -> Envelope:
    return Envelope("square", np.pi)


def raised_cosine(width: float = DEFAULT_WIDTH["raised_cosine"]) -> Envelope:
    """``g ∝ 1 - cos(2πu/width)``; default width gives unit peak amplitude."""
    return Envelope("raised_cosine", width)


def truncated_gaussian(width: float = DEFAULT_WIDTH["truncated_gaussian"]) -> Envelope:
    return Envelope("truncated_gaussian", width)


def from_samples(samples, width: float) -> Envelope:
    """Piecewise-linear envelope through ``(u, g)`` samples, renormalized."""
    return Envelope("custom_sampled", width, np.asarray(samples, dtype=float))


def by_name(kind: str) -> Envelope:
    if kind not in DEFAULT_WIDTH:
        raise ValueError(f"unknown envelope kind {kind!r}")
    return Envelope(kind, DEFAULT_WIDTH[kind])


def moment(env: Envelope, m: int, rabi: float | None = None) -> float:
    """Envelope moment ``I_m``.

    Returns the dimensionless ``J_m`` when ``rabi`` is omitted and the SI
    value ``I_m = J_m / rabi**(m+1)`` (units of s^(m+1)) otherwise.
    """
    j = env.moment(m)
    return j if rabi is None else j / rabi ** (m + 1)


def continuous_moment_env(seq: "PulseSequence", env: Envelope, p: int) -> np.ndarray:
    """Dimensionless ``rabi**(p+1) c_{a,p}`` for ``seq`` played with ``env``.

    Uses the moment expansion ``c_{a,p} = ½ Σ_q I_{p-q} t_d^q c'_{a,q} / (q!(p-q)!)``.
    """
    from .design import toggled_moment

    if p < 0:
        raise ValueError("p must be non-negative")
    seq = seq.with_envelope(env)
    total = 0j
    for q in range(p + 1):
        coeff = env.moment(p - q) * env.width ** q / (factorial(q) * factorial(p - q))
        total += coeff * toggled_moment(seq, q)
    total *= 0.5
    return np.array([total.real, total.imag, 0.0])


def dc_second_order_env(seq: "PulseSequence", env: Envelope, rms: float) -> float:
    """Gaussian-averaged ``|a_2,DC|²`` with the envelope area ``I_0`` in place of π/Ω."""
    from .response import double_sin_sum

    if rms < 0:
        raise ValueError("rms must be non-negative")
    i0 = env.moment(0) / seq.rabi
    return 3.0 / 16.0 * i0 ** 4 * rms ** 4 * double_sin_sum(seq) ** 2


def filter_function_env(seq: "PulseSequence", env: Envelope, f):
    """Amplitude filter function of ``seq`` played with ``env``."""
    from .response import filter_function

    return filter_function(seq.with_envelope(env), f)
