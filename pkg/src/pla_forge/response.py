"""Frequency response and perturbative infidelity of amplitude noise.

Internally everything is dimensionless: time in units of ``1/rabi`` and
angular frequency as ``w = ω / rabi``.  Public functions take SI inputs
(Hz, rad/s) and convert at the boundary.

The noise model behind the infidelity predictions uses a one-sided power
spectral density whose integral over ``f > 0`` is the mean-square error σ².
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .design import check_pla, continuous_moment
from .sequences import PulseSequence, batch_infidelity, sequence_unitary

__all__ = [
    "FilterCurve",
    "TheoryPrediction",
    "FilterOrder",
    "filter_function",
    "filter_curve",
    "filter_order",
    "first_order_infidelity",
    "double_sin_sum",
    "dc_second_order",
    "second_order_infidelity",
    "dc_limit_quadrature",
    "static_infidelity",
    "theory_curve",
    "regime_boundaries",
    "regime_map",
    "log_grid",
]

DEFAULT_QUAD_ORDER = 32
POINTS_PER_DECADE = 20


@dataclass(frozen=True, eq=False)
class FilterCurve:
    frequencies: np.ndarray  # Hz
    values: np.ndarray
    name: str = ""


@dataclass(frozen=True)
class TheoryPrediction:
    """Infidelity predictions for narrow-band noise at one centre frequency.

    ``total`` is the filter-function term plus the Gaussian-averaged DC
    second-order Magnus term.  ``dc_quadrature`` is the exact DC-limit
    infidelity, reported alongside as the reference for the low-frequency
    plateau.

    ``dc_excess`` is the part of that plateau the first-order term does not
    already account for, ``dc_quadrature - σ²|c_{a,0}|²``; it contains the
    DC second-order term and everything above it.  ``corrected`` adds it to
    the first-order term and is the prediction compared against simulation.
    ``second_order`` is the mean-square second-order Magnus term for a
    single tone at the centre frequency, reported for reference.
    """

    first_order: float
    dc_second_order: float
    dc_quadrature: float
    dc_excess: float = 0.0
    second_order: float = 0.0

    @property
    def total(self) -> float:
        return self.first_order + self.dc_second_order

    @property
    def corrected(self) -> float:
        return self.first_order + self.dc_excess


class FilterOrder(NamedTuple):
    slope: float
    order: float


def log_grid(lo: float, hi: float, points: int | None = None) -> np.ndarray:
    """Logarithmic grid, 20 points per decade unless ``points`` is given."""
    if not (0 < lo < hi):
        raise ValueError("log grid needs 0 < lo < hi")
    if points is None:
        points = max(2, int(round(POINTS_PER_DECADE * np.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, points)


# -- filter function -------------------------------------------------------


def _rho_tilde(seq: PulseSequence, w: np.ndarray) -> np.ndarray:
    """Dimensionless ``rabi * ρ̃_a`` at angular frequencies ``w``; shape (len(w), 2)."""
    tog = seq.toggling
    env = seq.envelope
    width = env.width
    starts = width * np.arange(tog.size)
    rho = np.stack([np.cos(tog), np.sin(tog)], axis=1)  # (N, 2)
    phase = np.exp(1j * np.outer(w, starts))  # (F, N)
    # ρ̃ = -i w · ½ · ĝ(w) · Σ_l ρ_l exp(i w t_{l-1})
    ghat = env.fourier(w) if not env.is_square else _square_fourier(w, width)
    return (-0.5j * w * ghat)[:, None] * (phase @ rho)


def _square_fourier(w, width):
    half = 0.5 * w * width
    return width * np.exp(1j * half) * np.sinc(half / np.pi)


def _h(seq: PulseSequence, w) -> np.ndarray:
    w = np.atleast_1d(np.asarray(w, dtype=float))
    rt = _rho_tilde(seq, w)
    return np.sum(np.abs(rt) ** 2, axis=1)


def filter_function(seq: PulseSequence, f):
    """Amplitude filter function ``h_a(f)`` (dimensionless).

    Square envelopes integrate each pulse in closed form.  Other envelopes
    evaluate the single-pulse Fourier integral by adaptive quadrature; the
    pulses share one envelope so it factors out of the sum.
    """
    scalar = np.ndim(f) == 0
    w = 2 * np.pi * np.atleast_1d(np.asarray(f, dtype=float)) / seq.rabi
    h = _h(seq, np.abs(w))
    return float(h[0]) if scalar else h


def filter_curve(seq: PulseSequence, fmin: float, fmax: float, points: int | None = None) -> FilterCurve:
    f = log_grid(fmin, fmax, points)
    return FilterCurve(f, filter_function(seq, f), seq.name)


def filter_order(seq: PulseSequence, f_window=None, points: int = 41) -> FilterOrder:
    """Low-frequency roll-off of ``h_a``.

    Fits ``log h`` against ``log f`` by least squares over ``f_window`` (Hz;
    default ``[1e-4, 1e-3] * rabi / 2π``).  The filter order is
    ``slope / 2 - 1``.
    """
    if f_window is None:
        base = seq.rabi / (2 * np.pi)
        f_window = (1e-4 * base, 1e-3 * base)
    lo, hi = f_window
    if not (0 < lo < hi) or points < 2:
        raise ValueError("degenerate fitting window")
    f = np.geomspace(lo, hi, points)
    h = filter_function(seq, f)
    if np.any(h <= 0):
        raise ValueError("filter function vanishes inside the fitting window")
    slope = float(np.polyfit(np.log(f), np.log(h), 1)[0])
    return FilterOrder(slope, slope / 2 - 1)


# -- perturbative infidelity -------------------------------------------------


def first_order_infidelity(seq: PulseSequence, f_center: float, rms: float) -> float:
    """Filter-function prediction ``h_a(f_c) σ² / (2π f_c)²`` for narrow-band noise."""
    if f_center <= 0:
        raise ValueError("first-order prediction needs f_center > 0; use the DC functions at f = 0")
    if rms < 0:
        raise ValueError("rms must be non-negative")
    return float(filter_function(seq, f_center) * rms ** 2 / (2 * np.pi * f_center) ** 2)


def double_sin_sum(seq) -> float:
    """``Σ_l Σ_{m<l} sin(φ'_m - φ'_l)`` over toggling phases."""
    tog = seq.toggling if isinstance(seq, PulseSequence) else np.asarray(seq, dtype=float)
    diff = np.sin(tog[:, None] - tog[None, :])  # [m, l] = sin(φ'_m - φ'_l)
    return float(np.sum(np.triu(diff, k=1)))


def dc_second_order(seq: PulseSequence, rms: float) -> float:
    """``⟨|a_2,DC|²⟩`` for static Gaussian amplitude error of RMS ``rms`` (rad/s).

    ``3/16 · I_0⁴ · σ⁴ · [Σ_{m<l} sin(φ'_m - φ'_l)]²`` with ``I_0 = π / rabi``
    for every normalized envelope.
    """
    if rms < 0:
        raise ValueError("rms must be non-negative")
    i0 = seq.envelope.moment(0) / seq.rabi
    return 3.0 / 16.0 * i0 ** 4 * rms ** 4 * double_sin_sum(seq) ** 2


def static_infidelity(seq: PulseSequence, beta):
    """Exact ``1 - F`` for a constant amplitude error ``beta`` (rad/s).

    With a normalized envelope every pulse rotates by ``π (1 + β/rabi)``.
    """
    beta = np.asarray(beta, dtype=float)
    angles = np.pi * (1 + beta / seq.rabi)[..., None] * np.ones(len(seq))
    u0 = sequence_unitary(seq)
    return batch_infidelity(u0, sequence_unitary(seq, angles))


def dc_limit_quadrature(seq: PulseSequence, rms: float, order: int = DEFAULT_QUAD_ORDER) -> float:
    """``⟨1 - F(β)⟩`` over static ``β ~ N(0, rms²)`` by Gauss-Hermite quadrature."""
    if order < 8:
        raise ValueError("quadrature order must be at least 8")
    if rms < 0:
        raise ValueError("rms must be non-negative")
    if rms == 0:
        return 0.0
    x, wts = np.polynomial.hermite_e.hermegauss(order)
    vals = static_infidelity(seq, rms * x)
    return float(np.dot(wts, vals) / np.sqrt(2 * np.pi))


def _pulse_fourier(seq: PulseSequence, w: float) -> np.ndarray:
    """``∫ g(u - u_{l-1}) exp(i w u) du`` for every pulse l (dimensionless)."""
    env = seq.envelope
    ghat = _square_fourier(np.atleast_1d(w), env.width) if env.is_square else env.fourier(w)
    return np.exp(1j * w * env.width * np.arange(len(seq))) * ghat[0]


def second_order_infidelity(seq: PulseSequence, f_center: float, rms: float) -> float:
    """``⟨|a_2|²⟩`` for a single-tone Gaussian amplitude error at ``f_center``.

    The error is ``X cos ωt + Y sin ωt`` with independent ``X, Y ~ N(0, σ²)``,
    the narrow-band limit of the simulated noise.  The second-order Magnus
    vector points along z and is a quadratic form ``A X² + B XY + C Y²`` in
    the amplitudes, so its mean square is ``σ⁴ (3A² + B² + 3C² + 2AC)``.
    As ``f_center -> 0`` this reduces to :func:`dc_second_order`.
    """
    if rms < 0:
        raise ValueError("rms must be non-negative")
    w = 2 * np.pi * f_center / seq.rabi
    if w == 0:
        p = np.full(len(seq), seq.envelope.moment(0), dtype=complex)
    else:
        p = _pulse_fourier(seq, w)
    cos_int, sin_int = p.real, p.imag
    tog = seq.toggling
    # kern[l, m] = ¼ sin(φ'_m - φ'_l) for m < l
    kern = 0.25 * np.tril(np.sin(tog[None, :] - tog[:, None]), k=-1)
    a = cos_int @ kern @ cos_int
    b = cos_int @ kern @ sin_int + sin_int @ kern @ cos_int
    c = sin_int @ kern @ sin_int
    s = rms / seq.rabi
    return float(s ** 4 * (3 * a * a + b * b + 3 * c * c + 2 * a * c))


def _dc_excess(seq: PulseSequence, rms: float, dc_quad: float) -> float:
    c0 = continuous_moment(seq, 0) / seq.rabi
    return max(dc_quad - rms ** 2 * float(np.dot(c0, c0)), 0.0)


def theory_curve(seq: PulseSequence, f_center, rms: float, quad_order: int = DEFAULT_QUAD_ORDER):
    """Theory predictions at one or many centre frequencies (Hz).

    Returns a :class:`TheoryPrediction` for scalar ``f_center`` and a list of
    them otherwise.
    """
    dc2 = dc_second_order(seq, rms)
    dcq = dc_limit_quadrature(seq, rms, quad_order)
    excess = _dc_excess(seq, rms, dcq)
    fcs = np.atleast_1d(np.asarray(f_center, dtype=float))
    preds = [
        TheoryPrediction(first_order_infidelity(seq, fc, rms), dc2, dcq, excess,
                         second_order_infidelity(seq, fc, rms))
        for fc in fcs
    ]
    return preds[0] if np.ndim(f_center) == 0 else preds


# -- regimes ---------------------------------------------------------------


def _require(seq: PulseSequence, n: int, role: str):
    rep = check_pla(seq, n)
    if not rep.satisfied:
        bad = ", ".join(f"c'_{p}" for p in rep.failing_orders())
        if rep.gate_residual > rep.tol:
            bad = (bad + ", " if bad else "") + "gate condition"
        raise ValueError(f"{role} sequence {seq.name!r} violates PLA({n}): {bad}")


def regime_boundaries(ref: PulseSequence, alt: PulseSequence, rms_ratio) -> tuple:
    """Boundaries in ``ω/Ω`` of the band where ``alt`` beats ``ref``.

    ``ref`` must satisfy PLA(1) (e.g. F1) and ``alt`` PLA(2).  The lower
    bound balances the first-order infidelity of ``ref`` against the DC
    second-order term of ``alt``; the upper bound balances the two
    first-order roll-offs:

        (ω/Ω)² > (σ/Ω) (√3/4) π² |S_alt| / |Ω³ c_{a,2}(ref)|
        ω/Ω    < |Ω³ c_{a,2}(ref)| / |Ω⁴ c_{a,3}(alt)|

    The region is empty wherever ``lower >= upper``.
    """
    _require(ref, 1, "reference")
    _require(alt, 2, "alternative")
    c2 = np.linalg.norm(continuous_moment(ref, 2))
    c3 = np.linalg.norm(continuous_moment(alt, 3))
    s_alt = abs(double_sin_sum(alt))
    s = np.asarray(rms_ratio, dtype=float)
    if np.any(s < 0):
        raise ValueError("rms ratio must be non-negative")
    lower = np.sqrt(s * np.sqrt(3) / 4 * np.pi ** 2 * s_alt / c2)
    upper = np.full_like(lower, c2 / c3)
    if np.ndim(rms_ratio) == 0:
        return float(lower), float(upper)
    return lower, upper


def _total_dimensionless(seq: PulseSequence, w: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Theory total on a (len(s), len(w)) grid; w = ω/Ω, s = σ/Ω."""
    h = _h(seq, w)
    first = (h / w ** 2)[None, :] * (s ** 2)[:, None]
    j0 = seq.envelope.moment(0)
    dc2 = 3.0 / 16.0 * j0 ** 4 * s ** 4 * double_sin_sum(seq) ** 2
    return first + dc2[:, None]


def regime_map(ref: PulseSequence, alt: PulseSequence, w_grid, s_grid) -> np.ndarray:
    """Infidelity ratio ``alt / ref`` of theory totals.

    Rows follow ``s_grid`` (σ/Ω), columns ``w_grid`` (ω/Ω).  Cells below one
    are where ``alt`` is the better choice.
    """
    w = np.asarray(w_grid, dtype=float)
    s = np.asarray(s_grid, dtype=float)
    if np.any(w <= 0) or np.any(s <= 0):
        raise ValueError("grids must be positive")
    return _total_dimensionless(alt, w, s) / _total_dimensionless(ref, w, s)
