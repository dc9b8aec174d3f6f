"""Power-law amplitude (PLA) constraints and their solution.

A sequence satisfies PLA(n) when the toggling-frame moments

    c'_p = Σ_l (l-1)^p exp(i φ'_l),   p = 0..n

all vanish and the alternating phase sum ``g(φ)`` is a multiple of π.  Such a
sequence cancels, at first Magnus order, every amplitude drift that is a
polynomial of degree ≤ n in time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy import optimize

from .sequences import DEFAULT_RABI, PulseSequence, lab_phases, toggling_phases, wrap

__all__ = [
    "ConstraintReport",
    "SolverConfig",
    "Candidate",
    "SolutionNotFound",
    "toggled_moment",
    "toggled_moments",
    "check_pla",
    "continuous_moment",
    "closed_form_pla1",
    "objective",
    "residuals",
    "multistart",
    "solve_pla",
    "canonical_toggling",
    "equivalent",
    "distinct",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


class SolutionNotFound(RuntimeError):
    """No restart converged to a sequence satisfying the requested criteria.

    This does not prove that no solution exists for the given length.
    """


@dataclass(frozen=True)
class ConstraintReport:
    n: int
    residuals: tuple[float, ...]
    gate_residual: float
    tol: float = DEFAULT_TOL

    @property
    def satisfied(self) -> bool:
        return max(self.residuals) <= self.tol and self.gate_residual <= self.tol

    def failing_orders(self) -> list[int]:
        return [p for p, r in enumerate(self.residuals) if r > self.tol]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "residuals": list(self.residuals),
            "gate_residual": self.gate_residual,
            "tol": self.tol,
            "satisfied": self.satisfied,
        }


def _toggled(seq) -> np.ndarray:
    if isinstance(seq, PulseSequence):
        return seq.toggling
    return np.asarray(seq, dtype=float)


def toggled_moments(tog, n: int) -> np.ndarray:
    """``c'_p`` for p = 0..n from toggling phases; complex array of length n+1."""
    tog = np.asarray(tog, dtype=float)
    z = np.exp(1j * tog)
    k = np.arange(tog.size, dtype=float)
    powers = k[None, :] ** np.arange(n + 1)[:, None]
    powers[0, :] = 1.0  # 0**0
    return powers @ z


def toggled_moment(seq, p: int) -> complex:
    """``Σ_l (l-1)^p exp(i φ'_l)``.

    ``seq`` is a :class:`PulseSequence` or an array of toggling phases.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    return complex(toggled_moments(_toggled(seq), p)[p])


def _gate_residual(phases, gamma: float = 0.0) -> float:
    phases = np.asarray(phases, dtype=float)
    g = np.sum((-1.0) ** np.arange(1, phases.size + 1) * phases)
    return abs(float(np.sin(g - gamma)))


def check_pla(seq: PulseSequence, n: int, tol: float = DEFAULT_TOL, gamma: float = 0.0) -> ConstraintReport:
    """Evaluate the PLA(n) residuals of ``seq``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    c = toggled_moments(seq.toggling, n)
    return ConstraintReport(n, tuple(float(x) for x in np.abs(c)), _gate_residual(seq.phases, gamma), tol)


def continuous_moment(seq: PulseSequence, p: int, origin: str = "start") -> np.ndarray:
    """Dimensionless drift moment ``rabi**(p+1) c_{a,p}`` as a real 3-vector.

    For square pulses this integrates each segment exactly,
    ``½ π^{p+1}/(p+1)! Σ_l ρ(φ'_l) (l^{p+1} - (l-1)^{p+1})``; other envelopes go
    through their moment integrals.  ``origin="center"`` measures time from
    the middle of the sequence instead of its start.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    if origin == "center":
        half = -0.5 * len(seq) * seq.envelope.width
        terms = [continuous_moment(seq, p - q) * half ** q / factorial(q) for q in range(p + 1)]
        return np.sum(terms, axis=0)
    if origin != "start":
        raise ValueError("origin must be 'start' or 'center'")
    if not seq.envelope.is_square:
        from .envelope import continuous_moment_env

        return continuous_moment_env(seq, seq.envelope, p)
    z = np.exp(1j * seq.toggling)
    l = np.arange(1, z.size + 1, dtype=float)
    weights = l ** (p + 1) - (l - 1) ** (p + 1)
    c = 0.5 * np.pi ** (p + 1) / factorial(p + 1) * np.dot(weights, z)
    return np.array([c.real, c.imag, 0.0])


def closed_form_pla1(variant: str, sign: int = +1, rabi: float = DEFAULT_RABI) -> PulseSequence:
    """The two five-pulse PLA(1) solutions in closed form.

    ``F1``: ``(-3α, -α, 0, α, 3α)`` with α = ±arccos(-1/4).
    ``PLA1_2``: ``(-β, -2β+δ, -2β+2δ, -2β+δ, -β)`` with β = ±arccos((1-2√10)/6)
    and δ = ∓arccos((√10-2)/3).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if variant == "F1":
        a = sign * np.arccos(-0.25)
        phases = [-3 * a, -a, 0.0, a, 3 * a]
    elif variant == "PLA1_2":
        b = sign * np.arccos((1 - 2 * np.sqrt(10)) / 6)
        d = -sign * np.arccos((np.sqrt(10) - 2) / 3)
        phases = [-b, -2 * b + d, -2 * b + 2 * d, -2 * b + d, -b]
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'F1' or 'PLA1_2'")
    name = variant if sign > 0 else f"{variant}_mirror"
    return PulseSequence(name, phases, rabi)


# -- numerical design ----------------------------------------------------------


def residuals(phases, n: int, gamma: float = 0.0) -> np.ndarray:
    """Scaled residual vector whose squared norm is :func:`objective`.

    Entries are ``sin(g - γ)`` followed by the real and imaginary parts of
    ``c'_p / N^{p+1}`` for p = 0..n.
    """
    phases = np.asarray(phases, dtype=float)
    size = phases.size
    g = np.sum((-1.0) ** np.arange(1, size + 1) * phases)
    c = toggled_moments(toggling_phases(phases), n) / float(size) ** np.arange(1, n + 2)
    return np.concatenate(([np.sin(g - gamma)], c.real, c.imag))


def objective(phases, n: int, gamma: float = 0.0) -> float:
    """``sin²(g - γ) + Σ_p |c'_p|² / N^{2p+2}``; zero exactly on PLA(n) solutions."""
    r = residuals(phases, n, gamma)
    return float(np.dot(r, r))


@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`solve_pla`.

    ``pulses`` is the sequence length N and must be odd.  Each restart draws
    its initial phases from a stream keyed by ``(seed, restart)``.
    """

    n: int
    pulses: int
    restarts: int = 50
    max_iters: int = 4000
    tol: float = DEFAULT_TOL
    seed: int = 0
    gate_angle_target: float = 0.0
    rabi: float = DEFAULT_RABI

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.pulses < 3 or self.pulses % 2 == 0:
            raise ValueError(f"pulses must be an odd integer >= 3, got {self.pulses}")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.pulses < self.n + 2:
            log.warning("N=%d is below the n+2 heuristic floor for PLA(%d)", self.pulses, self.n)


@dataclass(frozen=True)
class Candidate:
    restart: int
    phases: np.ndarray = field(repr=False)
    objective: float
    converged: bool


def _run_restart(cfg: SolverConfig, restart: int) -> Candidate:
    rng = np.random.default_rng([cfg.seed, restart])
    x0 = rng.uniform(0.0, 2 * np.pi, cfg.pulses)
    fun = lambda x: objective(x, cfg.n, cfg.gate_angle_target)  # noqa: E731
    res = optimize.minimize(
        fun, x0, method="Nelder-Mead",
        options={"maxiter": cfg.max_iters, "xatol": 1e-10, "fatol": 1e-24, "adaptive": True},
    )
    x = res.x
    # local polish of the simplex result on the residual vector
    lsq = optimize.least_squares(
        residuals, x, args=(cfg.n, cfg.gate_angle_target),
        method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * cfg.pulses,
    )
    if objective(lsq.x, cfg.n, cfg.gate_angle_target) <= res.fun:
        x = lsq.x
    x = np.mod(x, 2 * np.pi)
    obj = objective(x, cfg.n, cfg.gate_angle_target)
    probe = PulseSequence("candidate", x, cfg.rabi)
    report = check_pla(probe, cfg.n, cfg.tol, cfg.gate_angle_target)
    return Candidate(restart, x, obj, report.satisfied)


def multistart(cfg: SolverConfig) -> list[Candidate]:
    """Run every restart and return all candidates in restart order."""
    return [_run_restart(cfg, r) for r in range(cfg.restarts)]


def solve_pla(cfg: SolverConfig, name: str | None = None) -> PulseSequence:
    """Find a length-``cfg.pulses`` sequence satisfying PLA(``cfg.n``).

    The converged restart with the lowest objective wins; ties go to the
    lower restart index.

    Raises
    ------
    SolutionNotFound
        If no restart satisfies the criteria at ``cfg.tol``.
    """
    cands = [c for c in multistart(cfg) if c.converged]
    if not cands:
        raise SolutionNotFound(
            f"no PLA({cfg.n}) solution with N={cfg.pulses} after {cfg.restarts} restarts")
    best = min(cands, key=lambda c: (c.objective, c.restart))
    log.info("restart %d converged, objective %.3e", best.restart, best.objective)
    return PulseSequence(name or f"PLA{cfg.n}_N{cfg.pulses}_seed{cfg.seed}", best.phases, cfg.rabi)


# -- symmetry classes ----------------------------------------------------------


def _centered(tog: np.ndarray) -> np.ndarray:
    return wrap(tog - tog[tog.size // 2])


def _variants(tog: np.ndarray):
    for t in (tog, -tog, tog[::-1], -tog[::-1]):
        yield _centered(t)


def canonical_toggling(seq) -> np.ndarray:
    """Representative of the symmetry class of a sequence's toggling phases.

    Solutions come in families related by a uniform toggling offset, by
    negating every toggling phase and by time reversal.  The representative
    fixes the middle pulse at zero and picks the lexicographically smallest of
    the four variants.
    """
    tog = _toggled(seq)
    variants = list(_variants(tog))
    keys = [tuple(np.round(v, 9)) for v in variants]
    return variants[min(range(len(variants)), key=keys.__getitem__)]


def equivalent(a, b, atol: float = 1e-6) -> bool:
    """True if two sequences differ only by the symmetries above."""
    ta, tb = _toggled(a), _toggled(b)
    if ta.size != tb.size:
        return False
    tb = _centered(tb)
    return any(np.max(np.abs(wrap(v - tb))) <= atol for v in _variants(ta))


def distinct(seqs, atol: float = 1e-6) -> list:
    """Drop sequences equivalent to an earlier one."""
    kept = []
    for s in seqs:
        if not any(equivalent(s, k, atol) for k in kept):
            kept.append(s)
    return kept


def lab_from_toggling(tog, name: str = "toggled", rabi: float = DEFAULT_RABI) -> PulseSequence:
    return PulseSequence(name, lab_phases(tog), rabi)
