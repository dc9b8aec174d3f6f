"""Composite π-pulse sequences and the lab/toggling frame algebra.

A sequence is an odd train of π pulses ``π_φ1 → π_φ2 → ... → π_φN`` played
back to back at Rabi frequency ``rabi``.  In the toggling frame the
amplitude-error axis of pulse ``j`` sits at angle

    φ'_j = -(-1)^j φ_j - Σ_{k<j} (-1)^k 2 φ_k

and every robustness criterion is written in terms of these angles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .envelope import Envelope, square

__all__ = [
    "PulseSequence",
    "toggling_phases",
    "lab_phases",
    "gate_angle",
    "fidelity",
    "infidelity",
    "batch_infidelity",
    "is_unitary",
    "rotation",
    "ideal_unitary",
    "sequence_unitary",
    "error_vector",
    "catalog",
    "get",
    "wrap",
    "DEFAULT_RABI",
]

TWO_PI = 2 * np.pi
DEFAULT_RABI = 1.5e6  # rad/s

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

UNITARITY_ATOL = 1e-9


def wrap(phi):
    """Reduce angles into (-π, π]."""
    phi = np.asarray(phi, dtype=float)
    out = np.mod(phi + np.pi, TWO_PI) - np.pi
    return np.where(out == -np.pi, np.pi, out)


@dataclass(frozen=True, eq=False)
class PulseSequence:
    """An odd train of π pulses with phases in radians.

    Phases are stored in ``[0, 2π)``.  Pulse ``l`` (1-based) occupies
    ``[(l-1) t_d, l t_d]`` with ``t_d = envelope.width / rabi``; for the
    default square envelope ``t_d = π / rabi``.
    """

    name: str
    phases: np.ndarray
    rabi: float = DEFAULT_RABI
    envelope: Envelope = field(default_factory=square)

    def __post_init__(self):
        phi = np.array(self.phases, dtype=float).ravel()
        if phi.size == 0 or phi.size % 2 == 0:
            raise ValueError(f"sequence length must be a positive odd integer, got {phi.size}")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phases must be finite")
        if not self.rabi > 0:
            raise ValueError("rabi frequency must be positive")
        phi = np.mod(phi, TWO_PI)
        phi[phi >= TWO_PI] = 0.0
        phi.setflags(write=False)
        object.__setattr__(self, "phases", phi)

    def __len__(self):
        return self.phases.size

    def __repr__(self):
        return f"PulseSequence({self.name!r}, N={len(self)}, rabi={self.rabi:g}, envelope={self.envelope.kind})"

    @property
    def n_pulses(self) -> int:
        return self.phases.size

    @property
    def t_d(self) -> float:
        """Single pulse duration in seconds."""
        return self.envelope.duration(self.rabi)

    @property
    def tau(self) -> float:
        """Total sequence duration in seconds."""
        return self.n_pulses * self.t_d

    @property
    def toggling(self) -> np.ndarray:
        return toggling_phases(self.phases)

    def with_envelope(self, env: Envelope) -> "PulseSequence":
        return PulseSequence(self.name, self.phases, self.rabi, env)

    def with_rabi(self, rabi: float) -> "PulseSequence":
        return PulseSequence(self.name, self.phases, rabi, self.envelope)

    def renamed(self, name: str) -> "PulseSequence":
        return PulseSequence(name, self.phases, self.rabi, self.envelope)

    # -- JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        env = self.envelope.kind if self.envelope.is_default() else self.envelope.to_json(self.rabi)
        return {
            "name": self.name,
            "phases_rad": [float(p) for p in self.phases],
            "rabi_rad_per_s": float(self.rabi),
            "envelope": env,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict, degrees: bool = False) -> "PulseSequence":
        try:
            phases = np.asarray(d["phases_rad"], dtype=float)
            rabi = float(d.get("rabi_rad_per_s", DEFAULT_RABI))
            name = str(d.get("name", "unnamed"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed sequence JSON: {exc}") from None
        if degrees:
            phases = np.deg2rad(phases)
        env = Envelope.from_json(d.get("envelope", "square"), rabi)
        return cls(name, phases, rabi, env)

    @classmethod
    def load(cls, path, degrees: bool = False) -> "PulseSequence":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON in {path}: {exc}") from None
        if not isinstance(d, dict):
            raise ValueError(f"{path}: expected a JSON object")
        return cls.from_dict(d, degrees=degrees)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _phases_of(seq) -> np.ndarray:
    if isinstance(seq, PulseSequence):
        return seq.phases
    return np.asarray(seq, dtype=float)


def toggling_phases(seq) -> np.ndarray:
    """Toggling-frame phases φ' of a sequence (or raw phase array).

    The result is reduced into (-π, π] with no global offset applied.
    """
    phi = _phases_of(seq)
    j = np.arange(1, phi.size + 1)
    sign = (-1.0) ** j
    # Σ_{k<j} (-1)^k 2φ_k as an exclusive cumulative sum
    prefix = np.concatenate(([0.0], np.cumsum(2 * sign * phi)[:-1]))
    return wrap(-sign * phi - prefix)


def lab_phases(toggled) -> np.ndarray:
    """Invert :func:`toggling_phases`; returns lab phases in ``[0, 2π)``."""
    tog = np.asarray(toggled, dtype=float)
    phi = np.empty_like(tog)
    prefix = 0.0
    for idx, tp in enumerate(tog):
        s = (-1.0) ** (idx + 1)
        # φ'_j = -s φ_j - prefix  =>  φ_j = -s (φ'_j + prefix)
        phi[idx] = -s * (tp + prefix)
        prefix += 2 * s * phi[idx]
    return np.mod(phi, TWO_PI)


def gate_angle(seq) -> tuple[float, int]:
    """Split ``g(φ) = Σ (-1)^l φ_l`` as ``k π + γ`` with γ in (-π/2, π/2].

    γ = 0 means the sequence implements an X gate (up to global phase);
    otherwise it is a π rotation about the axis at angle γ.
    """
    phi = _phases_of(seq)
    g = float(np.sum((-1.0) ** np.arange(1, phi.size + 1) * phi))
    k = int(np.ceil(g / np.pi - 0.5))
    gamma = g - k * np.pi
    if gamma <= -np.pi / 2:
        gamma += np.pi
        k -= 1
    return gamma, k


# -- unitaries ----------------------------------------------------------------


def is_unitary(u, atol: float = UNITARITY_ATOL) -> bool:
    u = np.asarray(u)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, IDENTITY, rtol=0, atol=atol)


def rotation(angle, phase):
    """``exp(-i angle/2 (cos φ σx + sin φ σy))``; broadcasts over leading axes."""
    angle = np.asarray(angle, dtype=float)
    phase = np.asarray(phase, dtype=float)
    c = np.cos(angle / 2)
    s = np.sin(angle / 2)
    e = np.exp(-1j * phase)
    shape = np.broadcast(angle, phase).shape
    u = np.empty(shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 1, 1] = c
    u[..., 0, 1] = -1j * s * e
    u[..., 1, 0] = -1j * s * np.conj(e)
    return u


def sequence_unitary(seq: PulseSequence, angles=None):
    """Product of pulse rotations, last pulse leftmost.

    ``angles`` overrides the nominal π rotation of each pulse; it may carry
    leading batch axes, shape ``(..., N)``.
    """
    phi = seq.phases
    if angles is None:
        angles = np.full(phi.size, np.pi)
    rots = rotation(angles, phi)
    u = rots[..., 0, :, :]
    for l in range(1, phi.size):
        u = rots[..., l, :, :] @ u
    return u


def ideal_unitary(seq: PulseSequence) -> np.ndarray:
    return sequence_unitary(seq)


def fidelity(ideal, actual) -> float:
    """Operational fidelity ``|Tr(U0† U)|² / 4``."""
    ideal = np.asarray(ideal, dtype=complex)
    actual = np.asarray(actual, dtype=complex)
    for name, u in (("ideal", ideal), ("actual", actual)):
        if not is_unitary(u):
            raise ValueError(f"{name} operator is not unitary")
    f = abs(np.trace(ideal.conj().T @ actual)) ** 2 / 4
    return float(min(f, 1.0))


def batch_infidelity(ideal, actual) -> np.ndarray:
    """``1 - |Tr(U0† U)|² / 4`` without cancellation; ``actual`` may be batched.

    For ``V = U0† U = e^{iα}(cos θ I - i sin θ n·σ)`` the infidelity is
    ``sin² θ = ‖V - (Tr V / 2) I‖² / 2``, which stays accurate far below
    machine epsilon.
    """
    v = np.asarray(ideal, dtype=complex).conj().T @ np.asarray(actual, dtype=complex)
    half_tr = 0.5 * (v[..., 0, 0] + v[..., 1, 1])
    d = v.copy()
    d[..., 0, 0] -= half_tr
    d[..., 1, 1] -= half_tr
    return np.clip(0.5 * np.sum(np.abs(d) ** 2, axis=(-2, -1)), 0.0, 1.0)


def infidelity(ideal, actual) -> float:
    """``1 - fidelity``, accurate for nearly perfect gates."""
    for name, u in (("ideal", ideal), ("actual", actual)):
        if not is_unitary(u):
            raise ValueError(f"{name} operator is not unitary")
    return float(batch_infidelity(ideal, actual))


def error_vector(ideal, actual) -> np.ndarray:
    """Vector ``a`` with ``U = U0 exp(-i a·σ)``, fixed up to global phase."""
    w = np.asarray(ideal).conj().T @ np.asarray(actual)
    w = w / np.sqrt(np.linalg.det(w))
    c = np.clip(0.5 * np.trace(w).real, -1.0, 1.0)
    if c < 0:
        w, c = -w, -c
    theta = np.arccos(c)
    comps = np.array([np.trace(s @ w) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    # w = cos θ I - i sin θ n·σ  =>  Tr(σ_k w) = -2i sin θ n_k
    n_sin = (comps / (-2j)).real
    s = np.sin(theta)
    if s < 1e-300:
        return np.zeros(3)
    return theta * n_sin / s


# -- catalog -----------------------------------------------------------------

_TABLE_PLA2 = (
    1.76715945118259, 5.41431157276639, 0.60338726707880, 2.25267362096692,
    5.66568802156378, 0.11541193070770, 2.91932560661088, 3.75846738675240,
    0.58530416475736,
)
_TABLE_PLA3 = (
    4.83865251534654, 1.84379790507494, 1.93262975911420, 0.48888316408261,
    3.13701277837872, 3.67903366892586, 3.52519916847217, 5.73340443857318,
    4.41388024396790, 4.49690511625724, 1.53624248122411,
)
_KNILL_DEG = (30.0, 0.0, 90.0, 0.0, 30.0)


def catalog(rabi: float = DEFAULT_RABI) -> list[PulseSequence]:
    """Named reference sequences.

    ``primitive`` (a bare π pulse), ``knill``, ``F1`` and ``PLA1_2`` from
    their closed forms, and the tabulated numerical solutions ``PLA2_1``
    and ``PLA3_1``.
    """
    from .design import closed_form_pla1

    return [
        PulseSequence("primitive", [0.0], rabi),
        PulseSequence("knill", np.deg2rad(_KNILL_DEG), rabi),
        closed_form_pla1("F1", +1, rabi=rabi),
        closed_form_pla1("PLA1_2", +1, rabi=rabi),
        PulseSequence("PLA2_1", _TABLE_PLA2, rabi),
        PulseSequence("PLA3_1", _TABLE_PLA3, rabi),
    ]


def get(name: str, rabi: float = DEFAULT_RABI) -> PulseSequence:
    for seq in catalog(rabi):
        if seq.name.lower() == name.lower():
            return seq
    raise KeyError(f"unknown sequence {name!r}")
