"""State vectors over a register profile, ket listings and projective measurement."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError, ShapeError
from .register import RegisterProfile, as_profile
from .tensor import DTYPE

NORM_TOL = 1e-10
DEFAULT_LIST_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector; ``amplitudes[k]`` belongs to basis index ``k``."""

    profile: RegisterProfile
    amplitudes: np.ndarray

    def __post_init__(self):
        profile = as_profile(self.profile)
        amps = np.array(self.amplitudes, dtype=DTYPE)
        if amps.ndim != 1 or amps.shape[0] != profile.dim:
            raise ShapeError(f"expected {profile.dim} amplitudes for profile {profile.levels}, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized (norm {norm:.12g})")
        amps.flags.writeable = False
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, profile, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=DTYPE)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(profile, amps / norm)

    @property
    def dim(self) -> int:
        return self.profile.dim

    def amplitude(self, digits: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.profile.index(digits)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def nonzero(self, tol: float = DEFAULT_LIST_TOL) -> list[tuple[tuple[int, ...], complex]]:
        idx = np.flatnonzero(np.abs(self.amplitudes) > tol)
        return [(self.profile.digits(int(k)), complex(self.amplitudes[k])) for k in idx]

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return self.profile == other.profile and np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol)


def basis_state(profile, digits: Sequence[int]) -> StateVector:
    profile = as_profile(profile)
    amps = np.zeros(profile.dim, dtype=DTYPE)
    amps[profile.index(digits)] = 1
    return StateVector(profile, amps)


def equal_superposition(profile) -> StateVector:
    profile = as_profile(profile)
    return StateVector(profile, np.full(profile.dim, 1 / np.sqrt(profile.dim), dtype=DTYPE))


# -- listing ---------------------------------------------------------------

def _fmt(x: float, precision: int) -> str:
    return f"{x + 0.0:.{precision}g}"  # + 0.0 folds -0.0 into 0.0


def format_amplitude(a: complex, precision: int = 6) -> str:
    re_s = _fmt(a.real, precision)
    im_s = _fmt(a.imag, precision)
    if not im_s.startswith("-"):
        im_s = "+" + im_s
    return f"({re_s}{im_s}i)"


def list_states(v: StateVector, tol: float = DEFAULT_LIST_TOL, precision: int = 6) -> str:
    """One ``(re+im i) |digits>`` line per amplitude above ``tol``, ascending by index.

    Real or imaginary parts with magnitude at most ``tol`` print as 0.
    """
    lines = []
    for d, a in v.nonzero(tol):
        a = complex(a.real if abs(a.real) > tol else 0.0, a.imag if abs(a.imag) > tol else 0.0)
        lines.append(f"{format_amplitude(a, precision)} {_ket(v.profile, d)}")
    return "\n".join(lines)


def _ket(profile: RegisterProfile, digits) -> str:
    sep = "," if max(profile.levels) > 10 else ""
    return "|" + sep.join(str(x) for x in digits) + "⟩"


_TERM = re.compile(r"\(([^()]*)i\)\s*\|([^⟩]*)⟩")


def parse_listing(text: str, profile, normalize: bool = True) -> StateVector:
    """Inverse of :func:`list_states`.

    With ``normalize`` the parsed amplitudes are rescaled to unit norm, which
    absorbs the rounding of the printed precision.
    """
    profile = as_profile(profile)
    amps = np.zeros(profile.dim, dtype=DTYPE)
    for m in _TERM.finditer(text):
        body, ket = m.groups()
        digits = [int(x) for x in ket.split(",")] if "," in ket else [int(x) for x in ket]
        amps[profile.index(digits)] = complex(body.replace(" ", "") + "j")
    if normalize:
        return StateVector.normalized(profile, amps)
    return StateVector(profile, amps)


# -- measurement -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    wires: tuple[int, ...]
    digits: tuple[int, ...]
    probability: float
    post_state: StateVector


def _require_rng(rng) -> np.random.Generator:
    if not isinstance(rng, np.random.Generator):
        raise InvalidArgumentError("measurement needs an explicit numpy.random.Generator (e.g. np.random.default_rng(seed))")
    return rng


def outcome_probabilities(v: StateVector) -> np.ndarray:
    """Born-rule probability of every basis index."""
    return v.probabilities()


def wire_marginal(v: StateVector, wire: int) -> np.ndarray:
    """Probability of each level of ``wire``."""
    wire = v.profile.check_wire(wire)
    t = v.probabilities().reshape(v.profile.levels)
    others = tuple(w for w in range(v.profile.n_wires) if w != wire)
    return t.sum(axis=others) if others else t


def register_marginal(v: StateVector, wires: Sequence[int]) -> dict[tuple[int, ...], float]:
    """Joint distribution of ``wires`` (in the given order); zero-probability outcomes omitted."""
    wires = [v.profile.check_wire(w) for w in wires]
    t = v.probabilities().reshape(v.profile.levels)
    others = tuple(w for w in range(v.profile.n_wires) if w not in wires)
    kept = sorted(wires)
    m = t.sum(axis=others) if others else t
    m = np.transpose(m, [kept.index(w) for w in wires])
    return {tuple(int(x) for x in idx): float(m[idx]) for idx in zip(*np.nonzero(m))}


def measure_all(v: StateVector, rng: np.random.Generator) -> MeasurementOutcome:
    rng = _require_rng(rng)
    p = v.probabilities()
    k = int(rng.choice(v.dim, p=p / p.sum()))
    digits = v.profile.digits(k)
    return MeasurementOutcome(tuple(range(v.profile.n_wires)), digits, float(p[k]), basis_state(v.profile, digits))


def measure_wire(v: StateVector, wire: int, rng: np.random.Generator) -> MeasurementOutcome:
    rng = _require_rng(rng)
    marginal = wire_marginal(v, wire)
    level = int(rng.choice(len(marginal), p=marginal / marginal.sum()))
    return MeasurementOutcome((wire,), (level,), float(marginal[level]), project_wire(v, wire, level))


def project_wire(v: StateVector, wire: int, level: int) -> StateVector:
    """Renormalized projection of ``v`` onto ``level`` of ``wire``."""
    wire = v.profile.check_wire(wire)
    if not 0 <= level < v.profile[wire]:
        raise InvalidArgumentError(f"level {level} is out of range for wire {wire} with {v.profile[wire]} levels")
    t = np.array(v.amplitudes).reshape(v.profile.levels)
    mask = np.zeros(v.profile[wire], dtype=bool)
    mask[level] = True
    index = [slice(None)] * v.profile.n_wires
    index[wire] = ~mask
    t[tuple(index)] = 0
    return StateVector.normalized(v.profile, t.reshape(-1))
