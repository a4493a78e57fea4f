"""Bipartite density-matrix toolkit: partial trace, conditioning, expectation.

Conditioning subsystem 2 on a projector P2 uses the symmetric sandwich

    rho_{1/2} = Tr_2[(1 x P2) rho (1 x P2)] / Tr[(1 x P2) rho].

For Hermitian rho and idempotent Hermitian P2 the textbook asymmetric form
Tr_2(P2 rho)/Tr(P2 rho) coincides with it exactly: trace cyclicity within
each subsystem-2 block gives Tr(P2 rho_ij P2) = Tr(P2 rho_ij), so the
asymmetric form is itself Hermitian and positive.  The sandwich is kept as
the implementation because it stays a valid state even when the inputs
carry numerical Hermiticity defects or the conditioning operator is not
exactly idempotent; the plain form is available as
`conditional_density_raw`.  Events with probability below 1e-14 raise
ZeroProbabilityError.  Dense matrices, dimensions up to 64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError, ZeroProbabilityError

HERM_TOL = 1e-12
EIG_FLOOR = -1e-12
TRACE_TOL = 1e-12
PROB_FLOOR = 1e-14
MAX_DIM = 64


def _as_matrix(obj) -> np.ndarray:
    m = np.asarray(getattr(obj, "entries", obj), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("expected a square matrix")
    if m.shape[0] > MAX_DIM:
        raise ValidationError(f"dimension exceeds supported envelope {MAX_DIM}")
    return m


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    min_eigenvalue: float
    trace_defect: float

    @property
    def is_valid(self) -> bool:
        return (
            self.hermiticity_defect <= HERM_TOL
            and self.min_eigenvalue >= EIG_FLOOR
            and self.trace_defect <= TRACE_TOL
        )


def validate(rho) -> ValidationReport:
    """Check Hermiticity, positive semidefiniteness, and unit trace."""
    m = _as_matrix(rho)
    herm = float(np.max(np.abs(m - m.conj().T)))
    sym = 0.5 * (m + m.conj().T)
    min_eig = float(np.min(np.linalg.eigvalsh(sym)))
    return ValidationReport(
        hermiticity_defect=herm,
        min_eigenvalue=min_eig,
        trace_defect=float(abs(np.trace(m) - 1.0)),
    )


def is_projector(p, tol: float = HERM_TOL) -> bool:
    """True when P = P^dagger and P^2 = P within `tol`."""
    m = _as_matrix(p)
    return (
        float(np.max(np.abs(m - m.conj().T))) <= tol
        and float(np.max(np.abs(m @ m - m))) <= tol
    )


@dataclass(frozen=True)
class DensityMatrix:
    """d x d complex state; `create` validates the state invariants."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.entries)
        if m.shape[0] != self.dim:
            raise ValidationError("dim does not match entries")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def create(cls, entries) -> "DensityMatrix":
        m = _as_matrix(entries)
        report = validate(m)
        if not report.is_valid:
            raise ValidationError(f"not a valid density matrix: {report}")
        return cls(dim=m.shape[0], entries=m)


@dataclass(frozen=True)
class Projector:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.entries)
        if m.shape[0] != self.dim:
            raise ValidationError("dim does not match entries")
        if not is_projector(m):
            raise ValidationError("matrix is not a projector (P^2 = P = P^dagger)")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class BipartiteDims:
    d1: int
    d2: int

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise ValidationError("subsystem dimensions must be >= 1")

    def check(self, dim: int):
        if self.d1 * self.d2 != dim:
            raise DimensionMismatchError(f"d1*d2={self.d1 * self.d2} != dim={dim}")


def _tensor4(rho, dims: BipartiteDims) -> np.ndarray:
    m = _as_matrix(rho)
    dims.check(m.shape[0])
    return m.reshape(dims.d1, dims.d2, dims.d1, dims.d2)


def partial_trace(rho, dims: BipartiteDims, keep: str = "first") -> DensityMatrix:
    """Trace out one tensor factor; keep in {"first", "second"}."""
    t = _tensor4(rho, dims)
    if keep == "first":
        out = np.einsum("ikjk->ij", t)
    elif keep == "second":
        out = np.einsum("kikj->ij", t)
    else:
        raise ValidationError("keep must be 'first' or 'second'")
    return DensityMatrix(dim=out.shape[0], entries=out)


def _lift_p2(p2, dims: BipartiteDims) -> np.ndarray:
    p = _as_matrix(p2)
    if p.shape[0] != dims.d2:
        raise DimensionMismatchError(f"projector dim {p.shape[0]} != d2={dims.d2}")
    return np.kron(np.eye(dims.d1), p)


def conditional_probability(rho, p2, dims: BipartiteDims) -> float:
    """Tr[(1 x P2) rho]."""
    m = _as_matrix(rho)
    dims.check(m.shape[0])
    return float(np.real(np.trace(_lift_p2(p2, dims) @ m)))


def conditional_density(rho, p2, dims: BipartiteDims) -> DensityMatrix:
    """Conditional state of subsystem 1 given projector P2 on subsystem 2.

    Symmetric form Tr_2[(1 x P2) rho (1 x P2)] / Tr[(1 x P2) rho]; raises
    ZeroProbabilityError when the conditioning probability is below 1e-14.
    """
    m = _as_matrix(rho)
    dims.check(m.shape[0])
    lifted = _lift_p2(p2, dims)
    prob = np.real(np.trace(lifted @ m))
    if prob < PROB_FLOOR:
        raise ZeroProbabilityError(f"conditioning probability {prob:.3e} below {PROB_FLOOR}")
    sandwich = lifted @ m @ lifted
    out = partial_trace(sandwich / prob, dims, keep="first")
    return out


def conditional_density_raw(rho, p2, dims: BipartiteDims) -> np.ndarray:
    """Textbook asymmetric form Tr_2(P2 rho)/Tr(P2 rho).

    Coincides with `conditional_density` for exactly Hermitian rho and a
    true projector (see module docstring); returned as a bare matrix with
    no state validation applied.
    """
    m = _as_matrix(rho)
    dims.check(m.shape[0])
    lifted = _lift_p2(p2, dims)
    prob = np.real(np.trace(lifted @ m))
    if prob < PROB_FLOOR:
        raise ZeroProbabilityError(f"conditioning probability {prob:.3e} below {PROB_FLOOR}")
    t = (lifted @ m).reshape(dims.d1, dims.d2, dims.d1, dims.d2)
    return np.einsum("ikjk->ij", t) / prob


def conditional_expectation(rho, f, p2, dims: BipartiteDims) -> float:
    """<f x P2> = Tr[(f x P2) rho], with the partial-trace identity asserted.

    The same number is computed as Tr_1[f Tr_2((1 x P2) rho)]; both routes
    must agree to 1e-12, which is returned as the expectation value.
    """
    m = _as_matrix(rho)
    dims.check(m.shape[0])
    fm = _as_matrix(f)
    if fm.shape[0] != dims.d1:
        raise DimensionMismatchError(f"observable dim {fm.shape[0]} != d1={dims.d1}")
    if float(np.max(np.abs(fm - fm.conj().T))) > HERM_TOL:
        raise ValidationError("observable must be Hermitian")
    p = _as_matrix(p2)
    direct = np.trace(np.kron(fm, p) @ m)
    t = (_lift_p2(p2, dims) @ m).reshape(dims.d1, dims.d2, dims.d1, dims.d2)
    reduced = np.einsum("ikjk->ij", t)
    via_trace = np.trace(fm @ reduced)
    if abs(direct - via_trace) > 1e-12:
        raise ValidationError(
            f"expectation identity violated: {direct} vs {via_trace}"
        )
    return float(np.real(direct))


def matrix_to_dict(obj) -> dict:
    m = _as_matrix(obj)
    return {
        "dim": m.shape[0],
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != im.shape or re.shape[0] != int(obj["dim"]):
        raise ValidationError("re/im blocks inconsistent with dim")
    return re + 1j * im
