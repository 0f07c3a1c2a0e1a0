"""Finite-dimensional quantum layer: channels, Choi tests, monotone metrics.

Everything here targets small dimensions (d <= 16) where dense eigensolves
are exact enough to act as ground truth. Operators are vectorized row-major,
so a map rho -> A rho B has superoperator kron(A, B.T) and a Kraus set
{K_m} sums to kron(K_m, conj(K_m)).

The metric family is indexed by three standard operator monotone
functions (SLD, KMB, WY). In the eigenbasis of the state the metric is a
weighted sum of squared matrix elements with kernel c_f(x, y) =
1 / (y f(x/y)); on commuting inputs every kernel collapses to 1/x and the
value equals the classical local Fisher square of the diagonals. That
collapse is what the reduction checks in this module exercise, and what
the dilation witness exploits: a non-completely-positive intermediate map
shows up as a negative diagonal transition rate in a basis built from the
offending Choi eigenvector, and the classical rate machinery takes over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np
from scipy.linalg import expm

from .distances import contraction_form, fisher_rate
from .errors import (
    ChannelRepresentationError,
    DimensionMismatchError,
    DomainError,
    InvalidStateError,
    InvalidTangentError,
    ResourceLimitError,
    SingularBaseError,
    WitnessNotApplicableError,
)
from .simplex import prob_vec, rate_matrix, rates_of
from .witnesses import filter_map

__all__ = [
    "MAX_QUANTUM_DIM",
    "MonotoneKind",
    "density_matrix",
    "hermitian_perturbation",
    "SuperOperator",
    "QuantumChannel",
    "channel_from_matrix",
    "channel_from_kraus",
    "identity_channel",
    "depolarizing_channel",
    "dephasing_channel",
    "filter_channel",
    "compose",
    "extend_with_identity",
    "channel_step",
    "choi",
    "CpReport",
    "cp_check",
    "metric_kernel",
    "petz_metric",
    "diag_decomposition",
    "diag_decomposition_check",
    "commuting_reduction_rate_check",
    "SpecialPointReport",
    "special_point_check",
    "semiclassical_lindbladian",
    "classical_action",
    "QuantumWitnessReport",
    "quantum_dilation_witness",
    "quantum_witness_fd_rate",
    "ReductionReport",
    "dephasing_filter_reduction_check",
]

MAX_QUANTUM_DIM = 16

#: Hermiticity and trace tolerances for states and perturbations.
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12

#: Eigenvalues of a state may undershoot zero by at most this.
PSD_TOL = 1e-10

#: Trace preservation tolerance for channels.
TP_TOL = 1e-10

#: The metric needs state eigenvalues at least this large.
FULL_RANK_FLOOR = 1e-10


def _as_square_complex(entries, name: str) -> np.ndarray:
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be a square matrix")
    if a.shape[0] > MAX_QUANTUM_DIM:
        raise ResourceLimitError(f"{name} dimension {a.shape[0]} exceeds {MAX_QUANTUM_DIM}")
    return a


def density_matrix(entries) -> np.ndarray:
    """Validated density matrix: Hermitian, unit trace, eigenvalues >= -1e-10."""
    a = _as_square_complex(entries, "state")
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("state is not Hermitian")
    if abs(np.trace(a).real - 1.0) > TRACE_TOL or abs(np.trace(a).imag) > TRACE_TOL:
        raise InvalidStateError(f"state trace {np.trace(a):.6g} != 1")
    a = 0.5 * (a + a.conj().T)
    low = float(np.linalg.eigvalsh(a).min())
    if low < -PSD_TOL:
        raise InvalidStateError(f"state has eigenvalue {low:.3e} below -{PSD_TOL:.0e}")
    a.flags.writeable = False
    return a


def hermitian_perturbation(entries) -> np.ndarray:
    """Validated traceless Hermitian perturbation."""
    a = _as_square_complex(entries, "perturbation")
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise InvalidTangentError("perturbation is not Hermitian")
    if abs(np.trace(a)) > TRACE_TOL:
        raise InvalidTangentError(f"perturbation trace {np.trace(a):.3e} != 0")
    a = 0.5 * (a + a.conj().T)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SuperOperator:
    """Linear map on operators, stored as a matrix on row-major vectorizations."""

    matrix: np.ndarray = field(repr=False)
    dim: int

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim**2, self.dim**2):
            raise DimensionMismatchError(
                f"superoperator shape {m.shape} incompatible with dimension {self.dim}"
            )
        if self.dim > MAX_QUANTUM_DIM:
            raise ResourceLimitError(f"dimension {self.dim} exceeds {MAX_QUANTUM_DIM}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, x) -> np.ndarray:
        op = np.asarray(x, dtype=complex)
        if op.shape != (self.dim, self.dim):
            raise DimensionMismatchError("operand shape mismatch")
        return (self.matrix @ op.reshape(-1)).reshape(self.dim, self.dim)

    def trace_annihilation_defect(self) -> float:
        probe = np.eye(self.dim).reshape(-1)
        return float(np.max(np.abs(self.matrix.T @ probe)))


@dataclass(frozen=True)
class QuantumChannel(SuperOperator):
    """Trace-preserving superoperator, optionally with its Kraus operators."""

    kraus: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        super().__post_init__()
        probe = np.eye(self.dim).reshape(-1)
        defect = float(np.max(np.abs(self.matrix.T @ probe - probe)))
        if defect > TP_TOL:
            raise ChannelRepresentationError(f"trace preservation defect {defect:.3e}")


def channel_from_matrix(matrix, dim: int) -> QuantumChannel:
    return QuantumChannel(matrix=np.asarray(matrix, dtype=complex), dim=dim)


def channel_from_kraus(kraus: Iterable) -> QuantumChannel:
    ops = tuple(np.asarray(k, dtype=complex) for k in kraus)
    if not ops:
        raise DimensionMismatchError("need at least one Kraus operator")
    d = ops[0].shape[0]
    s = np.zeros((d**2, d**2), dtype=complex)
    for k in ops:
        if k.shape != (d, d):
            raise DimensionMismatchError("Kraus operators must share a square shape")
        s += np.kron(k, k.conj())
    return QuantumChannel(matrix=s, dim=d, kraus=ops)


def identity_channel(d: int) -> QuantumChannel:
    return channel_from_kraus([np.eye(d)])


def depolarizing_channel(d: int, strength: float = 1.0) -> QuantumChannel:
    """Mixes the input with the maximally mixed state; strength 1 erases it."""
    if not 0.0 <= strength <= 1.0:
        raise DomainError(f"strength must be in [0, 1], got {strength}")
    eye_vec = np.eye(d).reshape(-1).astype(complex)
    s = (1.0 - strength) * np.eye(d**2, dtype=complex)
    s += strength * np.outer(eye_vec / d, eye_vec)
    return channel_from_matrix(s, d)


def dephasing_channel(d: int, keep: float) -> QuantumChannel:
    """Shrinks every off-diagonal element by ``keep``, fixing the diagonal."""
    if not 0.0 <= keep <= 1.0:
        raise DomainError(f"keep must be in [0, 1], got {keep}")
    s = keep * np.eye(d**2, dtype=complex)
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        s += (1.0 - keep) * np.kron(e, e)
    return channel_from_matrix(s, d)


def filter_channel(pi, eps: float) -> QuantumChannel:
    """Quantum analog of the classical filter: eps rho + (1 - eps) pi tr(rho)."""
    target = density_matrix(pi)
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"filter strength must be in (0, 1], got {eps}")
    d = target.shape[0]
    eye_vec = np.eye(d).reshape(-1).astype(complex)
    s = eps * np.eye(d**2, dtype=complex) + (1.0 - eps) * np.outer(target.reshape(-1), eye_vec)
    return channel_from_matrix(s, d)


def compose(outer: SuperOperator, inner: SuperOperator) -> QuantumChannel:
    if outer.dim != inner.dim:
        raise DimensionMismatchError("composition dimension mismatch")
    return channel_from_matrix(outer.matrix @ inner.matrix, outer.dim)


def extend_with_identity(op: SuperOperator, copy_dim: int | None = None) -> SuperOperator:
    """Lift a map to system (x) copy, acting as identity on the copy."""
    da = op.dim
    db = da if copy_dim is None else int(copy_dim)
    total = da * db
    if total > MAX_QUANTUM_DIM:
        raise ResourceLimitError(f"extended dimension {total} exceeds {MAX_QUANTUM_DIM}")
    s4 = op.matrix.reshape(da, da, da, da)
    eye = np.eye(db)
    big = np.einsum("apcq,bd,PQ->abpPcdqQ", s4, eye, eye).reshape(total**2, total**2)
    if isinstance(op, QuantumChannel):
        return channel_from_matrix(big, total)
    return SuperOperator(matrix=big, dim=total)


def channel_step(lind: SuperOperator, dt: float, mode: str = "exact") -> QuantumChannel:
    """One time step of the semigroup generated by ``lind``.

    ``exact`` exponentiates the generator; ``euler`` takes Id + dt L, which
    is trace preserving but fails complete positivity at order dt^2 even
    for perfectly valid generators, so classification work must use the
    exact step.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    if mode == "exact":
        s = expm(dt * lind.matrix)
    elif mode == "euler":
        s = np.eye(lind.dim**2, dtype=complex) + dt * lind.matrix
    else:
        raise DomainError(f"unknown mode {mode!r}; use 'exact' or 'euler'")
    return channel_from_matrix(s, lind.dim)


def choi(op: SuperOperator) -> np.ndarray:
    """Choi matrix (1/d) sum_jl T[E_jl] (x) E_jl, validated Hermitian."""
    d = op.dim
    c = np.zeros((d**2, d**2), dtype=complex)
    for j in range(d):
        for l in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[j, l] = 1.0
            c += np.kron(op.apply(e), e)
    c /= d
    defect = float(np.max(np.abs(c - c.conj().T)))
    if defect > 1e-10:
        raise ChannelRepresentationError(f"Choi matrix Hermiticity defect {defect:.3e}")
    c = 0.5 * (c + c.conj().T)
    c.flags.writeable = False
    return c


@dataclass(frozen=True)
class CpReport:
    min_eigenvalue: float
    tol: float
    cp: bool
    min_eigenvector: np.ndarray = field(repr=False)


def cp_check(op: SuperOperator, tol: float = 1e-10) -> CpReport:
    """Complete positivity verdict from the bottom of the Choi spectrum."""
    c = choi(op)
    vals, vecs = np.linalg.eigh(c)
    return CpReport(
        min_eigenvalue=float(vals[0]),
        tol=float(tol),
        cp=bool(vals[0] >= -tol),
        min_eigenvector=vecs[:, 0],
    )


class MonotoneKind(Enum):
    """Standard operator monotone functions indexing the metric family."""

    SLD = "sld"
    KMB = "kmb"
    WY = "wy"

    def f(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if self is MonotoneKind.SLD:
            out = (1.0 + arr) / 2.0
        elif self is MonotoneKind.WY:
            out = ((1.0 + np.sqrt(arr)) / 2.0) ** 2
        else:
            out = np.ones_like(arr)
            away = np.abs(arr - 1.0) >= 1e-12
            out[away] = (arr[away] - 1.0) / np.log(arr[away])
        return out if np.ndim(x) else float(out[0])


def metric_kernel(kind: MonotoneKind, x, y) -> np.ndarray:
    """Kernel c_f(x, y) = 1 / (y f(x/y)) on positive spectra, stable at x = y."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if np.any(xv <= 0.0) or np.any(yv <= 0.0):
        raise SingularBaseError("metric kernel needs strictly positive eigenvalues")
    if kind is MonotoneKind.SLD:
        return 2.0 / (xv + yv)
    if kind is MonotoneKind.WY:
        return 4.0 / (np.sqrt(xv) + np.sqrt(yv)) ** 2
    close = np.abs(xv - yv) <= 1e-8 * (xv + yv)
    diff = np.where(close, 1.0, xv - yv)
    return np.where(close, 2.0 / (xv + yv), (np.log(xv) - np.log(yv)) / diff)


def _eigensystem(rho) -> tuple[np.ndarray, np.ndarray]:
    state = density_matrix(rho)
    vals, vecs = np.linalg.eigh(state)
    if float(vals.min()) < FULL_RANK_FLOOR:
        raise SingularBaseError(
            f"state eigenvalue {vals.min():.3e} below floor {FULL_RANK_FLOOR:.0e}"
        )
    return vals, vecs


def petz_metric(rho, a, b, kind: MonotoneKind = MonotoneKind.SLD) -> float:
    """Monotone metric (1/2) sum conj(A_ij) B_ij c_f(rho_i, rho_j) in the state eigenbasis.

    Real for Hermitian arguments; collapses to the classical Fisher inner
    product when both arguments commute with the state.
    """
    vals, vecs = _eigensystem(rho)
    at = vecs.conj().T @ hermitian_perturbation(a) @ vecs
    bt = vecs.conj().T @ hermitian_perturbation(b) @ vecs
    c = metric_kernel(kind, vals[:, None], vals[None, :])
    val = 0.5 * complex(np.sum(np.conj(at) * bt * c))
    if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
        raise ChannelRepresentationError(f"metric value has imaginary part {val.imag:.3e}")
    return float(val.real)


def diag_decomposition(rho, drho) -> tuple[np.ndarray, np.ndarray]:
    """Split a perturbation into its diagonal and coherent parts in the state eigenbasis."""
    vals, vecs = _eigensystem(rho)
    dt = vecs.conj().T @ hermitian_perturbation(drho) @ vecs
    diag_part = np.diag(np.diag(dt))
    coh_part = dt - diag_part
    back = lambda m: vecs @ m @ vecs.conj().T
    return back(diag_part), back(coh_part)


def diag_decomposition_check(rho, drho, kind: MonotoneKind = MonotoneKind.SLD) -> float:
    """Magnitude of the metric cross term between diagonal and coherent parts."""
    delta, coh = diag_decomposition(rho, drho)
    return abs(petz_metric(rho, delta, coh, kind))


def classical_action(op: SuperOperator) -> np.ndarray:
    """Action induced on diagonal matrices: column j is diag(T[E_jj])."""
    d = op.dim
    out = np.empty((d, d))
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        out[:, j] = np.diag(op.apply(e)).real
    return out


def semiclassical_lindbladian(rates, d: int) -> SuperOperator:
    """Generator sum a_ij (E_ij rho E_ji - (1/2){E_jj, rho}) on dimension ``d``.

    ``rates`` is a mapping (i, j) -> a(i <- j) or a full classical rate
    matrix. The induced action on diagonal matrices is exactly the
    classical generator, negative entries included.
    """
    if isinstance(rates, Mapping):
        pairs = dict(rates)
    else:
        pairs = rates_of(rates)
    s = np.zeros((d**2, d**2), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for (i, j), a in pairs.items():
        if not (0 <= i < d and 0 <= j < d) or i == j:
            raise DimensionMismatchError(f"rate index {(i, j)} invalid for dimension {d}")
        e_ij = np.zeros((d, d), dtype=complex)
        e_ij[i, j] = 1.0
        e_jj = np.zeros((d, d), dtype=complex)
        e_jj[j, j] = 1.0
        s += a * np.kron(e_ij, e_ij)
        s -= 0.5 * a * (np.kron(e_jj, eye) + np.kron(eye, e_jj))
    op = SuperOperator(matrix=s, dim=d)
    defect = op.trace_annihilation_defect()
    if defect > 1e-10:
        raise ChannelRepresentationError(f"generator trace defect {defect:.3e}")
    return op


def commuting_reduction_rate_check(
    rho,
    drho,
    lind: SuperOperator,
    kind: MonotoneKind = MonotoneKind.SLD,
    h: float = 1e-6,
) -> float:
    """Deviation between the quantum metric rate and the classical Fisher rate.

    Both the state and the perturbation must be diagonal in the basis the
    generator is written in; the quantum side is then a matched central
    difference of the metric along the generator flow and must agree with
    the classical rate of the diagonals up to discretization error.
    """
    state = density_matrix(rho)
    pert = hermitian_perturbation(drho)
    if np.max(np.abs(state - np.diag(np.diag(state)))) > 1e-12:
        raise InvalidStateError("state must be diagonal in the generator basis")
    if np.max(np.abs(pert - np.diag(np.diag(pert)))) > 1e-12:
        raise InvalidTangentError("perturbation must be diagonal in the generator basis")
    if state.shape[0] != lind.dim:
        raise DimensionMismatchError("generator dimension mismatch")

    rho_dot = lind.apply(state)
    drho_dot = lind.apply(pert)
    k_hi = petz_metric(state + h * rho_dot, pert + h * drho_dot, pert + h * drho_dot, kind)
    k_lo = petz_metric(state - h * rho_dot, pert - h * drho_dot, pert - h * drho_dot, kind)
    quantum_rate = (k_hi - k_lo) / (2.0 * h)

    classical = fisher_rate(
        np.diag(state).real, np.diag(pert).real, rate_matrix(classical_action(lind))
    )
    return abs(quantum_rate - classical)


@dataclass(frozen=True)
class SpecialPointReport:
    """Metric values at the base built from the perturbation itself.

    At base |drho| / tr|drho| every monotone metric of (drho, drho) equals
    half the squared trace norm, exactly as in the classical special-point
    identity; the computation runs on the support of the perturbation.
    """

    base: np.ndarray = field(repr=False)
    trace_size: float
    target: float
    values: dict[MonotoneKind, float]
    support_dim: int

    @property
    def max_deviation(self) -> float:
        return max(abs(v - self.target) for v in self.values.values())


def special_point_check(drho, kinds: Iterable[MonotoneKind] = tuple(MonotoneKind)) -> SpecialPointReport:
    pert = hermitian_perturbation(drho)
    vals, vecs = np.linalg.eigh(pert)
    size = float(np.sum(np.abs(vals)))
    if size == 0.0:
        raise InvalidTangentError("zero perturbation has no special base point")
    support = np.abs(vals) > 1e-14 * float(np.max(np.abs(vals)))
    lam = vals[support]
    base_support = np.diag(np.abs(lam) / size)
    pert_support = np.diag(lam)
    values = {
        kind: petz_metric(base_support, pert_support, pert_support, kind) for kind in kinds
    }
    base_full = vecs @ np.diag(np.abs(vals) / size) @ vecs.conj().T
    base_full.flags.writeable = False
    return SpecialPointReport(
        base=base_full,
        trace_size=size,
        target=0.5 * size**2,
        values=values,
        support_dim=int(support.sum()),
    )


@dataclass(frozen=True)
class QuantumWitnessReport:
    """Fisher dilation witness extracted from a negative Choi eigenvalue.

    The state is the maximally entangled projector regularized by ``eta``
    of the maximally mixed state; the perturbation moves weight from the
    entangled direction to the offending Choi eigendirection. In the
    orthonormal frame containing both, the lifted map induces a classical
    transition generator whose (offender <- entangled) rate is negative,
    and the classical Fisher rate at the concentrated base is positive.
    ``scaled_rate`` is rate times eta squared, the regularization-free
    figure used for stability comparison at halved eta.
    """

    found: bool
    rate_value: float
    scaled_rate: float
    scaled_rate_half_eta: float
    stable: bool
    eta: float
    eps: float
    kind: MonotoneKind
    choi_min_eigenvalue: float
    rho: np.ndarray = field(repr=False)
    drho: np.ndarray = field(repr=False)
    base_probs: np.ndarray = field(repr=False)
    direction: np.ndarray = field(repr=False)
    classical_generator: np.ndarray = field(repr=False)
    frame: np.ndarray = field(repr=False)


def _witness_frame(d: int, choi_vec: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    total = d * d
    psi = np.eye(d).reshape(-1).astype(complex) / np.sqrt(d)
    overlap = np.vdot(psi, choi_vec)
    v_perp = choi_vec - overlap * psi
    norm = float(np.linalg.norm(v_perp))
    if norm < 1e-12:
        raise WitnessNotApplicableError(
            "offending Choi eigenvector has no component away from the entangled state"
        )
    v_perp = v_perp / norm
    seed = np.concatenate([psi[:, None], v_perp[:, None], np.eye(total, dtype=complex)], axis=1)
    frame, _ = np.linalg.qr(seed)
    return psi, v_perp, frame


def _diagonal_transition_generator(lifted: SuperOperator, frame: np.ndarray) -> np.ndarray:
    total = lifted.dim
    gen = np.empty((total, total))
    for b in range(total):
        col = frame[:, b]
        projector = np.outer(col, col.conj())
        moved = lifted.apply(projector) - projector
        gen[:, b] = np.einsum("ia,ij,ja->a", frame.conj(), moved, frame).real
    return gen


def _witness_rate(intermediate: QuantumChannel, frame: np.ndarray, eta: float, eps: float) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    total = intermediate.dim ** 2
    lifted = extend_with_identity(intermediate)
    gen = rate_matrix(_diagonal_transition_generator(lifted, frame), col_tol=1e-8)
    probs = np.full(total, eta / total)
    probs[0] += 1.0 - eta
    direction = np.zeros(total)
    direction[0] = -eps
    direction[1] = eps
    return fisher_rate(probs, direction, gen), probs, direction, gen


def quantum_dilation_witness(
    intermediate: QuantumChannel,
    eta: float = 1e-6,
    eps: float = 1e-3,
    kind: MonotoneKind = MonotoneKind.SLD,
    cp_tol: float = 1e-10,
) -> QuantumWitnessReport:
    """Dilation witness for a non-completely-positive intermediate map.

    Raises a witness-not-applicable error when the map passes the Choi
    test. Otherwise builds the regularized entangled state and the
    perturbation toward the offending direction, reduces the lifted map to
    a classical transition generator in that frame, and reports the
    classical Fisher rate (positive exactly because the offending rate is
    negative and the base is concentrated). One application of the map
    counts as one unit of time.
    """
    report = cp_check(intermediate, cp_tol)
    if report.cp:
        raise WitnessNotApplicableError(
            f"map is completely positive (Choi minimum {report.min_eigenvalue:.3e})"
        )
    d = intermediate.dim
    total = d * d
    if not 0.0 < eta < 0.5 or not 0.0 < eps < 0.5:
        raise DomainError("eta and eps must sit in (0, 0.5)")
    psi, v_perp, frame = _witness_frame(d, report.min_eigenvector)

    rate, probs, direction, gen = _witness_rate(intermediate, frame, eta, eps)
    rate_half, _, _, _ = _witness_rate(intermediate, frame, eta / 2.0, eps)
    scaled = rate * eta**2
    scaled_half = rate_half * (eta / 2.0) ** 2
    stable = abs(scaled_half - scaled) <= 0.2 * abs(scaled)

    rho = (1.0 - eta) * np.outer(psi, psi.conj()) + eta * np.eye(total) / total
    drho = eps * (np.outer(v_perp, v_perp.conj()) - np.outer(psi, psi.conj()))
    return QuantumWitnessReport(
        found=rate > 0.0,
        rate_value=rate,
        scaled_rate=scaled,
        scaled_rate_half_eta=scaled_half,
        stable=stable,
        eta=eta,
        eps=eps,
        kind=kind,
        choi_min_eigenvalue=report.min_eigenvalue,
        rho=rho,
        drho=drho,
        base_probs=probs,
        direction=direction,
        classical_generator=gen,
        frame=frame,
    )


def quantum_witness_fd_rate(
    intermediate: QuantumChannel,
    report: QuantumWitnessReport,
    alpha: float | None = None,
) -> float:
    """Independent rate estimate: finite difference of the metric along the map.

    The state pair is pushed a fraction ``alpha`` of the way through the
    lifted map (a convex combination, so positivity is safe) and the
    monotone metric of the displacement is differenced. Units match the
    witness: one full application is one unit of time.
    """
    lifted = extend_with_identity(intermediate)
    if alpha is None:
        total = intermediate.dim ** 2
        alpha = min(0.25, 0.02 * report.eta / (total * abs(report.choi_min_eigenvalue)))
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    rho, drho = report.rho, report.drho
    rho_a = (1.0 - alpha) * rho + alpha * lifted.apply(rho)
    drho_a = (1.0 - alpha) * drho + alpha * lifted.apply(drho)
    k0 = petz_metric(rho, drho, drho, report.kind)
    k1 = petz_metric(rho_a, drho_a, drho_a, report.kind)
    return (k1 - k0) / alpha


@dataclass(frozen=True)
class ReductionReport:
    """Diagonal-sector reduction of the dephasing-filter post-processing."""

    action_defect: float
    lambda_max_diagonal_sector: float


def dephasing_filter_reduction_check(pi, r, eps1: float, eps2: float) -> ReductionReport:
    """Check that dephasing-then-filter reduces to the classical filter story.

    The composite channel acts on diagonal states exactly as the classical
    filter toward ``pi``; the first figure is the worst deviation from
    that. The second is the top of the classical contraction form at
    ``pi`` under the classical generator ``r``, the quantity whose
    nonpositivity transfers the classical no-go to this family.
    """
    prior = prob_vec(pi)
    d = prior.shape[0]
    composed = compose(dephasing_channel(d, eps2), filter_channel(np.diag(prior), eps1))
    induced = classical_action(composed)
    defect = float(np.max(np.abs(induced - filter_map(prior, eps1))))
    lam = contraction_form(prior, rate_matrix(r)).lambda_max
    return ReductionReport(action_defect=defect, lambda_max_diagonal_sector=lam)
