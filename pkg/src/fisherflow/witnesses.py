"""Constructive witnesses of rate-matrix negativity.

A generator with any negative transition rate admits a base point and a
displacement whose local Fisher distance grows, and this module builds
them:

* ``dilation_direction_search`` - concentrates probability on the source
  state of the most negative rate and perturbs toward its target; an
  epsilon ladder plus a spectral fallback over sampled base points.
* ``no_go_verify`` - the opposite phenomenon: a generator with a single
  negative rate that is dominated by its reverse rate shows no Fisher
  dilation at a chosen base, even after adding replicas and an idle
  ancilla. The verifier restricts the contraction form to the detectable
  sector (directions with vanishing ancilla marginal), because directions
  that only reshuffle the ancilla are exact null modes of any extension.
* ``filter_witness_rate`` - post-processing through a heavy contraction
  toward the special base point of the displacement turns trace-distance
  growth into Fisher-distance growth of order epsilon squared.
* ``trace_ancilla_witness`` - a two-level ancilla (or one extra inert
  state) makes the trace distance itself grow at a rate set by the
  negative column mass of the offender.

Rates reported here are derivatives of squared Fisher distances except
for the trace witnesses, which report the derivative of the plain trace
distance (that derivative is base-independent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distances import (
    ContractionForm,
    contraction_form,
    fisher_rate,
    forward_trace_rate,
)
from .errors import (
    DimensionMismatchError,
    DomainError,
    InvalidTangentError,
    WitnessNotApplicableError,
    WitnessNotFoundError,
)
from .simplex import (
    is_markovian_generator,
    prob_vec,
    rate_matrix,
    rates_of,
    stochastic_matrix,
    tangent_vec,
    zero_sum_basis,
    extend_generator,
)

__all__ = [
    "WitnessReport",
    "dilation_direction_search",
    "NoGoReport",
    "no_go_verify",
    "single_negative_rate_example",
    "special_base_point",
    "filter_map",
    "regularize_direction",
    "filter_witness_rate",
    "filter_witness",
    "trace_ancilla_witness",
]

#: Halving ladder from 0.1 down past 1e-6.
EPS_LADDER: tuple[float, ...] = tuple(0.1 * 0.5**k for k in range(18))

#: Epsilon schedule for filter-witness ratio checks.
FILTER_EPSILONS: tuple[float, ...] = (1e-2, 1e-3, 1e-4)

#: Fallback sampling budget of the dilation search.
FALLBACK_SAMPLES = 1000

#: Relative floor used when regularizing zero displacement components.
REGULARIZE_SCALE = 1e-6


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of a witness construction.

    When ``found``, re-evaluating the rate named by ``method`` at
    (``base``, ``direction``) reproduces ``rate_value``; ``recompute_rate``
    does exactly that.
    """

    found: bool
    method: str
    base: np.ndarray | None = None
    direction: np.ndarray | None = None
    rate_value: float | None = None
    epsilon_used: float | None = None
    offender: tuple[int, int] | None = None
    offender_rate: float | None = None
    seed: int | None = None
    generator: np.ndarray | None = field(default=None, repr=False, compare=False)

    def recompute_rate(self) -> float:
        if not self.found:
            raise WitnessNotApplicableError("no witness to re-evaluate")
        if self.method in ("ladder", "form-spectral"):
            return fisher_rate(self.base, self.direction, self.generator)
        if self.method == "filter":
            return filter_witness_rate(self.base, self.direction, self.generator, self.epsilon_used)
        if self.method == "trace-ancilla":
            return forward_trace_rate(self.direction, self.generator)
        raise WitnessNotApplicableError(f"unknown method {self.method!r}")


def _most_negative_rate(r: np.ndarray) -> tuple[tuple[int, int], float]:
    off = r.copy()
    np.fill_diagonal(off, np.inf)
    flat = int(np.argmin(off))
    idx = (flat // r.shape[0], flat % r.shape[0])
    return idx, float(r[idx])


def _sample_interior(rng: np.random.Generator, n: int) -> np.ndarray:
    raw = rng.dirichlet(np.ones(n))
    return 0.9 * raw + 0.1 / n


def dilation_direction_search(
    r,
    eps_ladder: Sequence[float] = EPS_LADDER,
    fallback_samples: int = FALLBACK_SAMPLES,
    seed: int = 0,
) -> WitnessReport:
    """Base point and direction with a positive Fisher rate, if one exists.

    For an offender rate(i0 <- j0) < 0 the ladder concentrates the base on
    the source state j0 (everything else at eps) and displaces by
    eps^2 (e_i0 - e_j0): the offending flow term scales like eps^2 while
    every benign term is at most eps^3, so small enough eps must succeed.
    The spectral fallback scans sampled interior bases for a positive top
    eigenvalue of the contraction form.
    """
    m = rate_matrix(r)
    n = m.shape[0]
    check = is_markovian_generator(m)
    if check.markovian:
        return WitnessReport(found=False, method="ladder", generator=m, seed=seed)
    offender, offender_rate = _most_negative_rate(m)
    i0, j0 = offender

    for eps in eps_ladder:
        if (n - 1) * eps >= 1.0 - eps:
            continue
        base = np.full(n, eps)
        base[j0] = 1.0 - (n - 1) * eps
        direction = np.zeros(n)
        direction[i0] = eps**2
        direction[j0] = -(eps**2)
        rate = fisher_rate(base, direction, m)
        if rate > 0.0:
            return WitnessReport(
                found=True,
                method="ladder",
                base=prob_vec(base),
                direction=tangent_vec(direction),
                rate_value=rate,
                epsilon_used=float(eps),
                offender=offender,
                offender_rate=offender_rate,
                seed=seed,
                generator=m,
            )

    rng = np.random.default_rng(seed)
    best: tuple[float, np.ndarray, ContractionForm] | None = None
    for _ in range(fallback_samples):
        base = _sample_interior(rng, n)
        form = contraction_form(base, m)
        if best is None or form.lambda_max > best[0]:
            best = (form.lambda_max, base, form)
    if best is not None and best[0] > 0.0:
        _, base, form = best
        direction = form.max_direction
        rate = fisher_rate(base, direction, m)
        return WitnessReport(
            found=True,
            method="form-spectral",
            base=prob_vec(base),
            direction=tangent_vec(direction),
            rate_value=rate,
            offender=offender,
            offender_rate=offender_rate,
            seed=seed,
            generator=m,
        )
    raise WitnessNotFoundError(
        f"no dilation direction found although rate{offender} = {offender_rate:.3e}; "
        "expected only when the offense is below roughly 1e-6"
    )


@dataclass(frozen=True)
class NoGoReport:
    """Contraction evidence for an extension of a single-offender generator.

    ``lambda_max_full`` is the top eigenvalue on the whole zero-sum space
    of the extended system; with an ancilla of dimension >= 2 it is
    exactly zero because ancilla-only reshuffles are conserved. The
    meaningful figure is ``lambda_max_on_image``, computed on directions
    whose ancilla marginal vanishes.
    """

    nonmarkovian: bool
    condition_met: bool
    offender: tuple[int, int] | None
    offender_rate: float | None
    copies: int
    ancilla_dim: int
    lambda_max_on_image: float
    lambda_max_full: float
    margin: float
    base: np.ndarray = field(repr=False)
    condition_detail: str = ""

    @property
    def passed(self) -> bool:
        return self.nonmarkovian and self.condition_met and self.lambda_max_on_image <= -self.margin


def _single_offender_condition(pi: np.ndarray, m: np.ndarray, rate_tol: float) -> tuple[bool, str, tuple[int, int] | None, float | None]:
    negatives = {k: v for k, v in rates_of(m).items() if v < -rate_tol}
    if len(negatives) != 1:
        return False, f"need exactly one negative rate, found {len(negatives)}", None, None
    ((i0, j0), a_neg), = negatives.items()
    reverse = float(m[j0, i0])
    if reverse * pi[i0] <= abs(a_neg) * pi[j0]:
        return (
            False,
            f"reverse rate too weak: rate({j0}<-{i0})*pi[{i0}] = {reverse * pi[i0]:.6g} "
            f"must exceed |rate({i0}<-{j0})|*pi[{j0}] = {abs(a_neg) * pi[j0]:.6g}",
            (i0, j0),
            float(a_neg),
        )
    return True, "", (i0, j0), float(a_neg)


def no_go_verify(
    pi,
    r,
    copies: int = 1,
    ancilla_dim: int = 0,
    ancilla_state=None,
    margin: float | None = None,
    rate_tol: float = 1e-9,
) -> NoGoReport:
    """Certify absence of Fisher dilation for replicas plus an idle ancilla.

    The base point is the tensor power of ``pi`` with the ancilla in
    ``ancilla_state`` (uniform by default). A failed precondition is
    reported through ``condition_met``, not raised: it means the instance
    is outside the certified family, not that the check broke.
    """
    base_pi = prob_vec(pi)
    m = rate_matrix(r)
    n = m.shape[0]
    if base_pi.shape[0] != n:
        raise DimensionMismatchError("base point and generator dimensions differ")
    if copies < 1 or ancilla_dim < 0 or ancilla_dim == 1:
        raise DimensionMismatchError("need copies >= 1 and ancilla_dim 0 or >= 2")

    condition_met, detail, offender, offender_rate = _single_offender_condition(base_pi, m, rate_tol)
    nonmarkovian = not is_markovian_generator(m, rate_tol).markovian

    r_ext = extend_generator(m, copies=copies, ancilla_dim=ancilla_dim)
    base = base_pi
    for _ in range(copies - 1):
        base = np.kron(base, base_pi)
    if ancilla_dim >= 2:
        w = np.full(ancilla_dim, 1.0 / ancilla_dim) if ancilla_state is None else prob_vec(ancilla_state)
        if w.shape[0] != ancilla_dim:
            raise DimensionMismatchError("ancilla state dimension mismatch")
        base = np.kron(base, w)

    sys_dim = n**copies
    full_form = contraction_form(base, r_ext)
    if ancilla_dim >= 2:
        image_basis = np.kron(zero_sum_basis(sys_dim), np.eye(ancilla_dim))
        image_form = contraction_form(base, r_ext, basis=image_basis)
    else:
        image_form = full_form

    if margin is None:
        margin = 1e-6 * float(np.max(np.abs(m)))
    return NoGoReport(
        nonmarkovian=nonmarkovian,
        condition_met=condition_met,
        offender=offender,
        offender_rate=offender_rate,
        copies=copies,
        ancilla_dim=ancilla_dim,
        lambda_max_on_image=image_form.lambda_max,
        lambda_max_full=full_form.lambda_max,
        margin=float(margin),
        base=base,
        condition_detail=detail,
    )


def single_negative_rate_example() -> tuple[np.ndarray, np.ndarray]:
    """Two-state generator with one dominated negative rate, and its base point.

    rate(0<-1) = -0.5 against rate(1<-0) = 1 at the uniform base: negative,
    yet every Fisher direction contracts, here and in all extensions.
    """
    pi = np.array([0.5, 0.5])
    return pi, rate_matrix(np.array([[-1.0, -0.5], [1.0, 0.5]]))


def special_base_point(d) -> np.ndarray:
    """Base at which the doubled local Fisher square equals the squared trace size.

    p_i = |d_i| / sum|d|; then sum d_i^2 / p_i = (sum|d|)^2 exactly. Zero
    components of d produce boundary zeros in p; callers needing an
    interior base must regularize d first.
    """
    vec = np.asarray(d, dtype=float)
    if vec.ndim != 1 or vec.shape[0] < 2:
        raise InvalidTangentError("need a 1-d displacement with at least two entries")
    total = float(np.sum(np.abs(vec)))
    if total == 0.0:
        raise InvalidTangentError("zero displacement has no special base point")
    return np.abs(vec) / total


def filter_map(pi, eps: float) -> np.ndarray:
    """Stochastic map mixing every input toward ``pi`` with weight 1 - eps.

    Acts on differences as multiplication by eps.
    """
    target = prob_vec(pi)
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"filter strength must be in (0, 1], got {eps}")
    n = target.shape[0]
    return stochastic_matrix(eps * np.eye(n) + (1.0 - eps) * np.outer(target, np.ones(n)))


def regularize_direction(d, r, floor_scale: float = REGULARIZE_SCALE) -> tuple[np.ndarray, tuple[int, ...]]:
    """Replace zero components of ``d`` by tiny values aligned with their velocity.

    The floor is ``floor_scale`` times the trace size of ``d`` and the sign
    matches (r d)_i, so the forward growth carried by components that are
    zero now but moving is preserved. Mass is rebalanced across the
    nonzero components to keep the total at zero. Returns the new vector
    and the indices touched.
    """
    vec = tangent_vec(d)
    m = rate_matrix(r)
    total = float(np.sum(np.abs(vec)))
    if total == 0.0:
        raise InvalidTangentError("zero displacement cannot be regularized")
    zero_mask = np.abs(vec) <= 1e-14 * total
    if not zero_mask.any():
        return vec, ()
    velocity = m @ vec
    floor = floor_scale * total
    signs = np.sign(velocity[zero_mask])
    signs[signs == 0.0] = 1.0
    out = vec.copy()
    out[zero_mask] = floor * signs
    added = floor * float(signs.sum())
    weights = np.abs(vec[~zero_mask])
    out[~zero_mask] -= added * weights / weights.sum()
    return tangent_vec(out), tuple(int(k) for k in np.flatnonzero(zero_mask))


def filter_witness_rate(p, d, r, eps: float, freeze_base: bool = True) -> float:
    """Growth rate of the filtered displacement, in trace-square calibration.

    The filter contracts toward the special base point of ``d`` with
    strength 1 - eps, then the state and displacement evolve under ``r``
    while the filter target stays frozen. Returned is twice the derivative
    of the local Fisher square of the filtered pair; at the special base
    the doubled Fisher square is the squared trace size, so value / eps^2
    converges to d/dt of (sum|d_i|)^2 as eps shrinks. Zero components of
    ``d`` are regularized toward their velocity sign first.
    """
    base = prob_vec(p)
    m = rate_matrix(r)
    vec = tangent_vec(d)
    if base.shape[0] != m.shape[0] or vec.shape[0] != m.shape[0]:
        raise DimensionMismatchError("state, displacement and generator dimensions differ")
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"filter strength must be in (0, 1], got {eps}")
    vec, _ = regularize_direction(vec, m)
    anchor = special_base_point(vec)
    filtered = (1.0 - eps) * anchor + eps * base
    p_dot = m @ base
    d_dot = m @ vec
    value = 2.0 * eps**2 * float(np.sum(vec * d_dot / filtered))
    if freeze_base:
        value -= eps**3 * float(np.sum(vec**2 * p_dot / filtered**2))
    else:
        total = float(np.sum(np.abs(vec)))
        total_dot = float(np.sum(np.sign(vec) * d_dot))
        anchor_dot = (np.sign(vec) * d_dot * total - np.abs(vec) * total_dot) / total**2
        f_dot = (1.0 - eps) * anchor_dot + eps * p_dot
        value -= eps**2 * float(np.sum(vec**2 * f_dot / filtered**2))
    return value


def filter_witness(r, d, base=None, epsilons: Sequence[float] = FILTER_EPSILONS) -> WitnessReport:
    """Witness report built from the filter construction at the smallest eps.

    By default the state sits at the special base point of the regularized
    displacement, which makes the filtered state independent of eps.
    """
    m = rate_matrix(r)
    vec, _ = regularize_direction(tangent_vec(d), m)
    anchor = special_base_point(vec)
    state = anchor if base is None else prob_vec(base)
    eps = float(min(epsilons))
    rate = filter_witness_rate(state, vec, m, eps)
    return WitnessReport(
        found=rate > 0.0,
        method="filter",
        base=state,
        direction=vec,
        rate_value=rate,
        epsilon_used=eps,
        generator=m,
    )


def trace_ancilla_witness(r, mode: str = "ancilla-M2") -> WitnessReport:
    """Trace-distance growth from a two-level ancilla or one extra inert state.

    Both modes target the source column j0 of the most negative rate and
    yield the forward rate 2 * sum of |rate(i <- j0)| over the negative
    entries of that column.
    """
    m = rate_matrix(r)
    n = m.shape[0]
    check = is_markovian_generator(m)
    if check.markovian:
        return WitnessReport(found=False, method="trace-ancilla", generator=m)
    offender, offender_rate = _most_negative_rate(m)
    _, j0 = offender

    if mode == "ancilla-M2":
        r_ext = extend_generator(m, copies=1, ancilla_dim=2)
        direction = np.kron(np.eye(n)[j0], np.array([0.5, -0.5]))
    elif mode == "extra-state":
        r_ext = np.zeros((n + 1, n + 1))
        r_ext[:n, :n] = m
        direction = np.zeros(n + 1)
        direction[j0] = 1.0
        direction[n] = -1.0
    else:
        raise DomainError(f"unknown mode {mode!r}; use 'ancilla-M2' or 'extra-state'")

    rate = forward_trace_rate(direction, r_ext)
    dim = r_ext.shape[0]
    return WitnessReport(
        found=rate > 0.0,
        method="trace-ancilla",
        base=np.full(dim, 1.0 / dim),
        direction=tangent_vec(direction),
        rate_value=rate,
        offender=offender,
        offender_rate=offender_rate,
        generator=r_ext,
    )
