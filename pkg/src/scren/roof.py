"""Convex-roof optimization over pure-state decompositions of a mixed state.

Every decomposition of ``rho`` into at most L pure states arises from the
eigendecomposition through an L x L unitary mixing matrix (unitary freedom of
ensembles, with zero-padding when L exceeds the rank).  The roof engine
minimizes the ensemble average of a pure-state functional over that unitary,
parametrized as U = exp(iH) U0 with H Hermitian, using derivative-free
direction-set (Powell) search from multiple starts: start 0 is the identity
(so the eigendecomposition average is always an upper bound on the result)
and the remaining starts are Haar-random unitaries.  The winning start gets a
high-precision polish pass.  All randomness derives from the config seed, so
results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from math import prod
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .negativity import negativity_pure
from .states import Bipartition, DensityMatrix, PureState

RANK_TOL = 1e-12
WEIGHT_TOL = 1e-14
CONJECTURE_ATOL = 1e-7

# Early-exit floor for sqrt-roof objectives: a best average below this squares
# to 1e-10, two orders below the tightest tolerance any caller reports at.
SQRT_ROOF_FLOOR = 1e-5

# Number of random unitaries probed to detect decomposition-independent
# objectives before running the optimizer.
PROBE_COUNT = 8


class ConjectureViolation(Exception):
    """A pure-state functional assumed nonnegative went genuinely negative.

    Raised by :func:`roof_sqrt_functional` when an ensemble member evaluates
    below -1e-7 (anything in [-1e-7, 0) is treated as roundoff).  This is
    scientifically meaningful output, not a crash: it carries the offending
    state and value so the candidate counterexample can be inspected.
    """

    def __init__(self, state: PureState, value: float):
        self.state = state
        self.value = value
        super().__init__(
            f"pure-state functional is negative ({value:.6e}) on an ensemble member"
        )


@dataclass(frozen=True)
class RoofConfig:
    """Settings for the roof optimizer.

    ``ensemble_size`` (L) defaults to the rank of the input state and may be
    raised up to rank*(rank+1).  ``iters`` is the per-start evaluation budget.
    ``child()`` derives the reduced-budget config used for roofs that run
    inside another roof's objective (the recursive multi-party measures).
    """

    starts: int = 16
    iters: int = 2000
    ensemble_size: int | None = None
    tol: float = 1e-6
    seed: int = 0

    def child(self) -> "RoofConfig":
        return RoofConfig(
            starts=max(3, self.starts // 4),
            iters=max(200, self.iters // 5),
            ensemble_size=None,
            tol=self.tol,
            seed=self.seed,
        )

    def with_ensemble_size(self, size: int | None) -> "RoofConfig":
        return replace(self, ensemble_size=size)


@dataclass(frozen=True)
class MixingUnitary:
    """Unitary mixing matrix relating two decompositions of the same state."""

    matrix: np.ndarray
    source_rank: int

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("mixing matrix must be square")
        defect = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
        if defect > 1e-9:
            raise ValueError(f"matrix is not unitary: defect {defect:.3e}")
        if not 1 <= self.source_rank <= mat.shape[0]:
            raise ValueError("source_rank must lie in [1, L]")
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Ensemble:
    """Weighted pure-state decomposition {(p_h, |psi_h>)} of a mixed state."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        if not members:
            raise ValueError("ensemble must have at least one member")
        weights = np.array([p for p, _ in members])
        if np.any(weights < 0):
            raise ValueError("ensemble weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"ensemble weights sum to {weights.sum()!r}, expected 1")
        object.__setattr__(self, "members", members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    @property
    def states(self) -> tuple[PureState, ...]:
        return tuple(s for _, s in self.members)

    def average(self, fn: Callable[[PureState], float]) -> float:
        return float(sum(p * fn(s) for p, s in self.members))

    def reconstruct(self) -> np.ndarray:
        """The density matrix sum_h p_h |psi_h><psi_h| generated by the members."""
        d = self.members[0][1].total_dim
        out = np.zeros((d, d), dtype=np.complex128)
        for p, s in self.members:
            out += p * np.outer(s.amplitudes, s.amplitudes.conj())
        return out


@dataclass(frozen=True)
class RoofResult:
    """Outcome of a roof minimization: value, argmin ensemble and diagnostics."""

    value: float
    ensemble: Ensemble
    starts: int
    converged: bool
    history: tuple[float, ...]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian with phase-fixed R."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _support(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Subnormalized eigenvectors sqrt(lam_i)|e_i> spanning the support, as rows."""
    evals, evecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    r = int(np.sum(evals > RANK_TOL))
    lam = np.clip(evals[:r], 0.0, None)
    return lam, (evecs[:, :r] * np.sqrt(lam)).T


def hjw_ensemble(rho: DensityMatrix, u: MixingUnitary | np.ndarray) -> Ensemble:
    """Decomposition |psi_h> ~ sum_i u_hi sqrt(lam_i)|e_i> induced by ``u``.

    Columns of ``u`` beyond the rank of ``rho`` mix in zero vectors, so an
    L x L unitary yields up to L members; members with weight below 1e-14 are
    dropped.  The returned ensemble reconstructs ``rho`` exactly (unitarity of
    the columns), which is asserted to 1e-8.
    """
    lam, base = _support(rho)
    r = len(lam)
    if isinstance(u, MixingUnitary):
        if u.source_rank != r:
            raise ValueError(f"mixing matrix declares rank {u.source_rank}, state has {r}")
        mat = u.matrix
    else:
        mat = MixingUnitary(np.asarray(u), source_rank=min(r, np.asarray(u).shape[0])).matrix
    if mat.shape[0] < r:
        raise ValueError(f"mixing matrix size {mat.shape[0]} is below the rank {r}")
    rows = mat[:, :r] @ base
    weights = np.einsum("hd,hd->h", rows, rows.conj()).real
    members = []
    for w, row in zip(weights, rows):
        if w < WEIGHT_TOL:
            continue
        members.append((float(w), PureState(rho.dims, row / np.sqrt(w))))
    ensemble = Ensemble(tuple(members))
    defect = np.abs(ensemble.reconstruct() - rho.matrix).max()
    if defect > 1e-8:
        raise AssertionError(f"ensemble does not reconstruct the state: {defect:.3e}")
    return ensemble


@lru_cache(maxsize=32)
def _triu(n: int):
    return np.triu_indices(n, 1)


def _unitary_from_params(theta: np.ndarray, size: int) -> np.ndarray:
    """exp(iH) for the Hermitian H packed as [diag, (re, im) upper triangle]."""
    h = np.zeros((size, size), dtype=np.complex128)
    off = theta[size:]
    h[_triu(size)] = off[0::2] + 1j * off[1::2]
    h = h + h.conj().T
    h[np.diag_indices(size)] = theta[:size]
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def roof_minimize(
    rho: DensityMatrix,
    objective: Callable[[PureState], float],
    config: RoofConfig | None = None,
    vector_objective: Callable[[np.ndarray], float] | None = None,
    stop_below: float = 0.0,
) -> RoofResult:
    """Minimize the ensemble average of ``objective`` over decompositions of ``rho``.

    ``vector_objective``, when given, must map the (L, dim) array of
    *unnormalized* member rows to the weighted average directly; it is a fast
    path used by :func:`cren` and must agree with ``objective``.

    Two cheap exits precede the multi-start search, both reported with
    ``starts=0``: if the eigendecomposition average is already at or below
    ``stop_below`` it is returned as-is (the roof value is sandwiched between
    it and zero), and if a seeded probe of random mixing unitaries shows a
    spread below tol/1000 the objective is treated as decomposition
    independent and the eigendecomposition ensemble is returned.

    The ``converged`` flag is False when the winning start still improved by
    more than ``config.tol`` over the last quarter of its evaluation sequence.
    """
    config = config or RoofConfig()
    lam, base = _support(rho)
    r = len(lam)
    size = config.ensemble_size if config.ensemble_size is not None else r
    if not r <= size <= r * (r + 1):
        raise ValueError(
            f"ensemble size {size} outside [rank, rank*(rank+1)] = [{r}, {r * (r + 1)}]"
        )

    if r == 1:
        psi = PureState(rho.dims, base[0] / np.linalg.norm(base[0]))
        value = float(objective(psi))
        ensemble = Ensemble(((1.0, psi),))
        return RoofResult(value, ensemble, starts=0, converged=True, history=(value,))

    def average(rows: np.ndarray) -> float:
        if vector_objective is not None:
            return float(vector_objective(rows))
        total = 0.0
        weights = np.einsum("hd,hd->h", rows, rows.conj()).real
        for w, row in zip(weights, rows):
            if w < WEIGHT_TOL:
                continue
            total += w * objective(PureState(rho.dims, row / np.sqrt(w)))
        return total

    def evaluate(theta: np.ndarray, u0: np.ndarray) -> float:
        u = _unitary_from_params(theta, size) @ u0
        return average(u[:, :r] @ base)

    def finish(u, value, starts, converged, history) -> RoofResult:
        ensemble = hjw_ensemble(rho, MixingUnitary(u, source_rank=r))
        if value is None:
            value = ensemble.average(objective)
        return RoofResult(
            value=float(value),
            ensemble=ensemble,
            starts=starts,
            converged=converged,
            history=tuple(history),
        )

    identity = np.eye(size, dtype=np.complex128)
    eigen_average = average(base if size == r else identity[:, :r] @ base)
    if eigen_average <= stop_below:
        return finish(identity, eigen_average, 0, True, (eigen_average,))

    probe_rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0x9e3779b9)))
    probe_values = [eigen_average]
    for _ in range(PROBE_COUNT):
        u = haar_unitary(size, probe_rng)
        probe_values.append(average(u[:, :r] @ base))
    spread = max(probe_values) - min(probe_values)
    if spread <= max(1e-12, config.tol * 1e-3):
        return finish(identity, eigen_average, 0, True, tuple(probe_values))

    seeds = np.random.SeedSequence(config.seed).spawn(max(config.starts, 1))
    n_params = size * size
    best_value = np.inf
    best_theta: np.ndarray | None = None
    best_u0: np.ndarray | None = None
    best_trace: list[float] = []
    history: list[float] = []

    for k in range(max(config.starts, 1)):
        u0 = identity if k == 0 else haar_unitary(size, np.random.default_rng(seeds[k]))
        trace: list[float] = []

        def tracked(theta, _u0=u0, _trace=trace):
            val = evaluate(theta, _u0)
            _trace.append(val)
            return val

        res = minimize(
            tracked,
            np.zeros(n_params),
            method="Powell",
            options={"maxfev": config.iters, "xtol": 1e-7, "ftol": 1e-11, "maxiter": 10**6},
        )
        start_best = min(trace)
        history.append(start_best)
        if start_best < best_value:
            best_value = start_best
            best_theta = np.array(res.x, dtype=float)
            best_u0 = u0
            best_trace = trace
        if best_value <= stop_below:
            break

    if best_value > stop_below:
        # polish the winning start with tight line-search tolerances
        polish_trace: list[float] = []

        def polished(theta, _u0=best_u0, _trace=polish_trace):
            val = evaluate(theta, _u0)
            _trace.append(val)
            return val

        res = minimize(
            polished,
            best_theta,
            method="Powell",
            options={
                "maxfev": max(100, config.iters // 2),
                "xtol": 1e-10,
                "ftol": 1e-14,
                "maxiter": 10**6,
            },
        )
        if polish_trace and min(polish_trace) < best_value:
            best_value = min(polish_trace)
            best_theta = np.array(res.x, dtype=float)
        best_trace = best_trace + polish_trace

    quarter = (3 * len(best_trace)) // 4
    tail_gain = min(best_trace[:quarter]) - best_value if quarter > 0 else 0.0
    converged = bool(tail_gain <= config.tol)

    best_u = _unitary_from_params(best_theta, size) @ best_u0
    return finish(best_u, None, len(history), converged, history)


def _negativity_vector_objective(dims: Sequence[int], part: Bipartition):
    """Weighted-average negativity of unnormalized member rows, batched.

    For an unnormalized row with singular values s_i the weight is sum s_i^2
    and weight * negativity is (sum s_i)^2 - sum s_i^2, so the ensemble
    average needs no explicit normalization.
    """
    n = len(dims)
    order = [0] + [1 + i for i in part.side_a] + [1 + i for i in part.side_b]
    d_a = prod(dims[i] for i in part.side_a)

    def value(rows: np.ndarray) -> float:
        stack = rows.reshape((rows.shape[0],) + tuple(dims)).transpose(order)
        stack = stack.reshape(rows.shape[0], d_a, -1)
        s = np.linalg.svd(stack, compute_uv=False)
        return float((s.sum(axis=1) ** 2 - (s**2).sum(axis=1)).sum())

    return value


def cren(
    rho: DensityMatrix,
    part: Bipartition,
    config: RoofConfig | None = None,
    full_output: bool = False,
):
    """Convex-roof extended negativity: min ensemble-average negativity."""
    result = roof_minimize(
        rho,
        objective=lambda psi: negativity_pure(psi, part),
        config=config,
        vector_objective=_negativity_vector_objective(rho.dims, part),
    )
    value = max(0.0, result.value)
    return (value, result) if full_output else value


def scren2(
    rho: DensityMatrix,
    part: Bipartition,
    config: RoofConfig | None = None,
    full_output: bool = False,
):
    """Square of the convex-roof extended negativity."""
    value, result = cren(rho, part, config, full_output=True)
    return (value**2, result) if full_output else value**2


def roof_sqrt_functional(
    rho: DensityMatrix,
    pure_fn: Callable[[PureState], float],
    config: RoofConfig | None = None,
    full_output: bool = False,
):
    """Squared roof of the square root of a nonnegative pure-state functional.

    Computes [min average sqrt(max(0, pure_fn))]^2 over decompositions.
    ``pure_fn`` values in [-1e-7, 0) count as roundoff and clamp to zero; any
    value below that raises :class:`ConjectureViolation` with the state.
    """

    def objective(psi: PureState) -> float:
        v = float(pure_fn(psi))
        if v < -CONJECTURE_ATOL:
            raise ConjectureViolation(psi, v)
        return np.sqrt(max(0.0, v))

    result = roof_minimize(rho, objective, config, stop_below=SQRT_ROOF_FLOOR)
    value = max(0.0, result.value) ** 2
    return (value, result) if full_output else value
