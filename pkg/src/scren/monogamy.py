"""Multi-party monogamy reports: CKW and strong-monogamy (SM) inequalities.

The SM right-hand side sums, over every level m = 2..n-1 and every (m-1)-subset
of the non-focus parties, the mixed m-party measure of the reduced state raised
to m/2.  The mixed m-party measure is the squared roof of the square root of
the recursively defined pure m-party residual, so evaluating one report nests
convex-roof optimizations; reduced-state values are memoized per subsystem
subset within a report, and roofs inside another roof's objective run with a
scaled-down budget (``RoofConfig.child``).

Subsets are reported with the paper-style 1-based labels {2..n} assigned after
moving the focus party to the front; subsystem indices handed to the state
operations stay 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import numpy as np

from .guards import check_cost
from .negativity import negativity_pure
from .roof import RoofConfig, RoofResult, roof_sqrt_functional, scren2
from .states import Bipartition, DensityMatrix, PureState, reduced_density
from .tangle import one_tangle, two_tangle

SATISFIED_ATOL = 1e-6

MEASURES = ("scren", "tangle")


@dataclass(frozen=True)
class IndexVector:
    """Ascending non-focus party labels from {2..n}; order m is length + 1."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(j) for j in self.entries)
        if not entries:
            raise ValueError("index vector must be non-empty")
        if any(j < 2 for j in entries):
            raise ValueError("labels start at 2 (the focus party is label 1)")
        if list(entries) != sorted(set(entries)):
            raise ValueError("labels must be strictly ascending")
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return len(self.entries) + 1


def enumerate_subsets(n: int, m: int) -> list[IndexVector]:
    """All C(n-1, m-1) ascending label subsets of {2..n} at level m."""
    if not 2 <= m <= n - 1:
        raise ValueError(f"level m={m} outside [2, n-1] for n={n}")
    return [IndexVector(c) for c in combinations(range(2, n + 1), m - 1)]


@dataclass(frozen=True)
class SMTerm:
    subset: IndexVector
    value: float
    contribution: float
    converged: bool
    starts: int

    @property
    def order(self) -> int:
        return self.subset.order

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset.entries),
            "m": self.order,
            "value": self.value,
            "contribution": self.contribution,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class SMReport:
    """Strong-monogamy balance sheet for one pure state and focus party."""

    measure: str
    focus: int
    one_value: float
    terms: tuple[SMTerm, ...]
    rhs_total: float
    residual: float
    satisfied: bool

    def level_totals(self) -> dict[int, float]:
        totals: dict[int, float] = {}
        for t in self.terms:
            totals[t.order] = totals.get(t.order, 0.0) + t.contribution
        return totals

    def to_dict(self) -> dict:
        return {
            "one": self.one_value,
            "terms": [t.to_dict() for t in self.terms],
            "rhs": self.rhs_total,
            "residual": self.residual,
            "satisfied": self.satisfied,
            "diagnostics": {
                "measure": self.measure,
                "focus": self.focus,
                "levels": {str(m): v for m, v in sorted(self.level_totals().items())},
                "all_converged": all(t.converged for t in self.terms),
            },
        }


@dataclass(frozen=True)
class CKWTerm:
    party: int
    value: float


@dataclass(frozen=True)
class CKWReport:
    """Pairwise (CKW-type) monogamy balance sheet."""

    measure: str
    focus: int
    lhs: float
    terms: tuple[CKWTerm, ...]
    rhs: float
    residual: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "terms": [{"party": t.party, "value": t.value} for t in self.terms],
            "rhs": self.rhs,
            "residual": self.residual,
            "satisfied": self.satisfied,
            "diagnostics": {"measure": self.measure, "focus": self.focus},
        }


def _focus_first(psi: PureState, focus: int) -> PureState:
    if not 0 <= focus < psi.n_parties:
        raise ValueError(f"focus {focus} out of range for {psi.n_parties} parties")
    if focus == 0:
        return psi
    order = [focus] + [i for i in range(psi.n_parties) if i != focus]
    return psi.permute(order)


def _check_measure(psi: PureState, measure: str) -> None:
    """Validate the measure against the (focus-first) state's dimensions."""
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}")
    if measure != "tangle" or psi.n_parties < 3:
        return
    if psi.n_parties > 3 and any(d != 2 for d in psi.dims):
        raise ValueError(
            "tangle-based reports beyond three parties are only defined for "
            "all-qubit states"
        )
    if any(min(psi.dims[0], d) != 2 for d in psi.dims[1:]):
        raise ValueError(
            "tangle-based reports need a qubit in every pair with the focus "
            f"party, got dims {psi.dims} with the focus first"
        )


def _cut_value(psi: PureState, measure: str) -> float:
    """Pure-state measure of the focus(0)-versus-rest cut."""
    part = Bipartition((0,), psi.n_parties)
    if measure == "scren":
        return negativity_pure(psi, part) ** 2
    return one_tangle(psi, part)


def _pair_value(rho: DensityMatrix, measure: str, config: RoofConfig) -> tuple[float, RoofResult]:
    if measure == "scren":
        return scren2(rho, Bipartition((0,), 2), config, full_output=True)
    return two_tangle(rho, config, full_output=True)


def _residual_value(psi: PureState, measure: str, config: RoofConfig) -> float:
    """Recursive pure-state residual with focus at position 0."""
    n = psi.n_parties
    one = _cut_value(psi, measure)
    if n == 2:
        return one
    total = one
    for m in range(2, n):
        for subset in combinations(range(1, n), m - 1):
            value, _ = _mixed_value(psi, subset, measure, config)
            total -= value ** (m / 2)
    return total


def _mixed_value(
    psi: PureState,
    subset: tuple[int, ...],
    measure: str,
    config: RoofConfig,
    memo: dict | None = None,
) -> tuple[float, RoofResult]:
    """Mixed m-party measure of the reduced state on focus + subset (0-based).

    Pairwise terms run at the given config.  Terms of order three and above
    nest a full recursion inside every objective evaluation, so they run at
    the scaled-down ``config.child()`` budget (and their members' inner roofs
    scale down again); pass a larger config explicitly to override.
    """
    key = (subset, measure)
    if memo is not None and key in memo:
        return memo[key]
    rho = reduced_density(psi, (0,) + subset)
    if len(subset) == 1:
        value, result = _pair_value(rho, measure, config)
    else:
        outer = config.child().child()
        inner = outer.child()
        value, result = roof_sqrt_functional(
            rho,
            lambda member: _residual_value(member, measure, inner),
            outer,
            full_output=True,
        )
    if memo is not None:
        memo[key] = (value, result)
    return value, result


def sm_report(
    psi: PureState,
    focus: int = 0,
    measure: str = "scren",
    config: RoofConfig | None = None,
) -> SMReport:
    """Full strong-monogamy report for ``psi`` with the given focus party.

    Labels in the returned terms follow the focus-first relabeling: the focus
    party is label 1 and the remaining parties keep their original order as
    labels 2..n.
    """
    config = config or RoofConfig()
    check_cost(psi.dims)
    work = _focus_first(psi, focus)
    _check_measure(work, measure)
    n = work.n_parties
    one = _cut_value(work, measure)
    memo: dict = {}
    terms: list[SMTerm] = []
    rhs = 0.0
    for m in range(2, n):
        for vec in enumerate_subsets(n, m):
            subset = tuple(j - 1 for j in vec.entries)  # labels 2..n -> positions 1..n-1
            value, result = _mixed_value(work, subset, measure, config, memo)
            contribution = value ** (m / 2)
            rhs += contribution
            terms.append(
                SMTerm(
                    subset=vec,
                    value=value,
                    contribution=contribution,
                    converged=result.converged,
                    starts=result.starts,
                )
            )
    residual = one - rhs
    return SMReport(
        measure=measure,
        focus=focus,
        one_value=one,
        terms=tuple(terms),
        rhs_total=rhs,
        residual=residual,
        satisfied=bool(residual >= -SATISFIED_ATOL),
    )


def ckw_report(
    psi: PureState,
    focus: int = 0,
    measure: str = "scren",
    config: RoofConfig | None = None,
) -> CKWReport:
    """Pairwise monogamy report: focus-versus-rest against the sum of pairs."""
    config = config or RoofConfig()
    check_cost(psi.dims)
    work = _focus_first(psi, focus)
    _check_measure(work, measure)
    n = work.n_parties
    lhs = _cut_value(work, measure)
    terms = []
    for j in range(1, n):
        value, _ = _mixed_value(work, (j,), measure, config)
        terms.append(CKWTerm(party=j + 1, value=value))
    rhs = float(sum(t.value for t in terms))
    residual = lhs - rhs
    return CKWReport(
        measure=measure,
        focus=focus,
        lhs=lhs,
        terms=tuple(terms),
        rhs=rhs,
        residual=residual,
        satisfied=bool(residual >= -SATISFIED_ATOL),
    )


def n_scren_pure(psi: PureState, focus: int = 0, config: RoofConfig | None = None) -> float:
    """Recursive multi-party residual of the squared convex-roof negativity."""
    return sm_report(psi, focus=focus, measure="scren", config=config).residual


# ---------------------------------------------------------------------------
# Built-in fixture states
# ---------------------------------------------------------------------------

def _counterexample_322() -> PureState:
    # (sqrt(2)|010> + sqrt(2)|101> + |200> + |211>) / sqrt(6) on dims (3, 2, 2):
    # the known 3x2x2 violation of the tangle CKW inequality.
    amps = np.zeros(12, dtype=np.complex128)
    amps[0 * 4 + 1 * 2 + 0] = np.sqrt(2)
    amps[1 * 4 + 0 * 2 + 1] = np.sqrt(2)
    amps[2 * 4 + 0 * 2 + 0] = 1.0
    amps[2 * 4 + 1 * 2 + 1] = 1.0
    return PureState((3, 2, 2), amps / np.sqrt(6))


def _antisymmetric_333() -> PureState:
    # Totally antisymmetric three-qutrit singlet, all signed level permutations.
    amps = np.zeros(27, dtype=np.complex128)
    even = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}
    from itertools import permutations

    for perm in permutations(range(3)):
        a, b, c = perm
        amps[a * 9 + b * 3 + c] = 1.0 if perm in even else -1.0
    return PureState((3, 3, 3), amps / np.sqrt(6))


CKW_COUNTEREXAMPLE_322 = _counterexample_322()
ANTISYMMETRIC_333 = _antisymmetric_333()
