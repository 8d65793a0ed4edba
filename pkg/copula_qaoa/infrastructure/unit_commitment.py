"""Single-period unit commitment and its reduction to knapsack.

At a common marginal cost D every committed unit produces
clip((D - B) / (2C), p_min, p_max). Fixing D turns the commitment choice
into a knapsack over switch-off variables z = 1 - y: switching unit i off
saves A + B*p + C*p^2 and frees p units of output, and at most
sum(p) - L output may be freed. Scanning D and re-dispatching each
commitment exactly yields the UC solution.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from copula_qaoa.domain.entities import (
    Commitment,
    Dispatch,
    Item,
    KnapsackInstance,
    MarginalParam,
    ScanPoint,
    ScanResult,
    Selection,
    SolveResult,
    UcInstance,
    UcSolution,
    UcUnit,
)
from copula_qaoa.domain.errors import (
    DemandInfeasibleError,
    InfeasibleAtMarginalError,
    InfeasibleError,
    InvalidArgumentError,
    MinimumGenerationError,
    NoFeasibleSolutionError,
    ResourceLimitError,
)
from copula_qaoa.protocols.interfaces import KnapsackSolver

logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-9
BRUTE_FORCE_MAX_UNITS = 14
SCAN_MODES = ("redispatch", "marginal")
BISECT_TOLERANCE = 1e-9
MAX_REFINEMENTS = 2000
# relative step past a commitment's own lambda, enough to clear round-off in the capacity
LAMBDA_NUDGE = 1e-8

KnapsackCallback = Callable[[KnapsackInstance], Union[SolveResult, Selection]]
SolverLike = Union[KnapsackSolver, KnapsackCallback]
ScanOutcome = Tuple[ScanPoint, Optional[UcSolution]]


def dispatch_at_marginal(unit: UcUnit, d: float) -> float:
    """Output of ``unit`` at marginal cost ``d``: clip((d - B) / (2C), p_min, p_max)."""
    interior = (d - unit.linear_cost) / (2.0 * unit.quadratic_cost)
    return min(max(interior, unit.p_min), unit.p_max)


def build_knapsack(uc: UcInstance, d: float) -> Tuple[KnapsackInstance, Tuple[float, ...]]:
    """Knapsack over switch-off decisions at marginal cost ``d``.

    Args:
    ----
        uc: The unit-commitment instance
        d: Marginal-cost level

    Returns:
    -------
        Tuple of (knapsack instance, per-unit powers at ``d``)

    Raises:
    ------
        InfeasibleAtMarginalError: If all units together produce less than the load at ``d``

    """
    powers = tuple(dispatch_at_marginal(unit, d) for unit in uc.units)
    total = math.fsum(powers)
    if total < uc.load:
        raise InfeasibleAtMarginalError(
            f"units produce {total:.6g} < load {uc.load:.6g} at D={d:.6g}; widen D"
        )
    items = tuple(
        Item(unit.commit_cost + unit.production_cost(p), p) for unit, p in zip(uc.units, powers)
    )
    return KnapsackInstance(items, total - uc.load, f"{uc.instance_id}@D={d!r}"), powers


def _check_dispatch(uc: UcInstance, commitment: Commitment, dispatch: Dispatch) -> None:
    if len(commitment.bits) != uc.n or len(dispatch.powers) != uc.n:
        raise InvalidArgumentError(
            f"commitment/dispatch lengths {len(commitment.bits)}/{len(dispatch.powers)} "
            f"do not match {uc.n} units"
        )
    for i, (on, p, unit) in enumerate(zip(commitment.bits, dispatch.powers, uc.units)):
        if not on and p != 0:
            raise InvalidArgumentError(f"unit {i} is off but dispatched at {p}")
        if on and not (
            unit.p_min - POWER_TOLERANCE <= p <= unit.p_max + POWER_TOLERANCE
        ):
            raise InvalidArgumentError(
                f"unit {i} dispatched at {p} outside [{unit.p_min}, {unit.p_max}]"
            )


def uc_cost(uc: UcInstance, commitment: Commitment, dispatch: Dispatch) -> float:
    """Total cost sum_i (A_i*y_i + B_i*p_i + C_i*p_i^2)."""
    _check_dispatch(uc, commitment, dispatch)
    return math.fsum(
        unit.commit_cost * on + unit.production_cost(p)
        for unit, on, p in zip(uc.units, commitment.bits, dispatch.powers)
    )


def exact_dispatch(
    uc: UcInstance, commitment: Commitment, tolerance: float = POWER_TOLERANCE
) -> Tuple[Dispatch, MarginalParam]:
    """Economic dispatch of a fixed commitment by bisection on lambda.

    Every committed unit produces clip((lambda - B) / (2C), p_min, p_max) and
    lambda is chosen so that the outputs sum to the load.

    Raises
    ------
        DemandInfeasibleError: If committed units cannot reach the load
        MinimumGenerationError: If committed minimum outputs exceed the load

    """
    if len(commitment.bits) != uc.n:
        raise InvalidArgumentError(f"commitment has {len(commitment.bits)} bits for {uc.n} units")
    committed = commitment.committed
    units = [uc.units[i] for i in committed]
    if not units:
        raise DemandInfeasibleError("no unit is committed")
    b = np.array([u.linear_cost for u in units])
    c = np.array([u.quadratic_cost for u in units])
    low = np.array([u.p_min for u in units])
    high = np.array([u.p_max for u in units])
    load = uc.load
    if high.sum() < load - tolerance:
        raise DemandInfeasibleError(
            f"committed units reach at most {high.sum():.6g} < load {load:.6g}"
        )
    if low.sum() > load + tolerance:
        raise MinimumGenerationError(
            f"committed minimum output {low.sum():.6g} exceeds load {load:.6g}"
        )

    def outputs(lam: float) -> np.ndarray:
        return np.clip((lam - b) / (2.0 * c), low, high)

    lam_low = float(np.min(b + 2.0 * c * low))
    lam_high = float(np.max(b + 2.0 * c * high))
    if low.sum() >= load - tolerance:
        lam, powers = lam_low, low.copy()
    elif high.sum() <= load + tolerance:
        lam, powers = lam_high, high.copy()
    else:
        lam = float(brentq(lambda x: outputs(x).sum() - load, lam_low, lam_high, xtol=1e-13))
        powers = outputs(lam)
        interior = (powers > low) & (powers < high)
        if interior.any():
            # one Newton step on the linear segment removes the bracketing residue
            polished = lam - (powers.sum() - load) / float(np.sum(0.5 / c[interior]))
            candidate = outputs(polished)
            if abs(candidate.sum() - load) < abs(powers.sum() - load):
                lam, powers = polished, candidate

    full = [0.0] * uc.n
    for i, p in zip(committed, powers.tolist()):
        full[i] = p
    return Dispatch(tuple(full)), MarginalParam(lam)


def kkt_multipliers(
    uc: UcInstance, commitment: Commitment, dispatch: Dispatch, d: float
) -> MarginalParam:
    """Reconstruct the generation-limit multipliers of a dispatch at marginal cost ``d``.

    Stationarity B + 2Cp - d - xi + eta = 0 gives xi = marginal - d at the
    lower limit and eta = d - marginal at the upper limit, both clipped at 0.
    """
    _check_dispatch(uc, commitment, dispatch)
    xi: List[float] = []
    eta: List[float] = []
    for on, p, unit in zip(commitment.bits, dispatch.powers, uc.units):
        gap = unit.marginal_cost(p) - d
        at_low = on and abs(p - unit.p_min) <= POWER_TOLERANCE
        at_high = on and abs(p - unit.p_max) <= POWER_TOLERANCE
        xi.append(max(gap, 0.0) if at_low else 0.0)
        eta.append(max(-gap, 0.0) if at_high else 0.0)
    return MarginalParam(d, tuple(xi), tuple(eta))


def verify_kkt(
    uc: UcInstance, commitment: Commitment, dispatch: Dispatch, d: float, tol: float = 1e-6
) -> bool:
    """Check the equal-marginal optimality conditions at ``d``.

    Each committed unit must be interior with marginal cost within ``tol``
    of ``d``, or sit at p_min with marginal cost above ``d - tol``, or sit at
    p_max with marginal cost below ``d + tol``.
    """
    _check_dispatch(uc, commitment, dispatch)
    for on, p, unit in zip(commitment.bits, dispatch.powers, uc.units):
        if not on:
            continue
        marginal = unit.marginal_cost(p)
        if abs(marginal - d) <= tol:
            continue
        if marginal > d - tol and abs(p - unit.p_min) <= POWER_TOLERANCE:
            continue
        if marginal < d + tol and abs(p - unit.p_max) <= POWER_TOLERANCE:
            continue
        return False
    return True


def default_marginal_grid(uc: UcInstance, points: int = 200) -> Tuple[float, ...]:
    """Uniform grid over [min B, max(B + 2C*p_max)], covering every clamping regime."""
    if points < 1:
        raise InvalidArgumentError(f"grid needs at least one point, got {points}")
    low = min(u.linear_cost for u in uc.units)
    high = max(u.marginal_cost(u.p_max) for u in uc.units)
    return tuple(float(x) for x in np.linspace(low, high, points))


def _selection_of(outcome: Union[SolveResult, Selection]) -> Selection:
    return outcome.selection if isinstance(outcome, SolveResult) else outcome


def _solve_function(solver: SolverLike) -> KnapsackCallback:
    solve = getattr(solver, "solve", None)
    return solve if callable(solve) else solver  # type: ignore[return-value]


def _evaluate_commitment(
    uc: UcInstance, commitment: Commitment, d: float, powers: Sequence[float], mode: str
) -> Optional[UcSolution]:
    try:
        if mode == "marginal":
            dispatch = Dispatch(tuple(p * on for p, on in zip(powers, commitment.bits)))
            if dispatch.total < uc.load:
                return None
            cost = uc_cost(uc, commitment, dispatch)
            return UcSolution(commitment, dispatch, cost, MarginalParam(d))
        dispatch, lam = exact_dispatch(uc, commitment)
        return UcSolution(commitment, dispatch, uc_cost(uc, commitment, dispatch), lam)
    except InfeasibleError:
        return None


def _scan_point(
    uc: UcInstance, d: float, solve: KnapsackCallback, mode: str, refined: bool = False
) -> ScanOutcome:
    try:
        knapsack, powers = build_knapsack(uc, d)
    except InfeasibleAtMarginalError:
        return ScanPoint(d, math.inf, False, None, refined), None
    commitment = Commitment.from_switch_off(_selection_of(solve(knapsack)))
    solution = _evaluate_commitment(uc, commitment, d, powers, mode)
    if solution is None:
        return ScanPoint(d, math.inf, False, commitment, refined), None
    return ScanPoint(d, solution.cost, True, commitment, refined), solution


def _nudge(d: float) -> float:
    return d + LAMBDA_NUDGE * max(1.0, abs(d))


def _refine_scan(
    uc: UcInstance,
    outcomes: Sequence[ScanOutcome],
    solve: KnapsackCallback,
    bisect_tol: float,
    max_refinements: int,
) -> List[ScanOutcome]:
    visited = {point.d for point, _ in outcomes}
    refined: List[ScanOutcome] = []

    def visit(d: float) -> Optional[ScanOutcome]:
        if d in visited or len(refined) >= max_refinements:
            return None
        visited.add(d)
        outcome = _scan_point(uc, d, solve, "redispatch", refined=True)
        refined.append(outcome)
        return outcome

    # the selected commitment only changes where the knapsack optimum jumps
    stack = list(zip(outcomes, outcomes[1:]))[::-1]
    while stack:
        left, right = stack.pop()
        if left[0].commitment == right[0].commitment or right[0].d - left[0].d <= bisect_tol:
            continue
        middle = visit(0.5 * (left[0].d + right[0].d))
        if middle is None:
            continue
        stack.append((middle, right))
        stack.append((left, middle))

    # at its own lambda a commitment is feasible with zero slack, so the
    # knapsack there returns a commitment that is at least as cheap
    pending = [solution for _, solution in list(outcomes) + refined if solution is not None]
    seen: Set[Commitment] = set()
    index = 0
    while index < len(pending):
        solution = pending[index]
        index += 1
        if solution.commitment in seen:
            continue
        seen.add(solution.commitment)
        lam = solution.marginal.value
        for d in (lam, _nudge(lam)):
            outcome = visit(d)
            if outcome is not None and outcome[1] is not None:
                pending.append(outcome[1])
    return refined


def solve_uc_via_scan(
    uc: UcInstance,
    d_grid: Sequence[float],
    knapsack_solver: SolverLike,
    mode: str = "redispatch",
    refine: bool = True,
    bisect_tol: float = BISECT_TOLERANCE,
    max_refinements: int = MAX_REFINEMENTS,
    workers: int = 1,
) -> ScanResult:
    """Solve UC by scanning the marginal cost D.

    For every D on the grid the knapsack is built and solved, switch-off
    decisions are mapped to a commitment, and the commitment is costed
    either after exact re-dispatch (``"redispatch"``) or at the D-induced
    powers (``"marginal"``). Infeasible points are recorded with cost +inf.

    In redispatch mode the grid is then refined. Every pair of adjacent
    points with different commitments is bisected down to ``bisect_tol``,
    and every distinct feasible commitment found is re-solved at its own
    lambda and just above it, until no new commitment turns up.

    Args:
    ----
        uc: The unit-commitment instance
        d_grid: Non-empty, sorted marginal-cost values
        knapsack_solver: A KnapsackSolver or a callable returning a result or selection
        mode: ``"redispatch"`` or ``"marginal"``
        refine: Refine the grid in redispatch mode
        bisect_tol: Width in D below which an interval is not split further
        max_refinements: Cap on knapsack solves spent on refinement
        workers: Threads for grid evaluation; used only when the solver is thread-safe

    Returns:
    -------
        Best solution, its D, the grid curve and any refinement points

    Raises:
    ------
        NoFeasibleSolutionError: If no grid point yields a feasible commitment

    """
    if not d_grid:
        raise InvalidArgumentError("the D grid must not be empty")
    if any(b < a for a, b in zip(d_grid, d_grid[1:])):
        raise InvalidArgumentError("the D grid must be sorted")
    if mode not in SCAN_MODES:
        raise InvalidArgumentError(f"unknown scan mode {mode!r}, expected {SCAN_MODES}")
    if bisect_tol <= 0 or max_refinements < 0:
        raise InvalidArgumentError("bisect_tol must be > 0 and max_refinements >= 0")
    solve = _solve_function(knapsack_solver)

    def evaluate(d: float) -> ScanOutcome:
        return _scan_point(uc, float(d), solve, mode)

    if workers > 1 and getattr(knapsack_solver, "thread_safe", False):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, d_grid))
    else:
        outcomes = [evaluate(d) for d in d_grid]

    curve = tuple(point for point, _ in outcomes)
    for point in curve:
        logger.debug("scan D=%.6g cost=%.6g feasible=%s", point.d, point.cost, point.feasible)
    feasible = [(point, solution) for point, solution in outcomes if solution is not None]
    if not feasible:
        raise NoFeasibleSolutionError(f"all {len(d_grid)} grid points were infeasible")
    best_point, best = min(feasible, key=lambda pair: pair[1].cost)
    if mode != "redispatch" or not refine:
        return ScanResult(best, best_point.d, curve, ())

    refined = _refine_scan(uc, outcomes, solve, bisect_tol, max_refinements)
    best_d = best_point.d
    for point, solution in refined:
        if solution is not None and solution.cost < best.cost:
            best, best_d = solution, point.d
    if len(refined) >= max_refinements:
        logger.warning("scan refinement stopped at its cap of %d solves", max_refinements)
    logger.info(
        "scan refined %d points; best cost %.6g at D=%.6g", len(refined), best.cost, best_d
    )
    return ScanResult(best, best_d, curve, tuple(point for point, _ in refined))


def brute_force_uc(uc: UcInstance, max_units: int = BRUTE_FORCE_MAX_UNITS) -> UcSolution:
    """Exhaustive minimum over all commitments, each dispatched exactly.

    Raises
    ------
        ResourceLimitError: If the instance has more than ``max_units`` units
        NoFeasibleSolutionError: If no commitment can meet the load

    """
    if uc.n > max_units:
        raise ResourceLimitError(f"brute-force UC is capped at {max_units} units, got {uc.n}")
    best: Optional[UcSolution] = None
    for index in range(1, 1 << uc.n):
        commitment = Commitment(tuple((index >> i) & 1 for i in range(uc.n)))
        try:
            dispatch, lam = exact_dispatch(uc, commitment)
        except InfeasibleError:
            continue
        cost = uc_cost(uc, commitment, dispatch)
        if best is None or cost < best.cost:
            best = UcSolution(commitment, dispatch, cost, lam)
    if best is None:
        raise NoFeasibleSolutionError("no commitment can meet the load")
    return best
