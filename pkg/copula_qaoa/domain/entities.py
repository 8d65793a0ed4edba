"""Domain entities for the copula-QAOA toolkit.

This module defines the immutable value objects shared by every layer:
knapsack instances and solutions, unit-commitment models, measurement
samples and the parameter containers of the copula-QAOA circuit family.

Bitstrings are always rendered qubit-0-first: character ``i`` of a
bitstring is the bit of item (qubit) ``i``. Integer basis-state indices are
little-endian: bit ``i`` of the index is qubit ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from copula_qaoa.domain.errors import InvalidArgumentError

Bits = Tuple[int, ...]


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")


def _as_bits(bits: Iterable[int]) -> Bits:
    result = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in result):
        raise InvalidArgumentError(f"bit vector must contain only 0/1, got {result!r}")
    return result


@dataclass(eq=True, frozen=True)
class Item:
    """A knapsack item.

    Weights of zero are accepted here because unit-commitment reductions
    produce zero-power units; instance files and generators require
    strictly positive weights.

    Attributes
    ----------
        value: Profit gained when the item is selected, nonnegative
        weight: Capacity consumed when the item is selected, nonnegative

    """

    value: float
    weight: float

    def __post_init__(self) -> None:
        """Validate the item."""
        _check_finite("value", self.value)
        _check_finite("weight", self.weight)
        if self.value < 0:
            raise InvalidArgumentError(f"item value must be >= 0, got {self.value}")
        if self.weight < 0:
            raise InvalidArgumentError(f"item weight must be >= 0, got {self.weight}")

    @property
    def ratio(self) -> float:
        """Return value per unit weight; +inf for weightless items."""
        if self.weight == 0:
            return math.inf
        return self.value / self.weight


@dataclass(eq=True, frozen=True)
class KnapsackInstance:
    """A 0/1 knapsack instance.

    Attributes
    ----------
        items: Ordered items; the order defines qubit and bit positions
        capacity: Weight budget, nonnegative
        instance_id: Opaque label carried into reports and files

    """

    items: Tuple[Item, ...]
    capacity: float
    instance_id: str = "instance"

    def __post_init__(self) -> None:
        """Normalize items to a tuple and validate the instance."""
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise InvalidArgumentError("a knapsack instance needs at least one item")
        _check_finite("capacity", self.capacity)
        if self.capacity < 0:
            raise InvalidArgumentError(f"capacity must be >= 0, got {self.capacity}")

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[Tuple[float, float]], capacity: float, instance_id: str = "instance"
    ) -> KnapsackInstance:
        """Build an instance from ``(value, weight)`` pairs."""
        return cls(tuple(Item(v, w) for v, w in pairs), capacity, instance_id)

    @property
    def n(self) -> int:
        """Number of items."""
        return len(self.items)

    @property
    def values(self) -> Tuple[float, ...]:
        """Item values in index order."""
        return tuple(item.value for item in self.items)

    @property
    def weights(self) -> Tuple[float, ...]:
        """Item weights in index order."""
        return tuple(item.weight for item in self.items)

    @property
    def ratios(self) -> Tuple[float, ...]:
        """Item value/weight ratios in index order."""
        return tuple(item.ratio for item in self.items)

    def evaluate(self, bits: Sequence[int]) -> Tuple[float, float, bool]:
        """Evaluate a selection against this instance.

        Sums are accumulated left to right in index order, which is the
        order every vectorized evaluator in the package reproduces.

        Args:
        ----
            bits: Length-n 0/1 vector, bit i = 1 selects item i

        Returns:
        -------
            Tuple of (total value, total weight, feasible)

        """
        if len(bits) != self.n:
            raise InvalidArgumentError(
                f"selection has {len(bits)} bits but instance has {self.n} items"
            )
        value = 0.0
        weight = 0.0
        for bit, item in zip(bits, self.items):
            if bit:
                value += item.value
                weight += item.weight
        return value, weight, weight <= self.capacity


@dataclass(eq=True, frozen=True)
class Selection:
    """A 0/1 decision vector over knapsack items.

    Attributes
    ----------
        bits: Tuple of 0/1 values, bit i = 1 means item i is chosen

    """

    bits: Bits

    def __post_init__(self) -> None:
        """Normalize and validate the bit vector."""
        object.__setattr__(self, "bits", _as_bits(self.bits))

    @classmethod
    def from_string(cls, text: str) -> Selection:
        """Parse a qubit-0-first bitstring such as ``"110"``."""
        if any(ch not in "01" for ch in text):
            raise InvalidArgumentError(f"not a bitstring: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_index(cls, index: int, n: int) -> Selection:
        """Decode a little-endian basis-state index."""
        return cls(tuple((index >> q) & 1 for q in range(n)))

    @classmethod
    def empty(cls, n: int) -> Selection:
        """Return the all-zero selection of length ``n``."""
        return cls((0,) * n)

    def as_string(self) -> str:
        """Render as a qubit-0-first bitstring."""
        return "".join(str(b) for b in self.bits)

    @property
    def index(self) -> int:
        """Little-endian basis-state index of this selection."""
        return sum(b << q for q, b in enumerate(self.bits))

    @property
    def chosen(self) -> Tuple[int, ...]:
        """Indices of selected items."""
        return tuple(i for i, b in enumerate(self.bits) if b)

    def __len__(self) -> int:
        """Return the vector length."""
        return len(self.bits)


@dataclass(eq=True, frozen=True)
class SolveResult:
    """Outcome of a classical knapsack solver.

    Attributes
    ----------
        selection: Chosen items
        value: Total value of the selection
        weight: Total weight of the selection
        proven_optimal: Whether the solver certified optimality
        upper_bound: Proven bound on the optimum, at least ``value``
        method: Name of the solver that produced the result

    """

    selection: Selection
    value: float
    weight: float
    proven_optimal: bool
    upper_bound: float
    method: str = ""

    def __post_init__(self) -> None:
        """Check the bound invariants."""
        if self.upper_bound < self.value:
            raise InvalidArgumentError(
                f"upper bound {self.upper_bound} is below value {self.value}"
            )
        if self.proven_optimal and self.upper_bound != self.value:
            raise InvalidArgumentError("a proven optimum must have upper_bound == value")

    @classmethod
    def from_selection(
        cls,
        instance: KnapsackInstance,
        selection: Selection,
        method: str,
        proven_optimal: bool,
        upper_bound: Optional[float] = None,
    ) -> SolveResult:
        """Build a result whose value and weight come from ``instance.evaluate``."""
        value, weight, feasible = instance.evaluate(selection.bits)
        if not feasible:
            raise InvalidArgumentError(f"{method} produced an infeasible selection")
        bound = value if proven_optimal or upper_bound is None else max(upper_bound, value)
        return cls(selection, value, weight, proven_optimal, bound, method)


@dataclass(eq=True, frozen=True)
class UcUnit:
    """A thermal generating unit with quadratic production cost.

    Attributes
    ----------
        commit_cost: Fixed cost paid when the unit is on (A)
        linear_cost: Linear production cost coefficient (B)
        quadratic_cost: Quadratic production cost coefficient (C), strictly positive
        p_min: Minimum output when committed
        p_max: Maximum output when committed

    """

    commit_cost: float
    linear_cost: float
    quadratic_cost: float
    p_min: float
    p_max: float

    def __post_init__(self) -> None:
        """Validate the unit."""
        for name in ("commit_cost", "linear_cost", "quadratic_cost", "p_min", "p_max"):
            _check_finite(name, getattr(self, name))
        if self.commit_cost < 0 or self.linear_cost < 0:
            raise InvalidArgumentError("commit and linear costs must be >= 0")
        if self.quadratic_cost <= 0:
            raise InvalidArgumentError(
                f"quadratic cost must be > 0 for a unique dispatch, got {self.quadratic_cost}"
            )
        if not 0 <= self.p_min <= self.p_max:
            raise InvalidArgumentError(
                f"generation limits must satisfy 0 <= p_min <= p_max, got "
                f"[{self.p_min}, {self.p_max}]"
            )

    def production_cost(self, power: float) -> float:
        """Variable cost B*p + C*p^2 at ``power``."""
        return self.linear_cost * power + self.quadratic_cost * power * power

    def marginal_cost(self, power: float) -> float:
        """Derivative of the production cost, B + 2*C*p."""
        return self.linear_cost + 2.0 * self.quadratic_cost * power


@dataclass(eq=True, frozen=True)
class UcInstance:
    """Single-period unit-commitment instance.

    Attributes
    ----------
        units: Ordered generating units
        load: Demand to be met (L), strictly positive
        instance_id: Opaque label

    """

    units: Tuple[UcUnit, ...]
    load: float
    instance_id: str = "uc"

    def __post_init__(self) -> None:
        """Validate the instance."""
        object.__setattr__(self, "units", tuple(self.units))
        if not self.units:
            raise InvalidArgumentError("a unit-commitment instance needs at least one unit")
        _check_finite("load", self.load)
        if self.load <= 0:
            raise InvalidArgumentError(f"load must be > 0, got {self.load}")
        total = sum(u.p_max for u in self.units)
        if total < self.load:
            raise InvalidArgumentError(
                f"load {self.load} exceeds total capacity {total} of all units"
            )

    @property
    def n(self) -> int:
        """Number of units."""
        return len(self.units)


@dataclass(eq=True, frozen=True)
class Commitment:
    """On/off decision per unit (y).

    Attributes
    ----------
        bits: Tuple of 0/1, bit i = 1 means unit i is committed

    """

    bits: Bits

    def __post_init__(self) -> None:
        """Normalize and validate the bit vector."""
        object.__setattr__(self, "bits", _as_bits(self.bits))

    @classmethod
    def from_switch_off(cls, selection: Selection) -> Commitment:
        """Map knapsack switch-off variables z to commitments y = 1 - z."""
        return cls(tuple(1 - b for b in selection.bits))

    @property
    def committed(self) -> Tuple[int, ...]:
        """Indices of committed units."""
        return tuple(i for i, b in enumerate(self.bits) if b)

    def as_string(self) -> str:
        """Render as a unit-0-first bitstring."""
        return "".join(str(b) for b in self.bits)


@dataclass(eq=True, frozen=True)
class Dispatch:
    """Power output per unit.

    Attributes
    ----------
        powers: One output level per unit; zero for uncommitted units

    """

    powers: Tuple[float, ...]

    def __post_init__(self) -> None:
        """Normalize powers to a tuple of floats."""
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))

    @property
    def total(self) -> float:
        """Total generated power."""
        return math.fsum(self.powers)


@dataclass(eq=True, frozen=True)
class MarginalParam:
    """Common marginal cost (D, or lambda) with optional KKT multipliers.

    Attributes
    ----------
        value: The marginal-cost level
        xi: Multipliers of the lower generation limits, one per unit, if reconstructed
        eta: Multipliers of the upper generation limits, one per unit, if reconstructed

    """

    value: float
    xi: Tuple[float, ...] = ()
    eta: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """Validate finiteness."""
        _check_finite("marginal value", self.value)


@dataclass(eq=True, frozen=True)
class UcSolution:
    """A costed commitment with its dispatch.

    Attributes
    ----------
        commitment: Units switched on
        dispatch: Output of every unit
        cost: Total cost of commitment and production
        marginal: Marginal cost the dispatch balances at

    """

    commitment: Commitment
    dispatch: Dispatch
    cost: float
    marginal: MarginalParam


@dataclass(eq=True, frozen=True)
class ScanPoint:
    """One point of a marginal-cost scan.

    Attributes
    ----------
        d: Marginal-cost level the knapsack was built at
        cost: UC cost of the resulting commitment, +inf when infeasible
        feasible: Whether a feasible commitment was found at ``d``
        commitment: Commitment chosen at ``d``, if any
        refined: Whether the point came from scan refinement rather than the grid

    """

    d: float
    cost: float
    feasible: bool
    commitment: Optional[Commitment] = None
    refined: bool = False


@dataclass(eq=True, frozen=True)
class ScanResult:
    """Outcome of a marginal-cost scan.

    Attributes
    ----------
        best: Lowest-cost solution found
        best_d: Marginal-cost level that produced ``best``
        curve: Grid points in grid order
        refinements: Extra points visited by bisection and lambda refinement

    """

    best: UcSolution
    best_d: float
    curve: Tuple[ScanPoint, ...]
    refinements: Tuple[ScanPoint, ...] = ()


@dataclass(eq=False, frozen=True)
class SampleSet:
    """Multiset of measured bitstrings.

    Attributes
    ----------
        counts: Mapping from qubit-0-first bitstring to number of occurrences
        shots: Total number of shots, equal to the sum of counts

    """

    counts: Mapping[str, int]
    shots: int

    def __post_init__(self) -> None:
        """Check that counts add up to shots."""
        counts = {str(k): int(v) for k, v in self.counts.items()}
        if any(v < 0 for v in counts.values()):
            raise InvalidArgumentError("sample counts must be nonnegative")
        if sum(counts.values()) != self.shots:
            raise InvalidArgumentError(
                f"counts sum to {sum(counts.values())} but shots is {self.shots}"
            )
        object.__setattr__(self, "counts", dict(sorted(counts.items())))

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> SampleSet:
        """Build a sample set whose shot total is the sum of ``counts``."""
        return cls(dict(counts), sum(int(v) for v in counts.values()))

    def __eq__(self, other: object) -> bool:
        """Compare counts and shots."""
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.shots == other.shots and dict(self.counts) == dict(other.counts)

    __hash__ = None  # type: ignore[assignment]


@dataclass(eq=True, frozen=True)
class CopulaSpec:
    """Warm-start marginals and copula correlation.

    Attributes
    ----------
        probs: Per-qubit probability of measuring 1
        theta: Copula correlation parameter in [-1, 1]

    """

    probs: Tuple[float, ...]
    theta: float = -1.0

    def __post_init__(self) -> None:
        """Validate marginals and theta."""
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise InvalidArgumentError("copula marginals must lie in [0, 1]")
        if not -1.0 <= self.theta <= 1.0:
            raise InvalidArgumentError(f"theta must lie in [-1, 1], got {self.theta}")

    @property
    def n(self) -> int:
        """Number of qubits."""
        return len(self.probs)


@dataclass(eq=True, frozen=True)
class PairingScheme:
    """Qubit pairs the copula mixer acts on, grouped into sublayers.

    Attributes
    ----------
        sublayers: Tuple of sublayers, each a tuple of disjoint ``(i, j)`` pairs

    """

    sublayers: Tuple[Tuple[Tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        """Normalize pairs and check disjointness within sublayers."""
        normalized = tuple(
            tuple((int(i), int(j)) for i, j in sublayer) for sublayer in self.sublayers
        )
        object.__setattr__(self, "sublayers", normalized)
        for sublayer in normalized:
            seen: set = set()
            for i, j in sublayer:
                if i == j:
                    raise InvalidArgumentError(f"pair ({i}, {j}) repeats a qubit")
                if i in seen or j in seen:
                    raise InvalidArgumentError(
                        f"qubit appears twice in sublayer {list(sublayer)}"
                    )
                seen.update((i, j))

    @classmethod
    def ring(cls, n: int) -> PairingScheme:
        """Ring coupling: even pairs, then odd pairs closing with ``(n-1, 0)``.

        For odd ``n`` the closing pair would share qubit 0 with the even
        sublayer and qubit ``n-1`` with the odd one, so it gets a third
        sublayer of its own.
        """
        if n < 1:
            raise InvalidArgumentError(f"pairing needs n >= 1, got {n}")
        even = tuple((i, i + 1) for i in range(0, n - 1, 2))
        odd = tuple((i, i + 1) for i in range(1, n - 1, 2))
        sublayers: List[Tuple[Tuple[int, int], ...]] = [even, odd]
        if n > 2:
            if n % 2 == 0:
                sublayers[1] = odd + ((n - 1, 0),)
            else:
                sublayers.append(((n - 1, 0),))
        return cls(tuple(s for s in sublayers if s))

    @property
    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        """All pairs flattened in application order."""
        return tuple(pair for sublayer in self.sublayers for pair in sublayer)

    def validate(self, n: int) -> None:
        """Raise if any pair references a qubit outside ``range(n)``."""
        for i, j in self.pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidArgumentError(f"pair ({i}, {j}) out of range for {n} qubits")

    def to_list(self) -> List[List[List[int]]]:
        """JSON-friendly nested lists."""
        return [[[i, j] for i, j in sublayer] for sublayer in self.sublayers]


@dataclass(eq=True, frozen=True)
class QaoaParams:
    """Per-layer variational angles.

    Attributes
    ----------
        gammas: Cost-layer angles, one per layer
        betas: Mixer angles, one per layer

    """

    gammas: Tuple[float, ...] = ()
    betas: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """Check that both schedules have the same depth."""
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas):
            raise InvalidArgumentError(
                f"{len(self.gammas)} gammas but {len(self.betas)} betas"
            )

    @property
    def depth(self) -> int:
        """Number of layers p."""
        return len(self.gammas)

    def with_layer(self, gamma: float, beta: float) -> QaoaParams:
        """Return a copy with one more layer appended."""
        return QaoaParams(self.gammas + (float(gamma),), self.betas + (float(beta),))

    def layers(self) -> List[Tuple[float, float]]:
        """Return ``(gamma, beta)`` pairs in application order."""
        return list(zip(self.gammas, self.betas))


@dataclass(eq=True, frozen=True)
class TrainConfig:
    """Layer-wise training settings.

    Attributes
    ----------
        restarts: Independent optimizations per layer; restart 0 starts at (0, 0)
        shots_per_eval: Shots per objective evaluation in sampled mode
        optimizer_budget: Maximum objective evaluations per restart
        seed: Root seed; restart and sampling seeds are derived from it
        gamma_range: Closed interval for gamma starts; None scales it to pi / max|v|
        beta_range: Closed interval for beta starts
        objective_mode: ``"auto"``, ``"exact"`` or ``"sampled"``
        exact_qubit_limit: Largest n evaluated exactly when mode is ``"auto"``

    """

    restarts: int = 20
    shots_per_eval: int = 10_000
    optimizer_budget: int = 60
    seed: int = 0
    gamma_range: Optional[Tuple[float, float]] = None
    beta_range: Tuple[float, float] = (0.0, math.pi)
    objective_mode: str = "auto"
    exact_qubit_limit: int = 18

    def __post_init__(self) -> None:
        """Validate budgets, ranges and mode."""
        if self.restarts < 1 or self.shots_per_eval < 1 or self.optimizer_budget < 1:
            raise InvalidArgumentError("restarts, shots_per_eval and optimizer_budget must be >= 1")
        for name in ("gamma_range", "beta_range"):
            interval = getattr(self, name)
            if interval is None:
                continue
            low, high = interval
            if not high > low:
                raise InvalidArgumentError(f"{name} must be non-degenerate, got {interval}")
            object.__setattr__(self, name, (float(low), float(high)))
        if self.objective_mode not in ("auto", "exact", "sampled"):
            raise InvalidArgumentError(f"unknown objective mode {self.objective_mode!r}")

    def resolved_gamma_range(self, values: Sequence[float]) -> Tuple[float, float]:
        """Gamma interval, defaulting to [0, pi / max|v|]."""
        if self.gamma_range is not None:
            return self.gamma_range
        scale = max((abs(v) for v in values), default=0.0)
        return (0.0, math.pi / scale if scale > 0 else math.pi)


@dataclass(eq=True, frozen=True)
class LayerRecord:
    """Training outcome of one depth.

    Attributes
    ----------
        depth: Layer number, starting at 1
        gamma: Chosen gamma for this layer
        beta: Chosen beta for this layer
        objective: Objective of the chosen restart
        best_value: Best feasible value observed at the chosen parameters
        valid_ratio: Fraction of feasible probability mass or shots
        history: Best-so-far objective per evaluation of the chosen restart
        restart: Index of the winning restart; 0 is the (0, 0) start
        frozen: Parameters of all earlier layers, unchanged from the previous depth
        approximation_ratio: Feasible mean value over C*, None when nothing feasible was seen
        best_ratios: best_value divided by each baseline value

    """

    depth: int
    gamma: float
    beta: float
    objective: float
    best_value: float
    valid_ratio: float
    history: Tuple[float, ...]
    restart: int
    frozen: QaoaParams
    approximation_ratio: Optional[float] = None
    best_ratios: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly representation."""
        return {
            "depth": self.depth,
            "gamma": self.gamma,
            "beta": self.beta,
            "objective": self.objective,
            "best_value": self.best_value,
            "valid_ratio": self.valid_ratio,
            "approximation_ratio": self.approximation_ratio,
            "best_ratios": dict(sorted(self.best_ratios.items())),
            "history": list(self.history),
            "restart": self.restart,
            "frozen_gammas": list(self.frozen.gammas),
            "frozen_betas": list(self.frozen.betas),
        }


@dataclass(eq=True, frozen=True)
class DepthQuality:
    """Quality of the circuit state at one depth.

    Attributes
    ----------
        objective: Feasibility-masked mean value
        best_value: Best feasible value observed, 0 when nothing feasible was seen
        valid_ratio: Fraction of feasible probability mass or shots
        approximation_ratio: Feasible mean value over C*, None when nothing feasible was seen
        best_ratios: best_value divided by each positive baseline value

    """

    objective: float
    best_value: float
    valid_ratio: float
    approximation_ratio: Optional[float] = None
    best_ratios: Dict[str, float] = field(default_factory=dict)


@dataclass(eq=True, frozen=True)
class TrainTrace:
    """Per-depth record of a layer-wise training run.

    Attributes
    ----------
        baseline_objective: Objective of the depth-0 warm-start state
        layers: One record per trained depth
        objective_mode: ``"exact"`` or ``"sampled"``
        baseline: Quality of the depth-0 state, when measured
        c_star: Optimum the approximation ratios divide by
        baselines: Reference value per method name behind the best ratios

    """

    baseline_objective: float
    layers: Tuple[LayerRecord, ...] = ()
    objective_mode: str = "exact"
    baseline: Optional[DepthQuality] = None
    c_star: Optional[float] = None
    baselines: Dict[str, float] = field(default_factory=dict)

    def depth_rows(self) -> List[Dict[str, Any]]:
        """One row per depth from 0, with the ratios flattened to ``best_ratio_<method>``."""
        rows: List[Dict[str, Any]] = []
        if self.baseline is not None:
            rows.append(
                _depth_row(
                    0,
                    self.baseline.objective,
                    self.baseline.best_value,
                    self.baseline.valid_ratio,
                    self.baseline.approximation_ratio,
                    self.baseline.best_ratios,
                )
            )
        for layer in self.layers:
            rows.append(
                _depth_row(
                    layer.depth,
                    layer.objective,
                    layer.best_value,
                    layer.valid_ratio,
                    layer.approximation_ratio,
                    layer.best_ratios,
                )
            )
        return rows

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly representation."""
        data: Dict[str, Any] = {
            "baseline_objective": self.baseline_objective,
            "objective_mode": self.objective_mode,
            "layers": [layer.to_dict() for layer in self.layers],
            "c_star": self.c_star,
            "baselines": dict(sorted(self.baselines.items())),
        }
        if self.baseline is not None:
            data["baseline"] = {
                "best_value": self.baseline.best_value,
                "valid_ratio": self.baseline.valid_ratio,
                "approximation_ratio": self.baseline.approximation_ratio,
                "best_ratios": dict(sorted(self.baseline.best_ratios.items())),
            }
        return data


def _depth_row(
    depth: int,
    objective: float,
    best_value: float,
    valid_ratio: float,
    approximation_ratio: Optional[float],
    best_ratios: Mapping[str, float],
) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "depth": depth,
        "objective": objective,
        "best_value": best_value,
        "valid_ratio": valid_ratio,
        "approximation_ratio": approximation_ratio,
    }
    for method, ratio in sorted(best_ratios.items()):
        row[f"best_ratio_{method}"] = ratio
    return row


@dataclass(eq=True, frozen=True)
class GridCell:
    """Measurements of one (gamma, beta) point at depth 1.

    Attributes
    ----------
        gamma: Cost-layer angle
        beta: Mixer angle
        best_value: Best feasible value observed, 0 when nothing feasible was seen
        mean_objective: Mean feasibility-masked value
        valid_ratio: Fraction of feasible shots or probability mass

    """

    gamma: float
    beta: float
    best_value: float
    mean_objective: float
    valid_ratio: float


@dataclass(eq=True, frozen=True)
class GridSearchResult:
    """Depth-1 parameter landscape.

    Attributes
    ----------
        gammas: Gamma axis values
        betas: Beta axis values
        cells: Row-major cells, gamma index major
        baseline_value: Best observed value of the (0, 0) circuit
        argmax: Cell with the highest best value (smallest gamma, then beta, on ties)

    """

    gammas: Tuple[float, ...]
    betas: Tuple[float, ...]
    cells: Tuple[GridCell, ...]
    baseline_value: float
    argmax: GridCell

    def cell(self, gamma_index: int, beta_index: int) -> GridCell:
        """Return the cell at the given axis indices."""
        return self.cells[gamma_index * len(self.betas) + beta_index]

    def best_value_grid(self) -> List[List[float]]:
        """Best-observed values as a |gammas| x |betas| nested list."""
        return [
            [self.cell(g, b).best_value for b in range(len(self.betas))]
            for g in range(len(self.gammas))
        ]

    def mean_objective_grid(self) -> List[List[float]]:
        """Mean objectives as a |gammas| x |betas| nested list."""
        return [
            [self.cell(g, b).mean_objective for b in range(len(self.betas))]
            for g in range(len(self.gammas))
        ]

    @property
    def red_dots(self) -> Tuple[GridCell, ...]:
        """Cells whose best value strictly exceeds the (0, 0) baseline."""
        return tuple(c for c in self.cells if c.best_value > self.baseline_value)


@dataclass(eq=True, frozen=True)
class MetricsReport:
    """Quality metrics of a sample set.

    Attributes
    ----------
        best_value: Best feasible value among the samples
        best_bitstring: Bitstring achieving ``best_value``
        approximation_ratio: Feasible count-weighted mean value over C*
        valid_ratio: Feasible shots over all shots
        top_k_used: Top-k cutoff applied to the approximation ratio, if any
        baselines: Reference value per method name
        best_ratios: best_value divided by each baseline
        top_k_rule: Description of the top-k selection rule

    """

    best_value: float
    best_bitstring: str
    approximation_ratio: float
    valid_ratio: float
    top_k_used: Optional[int] = None
    baselines: Dict[str, float] = field(default_factory=dict)
    best_ratios: Dict[str, float] = field(default_factory=dict)
    top_k_rule: str = "highest-value feasible shots, with multiplicity"

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly representation."""
        return {
            "best_value": self.best_value,
            "best_bitstring": self.best_bitstring,
            "approximation_ratio": self.approximation_ratio,
            "valid_ratio": self.valid_ratio,
            "top_k_used": self.top_k_used,
            "top_k_rule": self.top_k_rule,
            "baselines": dict(sorted(self.baselines.items())),
            "best_ratios": dict(sorted(self.best_ratios.items())),
        }
