"""Persistence of instances and run artifacts.

Knapsack and unit-commitment instances use a line-oriented text format;
samples, heatmaps and scan curves are CSV files written through pandas;
metrics, traces and manifests are JSON with sorted keys so that reruns are
byte-identical.

Both text formats carry the instance id only in an optional ``# id: <label>``
comment line. Files without one get their file stem as id. The id is part of
the seed path of per-instance solvers, so renaming a file without an id line
changes their draws.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Sequence, Tuple, Union

import pandas as pd

from copula_qaoa.domain.entities import (
    GridSearchResult,
    Item,
    KnapsackInstance,
    SampleSet,
    ScanPoint,
    TrainTrace,
    UcInstance,
    UcUnit,
)
from copula_qaoa.domain.errors import InstanceParseError, InvalidArgumentError

PathLike = Union[str, Path]

ID_PREFIX = "# id:"
DEPTH_COLUMNS = ("depth", "objective", "best_value", "valid_ratio", "approximation_ratio")


def format_number(x: float) -> str:
    """Shortest text that parses back to exactly ``x``; integral values print as integers."""
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return repr(x)


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _read_id(text: str, default: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(ID_PREFIX):
            return line[len(ID_PREFIX) :].strip() or default
    return default


def _parse_float(token: str, line: int, field: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InstanceParseError(f"not a number: {token!r}", line, field) from None
    if not math.isfinite(value):
        raise InstanceParseError(f"not a finite number: {token!r}", line, field)
    return value


def _parse_count(token: str, line: int) -> int:
    try:
        count = int(token)
    except ValueError:
        raise InstanceParseError(f"not an integer: {token!r}", line, "n") from None
    if count < 1:
        raise InstanceParseError(f"n must be >= 1, got {count}", line, "n")
    return count


def _split_rows(
    text: str, header_fields: Sequence[str], row_fields: Sequence[str]
) -> Tuple[Tuple[int, List[str]], List[Tuple[int, List[str]]]]:
    lines = list(_content_lines(text))
    if not lines:
        raise InstanceParseError("empty instance file", 1, header_fields[0])
    rows = []
    for number, line in lines:
        tokens = line.split()
        expected = header_fields if not rows else row_fields
        if len(tokens) != len(expected):
            raise InstanceParseError(
                f"expected {len(expected)} fields ({' '.join(expected)}), got {len(tokens)}",
                number,
            )
        rows.append((number, tokens))
    header, body = rows[0], rows[1:]
    count = _parse_count(header[1][0], header[0])
    if len(body) != count:
        last = body[-1][0] if body else header[0]
        raise InstanceParseError(f"header declares {count} rows, found {len(body)}", last)
    return header, body


def serialize_instance(instance: KnapsackInstance) -> str:
    """Render a knapsack instance in the text format."""
    lines = [f"{ID_PREFIX} {instance.instance_id}"] if instance.instance_id else []
    lines.append(f"{instance.n} {format_number(instance.capacity)}")
    lines.extend(f"{format_number(i.value)} {format_number(i.weight)}" for i in instance.items)
    return "\n".join(lines) + "\n"


def parse_instance(text: str, default_id: str = "instance") -> KnapsackInstance:
    """Parse the knapsack text format.

    Line 1 holds ``n capacity``, followed by ``n`` lines of ``value weight``.
    Lines starting with ``#`` are comments; an optional ``# id: <label>``
    sets the id, otherwise ``default_id`` is used.

    Raises
    ------
        InstanceParseError: On malformed input, capacity <= 0 or weight <= 0

    """
    (header_line, header), body = _split_rows(text, ("n", "capacity"), ("value", "weight"))
    capacity = _parse_float(header[1], header_line, "capacity")
    if capacity <= 0:
        raise InstanceParseError(f"capacity must be > 0, got {capacity}", header_line, "capacity")
    items = []
    for number, (value_token, weight_token) in body:
        value = _parse_float(value_token, number, "value")
        weight = _parse_float(weight_token, number, "weight")
        if value < 0:
            raise InstanceParseError(f"value must be >= 0, got {value}", number, "value")
        if weight <= 0:
            raise InstanceParseError(f"weight must be > 0, got {weight}", number, "weight")
        items.append(Item(value, weight))
    return KnapsackInstance(tuple(items), capacity, _read_id(text, default_id))


def save_instance(instance: KnapsackInstance, path: PathLike) -> None:
    """Write ``instance`` to ``path`` in the text format."""
    Path(path).write_text(serialize_instance(instance), encoding="utf-8")


def load_instance(path: PathLike) -> KnapsackInstance:
    """Read a knapsack instance written by :func:`save_instance`."""
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), default_id=path.stem)


def instance_to_json(instance: KnapsackInstance) -> Dict[str, Any]:
    """JSON mirror of the text format."""
    return {
        "id": instance.instance_id,
        "capacity": instance.capacity,
        "items": [{"v": item.value, "w": item.weight} for item in instance.items],
    }


def instance_from_json(data: Dict[str, Any]) -> KnapsackInstance:
    """Inverse of :func:`instance_to_json`."""
    try:
        items = tuple(Item(float(entry["v"]), float(entry["w"])) for entry in data["items"])
        return KnapsackInstance(items, float(data["capacity"]), str(data.get("id", "instance")))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed instance JSON: {exc}") from exc


def serialize_uc(uc: UcInstance) -> str:
    """Render a unit-commitment instance in the text format."""
    lines = [f"{ID_PREFIX} {uc.instance_id}"] if uc.instance_id else []
    lines.append(f"{uc.n} {format_number(uc.load)}")
    for u in uc.units:
        fields = (u.commit_cost, u.linear_cost, u.quadratic_cost, u.p_min, u.p_max)
        lines.append(" ".join(format_number(x) for x in fields))
    return "\n".join(lines) + "\n"


def parse_uc(text: str, default_id: str = "uc") -> UcInstance:
    """Parse ``n L`` followed by ``n`` lines of ``A B C p_min p_max``."""
    row_fields = ("A", "B", "C", "p_min", "p_max")
    (header_line, header), body = _split_rows(text, ("n", "L"), row_fields)
    load = _parse_float(header[1], header_line, "L")
    units = []
    for number, tokens in body:
        numbers = [_parse_float(tok, number, name) for tok, name in zip(tokens, row_fields)]
        try:
            units.append(UcUnit(*numbers))
        except InvalidArgumentError as exc:
            raise InstanceParseError(str(exc), number) from exc
    try:
        return UcInstance(tuple(units), load, _read_id(text, default_id))
    except InvalidArgumentError as exc:
        raise InstanceParseError(str(exc), header_line, "L") from exc


def save_uc(uc: UcInstance, path: PathLike) -> None:
    """Write a unit-commitment instance to ``path``."""
    Path(path).write_text(serialize_uc(uc), encoding="utf-8")


def load_uc(path: PathLike) -> UcInstance:
    """Read a unit-commitment instance from ``path``."""
    path = Path(path)
    return parse_uc(path.read_text(encoding="utf-8"), default_id=path.stem)


def save_samples(samples: SampleSet, path: PathLike) -> None:
    """Write samples as CSV ``bitstring,count`` sorted by bitstring."""
    frame = pd.DataFrame(
        {"bitstring": list(samples.counts.keys()), "count": list(samples.counts.values())}
    )
    frame.to_csv(path, index=False)


def load_samples(path: PathLike) -> SampleSet:
    """Read samples written by :func:`save_samples`."""
    frame = pd.read_csv(path, dtype={"bitstring": str, "count": "int64"})
    return SampleSet.from_counts(dict(zip(frame["bitstring"], frame["count"].tolist())))


def save_scan(points: Sequence[ScanPoint], path: PathLike) -> None:
    """Write a marginal-cost scan as CSV ``D,cost,feasible``."""
    frame = pd.DataFrame(
        {
            "D": [p.d for p in points],
            "cost": [p.cost for p in points],
            "feasible": [p.feasible for p in points],
        }
    )
    frame.to_csv(path, index=False)


def load_scan(path: PathLike) -> pd.DataFrame:
    """Read a scan CSV; infeasible costs come back as +inf."""
    return pd.read_csv(path)


def save_heatmap_csv(result: GridSearchResult, path: PathLike) -> None:
    """Write grid cells as CSV ``gamma,beta,best_value,mean_objective,valid_ratio``."""
    frame = pd.DataFrame(
        [
            (c.gamma, c.beta, c.best_value, c.mean_objective, c.valid_ratio)
            for c in result.cells
        ],
        columns=["gamma", "beta", "best_value", "mean_objective", "valid_ratio"],
    )
    frame.to_csv(path, index=False)


def load_heatmap_csv(path: PathLike) -> pd.DataFrame:
    """Read a heatmap CSV written by :func:`save_heatmap_csv`."""
    return pd.read_csv(path)


def save_depth_metrics(trace: TrainTrace, path: PathLike) -> None:
    """Write per-depth quality as CSV, depth 0 first.

    Each baseline gets a ``best_ratio_<method>`` column.
    """
    rows = trace.depth_rows()
    extra = sorted({key for row in rows for key in row} - set(DEPTH_COLUMNS))
    frame = pd.DataFrame(rows, columns=list(DEPTH_COLUMNS) + extra)
    frame.to_csv(path, index=False)


def load_depth_metrics(path: PathLike) -> pd.DataFrame:
    """Read a per-depth CSV written by :func:`save_depth_metrics`; missing ratios are NaN."""
    return pd.read_csv(path)


def dump_json(data: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def save_json(data: Any, path: PathLike) -> None:
    """Write ``data`` as deterministic JSON."""
    Path(path).write_text(dump_json(data), encoding="utf-8")


def load_json(path: PathLike) -> Any:
    """Read a JSON file."""
    return json.loads(Path(path).read_text(encoding="utf-8"))


class RunDirectory:
    """Artifact repository of one run.

    Every run writes into its own directory; file names are fixed so that
    a replay into another directory can be compared file by file.

    Attributes
    ----------
        root: Directory holding the artifacts

    """

    INSTANCE = "instance.txt"
    UC_INSTANCE = "uc_instance.txt"
    SAMPLES = "samples.csv"
    METRICS = "metrics.json"
    SOLUTION = "solution.json"
    HEATMAP_CSV = "heatmap.csv"
    HEATMAP_SVG = "heatmap.svg"
    SCAN = "scan.csv"
    TRACE = "trace.json"
    DEPTH_METRICS = "depth_metrics.csv"
    CIRCUIT = "circuit.json"
    MANIFEST = "manifest.json"

    def __init__(self, root: PathLike):
        """Create the directory if needed."""
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        """Return the full path of artifact ``name``."""
        return self.root / name

    def exists(self, name: str) -> bool:
        """Whether artifact ``name`` has been written."""
        return self.path(name).exists()

    def write(self, name: str, writer: Callable[[Any, Path], None], payload: Any) -> Path:
        """Write ``payload`` with ``writer`` and return the artifact path."""
        target = self.path(name)
        writer(payload, target)
        return target

    def write_json(self, name: str, data: Any) -> Path:
        """Write deterministic JSON under ``name``."""
        return self.write(name, save_json, data)

    def read_json(self, name: str) -> Any:
        """Read JSON artifact ``name``."""
        return load_json(self.path(name))

    def listing(self) -> List[str]:
        """Names of the artifacts present, sorted."""
        return sorted(p.name for p in self.root.iterdir() if p.is_file())
