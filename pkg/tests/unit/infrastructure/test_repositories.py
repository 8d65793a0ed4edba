"""Unit tests for file formats and run directories in copula_qaoa.infrastructure.repositories."""

import math

import pytest

from copula_qaoa.domain.entities import (
    DepthQuality,
    GridCell,
    GridSearchResult,
    KnapsackInstance,
    LayerRecord,
    QaoaParams,
    SampleSet,
    ScanPoint,
    TrainTrace,
)
from copula_qaoa.domain.errors import InstanceParseError, InvalidArgumentError
from copula_qaoa.infrastructure.repositories import (
    RunDirectory,
    dump_json,
    format_number,
    instance_from_json,
    instance_to_json,
    load_depth_metrics,
    load_heatmap_csv,
    load_instance,
    load_samples,
    load_scan,
    load_uc,
    parse_instance,
    parse_uc,
    save_depth_metrics,
    save_heatmap_csv,
    save_samples,
    save_scan,
    serialize_instance,
)


class TestInstanceFormat:
    """Tests for the knapsack text format."""

    def test_parse(self):
        """Header, rows, comments and the id line are understood."""
        text = "# id: toy\n# a comment\n3 50\n60 10\n\n100 20\n120 30\n"
        instance = parse_instance(text)
        assert instance.instance_id == "toy"
        assert instance.capacity == 50.0
        assert instance.values == (60.0, 100.0, 120.0)

    def test_serialize(self, classic_instance):
        """Integral numbers are written without a decimal point."""
        expected = "# id: classic\n3 50\n60 10\n100 20\n120 30\n"
        assert serialize_instance(classic_instance) == expected

    def test_real_numbers_survive(self, tmp_path):
        """Real values are written with full precision."""
        instance = KnapsackInstance.from_pairs([(0.1, 0.7), (1 / 3, 2.5)], 2.9, "real")
        path = tmp_path / "real.txt"
        path.write_text(serialize_instance(instance), encoding="utf-8")
        assert load_instance(path) == instance

    def test_default_id_is_file_stem(self, tmp_path):
        """Files without an id line are named after the file."""
        path = tmp_path / "bare.txt"
        path.write_text("1 5\n3 2\n", encoding="utf-8")
        assert load_instance(path).instance_id == "bare"

    def test_id_line_is_optional_metadata(self, tmp_path, classic_instance):
        """Dropping the id line changes only the id; an empty label falls back too."""
        path = tmp_path / "renamed.txt"
        body = serialize_instance(classic_instance).split("\n", 1)[1]
        path.write_text(body, encoding="utf-8")
        loaded = load_instance(path)
        assert loaded.items == classic_instance.items
        assert loaded.capacity == classic_instance.capacity
        assert loaded.instance_id == "renamed"
        assert parse_instance("# id:\n" + body, default_id="x").instance_id == "x"

    @pytest.mark.parametrize(
        ("text", "line", "field"),
        [
            ("2 50\n60 10\n", 2, None),
            ("1 50\n60 -10\n", 2, "weight"),
            ("1 50\n60 abc\n", 2, "weight"),
            ("1 0\n60 10\n", 1, "capacity"),
            ("1 50\n60 10 5\n", 2, None),
            ("x 50\n60 10\n", 1, "n"),
            ("# only a comment\n", 1, "n"),
        ],
    )
    def test_parse_errors(self, text, line, field):
        """Errors carry the offending line and field."""
        with pytest.raises(InstanceParseError) as info:
            parse_instance(text)
        assert info.value.line == line
        assert info.value.field == field

    def test_json_mirror(self, classic_instance):
        """The JSON mirror holds the same instance."""
        assert instance_from_json(instance_to_json(classic_instance)) == classic_instance
        with pytest.raises(InvalidArgumentError):
            instance_from_json({"capacity": 5})

    @pytest.mark.parametrize(("x", "text"), [(50.0, "50"), (0.1, "0.1"), (-3.0, "-3")])
    def test_format_number(self, x, text):
        """Numbers print in their shortest exact form."""
        assert format_number(x) == text


class TestUcFormat:
    """Tests for the unit-commitment text format."""

    def test_round_trip(self, uc_file, uc_instance):
        """A saved instance loads back unchanged."""
        assert load_uc(uc_file) == uc_instance

    def test_id_line_is_optional(self, uc_file, uc_instance):
        """Without the id line the units survive and the default id is used."""
        body = uc_file.read_text(encoding="utf-8").split("\n", 1)[1]
        parsed = parse_uc(body, default_id="plain")
        assert parsed.units == uc_instance.units
        assert parsed.instance_id == "plain"

    def test_invalid_unit(self):
        """Unit validation failures point at the unit's line."""
        with pytest.raises(InstanceParseError) as info:
            parse_uc("1 10\n10 1 0 5 20\n")
        assert info.value.line == 2

    def test_load_over_capacity(self):
        """A load above the total maximum output points at the header."""
        with pytest.raises(InstanceParseError) as info:
            parse_uc("1 30\n10 1 0.1 5 20\n")
        assert info.value.line == 1
        assert info.value.field == "L"


class TestCsvArtifacts:
    """Tests for samples, scan and heatmap CSV files."""

    def test_samples(self, tmp_path):
        """Bitstrings keep their leading zeros."""
        samples = SampleSet.from_counts({"001": 4, "010": 1, "100": 2})
        path = tmp_path / "samples.csv"
        save_samples(samples, path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "bitstring,count"
        assert load_samples(path) == samples

    def test_scan(self, tmp_path):
        """Infeasible points come back with infinite cost."""
        points = [ScanPoint(1.0, 10.5, True), ScanPoint(2.0, math.inf, False)]
        path = tmp_path / "scan.csv"
        save_scan(points, path)
        frame = load_scan(path)
        assert list(frame.columns) == ["D", "cost", "feasible"]
        assert frame["cost"][0] == 10.5
        assert math.isinf(frame["cost"][1])
        assert frame["feasible"].tolist() == [True, False]

    def test_heatmap(self, tmp_path):
        """Cells are written gamma-major."""
        cells = (GridCell(0.0, 0.0, 1.0, 0.5, 0.9), GridCell(0.0, 1.0, 2.0, 0.7, 0.8))
        result = GridSearchResult((0.0,), (0.0, 1.0), cells, 1.0, cells[1])
        path = tmp_path / "heatmap.csv"
        save_heatmap_csv(result, path)
        frame = load_heatmap_csv(path)
        assert frame["beta"].tolist() == [0.0, 1.0]
        assert frame["best_value"].tolist() == [1.0, 2.0]


    def test_depth_metrics(self, tmp_path):
        """Depth 0 comes first; each baseline gets a ratio column and missing ratios are NaN."""
        layer = LayerRecord(
            depth=1,
            gamma=0.1,
            beta=0.2,
            objective=3.0,
            best_value=9.0,
            valid_ratio=0.5,
            history=(3.0,),
            restart=0,
            frozen=QaoaParams(),
            best_ratios={"greedy": 1.5, "dp": 0.9},
        )
        baseline = DepthQuality(2.0, 6.0, 0.4, 0.5, {"greedy": 1.0, "dp": 0.6})
        trace = TrainTrace(2.0, (layer,), "exact", baseline, 10.0, {"greedy": 6.0, "dp": 10.0})
        path = tmp_path / "depth_metrics.csv"
        save_depth_metrics(trace, path)
        frame = load_depth_metrics(path)
        assert list(frame.columns) == [
            "depth",
            "objective",
            "best_value",
            "valid_ratio",
            "approximation_ratio",
            "best_ratio_dp",
            "best_ratio_greedy",
        ]
        assert frame["depth"].tolist() == [0, 1]
        assert frame["best_ratio_greedy"].tolist() == [1.0, 1.5]
        assert frame["approximation_ratio"][0] == 0.5
        assert math.isnan(frame["approximation_ratio"][1])

class TestRunDirectory:
    """Tests for the RunDirectory class."""

    def test_write_and_list(self, tmp_path):
        """Artifacts are written under fixed names and listed sorted."""
        run = RunDirectory(tmp_path / "nested" / "run")
        run.write_json(RunDirectory.METRICS, {"b": 1, "a": 2})
        run.write(RunDirectory.SAMPLES, save_samples, SampleSet.from_counts({"1": 1}))
        assert run.listing() == ["metrics.json", "samples.csv"]
        assert run.read_json(RunDirectory.METRICS) == {"a": 2, "b": 1}
        assert run.exists(RunDirectory.SAMPLES)
        assert not run.exists(RunDirectory.TRACE)

    def test_json_is_deterministic(self):
        """Keys are sorted and the text ends with a newline."""
        assert dump_json({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
