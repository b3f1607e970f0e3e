"""Tests for batch sweeps and the detection-rate analysis."""

import csv

import pytest

from src.config import ScenarioConfig, TopologyConfig
from src.models import Mode, SweepRow
from src.simulator.sweep import (
    DEFAULT_VARIANTS,
    DETECT_RATE_COLUMNS,
    SWEEP_COLUMNS,
    SweepCallbacks,
    Variant,
    attack_gap,
    detect_rate_rows,
    scenario_for,
    seed_range,
    summarize,
    summarize_detect_rate,
    sweep,
    write_detect_rate_csv,
    write_sweep_csv,
)


def small_base(**updates) -> ScenarioConfig:
    data = {
        "simulation": {"duration_s": 120.0},
        "topology": {"area_side_m": 100.0},
        "traffic": {"start_s": 30.0, "period_s": 30.0},
        "attacker": {"start_time_s": 40.0, "increment_period_s": 30.0},
    }
    data.update(updates)
    return ScenarioConfig(**data)


class TestVariant:
    """Sweep column syntax"""

    def test_parse(self):
        assert Variant.parse("storing:baseline") == Variant(Mode.STORING, False, 0)
        assert Variant.parse("non_storing:attack:2") == Variant(Mode.NON_STORING, True, 2)

    def test_str(self):
        assert str(Variant(Mode.NON_STORING, True, 1)) == "non_storing:attack:1"
        assert Variant.parse(str(Variant(Mode.STORING, True, 2))) == Variant(Mode.STORING, True, 2)

    @pytest.mark.parametrize("text", ["storing", "storing:maybe", "meshed:attack", "storing:attack:-1", "a:b:c:d"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            Variant.parse(text)

    def test_defaults_cover_both_modes(self):
        assert {(v.mode, v.attack) for v in DEFAULT_VARIANTS} == {
            (Mode.STORING, False),
            (Mode.STORING, True),
            (Mode.NON_STORING, False),
            (Mode.NON_STORING, True),
        }


class TestScenarioFor:
    def test_cell_overrides(self):
        base = small_base(attacker={"node": 3, "enabled": False}, topology={"layout_file": "x.txt"})
        cell = scenario_for(base, 25, 7, Variant(Mode.STORING, True, 2))
        assert cell.topology.n_nodes == 25
        assert cell.topology.seed == 7
        assert cell.simulation.seed == 7
        assert cell.topology.layout_file is None
        assert cell.attacker.enabled
        assert cell.attacker.node is None
        assert cell.detection.enabled
        assert cell.effective_k == 2
        assert cell.simulation.mode == Mode.STORING

    def test_k_zero_disables_detection(self):
        cell = scenario_for(small_base(), 20, 1, Variant(Mode.NON_STORING, False))
        assert not cell.detection.enabled

    def test_seed_range(self):
        assert seed_range(small_base(topology={"seed": 5}), 3) == [5, 6, 7]


class TestSweep:
    """Cross product of sizes, seeds and variants"""

    variants = [Variant(Mode.NON_STORING, False), Variant(Mode.NON_STORING, True)]

    def test_rows_in_job_order(self):
        seen: list[SweepRow] = []
        rows = sweep(small_base(), [10], 2, self.variants, callbacks=SweepCallbacks(on_row=seen.append))
        assert [(r.n, r.seed, r.attack) for r in rows] == [
            (10, 1, False),
            (10, 1, True),
            (10, 2, False),
            (10, 2, True),
        ]
        assert seen == rows
        assert all(r.error_reason is None for r in rows)
        assert all(r.dao_overhead > 0 for r in rows)
        assert all(r.detected is False for r in rows)

    def test_parallel_matches_serial(self):
        serial = sweep(small_base(), [10], 2, self.variants, workers=1)
        parallel = sweep(small_base(), [10], 2, self.variants, workers=2)
        assert serial == parallel

    def test_disconnected_layout_becomes_error_row(self):
        base = small_base(topology={"area_side_m": 10_000.0, "max_attempts": 2})
        rows = sweep(base, [10], 1, self.variants)
        assert len(rows) == 2
        assert all(r.error_reason.startswith("TOPOLOGY_DISCONNECTED") for r in rows)
        assert all(r.dao_overhead is None for r in rows)

    def test_csv(self, tmp_path):
        rows = sweep(small_base(), [10], 1, self.variants)
        rows.append(SweepRow(mode=Mode.STORING, n=10, seed=9, attack=False, k=0, error_reason="RUNTIME_ERROR: x"))
        path = tmp_path / "sweep.csv"
        write_sweep_csv(rows, path)
        with open(path) as f:
            records = list(csv.reader(f))
        assert records[0] == SWEEP_COLUMNS
        assert len(records) == 4
        assert records[1][0] == "non_storing"
        assert records[3][SWEEP_COLUMNS.index("dao_overhead")] == ""
        assert records[3][-1] == "RUNTIME_ERROR: x"


class TestSummaries:
    """Seed averages and attack gaps"""

    def rows(self) -> list[SweepRow]:
        def row(seed, attack, overhead):
            return SweepRow(
                mode=Mode.NON_STORING,
                n=20,
                seed=seed,
                attack=attack,
                k=0,
                dao_overhead=overhead,
                avg_power_mw=0.1,
                packet_loss_ratio=0.0,
                avg_latency_s=None,
                detected=False,
            )

        return [
            row(1, False, 10),
            row(2, False, 20),
            row(1, True, 100),
            row(2, True, 140),
            SweepRow(mode=Mode.NON_STORING, n=20, seed=3, attack=True, k=0, error_reason="RUNTIME_ERROR: x"),
        ]

    def test_means_skip_failed_runs(self):
        summary = summarize(self.rows())
        attacked = summary[summary["attack"]].iloc[0]
        assert attacked["runs"] == 2
        assert attacked["dao_overhead"] == pytest.approx(120.0)
        baseline = summary[~summary["attack"]].iloc[0]
        assert baseline["dao_overhead"] == pytest.approx(15.0)

    def test_attack_gap(self):
        gap = attack_gap(summarize(self.rows()))
        assert list(gap["gap"]) == [pytest.approx(105.0)]

    def test_empty(self):
        summary = summarize([])
        assert summary.empty
        assert "dao_overhead" in summary.columns


class TestDetectRate:
    """Pure graph analysis over random layouts"""

    def test_rows(self):
        rows = detect_rate_rows(TopologyConfig(), [20], [0, 1, 2], [1, 2])
        assert [(r.n, r.seed, r.k) for r in rows] == [
            (20, 1, 0),
            (20, 1, 1),
            (20, 1, 2),
            (20, 2, 0),
            (20, 2, 1),
            (20, 2, 2),
        ]
        for seed in (1, 2):
            rates = [r.detection_rate for r in rows if r.seed == seed]
            assert rates == sorted(rates)
            assert rates[0] == 0.0

    def test_sparse_layout(self):
        params = TopologyConfig(area_side_m=10_000.0, max_attempts=2)
        rows = detect_rate_rows(params, [10], [0, 1], [1])
        assert len(rows) == 2
        assert all(r.error_reason.startswith("TOPOLOGY_DISCONNECTED") for r in rows)

    def test_summary_and_csv(self, tmp_path):
        rows = detect_rate_rows(TopologyConfig(), [20], [0, 2], [1, 2, 3])
        summary = summarize_detect_rate(rows)
        assert list(summary["topologies"]) == [3, 3]
        assert summary.iloc[0]["detection_rate"] == 0.0

        path = tmp_path / "rate.csv"
        write_detect_rate_csv(rows, path)
        with open(path) as f:
            header = f.readline().strip().split(",")
        assert header == DETECT_RATE_COLUMNS

    def test_storing_rows_carry_mode(self):
        storing = detect_rate_rows(TopologyConfig(), [30], [2], [1, 2, 3], mode=Mode.STORING)
        non_storing = detect_rate_rows(TopologyConfig(), [30], [2], [1, 2, 3])
        assert all(r.mode == Mode.STORING for r in storing)
        assert all(r.mode == Mode.NON_STORING for r in non_storing)
        for s, ns in zip(storing, non_storing):
            assert s.detection_rate <= ns.detection_rate
        assert list(summarize_detect_rate(storing)["mode"]) == ["storing"]


class TestDetectRateCeiling:
    """Detection rate reached under hop-count ranks with lowest-id tie-breaks"""

    SIZES = [20, 30, 40, 50]

    @pytest.fixture(scope="class")
    def summary(self):
        rows = detect_rate_rows(TopologyConfig(), self.SIZES, [0, 2, 50], range(1, 11))
        return summarize_detect_rate(rows)

    def means(self, summary, k):
        return list(summary[summary["k"] == k].sort_values("n")["detection_rate"])

    def test_measured_k2(self, summary):
        assert self.means(summary, 2) == pytest.approx([0.2007, 0.2853, 0.4560, 0.6278], abs=1e-3)

    def test_no_spare_parents(self, summary):
        assert self.means(summary, 0) == [0.0] * len(self.SIZES)

    def test_unbounded_k_stays_below_full_detection(self, summary):
        unbounded = self.means(summary, 50)
        assert all(u >= r for u, r in zip(unbounded, self.means(summary, 2)))
        assert all(u < 0.95 for u in unbounded)
        assert unbounded == sorted(unbounded)


class TestAttackImpact:
    """Attack against baseline on matched layouts, attacker with the largest sub-DODAG"""

    SIZES = [20, 40]

    @pytest.fixture(scope="class")
    def rows(self):
        base = ScenarioConfig(
            simulation={"duration_s": 600.0},
            attacker={"selection": "max_descendants"},
        )
        return sweep(base, self.SIZES, 3, DEFAULT_VARIANTS)

    def test_all_runs_succeed(self, rows):
        assert len(rows) == len(self.SIZES) * 3 * len(DEFAULT_VARIANTS)
        assert all(r.error_reason is None for r in rows)

    @pytest.mark.parametrize("mode", [Mode.STORING, Mode.NON_STORING])
    def test_attack_raises_dao_overhead_per_layout(self, rows, mode):
        cells = {(r.n, r.seed, r.attack): r for r in rows if r.mode == mode}
        for (n, seed, attack), row in cells.items():
            if attack:
                assert row.dao_overhead > cells[(n, seed, False)].dao_overhead, (n, seed)

    def test_non_storing_costs_more_under_attack(self, rows):
        summary = summarize(rows)
        for n in self.SIZES:
            at_n = summary[(summary["n"] == n) & summary["attack"]].set_index("mode")
            assert at_n.loc["non_storing", "dao_overhead"] > at_n.loc["storing", "dao_overhead"]

    def test_power_gap_larger_in_non_storing(self, rows):
        gap = attack_gap(summarize(rows), "avg_power_mw").set_index(["mode", "n"])["gap"]
        for n in self.SIZES:
            assert gap[("storing", n)] > 0
            assert gap[("non_storing", n)] > gap[("storing", n)]
