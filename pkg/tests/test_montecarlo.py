import io

import numpy as np
import pytest

from pitspec.bootstrap import StatisticSpec
from pitspec.errors import ConfigError
from pitspec.montecarlo import (
    DEFAULT_ALPHA1_GRID,
    ExperimentPlan,
    PowerTable,
    run_experiment,
)

STATS = (StatisticSpec.parse("d1cvm"), StatisticSpec.parse("adj01"))


def tiny_plan(**kwargs):
    base = dict(
        alpha1_grid=(0.0,),
        n_grid=(100,),
        reps=5,
        method="warp",
        seed=99,
        statistics=STATS,
        burnin=100,
    )
    base.update(kwargs)
    return ExperimentPlan(**base)


class TestPlan:
    def test_default_grid(self):
        assert DEFAULT_ALPHA1_GRID == (-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8)

    def test_validation(self):
        with pytest.raises(ConfigError):
            tiny_plan(reps=0)
        with pytest.raises(ConfigError):
            tiny_plan(alpha1_grid=())
        with pytest.raises(ConfigError):
            tiny_plan(method="pivot")
        with pytest.raises(ConfigError):
            tiny_plan(statistics=())

    def test_dgp_params(self):
        plan = tiny_plan()
        p = plan.dgp_params(-0.4)
        assert (p.ar1, p.var_const, p.arch, p.garch) == (-0.4, 0.1, 0.1, 0.8)

    def test_non_ar_dgp_rejects_feedback(self):
        plan = tiny_plan(dgp_model="garch11-n")
        assert plan.dgp_params(0.0).ar1 is None
        with pytest.raises(ConfigError):
            plan.dgp_params(0.4)


class TestRunExperiment:
    def test_csv_shape_and_header(self):
        table = run_experiment(tiny_plan())
        text = table.csv_text()
        lines = text.strip().split("\n")
        assert lines[0] == "alpha1,n,statistic,level,rate,reps,method,failures"
        # 1 cell x 2 statistics x 3 levels
        assert len(lines) == 1 + 6
        for row in table.rows:
            assert 0.0 <= row.rate <= 1.0
            assert row.method == "warp"
            assert row.reps == 5

    def test_single_rep_degenerate_but_valid(self):
        table = run_experiment(tiny_plan(reps=1))
        assert all(row.rate in (0.0, 1.0) for row in table.rows)

    def test_deterministic(self):
        a = run_experiment(tiny_plan())
        b = run_experiment(tiny_plan())
        assert a == b

    def test_workers_do_not_change_results(self):
        a = run_experiment(tiny_plan())
        b = run_experiment(tiny_plan(), workers=2)
        assert a == b

    def test_full_method(self):
        table = run_experiment(tiny_plan(method="full", reps=3, B=9))
        assert all(row.method == "full" for row in table.rows)
        assert all(0.0 <= row.rate <= 1.0 for row in table.rows)

    def test_full_and_warp_disagree_only_in_rates(self):
        warp = run_experiment(tiny_plan())
        full = run_experiment(tiny_plan(method="full", B=9))
        assert [r.statistic for r in warp.rows] == [r.statistic for r in full.rows]

    def test_rate_lookup(self):
        table = run_experiment(tiny_plan())
        rate = table.rate_of(0.0, 100, "ADJ0(1)", 0.05)
        assert 0.0 <= rate <= 1.0
        with pytest.raises(KeyError):
            table.rate_of(0.5, 100, "ADJ0(1)", 0.05)

    def test_power_grows_with_feedback(self):
        # desk-scale check that strong misspecification rejects more often
        # than the null does
        plan = tiny_plan(alpha1_grid=(0.0, 0.8), reps=40, seed=7)
        table = run_experiment(plan)
        null_rate = table.rate_of(0.0, 100, "ADJ0(1)", 0.05)
        alt_rate = table.rate_of(0.8, 100, "ADJ0(1)", 0.05)
        assert alt_rate >= null_rate + 0.3


class TestPowerTableCsv:
    def test_round_trippable(self):
        table = run_experiment(tiny_plan(reps=2))
        buf = io.StringIO()
        table.to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        parsed = [line.split(",") for line in lines[1:]]
        assert all(len(row) == 8 for row in parsed)
        assert {row[2] for row in parsed} == {"D1n-CvM", "ADJ0(1)"}
        assert {row[3] for row in parsed} == {"0.10", "0.05", "0.01"}
