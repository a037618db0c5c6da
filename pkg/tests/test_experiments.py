import numpy as np
import pytest

from subsetscreen import (
    ConfigError,
    aggregate,
    aggregate_records,
    config_from_dict,
    config_to_dict,
    evaluate_repetition,
    load_repetition_records,
    method_catalog,
    run_experiment,
    write_method_table,
    write_repetition_records,
)


def small_config(**overrides):
    raw = {
        "n": 40,
        "p": 15,
        "d": 3,
        "rho": 0.0,
        "sigma": 1.0,
        "beta_value": 3.0,
        "M": 6,
        "repetitions": 4,
        "methods": ["sis", "foss-sis", "fs", "foss-fs"],
        "seed": 77,
    }
    raw.update(overrides)
    return config_from_dict(raw)


class TestConfig:
    def test_catalog(self):
        assert set(method_catalog()) == {
            "sis", "isis", "fs", "oss-sis", "oss-isis", "oss-fs",
            "foss-sis", "foss-isis", "foss-fs",
        }

    def test_valid_roundtrip(self):
        config = small_config()
        again = config_from_dict(config_to_dict(config))
        assert again == config

    @pytest.mark.parametrize(
        "overrides, key",
        [
            ({"rho": 1.2}, "rho"),
            ({"sigma": 0.0}, "sigma"),
            ({"M": 40}, "M"),
            ({"M": 0}, "M"),
            ({"d": 16}, "d"),
            ({"repetitions": 0}, "repetitions"),
            ({"methods": []}, "methods"),
            ({"methods": ["lar"]}, "methods"),
            ({"banana": 1}, "banana"),
            ({"seed": "abc"}, "seed"),
        ],
    )
    def test_violations_name_the_key(self, overrides, key):
        raw = {
            "n": 40, "p": 15, "d": 3, "rho": 0.0, "sigma": 1.0,
            "beta_value": 3.0, "M": 6, "repetitions": 4,
            "methods": ["sis"], "seed": 77,
        }
        raw.update(overrides)
        with pytest.raises(ConfigError) as err:
            config_from_dict(raw)
        assert err.value.key == key

    def test_missing_key_named(self):
        with pytest.raises(ConfigError) as err:
            config_from_dict({"n": 40})
        assert err.value.key == "p"

    def test_kronecker_dimensions_from_file(self, tmp_path):
        rng = np.random.default_rng(14)
        path = tmp_path / "base.csv"
        np.savetxt(path, rng.choice([-1.0, 1.0], size=(6, 10)), delimiter=",", fmt="%.0f")
        config = config_from_dict(
            {
                "d": 3, "sigma": 1.0, "beta_value": 1.0, "M": 5,
                "repetitions": 2, "methods": ["sis"], "seed": 3,
                "design": {"kind": "kronecker", "base_design_path": str(path), "hadamard_order": 2},
            }
        )
        assert (config.model.n, config.model.p) == (12, 20)

    def test_kronecker_dimension_conflict_named(self, tmp_path):
        rng = np.random.default_rng(15)
        path = tmp_path / "base.csv"
        np.savetxt(path, rng.choice([-1.0, 1.0], size=(6, 10)), delimiter=",", fmt="%.0f")
        with pytest.raises(ConfigError) as err:
            config_from_dict(
                {
                    "n": 99, "d": 3, "sigma": 1.0, "beta_value": 1.0, "M": 5,
                    "repetitions": 2, "methods": ["sis"], "seed": 3,
                    "design": {"kind": "kronecker", "base_design_path": str(path), "hadamard_order": 2},
                }
            )
        assert err.value.key == "n"


class TestEvaluateRepetition:
    def test_noiseless_identifiable_case(self):
        config = small_config(
            n=40, p=6, d=2, sigma=1e-6, M=3, methods=["sis", "isis", "fs", "foss-fs"]
        )
        outcomes = evaluate_repetition(config, 0)
        for outcome in outcomes.values():
            assert {0, 1} <= set(outcome.selected)
            assert outcome.rss <= 1e-6

    def test_same_rep_is_deterministic(self):
        config = small_config()
        a = evaluate_repetition(config, 2)
        b = evaluate_repetition(config, 2)
        for method in config.methods:
            assert a[method].selected == b[method].selected
            assert a[method].rss == b[method].rss

    def test_refit_never_worse_per_repetition(self):
        config = small_config(repetitions=8, methods=["sis", "foss-sis", "fs", "foss-fs"])
        for rep in range(config.repetitions):
            outcomes = evaluate_repetition(config, rep)
            assert outcomes["foss-sis"].rss <= outcomes["sis"].rss * (1 + 1e-9)
            assert outcomes["foss-fs"].rss <= outcomes["fs"].rss * (1 + 1e-9)

    def test_stepwise_covers_large_sparse_cell(self):
        config = small_config(
            n=200, p=500, d=10, M=30, repetitions=1, methods=["fs"], seed=123
        )
        outcomes = evaluate_repetition(config, 0)
        assert set(range(10)) <= set(outcomes["fs"].selected)


class TestAggregate:
    def test_coverage_rate_is_exact_ratio(self):
        config = small_config(repetitions=2, methods=["sis"])
        outcomes = [evaluate_repetition(config, r) for r in range(2)]
        # force one covering and one non-covering by lying about support
        table_real = aggregate(outcomes, config.true_support)
        assert table_real.row("sis").repetitions == 2
        fake_support = (0, 1, 2, 13)
        covered = [
            set(fake_support) <= set(o["sis"].selected) for o in outcomes
        ]
        table_fake = aggregate(outcomes, fake_support)
        assert table_fake.row("sis").cr == sum(covered) / 2

    def test_constant_rss_mean(self):
        config = small_config(repetitions=3, methods=["sis"])
        outcomes = [evaluate_repetition(config, r) for r in range(3)]
        table = aggregate(outcomes, config.true_support)
        expected = np.mean([o["sis"].rss for o in outcomes])
        assert table.row("sis").ao == pytest.approx(expected, rel=0, abs=0)


class TestRunExperiment:
    def test_single_repetition_composition(self):
        config = small_config(repetitions=1)
        result = run_experiment(config)
        direct = aggregate([evaluate_repetition(config, 0)], config.true_support)
        for method in config.methods:
            assert result.table.row(method).cr == direct.row(method).cr
            assert result.table.row(method).ao == direct.row(method).ao

    def test_worker_count_does_not_change_output(self):
        config = small_config(repetitions=6, methods=["sis", "foss-sis"])
        serial = run_experiment(config, workers=1)
        parallel = run_experiment(config, workers=3)
        assert serial.records == parallel.records
        assert serial.table == parallel.table

    def test_records_cover_every_rep_and_method(self):
        config = small_config(repetitions=5)
        result = run_experiment(config)
        assert len(result.records) == 5 * len(config.methods)
        assert [r.rep for r in result.records] == sorted(r.rep for r in result.records)

    def test_csv_roundtrip_reproduces_table(self, tmp_path):
        config = small_config(repetitions=6)
        result = run_experiment(config)
        rep_path = tmp_path / "repetitions.csv"
        write_repetition_records(rep_path, result.records)
        loaded = load_repetition_records(rep_path)
        assert loaded == result.records
        rebuilt = aggregate_records(loaded)
        for method in config.methods:
            assert rebuilt.row(method).cr == result.table.row(method).cr
            assert rebuilt.row(method).ao == result.table.row(method).ao
            assert rebuilt.row(method).mean_iterations == result.table.row(method).mean_iterations

    def test_table_csv_is_written(self, tmp_path):
        config = small_config(repetitions=2, methods=["sis"])
        result = run_experiment(config)
        path = tmp_path / "aggregate.csv"
        write_method_table(path, result.table)
        text = path.read_text().splitlines()
        assert text[0] == "method,cr,ao,mean_iterations,repetitions,exclusions"
        assert text[1].startswith("sis,")

    def test_failed_repetitions_are_counted_not_imputed(self, monkeypatch):
        import subsetscreen.experiments as experiments_module

        config = small_config(repetitions=4, methods=["sis"])
        real = experiments_module.evaluate_repetition

        def flaky(cfg, rep):
            if rep == 2:
                raise ValueError("synthetic generation failure")
            return real(cfg, rep)

        monkeypatch.setattr(experiments_module, "evaluate_repetition", flaky)
        result = experiments_module.run_experiment(config)
        assert result.exclusions == ((2, "ValueError: synthetic generation failure"),)
        assert result.table.row("sis").repetitions == 3
        assert result.table.row("sis").exclusions == 1
        assert {r.rep for r in result.records} == {0, 1, 3}

    def test_kronecker_design_runs_to_completion(self, tmp_path):
        rng = np.random.default_rng(16)
        path = tmp_path / "base.csv"
        np.savetxt(path, rng.choice([-1.0, 1.0], size=(12, 66)), delimiter=",", fmt="%.0f")
        config = config_from_dict(
            {
                "d": 5, "sigma": 1.0, "beta_value": 1.0, "M": 10,
                "repetitions": 3, "methods": ["sis", "foss-sis", "fs", "foss-fs"],
                "seed": 99,
                "design": {"kind": "kronecker", "base_design_path": str(path), "hadamard_order": 2},
            }
        )
        assert (config.model.n, config.model.p) == (24, 132)
        result = run_experiment(config)
        assert len(result.records) == 3 * 4
        for row in result.table.rows:
            assert 0.0 <= row.cr <= 1.0
            assert row.ao >= 0.0
