"""Tests for episode runner, experiment aggregation, and exports."""

import xml.dom.minidom

import numpy as np
import pytest

from psbandits import (
    Aggregate,
    ExperimentConfig,
    PolicyParams,
    RewardStream,
    build_synthetic,
    change_point_report,
    default_params,
    emit_svg,
    episode_seed,
    export_csv,
    parse_csv,
    run_episode,
    run_experiment,
    top_m,
)


class TestEpisodeSeed:
    def test_stable(self):
        assert episode_seed(42, "cucb", 0) == episode_seed(42, "cucb", 0)

    def test_distinct_across_labels_and_reps(self):
        seeds = {episode_seed(42, label, r)
                 for label in ("cucb", "glr_cucb") for r in range(50)}
        assert len(seeds) == 100

    def test_distinct_across_base_seeds(self):
        assert episode_seed(1, "cucb", 0) != episode_seed(2, "cucb", 0)

    def test_fits_in_63_bits(self):
        s = episode_seed(123456789, "some-long-label", 999)
        assert 0 <= s < 2 ** 63


class _FixedPolicy:
    """Plays one fixed super arm forever; records what it was fed."""

    def __init__(self, arm):
        self.arm = tuple(arm)
        self.fed = []

    def select(self, t):
        return self.arm

    def update(self, t, super_arm, rewards):
        self.fed.append((t, super_arm, tuple(rewards)))
        return []


class _OracleReplay:
    """Always plays the optimal super arm of the current segment."""

    def __init__(self, table, m):
        self.table = table
        self.m = m

    def select(self, t):
        return top_m(self.table.means_at(t), self.m)

    def update(self, t, super_arm, rewards):
        return []


class TestRunEpisode:
    def test_oracle_replay_has_zero_regret(self):
        env = build_synthetic(600, 5, 2, 3)
        trace = run_episode(env, 2, _OracleReplay(env.table, 2), seed=7)
        assert trace.final_regret == 0.0
        assert np.all(trace.cumulative_regret == 0.0)

    def test_fixed_bad_arm_accumulates_linear_regret(self):
        env = build_synthetic(400, 4, 1, 1)
        worst = int(np.argmin(env.table.means[0]))
        trace = run_episode(env, 1, _FixedPolicy((worst,)), seed=3)
        gap = float(env.table.means[0].max() - env.table.means[0].min())
        assert trace.final_regret == pytest.approx(400 * gap)
        # cumulative curve is an arithmetic ramp
        assert trace.cumulative_regret[99] == pytest.approx(100 * gap)

    def test_regret_is_monotone(self):
        env = build_synthetic(500, 5, 2, 3)
        params = default_params("cucb", 500, 5, 2, 3)
        trace = run_episode(env, 2, params, seed=11)
        diffs = np.diff(np.concatenate([[0.0], trace.cumulative_regret]))
        assert np.all(diffs >= -1e-12)

    def test_feedback_matches_reward_stream(self):
        env = build_synthetic(50, 3, 2, 1)
        policy = _FixedPolicy((0, 2))
        run_episode(env, 2, policy, seed=21)
        stream = RewardStream(env, seed=21)
        for t, super_arm, rewards in policy.fed:
            assert super_arm == (0, 2)
            assert rewards == tuple(stream.at(t)[[0, 2]].astype(float))

    def test_oracle_cucb_gets_restart_times_filled(self):
        env = build_synthetic(3000, 6, 2, 3)
        params = PolicyParams("oracle_cucb")
        trace = run_episode(env, 2, params, seed=5)
        moves = change_point_report(env, 2).optimal_super_arm_changes
        restarts = [e.time for e in trace.events if e.kind == "global_restart"]
        assert restarts == list(moves)

    def test_deterministic_given_seed(self):
        env = build_synthetic(300, 4, 2, 2)
        params = default_params("cts", 300, 4, 2, 2)
        a = run_episode(env, 2, params, seed=8)
        b = run_episode(env, 2, params, seed=8)
        assert np.array_equal(a.cumulative_regret, b.cumulative_regret)

    def test_actions_recorded_only_on_request(self):
        env = build_synthetic(50, 3, 1, 1)
        params = PolicyParams("cucb")
        assert run_episode(env, 1, params, seed=0).actions is None
        trace = run_episode(env, 1, params, seed=0, record_actions=True)
        assert len(trace.actions) == 50

    def test_alpha_scales_the_benchmark(self):
        env = build_synthetic(200, 4, 1, 1)
        worst = int(np.argmin(env.table.means[0]))
        full = run_episode(env, 1, _FixedPolicy((worst,)), seed=0, alpha=1.0)
        half = run_episode(env, 1, _FixedPolicy((worst,)), seed=0, alpha=0.5)
        best = float(env.table.means[0].max())
        low = float(env.table.means[0].min())
        assert full.final_regret == pytest.approx(200 * (best - low))
        assert half.final_regret == pytest.approx(200 * (0.5 * best - low))


class TestRunExperiment:
    def make_config(self, reps=3):
        env = build_synthetic(200, 4, 2, 2)
        policies = [
            ("cucb", default_params("cucb", 200, 4, 2, 2)),
            ("cts", default_params("cts", 200, 4, 2, 2)),
        ]
        return ExperimentConfig(env, 2, policies, replications=reps,
                                base_seed=77)

    def test_aggregate_shapes(self):
        agg = run_experiment(self.make_config())
        assert agg.labels == ("cucb", "cts")
        assert agg.mean.shape == (2, 200)
        assert agg.std.shape == (2, 200)
        assert agg.replications == 3
        assert agg.horizon == 200

    def test_mean_matches_manual_episodes(self):
        config = self.make_config()
        agg = run_experiment(config)
        curves = []
        for r in range(3):
            seed = episode_seed(77, "cucb", r)
            trace = run_episode(config.env, 2, config.policies[0][1],
                                alpha=1.0, seed=seed, label="cucb")
            curves.append(trace.cumulative_regret)
        assert np.allclose(agg.mean[0], np.mean(curves, axis=0))
        assert np.allclose(agg.std[0], np.std(curves, axis=0))

    def test_single_rep_has_zero_std(self):
        agg = run_experiment(self.make_config(reps=1))
        assert np.all(agg.std == 0.0)

    def test_policies_do_not_share_seeds(self):
        # episode seeds depend on the label, not list position, so adding
        # a policy must not disturb the others' curves
        env = build_synthetic(150, 4, 2, 2)
        p_cucb = default_params("cucb", 150, 4, 2, 2)
        p_cts = default_params("cts", 150, 4, 2, 2)
        solo = run_experiment(ExperimentConfig(
            env, 2, [("cucb", p_cucb)], replications=2, base_seed=5))
        both = run_experiment(ExperimentConfig(
            env, 2, [("cts", p_cts), ("cucb", p_cucb)], replications=2,
            base_seed=5))
        assert np.array_equal(solo.mean[0], both.mean[1])

    def test_final_lookup(self):
        agg = run_experiment(self.make_config())
        mean, std = agg.final("cucb")
        assert mean == pytest.approx(agg.mean[0, -1])
        assert std == pytest.approx(agg.std[0, -1])
        with pytest.raises(ValueError):
            agg.final("nope")

    def test_duplicate_labels_rejected(self):
        env = build_synthetic(100, 3, 1, 1)
        params = PolicyParams("cucb")
        with pytest.raises(ValueError):
            ExperimentConfig(env, 1, [("a", params), ("a", params)])

    def test_events_collected_per_label(self):
        env = build_synthetic(2000, 6, 2, 2)
        params = default_params("oracle_cucb", 2000, 6, 2, 2)
        agg = run_experiment(ExperimentConfig(
            env, 2, [("oracle", params)], replications=2, base_seed=1))
        assert len(agg.events["oracle"]) == 2
        for rep_events in agg.events["oracle"]:
            assert all(e.kind == "global_restart" for e in rep_events)


class TestCsvExport:
    def make_aggregate(self):
        config = ExperimentConfig(
            build_synthetic(120, 4, 2, 2), 2,
            [("cucb", default_params("cucb", 120, 4, 2, 2)),
             ("cts", default_params("cts", 120, 4, 2, 2))],
            replications=2, base_seed=9)
        return run_experiment(config)

    def test_round_trip_is_exact(self):
        agg = self.make_aggregate()
        back = parse_csv(export_csv(agg))
        assert back.labels == agg.labels
        assert np.array_equal(back.mean, agg.mean)
        assert np.array_equal(back.std, agg.std)

    def test_round_trip_survives_a_file(self, tmp_path):
        agg = self.make_aggregate()
        path = tmp_path / "regret.csv"
        path.write_text(export_csv(agg))
        back = parse_csv(path.read_text())
        assert np.array_equal(back.mean, agg.mean)

    def test_export_is_byte_stable(self):
        agg = self.make_aggregate()
        assert export_csv(agg).encode() == export_csv(agg).encode()

    def test_header_layout(self):
        header = export_csv(self.make_aggregate()).splitlines()[0]
        assert header == "t,cucb_mean,cucb_std,cts_mean,cts_std"

    @pytest.mark.parametrize("text", [
        "t,x_mean\n1,0.5\n",          # std column missing
        "t,x_mean,x_std\n1,0.5\n",    # short row
        "t,x_mean,x_std\n2,0.5,0.1\n",  # t must count from 1
        "t,x_mean,y_std\n1,0.5,0.1\n",  # mismatched label pair
        "n,x_mean,x_std\n1,0.5,0.1\n",  # wrong first column
    ])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_csv(text)


class TestSvg:
    def make_aggregate(self):
        config = ExperimentConfig(
            build_synthetic(150, 4, 2, 2), 2,
            [("cucb", default_params("cucb", 150, 4, 2, 2)),
             ("cts & co", default_params("cts", 150, 4, 2, 2))],
            replications=2, base_seed=13)
        return run_experiment(config)

    def test_well_formed_xml(self):
        svg = emit_svg(self.make_aggregate(), title="regret <demo>")
        doc = xml.dom.minidom.parseString(svg)
        assert doc.documentElement.tagName == "svg"

    def test_one_polyline_per_policy(self):
        svg = emit_svg(self.make_aggregate())
        doc = xml.dom.minidom.parseString(svg)
        lines = doc.getElementsByTagName("polyline")
        assert len(lines) == 2

    def test_labels_are_escaped(self):
        svg = emit_svg(self.make_aggregate())
        assert "cts &amp; co" in svg
        assert "cts & co" not in svg.replace("cts &amp; co", "")

    def test_deterministic(self):
        agg = self.make_aggregate()
        assert emit_svg(agg) == emit_svg(agg)

    def test_band_toggle(self):
        agg = self.make_aggregate()
        with_band = emit_svg(agg, show_band=True)
        without = emit_svg(agg, show_band=False)
        assert with_band.count("<polygon") > without.count("<polygon")
