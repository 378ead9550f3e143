import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzsig.config import ResolvedConfig
from fuzzsig.fixtures import downtrend_series, flat_series, uptrend_series
from fuzzsig.fuzzy import FuzzifiedInputs, default_variables
from fuzzsig.inference import (
    ANTECEDENT_TERMS,
    AggregatedOutput,
    InferenceError,
    Rule,
    RuleBase,
    Signal,
    build_rule_base,
    classify_signal,
    defuzzify,
    fire_rules,
    km_type_reduce,
    recommend,
    rules_from_csv,
    rules_to_csv,
)

from oracles import brute_force_aggregate, enumerated_km

OUTPUT_VAR = next(v for v in default_variables() if v.name == "signal")


def random_inputs(rng, interval=False):
    grades = {}
    for name, terms in ANTECEDENT_TERMS.items():
        per_term = {}
        for term in terms:
            a, b = sorted((rng.random(), rng.random()))
            per_term[term] = (a, b) if interval else (b, b)
        grades[name] = per_term
    return FuzzifiedInputs(grades=grades, interval=interval)


def singleton_inputs(macd, rsi, so, wa):
    grades = {
        name: {term: ((1.0, 1.0) if term == pick else (0.0, 0.0))
               for term in ANTECEDENT_TERMS[name]}
        for name, pick in zip(("macd", "rsi", "so", "wa"), (macd, rsi, so, wa))
    }
    return FuzzifiedInputs(grades=grades, interval=False)


class TestRuleBase:
    def test_exactly_36_distinct_exhaustive_antecedents(self):
        base = build_rule_base()
        assert len(base) == 36
        antecedents = {rule.antecedent() for rule in base.rules}
        assert len(antecedents) == 36
        product = set(itertools.product(
            ANTECEDENT_TERMS["macd"], ANTECEDENT_TERMS["rsi"],
            ANTECEDENT_TERMS["so"], ANTECEDENT_TERMS["wa"]))
        assert antecedents == product

    def test_hand_evaluated_votes(self):
        base = {rule.antecedent(): rule for rule in build_rule_base().rules}
        top = base[("high", "high", "low", "high")]
        assert top.score == 6 and top.consequent is Signal.BUY
        bottom = base[("low", "low", "high", "low")]
        assert bottom.score == -6 and bottom.consequent is Signal.SELL
        mixed = base[("high", "medium", "high", "low")]
        assert mixed.score == -1 and mixed.consequent is Signal.HOLD

    def test_consequent_split_is_symmetric(self):
        base = build_rule_base()
        counts = {s: sum(r.consequent is s for r in base.rules) for s in Signal}
        assert counts[Signal.BUY] == counts[Signal.SELL] == counts[Signal.HOLD] == 12

    def test_bad_parameters_rejected(self):
        with pytest.raises(InferenceError):
            build_rule_base(primary_weight=0)
        with pytest.raises(InferenceError):
            build_rule_base(buy_at=-2, sell_at=2)


class TestFireRules:
    def test_zero_inputs_give_zero_aggregate(self):
        grades = {name: {t: (0.0, 0.0) for t in terms}
                  for name, terms in ANTECEDENT_TERMS.items()}
        inputs = FuzzifiedInputs(grades=grades, interval=False)
        agg = fire_rules(inputs, build_rule_base(), OUTPUT_VAR)
        assert not np.any(agg.upper)
        assert not np.any(agg.lower)

    def test_single_rule_at_full_strength_reproduces_consequent(self):
        inputs = singleton_inputs("low", "low", "medium", "low")  # score -4, Sell
        agg = fire_rules(inputs, build_rule_base(), OUTPUT_VAR)
        expected = OUTPUT_VAR.mf("sell").grade(agg.grid)
        assert np.array_equal(agg.upper, expected)

    def test_matches_per_gridpoint_double_loop(self):
        rng = random.Random(99)
        base = build_rule_base()
        for interval in (False, True):
            inputs = random_inputs(rng, interval=interval)
            agg = fire_rules(inputs, base, OUTPUT_VAR, grid_points=201)
            lo, hi = brute_force_aggregate(inputs, base, OUTPUT_VAR, agg.grid)
            assert np.allclose(agg.lower, lo, rtol=0, atol=0)
            assert np.allclose(agg.upper, hi, rtol=0, atol=0)

    def test_rule_order_shuffle_is_bit_identical(self):
        rng = random.Random(5)
        base = build_rule_base()
        inputs = random_inputs(rng, interval=True)
        agg = fire_rules(inputs, base, OUTPUT_VAR)
        shuffled = list(base.rules)
        rng.shuffle(shuffled)
        agg2 = fire_rules(inputs, RuleBase(tuple(shuffled)), OUTPUT_VAR)
        assert np.array_equal(agg.upper, agg2.upper)
        assert np.array_equal(agg.lower, agg2.lower)
        assert defuzzify(agg) == defuzzify(agg2)

    def test_unknown_term_rejected(self):
        inputs = singleton_inputs("low", "low", "low", "low")
        bad = RuleBase((Rule("low", "weird", "low", "low", Signal.SELL),))
        with pytest.raises(InferenceError, match="unknown"):
            fire_rules(inputs, bad, OUTPUT_VAR)


def interval_aggregate(rng, points=101):
    grid = np.linspace(0.0, 1.0, points)
    upper = rng.random(points)
    lower = upper * rng.random(points)
    return AggregatedOutput(grid=grid, lower=lower, upper=upper, interval=True)


class TestKmTypeReduce:
    def test_degenerate_intervals_equal_type1_centroid(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            grid = np.linspace(0.0, 1.0, 101)
            mu = rng.random(101)
            agg = AggregatedOutput(grid=grid, lower=mu, upper=mu, interval=True)
            y_l, y_r = km_type_reduce(agg)
            centroid = float(np.trapezoid(grid * mu, grid) / np.trapezoid(mu, grid))
            assert y_l == pytest.approx(centroid, abs=1e-9)
            assert y_r == pytest.approx(centroid, abs=1e-9)

    def test_symmetric_set_reduces_symmetrically(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            half = rng.random(50)
            lower_half = half * rng.random(50)
            mid_u, mid_l = rng.random(), 0.0
            upper = np.concatenate((half, [max(mid_u, 1e-3)], half[::-1]))
            lower = np.concatenate((lower_half, [mid_l], lower_half[::-1]))
            agg = AggregatedOutput(grid=np.linspace(0, 1, 101),
                                   lower=lower, upper=upper, interval=True)
            y_l, y_r = km_type_reduce(agg)
            assert y_l + y_r == pytest.approx(1.0, abs=1e-9)

    def test_matches_switch_point_enumeration(self):
        # the sampled set carries trapezoid quadrature weights; the oracle
        # searches the same set exhaustively instead of iterating
        rng = np.random.default_rng(31)
        for _ in range(50):
            agg = interval_aggregate(rng)
            quad = np.ones(len(agg.grid))
            quad[0] = quad[-1] = 0.5
            y_l, y_r = km_type_reduce(agg)
            e_l, e_r = enumerated_km(agg.grid, quad * agg.lower, quad * agg.upper)
            assert y_l == pytest.approx(e_l, abs=1e-9)
            assert y_r == pytest.approx(e_r, abs=1e-9)

    def test_all_zero_aggregate_errors(self):
        zeros = np.zeros(101)
        agg = AggregatedOutput(np.linspace(0, 1, 101), zeros, zeros, interval=True)
        with pytest.raises(InferenceError, match="no rule fired"):
            km_type_reduce(agg)


class TestDefuzzify:
    def test_hold_term_alone_centers_at_half(self):
        grid = np.linspace(0.0, 1.0, 1001)
        mu = OUTPUT_VAR.mf("hold").grade(grid)
        agg = AggregatedOutput(grid, mu, mu, interval=False)
        assert defuzzify(agg) == pytest.approx(0.5, abs=1e-6)

    def test_symmetric_aggregate_centers_at_half(self):
        rng = np.random.default_rng(41)
        half = rng.random(500)
        mu = np.concatenate((half, [rng.random()], half[::-1]))
        agg = AggregatedOutput(np.linspace(0, 1, 1001), mu, mu, interval=False)
        assert defuzzify(agg) == pytest.approx(0.5, abs=1e-6)

    def test_matches_fine_grid_refinement(self):
        rng = np.random.default_rng(43)
        base = build_rule_base()
        for _ in range(20):
            inputs = random_inputs(random.Random(int(rng.integers(1 << 30))))
            coarse = fire_rules(inputs, base, OUTPUT_VAR, grid_points=1001)
            fine = fire_rules(inputs, base, OUTPUT_VAR, grid_points=100001)
            assert defuzzify(coarse) == pytest.approx(defuzzify(fine), abs=1e-4)

    def test_all_zero_errors(self):
        zeros = np.zeros(101)
        agg = AggregatedOutput(np.linspace(0, 1, 101), zeros, zeros, interval=False)
        with pytest.raises(InferenceError, match="no rule fired"):
            defuzzify(agg)


class TestClassifySignal:
    @pytest.mark.parametrize("crisp,expected", [
        (0.3, Signal.SELL),
        (0.4, Signal.HOLD),
        (0.7, Signal.BUY),
        (0.0, Signal.SELL),
        (0.39999, Signal.SELL),
        (0.59999, Signal.HOLD),
        (0.6, Signal.BUY),
        (1.0, Signal.BUY),
    ])
    def test_fixture_mapping(self, crisp, expected):
        assert classify_signal(crisp) is expected

    def test_out_of_range_rejected(self):
        with pytest.raises(InferenceError):
            classify_signal(-0.01)
        with pytest.raises(InferenceError):
            classify_signal(1.01)

    @given(crisp=st.floats(0.0, 1.0))
    def test_total_on_unit_interval(self, crisp):
        assert classify_signal(crisp) in set(Signal)


class TestConsequentOrdering:
    def test_singleton_activations_order_by_consequent(self):
        base = build_rule_base()
        for rule in base.rules:
            inputs = singleton_inputs(*rule.antecedent())
            agg = fire_rules(inputs, base, OUTPUT_VAR)
            crisp = defuzzify(agg)
            if rule.consequent is Signal.SELL:
                assert crisp < 0.4
            elif rule.consequent is Signal.BUY:
                assert crisp > 0.6
            else:
                assert 0.4 < crisp < 0.6


class TestRecommend:
    def test_uptrend_is_buy(self):
        rec = recommend(uptrend_series())
        assert rec.signal is Signal.BUY

    def test_downtrend_is_sell(self):
        rec = recommend(downtrend_series())
        assert rec.signal is Signal.SELL

    def test_flat_series_is_neutral_hold(self):
        rec = recommend(flat_series())
        assert rec.crisp == pytest.approx(0.5, abs=1e-6)
        assert rec.signal is Signal.HOLD
        y_l, y_r = rec.centroid_interval
        assert y_l <= 0.5 <= y_r

    def test_directional_sanity_without_footprint(self):
        cfg = ResolvedConfig(delta=0.0)
        assert recommend(uptrend_series(), cfg).signal is Signal.BUY
        assert recommend(downtrend_series(), cfg).signal is Signal.SELL
        flat = recommend(flat_series(), cfg)
        assert flat.crisp == pytest.approx(0.5, abs=1e-6)
        assert flat.centroid_interval is None

    def test_pipeline_is_deterministic(self):
        a = recommend(uptrend_series())
        b = recommend(uptrend_series())
        assert a == b

    def test_errors_name_their_stage(self):
        from fuzzsig.inference import PipelineError
        from fuzzsig.market_data import PriceSeries

        tiny = PriceSeries("T", uptrend_series().bars[:10])
        with pytest.raises(PipelineError, match="aggregation"):
            recommend(tiny)
        short = PriceSeries("T", uptrend_series().bars[:300])
        with pytest.raises(PipelineError, match="indicators"):
            recommend(short)


class TestTypeReductionCollapse:
    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_zero_delta_interval_path_equals_type1(self, seed):
        rng = random.Random(seed)
        base = build_rule_base()
        grades_t1 = random_inputs(rng, interval=False)
        grades_iv = FuzzifiedInputs(grades=grades_t1.grades, interval=True)
        crisp_t1 = defuzzify(fire_rules(grades_t1, base, OUTPUT_VAR))
        crisp_iv = defuzzify(fire_rules(grades_iv, base, OUTPUT_VAR))
        assert crisp_iv == pytest.approx(crisp_t1, abs=1e-9)


class TestRulesCsv:
    def test_round_trip(self):
        base = build_rule_base()
        text = rules_to_csv(base)
        parsed = rules_from_csv(text)
        assert [r.antecedent() for r in parsed.rules] == [r.antecedent() for r in base.rules]
        assert [r.consequent for r in parsed.rules] == [r.consequent for r in base.rules]
        assert all(r.provenance == "user" for r in parsed.rules)

    def test_score_column_ignored_on_import(self):
        text = rules_to_csv(build_rule_base(), include_scores=True)
        assert text.splitlines()[0] == "macd,rsi,so,wa,consequent,score"
        assert len(rules_from_csv(text)) == 36

    def test_duplicate_antecedent_rejected(self):
        text = ("macd,rsi,so,wa,consequent\n"
                "low,low,low,low,sell\n"
                "low,low,low,low,buy\n")
        with pytest.raises(InferenceError, match="duplicate"):
            rules_from_csv(text)

    def test_unknown_term_rejected(self):
        text = "macd,rsi,so,wa,consequent\nlow,low,low,sideways,sell\n"
        with pytest.raises(InferenceError, match="term"):
            rules_from_csv(text)

    def test_partial_user_base_fires(self):
        text = "macd,rsi,so,wa,consequent\nhigh,high,medium,low,buy\n"
        base = rules_from_csv(text)
        rec = recommend(uptrend_series(), rule_base=base)
        assert rec.signal is Signal.BUY
