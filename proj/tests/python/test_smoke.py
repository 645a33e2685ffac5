import math

import pytest

import gsdfront


def test_metric_hand_cases():
    assert gsdfront.diversity(["w"] * 6) == pytest.approx(1 / 60)
    assert gsdfront.perplexity([-1.0, -2.0, -3.0]) == pytest.approx(math.exp(2))
    assert gsdfront.coherence([-0.5, -1.5]) == -1.0
    assert gsdfront.qtext([0.2, 0.4, 0.9], targets=[0.2, 0.4, 0.9], strengths=[3, 3, 3]) == pytest.approx(0.5)


def test_agreement():
    assert gsdfront.weighted_kappa([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert gsdfront.weighted_kappa([3, 3], [3, 3]) is None
    summary = gsdfront.agreement([1, 2], [3, 2])
    assert summary["within_one_share"] == 0.5
    assert summary["mean_abs_diff"] == 1.0


def test_generated_table_front_and_test():
    table = gsdfront.generate_table(strategies=3, prompts=8, delta=0.4, seed=3)
    assert table.strategies == ["s1", "s2", "s3"]
    assert len(table.prompt_ids) == 8
    assert all(0.0 <= x <= 1.0 for x in table.cell(0, 0))
    front = gsdfront.gsd_front(table)
    assert set(front["front"]) <= set(table.strategies)
    assert gsdfront.d_statistic(table, "s1", "s1") == 0.0
    first = gsdfront.front_test(table, "s1", resamples=30, seed=5)
    second = gsdfront.front_test(table, "s1", resamples=30, seed=5)
    assert first == second
    assert len(first["pairwise"]) == 2


def test_contamination_is_monotone():
    table = gsdfront.generate_table(prompts=10, delta=0.5, seed=1)
    result = gsdfront.contamination(table, "s1", k_max=4, resamples=50, seed=2)
    points = result["curves"][0]["points"]
    p_values = [pt["p_value"] for pt in points]
    assert p_values == sorted(p_values)


def test_parse_table_and_errors():
    scale = '{"metrics":[{"name":"q","scale":"cardinal"}]}'
    table = gsdfront.parse_table("prompt_id,dataset,strategy,q\np1,d,a,0.2\np1,d,b,0.7\n", scale)
    assert gsdfront.d_statistic(table, "b", "a") == pytest.approx(0.0)
    assert gsdfront.d_statistic(table, "a", "b") == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        gsdfront.parse_table("prompt_id,dataset,strategy,q\np1,d,a,zz\n", scale)
    with pytest.raises(ValueError):
        gsdfront.load_table("/nonexistent.csv", "/nonexistent.json")


def test_calibration():
    result = gsdfront.calibration(runs=2, prompts=8, resamples=20, seed=4)
    assert result["runs"] == 2
    assert len(result["p_values"]) == 2
