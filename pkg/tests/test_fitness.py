import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dramasim.fitness import (ARCHETYPE_BAND, NATALITY, REVENGE, SURVIVAL_BAND, BandScore, SceneSpec, band_score,
                              fitness_natality, fitness_revenge, get_scene)
from dramasim.profile import decode_profiles
from dramasim.tagger import AVENGER, BAD_WARRIOR, DOWNTRODDEN, HELPLESS, WARRIOR, TagReport, builtin_specs, tag_run
from dramasim.world import WorldConfig, run_world


def gauss(x, mu, sigma):
    """Independent oracle: unnormalized normal density."""
    return math.exp(-((x - mu) ** 2) / (2 * sigma**2))


def report(total, alive, **counts):
    return TagReport({k: set(range(v)) for k, v in counts.items()}, total, alive)


def test_band_score_examples():
    assert band_score(60, SURVIVAL_BAND) == 1.0
    assert band_score(29.999, SURVIVAL_BAND) == 0.0
    assert band_score(29.9, SURVIVAL_BAND) == 0.0
    assert band_score(90.001, SURVIVAL_BAND) == 0.0
    assert abs(band_score(50, SURVIVAL_BAND) - math.exp(-0.5)) <= 1e-12
    assert abs(band_score(30, SURVIVAL_BAND) - math.exp(-4.5)) <= 1e-12


def test_archetype_band_is_centred_on_target_with_width_over_six():
    sigma = (30 - 8) / 6
    for x in (8.0, 15.25, 22.5, 26.25, 30.0):
        assert band_score(x, ARCHETYPE_BAND) == pytest.approx(gauss(x, 22.5, sigma), abs=1e-12)
    assert band_score(7.99, ARCHETYPE_BAND) == 0.0
    assert band_score(30.01, ARCHETYPE_BAND) == 0.0


@given(st.floats(min_value=0, max_value=30))
def test_symmetric_band_is_symmetric(d):
    assert band_score(60 - d, SURVIVAL_BAND) == pytest.approx(band_score(60 + d, SURVIVAL_BAND), abs=1e-15)


@given(st.floats(min_value=-50, max_value=150, allow_nan=False))
def test_band_score_range(x):
    assert 0.0 <= band_score(x, SURVIVAL_BAND) <= 1.0
    assert 0.0 <= band_score(x, ARCHETYPE_BAND) <= 1.0


def test_invalid_band_rejected():
    with pytest.raises(ValueError):
        BandScore(10, 20, 30)


def test_natality_maximum():
    # 40 born, 24 alive (60%), 9 of each archetype (22.5%)
    r = report(40, 24, **{n: 9 for n in (DOWNTRODDEN, WARRIOR, HELPLESS, BAD_WARRIOR)})
    assert NATALITY.score(r) == 5.0
    assert NATALITY.max_fitness == 5.0
    assert len(NATALITY.components) == 5


def test_natality_survival_only():
    assert NATALITY.score(report(10, 6)) == 1.0


def test_natality_mixed_example():
    # survival 45%, archetypes 22.5, 22.5, 7 and 31 percent of 200
    r = report(200, 90, downtrodden=45, warrior=45, helpless=14, bad_warrior=62)
    expected = math.exp(-225 / 200) + 2.0
    assert NATALITY.score(r) == pytest.approx(expected, abs=1e-12)
    assert round(NATALITY.score(r), 4) == 2.3247


def test_natality_rejects_empty_run():
    with pytest.raises(ValueError):
        NATALITY.score(report(0, 0))


def test_fitness_natality_on_a_run():
    run = run_world(WorldConfig(duration_days=100), decode_profiles([0.5] * 12), seed=2)
    tags = tag_run(run, builtin_specs())
    value = fitness_natality(run, tags)
    assert 0.0 <= value <= 5.0
    with pytest.raises(ValueError):
        fitness_natality(run, report(run.total_born + 1, 0))


def test_revenge_counts_avengers():
    assert fitness_revenge(report(10, 5)) == 0
    assert fitness_revenge(report(10, 5, avenger=3)) == 3
    assert REVENGE.score(report(10, 5, avenger=3)) == 3.0


def test_scene_lookup_and_round_trip(tmp_path):
    assert get_scene("natality") is NATALITY
    assert get_scene("revenge") is REVENGE
    path = tmp_path / "scene.json"
    import json
    path.write_text(json.dumps(NATALITY.to_dict()), encoding="utf-8")
    assert get_scene(str(path)) == NATALITY
    assert SceneSpec.from_dict(REVENGE.to_dict()) == REVENGE
    with pytest.raises(ValueError):
        get_scene("no-such-scene")


def test_scene_validation():
    with pytest.raises(ValueError):
        SceneSpec("x", kind="count")
    with pytest.raises(ValueError):
        SceneSpec("x", kind="bands")
    with pytest.raises(ValueError):
        SceneSpec("x", kind="other", archetype=AVENGER)
