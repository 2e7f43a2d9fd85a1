"""Window refinement pipeline, clip ranges, score blending, reranking."""

import math

import pytest

from mmrkit import (
    Interval,
    PostProcessConfig,
    ScoredInterval,
    blend_scores,
    clip_index_range,
    postprocess,
    rerank_with_verification,
)

from helpers import seeded

# defaults: one clip every two seconds, so grid step 2 and min length 2
CFG150 = PostProcessConfig(clamp_to=150.0)


def refine_one(s, e, cfg):
    out = postprocess([(s, e, 1.0)], cfg)
    return (out[0].start, out[0].end)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


def test_config_defaults_follow_clip_rate():
    cfg = PostProcessConfig(clamp_to=100.0, clip_rate_r=0.25)
    assert cfg.min_len == 4.0
    assert cfg.round_granularity == 4.0
    assert cfg.max_len is None


@pytest.mark.parametrize(
    "kw",
    [
        {"clamp_to": 0.0},
        {"clamp_to": -5.0},
        {"clamp_to": float("inf")},
        {"clamp_to": 100.0, "clip_rate_r": 0.0},
        {"clamp_to": 100.0, "min_len": -1.0},
        {"clamp_to": 100.0, "round_granularity": 0.0},
        {"clamp_to": 100.0, "min_len": 5.0, "max_len": 4.0},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        PostProcessConfig(**kw)


def test_config_to_dict():
    d = PostProcessConfig(clamp_to=60.0).to_dict()
    assert d == {
        "clamp_to": 60.0,
        "clip_rate_r": 0.5,
        "min_len": 2.0,
        "max_len": None,
        "round_granularity": 2.0,
    }


# ---------------------------------------------------------------------------
# refinement golden cases (grid step 2 unless stated)
# ---------------------------------------------------------------------------


def test_refine_clamps_and_rounds():
    assert refine_one(-1.3, 11.2, CFG150) == (0.0, 12.0)


def test_refine_rounds_ties_up():
    # 5.0 sits exactly between grid points 4 and 6
    assert refine_one(4.0, 5.0, CFG150) == (4.0, 6.0)


def test_refine_swaps_reversed_endpoints():
    assert refine_one(30.0, 10.0, CFG150) == (10.0, 30.0)


def test_refine_grows_short_window_to_the_right():
    assert refine_one(10.0, 10.4, CFG150) == (10.0, 12.0)


def test_refine_grows_at_origin():
    assert refine_one(0.0, 0.3, CFG150) == (0.0, 2.0)


def test_refine_growth_shifts_inward_at_video_end():
    # both endpoints snap onto the last grid point; growth has to back off
    assert refine_one(149.9, 150.0, CFG150) == (148.0, 150.0)


def test_refine_keeps_end_on_grid_inside_video():
    # duration 11 puts the last grid point at 10; a window clamped to the
    # duration lands there, one step short of the raw clamp bound
    cfg = PostProcessConfig(clamp_to=11.0)
    assert refine_one(8.0, 123.0, cfg) == (8.0, 10.0)


def test_refine_shrinks_long_window():
    cfg = PostProcessConfig(clamp_to=100.0, max_len=4.0)
    # excess of 3 steps: 2 come off the start, 1 off the end
    assert refine_one(10.0, 20.0, cfg) == (14.0, 18.0)


def test_refine_when_no_whole_step_length_fits():
    # min 5 s needs 3 grid steps, max 5 s allows only 2; the smaller
    # bound yields, keeping windows at 3 steps (6 s)
    cfg = PostProcessConfig(clamp_to=100.0, min_len=5.0, max_len=5.0)
    assert refine_one(0.0, 20.0, cfg) == (8.0, 14.0)


def test_refine_finer_grid_with_coarser_min_len():
    cfg = PostProcessConfig(clamp_to=100.0, round_granularity=1.0, min_len=2.0)
    assert refine_one(3.4, 3.6, cfg) == (3.0, 5.0)


def test_postprocess_passes_scores_and_order_through():
    raw = [(20.0, 10.0, 0.2), (-3.0, 4.0, 0.9), (7.0, 7.0, 0.5)]
    out = postprocess(raw, CFG150)
    assert [p.score for p in out] == [0.2, 0.9, 0.5]
    # the point window snaps to 8 (3.5 grid steps ties up) and grows right
    assert [(p.start, p.end) for p in out] == [(10.0, 20.0), (0.0, 4.0), (8.0, 10.0)]


def test_postprocess_accepts_scored_intervals():
    items = [ScoredInterval(Interval(0.7, 9.1), 0.4)]
    out = postprocess(items, CFG150)
    assert (out[0].start, out[0].end, out[0].score) == (0.0, 10.0, 0.4)


def test_postprocess_rejects_non_finite_raw_windows():
    with pytest.raises(ValueError, match="finite"):
        postprocess([(0.0, float("nan"), 0.5)], CFG150)


def test_postprocess_empty():
    assert postprocess([], CFG150) == []


def _random_raw(rng, dur):
    # mostly in range, sometimes reversed, negative, or past the end
    lo = rng.uniform(-0.3 * dur, 1.3 * dur)
    hi = rng.uniform(-0.3 * dur, 1.3 * dur)
    if rng.random() < 0.3:
        hi = lo + rng.uniform(0.0, 1.0)   # near-degenerate
    return (lo, hi, rng.random())


@pytest.mark.parametrize(
    "cfg",
    [
        CFG150,
        PostProcessConfig(clamp_to=37.0),
        PostProcessConfig(clamp_to=100.0, clip_rate_r=1.0),
        PostProcessConfig(clamp_to=60.0, max_len=10.0),
        PostProcessConfig(clamp_to=45.0, round_granularity=4.0, min_len=6.0, max_len=20.0),
        PostProcessConfig(clamp_to=9.0, min_len=5.0),
    ],
)
def test_refine_invariants(cfg):
    rng = seeded(round(cfg.clamp_to * 1000) + round(cfg.min_len))
    g = cfg.round_granularity
    top = math.floor(cfg.clamp_to / g)
    kmin = math.ceil(cfg.min_len / g)
    kmax = math.floor((cfg.clamp_to if cfg.max_len is None else cfg.max_len) / g)
    kmax = max(kmax, kmin)

    raw = [_random_raw(rng, cfg.clamp_to) for _ in range(2000)]
    out = postprocess(raw, cfg)
    for item in out:
        s, e = item.start, item.end
        assert 0.0 <= s <= e <= cfg.clamp_to
        si = round(s / g)
        ei = round(e / g)
        # endpoints sit on the grid
        assert s == si * g and e == ei * g
        # length confined to whole-step bounds; a clamped edge may cost
        # one step off the minimum
        assert min(kmin, top) <= ei - si <= kmax

    again = postprocess(out, cfg)
    assert again == out


def test_refine_idempotent_on_adversarial_inputs():
    cases = [(-50.0, -10.0, 0.1), (500.0, 900.0, 0.2), (75.0, 75.0, 0.3), (0.0, 0.0, 0.4)]
    out = postprocess(cases, CFG150)
    assert postprocess(out, CFG150) == out
    for item in out:
        assert 0.0 <= item.start <= item.end <= 150.0


# ---------------------------------------------------------------------------
# clip_index_range
# ---------------------------------------------------------------------------


def test_clip_range_basic():
    assert clip_index_range(Interval(0, 10), 0.5, 75) == (0, 5)


def test_clip_range_partial_clips_round_outward():
    assert clip_index_range(Interval(0.1, 0.3), 0.5, 75) == (0, 1)
    assert clip_index_range(Interval(148.5, 150), 0.5, 75) == (74, 75)


def test_clip_range_zero_length_widens_toward_interior():
    assert clip_index_range(Interval(4, 4), 0.5, 10) == (2, 3)
    assert clip_index_range(Interval(0, 0), 0.5, 10) == (0, 1)


def test_clip_range_clamps_overlong_interval():
    assert clip_index_range(Interval(0, 1e6), 0.5, 10) == (0, 10)


def test_clip_range_outside_grid_raises():
    with pytest.raises(ValueError, match="outside the clip grid"):
        clip_index_range(Interval(200, 210), 0.5, 10)


def test_clip_range_validation():
    with pytest.raises(ValueError):
        clip_index_range(Interval(0, 1), 0.0, 10)
    with pytest.raises(ValueError):
        clip_index_range(Interval(0, 1), 0.5, 0)


def test_clip_range_always_covers_a_clip():
    rng = seeded(9)
    for _ in range(500):
        nc = rng.randint(1, 40)
        r = rng.choice([0.25, 0.5, 1.0, 2.0])
        dur = nc / r
        s = rng.uniform(0, dur * 0.999)
        e = rng.uniform(s, dur)
        lo, hi = clip_index_range(Interval(s, e), r, nc)
        assert 0 <= lo < hi <= nc


# ---------------------------------------------------------------------------
# blend_scores / rerank_with_verification
# ---------------------------------------------------------------------------


def test_blend_midpoint():
    assert blend_scores([0.5, 1.0], [0.0, 0.5], 0.5) == [0.25, 0.75]


def test_blend_endpoints_are_exact():
    a, b = [0.3, 0.9], [0.1, 0.2]
    assert blend_scores(a, b, 1.0) == a
    assert blend_scores(a, b, 0.0) == b


def test_blend_validation():
    with pytest.raises(ValueError, match="length"):
        blend_scores([1.0], [1.0, 2.0], 0.5)
    with pytest.raises(ValueError, match="weight"):
        blend_scores([1.0], [1.0], 1.5)
    with pytest.raises(ValueError, match="finite"):
        blend_scores([float("inf")], [1.0], 0.5)


def si(s, e, score):
    return ScoredInterval(Interval(s, e), score)


def test_rerank_reorders_by_blended_score():
    preds = [si(0, 10, 0.5), si(10, 20, 0.3)]
    out = rerank_with_verification(preds, [0.1, 0.9], 0.5)
    assert [(p.start, p.score) for p in out] == [(10.0, 0.6), (0.0, 0.3)]


def test_rerank_weight_zero_is_identity():
    preds = [si(5, 9, 0.2), si(0, 4, 0.8), si(2, 3, 0.4)]
    out = rerank_with_verification(preds, [0.9, 0.1, 0.5], 0.0)
    assert [(p.start, p.end, p.score) for p in out] == [
        (0.0, 4.0, 0.8),
        (2.0, 3.0, 0.4),
        (5.0, 9.0, 0.2),
    ]


def test_rerank_tie_prefers_earlier_start():
    preds = [si(10, 20, 0.4), si(0, 10, 0.4)]
    out = rerank_with_verification(preds, [0.4, 0.4], 0.5)
    assert [p.start for p in out] == [0.0, 10.0]


def test_rerank_validation():
    with pytest.raises(ValueError, match="length"):
        rerank_with_verification([si(0, 1, 0.5)], [], 0.5)
    with pytest.raises(ValueError, match="weight"):
        rerank_with_verification([si(0, 1, 0.5)], [0.5], -0.1)
    with pytest.raises(ValueError, match="finite"):
        rerank_with_verification([si(0, 1, 0.5)], [float("nan")], 0.5)
