"""Mix policies: exact totals, prefix ratios, determinism, shortage errors."""

import math

import pytest

from quadkit.store import MixMode, MixPolicy, StoreError, mix_stream

from test_store import make_episode


def pools(n_sim: int, n_real: int):
    sim = [make_episode(i, source="sim", n_steps=1) for i in range(n_sim)]
    real = [make_episode(10_000 + i, source="real", n_steps=1) for i in range(n_real)]
    return sim, real


def test_totals_are_exact_for_every_policy():
    sim, real = pools(300, 40)
    for s, r in ((0, 30), (256, 30), (17, 23), (300, 40)):
        stream = mix_stream(MixPolicy(s, r), sim, real, seed=1)
        assert len(stream) == s + r
        assert sum(ep.source == "sim" for ep in stream) == s
        assert sum(ep.source == "real" for ep in stream) == r


def test_exhaustive_prefixes_track_the_ratio():
    sim, real = pools(256, 30)
    policy = MixPolicy(256, 30, MixMode.EXHAUSTIVE)
    stream = mix_stream(policy, sim, real, seed=0)
    total = 256 + 30
    seen_sim = 0
    for i, ep in enumerate(stream, start=1):
        seen_sim += ep.source == "sim"
        # Never ahead of the ceiling quota, never more than one behind.
        quota = math.ceil(i * 256 / total)
        assert quota - 1 <= seen_sim <= quota


def test_zero_sim_policy_emits_no_sim_episodes():
    sim, real = pools(100, 30)
    stream = mix_stream(MixPolicy(0, 30), sim, real, seed=3)
    assert len(stream) == 30
    assert all(ep.source == "real" for ep in stream)


def test_streams_are_deterministic_in_seed():
    sim, real = pools(120, 30)
    for mode in MixMode:
        policy = MixPolicy(64, 16, mode)
        a = [ep.episode_id for ep in mix_stream(policy, sim, real, seed=9)]
        b = [ep.episode_id for ep in mix_stream(policy, sim, real, seed=9)]
        assert a == b
    weighted = MixPolicy(64, 16, MixMode.WEIGHTED_STREAM)
    c = [ep.episode_id for ep in mix_stream(weighted, sim, real, seed=10)]
    assert c != [ep.episode_id for ep in mix_stream(weighted, sim, real, seed=9)]


def test_weighted_stream_holds_the_full_pass_ratio():
    sim, real = pools(90, 30)
    stream = mix_stream(MixPolicy(60, 20, MixMode.WEIGHTED_STREAM), sim, real, seed=5)
    assert sum(ep.source == "sim" for ep in stream) == 60
    assert sum(ep.source == "real" for ep in stream) == 20


def test_pool_shortage_raises_store_error():
    sim, real = pools(10, 5)
    with pytest.raises(StoreError):
        mix_stream(MixPolicy(11, 5), sim, real)
    with pytest.raises(StoreError):
        mix_stream(MixPolicy(10, 6), sim, real)


def test_invalid_policies_are_rejected():
    with pytest.raises(ValueError):
        MixPolicy(-1, 5)
    with pytest.raises(ValueError):
        MixPolicy(0, 0)


def test_subsampling_preserves_pool_order_in_exhaustive_mode():
    sim, real = pools(50, 10)
    stream = mix_stream(MixPolicy(20, 10), sim, real, seed=2)
    sim_ids = [ep.episode_id for ep in stream if ep.source == "sim"]
    assert sim_ids == sorted(sim_ids)
