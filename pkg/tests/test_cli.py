"""Command-line interface: exit codes, determinism, artifacts, config plumbing."""

import contextlib
import io
import json
from pathlib import Path

import pytest

from quadkit.cli import _desk_plan, main
from quadkit.config import FULL_SCALE_PLAN, PLAN_DIVISOR
from quadkit.store import EpisodeStore
from quadkit.taxonomy import Split

from test_import import good_episode


def run_cli(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }


def collect_small(out: Path, *extra: str) -> tuple[int, str]:
    return run_cli("collect", "--out", str(out), "--task", "go_to",
                   "--count", "3", "--seed", "5", *extra)


def test_collect_writes_a_valid_store_and_prints_stats(tmp_path):
    code, out = collect_small(tmp_path / "store")
    assert code == 0
    assert "go_to" in out
    store = EpisodeStore.open(tmp_path / "store")
    assert store.episode_count == 3
    assert store.validate() == []


def test_collect_zero_episodes_is_a_valid_empty_run(tmp_path):
    code, _ = run_cli("collect", "--out", str(tmp_path / "store"),
                      "--task", "go_to", "--count", "0")
    assert code == 0
    assert EpisodeStore.open(tmp_path / "store").episode_count == 0


def test_collect_is_byte_deterministic(tmp_path):
    collect_small(tmp_path / "a")
    collect_small(tmp_path / "b")
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_worker_count_does_not_change_the_bytes(tmp_path):
    collect_small(tmp_path / "serial", "--workers", "1")
    collect_small(tmp_path / "parallel", "--workers", "2")
    assert tree_bytes(tmp_path / "serial") == tree_bytes(tmp_path / "parallel")


def test_collect_real_source_labels_episodes(tmp_path):
    code, _ = run_cli("collect", "--out", str(tmp_path / "store"), "--task",
                      "go_to", "--count", "2", "--source", "real")
    assert code == 0
    eps = list(EpisodeStore.open(tmp_path / "store").iter_episodes(load_images=False))
    assert all(ep.source == "real" for ep in eps)
    assert all(ep.task.split is Split.SEEN_REAL for ep in eps)


def test_default_plan_matches_the_scaled_down_budget():
    plan = {(task, source): count for task, count, source in _desk_plan()}
    for name, full in FULL_SCALE_PLAN.items():
        want = max(1, full // PLAN_DIVISOR)
        if name.endswith("_real"):
            assert plan[(name[: -len("_real")], "real")] == want
        else:
            assert plan[(name, "sim")] == want
    assert plan[("crawl", "sim")] == 1  # floor keeps every task present
    assert plan[("go_to", "real")] == 3


def test_eval_writes_deterministic_csv(tmp_path):
    code_a, out_a = run_cli("eval", "--policy", "oracle", "--suite", "dev_small",
                            "--seed", "3", "--out", str(tmp_path / "a"))
    code_b, out_b = run_cli("eval", "--policy", "oracle", "--suite", "dev_small",
                            "--seed", "3", "--out", str(tmp_path / "b"))
    assert code_a == code_b == 0
    assert "overall" in out_a
    csv_a = (tmp_path / "a" / "report.csv").read_text()
    csv_b = (tmp_path / "b" / "report.csv").read_text()
    assert csv_a == csv_b
    assert out_a == out_b


def test_eval_accepts_budget_files_and_unseen_splits(tmp_path):
    budgets = tmp_path / "budgets.json"
    budgets.write_text(json.dumps({"go_to": 2}))
    code, out = run_cli("eval", "--policy", "oracle", "--suite", str(budgets),
                        "--split", "unseen_object")
    assert code == 0
    assert "unseen_object" in out


def test_unknown_suite_and_policy_are_usage_errors(tmp_path):
    assert run_cli("eval", "--policy", "oracle", "--suite", "nope")[0] == 2
    assert run_cli("eval", "--policy", "telepathy", "--suite", "dev_small")[0] == 2


def test_bad_config_is_a_usage_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run_cli("--config", str(bad), "eval", "--policy", "oracle",
                      "--suite", "dev_small")
    assert code == 2


def test_config_env_var_is_honored(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sim": {"max_ticks": 2}}))
    monkeypatch.setenv("QUARD_CONFIG", str(cfg))
    code, out = collect_small(tmp_path / "store")
    assert code == 0
    eps = list(EpisodeStore.open(tmp_path / "store").iter_episodes(load_images=False))
    # Two ticks are never enough to reach the target: every episode times out.
    assert {ep.outcome for ep in eps} == {"timeout"}


def test_render_exports_trajectory_and_frames(tmp_path):
    collect_small(tmp_path / "store")
    store = EpisodeStore.open(tmp_path / "store")
    episode = next(store.iter_episodes(load_images=False))

    code, out = run_cli("render", "--store", str(tmp_path / "store"),
                        "--episode", episode.episode_id,
                        "--out", str(tmp_path / "viz"))
    assert code == 0
    assert episode.episode_id in out
    svg = (tmp_path / "viz" / "trajectory.svg").read_text()
    assert svg.startswith("<svg")
    assert episode.instruction in svg
    frames = sorted((tmp_path / "viz").glob("frame-*.ppm"))
    assert len(frames) == len(episode.steps)

    run_cli("render", "--store", str(tmp_path / "store"),
            "--episode", episode.episode_id, "--out", str(tmp_path / "viz2"))
    assert (tmp_path / "viz2" / "trajectory.svg").read_text() == svg


def test_render_missing_episode_is_a_usage_error(tmp_path):
    collect_small(tmp_path / "store")
    code, _ = run_cli("render", "--store", str(tmp_path / "store"),
                      "--episode", "ghost", "--out", str(tmp_path / "viz"))
    assert code == 2


def test_import_real_command_reports_counts(tmp_path):
    good_episode(tmp_path / "src" / "run-a")
    code, out = run_cli("import-real", "--src", str(tmp_path / "src"),
                        "--store", str(tmp_path / "store"))
    assert code == 0
    assert "imported 1" in out


def test_validate_exit_codes_follow_store_health(tmp_path):
    collect_small(tmp_path / "store")
    code, out = run_cli("validate", "--store", str(tmp_path / "store"))
    assert code == 0
    assert "store ok" in out

    shard = next((tmp_path / "store" / "shards").glob("*.rec"))
    data = bytearray(shard.read_bytes())
    data[-1] ^= 0x01
    shard.write_bytes(bytes(data))
    code, out = run_cli("validate", "--store", str(tmp_path / "store"))
    assert code == 1
    assert "sha256" in out


def test_missing_store_is_an_operational_error(tmp_path):
    code, _ = run_cli("stats", "--store", str(tmp_path / "nowhere"))
    assert code == 1


def test_stats_svg_artifact(tmp_path):
    collect_small(tmp_path / "store")
    svg_path = tmp_path / "chart.svg"
    code, _ = run_cli("stats", "--store", str(tmp_path / "store"),
                      "--svg", str(svg_path))
    assert code == 0
    assert svg_path.read_text().startswith("<svg")
