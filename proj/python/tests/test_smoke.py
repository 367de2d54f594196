import json
import math
import os
from pathlib import Path

import pytest

import curio_nav

SCENARIOS = Path(os.environ.get("CURIO_NAV_SCENARIOS", Path(__file__).resolve().parents[2] / "scenarios"))


def tiny_scenario():
    return json.dumps({
        "grid": ["#########", "#.......#", "#.......#", "#.......#", "#########"],
        "landmarks": [[2.0, 1.0], [6.0, 3.0]],
        "robot_start": [1.5, 2.5, 0.0],
        "goal": [6.5, 2.5],
        "params": {"tick_limit": 40, "tree_budget": 150},
    })


def test_step_matches_closed_form_arc():
    x, y, th = curio_nav.step((0.0, 0.0, 0.0), (1.0, math.pi / 2), 1.0)
    r = 2.0 / math.pi
    assert x == pytest.approx(r, abs=1e-12)
    assert y == pytest.approx(r, abs=1e-12)
    assert th == pytest.approx(math.pi / 2, abs=1e-12)


def test_enclosing_circle_of_square():
    cx, cy, r = curio_nav.enclosing_circle([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
    assert (cx, cy) == pytest.approx((1.0, 1.0))
    assert r == pytest.approx(math.sqrt(2.0))


def test_clusters_split_at_social_distance():
    groups = curio_nav.cluster_pedestrians([(0, 0), (1, 0), (5, 0)], 1.5)
    assert groups == [[0, 1], [2]]


def test_gaussian_pdf_peak():
    assert curio_nav.gaussian_pdf((0, 0), (0, 0), 2.0) == pytest.approx(1.0 / (4.0 * math.pi))


def test_bad_scenario_raises():
    with pytest.raises(curio_nav.ScenarioError):
        curio_nav.load_scenario('{"grid": []}')


def test_episode_is_deterministic_and_reports_metrics():
    s = curio_nav.load_scenario(tiny_scenario())
    assert s.grid_shape == (9, 5)
    a = curio_nav.run_episode(s, 4)
    b = curio_nav.run_episode(s, 4)
    assert a.trace_jsonl() == b.trace_jsonl()
    m = a.metrics
    assert set(m) >= {"RMSE", "TCM", "NM", "TD", "MD", "NT", "Vel", "Length", "Time"}
    assert m["ticks"] == a.tick_count
    assert a.render_svg(s).startswith("<?xml")


def test_bundled_hallway_loads():
    s = curio_nav.load_scenario_file(str(SCENARIOS / "hallway_30.json"))
    assert s.pedestrian_count == 30
