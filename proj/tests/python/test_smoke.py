# SPDX-License-Identifier: Apache-2.0
import json

import pytest

import delta_lca


def test_footprint_total(fixtures):
    fp = delta_lca.footprint(fixtures / "designs" / "footprint_basic.json")
    assert fp["totals"]["total_g_co2e"] == pytest.approx(13.379, abs=1e-9)
    assert not fp["totals"]["partial"]


def test_inventory_from_board(fixtures):
    inv = delta_lca.inventory(fixtures / "boards" / "small_50x40.brd")
    assert inv["board"]["area_mm2"] == pytest.approx(2000.0)
    assert inv["parts"]


def test_superset_comparison(fixtures):
    big = fixtures / "designs" / "base_plus_ic.json"
    small = fixtures / "designs" / "base.json"
    assert delta_lca.compare(big, small, direction="a-ge-b")["result"]["verdict"] == "proven"
    rev = delta_lca.compare(small, big, direction="a-ge-b")
    assert rev["result"]["verdict"] == "inconclusive"
    assert rev["tables"]["B"][0]["status"] == "unmatched"


def test_rule_flips_verdict(fixtures):
    a = fixtures / "designs" / "rules_a.json"
    b = fixtures / "designs" / "rules_b.json"
    assert delta_lca.compare(a, b)["result"]["verdict"] == "inconclusive"
    rules = json.loads((fixtures / "rules" / "rules_example.json").read_text())
    assert delta_lca.compare(a, b, rules=rules)["result"]["verdict"] == "proven"


def test_toy_problem_solve():
    problem = {
        "a": [{"id": f"a{i}", "weight": 10.0 if i >= 3 else None} for i in range(1, 6)],
        "b": [{"id": f"b{i}", "weight": 10.0 if i >= 3 else None} for i in range(1, 5)],
        "edges": [
            {"id": "h22", "a": ["a2"], "b": ["b2"]},
            {"id": "h23", "a": ["a2"], "b": ["b3"]},
            {"id": "h34", "a": ["a3"], "b": ["b4"]},
            {"id": "h44", "a": ["a4"], "b": ["b4"]},
        ],
    }
    result = delta_lca.solve(problem)
    assert result["objective"] == 3
    assert result["optimal"]
    assert result["unmatched_b"] == ["b1"]
    assert delta_lca.brute_force_optimum(problem) == 3


def test_errors(fixtures):
    with pytest.raises(delta_lca.ParseError) as exc:
        delta_lca.inventory(b"<eagle><drawing>", format="eagle")
    assert isinstance(exc.value.offset, int)
    with pytest.raises(delta_lca.ValidationError):
        delta_lca.solve({"a": [{"id": "a1", "weight": -1.0}], "b": [], "edges": []})
    with pytest.raises(ValueError):
        delta_lca.compare(fixtures / "designs" / "base.json", fixtures / "designs" / "base.json", direction="sideways")
