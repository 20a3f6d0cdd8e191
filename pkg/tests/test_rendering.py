#!/usr/bin/env python3
"""
Tests for rendering: DOT Hasse diagrams and tab-separated tables.
"""

from rendering import render_poset_dot, render_table
from strata import fixed_components


class TestPosetDot:
    def test_chain(self):
        dot = render_poset_dot(fixed_components((1,), (1,), (1,)))
        assert dot.startswith("digraph poset {")
        assert "rankdir=BT;" in dot
        assert '"(0|1)" -> "(1|0)";' in dot
        assert dot.rstrip().endswith("}")

    def test_dims_and_name(self):
        dot = render_poset_dot(fixed_components((1,), (1,), (1,)), dims={"(1|0)": 3}, name="jordan")
        assert dot.startswith("digraph jordan {")
        assert '"(1|0)" [label="(1|0)\\ndim=3"];' in dot
        assert '"(0|1)" [label="(0|1)\\ndim=1"];' in dot

    def test_square_has_four_edges(self):
        dot = render_poset_dot(fixed_components((1, 1), (1, 1), (1, 1)))
        assert dot.count("->") == 4
        assert '"(0,0|1,1)" -> "(0,1|1,0)";' in dot


class TestTable:
    def test_key_value_rows(self):
        assert render_table({"b": 2, "a": [1, 2]}).splitlines() == ["key\tvalue", "b\t2", "[a]", "value", "1", "2"]

    def test_scalars_only(self):
        assert render_table({"stable": True}).splitlines() == ["key\tvalue", "stable\tTrue"]

    def test_list_of_records(self):
        result = {"count": 1, "strata": [{"v0": [0, 1], "lambda": [[2, 1]]}]}
        assert render_table(result).splitlines() == [
            "key\tvalue",
            "count\t1",
            "[strata]",
            "lambda\tv0",
            "2,1\t0,1",
        ]

    def test_nested_dicts_become_cells(self):
        lines = render_table({"membership": {"in_T0": True, "in_T0_minus": False}}).splitlines()
        assert lines == ["key\tvalue", "membership\tin_T0=True;in_T0_minus=False"]
