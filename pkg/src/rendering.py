"""Text renderings of command results: DOT graphs for component posets and tab-separated tables."""

import logging
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader, select_autoescape

from strata import FixedComponent, hasse_edges

logger = logging.getLogger(__name__)

# Template directory
_TEMPLATE_DIR = Path(__file__).parent / "templates"

# Jinja2 environment
_jinja_env = Environment(
    loader=FileSystemLoader(str(_TEMPLATE_DIR)),
    autoescape=select_autoescape(["html"]),
    enable_async=False,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render_poset_dot(components: list[FixedComponent], dims: dict[str, int] | None = None, name: str = "poset") -> str:
    """Hasse diagram of the component poset, smaller components at the bottom."""
    nodes = [{"label": c.label(), "dim": (dims or {}).get(c.label(), 1)} for c in components]
    edges = [(lower.label(), upper.label()) for lower, upper in hasse_edges(components)]
    return _jinja_env.get_template("poset.dot.j2").render(name=name, nodes=nodes, edges=edges)


def _cell(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(_cell(x) for x in value)
    if isinstance(value, dict):
        return ";".join(f"{k}={_cell(v)}" for k, v in sorted(value.items()))
    return str(value)


def render_table(result: Any) -> str:
    """Tab-separated rendering of a JSON-style command result.

    Lists of dicts become one table, dicts of scalars become key/value rows and dicts of
    lists become one titled section per key.
    """
    sections = []

    def as_rows(value: Any) -> dict[str, list]:
        if isinstance(value, list) and value and all(isinstance(x, dict) for x in value):
            header = sorted({k for x in value for k in x})
            return {"header": header, "body": [[_cell(x.get(k, "")) for k in header] for x in value]}
        if isinstance(value, dict):
            return {"header": ["key", "value"], "body": [[k, _cell(v)] for k, v in sorted(value.items())]}
        if isinstance(value, list):
            return {"header": ["value"], "body": [[_cell(x)] for x in value]}
        return {"header": ["value"], "body": [[_cell(value)]]}

    if isinstance(result, dict) and any(isinstance(v, list) for v in result.values()):
        scalars = {k: v for k, v in result.items() if not isinstance(v, list)}
        if scalars:
            sections.append(("", as_rows(scalars)))
        for key, value in sorted(result.items()):
            if isinstance(value, list):
                sections.append((f"[{key}]", as_rows(value)))
    else:
        sections.append(("", as_rows(result)))
    return _jinja_env.get_template("table.txt.j2").render(sections=sections)
