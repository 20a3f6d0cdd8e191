"""
Quiver data: vertices, edge multisets with loops, the doubled arrow set and the Cartan form.

- Quiver is an immutable value; arrows get stable integer ids (edge k yields 2k in the
  chosen orientation and 2k + 1 for its reversal, so h -> h ^ 1 is the involution).
- Dimension vectors are plain tuples of nonnegative ints in vertex order.
- Bundled quivers are loaded by name from the quivers/ directory next to this module.
"""

import json
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from errors import InvalidInputError

logger = logging.getLogger(__name__)

DimVector = tuple[int, ...]

QUIVER_DIR = Path(__file__).parent / "quivers"

_DYNKIN_PATTERN = re.compile(r"^(A|D|E|affine_A)(\d+)$")


@dataclass(frozen=True)
class Arrow:
    """One arrow of the doubled quiver."""

    id: int
    tail: int
    head: int
    edge: int

    @property
    def in_omega(self) -> bool:
        return self.id % 2 == 0

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Quiver:
    """A quiver with loops and parallel edges allowed, plus a chosen orientation."""

    vertices: tuple[str, ...]
    orientation: tuple[tuple[str, str], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInputError(f"Duplicate vertex labels in {self.vertices}")
        for tail, head in self.orientation:
            if tail not in self.vertices or head not in self.vertices:
                raise InvalidInputError(f"Edge ({tail}, {head}) uses an unknown vertex")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], name: str = "") -> "Quiver":
        vertices = tuple(str(x) for x in data.get("vertices", []))
        edges = [tuple(str(x) for x in e) for e in data.get("edges", [])]
        orientation = data.get("orientation")
        if orientation is None:
            orientation = edges
        orientation = [tuple(str(x) for x in e) for e in orientation]
        if len(orientation) != len(edges):
            raise InvalidInputError("Orientation must list one direction per edge")
        for edge, directed in zip(edges, orientation):
            if len(edge) != 2 or sorted(edge) != sorted(directed):
                raise InvalidInputError(f"Orientation {directed} does not match edge {edge}")
        return cls(vertices=vertices, orientation=tuple(orientation), name=name or data.get("name", ""))

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "edges": [sorted(e) for e in self.orientation],
            "orientation": [list(e) for e in self.orientation],
        }

    # -- structure --------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, label: str | int) -> int:
        """Vertex position for a label (ints are taken as positions)."""
        if isinstance(label, int) and not isinstance(label, bool):
            if 0 <= label < self.n:
                return label
            raise InvalidInputError(f"Vertex index {label} out of range")
        try:
            return self.vertices.index(str(label))
        except ValueError:
            raise InvalidInputError(f"Unknown vertex {label!r}")

    @cached_property
    def arrows(self) -> tuple[Arrow, ...]:
        result = []
        for k, (tail, head) in enumerate(self.orientation):
            t, h = self.vertices.index(tail), self.vertices.index(head)
            result.append(Arrow(id=2 * k, tail=t, head=h, edge=k))
            result.append(Arrow(id=2 * k + 1, tail=h, head=t, edge=k))
        return tuple(result)

    def arrow(self, h: int) -> Arrow:
        if not isinstance(h, int) or not 0 <= h < len(self.arrows):
            raise InvalidInputError(f"Unknown arrow {h!r}")
        return self.arrows[h]

    def out(self, h: int) -> int:
        return self.arrow(h).tail

    def in_(self, h: int) -> int:
        return self.arrow(h).head

    def bar(self, h: int) -> int:
        self.arrow(h)
        return h ^ 1

    def loops_at(self, i: int) -> int:
        return sum(1 for t, h in self.orientation if t == h == self.vertices[i])

    def is_loop_free(self, i: int) -> bool:
        return self.loops_at(i) == 0

    def arrows_out_of(self, i: int) -> list[Arrow]:
        return [a for a in self.arrows if a.tail == i]

    def arrows_into(self, i: int) -> list[Arrow]:
        return [a for a in self.arrows if a.head == i]

    # -- dimension vectors ------------------------------------------------

    def dim_vector(self, v: Sequence[int] | Mapping[str, int] | str) -> DimVector:
        """Normalize a list, a label mapping or a "1,0,2" string into a DimVector."""
        if isinstance(v, str):
            v = [int(x) for x in v.split(",") if x.strip() != ""] if v.strip() else []
        if isinstance(v, Mapping):
            entries = [0] * self.n
            for label, value in v.items():
                entries[self.index(label)] = int(value)
        else:
            entries = [int(x) for x in v]
        if len(entries) != self.n:
            raise InvalidInputError(f"Dimension vector {entries} has length {len(entries)}, expected {self.n}")
        if any(x < 0 for x in entries):
            raise InvalidInputError(f"Dimension vector {entries} has negative entries")
        return tuple(entries)

    def coordinate(self, i: int) -> DimVector:
        return tuple(1 if j == i else 0 for j in range(self.n))

    def zero(self) -> DimVector:
        return (0,) * self.n


def cartan_matrix(q: Quiver) -> np.ndarray:
    """Symmetric Cartan matrix: 2 - 2 * loops on the diagonal, minus edge counts off it."""
    c = 2 * np.eye(q.n, dtype=np.int64)
    for arrow in q.arrows[::2]:
        if arrow.is_loop:
            c[arrow.tail, arrow.tail] -= 2
        else:
            c[arrow.tail, arrow.head] -= 1
            c[arrow.head, arrow.tail] -= 1
    return c


def bilinear_form(q: Quiver, v: Sequence[int], v2: Sequence[int]) -> int:
    if len(v) != q.n or len(v2) != q.n:
        raise InvalidInputError(f"Vectors of length {len(v)}, {len(v2)} do not index {q.n} vertices")
    return int(np.asarray(v, dtype=np.int64) @ cartan_matrix(q) @ np.asarray(v2, dtype=np.int64))


def epsilon(q: Quiver, h: int) -> int:
    return 1 if q.arrow(h).in_omega else -1


def leq(v: Sequence[int], v2: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(v, v2, strict=True))


def add(v: Sequence[int], v2: Sequence[int]) -> DimVector:
    return tuple(x + y for x, y in zip(v, v2, strict=True))


def sub(v: Sequence[int], v2: Sequence[int]) -> DimVector:
    return tuple(x - y for x, y in zip(v, v2, strict=True))


def is_connected(q: Quiver, support: Iterable[int] | None = None) -> bool:
    """Whether the underlying graph restricted to `support` is connected (empty is not)."""
    nodes = set(range(q.n) if support is None else support)
    if not nodes:
        return False
    start = next(iter(nodes))
    seen = {start}
    frontier = [start]
    while frontier:
        i = frontier.pop()
        for a in q.arrows_out_of(i):
            if a.head in nodes and a.head not in seen:
                seen.add(a.head)
                frontier.append(a.head)
    return seen == nodes


def dynkin_quiver(label: str) -> Quiver:
    """A_n, D_n (n >= 4), E6/E7/E8 and affine_A<n> with a linear orientation."""
    match = _DYNKIN_PATTERN.match(label)
    if not match:
        raise InvalidInputError(f"Unknown Dynkin label {label!r}")
    kind, n = match.group(1), int(match.group(2))
    if kind == "A" and n >= 1:
        edges = [(i, i + 1) for i in range(n - 1)]
        size = n
    elif kind == "D" and n >= 4:
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        size = n
    elif kind == "E" and n in (6, 7, 8):
        edges = [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]
        size = n
    elif kind == "affine_A" and n >= 1:
        size = n + 1
        edges = [(i, i + 1) for i in range(n)] + [(n, 0)] if n > 1 else [(0, 1), (0, 1)]
    else:
        raise InvalidInputError(f"Unsupported Dynkin label {label!r}")
    vertices = tuple(str(i) for i in range(size))
    orientation = tuple((str(t), str(h)) for t, h in edges)
    return Quiver(vertices=vertices, orientation=orientation, name=label)


def load_quiver(name_or_path: str | Path) -> Quiver:
    """Load a bundled quiver by name (e.g. "jordan") or a quiver JSON file."""
    path = Path(name_or_path)
    if not path.suffix:
        bundled = QUIVER_DIR / f"{name_or_path}.json"
        if bundled.exists():
            path = bundled
        elif _DYNKIN_PATTERN.match(str(name_or_path)):
            return dynkin_quiver(str(name_or_path))
    elif not path.exists() and (QUIVER_DIR / path.name).exists():
        path = QUIVER_DIR / path.name
    if not path.exists():
        raise InvalidInputError(f"Quiver file not found: {name_or_path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Quiver file {path} is not valid JSON: {e}")
    logger.debug(f"Loaded quiver from {path}")
    return Quiver.from_dict(data, name=data.get("name", path.stem))
