"""
JSON formats for quivers, representations, component posets and correspondence classes.

Pydantic models validate the files; the to_*/from_* helpers convert to domain objects.

Matrix entries are [re, im] pairs for complex data. A rep whose entries are all integers
or "p/q" strings loads as an exact rational rep. Class blocks are stored sparsely as
{"beta", "alpha", "entries"} with entries a row-major list of [num, den] pairs; blocks
that are not listed are zero.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from coproduct import TRIPLE_PATTERNS, ComponentPoset, CorrClass, TripleClass, TriplePoset
from errors import InvalidInputError
from quiver_core import Quiver, load_quiver
from representation import FramingSplit, Rep
from strata import TripleComponent
from subspaces import fraction_zeros

logger = logging.getLogger(__name__)

Entry = Union[int, str, float, list[float]]


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class QuiverModel(BaseModel):
    name: str = Field(default="")
    vertices: list[str] = Field(min_length=1)
    edges: list[list[str]] = Field(default_factory=list)
    orientation: list[list[str]] | None = Field(default=None)

    @field_validator("edges", "orientation")
    @classmethod
    def validate_pairs(cls, v):
        if v is not None and any(len(e) != 2 for e in v):
            raise ValueError("Edges must be vertex pairs")
        return v


class SplitModel(BaseModel):
    w1: dict[str, int] = Field(default_factory=dict)


class RepModel(BaseModel):
    quiver: str | QuiverModel | None = Field(default=None)
    v: dict[str, int]
    w: dict[str, int]
    B: dict[str, list[list[Entry]]] = Field(default_factory=dict)
    a: dict[str, list[list[Entry]]] = Field(default_factory=dict)
    b: dict[str, list[list[Entry]]] = Field(default_factory=dict)
    split: SplitModel | None = Field(default=None)

    @field_validator("v", "w")
    @classmethod
    def validate_dims(cls, v: dict[str, int]) -> dict[str, int]:
        if any(x < 0 for x in v.values()):
            raise ValueError("Dimensions must be nonnegative")
        return v


class ComponentModel(BaseModel):
    label: str
    dim: int = Field(default=1, ge=0)
    group: str = Field(default="0")


class PosetModel(BaseModel):
    components: list[ComponentModel]
    order: list[list[str]] = Field(default_factory=list)


class BlockModel(BaseModel):
    beta: str
    alpha: str
    entries: list[list[int]]

    @field_validator("entries")
    @classmethod
    def validate_entries(cls, v: list[list[int]]) -> list[list[int]]:
        for pair in v:
            if len(pair) != 2 or pair[1] == 0:
                raise ValueError("Entries are [num, den] pairs with den != 0")
        return v


class ClassModel(BaseModel):
    blocks: list[BlockModel] = Field(default_factory=list)


class TripleComponentModel(BaseModel):
    v1: list[int]
    v2: list[int]
    v3: list[int]
    dim: int = Field(default=1, ge=0)


class TripleModel(BaseModel):
    components: list[TripleComponentModel]
    classes: dict[str, ClassModel]

    @field_validator("classes")
    @classmethod
    def validate_patterns(cls, v: dict[str, ClassModel]) -> dict[str, ClassModel]:
        if set(v) != set(TRIPLE_PATTERNS):
            raise ValueError(f"Need exactly the classes {', '.join(TRIPLE_PATTERNS)}")
        return v


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise InvalidInputError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}")


def _validate(model_cls, data: Any, what: str):
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise InvalidInputError(f"Invalid {what}: {'.'.join(map(str, first['loc']))}: {first['msg']}") from e


def quiver_from_dict(data: Any) -> Quiver:
    model = _validate(QuiverModel, data, "quiver")
    return Quiver.from_dict(model.model_dump(), name=model.name)


def _is_exact_entry(x: Entry) -> bool:
    return isinstance(x, (int, str)) and not isinstance(x, bool)


def _matrix(rows: list[list[Entry]] | None, shape: tuple[int, int], exact: bool) -> np.ndarray:
    if not rows or shape[0] == 0 or shape[1] == 0:
        if rows and any(rows) and (shape[0] == 0 or shape[1] == 0):
            raise InvalidInputError(f"Matrix data given for an empty {shape} block")
        return fraction_zeros(*shape) if exact else np.zeros(shape, dtype=complex)
    if len(rows) != shape[0] or any(len(row) != shape[1] for row in rows):
        raise InvalidInputError(f"Matrix has the wrong shape, expected {shape}")
    if exact:
        out = fraction_zeros(*shape)
        for (r, c), x in np.ndenumerate(np.array(rows, dtype=object)):
            try:
                out[r, c] = Fraction(x)
            except (ValueError, ZeroDivisionError) as e:
                raise InvalidInputError(f"Invalid rational entry {x!r}: {e}")
        return out
    out = np.zeros(shape, dtype=complex)
    for r, row in enumerate(rows):
        for c, x in enumerate(row):
            if isinstance(x, list):
                if len(x) != 2:
                    raise InvalidInputError(f"Complex entries are [re, im] pairs, got {x}")
                out[r, c] = complex(x[0], x[1])
            elif isinstance(x, str):
                out[r, c] = float(Fraction(x))
            else:
                out[r, c] = x
    return out


def rep_from_dict(data: Any, quiver: Quiver | None = None) -> tuple[Rep, FramingSplit | None]:
    model = _validate(RepModel, data, "representation")
    q = quiver
    if q is None:
        if model.quiver is None:
            raise InvalidInputError("The representation names no quiver; pass one explicitly")
        q = load_quiver(model.quiver) if isinstance(model.quiver, str) else quiver_from_dict(model.quiver.model_dump())
    v, w = q.dim_vector(model.v), q.dim_vector(model.w)

    all_rows = [row for part in (model.B, model.a, model.b) for m in part.values() for row in m]
    exact = all(_is_exact_entry(x) for row in all_rows for x in row)

    for key in model.B:
        if not key.isdigit():
            raise InvalidInputError(f"Arrow keys are integer ids, got {key!r}")
        q.arrow(int(key))
    B = [_matrix(model.B.get(str(h.id)), (v[h.head], v[h.tail]), exact) for h in q.arrows]
    a, b = [], []
    for i, label in enumerate(q.vertices):
        a.append(_matrix(model.a.get(label), (v[i], w[i]), exact))
        b.append(_matrix(model.b.get(label), (w[i], v[i]), exact))
    for part in (model.a, model.b):
        for label in part:
            q.index(label)
    rep = Rep(q, v, w, tuple(B), tuple(a), tuple(b))

    split = None
    if model.split is not None:
        w1 = q.dim_vector(model.split.w1)
        if any(x > y for x, y in zip(w1, w)):
            raise InvalidInputError(f"Split w1 = {w1} exceeds w = {w}")
        split = FramingSplit.from_dims(w1, tuple(y - x for x, y in zip(w1, w)))
    return rep, split


def poset_from_dict(data: Any) -> ComponentPoset:
    model = _validate(PosetModel, data, "poset")
    labels = [c.label for c in model.components]
    order = set()
    for pair in model.order:
        if len(pair) != 2:
            raise InvalidInputError(f"Order entries are [beta, alpha] pairs, got {pair}")
        order.add((_label_index(labels, pair[0]), _label_index(labels, pair[1])))
    return ComponentPoset(
        labels=tuple(labels),
        dims=tuple(c.dim for c in model.components),
        order=frozenset(order),
        groups=tuple(c.group for c in model.components),
    )


def _label_index(labels: list[str], label: str) -> int:
    try:
        return labels.index(label)
    except ValueError:
        raise InvalidInputError(f"Unknown component {label!r}")


def _fill_blocks(blocks: list[BlockModel], labels: list[str], offsets, dims, size: int) -> np.ndarray:
    matrix = fraction_zeros(size, size)
    for block in blocks:
        beta, alpha = _label_index(labels, block.beta), _label_index(labels, block.alpha)
        rows, cols = dims[beta], dims[alpha]
        if len(block.entries) != rows * cols:
            raise InvalidInputError(f"Block ({block.beta}, {block.alpha}) needs {rows * cols} entries")
        for k, (num, den) in enumerate(block.entries):
            matrix[offsets[beta] + k // cols, offsets[alpha] + k % cols] = Fraction(num, den)
    return matrix


def class_from_dict(data: Any, poset: ComponentPoset) -> CorrClass:
    model = _validate(ClassModel, data, "class")
    matrix = _fill_blocks(model.blocks, list(poset.labels), poset.offsets, poset.dims, poset.total_dim)
    return CorrClass(poset, matrix)


def triple_from_dict(data: Any) -> tuple[TripleClass, TripleClass, TripleClass, TripleClass]:
    """The four classes (12,3), (1,23), ((1,2),3), (1,(2,3)) on one triple poset."""
    model = _validate(TripleModel, data, "triple classes")
    components = tuple(TripleComponent(tuple(c.v1), tuple(c.v2), tuple(c.v3)) for c in model.components)
    poset = TriplePoset(components, tuple(c.dim for c in model.components))
    labels = [c.label() for c in components]
    return tuple(
        TripleClass(
            poset,
            pattern,
            _fill_blocks(model.classes[pattern].blocks, labels, poset.offsets, poset.dims, poset.total_dim),
        )
        for pattern in TRIPLE_PATTERNS
    )


# ---------------------------------------------------------------------------
# Dumping
# ---------------------------------------------------------------------------


def entry_to_json(x) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    x = complex(x)
    return [x.real, x.imag]


def matrix_to_json(m: np.ndarray) -> list[list[Any]]:
    return [[entry_to_json(x) for x in row] for row in m.tolist()]


def rep_to_dict(r: Rep, split: FramingSplit | None = None) -> dict[str, Any]:
    q = r.quiver
    data: dict[str, Any] = {
        "quiver": q.name if q.name else q.to_dict(),
        "v": dict(zip(q.vertices, r.v)),
        "w": dict(zip(q.vertices, r.w)),
        "B": {str(h.id): matrix_to_json(r.B[h.id]) for h in q.arrows},
        "a": {label: matrix_to_json(r.a[i]) for i, label in enumerate(q.vertices)},
        "b": {label: matrix_to_json(r.b[i]) for i, label in enumerate(q.vertices)},
    }
    if split is not None:
        data["split"] = {"w1": dict(zip(q.vertices, split.dims(0)))}
    return RepModel.model_validate(data).model_dump(exclude_none=True)


def poset_to_dict(poset: ComponentPoset) -> dict[str, Any]:
    return PosetModel(
        components=[
            ComponentModel(label=label, dim=dim, group=group)
            for label, dim, group in zip(poset.labels, poset.dims, poset.groups)
        ],
        order=[
            [poset.labels[beta], poset.labels[alpha]] for beta, alpha in sorted(poset.order) if beta != alpha
        ],
    ).model_dump()


def _blocks(matrix: np.ndarray, labels, offsets, dims) -> list[BlockModel]:
    blocks = []
    for beta, alpha in np.ndindex(len(labels), len(labels)):
        block = matrix[offsets[beta] : offsets[beta + 1], offsets[alpha] : offsets[alpha + 1]]
        if block.size and any(x != 0 for x in block.flatten()):
            entries = [[Fraction(x).numerator, Fraction(x).denominator] for x in block.flatten()]
            blocks.append(BlockModel(beta=labels[beta], alpha=labels[alpha], entries=entries))
    return blocks


def class_to_dict(c: CorrClass) -> dict[str, Any]:
    poset = c.poset
    return ClassModel(blocks=_blocks(c.matrix, poset.labels, poset.offsets, poset.dims)).model_dump()


def triple_to_dict(classes: tuple[TripleClass, ...]) -> dict[str, Any]:
    poset = classes[0].poset
    labels = [c.label() for c in poset.components]
    return TripleModel(
        components=[
            TripleComponentModel(v1=list(c.v1), v2=list(c.v2), v3=list(c.v3), dim=d)
            for c, d in zip(poset.components, poset.dims)
        ],
        classes={
            c.pattern: ClassModel(blocks=_blocks(c.matrix, labels, poset.offsets, poset.dims)) for c in classes
        },
    ).model_dump()


def dumps(data: Any) -> str:
    """Canonical JSON for command output."""
    return json.dumps(data, sort_keys=True, default=entry_to_json)
