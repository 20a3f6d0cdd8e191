"""
Points (B, a, b) of the framed representation space and computations on them.

- moment map, gauge / torus / framing actions, stability for zeta = (1, ..., 1)
- invariant records: cycle traces and hub matrices b B...B a up to a length cap
- membership in the attracting sets for a framing split, by invariant-subspace saturation
- Gauss-Newton solver for the moment map equation and the numeric tangent dimension

A Rep is exact when every matrix is a numpy object array of Fraction; exact reps are
handled with sympy rank computations, everything else with an SVD rank threshold.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from errors import ConvergenceError, InvalidInputError
from quiver_core import DimVector, Quiver, epsilon
from subspaces import (
    DEFAULT_TOL,
    NumericBackend,
    backend_for,
    fraction_identity,
    fraction_zeros,
)

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 1e-8


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Rep:
    """B[h]: V_out(h) -> V_in(h), a[i]: W_i -> V_i, b[i]: V_i -> W_i."""

    quiver: Quiver
    v: DimVector
    w: DimVector
    B: tuple[np.ndarray, ...]
    a: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...]

    def __post_init__(self):
        q = self.quiver
        if len(self.v) != q.n or len(self.w) != q.n:
            raise InvalidInputError(f"Dimension vectors {self.v}, {self.w} do not match {q.n} vertices")
        if len(self.B) != len(q.arrows) or len(self.a) != q.n or len(self.b) != q.n:
            raise InvalidInputError("Rep needs one B per arrow and one a, b per vertex")
        for arrow in q.arrows:
            expected = (self.v[arrow.head], self.v[arrow.tail])
            if self.B[arrow.id].shape != expected:
                raise InvalidInputError(f"B[{arrow.id}] has shape {self.B[arrow.id].shape}, expected {expected}")
        for i in range(q.n):
            if self.a[i].shape != (self.v[i], self.w[i]):
                raise InvalidInputError(f"a[{i}] has shape {self.a[i].shape}, expected {(self.v[i], self.w[i])}")
            if self.b[i].shape != (self.w[i], self.v[i]):
                raise InvalidInputError(f"b[{i}] has shape {self.b[i].shape}, expected {(self.w[i], self.v[i])}")

    @property
    def is_exact(self) -> bool:
        return all(m.dtype == object for m in (*self.B, *self.a, *self.b))

    def matrices(self) -> list[np.ndarray]:
        return [*self.B, *self.a, *self.b]

    def replace(self, B=None, a=None, b=None) -> "Rep":
        return Rep(
            self.quiver,
            self.v,
            self.w,
            tuple(self.B if B is None else B),
            tuple(self.a if a is None else a),
            tuple(self.b if b is None else b),
        )

    def to_complex(self) -> "Rep":
        def conv(m):
            return np.asarray(m.astype(complex) if m.dtype == object else m, dtype=complex)

        return Rep(self.quiver, self.v, self.w, *(tuple(conv(m) for m in part) for part in (self.B, self.a, self.b)))

    @classmethod
    def zero(cls, q: Quiver, v: DimVector, w: DimVector, exact: bool = False) -> "Rep":
        make = fraction_zeros if exact else (lambda r, c: np.zeros((r, c), dtype=complex))
        return cls(
            q,
            tuple(v),
            tuple(w),
            tuple(make(v[h.head], v[h.tail]) for h in q.arrows),
            tuple(make(v[i], w[i]) for i in range(q.n)),
            tuple(make(w[i], v[i]) for i in range(q.n)),
        )

    @classmethod
    def random(
        cls, q: Quiver, v: DimVector, w: DimVector, rng: np.random.Generator, exact: bool = False
    ) -> "Rep":
        def make(r, c):
            if exact:
                ints = rng.integers(-2, 3, size=(r, c))
                out = fraction_zeros(r, c)
                for idx in np.ndindex(r, c):
                    out[idx] = Fraction(int(ints[idx]))
                return out
            return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))

        return cls(
            q,
            tuple(v),
            tuple(w),
            tuple(make(v[h.head], v[h.tail]) for h in q.arrows),
            tuple(make(v[i], w[i]) for i in range(q.n)),
            tuple(make(w[i], v[i]) for i in range(q.n)),
        )


@dataclass(frozen=True)
class FramingSplit:
    """Per vertex, the coordinate indices of W_i belonging to each part W^1, W^2, ..."""

    parts: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_dims(cls, *dims: Sequence[int]) -> "FramingSplit":
        """Consecutive coordinate blocks: the first dims[0][i] coordinates of W_i form W^1_i, etc."""
        if not dims:
            raise InvalidInputError("A framing split needs at least one part")
        n = len(dims[0])
        parts = []
        for i in range(n):
            offset, per_vertex = 0, []
            for d in dims:
                per_vertex.append(tuple(range(offset, offset + d[i])))
                offset += d[i]
            parts.append(tuple(per_vertex))
        return cls(tuple(parts))

    @property
    def k(self) -> int:
        return len(self.parts[0]) if self.parts else 0

    def dims(self, p: int) -> DimVector:
        return tuple(len(per_vertex[p]) for per_vertex in self.parts)

    def total(self) -> DimVector:
        return tuple(sum(len(x) for x in per_vertex) for per_vertex in self.parts)

    def indices(self, i: int, parts: Sequence[int]) -> list[int]:
        return sorted(idx for p in parts for idx in self.parts[i][p])

    def check(self, r: Rep) -> None:
        if len(self.parts) != r.quiver.n or self.total() != tuple(r.w):
            raise InvalidInputError(f"Framing split {self.total()} does not match w = {r.w}")
        for per_vertex, wi in zip(self.parts, r.w):
            if sorted(idx for part in per_vertex for idx in part) != list(range(wi)):
                raise InvalidInputError("Framing split parts must partition the coordinates of W")


@dataclass
class InvariantRecord:
    """Cycle traces keyed by arrow word; hubs keyed by (start vertex, arrow word)."""

    cap: int
    w: DimVector
    traces: dict[tuple[int, ...], complex | Fraction] = field(default_factory=dict)
    hubs: dict[tuple[int, tuple[int, ...]], np.ndarray] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def word(ws):
            return ".".join(str(h) for h in ws)

        def entry(x):
            if isinstance(x, Fraction):
                return str(x)
            x = complex(x)
            return [x.real, x.imag]

        return {
            "cap": self.cap,
            "traces": {word(k): entry(val) for k, val in sorted(self.traces.items())},
            "hubs": {
                f"{start}:{word(k)}": [[entry(x) for x in row] for row in m.tolist()]
                for (start, k), m in sorted(self.hubs.items())
            },
        }


@dataclass(frozen=True)
class Membership:
    in_T0: bool
    in_T0_tilde: bool
    in_T0_minus: bool

    def to_dict(self) -> dict:
        return {"in_T0": self.in_T0, "in_T0_tilde": self.in_T0_tilde, "in_T0_minus": self.in_T0_minus}


# ---------------------------------------------------------------------------
# Moment map and group actions
# ---------------------------------------------------------------------------


def moment_map(r: Rep) -> list[np.ndarray]:
    q = r.quiver
    result = []
    for i in range(q.n):
        mu = r.a[i] @ r.b[i]
        for arrow in q.arrows_into(i):
            mu = mu + epsilon(q, arrow.id) * (r.B[arrow.id] @ r.B[arrow.id ^ 1])
        result.append(mu)
    return result


def moment_residual(r: Rep) -> float:
    values = [np.abs(np.asarray(m, dtype=complex)).max() for m in moment_map(r) if m.size]
    return float(max(values, default=0.0))


def _backend(r: Rep, tol: float):
    return backend_for(r.is_exact, tol)


def _inverses(g: Sequence[np.ndarray], r: Rep, tol: float) -> list[np.ndarray]:
    backend = _backend(r, tol)
    inverses = []
    for i, gi in enumerate(g):
        if gi.shape != (r.v[i], r.v[i]):
            raise InvalidInputError(f"g[{i}] has shape {gi.shape}, expected {(r.v[i], r.v[i])}")
        inverses.append(backend.inverse(gi))
    return inverses


def gauge_act(g: Sequence[np.ndarray], r: Rep, tol: float = DEFAULT_TOL) -> Rep:
    if len(g) != r.quiver.n:
        raise InvalidInputError("Gauge element needs one matrix per vertex")
    g_inv = _inverses(g, r, tol)
    B = [g[h.head] @ r.B[h.id] @ g_inv[h.tail] for h in r.quiver.arrows]
    a = [g[i] @ r.a[i] for i in range(r.quiver.n)]
    b = [r.b[i] @ g_inv[i] for i in range(r.quiver.n)]
    return r.replace(B=B, a=a, b=b)


def framing_act(g: Sequence[np.ndarray], r: Rep, tol: float = DEFAULT_TOL) -> Rep:
    """G_W acts by a -> a g^-1, b -> g b."""
    if len(g) != r.quiver.n:
        raise InvalidInputError("Framing group element needs one matrix per vertex")
    backend = _backend(r, tol)
    g_inv = []
    for i, gi in enumerate(g):
        if gi.shape != (r.w[i], r.w[i]):
            raise InvalidInputError(f"g[{i}] has shape {gi.shape}, expected {(r.w[i], r.w[i])}")
        g_inv.append(backend.inverse(gi))
    return r.replace(
        a=[r.a[i] @ g_inv[i] for i in range(r.quiver.n)],
        b=[g[i] @ r.b[i] for i in range(r.quiver.n)],
    )


def lambda_act(t, r: Rep, s: FramingSplit) -> Rep:
    """One-parameter subgroup id_{W^1} + t id_{W^2}; a sequence gives one scalar per part."""
    s.check(r)
    scalars = list(t) if isinstance(t, Sequence) else [1] + [t] * (s.k - 1)
    if len(scalars) != s.k or any(x == 0 for x in scalars):
        raise InvalidInputError(f"Need {s.k} nonzero scalars for the framing split")
    a, b = [], []
    for i in range(r.quiver.n):
        scale = [None] * r.w[i]
        for p, x in enumerate(scalars):
            for idx in s.parts[i][p]:
                scale[idx] = x
        ai, bi = r.a[i].copy(), r.b[i].copy()
        for idx, x in enumerate(scale):
            inv = Fraction(1, 1) / x if r.is_exact else 1 / x
            ai[:, idx] = ai[:, idx] * inv
            bi[idx, :] = bi[idx, :] * x
        a.append(ai)
        b.append(bi)
    return r.replace(a=a, b=b)


def torus_act(t1, t2, r: Rep) -> Rep:
    if t1 == 0 or t2 == 0:
        raise InvalidInputError("Torus parameters must be nonzero")
    B = [(t1 if h.in_omega else t2) * r.B[h.id] for h in r.quiver.arrows]
    return r.replace(B=B, b=[(t1 * t2) * bi for bi in r.b])


def direct_sum(r1: Rep, r2: Rep) -> Rep:
    """Block-diagonal sum; the framing of the result is W(r1) followed by W(r2)."""
    if r1.quiver != r2.quiver:
        raise InvalidInputError("Direct sum needs reps of the same quiver")
    exact = r1.is_exact and r2.is_exact
    if not exact:
        r1, r2 = r1.to_complex(), r2.to_complex()
    zeros = fraction_zeros if exact else (lambda rows, cols: np.zeros((rows, cols), dtype=complex))

    def block(m1, m2):
        top = np.hstack([m1, zeros(m1.shape[0], m2.shape[1])])
        bottom = np.hstack([zeros(m2.shape[0], m1.shape[1]), m2])
        return np.vstack([top, bottom])

    q = r1.quiver
    v = tuple(x + y for x, y in zip(r1.v, r2.v))
    w = tuple(x + y for x, y in zip(r1.w, r2.w))
    return Rep(
        q,
        v,
        w,
        tuple(block(r1.B[h], r2.B[h]) for h in range(len(q.arrows))),
        tuple(block(r1.a[i], r2.a[i]) for i in range(q.n)),
        tuple(block(r1.b[i], r2.b[i]) for i in range(q.n)),
    )


# ---------------------------------------------------------------------------
# Stability and membership
# ---------------------------------------------------------------------------


def is_stable(r: Rep, tol: float = DEFAULT_TOL) -> bool:
    """No nonzero B-invariant graded subspace inside Ker b.

    K_i is carried as ker(A_i); pulling back along B_h appends the rows A_in(h) B_h.
    """
    backend = _backend(r, tol)
    q = r.quiver
    constraints = [backend.row_basis(r.b[i]) for i in range(q.n)]
    while True:
        updated = []
        for i in range(q.n):
            stacked = [constraints[i]] + [constraints[h.head] @ r.B[h.id] for h in q.arrows_out_of(i)]
            updated.append(backend.row_basis(np.vstack(stacked)))
        if all(u.shape[0] == c.shape[0] for u, c in zip(updated, constraints)):
            break
        constraints = updated
    return all(constraints[i].shape[0] == r.v[i] for i in range(q.n))


def invariant_span(r: Rep, generators: Sequence[np.ndarray], backend) -> list[np.ndarray]:
    """Smallest B-invariant graded subspace containing the columns of generators[i] in V_i."""
    q = r.quiver
    spans = [backend.column_basis(generators[i]) for i in range(q.n)]
    while True:
        updated = []
        for j in range(q.n):
            stacked = [spans[j]] + [r.B[h.id] @ spans[h.tail] for h in q.arrows_into(j)]
            updated.append(backend.column_basis(np.hstack(stacked)))
        if all(u.shape[1] == s.shape[1] for u, s in zip(updated, spans)):
            return spans
        spans = updated


def _image_lies_in(r: Rep, s: FramingSplit, spans, target_parts: Sequence[int], backend) -> bool:
    """b(spans) has no component outside the parts in target_parts."""
    others = [p for p in range(s.k) if p not in target_parts]
    for i in range(r.quiver.n):
        rows = s.indices(i, others)
        if rows and spans[i].shape[1] and not backend.is_zero(r.b[i][rows, :] @ spans[i]):
            return False
    return True


def _span_from_parts(r: Rep, s: FramingSplit, parts: Sequence[int], backend):
    generators = [r.a[i][:, s.indices(i, parts)] for i in range(r.quiver.n)]
    return invariant_span(r, generators, backend)


def membership(r: Rep, s: FramingSplit, tol: float = DEFAULT_TOL) -> Membership:
    s.check(r)
    if s.k != 2:
        raise InvalidInputError("membership needs a two-part framing split; use flag_membership")
    backend = _backend(r, tol)
    span_w2 = _span_from_parts(r, s, [1], backend)
    span_w = _span_from_parts(r, s, [0, 1], backend)
    span_w1 = _span_from_parts(r, s, [0], backend)
    in_t0 = _image_lies_in(r, s, span_w2, [1], backend)
    in_t0_tilde = _image_lies_in(r, s, span_w2, [], backend) and _image_lies_in(r, s, span_w, [1], backend)
    in_t0_minus = _image_lies_in(r, s, span_w1, [0], backend)
    return Membership(in_t0, in_t0_tilde, in_t0_minus)


def flag_membership(r: Rep, s: FramingSplit, tol: float = DEFAULT_TOL) -> bool:
    """Every hub preserves the flag W^k, W^(k-1) + W^k, ..., W built from the split."""
    s.check(r)
    backend = _backend(r, tol)
    for p in range(1, s.k):
        tail = list(range(p, s.k))
        if not _image_lies_in(r, s, _span_from_parts(r, s, tail, backend), tail, backend):
            return False
    return True


# ---------------------------------------------------------------------------
# Invariant records
# ---------------------------------------------------------------------------


def default_cap(v: DimVector) -> int:
    return sum(v) ** 2


def invariant_record(r: Rep, cap: int | None = None) -> InvariantRecord:
    if cap is None:
        cap = default_cap(r.v)
    if cap < 0:
        raise InvalidInputError(f"Length cap must be nonnegative, got {cap}")
    q = r.quiver
    record = InvariantRecord(cap=cap, w=tuple(r.w))
    identity = fraction_identity if r.is_exact else (lambda n: np.eye(n, dtype=complex))
    for start in range(q.n):
        stack = [((), start, identity(r.v[start]))]
        while stack:
            word, end, product = stack.pop()
            record.hubs[(start, word)] = r.b[end] @ product @ r.a[start]
            if word and end == start:
                record.traces[word] = np.trace(product) if product.size else (Fraction(0) if r.is_exact else 0j)
            if len(word) < cap:
                for h in q.arrows_out_of(end):
                    stack.append((word + (h.id,), h.head, r.B[h.id] @ product))
    logger.debug(f"invariant_record cap={cap}: {len(record.traces)} traces, {len(record.hubs)} hubs")
    return record


def limit_invariants(r: Rep, s: FramingSplit, cap: int | None = None, tol: float = DEFAULT_TOL) -> InvariantRecord:
    """Record of lim_{t -> 0} lambda(t) r: hubs lose their W^1 -> W^2 block."""
    if not membership(r, s, tol).in_T0:
        raise InvalidInputError("limit_invariants needs a representation in T0")
    record = invariant_record(r, cap)
    q = r.quiver
    for (start, word), hub in record.hubs.items():
        end = q.in_(word[-1]) if word else start
        rows, cols = s.indices(end, [1]), s.indices(start, [0])
        if rows and cols:
            hub[np.ix_(rows, cols)] = Fraction(0) if hub.dtype == object else 0
    return record


def records_equal(r1: InvariantRecord, r2: InvariantRecord, tol: float = DEFAULT_TOL) -> bool:
    if r1.cap != r2.cap or r1.w != r2.w:
        raise InvalidInputError("Records with different caps or framings are not comparable")
    if r1.traces.keys() != r2.traces.keys() or r1.hubs.keys() != r2.hubs.keys():
        raise InvalidInputError("Records come from different quivers or dimension vectors")

    def close(x, y) -> bool:
        if isinstance(x, Fraction) and isinstance(y, Fraction):
            return x == y
        x, y = complex(x), complex(y)
        return abs(x - y) <= tol * (1.0 + max(abs(x), abs(y)))

    for key, value in r1.traces.items():
        if not close(value, r2.traces[key]):
            return False
    for key, hub in r1.hubs.items():
        other = r2.hubs[key]
        if hub.shape != other.shape:
            raise InvalidInputError(f"Hub {key} has mismatched shapes")
        if not all(close(x, y) for x, y in zip(hub.flatten(), other.flatten())):
            return False
    return True


# ---------------------------------------------------------------------------
# Solving the moment map equation
# ---------------------------------------------------------------------------


def _unknown_slices(r: Rep) -> list[tuple[int, int, tuple[int, int]]]:
    """(matrix index in r.matrices(), offset, shape) for the flattened unknown vector."""
    slices, offset = [], 0
    for idx, m in enumerate(r.matrices()):
        slices.append((idx, offset, m.shape))
        offset += m.size
    return slices


def _pack(r: Rep) -> np.ndarray:
    parts = [m.flatten() for m in r.matrices()]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def _unpack(template: Rep, x: np.ndarray) -> Rep:
    mats = []
    for _, offset, shape in _unknown_slices(template):
        size = shape[0] * shape[1]
        mats.append(x[offset : offset + size].reshape(shape))
    nb, n = len(template.B), template.quiver.n
    return template.replace(B=mats[:nb], a=mats[nb : nb + n], b=mats[nb + n :])


def _moment_differential(r: Rep, dr: Rep) -> list[np.ndarray]:
    q = r.quiver
    result = []
    for i in range(q.n):
        d = dr.a[i] @ r.b[i] + r.a[i] @ dr.b[i]
        for arrow in q.arrows_into(i):
            h, hb = arrow.id, arrow.id ^ 1
            d = d + epsilon(q, h) * (dr.B[h] @ r.B[hb] + r.B[h] @ dr.B[hb])
        result.append(d)
    return result


def _flatten(mats: Sequence[np.ndarray]) -> np.ndarray:
    parts = [m.flatten() for m in mats]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def moment_jacobian(r: Rep) -> np.ndarray:
    x = _pack(r)
    columns = []
    for k in range(x.size):
        e = np.zeros(x.size, dtype=complex)
        e[k] = 1.0
        columns.append(_flatten(_moment_differential(r, _unpack(r, e))))
    rows = sum(vi * vi for vi in r.v)
    return np.column_stack(columns) if columns else np.zeros((rows, 0), dtype=complex)


def newton_solve_moment(
    r0: Rep,
    tol: float = 1e-10,
    max_iter: int = 100,
    damping: float = DEFAULT_DAMPING,
) -> Rep:
    """Gauss-Newton with Tikhonov damping on mu(B, a, b) = 0, starting from r0."""
    if tol <= 0:
        raise InvalidInputError(f"Solver tolerance must be positive, got {tol}")
    residual = moment_residual(r0)
    if residual < tol:
        return r0
    r = r0.to_complex()
    x = _pack(r)
    for iteration in range(max_iter):
        f = _flatten(moment_map(r))
        jac = moment_jacobian(r)
        lhs = np.vstack([jac, np.sqrt(damping) * np.eye(x.size)])
        rhs = np.concatenate([-f, np.zeros(x.size, dtype=complex)])
        step, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
        x = x + step
        r = _unpack(r, x)
        residual = moment_residual(r)
        logger.debug(f"Gauss-Newton iteration {iteration + 1}: residual={residual:.3e}")
        if residual < tol:
            return r
    logger.warning(f"Gauss-Newton did not converge in {max_iter} iterations (residual={residual:.3e})")
    raise ConvergenceError(
        f"Moment map solver did not converge in {max_iter} iterations", residual=residual, iterations=max_iter
    )


def _gauge_tangent(r: Rep) -> np.ndarray:
    """Matrix of xi -> d/ds exp(s xi) . r over xi in the Lie algebra of G_v."""
    q = r.quiver
    columns = []
    for i in range(q.n):
        for row in range(r.v[i]):
            for col in range(r.v[i]):
                xi = [np.zeros((vj, vj), dtype=complex) for vj in r.v]
                xi[i][row, col] = 1.0
                B = [xi[h.head] @ r.B[h.id] - r.B[h.id] @ xi[h.tail] for h in q.arrows]
                a = [xi[j] @ r.a[j] for j in range(q.n)]
                b = [-r.b[j] @ xi[j] for j in range(q.n)]
                columns.append(_flatten([*B, *a, *b]))
    return np.column_stack(columns) if columns else np.zeros((_pack(r).size, 0), dtype=complex)


def tangent_dimension(r: Rep, tol: float = DEFAULT_TOL) -> int:
    """dim M - rank d(mu) - dim of the gauge orbit, at the point r."""
    r = r.to_complex()
    backend = NumericBackend(tol)
    total = _pack(r).size
    return total - backend.rank(moment_jacobian(r)) - backend.rank(_gauge_tangent(r))


def find_stable_point(
    q: Quiver,
    v: DimVector,
    w: DimVector,
    rng: np.random.Generator,
    attempts: int = 20,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> Rep:
    """Multi-start Gauss-Newton returning a stable point of mu^-1(0)."""
    last_residual = float("inf")
    for attempt in range(attempts):
        start = Rep.random(q, v, w, rng)
        try:
            candidate = newton_solve_moment(start, tol=tol, max_iter=max_iter)
        except ConvergenceError as e:
            last_residual = e.residual
            continue
        if is_stable(candidate, tol=1e-7):
            logger.debug(f"Stable point found on attempt {attempt + 1}")
            return candidate
        last_residual = moment_residual(candidate)
    raise ConvergenceError(
        f"No stable solution of the moment map equation for v={v}, w={w} after {attempts} starts",
        residual=last_residual,
        iterations=attempts,
    )

