"""Finite sections of weighted graphs and their exhaustions.

A Section is a finite piece of a (possibly infinite) weighted graph: a
symmetric nonnegative edge weight matrix b with zero diagonal, a killing
term c >= 0, a measure m > 0 of full support, and a Dirichlet mask marking
the vertices that are wired to the boundary (functions are pinned to zero
there). Exhaustion generators produce growing, label-consistent sections
of a fixed infinite graph so that quantities computed at one level can be
compared with the next.

Vertices are indexed 0..n-1. Each vertex also carries a hashable label
(coordinates for lattices, path strings for trees) that stays stable
across exhaustion levels.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    DuplicateEdgeConflict,
    GraphSyntaxError,
    InvalidParameter,
    NegativeWeight,
    NonPositiveMeasure,
    SectionMismatch,
    SelfLoop,
    SizeOverflow,
    UnknownVertex,
)

DEFAULT_VERTEX_CAP = 2_000_000
VERTEX_CAP_ENV = "ROYDEN_VERTEX_CAP"


def vertex_cap() -> int:
    """Maximum vertex count a constructor may allocate.

    Overridable through the ROYDEN_VERTEX_CAP environment variable.
    """
    raw = os.environ.get(VERTEX_CAP_ENV)
    if raw is None:
        return DEFAULT_VERTEX_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidParameter(f"{VERTEX_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise InvalidParameter(f"{VERTEX_CAP_ENV} must be positive, got {cap}")
    return cap


def _check_cap(n: int, what: str) -> None:
    cap = vertex_cap()
    if n > cap:
        raise SizeOverflow(f"{what} needs {n} vertices, above the cap of {cap}")


# ---------------------------------------------------------------------------
# Section


@dataclass(frozen=True, eq=False)
class Section:
    """A finite weighted graph piece with killing term, measure and mask.

    Fields
    ------
    adj : scipy.sparse.csr_matrix
        Symmetric edge weights, zero diagonal. Entry (x, y) is b(x, y).
    c : ndarray
        Killing term per vertex, nonnegative.
    m : ndarray
        Vertex measure, strictly positive.
    dirichlet : ndarray of bool
        True where the vertex belongs to the Dirichlet mask (wired to the
        boundary; admissible functions vanish there).
    labels : tuple
        Hashable per-vertex labels, unique.
    """

    adj: sp.csr_matrix
    c: np.ndarray
    m: np.ndarray
    dirichlet: np.ndarray
    labels: tuple

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @cached_property
    def label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def interior(self) -> np.ndarray:
        """Indices of non-masked vertices, ascending."""
        return np.flatnonzero(~self.dirichlet)

    @cached_property
    def mask(self) -> np.ndarray:
        """Indices of masked vertices, ascending."""
        return np.flatnonzero(self.dirichlet)

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """Sum of incident edge weights per vertex."""
        return np.asarray(self.adj.sum(axis=1)).ravel()

    def index_of(self, vertex) -> int:
        """Resolve a vertex given as a label, or as an index when no label matches."""
        if vertex in self.label_index:
            return self.label_index[vertex]
        if isinstance(vertex, (int, np.integer)) and not isinstance(vertex, bool):
            v = int(vertex)
            if 0 <= v < self.n:
                return v
        raise UnknownVertex(f"no vertex {vertex!r} in section of size {self.n}")

    def is_masked(self, v: int) -> bool:
        return bool(self.dirichlet[v])

    def fn(self, values) -> "VertexFn":
        """Wrap values (array, scalar, or {vertex: value} mapping) as a VertexFn."""
        if isinstance(values, Mapping):
            arr = np.zeros(self.n)
            for k, val in values.items():
                arr[self.index_of(k)] = float(val)
        elif np.isscalar(values):
            arr = np.full(self.n, float(values))
        else:
            arr = np.asarray(values, dtype=float)
            if arr.shape != (self.n,):
                raise SectionMismatch(
                    f"expected {self.n} values, got shape {arr.shape}"
                )
            arr = arr.copy()
        return VertexFn(self, arr)

    def indicator(self, vertex) -> "VertexFn":
        v = self.index_of(vertex)
        arr = np.zeros(self.n)
        arr[v] = 1.0
        return VertexFn(self, arr)

    @cached_property
    def full_components(self) -> np.ndarray:
        """Component id per vertex, mask treated as ordinary vertices."""
        if self.n == 0:
            return np.zeros(0, dtype=int)
        _, comp = connected_components(self.adj, directed=False)
        return comp

    @cached_property
    def interior_components(self) -> np.ndarray:
        """Component id per vertex in the graph induced on the interior.

        Masked vertices get id -1.
        """
        comp = np.full(self.n, -1, dtype=int)
        inter = self.interior
        if len(inter) == 0:
            return comp
        sub = self.adj[inter][:, inter]
        _, sub_comp = connected_components(sub, directed=False)
        comp[inter] = sub_comp
        return comp

    def interior_component_of(self, v: int) -> np.ndarray:
        """Interior vertex indices in the same interior component as v."""
        cid = self.interior_components[v]
        if cid < 0:
            raise InvalidParameter(f"vertex {v} is masked")
        return np.flatnonzero(self.interior_components == cid)

    def component_grounded(self, vertices: np.ndarray) -> bool:
        """True if the given interior component touches the mask or carries
        a nonzero killing term (the associated quadratic form is then
        positive definite on it)."""
        if np.any(self.c[vertices] > 0):
            return True
        if len(self.mask) == 0:
            return False
        sub = self.adj[vertices][:, self.mask]
        return sub.nnz > 0

    def validate(self) -> "ValidationReport":
        """Check structural invariants and report the component layout."""
        issues = []
        n = self.n
        adj = self.adj
        if adj.shape != (n, n):
            issues.append("adjacency matrix is not square")
        if adj.nnz:
            if adj.diagonal().any():
                issues.append("nonzero diagonal (self loop)")
            if (adj.data <= 0).any():
                issues.append("nonpositive edge weight stored")
            asym = abs(adj - adj.T)
            if asym.nnz and asym.max() > 0:
                issues.append("edge weights not symmetric")
        if len(self.c) != n or (np.asarray(self.c) < 0).any():
            issues.append("killing term missing entries or negative")
        if len(self.m) != n or (np.asarray(self.m) <= 0).any():
            issues.append("measure missing entries or not strictly positive")
        if len(self.labels) != n or len(set(self.labels)) != n:
            issues.append("labels missing or not unique")
        if len(self.dirichlet) != n:
            issues.append("dirichlet mask has wrong length")

        comp_sizes = []
        grounded = []
        inter_comp = self.interior_components if not issues else np.zeros(0)
        if not issues and len(self.interior):
            for cid in range(inter_comp.max() + 1):
                members = np.flatnonzero(inter_comp == cid)
                comp_sizes.append(int(len(members)))
                grounded.append(self.component_grounded(members))
        full_count = 0
        if not issues and n:
            full_count = int(self.full_components.max()) + 1
        return ValidationReport(
            ok=not issues,
            issues=tuple(issues),
            n=n,
            edge_count=int(adj.nnz // 2),
            interior_count=int(len(self.interior)),
            mask_count=int(len(self.mask)),
            full_component_count=full_count,
            interior_component_sizes=tuple(comp_sizes),
            interior_component_grounded=tuple(grounded),
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple
    n: int
    edge_count: int
    interior_count: int
    mask_count: int
    full_component_count: int
    interior_component_sizes: tuple
    interior_component_grounded: tuple


@dataclass(frozen=True, eq=False)
class VertexFn:
    """A real-valued function on the vertices of a specific Section."""

    section: Section
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.section.n,):
            raise SectionMismatch(
                f"function has {self.values.shape} values for a section of size {self.section.n}"
            )

    def __getitem__(self, vertex) -> float:
        return float(self.values[self.section.index_of(vertex)])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def vanishes_on_mask(self, tol: float = 0.0) -> bool:
        mask = self.section.mask
        if len(mask) == 0:
            return True
        return bool(np.max(np.abs(self.values[mask]), initial=0.0) <= tol)

    def clamp(self, lo: float, hi: float) -> "VertexFn":
        return VertexFn(self.section, np.clip(self.values, lo, hi))


def check_bound(s: Section, f: VertexFn) -> None:
    """Raise SectionMismatch unless f is bound to s."""
    if f.section is not s:
        raise SectionMismatch("vertex function is bound to a different section")


# ---------------------------------------------------------------------------
# construction


def build_section(
    n: int,
    edges: Iterable[tuple] = (),
    c=None,
    m=None,
    dirichlet: Iterable = (),
    labels: Sequence | None = None,
) -> Section:
    """Build a Section from a raw description.

    edges is an iterable of (u, v, weight) with 0-based indices; each
    unordered pair may appear once (repeats must carry the same weight).
    c and m may be dicts keyed by vertex or full arrays; c defaults to 0,
    m to 1. dirichlet lists masked vertex indices.
    """
    if n < 1:
        raise InvalidParameter(f"need at least one vertex, got {n}")
    _check_cap(n, "section")

    seen: dict = {}
    rows, cols, data = [], [], []
    for u, v, w in edges:
        u, v, w = int(u), int(v), float(w)
        if u == v:
            raise SelfLoop(f"self loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise UnknownVertex(f"edge ({u}, {v}) leaves vertex range 0..{n - 1}")
        if w <= 0:
            raise NegativeWeight(f"edge ({u}, {v}) has weight {w}, must be > 0")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if seen[key] != w:
                raise DuplicateEdgeConflict(
                    f"edge {key} given twice with weights {seen[key]} and {w}"
                )
            continue
        seen[key] = w
        rows += [key[0], key[1]]
        cols += [key[1], key[0]]
        data += [w, w]

    adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    def _vec(spec, default, name, strict_positive):
        arr = np.full(n, float(default))
        if spec is None:
            return arr
        if isinstance(spec, Mapping):
            for k, val in spec.items():
                k = int(k)
                if not 0 <= k < n:
                    raise UnknownVertex(f"{name} entry for unknown vertex {k}")
                arr[k] = float(val)
        else:
            given = np.asarray(spec, dtype=float)
            if given.shape != (n,):
                raise InvalidParameter(f"{name} must have {n} entries")
            arr = given.copy()
        if strict_positive and (arr <= 0).any():
            raise NonPositiveMeasure(f"{name} must be strictly positive everywhere")
        if not strict_positive and (arr < 0).any():
            raise InvalidParameter(f"{name} must be nonnegative")
        return arr

    c_arr = _vec(c, 0.0, "killing term", strict_positive=False)
    m_arr = _vec(m, 1.0, "measure", strict_positive=True)

    mask = np.zeros(n, dtype=bool)
    for v in dirichlet:
        v = int(v)
        if not 0 <= v < n:
            raise UnknownVertex(f"dirichlet entry for unknown vertex {v}")
        mask[v] = True

    if labels is None:
        label_tuple = tuple(range(n))
    else:
        label_tuple = tuple(labels)
        if len(label_tuple) != n or len(set(label_tuple)) != n:
            raise InvalidParameter("labels must be unique and cover every vertex")

    return Section(adj=adj, c=c_arr, m=m_arr, dirichlet=mask, labels=label_tuple)


def with_measure(s: Section, m) -> Section:
    """Copy of s with a replaced measure."""
    if isinstance(m, Mapping):
        arr = s.m.copy()
        for k, val in m.items():
            arr[s.index_of(k)] = float(val)
    else:
        arr = np.asarray(m, dtype=float)
        if arr.shape != (s.n,):
            raise InvalidParameter(f"measure must have {s.n} entries")
        arr = arr.copy()
    if (arr <= 0).any():
        raise NonPositiveMeasure("measure must be strictly positive everywhere")
    return replace(s, m=arr)


def sections_equal(a: Section, b: Section, tol: float = 0.0) -> bool:
    """Equality up to reindexing vertices by label."""
    if a.n != b.n or set(a.labels) != set(b.labels):
        return False
    perm = np.array([b.label_index[lab] for lab in a.labels])
    if np.any(np.abs(a.c - b.c[perm]) > tol):
        return False
    if np.any(np.abs(a.m - b.m[perm]) > tol):
        return False
    if np.any(a.dirichlet != b.dirichlet[perm]):
        return False
    pa = a.adj
    pb = b.adj[perm][:, perm]
    diff = abs(pa - pb)
    return not (diff.nnz and diff.max() > tol)


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class ExhaustionGenerator:
    """A family of growing sections of one infinite graph.

    section(level) builds the finite section at the given level; labels
    at level n reappear at level n+1 with identical b and c entries, so
    per-vertex quantities can be tracked across levels.
    """

    family: str
    params: tuple  # sorted (key, value) pairs, hashable
    origin: object  # label of the anchor vertex (profile base point)
    is_vertex_transitive: bool
    _build: Callable[[int], Section]

    def section(self, level: int) -> Section:
        if level < 1:
            raise InvalidParameter(f"exhaustion level must be >= 1, got {level}")
        return self._build(level)

    def c_partial_sum(self, level: int) -> float:
        """Sum of the killing term over the level section."""
        return float(np.sum(self.section(level).c))

    def with_zero_c(self) -> "ExhaustionGenerator":
        """Derived generator over the same graph with the killing term dropped."""
        base = self._build

        def build(level: int) -> Section:
            sec = base(level)
            return replace(sec, c=np.zeros(sec.n))

        return ExhaustionGenerator(
            family=self.family + "+zero-c",
            params=self.params,
            origin=self.origin,
            is_vertex_transitive=self.is_vertex_transitive,
            _build=build,
        )


def exhaust(gen: ExhaustionGenerator, n: int) -> Section:
    """Section of gen at level n (n >= 1)."""
    return gen.section(n)


def _lattice_section(d: int, radius: int, c_origin: float, c_const: float) -> Section:
    side = 2 * radius + 1
    n = side**d
    _check_cap(n, f"lattice d={d} radius={radius}")

    # coordinates in the box {-radius..radius}^d, index = mixed radix
    idx = np.arange(n)
    coords = np.empty((n, d), dtype=np.int64)
    rem = idx
    for a in range(d - 1, -1, -1):
        coords[:, a] = rem % side - radius
        rem = rem // side

    strides = np.array([side ** (d - 1 - a) for a in range(d)])
    rows, cols = [], []
    for a in range(d):
        keep = coords[:, a] < radius  # neighbor in +e_a stays in the box
        u = idx[keep]
        rows.append(u)
        cols.append(u + strides[a])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.ones(len(rows))
    adj = sp.csr_matrix(
        (np.concatenate([data, data]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    )

    mask = (np.abs(coords) == radius).any(axis=1)
    c = np.full(n, float(c_const))
    if c_origin:
        origin_idx = (n - 1) // 2
        c[origin_idx] += float(c_origin)
    if d == 1:
        labels = tuple(int(x) for x in coords[:, 0])
    else:
        labels = tuple(tuple(int(x) for x in row) for row in coords)
    return Section(adj=adj, c=c, m=np.ones(n), dirichlet=mask, labels=labels)


def lattice_generator(d: int, c_origin: float = 0.0, c_const: float = 0.0) -> ExhaustionGenerator:
    """Integer lattice Z^d exhausted by sup-norm balls.

    Level n is the box {-n..n}^d with unit nearest-neighbor weights; the
    Dirichlet mask is the outermost shell (every vertex with some
    coordinate of absolute value n), which is exactly the set adjacent to
    the complement. Optional killing: c_origin adds mass at the origin,
    c_const everywhere.
    """
    if d < 1:
        raise InvalidParameter(f"lattice dimension must be >= 1, got {d}")
    if c_origin < 0 or c_const < 0:
        raise InvalidParameter("killing terms must be nonnegative")
    origin = 0 if d == 1 else tuple([0] * d)
    return ExhaustionGenerator(
        family="lattice",
        params=(("c", c_const), ("c0", c_origin), ("d", d)),
        origin=origin,
        is_vertex_transitive=(c_origin == 0 and c_const == 0),
        _build=lambda level: _lattice_section(d, level, c_origin, c_const),
    )


def generate_lattice(d: int, radius: int) -> Section:
    """Box section of Z^d, wired shell masked. Equals lattice_generator(d).section(radius)."""
    return lattice_generator(d).section(radius)


def _tree_section(degree: int, depth: int, c_origin: float, c_const: float) -> Section:
    # vertex count: root + degree * ((degree-1)^depth - 1) / (degree - 2)
    count = 1
    width = degree
    for _ in range(depth):
        count += width
        width *= degree - 1
    _check_cap(count, f"tree degree={degree} depth={depth}")

    labels = ["r"]
    edges = []
    prev = [(0, "r")]
    next_id = 1
    for level in range(1, depth + 1):
        cur = []
        for parent_idx, parent_lab in prev:
            n_children = degree if level == 1 else degree - 1
            for k in range(n_children):
                lab = f"{parent_lab}.{k}"
                labels.append(lab)
                edges.append((parent_idx, next_id, 1.0))
                cur.append((next_id, lab))
                next_id += 1
        prev = cur

    n = next_id
    mask = [i for i, _ in prev]  # depth-level leaves: adjacent to the rest of the tree
    c = {0: c_origin} if c_origin else None
    sec = build_section(n, edges, c=c, dirichlet=mask, labels=labels)
    if c_const:
        sec = replace(sec, c=sec.c + float(c_const))
    return sec


def tree_generator(degree: int, c_origin: float = 0.0, c_const: float = 0.0) -> ExhaustionGenerator:
    """Rooted regular tree exhausted by depth balls.

    The root has `degree` children and every deeper internal vertex has
    total degree `degree`. Level n is the depth-n ball with the depth-n
    leaves masked (they are the vertices adjacent to the rest of the
    infinite tree). Sections are rooted, so no transitivity is claimed.
    """
    if degree < 3:
        raise InvalidParameter(f"tree degree must be >= 3, got {degree}")
    if c_origin < 0 or c_const < 0:
        raise InvalidParameter("killing terms must be nonnegative")
    return ExhaustionGenerator(
        family="tree",
        params=(("c", c_const), ("c0", c_origin), ("k", degree)),
        origin="r",
        is_vertex_transitive=False,
        _build=lambda level: _tree_section(degree, level, c_origin, c_const),
    )


def generate_tree(degree: int, depth: int) -> Section:
    """Depth ball of the regular tree, leaves masked. Equals tree_generator(degree).section(depth)."""
    return tree_generator(degree).section(depth)


def custom_generator(
    build: Callable[[int], Section],
    origin,
    family: str = "custom",
    is_vertex_transitive: bool = False,
) -> ExhaustionGenerator:
    """Wrap a user level -> Section rule as an exhaustion generator."""
    return ExhaustionGenerator(
        family=family,
        params=(),
        origin=origin,
        is_vertex_transitive=is_vertex_transitive,
        _build=build,
    )


# ---------------------------------------------------------------------------
# file format
#
# One record per line, '#' starts a comment:
#   V <n>            vertex count (required, first record)
#   L <v> <label>    label override (default: the index itself)
#   E <u> <v> <w>    undirected edge, weight w > 0
#   C <v> <value>    killing term entry (default 0)
#   M <v> <value>    measure entry (default 1)
#   D <v>            Dirichlet mask membership


def format_label(label) -> str:
    if isinstance(label, tuple):
        return ",".join(str(part) for part in label)
    return str(label)


def parse_label(token: str):
    if "," in token:
        return tuple(_label_part(p) for p in token.split(","))
    return _label_part(token)


def _label_part(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def parse_graph_file(text: str) -> Section:
    """Parse the graph file format into a Section."""
    n = None
    labels: dict = {}
    edges = []
    c_entries: dict = {}
    m_entries: dict = {}
    mask = []

    def want_vertex(token, lineno):
        try:
            v = int(token)
        except ValueError:
            raise GraphSyntaxError(f"expected vertex index, got {token!r}", lineno)
        if n is None or not 0 <= v < n:
            raise GraphSyntaxError(f"vertex {v} out of range", lineno)
        return v

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "V":
            if n is not None:
                raise GraphSyntaxError("duplicate V record", lineno)
            if len(parts) != 2:
                raise GraphSyntaxError("V takes exactly one argument", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphSyntaxError(f"bad vertex count {parts[1]!r}", lineno)
            if n < 1:
                raise GraphSyntaxError(f"vertex count must be >= 1, got {n}", lineno)
            continue
        if n is None:
            raise GraphSyntaxError("V record must come first", lineno)
        if kind == "L":
            if len(parts) != 3:
                raise GraphSyntaxError("L takes vertex and label", lineno)
            v = want_vertex(parts[1], lineno)
            labels[v] = parse_label(parts[2])
        elif kind == "E":
            if len(parts) != 4:
                raise GraphSyntaxError("E takes two vertices and a weight", lineno)
            u = want_vertex(parts[1], lineno)
            v = want_vertex(parts[2], lineno)
            try:
                w = float(parts[3])
            except ValueError:
                raise GraphSyntaxError(f"bad weight {parts[3]!r}", lineno)
            edges.append((u, v, w))
        elif kind == "C":
            if len(parts) != 3:
                raise GraphSyntaxError("C takes vertex and value", lineno)
            v = want_vertex(parts[1], lineno)
            try:
                c_entries[v] = float(parts[2])
            except ValueError:
                raise GraphSyntaxError(f"bad value {parts[2]!r}", lineno)
        elif kind == "M":
            if len(parts) != 3:
                raise GraphSyntaxError("M takes vertex and value", lineno)
            v = want_vertex(parts[1], lineno)
            try:
                m_entries[v] = float(parts[2])
            except ValueError:
                raise GraphSyntaxError(f"bad value {parts[2]!r}", lineno)
        elif kind == "D":
            if len(parts) != 2:
                raise GraphSyntaxError("D takes exactly one vertex", lineno)
            mask.append(want_vertex(parts[1], lineno))
        else:
            raise GraphSyntaxError(f"unknown record type {kind!r}", lineno)

    if n is None:
        raise GraphSyntaxError("missing V record")

    label_list = None
    if labels:
        label_list = [labels.get(i, i) for i in range(n)]
    return build_section(
        n, edges, c=c_entries or None, m=m_entries or None, dirichlet=mask, labels=label_list
    )


def serialize_graph_file(s: Section) -> str:
    """Canonical text form; parse(serialize(s)) == s up to label reindexing."""
    lines = [f"V {s.n}"]
    for i, lab in enumerate(s.labels):
        if lab != i:
            token = format_label(lab)
            if not token or any(ch.isspace() for ch in token) or token.startswith("#"):
                raise InvalidParameter(f"label {lab!r} cannot be serialized")
            lines.append(f"L {i} {token}")
    coo = sp.triu(s.adj, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    for k in order:
        lines.append(f"E {coo.row[k]} {coo.col[k]} {repr(float(coo.data[k]))}")
    for v in np.flatnonzero(s.c):
        lines.append(f"C {v} {repr(float(s.c[v]))}")
    for v in np.flatnonzero(s.m != 1.0):
        lines.append(f"M {v} {repr(float(s.m[v]))}")
    for v in s.mask:
        lines.append(f"D {v}")
    return "\n".join(lines) + "\n"


# vertex function files: lines "<vertex> <value>", missing vertices default 0


def parse_vertex_fn(text: str, s: Section) -> VertexFn:
    values = np.zeros(s.n)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphSyntaxError("expected '<vertex> <value>'", lineno)
        try:
            v = int(parts[0])
        except ValueError:
            raise GraphSyntaxError(f"bad vertex index {parts[0]!r}", lineno)
        if not 0 <= v < s.n:
            raise GraphSyntaxError(f"vertex {v} out of range", lineno)
        try:
            values[v] = float(parts[1])
        except ValueError:
            raise GraphSyntaxError(f"bad value {parts[1]!r}", lineno)
    return VertexFn(s, values)


def serialize_vertex_fn(f: VertexFn) -> str:
    lines = [f"{v} {repr(float(x))}" for v, x in enumerate(f.values) if x != 0.0]
    return "\n".join(lines) + "\n" if lines else ""
