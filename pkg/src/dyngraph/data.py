"""Core data model for dynamic attributed graphs.

A dynamic graph is an ordered sequence of snapshots over a fixed node set.
Each snapshot carries an undirected adjacency matrix (weights in [0, 1],
exactly {0, 1} for observed data) and a real-valued node-feature matrix.
Datasets pad every graph to a common node count ``n_max`` and mark padding
with a boolean node mask, so downstream tensor shapes stay static.

Dataset file format (line-delimited JSON):

* line 1 -- header record ``{"n_max": int, "T": int, "c": int}``
* each further line -- one graph record
  ``{"n": int, "snapshots": [{"edges": [[i, j], ...],
  "features": [[float, ...], ...]}, ...]}``

Node indices are 0-based; each undirected edge is listed once with
``i < j``; features are listed for active nodes only. Floats are written
through Python's shortest round-trip repr, so ``read(write(ds)) == ds``
bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GraphSnapshot",
    "DynamicGraph",
    "DynamicGraphDataset",
    "DatasetParseError",
    "validate",
    "pad_to",
    "read_dataset",
    "write_dataset",
]


class DatasetParseError(ValueError):
    """Raised when a dataset file does not conform to the documented format."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GraphSnapshot:
    """One time slice of a dynamic graph.

    adjacency : (n, n) symmetric matrix with zero diagonal, entries in [0, 1]
    features  : (n, c) real node attributes
    node_mask : (n,) boolean, True for active (non-padding) nodes
    """

    adjacency: np.ndarray
    features: np.ndarray
    node_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "adjacency", _freeze(np.asarray(self.adjacency, dtype=np.float64)))
        object.__setattr__(self, "features", _freeze(np.asarray(self.features, dtype=np.float64)))
        object.__setattr__(self, "node_mask", _freeze(np.asarray(self.node_mask, dtype=bool)))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def c(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GraphSnapshot):
            return NotImplemented
        return (
            np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.node_mask, other.node_mask)
        )


@dataclass(frozen=True, eq=False)
class DynamicGraph:
    """An ordered sequence of snapshots sharing one node set.

    All snapshots must agree on n, c and node_mask; the list order is the
    temporal order and T >= 1.
    """

    snapshots: tuple

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))

    @property
    def T(self) -> int:
        return len(self.snapshots)

    @property
    def n(self) -> int:
        return self.snapshots[0].n

    @property
    def c(self) -> int:
        return self.snapshots[0].c

    @property
    def node_mask(self) -> np.ndarray:
        return self.snapshots[0].node_mask

    @property
    def num_active(self) -> int:
        return int(self.node_mask.sum())

    def adjacency_stack(self) -> np.ndarray:
        """All adjacencies as one (T, n, n) array."""
        return np.stack([s.adjacency for s in self.snapshots])

    def feature_stack(self) -> np.ndarray:
        """All feature matrices as one (T, n, c) array."""
        return np.stack([s.features for s in self.snapshots])

    def __eq__(self, other):
        if not isinstance(other, DynamicGraph):
            return NotImplemented
        return len(self.snapshots) == len(other.snapshots) and all(
            a == b for a, b in zip(self.snapshots, other.snapshots)
        )


@dataclass(frozen=True, eq=False)
class DynamicGraphDataset:
    """A list of dynamic graphs padded to a shared n_max with common T and c."""

    graphs: tuple
    n_max: int
    T: int
    c: int

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        for i, g in enumerate(self.graphs):
            if g.n != self.n_max:
                raise ValueError(f"graph {i}: node count {g.n} != n_max {self.n_max}")
            if g.T != self.T:
                raise ValueError(f"graph {i}: snapshot count {g.T} != T {self.T}")
            if g.c != self.c:
                raise ValueError(f"graph {i}: feature dim {g.c} != c {self.c}")

    def __len__(self) -> int:
        return len(self.graphs)

    def __eq__(self, other):
        if not isinstance(other, DynamicGraphDataset):
            return NotImplemented
        return (
            (self.n_max, self.T, self.c) == (other.n_max, other.T, other.c)
            and len(self.graphs) == len(other.graphs)
            and all(a == b for a, b in zip(self.graphs, other.graphs))
        )


def validate(g: DynamicGraph, require_binary: bool = False) -> list:
    """Check every structural invariant of a dynamic graph.

    Returns a list of human-readable violation descriptions, one per broken
    rule, each naming the offending snapshot. An empty list means the graph
    is well formed. Nothing is raised: callers decide how to react.

    With ``require_binary`` the adjacency entries must be exactly 0 or 1
    (the convention for observed, as opposed to generated, graphs).
    """
    violations = []
    if g.T < 1:
        return ["graph has no snapshots (T must be >= 1)"]

    ref = g.snapshots[0]
    n, c = ref.n, ref.c
    for t, s in enumerate(g.snapshots):
        if s.adjacency.ndim != 2 or s.adjacency.shape[0] != s.adjacency.shape[1]:
            violations.append(f"snapshot {t}: adjacency is not square ({s.adjacency.shape})")
            continue
        if s.adjacency.shape[0] != n or s.features.shape[0] != n or s.node_mask.shape[0] != n:
            violations.append(f"snapshot {t}: node count differs from snapshot 0 ({s.adjacency.shape[0]} vs {n})")
            continue
        if s.features.shape[1] != c:
            violations.append(f"snapshot {t}: feature dim differs from snapshot 0 ({s.features.shape[1]} vs {c})")
        if not np.array_equal(s.node_mask, ref.node_mask):
            violations.append(f"snapshot {t}: node_mask differs from snapshot 0")
        A = s.adjacency
        if not np.array_equal(A, A.T):
            violations.append(f"snapshot {t}: adjacency not symmetric")
        if np.any(np.diag(A) != 0):
            violations.append(f"snapshot {t}: nonzero diagonal")
        if np.any(A < 0) or np.any(A > 1):
            violations.append(f"snapshot {t}: adjacency entries outside [0, 1]")
        elif require_binary and not np.all((A == 0) | (A == 1)):
            violations.append(f"snapshot {t}: adjacency entries not binary")
        inactive = ~s.node_mask
        if np.any(inactive):
            if np.any(A[inactive, :] != 0) or np.any(A[:, inactive] != 0):
                violations.append(f"snapshot {t}: nonzero adjacency row/column for masked-out node")
            if np.any(s.features[inactive, :] != 0):
                violations.append(f"snapshot {t}: nonzero feature row for masked-out node")
    return violations


def pad_to(g: DynamicGraph, n_max: int) -> DynamicGraph:
    """Pad a dynamic graph with masked-out nodes up to ``n_max`` nodes.

    Existing entries are preserved in the leading block; new nodes get
    all-zero rows and a False mask. Raises ValueError if the graph already
    has more than ``n_max`` nodes. Idempotent when n_max == g.n.
    """
    n = g.n
    if n_max < n:
        raise ValueError(f"cannot pad {n}-node graph down to n_max={n_max}")
    if n_max == n:
        return g
    extra = n_max - n
    snapshots = []
    for s in g.snapshots:
        adj = np.zeros((n_max, n_max))
        adj[:n, :n] = s.adjacency
        feat = np.zeros((n_max, s.c))
        feat[:n, :] = s.features
        mask = np.concatenate([s.node_mask, np.zeros(extra, dtype=bool)])
        snapshots.append(GraphSnapshot(adj, feat, mask))
    return DynamicGraph(tuple(snapshots))


def _active_prefix(mask: np.ndarray) -> int:
    """Active-node count for a prefix-form mask; raises otherwise."""
    n_active = int(mask.sum())
    if not np.array_equal(mask, np.arange(mask.shape[0]) < n_active):
        raise ValueError("dataset serialization requires active nodes to form a prefix of the node index range")
    return n_active


def _graph_record(g: DynamicGraph) -> dict:
    n_active = _active_prefix(g.node_mask)
    snapshots = []
    for t, s in enumerate(g.snapshots):
        A = s.adjacency
        if not np.all((A == 0) | (A == 1)):
            raise ValueError(f"snapshot {t}: only binary adjacencies are serializable (binarize generated graphs first)")
        ii, jj = np.nonzero(np.triu(A, k=1))
        edges = [[int(i), int(j)] for i, j in zip(ii, jj)]
        features = [[float(v) for v in row] for row in s.features[:n_active]]
        snapshots.append({"edges": edges, "features": features})
    return {"n": n_active, "snapshots": snapshots}


def write_dataset(ds: DynamicGraphDataset, path) -> None:
    """Write a dataset in the line-delimited format documented above."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"n_max": ds.n_max, "T": ds.T, "c": ds.c}) + "\n")
        for g in ds.graphs:
            fh.write(json.dumps(_graph_record(g)) + "\n")


def _parse_graph_record(rec: dict, n_max: int, T: int, c: int, lineno: int) -> DynamicGraph:
    def fail(field_name, msg):
        raise DatasetParseError(f"line {lineno}: field '{field_name}': {msg}")

    if not isinstance(rec, dict) or "n" not in rec or "snapshots" not in rec:
        raise DatasetParseError(f"line {lineno}: graph record must have 'n' and 'snapshots' fields")
    n_active = rec["n"]
    if not isinstance(n_active, int) or not 0 <= n_active <= n_max:
        fail("n", f"active node count must be an int in [0, {n_max}]")
    snaps = rec["snapshots"]
    if not isinstance(snaps, list) or len(snaps) != T:
        fail("snapshots", f"expected {T} snapshots, got {len(snaps) if isinstance(snaps, list) else type(snaps).__name__}")
    mask = np.arange(n_max) < n_active
    snapshots = []
    for t, srec in enumerate(snaps):
        adj = np.zeros((n_max, n_max))
        for e in srec.get("edges", []):
            if not (isinstance(e, list) and len(e) == 2):
                fail("edges", f"snapshot {t}: each edge must be a pair [i, j]")
            i, j = e
            if not (isinstance(i, int) and isinstance(j, int)) or not (0 <= i < j < n_max):
                fail("edges", f"snapshot {t}: malformed edge {e} (need 0 <= i < j < n_max)")
            if i >= n_active or j >= n_active:
                fail("edges", f"snapshot {t}: edge endpoint out of range for n={n_active}")
            adj[i, j] = adj[j, i] = 1.0
        frows = srec.get("features", [])
        if len(frows) != n_active:
            fail("features", f"snapshot {t}: expected {n_active} feature rows, got {len(frows)}")
        feat = np.zeros((n_max, c))
        for i, row in enumerate(frows):
            if len(row) != c:
                fail("features", f"snapshot {t}: feature row {i} has {len(row)} values, expected {c}")
            feat[i, :] = row
        snapshots.append(GraphSnapshot(adj, feat, mask))
    return DynamicGraph(tuple(snapshots))


def read_dataset(path) -> DynamicGraphDataset:
    """Read a dataset file, raising DatasetParseError with the offending
    line number and field on any malformed input."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise DatasetParseError("line 1: missing header record")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"line 1: invalid JSON in header: {e}") from e
    for key in ("n_max", "T", "c"):
        if key not in header or not isinstance(header[key], int):
            raise DatasetParseError(f"line 1: field '{key}': missing or non-integer header field")
    n_max, T, c = header["n_max"], header["T"], header["c"]
    graphs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise DatasetParseError(f"line {lineno}: invalid JSON: {e}") from e
        graphs.append(_parse_graph_record(rec, n_max, T, c, lineno))
    return DynamicGraphDataset(tuple(graphs), n_max=n_max, T=T, c=c)
