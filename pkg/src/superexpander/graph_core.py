"""Regular multigraphs and the elementary transforms used by the construction.

A graph is stored as a symmetric sparse matrix ``E`` of 64-bit unsigned
multiplicities.  A self loop at ``u`` is the diagonal entry ``E[u, u]`` and
contributes one (not two) to the degree, so every row of ``E`` sums to the
degree ``d``.  The normalized adjacency matrix is ``E / d``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .errors import MultiplicityOverflow, NonRegularError, NotBipartite, TooLarge

UINT64_MAX = 2**64 - 1
DENSE_THRESHOLD = 4096
STOCHASTIC_TOL = 1e-12


def check_fits(value: int, what: str = "multiplicity") -> int:
    value = int(value)
    if value < 0:
        raise ValueError(f"{what} must be nonnegative, got {value}")
    if value > UINT64_MAX:
        raise MultiplicityOverflow(f"{what} {value} exceeds 2^64 - 1")
    return value


class StochasticMatrix:
    """Symmetric row-stochastic matrix held densely, sparsely or implicitly.

    Implicit matrices are :class:`scipy.sparse.linalg.LinearOperator`
    instances; only their action on the constant vector can be validated.
    """

    def __init__(self, data, *, validate: bool = True, tol: float = STOCHASTIC_TOL):
        if isinstance(data, StochasticMatrix):
            data = data.data
        if isinstance(data, LinearOperator):
            self.data = data
        elif sp.issparse(data):
            self.data = sp.csr_array(data, dtype=np.float64)
        else:
            arr = np.asarray(data, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"expected a square matrix, got shape {arr.shape}")
            self.data = arr
        if self.data.shape[0] != self.data.shape[1] or self.data.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {self.data.shape}")
        if validate:
            self._validate(tol)

    def _validate(self, tol: float) -> None:
        n = self.order
        rows = self.matvec(np.ones(n))
        if np.max(np.abs(rows - 1.0)) > tol:
            raise ValueError("row sums differ from 1")
        if isinstance(self.data, LinearOperator):
            return
        if sp.issparse(self.data):
            if self.data.nnz and self.data.data.min() < -tol:
                raise ValueError("negative entry")
            asym = abs(self.data - self.data.T)
            if asym.nnz and asym.max() > tol:
                raise ValueError("matrix is not symmetric")
        else:
            if self.data.min() < -tol:
                raise ValueError("negative entry")
            if np.max(np.abs(self.data - self.data.T)) > tol:
                raise ValueError("matrix is not symmetric")

    @property
    def order(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self):
        return (self.order, self.order)

    @property
    def is_dense(self) -> bool:
        return isinstance(self.data, np.ndarray)

    @property
    def is_implicit(self) -> bool:
        return isinstance(self.data, LinearOperator)

    def matvec(self, x):
        return self.data @ np.asarray(x, dtype=np.float64)

    __matmul__ = matvec

    def toarray(self) -> np.ndarray:
        if self.is_dense:
            return self.data.copy()
        if sp.issparse(self.data):
            return self.data.toarray()
        return self.data @ np.eye(self.order)

    def as_linear_operator(self) -> LinearOperator:
        return aslinearoperator(self.data)

    def __repr__(self):
        kind = "dense" if self.is_dense else ("implicit" if self.is_implicit else "sparse")
        return f"StochasticMatrix(order={self.order}, {kind})"


def as_stochastic(obj) -> StochasticMatrix:
    """Coerce arrays, sparse matrices, operators or graphs to a validated matrix."""
    if isinstance(obj, StochasticMatrix):
        return obj
    if isinstance(obj, RegularMultigraph):
        return normalized_adjacency(obj)
    return StochasticMatrix(obj)


class RegularMultigraph:
    """Immutable d-regular multigraph on vertices ``0..n-1``."""

    def __init__(self, multiplicities, *, validate: bool = True):
        if sp.issparse(multiplicities):
            E = sp.csr_array(multiplicities, copy=True)
        else:
            arr = np.asarray(multiplicities)
            if arr.dtype == object:
                for value in arr.ravel():
                    check_fits(value)
                arr = arr.astype(np.uint64)
            E = sp.csr_array(arr)
        if E.shape[0] != E.shape[1] or E.shape[0] < 1:
            raise ValueError(f"expected a nonempty square matrix, got shape {E.shape}")
        if E.dtype != np.uint64:
            if E.nnz and (np.any(E.data < 0) or np.any(E.data != np.floor(E.data))):
                raise ValueError("multiplicities must be nonnegative integers")
            if E.nnz and float(E.data.max()) > UINT64_MAX:
                raise MultiplicityOverflow("multiplicity exceeds 2^64 - 1")
            E = E.astype(np.uint64)
        E.eliminate_zeros()
        E.sort_indices()
        E.sum_duplicates()
        sums = [int(s) for s in E.sum(axis=1, dtype=object)] if validate else None
        if validate:
            if (E != E.T).nnz:
                raise ValueError("multiplicity matrix is not symmetric")
            if len(set(sums)) != 1:
                bad = next(u for u, s in enumerate(sums) if s != sums[0])
                raise NonRegularError(
                    f"vertex 0 has degree {sums[0]} but vertex {bad} has degree {sums[bad]}"
                )
            degree = check_fits(sums[0], "degree")
            if degree < 1:
                raise NonRegularError("degree must be positive")
        else:
            degree = int(E[[0], :].sum(dtype=object))
        E.data.setflags(write=False)
        self._E = E
        self._degree = degree

    @property
    def n(self) -> int:
        return int(self._E.shape[0])

    vertex_count = n

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def matrix(self) -> sp.csr_array:
        """Read-only view of the symmetric multiplicity matrix."""
        return self._E

    def multiplicity(self, u: int, v: int) -> int:
        return int(self._E[u, v])

    def edges(self) -> list[tuple[int, int, int]]:
        """Sorted ``(u, v, mult)`` triples with ``u <= v``."""
        upper = sp.triu(self._E, format="coo")
        order = np.lexsort((upper.col, upper.row))
        return [
            (int(upper.row[k]), int(upper.col[k]), int(upper.data[k])) for k in order
        ]

    def to_dense(self, threshold: int = DENSE_THRESHOLD) -> np.ndarray:
        if self.n > threshold:
            raise TooLarge(f"{self.n} vertices exceeds dense threshold {threshold}")
        return self._E.toarray()

    @cached_property
    def slots(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge-endpoint view used by the products.

        Returns ``(nbr, partner)``, both of shape ``(n, d)``.  Row ``u`` lists
        the neighbours of ``u`` with multiplicity, sorted by neighbour id; the
        copies of one edge are ordered by copy index.  ``partner[u, s]`` is the
        slot at ``nbr[u, s]`` holding the same edge copy.  A loop slot is its
        own partner.
        """
        E = self._E
        n, d = self.n, self.degree
        if n * d > 10**9:
            raise MultiplicityOverflow("too many edge endpoints to enumerate")
        counts = E.data.astype(np.int64)
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(E.indptr))
        cols = E.indices.astype(np.int64)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        nbr = np.repeat(cols, counts)
        entry = np.repeat(np.arange(len(counts)), counts)
        copy = np.arange(n * d, dtype=np.int64) - offsets[entry]
        keys = rows * n + cols
        reverse = np.searchsorted(keys, cols * n + rows)
        partner_flat = offsets[reverse[entry]] + copy
        partner = partner_flat - nbr * d
        nbr = nbr.reshape(n, d)
        partner = partner.reshape(n, d)
        nbr.setflags(write=False)
        partner.setflags(write=False)
        return nbr, partner

    def __eq__(self, other):
        if not isinstance(other, RegularMultigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.degree == other.degree
            and (self._E != other._E).nnz == 0
        )

    def __hash__(self):
        return hash((self.n, self.degree, tuple(self.edges())))

    def __repr__(self):
        return f"RegularMultigraph(n={self.n}, degree={self.degree})"


def _symmetric_from_triples(n, rows, cols, mults) -> sp.csr_array:
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    mults = np.asarray(mults, dtype=np.uint64)
    off = rows != cols
    r = np.concatenate((rows, cols[off]))
    c = np.concatenate((cols, rows[off]))
    m = np.concatenate((mults, mults[off]))
    return sp.csr_array(sp.coo_array((m, (r, c)), shape=(n, n)))


def build_graph(n: int, edges) -> RegularMultigraph:
    """Symmetrize ``(u, v, mult)`` triples and verify regularity.

    A triple with ``u != v`` adds ``mult`` copies of the edge ``{u, v}``; a
    triple ``(u, u, mult)`` adds ``mult`` self loops.  Repeated triples add up.
    """
    if n < 1:
        raise ValueError("n must be positive")
    acc: dict[tuple[int, int], int] = {}
    for u, v, mult in edges:
        u, v, mult = int(u), int(v), int(mult)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"vertex out of range in edge ({u}, {v})")
        if mult <= 0:
            raise ValueError(f"multiplicity must be positive in edge ({u}, {v}, {mult})")
        key = (min(u, v), max(u, v))
        acc[key] = check_fits(acc.get(key, 0) + mult)
    degrees = [0] * n
    for (u, v), mult in acc.items():
        degrees[u] += mult
        if u != v:
            degrees[v] += mult
    if len(set(degrees)) != 1:
        bad = next(u for u, s in enumerate(degrees) if s != degrees[0])
        raise NonRegularError(
            f"vertex 0 has degree {degrees[0]} but vertex {bad} has degree {degrees[bad]}"
        )
    check_fits(degrees[0], "degree")
    if not acc:
        raise NonRegularError("graph has no edges")
    keys = list(acc)
    E = _symmetric_from_triples(
        n, [k[0] for k in keys], [k[1] for k in keys], [acc[k] for k in keys]
    )
    return RegularMultigraph(E, validate=False)


def cycle(n: int) -> RegularMultigraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    u = np.arange(n)
    return RegularMultigraph(_symmetric_from_triples(n, u, (u + 1) % n, np.ones(n)))


def cycle_with_loops(n: int) -> RegularMultigraph:
    """The n-cycle with one self loop per vertex (3-regular).

    For n = 1 and n = 2 the "cycle" part degenerates: one vertex carries three
    loops, two vertices are joined by a double edge.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return identity_graph(1, 3)
    if n == 2:
        return build_graph(2, [(0, 0, 1), (1, 1, 1), (0, 1, 2)])
    E = cycle(n).matrix + sp.eye_array(n, dtype=np.uint64, format="csr")
    return RegularMultigraph(E)


def identity_graph(n: int, loops: int = 1) -> RegularMultigraph:
    return RegularMultigraph(
        sp.eye_array(n, dtype=np.uint64, format="csr") * np.uint64(loops), validate=False
    )


def complete_with_loops(n: int) -> RegularMultigraph:
    """Every ordered pair joined once, loops included; normalized adjacency J/n."""
    return RegularMultigraph(np.ones((n, n), dtype=np.uint64))


def random_regular(n: int, d: int, seed=None) -> RegularMultigraph:
    """Configuration-model multigraph: random pairing of the ``n*d`` endpoints.

    A pairing of two endpoints at the same vertex yields two self loops, which
    keeps the degree at ``d``.  If ``n*d`` is odd the unpaired endpoint becomes
    a single loop.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = np.random.default_rng(seed)
    stubs = rng.permutation(np.repeat(np.arange(n), d))
    half = len(stubs) // 2
    a, b = stubs[:half], stubs[half : 2 * half]
    rows, cols = np.minimum(a, b), np.maximum(a, b)
    mults = np.where(rows == cols, 2, 1)
    if len(stubs) % 2:
        rows = np.append(rows, stubs[-1])
        cols = np.append(cols, stubs[-1])
        mults = np.append(mults, 1)
    return RegularMultigraph(_symmetric_from_triples(n, rows, cols, mults))


def random_simple_regular(n: int, d: int, seed=None) -> RegularMultigraph:
    """Uniform simple d-regular graph (networkx pairing with rejection)."""
    import networkx as nx

    g = nx.random_regular_graph(d, n, seed=int(np.random.default_rng(seed).integers(2**31)))
    rows, cols = zip(*g.edges()) if g.number_of_edges() else ((), ())
    return RegularMultigraph(_symmetric_from_triples(n, rows, cols, np.ones(len(rows))))


def random_expander(n: int, d: int, seed=None, max_tries: int = 100) -> RegularMultigraph:
    """Random connected non-bipartite d-regular graph (loops allowed)."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        G = random_regular(n, d, rng)
        if is_connected(G) and not is_bipartite(G):
            return G
    raise RuntimeError("no connected non-bipartite sample found")


def is_connected(G: RegularMultigraph) -> bool:
    count, _ = connected_components(G.matrix, directed=False)
    return count == 1


def is_bipartite(G: RegularMultigraph) -> bool:
    """True if some connected component admits a proper 2-coloring of all edges."""
    E = G.matrix
    if E.diagonal().any():
        return False
    n = G.n
    color = np.full(n, -1, dtype=np.int8)
    indptr, indices = E.indptr, E.indices
    for start in range(n):
        if color[start] >= 0:
            continue
        color[start] = 0
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in indices[indptr[u] : indptr[u + 1]]:
                    if color[v] < 0:
                        color[v] = 1 - color[u]
                        nxt.append(v)
                    elif color[v] == color[u]:
                        return False
            frontier = nxt
    return True


def normalized_adjacency(G: RegularMultigraph) -> StochasticMatrix:
    A = G.matrix.astype(np.float64) / float(G.degree)
    return StochasticMatrix(A, validate=False)


def _sparse_power(E: sp.csr_array, t: int) -> sp.csr_array:
    result = None
    base = E
    while t:
        if t & 1:
            result = base if result is None else result @ base
        t >>= 1
        if t:
            base = base @ base
    return result


def graph_power(G: RegularMultigraph, t: int) -> RegularMultigraph:
    """One edge per length-t walk; degree d^t."""
    if t < 1:
        raise ValueError("t must be at least 1")
    check_fits(G.degree**t, "degree")
    return RegularMultigraph(_sparse_power(G.matrix, t), validate=False)


def cesaro_graph(G: RegularMultigraph, m: int) -> RegularMultigraph:
    """Graph whose normalized adjacency is (1/m) * sum_{t<m} A^t.

    Each length-t walk (t = 0..m-1) contributes d^(m-1-t) parallel edges,
    accumulated by Horner's rule.  Degree m * d^(m-1).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    d = G.degree
    check_fits(m * d ** (m - 1), "degree")
    E = G.matrix
    acc = sp.eye_array(G.n, dtype=np.uint64, format="csr")
    walk = acc
    for _ in range(1, m):
        walk = walk @ E
        acc = acc * np.uint64(d) + walk
    return RegularMultigraph(sp.csr_array(acc), validate=False)


def cesaro_matrix(A, m: int) -> StochasticMatrix:
    """(1/m) * sum_{t<m} A^t; dense input stays dense, otherwise implicit."""
    if m < 1:
        raise ValueError("m must be at least 1")
    A = as_stochastic(A)
    n = A.order
    if A.is_dense:
        acc = np.eye(n)
        walk = np.eye(n)
        for _ in range(1, m):
            walk = walk @ A.data
            acc += walk
        return StochasticMatrix((acc + acc.T) / (2 * m), validate=False)

    def apply(x):
        x = np.asarray(x, dtype=np.float64)
        acc = x.copy()
        walk = x
        for _ in range(1, m):
            walk = A.matvec(walk)
            acc = acc + walk
        return acc / m

    op = LinearOperator((n, n), matvec=apply, matmat=apply, rmatvec=apply, dtype=np.float64)
    return StochasticMatrix(op, validate=False)


def edge_completion(G: RegularMultigraph, D: int) -> RegularMultigraph:
    """Raise the degree to D: each edge repeated D // d times plus D % d loops."""
    d = G.degree
    if D < d:
        raise ValueError(f"target degree {D} is below the current degree {d}")
    check_fits(D, "degree")
    m, r = divmod(D, d)
    E = G.matrix * np.uint64(m)
    if r:
        E = E + sp.eye_array(G.n, dtype=np.uint64, format="csr") * np.uint64(r)
    return RegularMultigraph(sp.csr_array(E), validate=False)


def bipartite_double(A) -> StochasticMatrix:
    """The 2n x 2n matrix [[0, A], [A, 0]]."""
    A = as_stochastic(A)
    if A.is_dense:
        n = A.order
        B = np.zeros((2 * n, 2 * n))
        B[:n, n:] = A.data
        B[n:, :n] = A.data
        return StochasticMatrix(B, validate=False)
    if sp.issparse(A.data):
        return StochasticMatrix(sp.block_array([[None, A.data], [A.data, None]], format="csr"), validate=False)
    n = A.order

    def apply(x):
        x = np.asarray(x, dtype=np.float64)
        return np.concatenate((A.matvec(x[n:]), A.matvec(x[:n])))

    op = LinearOperator((2 * n, 2 * n), matvec=apply, rmatvec=apply, dtype=np.float64)
    return StochasticMatrix(op, validate=False)


def bipartite_double_graph(G: RegularMultigraph) -> RegularMultigraph:
    """Graph version of :func:`bipartite_double`: u in the first copy joins v in the second."""
    E = G.matrix
    return RegularMultigraph(sp.block_array([[None, E], [E, None]], format="csr"), validate=False)


def _default_shift(n: int, sigma) -> np.ndarray:
    if sigma is None:
        return np.arange(n, 2 * n)
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.shape != (n,) or sorted(sigma.tolist()) != list(range(n, 2 * n)):
        raise ValueError("sigma must be a bijection from 0..n-1 onto n..2n-1")
    return sigma


def collapse_bipartite(B: RegularMultigraph, sigma=None) -> RegularMultigraph:
    """Fold a bipartite graph on ``V = 0..n-1``, ``W = n..2n-1`` onto ``V``.

    ``F(u, v) = E(u, sigma(v)) + E(sigma(u), v)``; the result is 2d-regular.
    ``sigma`` maps ``V`` onto ``W`` and defaults to ``i -> i + n``.
    """
    if B.n % 2:
        raise ValueError("sides must have equal size")
    n = B.n // 2
    E = B.matrix
    if E[:n, :n].nnz or E[n:, n:].nnz:
        raise NotBipartite("edges inside one side of the split")
    sigma = _default_shift(n, sigma)
    cross = E[:n, :][:, sigma]
    F = cross + cross.T
    return RegularMultigraph(sp.csr_array(F), validate=False)


def _pad_bipartite(F: np.ndarray) -> np.ndarray:
    """Add cross edges between deficient vertices until all degrees are equal."""
    F = F.astype(object).copy()
    rows = [int(s) for s in F.sum(axis=1)]
    cols = [int(s) for s in F.sum(axis=0)]
    target = max(max(rows), max(cols))
    need_r = [target - s for s in rows]
    need_c = [target - s for s in cols]
    j = 0
    for i in range(len(need_r)):
        while need_r[i]:
            while need_c[j] == 0:
                j += 1
            k = min(need_r[i], need_c[j])
            F[i, j] += k
            need_r[i] -= k
            need_c[j] -= k
    return F


def half_size_bipartite(G: RegularMultigraph, sigma=None) -> RegularMultigraph:
    """Intermediate bipartite graph on ``V' = 0..n-1`` and ``V'' = n..2n-1``.

    Every edge of ``G`` is routed across the split: edges already crossing are
    kept, an edge inside ``V'`` moves its second endpoint through ``sigma``
    and an edge inside ``V''`` moves its first endpoint through ``sigma^-1``.
    Each pair ``(x, sigma(x))`` also gets ``d`` parallel edges.  Degrees are
    then equalized by greedily joining deficient vertices of the two sides.
    """
    if G.n % 2:
        raise ValueError("half_size needs an even number of vertices")
    n = G.n // 2
    d = G.degree
    sigma = _default_shift(n, sigma)
    E = G.to_dense().astype(object)
    cross = E[:n, n:]
    inner1 = E[:n, :n]
    inner2 = E[n:, n:]
    pos = sigma - n
    F = np.zeros((n, n), dtype=object)
    F += cross
    F[:, pos] += inner1
    F += inner2[pos, :]
    F[np.arange(n), pos] += d
    F = _pad_bipartite(F)
    full = np.zeros((2 * n, 2 * n), dtype=object)
    full[:n, n:] = F
    full[n:, :n] = F.T
    return RegularMultigraph(full)


def half_size(G: RegularMultigraph, sigma=None) -> RegularMultigraph:
    """Graph on half the vertices whose gamma_+ is controlled by gamma(G).

    The degree is twice that of :func:`half_size_bipartite`, which lies
    between 4d and 6d (exactly 4d when no edge lies inside either half).
    """
    return collapse_bipartite(half_size_bipartite(G, sigma), sigma)


def trivial_poincare_bounds(n: int, d: int, kappa: float) -> tuple[float, float]:
    """Bounds valid for connected (first) and connected non-bipartite (second) graphs."""
    if n < 1 or d < 1 or kappa < 0:
        raise ValueError("need n, d >= 1 and kappa >= 0")
    scale = d * n ** (kappa + 1)
    return 2 ** (kappa - 1) * scale, 2 ** (2 * kappa) * scale
