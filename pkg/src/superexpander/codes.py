"""Binary linear codes: generators, verified minimum distance, duals and cosets.

Bit vectors ``x = (x_0, ..., x_{n-1})`` are packed into integers with ``x_0``
as the most significant bit, so integer order is lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotFound, ParseError

MAX_VERIFIED_DIMENSION = 24


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def _pack_rows(M: np.ndarray) -> np.ndarray:
    n = M.shape[1]
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (M.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def rref(M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_2 and the pivot columns."""
    M = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(M[r:, c])[0]
        if not len(hits):
            continue
        k = r + hits[0]
        M[[r, k]] = M[[k, r]]
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        M[others] ^= M[r]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank_f2(M) -> int:
    return len(rref(M)[1])


def nullspace_f2(M, n: int | None = None) -> np.ndarray:
    """Basis (as rows) of ``{x : M x = 0}`` over F_2."""
    M = np.asarray(M, dtype=np.uint8)
    if n is None:
        n = M.shape[1]
    if M.size == 0:
        return np.eye(n, dtype=np.uint8)
    R, pivots = rref(M)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, c in enumerate(free):
        basis[i, c] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = R[r, c]
    return basis


def _codewords_doubling(rows: np.ndarray) -> np.ndarray:
    words = np.zeros(1, dtype=np.uint64)
    for r in rows:
        words = np.concatenate((words, words ^ r))
    return words


def _codewords_gray(rows: np.ndarray) -> np.ndarray:
    """Codewords in Gray-code order: step ``i`` flips generator ``ctz(i)``."""
    D = len(rows)
    if D == 0:
        return np.zeros(1, dtype=np.uint64)
    i = np.arange(1, 2**D, dtype=np.uint64)
    lowbit = i & (~i + np.uint64(1))
    ctz = np.bitwise_count(lowbit - np.uint64(1)).astype(np.int64)
    flips = rows[ctz]
    return np.concatenate((np.zeros(1, dtype=np.uint64), np.bitwise_xor.accumulate(flips)))


def minimum_distance(generator, method: str = "enumerate") -> int:
    """Minimum weight of a nonzero codeword (``n + 1`` for the zero code)."""
    G = np.asarray(generator, dtype=np.uint8)
    D, n = G.shape
    if D > MAX_VERIFIED_DIMENSION:
        raise ValueError(f"distance verification is capped at dimension {MAX_VERIFIED_DIMENSION}")
    if D == 0:
        return n + 1
    rows = _pack_rows(G)
    words = _codewords_doubling(rows) if method == "enumerate" else _codewords_gray(rows)
    return int(np.bitwise_count(words[1:]).min())


@dataclass(frozen=True)
class LinearCode:
    generator: np.ndarray
    min_distance: int | None = None
    tries: int = 0
    n: int = field(init=False)
    dimension: int = field(init=False)

    def __post_init__(self):
        G = np.asarray(self.generator, dtype=np.uint8)
        if G.ndim != 2:
            raise ValueError("generator must be a 2-D bit matrix")
        if np.any(G > 1):
            raise ValueError("generator entries must be bits")
        if rank_f2(G) != G.shape[0]:
            raise ValueError("generator rows are linearly dependent over F_2")
        G.setflags(write=False)
        object.__setattr__(self, "generator", G)
        object.__setattr__(self, "n", G.shape[1])
        object.__setattr__(self, "dimension", G.shape[0])

    @classmethod
    def verified(cls, generator, tries: int = 0) -> "LinearCode":
        G = np.asarray(generator, dtype=np.uint8)
        return cls(G, minimum_distance(G), tries)

    @property
    def packed_rows(self) -> np.ndarray:
        return _pack_rows(self.generator) if self.dimension else np.zeros(0, dtype=np.uint64)

    @property
    def meets_tenth_thresholds(self) -> bool:
        """Whether dimension and distance both reach n / 10."""
        return (
            self.min_distance is not None
            and 10 * self.dimension >= self.n
            and 10 * self.min_distance >= self.n
        )

    def codewords(self) -> np.ndarray:
        return _codewords_doubling(self.packed_rows)


def repetition_code(n: int) -> LinearCode:
    return LinearCode.verified(np.ones((1, n), dtype=np.uint8))


def single_parity_check_code(n: int) -> LinearCode:
    """Even-weight code of length n (dimension n - 1)."""
    return LinearCode.verified(nullspace_f2(np.ones((1, n), dtype=np.uint8)))


def extended_hamming_code() -> LinearCode:
    """The [8, 4, 4] extended Hamming code."""
    G = np.array(
        [
            [1, 0, 0, 0, 0, 1, 1, 1],
            [0, 1, 0, 0, 1, 0, 1, 1],
            [0, 0, 1, 0, 1, 1, 0, 1],
            [0, 0, 0, 1, 1, 1, 1, 0],
        ],
        dtype=np.uint8,
    )
    return LinearCode.verified(G)


def full_space_code(n: int) -> LinearCode:
    return LinearCode.verified(np.eye(n, dtype=np.uint8))


def random_code(n: int, D: int, min_dist: int, seed=None, max_tries: int = 1000) -> LinearCode:
    """Rejection-sample generator matrices until one has distance >= min_dist."""
    if not 0 <= D <= n:
        raise ValueError("need 0 <= D <= n")
    if D > MAX_VERIFIED_DIMENSION:
        raise ValueError(f"dimension is capped at {MAX_VERIFIED_DIMENSION}")
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_tries + 1):
        G = rng.integers(0, 2, size=(D, n), dtype=np.uint8)
        if rank_f2(G) != D:
            continue
        dist = minimum_distance(G)
        if dist >= min_dist:
            return LinearCode(G, dist, attempt)
    raise NotFound(f"no [{n}, {D}, >={min_dist}] code found in {max_tries} tries")


def dual(C: LinearCode) -> LinearCode:
    """Orthogonal complement; its minimum distance is left unverified."""
    return LinearCode(nullspace_f2(C.generator, C.n))


def same_row_space(A: LinearCode, B: LinearCode) -> bool:
    if A.n != B.n or A.dimension != B.dimension:
        return False
    return np.array_equal(rref(A.generator)[0], rref(B.generator)[0])


def coset_index(C: LinearCode, x) -> int:
    """Syndrome ``G x`` over F_2 read as a D-bit integer (first row most significant).

    Constant on cosets of the dual code and onto ``0 .. 2^D - 1``.
    """
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (C.n,):
        raise ValueError(f"expected a bit vector of length {C.n}")
    syndrome = (C.generator.astype(np.int64) @ x) & 1
    return bits_to_int(syndrome)


def coset_indices(C: LinearCode, words: np.ndarray | None = None) -> np.ndarray:
    """Vectorized :func:`coset_index` over packed words (default: all of F_2^n)."""
    if words is None:
        words = np.arange(2**C.n, dtype=np.uint64)
    out = np.zeros(len(words), dtype=np.int64)
    for r in C.packed_rows:
        out = (out << 1) | (np.bitwise_count(words & r) & 1).astype(np.int64)
    return out


def coset_reps(C: LinearCode) -> np.ndarray:
    """Lexicographically smallest word of every coset, as packed integers."""
    if C.n > 26:
        raise ValueError("coset representatives are enumerated only for n <= 26")
    idx = coset_indices(C)
    _, first = np.unique(idx, return_index=True)
    return first.astype(np.uint64)


def write_code(C: LinearCode) -> str:
    dist = C.min_distance if C.min_distance is not None else minimum_distance(C.generator)
    lines = [f"{C.n} {C.dimension} {dist}"]
    lines += ["".join(str(int(b)) for b in row) for row in C.generator]
    return "\n".join(lines) + "\n"


def read_code(text: str, verify: bool = True) -> LinearCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty code file", 1)
    try:
        n, D, dist = (int(v) for v in lines[0].split())
    except ValueError:
        raise ParseError("header must be 'n D min_dist'", 1) from None
    if len(lines) != D + 1:
        raise ParseError(f"expected {D} generator rows, found {len(lines) - 1}", len(lines))
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        if len(ln) != n or set(ln) - {"0", "1"}:
            raise ParseError(f"row must be {n} bits", i)
        rows.append([int(ch) for ch in ln])
    G = np.array(rows, dtype=np.uint8).reshape(D, n)
    code = LinearCode(G, dist)
    if verify and D and minimum_distance(G) != dist:
        raise ParseError(f"recorded minimum distance {dist} does not match the generator", 1)
    return code
