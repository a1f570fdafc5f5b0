import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superexpander.errors import NotFound, ParseError
from superexpander.codes import (
    LinearCode,
    bits_to_int,
    coset_index,
    coset_indices,
    coset_reps,
    dual,
    extended_hamming_code,
    full_space_code,
    int_to_bits,
    minimum_distance,
    nullspace_f2,
    random_code,
    rank_f2,
    read_code,
    repetition_code,
    same_row_space,
    single_parity_check_code,
    write_code,
)


def weight_enumeration(G):
    """Minimum nonzero weight by summing every subset of rows."""
    G = np.asarray(G, dtype=int)
    best = None
    for coeffs in itertools.product([0, 1], repeat=len(G)):
        if any(coeffs):
            w = int(((np.array(coeffs) @ G) % 2).sum())
            best = w if best is None else min(best, w)
    return best


@st.composite
def codes(draw, max_n=10):
    n = draw(st.integers(2, max_n))
    D = draw(st.integers(1, n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_code(n, D, 1, seed)


def test_presets():
    assert repetition_code(5).min_distance == 5
    assert single_parity_check_code(6).min_distance == 2 and single_parity_check_code(6).dimension == 5
    H = extended_hamming_code()
    assert (H.n, H.dimension, H.min_distance) == (8, 4, 4)
    assert full_space_code(4).min_distance == 1


def test_random_code_examples():
    C = random_code(4, 1, 4, seed=0)
    assert C.generator.tolist() == [[1, 1, 1, 1]]
    with pytest.raises(NotFound):
        random_code(4, 4, 2, seed=0)
    assert random_code(10, 1, 1, seed=3).min_distance >= 1
    assert random_code(12, 3, 4, seed=5).tries >= 1


def test_dependent_rows_rejected():
    with pytest.raises(ValueError):
        LinearCode(np.array([[1, 1, 0], [1, 1, 0]]))


def test_dual_examples():
    D = dual(repetition_code(4))
    assert D.dimension == 3 and np.all(D.generator.sum(axis=1) % 2 == 0)
    assert dual(full_space_code(3)).dimension == 0


def test_coset_examples():
    C = repetition_code(4)
    for x in itertools.product([0, 1], repeat=4):
        assert coset_index(C, x) == sum(x) % 2
    assert coset_reps(C).tolist() == [0, 1]
    with pytest.raises(ValueError):
        coset_index(C, [1, 0])


def test_bit_helpers():
    assert bits_to_int([1, 0, 1]) == 5
    assert int_to_bits(5, 4).tolist() == [0, 1, 0, 1]


def test_meets_tenth_thresholds():
    assert extended_hamming_code().meets_tenth_thresholds
    assert not repetition_code(20).meets_tenth_thresholds


def test_code_file_round_trip_and_errors():
    H = extended_hamming_code()
    text = write_code(H)
    assert write_code(read_code(text)) == text
    with pytest.raises(ParseError) as err:
        read_code("4 1 4\n1121\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        read_code("4 1 3\n1111\n")
    with pytest.raises(ParseError):
        read_code("4 2 4\n1111\n")


@given(codes())
def test_distance_two_paths_agree(C):
    assert minimum_distance(C.generator, "enumerate") == minimum_distance(C.generator, "gray")
    assert C.min_distance == weight_enumeration(C.generator)


@given(codes())
def test_double_dual_and_orthogonality(C):
    D = dual(C)
    assert D.dimension == C.n - C.dimension
    assert np.all((C.generator.astype(int) @ D.generator.T.astype(int)) % 2 == 0) if D.dimension else True
    if C.dimension < C.n:
        assert same_row_space(dual(D), C)


@given(codes(max_n=12), st.integers(0, 2**32 - 1))
def test_cosets_have_equal_size_and_dual_is_kernel(C, seed):
    idx = coset_indices(C)
    counts = np.bincount(idx, minlength=2**C.dimension)
    assert np.all(counts == 2 ** (C.n - C.dimension))
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, C.n)
    D = dual(C)
    if D.dimension:
        w = (rng.integers(0, 2, D.dimension) @ D.generator.astype(int)) % 2
        assert coset_index(C, w) == 0
        assert coset_index(C, (x + w) % 2) == coset_index(C, x)
    assert coset_indices(C, np.array([bits_to_int(x)], dtype=np.uint64))[0] == coset_index(C, x)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_nullspace_rank_nullity(r, n, seed):
    M = np.random.default_rng(seed).integers(0, 2, (r, n))
    N = nullspace_f2(M)
    assert len(N) + rank_f2(M) == n
    assert np.all((M @ N.T.astype(int)) % 2 == 0)
