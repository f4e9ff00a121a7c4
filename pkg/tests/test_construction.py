import json
import random
from fractions import Fraction

import pytest

from deletion_lab.construction import (
    InnerCodebook,
    NotExecutableError,
    ParamsError,
    SignatureError,
    derive_params,
    encode_outer,
    extract_signature,
    inner_codeword,
    is_admissible,
    params_from_json,
    params_to_json,
    preserves,
    rate_info,
    read_outer_words,
    smallest_lambda,
    toy_params,
    weight_admissible,
    write_outer_words,
)
from deletion_lab.words import DeletionPattern, Word, apply_pattern, is_subsequence, run_count


def test_derive_params_examples():
    p4 = derive_params(Fraction(2, 5), 100)
    assert p4.lam == 2 and p4.delta == Fraction(7, 20)  # delta = 0.35
    p9 = derive_params("0.9", 100)
    assert p9.lam == 5 and p9.delta == Fraction(11, 160)  # 0.06875
    assert p9.log2_K == 14895
    assert p9.log2_R == 2 + 4 * p9.log2_K
    assert not p9.executable


def test_relaxed_lambda_admits_one_below_half():
    for p in ("0.1", "0.3", "0.49"):
        assert smallest_lambda(p, relaxed=True) == 1
        assert smallest_lambda(p) >= 2  # strict rule needs (1+p)/2 < 1 - 2^-lam


def test_derive_params_rejects_bad_p():
    for bad in ("0", "1", "1.2", "-0.1"):
        with pytest.raises(ParamsError):
            derive_params(bad, 10)


def test_paper_mode_refuses_to_materialize():
    params = derive_params("0.5", 10)
    with pytest.raises(NotExecutableError):
        inner_codeword(1, params)
    assert "log2" in str(rate_info(params).keys()) or "log2_rate_floor" in rate_info(params)


def test_toy_params_examples():
    t1 = toy_params(2, 2, 1, "0.5", 4)
    assert (t1.L, t1.N) == (8, 32)
    t2 = toy_params(2, 4, 2, "0.5", 8)
    assert (t2.L, t2.N) == (32, 256)
    with pytest.raises(ParamsError):
        toy_params(3, 3, 1, "0.5", 4)  # odd R
    with pytest.raises(ParamsError):
        toy_params(2, 4, 1, Fraction(1, 2), 6)  # delta*n odd
    with pytest.raises(ParamsError):
        toy_params(2, 4, 1, Fraction(1, 3), 4)  # delta*n not integral
    with pytest.raises(ParamsError):
        toy_params(2, 100, 1, "0.5", 4, max_length=1000)  # L overflow


def test_inner_codewords():
    t1 = toy_params(2, 2, 1, "0.5", 4)
    assert inner_codeword(1, t1) == Word("01010101")
    assert inner_codeword(2, t1) == Word("00110011")
    with pytest.raises(ParamsError):
        inner_codeword(3, t1)
    # run counts: 2 R^(K+1-i), consecutive ratio exactly R
    for K, R in ((2, 2), (2, 4), (3, 2)):
        params = toy_params(K, R, 1, Fraction(1, 2), 4)
        counts = [run_count(inner_codeword(i, params)) for i in range(1, K + 1)]
        assert counts == [2 * R ** (K + 1 - i) for i in range(1, K + 1)]
        for a, b in zip(counts, counts[1:]):
            assert a == R * b


def test_encode_outer():
    t1 = toy_params(2, 2, 1, "0.5", 4)
    book = InnerCodebook(t1)
    assert encode_outer((1,), t1, book) == book[1]
    assert encode_outer((1, 2), t1, book) == Word("0101010100110011")
    r = random.Random(0)
    for _ in range(20):
        X = tuple(r.randrange(1, 3) for _ in range(r.randrange(1, 6)))
        assert len(encode_outer(X, t1, book)) == len(X) * t1.L
    with pytest.raises(ParamsError):
        encode_outer((0,), t1, book)


def test_preserves_examples():
    params = toy_params(2, 4, 2, "0.5", 8)
    odd = DeletionPattern(32, tuple(range(1, 33, 2)))
    assert not preserves(odd, 1, params)  # sigma(g_1) = 1^16, one run
    assert preserves(odd, 2, params)  # sigma(g_2) = (01)^8, 16 runs
    empty = DeletionPattern(32, ())
    assert preserves(empty, 1, params) and preserves(empty, 2, params)


def test_admissibility_examples():
    params = toy_params(2, 4, 2, "0.5", 8)  # L=32: 1-admissible cutoff is 8
    assert is_admissible(DeletionPattern(32, ()), 1, params)
    assert is_admissible(DeletionPattern(32, tuple(range(1, 9))), 1, params)
    assert not is_admissible(DeletionPattern(32, tuple(range(1, 10))), 1, params)
    assert not is_admissible(DeletionPattern(32, tuple(range(1, 33))), 5, params)
    # the weight-level predicate agrees with a float evaluation away from ties
    for ell in range(0, 4):
        for w in range(0, 33):
            exact = weight_admissible(w, ell, params)
            approx = w <= 32 * (1 - 0.5 ** (ell + 1) - 0.5)
            assert exact == approx


def test_admissibility_exact_at_irrational_threshold():
    # R = 2: threshold involves 1/sqrt(2); squared-form arithmetic must match
    # a high-precision float evaluation on every weight
    params = toy_params(3, 2, 2, "0.5", 4)  # L = 16
    for ell in range(0, 3):
        bound = params.L * (1 - 0.5 ** (ell + 1) - 2 ** -0.5)
        for w in range(0, params.L + 1):
            assert weight_admissible(w, ell, params) == (w <= bound)


def test_signature_block_example():
    params = toy_params(2, 4, 2, "0.5", 4)
    tau = DeletionPattern(params.N, tuple(range(1, 33, 2)))  # odd bits of block 1
    sig = extract_signature(tau, params)
    assert sig.kept_indices == (2, 3)
    assert all(s == frozenset({1}) for s in sig.corruption_sets)
    assert sig.outer_pattern.deleted == (1, 4)


def test_signature_of_empty_pattern():
    params = toy_params(2, 4, 2, "0.5", 4)
    sig = extract_signature(DeletionPattern(params.N, ()), params)
    assert sig.kept_indices == (1, 2)
    assert all(s == frozenset({1}) for s in sig.corruption_sets)


def test_signature_subsequence_guarantee():
    params = toy_params(2, 4, 2, "0.5", 4)
    book = InnerCodebook(params)
    limit = int(params.N * (1 - 2**-params.lam - 0.5 - float(params.delta) / 2))
    r = random.Random(9)
    for _ in range(100):
        w = r.randrange(0, limit + 1)
        tau = DeletionPattern(params.N, tuple(r.sample(range(1, params.N + 1), w)))
        sig = extract_signature(tau, params)
        X = tuple(r.randrange(1, 3) for _ in range(4))
        lhs = apply_pattern(sig.tau_prime, encode_outer(sig.select(X), params, book))
        rhs = apply_pattern(tau, encode_outer(X, params, book))
        assert is_subsequence(lhs, rhs)
        for block, S in zip(sig.inner_patterns, sig.corruption_sets):
            assert is_admissible(block, params.lam - 1, params)
            assert all(preserves(block, j, params, book) for j in (1, 2) if j not in S)


def test_signature_rejects_overweight_pattern():
    params = toy_params(2, 4, 2, "0.5", 4)
    tau = DeletionPattern(params.N, tuple(range(1, params.N + 1)))
    with pytest.raises(SignatureError):
        extract_signature(tau, params)


def test_rate_info_examples():
    params = toy_params(2, 4, 1, "0.5", 8)
    info = rate_info(params)
    assert info["beta"] == Fraction(1, 64)
    assert info["gamma"] == Fraction(1, 256)
    assert info["rate"] == Fraction(1, 8192)
    # rate decreases in R at fixed K
    bigger = toy_params(2, 8, 1, "0.5", 8)
    assert rate_info(bigger)["rate"] < info["rate"]
    paper = derive_params("0.9", 100)
    assert "log2_rate_floor" in rate_info(paper)
    assert rate_info(paper)["log2_rate_floor"] < -(2**14000)


def test_copies_asymmetry():
    # two copies of g_1 absorb g_2, but g_1 needs R copies of g_2
    for K, R in ((2, 4), (2, 2), (3, 4)):
        params = toy_params(K, R, 1, Fraction(1, 2), 4)
        book = InnerCodebook(params)
        g1, g2 = book[1], book[2]
        assert is_subsequence(g2, g1 + g1)
        assert is_subsequence(g1, g2 * R)
        assert not is_subsequence(g1, g2 * (R - 1))


def test_params_json_roundtrip():
    params = toy_params(2, 4, 2, "0.5", 8)
    blob = json.dumps(params_to_json(params))
    back = params_from_json(json.loads(blob))
    assert back == params
    paper = derive_params("0.9", 10)
    back = params_from_json(json.loads(json.dumps(params_to_json(paper))))
    assert back.log2_K == paper.log2_K and back.lam == paper.lam


def test_outer_word_file_roundtrip(tmp_path):
    path = tmp_path / "outer.txt"
    words = [(1, 2, 1), (2, 2, 2)]
    write_outer_words(path, words)
    assert read_outer_words(path) == words


def test_weight_bound_guarantees_enough_admissible_blocks():
    # patterns within N(1 - 2^-lam - 1/sqrt(R) - delta/2) always leave at
    # least delta*n admissible inner patterns, so signature extraction
    # cannot fail below that weight
    params = toy_params(2, 16, 2, "0.5", 4)  # N = 2048, bound = N/4 = 512
    bound = int(params.N * (1 - 2**-params.lam - 0.25 - float(params.delta) / 2))
    assert bound == 512
    r = random.Random(12)
    for trial in range(200):
        w = bound if trial < 50 else r.randrange(0, bound + 1)
        tau = DeletionPattern(params.N, tuple(r.sample(range(1, params.N + 1), w)))
        sig = extract_signature(tau, params)  # must not raise
        assert len(sig.kept_indices) == params.delta_n


def test_signature_kept_indices_are_first_admissible():
    from deletion_lab.words import split_pattern

    params = toy_params(2, 4, 2, "0.5", 4)
    r = random.Random(13)
    for _ in range(50):
        w = r.randrange(0, 40)
        tau = DeletionPattern(params.N, tuple(r.sample(range(1, params.N + 1), w)))
        blocks = split_pattern(tau, params.n, params.L)
        admissible = [
            i + 1
            for i, blk in enumerate(blocks)
            if is_admissible(blk, params.lam - 1, params)
        ]
        if len(admissible) < params.delta_n:
            with pytest.raises(SignatureError):
                extract_signature(tau, params)
            continue
        sig = extract_signature(tau, params)
        assert list(sig.kept_indices) == admissible[: params.delta_n]
        book = InnerCodebook(params)
        for idx, S in zip(sig.kept_indices, sig.corruption_sets):
            corrupted = {
                j
                for j in range(1, params.K + 1)
                if not preserves(blocks[idx - 1], j, params, book)
            }
            assert corrupted <= S and len(S) == params.lam - 1
