import warnings
from fractions import Fraction

import pytest

from deletion_lab import rng as rngmod
from deletion_lab.online import (
    ConfusablePair,
    IdentityAdversary,
    NonCausalProbeAdversary,
    OnlineConfig,
    WaitPushAdversary,
    build_pairs,
    causality_check,
    make_first_superstring_decoder,
    make_unique_decoder,
    run_wait_push,
    simulate_online,
    transmit,
    wait_length,
    wait_profile,
)
from deletion_lab.words import Word


def paired_toy_code():
    """Four codewords forming two confusable pairs with identical profiles.

    Prefixes 00000100 / 00001000 (and the 01-variants) become unique at bit
    8 with equal zero counts, and pair members share their entire suffix.
    """
    s, sp = "10110010", "01011101"
    return [
        Word("00000100" + s),
        Word("00001000" + s),
        Word("00000101" + sp),
        Word("00001001" + sp),
    ]


CFG = OnlineConfig(p=Fraction(1, 2), p0_adv=Fraction(2, 5))


def test_online_config_regime():
    assert CFG.regime_bound == Fraction(5, 11)
    assert CFG.in_regime
    assert CFG.budget(16) == 8
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        OnlineConfig(p=Fraction(2, 5), p0_adv=Fraction(2, 5))
    assert caught and "regime" in str(caught[0].message)
    with pytest.raises(ValueError):
        OnlineConfig(p=Fraction(3, 2), p0_adv=Fraction(1, 4))


def test_wait_length_examples():
    C = [Word("000"), Word("011"), Word("101")]
    assert wait_length(Word("000"), C) == 2
    assert wait_length(Word("101"), C) == 1
    assert wait_length(Word("011"), C) == 2
    # two codewords differing only in the last bit need the full word
    D = [Word("0000"), Word("0001")]
    assert wait_length(Word("0000"), D) == 4
    assert wait_length(Word("x") if False else Word("0"), [Word("0")]) == 0
    with pytest.raises(ValueError):
        wait_length(Word("111"), C)


def test_wait_profile_counts_and_tiebreak():
    C = [Word("000"), Word("011"), Word("101")]
    prof = wait_profile(Word("000"), C)
    assert (prof.wait_len, prof.r0, prof.r1, prof.b) == (2, 2, 0, 0)
    assert prof.r0 + prof.r1 == prof.wait_len
    # balanced prefix ties to 0
    D = [Word("0110"), Word("0111"), Word("1000")]
    prof = wait_profile(Word("0110"), D)
    assert (prof.wait_len, prof.r0, prof.r1, prof.b) == (4, 2, 2, 0)
    E = [Word("0100"), Word("0111")]
    prof = wait_profile(Word("0100"), E)
    assert prof.wait_len == 3 and prof.r0 == 2 and prof.r1 == 1 and prof.b == 0


def test_build_pairs_full_pairing():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    assert len(table.pairs) == 2 and not table.unpaired
    assert table.paired_fraction == 1.0
    for pair in table.pairs:
        assert pair.s_star == pair.x[8:] == pair.y[8:]
        assert pair.pushed == Word(bytes([0]) * pair.profile.r_majority) + pair.s_star
        # pushed output is longer than the (1-p)n strategy-2 output
        assert len(pair.pushed) > 16 - CFG.budget(16)


def test_build_pairs_no_pairs_when_wait_too_long():
    # distinct suffixes everywhere: wait length is the full word, classes
    # fail the q <= 1-p requirement
    code = [Word("0000"), Word("0001"), Word("0010"), Word("0011")]
    cfg = OnlineConfig(p=Fraction(1, 2), p0_adv=Fraction(2, 5))
    table = build_pairs(code, cfg)
    assert not table.pairs and len(table.unpaired) == 4


def test_wait_push_pair_outputs_identical():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    for pair in table.pairs:
        rx = run_wait_push(code, pair.x, CFG, table, force_strategy=1, force_bit=0)
        ry = run_wait_push(code, pair.y, CFG, table, force_strategy=1, force_bit=0)
        assert rx.output == ry.output == pair.pushed
        assert rx.paired and ry.paired
        assert rx.deletions <= CFG.budget(16)


def test_wait_push_strategy_two_truncates():
    code = paired_toy_code()
    res = run_wait_push(code, code[0], CFG, force_strategy=2)
    assert res.output == code[0][: 16 - CFG.budget(16)]
    assert res.deletions == CFG.budget(16)


def test_wait_push_gives_up_on_wrong_bit():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    res = run_wait_push(code, code[0], CFG, table, force_strategy=1, force_bit=1)
    assert not res.paired
    # wait phase deleted the zeros it saw, then everything is transmitted
    assert res.deletions <= CFG.budget(16)


def test_wait_push_non_codeword_input_is_handled():
    code = paired_toy_code()
    adv = WaitPushAdversary(code, CFG, force_strategy=1, force_bit=0)
    res = transmit(Word("1111111111111111"), adv, rngmod.py_rng(0, "t"))
    assert res.deletions <= CFG.budget(16)
    with pytest.raises(ValueError):
        run_wait_push(code, Word("1111111111111111"), CFG)


def test_budget_respected_over_random_trials():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    for trial in range(2000):
        rng = rngmod.py_rng(7, "budget", trial)
        x = code[rng.randrange(len(code))]
        res = transmit(x, WaitPushAdversary(code, CFG, table), rng)
        assert res.deletions <= CFG.budget(16)


def test_strategy_one_cost_chain():
    # paired pushes cost at most q n/2 + (1-q) p0 n, which stays under pn
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    n = 16
    for trial in range(500):
        rng = rngmod.py_rng(8, "chain", trial)
        x = code[rng.randrange(len(code))]
        res = transmit(x, WaitPushAdversary(code, CFG, table, 1, 0), rng)
        if not res.paired:
            continue
        q = table.profiles[x].q
        bound = q * n / 2 + (1 - q) * CFG.p0_adv * n
        assert res.deletions <= bound < CFG.p * n


def test_simulate_confusion_mass_and_decoders():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    dec = make_unique_decoder(code)
    rep = simulate_online(
        code, CFG, dec, trials=100, master_seed=3, pairs=table,
        force_strategy=1, force_bit=0,
    )
    summary = rep.summary()
    assert summary["confused_mean"] == 1.0
    assert summary["decoded_ok_mean"] <= 0.5
    ml = make_first_superstring_decoder(code)
    rep2 = simulate_online(
        code, CFG, ml, trials=100, master_seed=3, pairs=table,
        force_strategy=1, force_bit=0,
    )
    assert rep2.summary()["decoded_ok_mean"] <= 0.5
    assert rep.columns == (
        "trial", "codeword_index", "strategy", "coin_bit",
        "deletions_used", "output_len", "decoded_ok", "confused",
    )


def test_simulate_identity_adversary_no_errors():
    code = paired_toy_code()
    exact = lambda w: w if w in code else None
    rep = simulate_online(
        code, CFG, exact, trials=60, master_seed=1,
        adversary_factory=lambda s, b: IdentityAdversary(),
    )
    assert rep.summary()["decoded_ok_mean"] == 1.0
    assert rep.summary()["confused_mean"] == 0.0


def test_causality_checks():
    code = paired_toy_code()
    ok = causality_check(lambda: WaitPushAdversary(code, CFG), 16, trials=300)
    assert ok["passed"]
    ident = causality_check(lambda: IdentityAdversary(), 16, trials=50)
    assert ident["passed"]
    bad = causality_check(lambda: NonCausalProbeAdversary(), 16, trials=300)
    assert not bad["passed"] and bad["witness"] is not None


def test_pair_keep_for_rejects_stranger():
    code = paired_toy_code()
    table = build_pairs(code, CFG)
    pair = table.pairs[0]
    with pytest.raises(KeyError):
        pair.keep_for(Word("0" * 16))
