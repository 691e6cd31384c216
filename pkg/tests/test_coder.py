from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from acdelay.coder import (
    Decoder,
    Encoder,
    decode,
    decoder_push,
    encode,
    encoder_push,
    pipeline_decoded_count,
    source_interval,
)
from acdelay.exact import DyadicInterval, RationalInterval, midpoint, minimal_covering_dyadic
from acdelay.source import make_memoryless
from oracles import brute_covering, brute_source_interval


@st.composite
def sources_and_words(draw, max_len=24):
    k = draw(st.integers(2, 5))
    weights = draw(st.lists(st.integers(1, 12), min_size=k, max_size=k))
    src = make_memoryless([F(w, sum(weights)) for w in weights])
    word = draw(st.lists(st.integers(0, k - 1), max_size=max_len))
    return src, word


def test_source_interval_examples(ternary, half_quarter):
    assert source_interval(ternary, [1]) == RationalInterval.from_endpoints(F(1, 3), F(2, 3))
    assert source_interval(ternary, [1, 1]) == RationalInterval.from_endpoints(F(4, 9), F(5, 9))
    assert source_interval(half_quarter, []) == RationalInterval(0, 1)


def test_source_interval_rejects_bad_letters(ternary, permutation):
    with pytest.raises(ValueError):
        source_interval(ternary, [3])
    with pytest.raises(ValueError, match="probability zero"):
        source_interval(permutation, [0, 0])


@given(sources_and_words(12))
def test_source_interval_matches_splitting_oracle(case):
    src, word = case
    iv = source_interval(src, word)
    lo, hi = brute_source_interval(src.next_probs, word)
    assert (iv.low, iv.high) == (lo, hi)
    assert iv.width == src.sequence_prob(word)


def test_pathological_ones_emit_nothing(ternary):
    enc = Encoder(ternary)
    assert all(encoder_push(enc, 1) == "" for _ in range(40))
    assert enc.bits_emitted == ""


def test_first_letter_bits(ternary):
    assert Encoder(ternary).push(0) == "0"
    assert Encoder(ternary).push(2) == "1"
    assert Encoder(ternary).push(1) == ""


def test_decoder_examples(ternary, half_quarter):
    dec = Decoder(ternary)
    assert decoder_push(dec, 0) == []
    assert decoder_push(dec, 0) == [0]
    assert Decoder(half_quarter).letters_emitted == []


def test_pipeline_examples(ternary, binary_uniform):
    assert pipeline_decoded_count(ternary, [1]) == 0
    word = [1, 0, 1, 1, 0, 0, 1]
    assert pipeline_decoded_count(binary_uniform, word) == len(word)


def test_pipeline_120(ternary):
    # oracle: deepest m with covering(I(120)) inside I(x^m)
    lo, hi = brute_source_interval(ternary.next_probs, [1, 2, 0])
    k, j = brute_covering(lo, hi)
    m = max(m for m in range(4)
            if brute_source_interval(ternary.next_probs, [1, 2, 0][:m])[0] <= F(j, 2**k)
            and F(j + 1, 2**k) <= brute_source_interval(ternary.next_probs, [1, 2, 0][:m])[1])
    assert m == 1
    assert pipeline_decoded_count(ternary, [1, 2, 0]) == m


def test_encoder_matches_covering_oracle_exhaustively(ternary):
    for n in range(7):
        for word in product(range(3), repeat=n):
            enc = Encoder(ternary)
            for x in word:
                enc.push(x)
            assert enc.interval == source_interval(ternary, word)
            assert enc.dyadic == minimal_covering_dyadic(enc.interval)


@given(sources_and_words())
@settings(max_examples=300)
def test_stream_invariants(case):
    src, word = case
    enc, dec = Encoder(src), Decoder(src)
    decoded_before, bits_before = 0, 0
    for x in word:
        bits = enc.push(x)
        for b in bits:
            dec.push(int(b))
        # interval and covering invariants
        iv = enc.interval
        assert iv.width == src.sequence_prob(word[: enc.letters_consumed])
        assert enc.dyadic.contains_interval(iv)
        if not bits:
            assert iv.strictly_contains(midpoint(enc.dyadic))
        # monotone, prefix-correct decoding
        got = dec.letters_emitted
        assert got == word[: len(got)]
        assert len(got) >= decoded_before and enc.level >= bits_before
        decoded_before, bits_before = len(got), enc.level
        # decoder state: maximal source interval containing J
        assert dec.interval.contains_interval(dec.dyadic)


def test_same_length_intervals_are_disjoint(half_quarter):
    ivs = sorted(
        (source_interval(half_quarter, w) for w in product(range(3), repeat=4)),
        key=lambda iv: iv.low,
    )
    assert all(a.high <= b.low for a, b in zip(ivs, ivs[1:]))
    assert ivs[0].low == 0 and ivs[-1].high == 1


def test_markov_round_trip(sticky):
    word = [0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1]
    bits = encode(sticky, word)
    got = decode(sticky, bits)
    assert got == word[: len(got)]
    enc = Encoder(sticky)
    for x in word:
        enc.push(x)
    assert decode(sticky, bits + enc.flush(), max_letters=len(word)) == word


@given(sources_and_words())
def test_flush_recovers_everything(case):
    src, word = case
    enc = Encoder(src)
    bits = "".join(enc.push(x) for x in word)
    tail = enc.flush()
    assert DyadicInterval.from_bits(bits + tail).is_subset_of(enc.interval)
    assert decode(src, bits + tail, max_letters=len(word)) == word


def test_zero_probability_letter_is_refused(permutation):
    enc = Encoder(permutation)
    enc.push(0)
    with pytest.raises(ValueError, match="probability zero"):
        enc.push(0)


def test_decoder_detects_unbounded_output(permutation):
    with pytest.raises(ValueError, match="deterministic cycle"):
        decode(permutation, "0")
    assert decode(permutation, "0", max_letters=5) == [0, 1, 0, 1, 0]


def test_decoder_rejects_non_bits(ternary):
    with pytest.raises(ValueError):
        Decoder(ternary).push(2)


@given(st.lists(st.integers(0, 2), max_size=20))
def test_dyadic_intervals_decode_immediately(word):
    # (1/2, 1/4, 1/4) keeps every source interval dyadic
    src = make_memoryless([F(1, 2), F(1, 4), F(1, 4)])
    assert pipeline_decoded_count(src, word) == len(word)
