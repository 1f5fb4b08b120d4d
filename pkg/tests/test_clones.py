"""Duplicate-fragment detection against a brute-force enumeration."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmkit import Fragment, Occurrence, detect, tokenize

from oracles import oracle_maximal_repeats


def as_tuples(fragments: list[Fragment]) -> set[tuple[tuple[str, ...], tuple]]:
    return {
        (f.tokens, tuple((o.sequence, o.first_token) for o in f.occurrences))
        for f in fragments
    }


class TestTokenize:
    def test_word_runs_with_one_based_offsets(self):
        tokens = tokenize("foo(bar, _x9) ")
        assert [t.text for t in tokens] == ["foo", "bar", "_x9"]
        assert [(t.start, t.end) for t in tokens] == [(1, 3), (5, 7), (10, 12)]

    def test_offsets_slice_the_original_text(self):
        text = "if (a > b) { return a; }"
        for token in tokenize(text):
            assert text[token.start - 1 : token.end] == token.text

    def test_case_sensitive(self):
        assert [t.text for t in tokenize("Foo foo FOO")] == ["Foo", "foo", "FOO"]

    def test_empty_and_symbol_only_text(self):
        assert tokenize("") == []
        assert tokenize("+-*/ {} ();") == []


class TestDetect:
    def test_planted_clone_across_two_sequences(self):
        shared = ["a", "b", "c", "d", "e"]
        left = ["x"] + shared + ["y"]
        right = ["p", "q"] + shared + ["r"]
        found = detect([left, right], min_tokens=5)
        assert len(found) == 1
        fragment = found[0]
        assert fragment.tokens == tuple(shared)
        assert fragment.occurrences == (
            Occurrence(0, 1, 5),
            Occurrence(1, 2, 6),
        )

    def test_repeat_within_one_sequence(self):
        seq = ["a", "b", "c", "x", "a", "b", "c"]
        found = detect([seq], min_tokens=3)
        assert [f.tokens for f in found] == [("a", "b", "c")]
        assert found[0].occurrences == (Occurrence(0, 0, 2), Occurrence(0, 4, 6))

    def test_fragments_are_maximal_not_their_substrings(self):
        seq = ["a", "b", "c", "d", "x", "a", "b", "c", "d"]
        found = detect([seq], min_tokens=2)
        assert [f.tokens for f in found] == [("a", "b", "c", "d")]

    def test_left_diversity_rejects_shared_left_context(self):
        # "b c" always follows "a", so only "a b c" is reported
        seq = ["a", "b", "c", "x", "a", "b", "c"]
        found = detect([seq], min_tokens=2)
        assert [f.tokens for f in found] == [("a", "b", "c")]

    def test_boundary_occurrences_count_as_diverse(self):
        # one occurrence starts a sequence: nothing to its left, so the
        # fragment cannot be extended left even though the other can
        found = detect([["a", "b", "c"], ["z", "a", "b", "c"]], min_tokens=3)
        assert [f.tokens for f in found] == [("a", "b", "c")]

    def test_below_threshold_is_silent(self):
        assert detect([["a", "b", "a", "b"]], min_tokens=5) == []

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            detect([["a"]], min_tokens=0)

    def test_empty_input(self):
        assert detect([], min_tokens=1) == []
        assert detect([[], []], min_tokens=1) == []

    def test_ordering_longest_first_then_first_occurrence(self):
        long = ["l1", "l2", "l3", "l4"]
        short = ["s1", "s2"]
        seqs = [
            short + ["x"] + long,
            long + ["y"] + short + ["w", "q1", "q2", "z", "q1", "q2"],
        ]
        found = detect(seqs, min_tokens=2)
        lengths = [len(f.tokens) for f in found]
        assert lengths == sorted(lengths, reverse=True)
        assert found[0].tokens == tuple(long)

    def test_identifiers_are_stable_per_text(self):
        first = detect([["a", "b", "c"], ["a", "b", "c"]], min_tokens=3)[0]
        second = detect([["z", "a", "b", "c"], ["a", "b", "c"]], min_tokens=3)[0]
        assert first.fragment_id == second.fragment_id
        assert first.color == second.color
        assert len(first.fragment_id) == 12
        assert len(first.color) == 6
        assert first.text == "a b c"


class TestOracleEquivalence:
    @pytest.mark.parametrize("seed", range(12))
    def test_random_small_alphabets(self, seed):
        rng = random.Random(seed)
        sequences = [
            [rng.choice("abcd") for _ in range(rng.randint(0, 30))]
            for _ in range(rng.randint(1, 4))
        ]
        min_tokens = rng.randint(1, 4)
        got = as_tuples(detect(sequences, min_tokens))
        want = oracle_maximal_repeats(sequences, min_tokens)
        assert got == want

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.lists(st.sampled_from("ab"), max_size=18),
            min_size=1,
            max_size=3,
        ),
        st.integers(1, 3),
    )
    def test_hypothesis_agrees_with_the_oracle(self, sequences, min_tokens):
        got = as_tuples(detect(sequences, min_tokens))
        want = oracle_maximal_repeats(sequences, min_tokens)
        assert got == want
