"""Exact token-sequence duplication detection.

Source text is tokenized into case-sensitive word runs (whitespace and
punctuation separate, and are discarded).  A duplicate fragment is a token
sequence of at least ``min_tokens`` tokens occurring in two or more places
(across entities or within one) that is maximal: extending it by one token
on either side would lose at least one occurrence.

The detector builds a suffix array over the concatenated token streams
(unique sentinels between entities), takes LCP intervals as the
right-maximal candidates, and keeps the left-diverse ones.  Tests check it
against an independent brute-force enumeration.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

_WORD = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class Token:
    text: str
    start: int  # 1-based inclusive char offset in the tokenized text
    end: int


@dataclass(frozen=True)
class Occurrence:
    sequence: int  # index into the input sequence list
    first_token: int  # 0-based token index
    last_token: int


@dataclass(frozen=True)
class Fragment:
    tokens: tuple[str, ...]
    occurrences: tuple[Occurrence, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    @property
    def fragment_id(self) -> str:
        return self.digest[:12]

    @property
    def color(self) -> str:
        return self.digest[:6].upper()


def tokenize(text: str) -> list[Token]:
    return [
        Token(m.group(0), m.start() + 1, m.end()) for m in _WORD.finditer(text)
    ]


def _suffix_array(arr: list[int]) -> list[int]:
    # Rank-doubling construction; input symbols may be any comparable ints.
    n = len(arr)
    order = {v: i for i, v in enumerate(sorted(set(arr)))}
    rank = [order[v] for v in arr]
    sa = sorted(range(n), key=lambda i: rank[i])
    k = 1
    while k < n:
        def sort_key(i: int) -> tuple[int, int]:
            return (rank[i], rank[i + k] if i + k < n else -1)

        sa.sort(key=sort_key)
        new_rank = [0] * n
        for idx in range(1, n):
            prev, cur = sa[idx - 1], sa[idx]
            new_rank[cur] = new_rank[prev] + (sort_key(cur) != sort_key(prev))
        rank = new_rank
        if rank[sa[-1]] == n - 1:
            break
        k *= 2
    return sa


def _lcp_array(arr: list[int], sa: list[int]) -> list[int]:
    # Kasai: lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i].
    n = len(arr)
    rank = [0] * n
    for i, s in enumerate(sa):
        rank[s] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        if rank[i] > 0:
            j = sa[rank[i] - 1]
            while i + h < n and j + h < n and arr[i + h] == arr[j + h]:
                h += 1
            lcp[rank[i]] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


def detect(sequences: list[list[str]], min_tokens: int = 5) -> list[Fragment]:
    """Maximal repeated token sequences of at least ``min_tokens`` tokens.

    Results are ordered longest first, ties by first occurrence; every
    fragment lists all of its occurrences in sequence order.
    """
    if min_tokens < 1:
        raise ValueError("min_tokens must be at least 1")

    vocabulary: dict[str, int] = {}
    arr: list[int] = []
    where: list[tuple[int, int]] = []  # global position -> (sequence, token index)
    sentinel = -1
    for seq_index, tokens in enumerate(sequences):
        for tok_index, tok in enumerate(tokens):
            arr.append(vocabulary.setdefault(tok, len(vocabulary)))
            where.append((seq_index, tok_index))
        arr.append(sentinel)
        where.append((seq_index, -1))
        sentinel -= 1
    if not arr:
        return []

    sa = _suffix_array(arr)
    lcp = _lcp_array(arr, sa)
    n = len(arr)

    # Enumerate LCP intervals (value, left, right): maximal SA ranges whose
    # suffixes share exactly `value` leading symbols.  Each is right-maximal.
    intervals: list[tuple[int, int, int]] = []
    stack: list[tuple[int, int]] = []  # (lcp value, left boundary)
    for i in range(1, n + 1):
        current = lcp[i] if i < n else 0
        left = i - 1
        while stack and stack[-1][0] > current:
            value, interval_left = stack.pop()
            intervals.append((value, interval_left, i - 1))
            left = interval_left
        if not stack or stack[-1][0] < current:
            stack.append((current, left))

    fragments: list[Fragment] = []
    for value, left, right in intervals:
        if value < min_tokens:
            continue
        positions = [sa[i] for i in range(left, right + 1)]
        lefts: set[object] = set()
        for p in positions:
            if p == 0 or arr[p - 1] < 0:
                lefts.add(("boundary", p))  # unique per occurrence
            else:
                lefts.add(arr[p - 1])
        if len(lefts) < 2:
            continue  # every occurrence extends left the same way
        start = positions[0]
        tokens = tuple(
            sequences[where[start + k][0]][where[start + k][1]]
            for k in range(value)
        )
        occs = sorted(
            (Occurrence(where[p][0], where[p][1], where[p][1] + value - 1)
             for p in positions),
            key=lambda o: (o.sequence, o.first_token),
        )
        fragments.append(Fragment(tokens, tuple(occs)))

    fragments.sort(
        key=lambda f: (
            -len(f.tokens),
            f.occurrences[0].sequence,
            f.occurrences[0].first_token,
        )
    )
    return fragments
