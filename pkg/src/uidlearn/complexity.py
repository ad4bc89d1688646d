"""LZ76 string complexity via the exhaustive production history.

A string over the byte alphabet is parsed into its unique exhaustive
history: each component is the longest extension that can be copied from
an earlier position (copies may run self-referentially into the component
itself), closed by one innovation symbol.  The complexity of the string
is the number of components.

Two parsers are provided:

* ``reference_history`` -- direct transcription of the definition; the
  copy length at each component start is found by trying every earlier
  source position.  Quadratic, used as the correctness oracle.
* ``exhaustive_history`` -- the default.  Computes the longest previous
  factor at each component start from the suffix array of the input
  (lexicographic neighbours among earlier suffixes), which is linear in
  practice and fast enough for megasymbol strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

Symbols = Union[bytes, bytearray, str, Sequence[int], np.ndarray]

ALPHABET_SIZE = 256


def as_symbols(s: Symbols) -> bytes:
    """Normalize the accepted input forms to a byte string.

    Text is interpreted as Latin-1 (one symbol per character); integer
    sequences must stay within [0, 255].
    """
    if isinstance(s, bytes):
        return s
    if isinstance(s, bytearray):
        return bytes(s)
    if isinstance(s, str):
        try:
            return s.encode("latin-1")
        except UnicodeEncodeError as exc:
            raise ValueError("text symbols must be single bytes (Latin-1)") from exc
    if isinstance(s, np.ndarray):
        if s.size and (s.min() < 0 or s.max() > 255):
            raise ValueError("symbols must lie in [0, 255]")
        return s.astype(np.uint8).tobytes()
    seq = list(s)
    if any(not (0 <= v <= 255) for v in seq):
        raise ValueError("symbols must lie in [0, 255]")
    return bytes(seq)


@dataclass(frozen=True)
class ExhaustiveHistory:
    """The unique exhaustive parse of a string.

    ``components`` holds 1-based inclusive (start, end) boundaries that
    partition [1, len(s)].  The complexity of the string is the number
    of components.
    """

    length: int
    components: tuple[tuple[int, int], ...]

    @property
    def complexity(self) -> int:
        return len(self.components)

    def validate(self) -> None:
        pos = 1
        for start, end in self.components:
            if start != pos or end < start:
                raise ValueError(f"components are not a contiguous cover at {start}")
            pos = end + 1
        if pos != self.length + 1:
            raise ValueError("components do not cover the string")


def is_reproducible(seed: Symbols, extension: Symbols) -> bool:
    """Whether ``seed + extension`` can be obtained by copying from ``seed``.

    True iff some source position p in [1, len(seed)] satisfies
    ``extension[k] == r[p + k - 1]`` for every k, with ``r`` the full
    concatenation -- the copy may run into the extension itself.
    """
    s = as_symbols(seed)
    q = as_symbols(extension)
    if not s:
        return False
    if not q:
        return True
    r = s + q
    for p in range(len(s)):  # 0-based source start, p+1 in 1-based terms
        if all(q[k] == r[p + k] for k in range(len(q))):
            return True
    return False


def _longest_copy_naive(a: np.ndarray, i: int) -> int:
    """Longest prefix of a[i:] copyable from a source start j < i.

    Tries every source position at once: ``alive`` is the set of starts
    matching the first k symbols; k grows while any survives.
    """
    n = len(a)
    alive = np.arange(i)
    k = 0
    while alive.size and i + k < n:
        alive = alive[a[alive + k] == a[i + k]]
        if alive.size:
            k += 1
    return k


def reference_history(s: Symbols) -> ExhaustiveHistory:
    """Quadratic oracle parser: per-component search over all sources."""
    data = as_symbols(s)
    n = len(data)
    a = np.frombuffer(data, dtype=np.uint8)
    comps: list[tuple[int, int]] = []
    i = 0
    while i < n:
        copy_len = _longest_copy_naive(a, i)
        end = min(i + copy_len + 1, n)  # +1 innovation unless the string ends mid-copy
        comps.append((i + 1, end))
        i = end
    return ExhaustiveHistory(length=n, components=tuple(comps))


def _suffix_array(a: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling with numpy sorts."""
    n = len(a)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rank = a.astype(np.int64)
    k = 1
    order = np.argsort(rank, kind="stable")
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:]
        order = np.lexsort((key2, rank))
        new_rank = np.empty(n, dtype=np.int64)
        r_ord = rank[order]
        k_ord = key2[order]
        bumps = (r_ord[1:] != r_ord[:-1]) | (k_ord[1:] != k_ord[:-1])
        new_rank[order] = np.concatenate(([0], np.cumsum(bumps)))
        rank = new_rank
        if rank[order[-1]] == n - 1:
            break
        k *= 2
    return order


def _prev_smaller_neighbours(sa: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each text position, its lexicographic neighbours among suffixes
    that start earlier in the text (-1 when absent)."""
    n = len(sa)
    psv = np.full(n, -1, dtype=np.int64)
    nsv = np.full(n, -1, dtype=np.int64)
    stack: list[int] = []
    for r in range(n):
        i = int(sa[r])
        while stack and stack[-1] > i:
            nsv[stack.pop()] = i
        if stack:
            psv[i] = stack[-1]
        stack.append(i)
    return psv, nsv


_CHUNK = 64


def _match_len(data: bytes, i: int, j: int, n: int) -> int:
    """Length of the common prefix of data[i:] and data[j:] (j may be -1)."""
    if j < 0:
        return 0
    k = 0
    while i + k + _CHUNK <= n and data[i + k : i + k + _CHUNK] == data[j + k : j + k + _CHUNK]:
        k += _CHUNK
    while i + k < n and data[i + k] == data[j + k]:
        k += 1
    return k


def exhaustive_history(s: Symbols) -> ExhaustiveHistory:
    """Default parser: longest previous factor from the suffix array.

    The longest copy at position i is the longest common prefix of
    suffix i with a suffix starting earlier in the text, and that
    maximum is attained at one of the two lexicographic neighbours
    restricted to earlier starts.
    """
    data = as_symbols(s)
    n = len(data)
    if n == 0:
        return ExhaustiveHistory(length=0, components=())
    a = np.frombuffer(data, dtype=np.uint8)
    sa = _suffix_array(a)
    psv, nsv = _prev_smaller_neighbours(sa)
    comps: list[tuple[int, int]] = []
    i = 0
    while i < n:
        copy_len = max(
            _match_len(data, i, int(psv[i]), n),
            _match_len(data, i, int(nsv[i]), n),
        )
        end = min(i + copy_len + 1, n)
        comps.append((i + 1, end))
        i = end
    return ExhaustiveHistory(length=n, components=tuple(comps))


def lz76_complexity(s: Symbols) -> int:
    """Number of components in the exhaustive history; 0 for the empty string."""
    return exhaustive_history(s).complexity


def reference_complexity(s: Symbols) -> int:
    """Oracle counterpart of :func:`lz76_complexity`."""
    return reference_history(s).complexity
