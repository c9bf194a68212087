"""Vectorised pair products for free groups.

Reduced words of a rank-``r`` free group are ranked in shortlex order, giving
a bijection onto the nonnegative integers.  With ``b = 2r - 1`` a word
``d_0 d_1 ... d_{n-1}`` (letter indices) has code

    offset(n) + d_0 b^{n-1} + sum_{i>=1} rel(d_{i-1}, d_i) b^{n-1-i}

where ``rel`` renumbers the ``2r - 1`` letters allowed after ``d_{i-1}``
preserving order.  For a product ``beta * gamma`` with cancellation ``c`` the
code of ``beta[:k-c] + gamma[c:]`` is assembled from per-word prefix and
suffix tables, so all ``|A| * |B|`` products are computed with numpy gathers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

INT64_MAX = 2**63 - 1
# pairs per chunk; fixed so output is independent of the worker count
CHUNK_PAIRS = 1 << 20


def token_to_index(t: int) -> int:
    return 2 * (abs(t) - 1) + (t < 0)


def index_to_token(d: int) -> int:
    return (d // 2 + 1) * (-1 if d % 2 else 1)


class WordCodec:
    """Shortlex ranking of reduced words of length ``<= max_length``."""

    def __init__(self, rank: int, max_length: int):
        self.rank = rank
        self.max_length = max_length
        r2 = 2 * rank
        b = r2 - 1
        self.base = b
        counts = [1] + [r2 * b ** (n - 1) for n in range(1, max_length + 1)]
        offsets = [0]
        for cnt in counts:
            offsets.append(offsets[-1] + cnt)
        if offsets[-1] > INT64_MAX:
            raise OverflowError(
                f"rank {rank}, length {max_length}: word codes exceed int64"
            )
        self.offsets = np.array(offsets, dtype=np.int64)
        self.pow = np.array([b**i for i in range(max_length + 1)], dtype=np.int64)
        nxt = np.arange(r2)[None, :]
        inv = (np.arange(r2) ^ 1)[:, None]
        self.rel = (nxt - (nxt > inv)).astype(np.int64)

    @staticmethod
    def fits(rank: int, max_length: int) -> bool:
        r2 = 2 * rank
        total = 1 + sum(r2 * (r2 - 1) ** (n - 1) for n in range(1, max_length + 1))
        return total <= INT64_MAX

    def letters(self, words) -> tuple[np.ndarray, np.ndarray]:
        """Letter-index matrix (padded with -1) and lengths for tuple words."""
        lengths = np.fromiter((len(w) for w in words), dtype=np.int64, count=len(words))
        width = int(lengths.max()) if len(words) else 0
        mat = np.full((len(words), width + 1), -1, dtype=np.int64)
        for i, w in enumerate(words):
            if w:
                mat[i, : len(w)] = [2 * (abs(t) - 1) + (t < 0) for t in w]
        return mat, lengths

    def prefix_codes(self, mat, lengths) -> np.ndarray:
        """``out[i, m]`` = within-length code of the first ``m`` letters."""
        n, width = mat.shape
        out = np.zeros((n, width), dtype=np.int64)
        b = self.base
        for m in range(1, width):
            if m == 1:
                digit = mat[:, 0]
            else:
                digit = self.rel[mat[:, m - 2], mat[:, m - 1]]
            active = lengths >= m
            out[:, m] = np.where(active, out[:, m - 1] * b + digit, 0)
        return out

    def encode(self, mat, lengths) -> np.ndarray:
        pre = self.prefix_codes(mat, lengths)
        within = pre[np.arange(len(lengths)), lengths]
        return self.offsets[lengths] + within

    def encode_words(self, words) -> np.ndarray:
        mat, lengths = self.letters(words)
        return self.encode(mat, lengths)

    def lengths_of(self, codes) -> np.ndarray:
        return np.searchsorted(self.offsets, codes, side="right") - 1

    def decode(self, codes) -> tuple[np.ndarray, np.ndarray]:
        codes = np.asarray(codes, dtype=np.int64)
        lengths = self.lengths_of(codes)
        within = codes - self.offsets[lengths]
        width = int(lengths.max()) if len(codes) else 0
        digits = np.full((len(codes), width + 1), -1, dtype=np.int64)
        b = self.base
        rows = np.arange(len(codes))
        # peel relative digits from the right; position n-1-t
        for t in range(width):
            pos = lengths - 1 - t
            tail = pos >= 1
            head = pos == 0
            d = np.where(tail, within % b, within)
            sel = tail | head
            digits[rows[sel], pos[sel]] = d[sel]
            within = np.where(tail, within // b, within)
        # relative -> absolute, left to right
        for i in range(1, width):
            active = lengths > i
            prev = digits[:, i - 1]
            rel = digits[:, i]
            absd = rel + (rel >= (prev ^ 1))
            digits[:, i] = np.where(active, absd, -1)
        return digits, lengths

    def decode_words(self, codes) -> list[tuple[int, ...]]:
        digits, lengths = self.decode(codes)
        out = []
        tok = [index_to_token(d) for d in range(2 * self.rank)]
        for row, n in zip(digits.tolist(), lengths.tolist()):
            out.append(tuple(tok[d] for d in row[:n]))
        return out


class _Left:
    def __init__(self, codec: WordCodec, mat, lengths):
        self.lengths = lengths
        self.prefix = codec.prefix_codes(mat, lengths)
        n, width = mat.shape
        # last letter of each prefix, index by prefix length
        self.last = np.zeros((n, width), dtype=np.int64)
        self.last[:, 1:] = np.maximum(mat[:, : width - 1], 0)
        # inverse letters of the word read backwards, padded with -1
        self.revinv = np.full((n, width), -1, dtype=np.int64)
        for i in range(width - 1):
            pos = lengths - 1 - i
            ok = pos >= 0
            vals = mat[np.arange(n), np.maximum(pos, 0)] ^ 1
            self.revinv[:, i] = np.where(ok, vals, -1)


class _Right:
    def __init__(self, codec: WordCodec, mat, lengths):
        n, width = mat.shape
        self.lengths = lengths
        self.letters = np.where(mat >= 0, mat, -2)
        self.first = np.maximum(mat, 0)
        tail = np.zeros((n, width), dtype=np.int64)
        suff = np.zeros((n, width), dtype=np.int64)
        for c in range(width - 2, -1, -1):
            has_next = lengths > c + 1
            e = np.clip(lengths - 2 - c, 0, None)
            rel = codec.rel[np.maximum(mat[:, c], 0), np.maximum(mat[:, c + 1], 0)]
            tail[:, c] = np.where(has_next, tail[:, c + 1] + rel * codec.pow[e], 0)
        for c in range(width - 1):
            here = lengths > c
            e = np.clip(lengths - 1 - c, 0, None)
            suff[:, c] = np.where(here, np.maximum(mat[:, c], 0) * codec.pow[e] + tail[:, c], 0)
        self.tail = tail
        self.suffix = suff


def _chunk(codec, left: _Left, right: _Right, lo: int, hi: int):
    width = min(left.revinv.shape[1], right.letters.shape[1])
    eq = left.revinv[lo:hi, None, :width] == right.letters[None, :, :width]
    # last column is padding on at least one side, so argmin finds a False
    if width:
        c = np.argmin(eq, axis=2)
    else:
        c = np.zeros((hi - lo, len(right.lengths)), dtype=np.int64)
    k = left.lengths[lo:hi, None]
    m = k - c
    l = right.lengths[None, :] - c
    n = m + l
    cols = np.arange(len(right.lengths))[None, :]
    U = np.take_along_axis(left.prefix[lo:hi], m, axis=1)
    last = np.take_along_axis(left.last[lo:hi], m, axis=1)
    first = right.first[cols, c]
    tail = right.tail[cols, c]
    suff = right.suffix[cols, c]
    lm1 = np.maximum(l - 1, 0)
    joined = U * codec.pow[l] + codec.rel[last, first] * codec.pow[lm1] + tail
    within = np.where(l == 0, U, np.where(m == 0, suff, joined))
    codes = codec.offsets[n] + within
    return codes.ravel(), c.ravel()


def pair_products(codec: WordCodec, left_words, right_words, jobs: int = 1):
    """Codes of every product ``left[i] * right[j]`` in row-major order.

    Also returns the cancellation length of each pair.  Chunk boundaries do
    not depend on ``jobs``, so the output is identical for any worker count.
    """
    lmat, llen = left_words
    rmat, rlen = right_words
    left = _Left(codec, lmat, llen)
    right = _Right(codec, rmat, rlen)
    nl, nr = len(llen), len(rlen)
    if nl == 0 or nr == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    rows = max(1, CHUNK_PAIRS // nr)
    bounds = [(lo, min(lo + rows, nl)) for lo in range(0, nl, rows)]
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda b: _chunk(codec, left, right, *b), bounds))
    else:
        parts = [_chunk(codec, left, right, lo, hi) for lo, hi in bounds]
    codes = np.concatenate([p[0] for p in parts])
    cancel = np.concatenate([p[1] for p in parts])
    return codes, cancel
