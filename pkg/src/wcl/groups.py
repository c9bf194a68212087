"""Discrete groups: free groups of finite rank, the integers and cyclic groups.

Free-group elements are reduced words stored as tuples of nonzero ints; token
``g > 0`` is generator ``g`` and ``-g`` its inverse.  The empty tuple is the
identity.  Integer and cyclic groups use plain ints (cyclic elements live in
``range(n)``).

Every group here is discrete, so the modular function is identically 1 and
the Haar measure is counting measure.
"""

from __future__ import annotations

from typing import Iterator, Tuple

from .errors import BudgetExceededError, InvalidElementError

Word = Tuple[int, ...]

DEFAULT_SPHERE_CAP = 10**6


class Group:
    kind = "abstract"
    identity = None

    def multiply(self, x, y):
        raise NotImplementedError

    def invert(self, x):
        raise NotImplementedError

    def word_length(self, x) -> int:
        raise NotImplementedError

    def validate(self, x):
        raise NotImplementedError

    def sort_key(self, x):
        raise NotImplementedError

    def sphere_size(self, n: int) -> int:
        raise NotImplementedError

    def iter_sphere(self, n: int):
        raise NotImplementedError

    def random_element(self, rng, max_length: int):
        raise NotImplementedError

    def modular_function(self, x) -> int:
        return 1

    def measure(self, elements) -> int:
        return len(set(elements))

    def format_element(self, x) -> str:
        return str(x)

    def parse_element(self, text: str):
        try:
            x = int(text.strip())
        except ValueError:
            raise InvalidElementError(f"cannot parse element {text!r}") from None
        return self.validate(x)

    def header(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()


class FreeGroup(Group):
    kind = "free"
    identity: Word = ()

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("free group rank must be >= 1")
        self.rank = int(rank)

    def _key(self):
        return (self.rank,)

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    def header(self) -> str:
        return f"group=free rank={self.rank}"

    def validate(self, x) -> Word:
        if not isinstance(x, tuple):
            x = tuple(x)
        prev = 0
        for t in x:
            if not isinstance(t, int) or t == 0 or abs(t) > self.rank:
                raise InvalidElementError(f"token {t!r} invalid for {self!r}")
            if t == -prev:
                raise InvalidElementError(f"word {x!r} is not reduced")
            prev = t
        return x

    def reduce(self, tokens) -> Word:
        """Freely reduce an arbitrary token sequence."""
        out = []
        for t in tokens:
            if t == 0 or abs(t) > self.rank:
                raise InvalidElementError(f"token {t!r} invalid for {self!r}")
            if out and out[-1] == -t:
                out.pop()
            else:
                out.append(t)
        return tuple(out)

    def multiply(self, x: Word, y: Word) -> Word:
        self.validate(x)
        self.validate(y)
        return _mul(x, y)

    def invert(self, x: Word) -> Word:
        return tuple(-t for t in reversed(self.validate(x)))

    def word_length(self, x: Word) -> int:
        return len(x)

    def letter_index(self, t: int) -> int:
        # 1, -1, 2, -2, ... -> 0, 1, 2, 3, ...
        return 2 * (abs(t) - 1) + (t < 0)

    def sort_key(self, x: Word):
        # shortlex in letter_index order; matches the integer ranking used by
        # the vectorised convolution engine
        return (len(x), tuple(2 * (abs(t) - 1) + (t < 0) for t in x))

    def sphere_size(self, n: int) -> int:
        if n < 0:
            return 0
        if n == 0:
            return 1
        return 2 * self.rank * (2 * self.rank - 1) ** (n - 1)

    def iter_sphere(self, n: int) -> Iterator[Word]:
        letters = sorted(
            [t for g in range(1, self.rank + 1) for t in (g, -g)], key=self.letter_index
        )
        if n == 0:
            yield ()
            return
        stack = [(t,) for t in reversed(letters)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                yield w
                continue
            last = w[-1]
            for t in reversed(letters):
                if t != -last:
                    stack.append(w + (t,))

    def random_element(self, rng, max_length: int, length: int | None = None) -> Word:
        """Non-backtracking random walk of uniform length in ``[0, max_length]``."""
        if length is None:
            length = int(rng.integers(0, max_length + 1))
        r2 = 2 * self.rank
        word = []
        for i in range(length):
            if i == 0:
                d = int(rng.integers(0, r2))
            else:
                d = int(rng.integers(0, r2 - 1))
                inv = self.letter_index(-word[-1])
                if d >= inv:
                    d += 1
            word.append((d // 2 + 1) * (-1 if d % 2 else 1))
        return tuple(word)

    def format_element(self, x: Word) -> str:
        return format_word(x)

    def parse_element(self, text: str) -> Word:
        return self.validate(parse_word(text))


class IntGroup(Group):
    kind = "int"
    identity = 0

    def __repr__(self):
        return "IntGroup()"

    def header(self) -> str:
        return "group=int"

    def validate(self, x) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise InvalidElementError(f"{x!r} is not an integer")
        return x

    def multiply(self, x: int, y: int) -> int:
        return self.validate(x) + self.validate(y)

    def invert(self, x: int) -> int:
        return -self.validate(x)

    def word_length(self, x: int) -> int:
        return abs(x)

    def sort_key(self, x: int):
        return x

    def sphere_size(self, n: int) -> int:
        return 0 if n < 0 else (1 if n == 0 else 2)

    def iter_sphere(self, n: int) -> Iterator[int]:
        if n == 0:
            yield 0
        elif n > 0:
            yield -n
            yield n

    def random_element(self, rng, max_length: int, length=None) -> int:
        return int(rng.integers(-max_length, max_length + 1))


class CyclicGroup(Group):
    kind = "cyclic"
    identity = 0

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("cyclic group order must be >= 1")
        self.n = int(n)

    def _key(self):
        return (self.n,)

    def __repr__(self):
        return f"CyclicGroup({self.n})"

    def header(self) -> str:
        return f"group=cyclic n={self.n}"

    def validate(self, x) -> int:
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < self.n:
            raise InvalidElementError(f"{x!r} is not an element of Z_{self.n}")
        return x

    def multiply(self, x: int, y: int) -> int:
        return (self.validate(x) + self.validate(y)) % self.n

    def invert(self, x: int) -> int:
        return (-self.validate(x)) % self.n

    def word_length(self, x: int) -> int:
        x = self.validate(x)
        return min(x, self.n - x)

    def sort_key(self, x: int):
        return x

    def elements(self) -> range:
        return range(self.n)

    def sphere_size(self, n: int) -> int:
        return sum(1 for _ in self.iter_sphere(n))

    def iter_sphere(self, n: int) -> Iterator[int]:
        if n < 0 or n > self.n // 2:
            return
        if n == 0:
            yield 0
            return
        yield n
        if self.n - n != n:
            yield self.n - n

    def random_element(self, rng, max_length=None, length=None) -> int:
        return int(rng.integers(0, self.n))


def _mul(x: Word, y: Word) -> Word:
    # cancel the maximal suffix of x against the prefix of y
    i = len(x)
    j = 0
    ny = len(y)
    while i > 0 and j < ny and x[i - 1] == -y[j]:
        i -= 1
        j += 1
    if j == 0:
        return x + y
    return x[:i] + y[j:]


def cancellation_length(x: Word, y: Word) -> int:
    i, j, ny = len(x), 0, len(y)
    while i > 0 and j < ny and x[i - 1] == -y[j]:
        i -= 1
        j += 1
    return j


def common_prefix_length(alpha: Word, beta: Word) -> int:
    """Number of leading letters shared by two reduced words.

    When one word is a prefix of the other this is the shorter length, so
    ``beta`` always lands in exactly one block ``A_{|beta|, j}(alpha)``.
    """
    j = 0
    for a, b in zip(alpha, beta):
        if a != b:
            break
        j += 1
    return j


def common_suffix_length(alpha: Word, beta: Word) -> int:
    return common_prefix_length(alpha[::-1], beta[::-1])


def split_at(alpha: Word, j: int) -> tuple[Word, Word]:
    if not 0 <= j <= len(alpha):
        raise ValueError(f"split index {j} outside [0, {len(alpha)}]")
    return tuple(alpha[:j]), tuple(alpha[j:])


def enumerate_sphere(group: Group, n: int, cap: int = DEFAULT_SPHERE_CAP):
    """Yield every element of word length exactly ``n`` once."""
    if n < 0:
        raise ValueError("sphere radius must be >= 0")
    count = group.sphere_size(n)
    if count > cap:
        raise BudgetExceededError(f"sphere of radius {n} has {count} elements (cap {cap})")
    return group.iter_sphere(n)


def enumerate_ball(group: Group, radius: int, cap: int = DEFAULT_SPHERE_CAP):
    total = sum(group.sphere_size(n) for n in range(radius + 1))
    if total > cap:
        raise BudgetExceededError(f"ball of radius {radius} has {total} elements (cap {cap})")
    for n in range(radius + 1):
        yield from group.iter_sphere(n)


def format_word(x: Word) -> str:
    return " ".join(str(t) for t in x) if x else "e"


def parse_word(text: str) -> Word:
    text = text.strip()
    if text == "e":
        return ()
    try:
        return tuple(int(t) for t in text.split())
    except ValueError:
        raise InvalidElementError(f"cannot parse word {text!r}") from None


def group_from_header(header: str) -> Group:
    """Inverse of :meth:`Group.header` (leading ``#`` allowed)."""
    fields = dict(
        part.split("=", 1) for part in header.lstrip("#").split() if "=" in part
    )
    kind = fields.get("group")
    if kind == "free":
        return FreeGroup(int(fields["rank"]))
    if kind == "int":
        return IntGroup()
    if kind == "cyclic":
        return CyclicGroup(int(fields["n"]))
    raise ValueError(f"unknown group header {header!r}")
