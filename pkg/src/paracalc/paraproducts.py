"""Low-high frequency calculus: paraproducts, resonants, and their iterates.

The product of two grid functions splits into the part where the first
factor carries strictly lower frequencies (``para``), the part with
comparable frequencies (``resonant``), and the mirror paraproduct.  The
split is exact on the grid: the three pieces sum back to the pointwise
product because they just regroup the double sum over block pairs.

On top of the binary operations sit the left-nested iterated paraproduct,
the blockwise seed-function recursion

    piece_j(w) = lowpass_{j-1}(pieces(w[:-1])) * block_j(f_last)

and the two-point functionals ``omega_*`` that measure graded Holder-type
increments of these objects between grid points.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import OutOfStructureError, UsageError
from .spectral import (
    BlockDecomposition,
    GridFunction,
    PartitionOfUnity,
    decompose,
    default_partition,
)

__all__ = [
    "ParaDecomposition",
    "para",
    "resonant",
    "para_ge",
    "bony_split",
    "iterated_para",
    "IteratedParaTable",
    "omega_prec",
    "SeedFamily",
    "omega_seed",
    "lemma33_check",
]

MAX_WORD_LENGTH = 4


def _shared_partition(f: GridFunction, g: GridFunction, partition) -> PartitionOfUnity:
    if f.grid != g.grid:
        raise UsageError("grid mismatch")
    return default_partition(f.grid) if partition is None else partition


def para(f: GridFunction, g: GridFunction, partition: PartitionOfUnity | None = None) -> GridFunction:
    """Paraproduct of f below g: sum over j of lowpass_{j-1}(f) * block_j(g)."""
    partition = _shared_partition(f, g, partition)
    df = decompose(f, partition)
    dg = decompose(g, partition)
    out = np.einsum("rn,rn->n", df.low_partials(), dg.blocks)
    return GridFunction(f.grid, out)


def resonant(f: GridFunction, g: GridFunction, partition: PartitionOfUnity | None = None) -> GridFunction:
    """Resonant part: sum of block_j(f) * block_k(g) over |j - k| <= 1."""
    partition = _shared_partition(f, g, partition)
    bf = decompose(f, partition).blocks
    bg = decompose(g, partition).blocks
    # Grouped so that swapping f and g permutes only commutative float ops:
    # the result is bitwise symmetric.
    diag = np.einsum("rn,rn->n", bf, bg)
    off = np.einsum("rn,rn->n", bf[:-1], bg[1:]) + np.einsum("rn,rn->n", bf[1:], bg[:-1])
    return GridFunction(f.grid, diag + off)


def para_ge(f: GridFunction, g: GridFunction, partition: PartitionOfUnity | None = None) -> GridFunction:
    """Resonant plus mirror paraproduct; equals f*g - para(f, g) up to rounding."""
    partition = _shared_partition(f, g, partition)
    return resonant(f, g, partition) + para(g, f, partition)


class ParaDecomposition:
    """The three pieces of a product: lt = f below g, res, gt = g below f."""

    __slots__ = ("lt", "res", "gt")

    def __init__(self, lt: GridFunction, res: GridFunction, gt: GridFunction):
        self.lt = lt
        self.res = res
        self.gt = gt

    def total(self) -> GridFunction:
        return self.lt + self.res + self.gt


def bony_split(f: GridFunction, g: GridFunction, partition: PartitionOfUnity | None = None) -> ParaDecomposition:
    partition = _shared_partition(f, g, partition)
    return ParaDecomposition(
        lt=para(f, g, partition),
        res=resonant(f, g, partition),
        gt=para(g, f, partition),
    )


def iterated_para(fs: Sequence[GridFunction], partition: PartitionOfUnity | None = None) -> GridFunction:
    """Left-nested iterated paraproduct ((f1 < f2) < ...) < fn."""
    if len(fs) == 0:
        raise UsageError("iterated_para needs at least one function")
    acc = fs[0]
    for fn in fs[1:]:
        acc = para(acc, fn, partition)
    return acc


class IteratedParaTable:
    """Iterated paraproducts of all contiguous subsequences, memoized.

    ``value(i, m)`` is the left-nested paraproduct of fs[i:m]; the
    associated two-point functional ``omega`` follows the recursion

        omega(i, m) = P(y) - P(x) - sum_l P_prefix(x) * omega(l, m)

    with P = value(i, m) and the sum over proper prefixes fs[i:l].
    """

    def __init__(self, fs: Sequence[GridFunction], partition: PartitionOfUnity | None = None):
        if len(fs) == 0:
            raise UsageError("need at least one function")
        grid = fs[0].grid
        for f in fs[1:]:
            if f.grid != grid:
                raise UsageError("grid mismatch")
        self.fs = list(fs)
        self.partition = default_partition(grid) if partition is None else partition
        self._values: dict[tuple[int, int], GridFunction] = {}

    def __len__(self) -> int:
        return len(self.fs)

    def value(self, start: int, stop: int) -> GridFunction:
        if not (0 <= start < stop <= len(self.fs)):
            raise UsageError(f"bad range ({start}, {stop})")
        key = (start, stop)
        got = self._values.get(key)
        if got is None:
            if stop - start == 1:
                got = self.fs[start]
            else:
                got = para(self.value(start, stop - 1), self.fs[stop - 1], self.partition)
            self._values[key] = got
        return got

    def omega(self, ix: int, iy: int, start: int = 0, stop: int | None = None) -> float:
        if stop is None:
            stop = len(self.fs)
        val = self.value(start, stop)
        out = val(iy) - val(ix)
        for mid in range(start + 1, stop):
            out -= self.value(start, mid)(ix) * self.omega(ix, iy, mid, stop)
        return out


def omega_prec(
    fs: Sequence[GridFunction],
    ix: int,
    iy: int,
    partition: PartitionOfUnity | None = None,
) -> float:
    """Two-point functional of the iterated paraproduct between grid indices.

    For a single function this is f(y) - f(x).  For repeated evaluation over
    many point pairs build an :class:`IteratedParaTable` once and call its
    ``omega`` method.
    """
    return IteratedParaTable(fs, partition).omega(ix, iy)


class SeedFamily:
    """Blockwise products indexed by words over a graded alphabet.

    Letters are 1-based indices into ``functions``; each carries a
    regularity weight in (0, 1).  For a word w the per-level pieces follow

        pieces(i)     = blocks of f_i,
        pieces(w)_j   = lowpass_{j-1}(pieces(w[:-1])) * block_j(f_last),

    and the stored function is the sum of pieces over levels.  Words are
    admissible while their total weight stays below 1 (and the length cap
    keeps the recursion desk-sized).  All caches are populated on first use
    and never mutated afterwards, so a fully warmed family is safe to share
    across workers; warm it from a single thread first (or guard with a
    lock) if populating concurrently.
    """

    def __init__(
        self,
        functions: Sequence[GridFunction],
        alphas: Sequence[float],
        partition: PartitionOfUnity | None = None,
        max_word_length: int = MAX_WORD_LENGTH,
    ):
        if len(functions) == 0:
            raise UsageError("need at least one function")
        if len(functions) != len(alphas):
            raise UsageError("one regularity weight per function required")
        for a in alphas:
            if not 0.0 < a < 1.0:
                raise OutOfStructureError(f"letter regularity must be in (0,1), got {a}")
        grid = functions[0].grid
        for f in functions[1:]:
            if f.grid != grid:
                raise UsageError("grid mismatch")
        self.functions = list(functions)
        self.alphas = [float(a) for a in alphas]
        self.partition = default_partition(grid) if partition is None else partition
        self.max_word_length = max_word_length
        self._pieces: dict[tuple[int, ...], np.ndarray] = {}
        self._values: dict[tuple[int, ...], GridFunction] = {}

    @property
    def grid(self):
        return self.functions[0].grid

    @property
    def n_letters(self) -> int:
        return len(self.functions)

    def homogeneity(self, word: Sequence[int]) -> float:
        return sum(self.alphas[i - 1] for i in word)

    def check_word(self, word: Sequence[int]) -> tuple[int, ...]:
        word = tuple(word)
        if len(word) == 0:
            raise UsageError("the empty word has no seed function")
        for letter in word:
            if not 1 <= letter <= self.n_letters:
                raise UsageError(f"letter {letter} outside alphabet 1..{self.n_letters}")
        if len(word) > self.max_word_length:
            raise OutOfStructureError(f"word {word} longer than cap {self.max_word_length}")
        if self.homogeneity(word) >= 1.0:
            raise OutOfStructureError(
                f"word {word} has homogeneity {self.homogeneity(word):.3f} >= 1"
            )
        return word

    def pieces(self, word: Sequence[int]) -> np.ndarray:
        """Per-level pieces of the seed function, shape (n_blocks, N)."""
        word = self.check_word(word)
        got = self._pieces.get(word)
        if got is not None:
            return got
        if len(word) == 1:
            out = decompose(self.functions[word[0] - 1], self.partition).blocks
        else:
            parent = self.pieces(word[:-1])
            lows = np.zeros_like(parent)
            lows[2:] = np.cumsum(parent, axis=0)[:-2]  # row j+1: sum of levels < j-1
            last = decompose(self.functions[word[-1] - 1], self.partition).blocks
            out = lows * last
        out.setflags(write=False)
        self._pieces[word] = out
        return out

    def seed_function(self, word: Sequence[int]) -> GridFunction:
        """Sum of the per-level pieces; a single letter gives f_i itself."""
        word = self.check_word(word)
        got = self._values.get(word)
        if got is None:
            if len(word) == 1:
                got = self.functions[word[0] - 1]
            else:
                got = GridFunction(self.grid, self.pieces(word).sum(axis=0))
            self._values[word] = got
        return got

    def omega_pieces(self, word: Sequence[int], ix: int, iy: int) -> np.ndarray:
        """Per-level two-point pieces at a fixed pair of grid indices."""
        word = self.check_word(word)
        mine = self.pieces(word)
        out = mine[:, iy] - mine[:, ix]
        for cut in range(1, len(word)):
            prefix_val = self.seed_function(word[:cut])(ix)
            out = out - prefix_val * self.omega_pieces(word[cut:], ix, iy)
        return out

    def c_pieces(self, word: Sequence[int], ix: int) -> np.ndarray:
        """Per-level centered pieces at a fixed grid index."""
        word = self.check_word(word)
        out = self.pieces(word)[:, ix].copy()
        for cut in range(1, len(word)):
            out -= self.seed_function(word[:cut])(ix) * self.c_pieces(word[cut:], ix)
        return out


def omega_seed(family: SeedFamily, word: Sequence[int], ix: int, iy: int) -> float:
    """Two-point functional of a seed family between grid indices.

    Single letters give f(y) - f(x); longer words subtract the prefix-value
    weighted functionals of their proper suffixes.
    """
    word = family.check_word(word)
    fw = family.seed_function(word)
    out = fw(iy) - fw(ix)
    for cut in range(1, len(word)):
        out -= family.seed_function(word[:cut])(ix) * omega_seed(family, word[cut:], ix, iy)
    return out


def lemma33_check(
    family: SeedFamily, word: Sequence[int], j: int, ix: int, iy: int
) -> tuple[float, float]:
    """Residuals of the two blockwise recursions for omega and C pieces.

    Both left-hand sides come from the definitional recursions
    (:meth:`SeedFamily.omega_pieces`, :meth:`SeedFamily.c_pieces`); the
    right-hand sides re-build level j from the parent word's partial sums:

        omega_j(w) = lowpass_{j-1}(omega(w[:-1])) * block_j(f_last)(y)
                     - highpass_{j-1}(C_x(w[:-1])) * omega_j(last letter)
        C_j(w)     = -highpass_{j-1}(C_x(w[:-1])) * block_j(f_last)(x)

    Returns the pair of absolute residuals at block index j.
    """
    word = family.check_word(word)
    if len(word) < 2:
        raise UsageError("the recursions need a word of length >= 2")
    r = j + 1  # row index of block j
    if not 0 <= r < family.partition.n_blocks:
        raise UsageError(f"block index {j} out of range")
    parent, last = word[:-1], word[-1:]
    last_blocks = family.pieces(last)

    omega_parent = family.omega_pieces(parent, ix, iy)
    c_parent = family.c_pieces(parent, ix)
    lt = omega_parent[: max(r - 1, 0)].sum()
    ge = c_parent[max(r - 1, 0) :].sum()

    omega_last_j = last_blocks[r, iy] - last_blocks[r, ix]
    rhs1 = lt * last_blocks[r, iy] - ge * omega_last_j
    lhs1 = family.omega_pieces(word, ix, iy)[r]

    rhs2 = -ge * last_blocks[r, ix]
    lhs2 = family.c_pieces(word, ix)[r]
    return abs(lhs1 - rhs1), abs(lhs2 - rhs2)
