"""Concrete models over the word structures: character fields, brackets, and
pointwise reconstruction.

A character field samples, at every grid point, one character of the word
algebra; the canonical one stores iterated paraproducts of the input
functions.  Bracket extraction peels a field into paracontrolled remainders
(one per word), brackets can be pushed back into a realization map over the
noise comodule, and band-limited modelled distributions are reconstructed
pointwise by twisting with the inverse character at each base point.  All
the symbolic steps (quotients, inverses) run through :mod:`paracalc.hopf`;
all the analytic steps are plain grid-function algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Mapping, Sequence

import numpy as np

from . import hopf
from .errors import ConfigurationError, OutOfStructureError, UsageError
from .hopf import Alphabet, BasisKey, ComoduleBasis, EMPTY_WORD, PointCharacter, Word
from .paraproducts import IteratedParaTable, SeedFamily, iterated_para, omega_seed, para
from .spectral import (
    GridFunction,
    PartitionOfUnity,
    decompose,
    default_partition,
)

__all__ = [
    "CharacterField",
    "canonical_model",
    "seed_model",
    "g_two_point",
    "g_two_point_symbolic",
    "BracketFamily",
    "extract_brackets",
    "atomic_decomposition",
    "partition_formula_check",
    "ModelPi",
    "brackets_to_model",
    "extract_comodule_brackets",
    "ModelledDistribution",
    "canonical_md",
    "tensor_with_noise",
    "md_two_point_components",
    "dgamma_seminorm",
    "pointwise_reconstruct",
    "paracontrolled_remainder",
    "ModelNormProbe",
    "ProbeReport",
    "probe_model_norms",
]


class CharacterField:
    """Grid-sampled character of the word algebra: word -> grid function.

    The value at the empty word is the constant 1.  The stored word set must
    be closed under taking prefixes and suffixes, which every construction
    here guarantees; the pointwise inverse field is computed lazily by the
    graded recursion and cached.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        values: Mapping[Word, GridFunction],
        partition: PartitionOfUnity | None = None,
    ):
        if not values:
            raise UsageError("character field needs at least one word value")
        some = next(iter(values.values()))
        grid = some.grid
        vals = dict(values)
        vals[EMPTY_WORD] = GridFunction.constant(grid, 1.0)
        for w, gf in vals.items():
            if gf.grid != grid:
                raise UsageError("grid mismatch inside character field")
            if not w.is_empty and alphabet.homogeneity(w) >= 1:
                raise OutOfStructureError(f"word {w} has homogeneity >= 1")
        self.alphabet = alphabet
        self.grid = grid
        self.values = vals
        self.partition = default_partition(grid) if partition is None else partition
        self._inverse: dict[Word, np.ndarray] | None = None

    def words(self) -> list[Word]:
        return sorted(self.values, key=lambda w: (len(w), w.letters))

    def value(self, word: Word) -> GridFunction:
        got = self.values.get(word)
        if got is None:
            raise UsageError(f"word {word} not stored in this field")
        return got

    def letter_function(self, letter: int) -> GridFunction:
        return self.value(Word((letter,)))

    def point_character(self, ix: int) -> PointCharacter:
        return PointCharacter({w: float(gf(ix)) for w, gf in self.values.items()})

    def inverse_values(self) -> dict[Word, np.ndarray]:
        """Pointwise inverse character, one array per word.

        Same recursion as :func:`paracalc.hopf.char_inverse`, vectorized over
        the grid: inv(w) = -g(w) - sum over proper cuts g(suffix) inv(prefix).
        """
        if self._inverse is None:
            inv: dict[Word, np.ndarray] = {EMPTY_WORD: np.ones(self.grid.size)}
            for w in self.words():
                if w.is_empty:
                    continue
                total = self.values[w].samples.copy()
                for cut in range(1, len(w)):
                    prefix, suffix = w.prefix(cut), w.suffix_from(cut)
                    total += self.values[suffix].samples * inv[prefix]
                inv[w] = -total
            self._inverse = inv
        return self._inverse


def canonical_model(
    fs: Sequence[GridFunction],
    alphas: Sequence,
    partition: PartitionOfUnity | None = None,
    words: Sequence[Word] | None = None,
    max_word_length: int = hopf.MAX_WORD_LENGTH,
    noise_homogeneity=None,
) -> CharacterField:
    """Character field whose word values are iterated paraproducts of ``fs``.

    ``words`` restricts the stored set (it must be prefix/suffix closed);
    by default every word of homogeneity < 1 up to the length cap is built.
    """
    alphabet = Alphabet(alphas, noise_homogeneity=noise_homogeneity)
    if len(fs) != alphabet.n:
        raise UsageError("one function per letter required")
    if words is None:
        words = alphabet.words(max_word_length)
    values: dict[Word, GridFunction] = {}
    for w in words:
        if w.is_empty:
            continue
        values[w] = iterated_para([fs[i - 1] for i in w.letters], partition)
    return CharacterField(alphabet, values, partition)


def contiguous_words(n: int) -> list[Word]:
    """The ranges (k..l) for 1 <= k <= l <= n, plus the empty word."""
    out = [EMPTY_WORD]
    for k in range(1, n + 1):
        for l in range(k, n + 1):
            out.append(Word(tuple(range(k, l + 1))))
    return out


def seed_model(family: SeedFamily, max_word_length: int | None = None) -> CharacterField:
    """Character field sampling the seed functions of ``family``."""
    alphabet = Alphabet(family.alphas)
    cap = family.max_word_length if max_word_length is None else max_word_length
    values = {
        w: family.seed_function(w.letters)
        for w in alphabet.words(cap)
        if not w.is_empty
    }
    return CharacterField(alphabet, values, family.partition)


def g_two_point(field: CharacterField, word: Word, ix: int, iy: int) -> float:
    """Two-point character value by the prefix-correction recursion."""
    memo: dict[Word, float] = {}

    def rec(w: Word) -> float:
        if w.is_empty:
            return 1.0 if w not in memo else memo[w]
        got = memo.get(w)
        if got is None:
            gf = field.value(w)
            got = gf(iy) - gf(ix)
            for cut in range(1, len(w)):
                got -= field.value(w.prefix(cut))(ix) * rec(w.suffix_from(cut))
            memo[w] = got
        return got

    return rec(word)


def g_two_point_symbolic(field: CharacterField, word: Word, ix: int, iy: int) -> float:
    """Same value through the character group: (g_y * g_x^{-1}) at ``word``."""
    gy = field.point_character(iy)
    gx_inv = hopf.char_inverse(field.point_character(ix))
    return hopf.char_product(gy, gx_inv)(word)


class BracketFamily:
    """Paracontrolled remainders keyed by words or comodule symbols."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._data: dict[BasisKey, GridFunction] = {}

    def set(self, key: BasisKey, value: GridFunction):
        self._data[key] = value

    def value(self, key: BasisKey) -> GridFunction:
        got = self._data.get(key)
        if got is None:
            raise UsageError(f"no bracket stored for {key}")
        return got

    def __contains__(self, key: BasisKey) -> bool:
        return key in self._data

    def keys(self):
        return self._data.keys()

    def homogeneity(self, key: BasisKey):
        return self.alphabet.homogeneity(key)


def extract_brackets(field: CharacterField) -> BracketFamily:
    """Peel a character field into brackets, shortest words first.

    bracket(w) = g(w) - sum over proper cuts  g(prefix) < bracket(suffix);
    single letters give back the letter functions unchanged.
    """
    out = BracketFamily(field.alphabet)
    for w in field.words():
        if w.is_empty:
            continue
        total = field.value(w)
        for cut in range(1, len(w)):
            prefix, suffix = w.prefix(cut), w.suffix_from(cut)
            total = total - para(field.value(prefix), out.value(suffix), field.partition)
        out.set(w, total)
    return out


def atomic_decomposition(
    family: SeedFamily, brackets: BracketFamily, word: Word
) -> GridFunction:
    """Partition sum of iterated paraproducts of brackets for ``word``."""
    total = None
    for part in hopf.partitions(word):
        term = iterated_para([brackets.value(piece) for piece in part], family.partition)
        total = term if total is None else total + term
    return total


def partition_formula_check(
    family: SeedFamily, brackets: BracketFamily, word: Word, ix: int, iy: int
) -> float:
    """|seed two-point value - partition sum of paraproduct two-point values|."""
    lhs = omega_seed(family, word.letters, ix, iy)
    rhs = 0.0
    for part in hopf.partitions(word):
        table = IteratedParaTable(
            [brackets.value(piece) for piece in part], family.partition
        )
        rhs += table.omega(ix, iy)
    return abs(lhs - rhs)


class ModelPi:
    """Realization map on the noise comodule: basis symbol -> grid function."""

    def __init__(self, alphabet: Alphabet, values: Mapping[ComoduleBasis, GridFunction]):
        self.alphabet = alphabet
        self.values = dict(values)

    def value(self, basis: ComoduleBasis) -> GridFunction:
        got = self.values.get(basis)
        if got is None:
            raise UsageError(f"no realization stored for {basis}")
        return got

    def __sub__(self, other: "ModelPi") -> "ModelPi":
        return ModelPi(
            self.alphabet,
            {k: self.values[k] - other.values[k] for k in self.values},
        )


def brackets_to_model(field: CharacterField, brackets: BracketFamily) -> ModelPi:
    """Assemble the realization map from comodule brackets.

    realization(tau) = sum over proper left factors sigma of
    g(tau/sigma) < bracket(sigma), plus bracket(tau).  Only negative
    homogeneity symbols are admissible.
    """
    alphabet = field.alphabet
    values: dict[ComoduleBasis, GridFunction] = {}
    for basis in alphabet.comodule_basis():
        if basis not in brackets:
            raise UsageError(f"missing bracket for {basis}")
        if alphabet.homogeneity(basis) >= 0:
            raise OutOfStructureError(
                f"{basis} has nonnegative homogeneity; realization undefined here"
            )
        total = brackets.value(basis)
        for (sigma, mono), _ in hopf.comodule_coproduct(basis).terms.items():
            if sigma == basis:
                continue
            quotient_word = mono[0] if mono else EMPTY_WORD
            total = total + para(
                field.value(quotient_word), brackets.value(sigma), field.partition
            )
        values[basis] = total
    return ModelPi(alphabet, values)


def extract_comodule_brackets(field: CharacterField, pi: ModelPi) -> BracketFamily:
    """Inverse of :func:`brackets_to_model`, shortest symbols first."""
    out = BracketFamily(field.alphabet)
    for basis in field.alphabet.comodule_basis():
        total = pi.value(basis)
        for (sigma, mono), _ in hopf.comodule_coproduct(basis).terms.items():
            if sigma == basis:
                continue
            quotient_word = mono[0] if mono else EMPTY_WORD
            total = total - para(
                field.value(quotient_word), out.value(sigma), field.partition
            )
        out.set(basis, total)
    return out


class ModelledDistribution:
    """Local expansion: basis element -> coefficient function, with a class exponent.

    Coefficients may only sit on basis elements of homogeneity below the
    declared class.
    """

    def __init__(self, gamma: float, coeffs: Mapping[BasisKey, GridFunction], alphabet: Alphabet):
        for key in coeffs:
            if float(alphabet.homogeneity(key)) >= gamma:
                raise ConfigurationError(
                    f"coefficient at {key} with homogeneity >= class {gamma}"
                )
        self.gamma = float(gamma)
        self.coeffs = dict(coeffs)
        self.alphabet = alphabet

    def keys(self):
        return self.coeffs.keys()

    def coefficient(self, key: BasisKey) -> GridFunction:
        return self.coeffs[key]


def canonical_md(g: GridFunction, beta: float, field: CharacterField) -> ModelledDistribution:
    """Expansion of ``g`` along the full word (1..n) of the field's alphabet.

    The coefficient at the suffix word ((k+1)..n) is the iterated
    paraproduct of (g, f_1, ..., f_k); the class is beta plus the total
    letter homogeneity, and beta + total < 1 is required.
    """
    alphabet = field.alphabet
    n = alphabet.n
    if not 0.0 < beta < 1.0:
        raise ConfigurationError(f"beta must be in (0,1), got {beta}")
    total_alpha = float(sum(float(a) for a in alphabet.alphas))
    gamma = beta + total_alpha
    if gamma >= 1.0:
        raise ConfigurationError(f"class beta + sum(alpha) = {gamma} must be < 1")
    table = IteratedParaTable(
        [g] + [field.letter_function(i) for i in range(1, n + 1)], field.partition
    )
    coeffs: dict[BasisKey, GridFunction] = {}
    for k in range(0, n + 1):
        suffix = Word(tuple(range(k + 1, n + 1)))
        coeffs[suffix] = table.value(0, k + 1)
    return ModelledDistribution(gamma, coeffs, alphabet)


def tensor_with_noise(md: ModelledDistribution, field: CharacterField) -> ModelledDistribution:
    """Attach the noise symbol: word coefficients become tail coefficients."""
    alphabet = field.alphabet
    if alphabet.noise is None:
        raise ConfigurationError("field alphabet has no noise homogeneity")
    n = alphabet.n
    coeffs: dict[BasisKey, GridFunction] = {}
    for key, value in md.coeffs.items():
        if not isinstance(key, Word):
            raise UsageError("expected word-keyed expansion")
        start = key.letters[0] if key.letters else n + 1
        if key.letters != tuple(range(start, n + 1)):
            raise UsageError(f"{key} is not a suffix of the full word")
        coeffs[ComoduleBasis(start, n)] = value
    return ModelledDistribution(md.gamma + float(alphabet.noise), coeffs, alphabet)


def md_two_point_components(
    md: ModelledDistribution, field: CharacterField, ix: int, iy: int
) -> dict[BasisKey, float]:
    """Components of  expansion(y) - twisted expansion(x)  per basis element.

    The twist re-expands each basis element through its coproduct and
    weights the quotients with two-point character values.
    """
    g_memo: dict[Word, float] = {}

    def g_yx(word: Word) -> float:
        got = g_memo.get(word)
        if got is None:
            got = g_two_point(field, word, ix, iy)
            g_memo[word] = got
        return got

    out: dict[BasisKey, float] = {key: gf(iy) for key, gf in md.coeffs.items()}
    for tau, f_tau in md.coeffs.items():
        fx = f_tau(ix)
        for (sigma, mono), _ in hopf.expansion(tau).terms.items():
            quotient_word = mono[0] if mono else EMPTY_WORD
            if sigma not in out:
                out[sigma] = 0.0
            out[sigma] -= fx * g_yx(quotient_word)
    return out


def dgamma_seminorm(
    md: ModelledDistribution,
    field: CharacterField,
    pairs: Sequence[tuple[int, int]],
) -> float:
    """Empirical class seminorm over sample pairs of grid indices.

    Maximum over pairs and components of |component| / separation^(gamma - h),
    h the component's homogeneity.  A lower bound of the true seminorm.
    """
    worst = 0.0
    for ix, iy in pairs:
        dist = field.grid.separation(ix, iy)
        comps = md_two_point_components(md, field, ix, iy)
        if dist == 0.0:
            continue
        for key, value in comps.items():
            h = float(field.alphabet.homogeneity(key))
            worst = max(worst, abs(value) / dist ** (md.gamma - h))
    return worst


def pointwise_reconstruct(
    pi: ModelPi, field: CharacterField, md: ModelledDistribution
) -> GridFunction:
    """Reconstruction of a band-limited expansion, evaluated on the diagonal.

    At each grid point the expansion is twisted by the inverse character
    there and realized through ``pi``; the output collects the diagonal
    values.  Everything is vectorized: per (coefficient, split) the
    contribution is coeff * realization * inverse-character, pointwise.
    """
    inverse = field.inverse_values()
    total = np.zeros(field.grid.size)
    for tau, f_tau in md.coeffs.items():
        if not isinstance(tau, ComoduleBasis):
            raise UsageError("pointwise reconstruction expects a noise-tensored expansion")
        for (sigma, mono), _ in hopf.comodule_coproduct(tau).terms.items():
            quotient_word = mono[0] if mono else EMPTY_WORD
            total += f_tau.samples * pi.value(sigma).samples * inverse[quotient_word]
    return GridFunction(field.grid, total)


def paracontrolled_remainder(
    reconstruction: GridFunction,
    md: ModelledDistribution,
    brackets: BracketFamily,
    partition: PartitionOfUnity | None = None,
) -> GridFunction:
    """Remainder after subtracting the paraproduct expansion from a reconstruction."""
    out = reconstruction
    for tau, f_tau in md.coeffs.items():
        out = out - para(f_tau, brackets.value(tau), partition)
    return out


@dataclass(frozen=True)
class ModelNormProbe:
    """Sampling plan for the empirical model norms.

    The bump is (1 - u^2)^(smoothness_order + 1) on |u| <= 1, rescaled so
    that its derivatives up to the smoothness order stay below 1 in sup
    norm.  Scales are dyadic, 2^(-m) for m in ``scale_exponents``.
    """

    smoothness_order: int = 3
    scale_exponents: tuple[int, ...] = (2, 3, 4, 5, 6, 7)
    n_base_points: int = 32
    seed: int = 0

    def bump(self) -> np.polynomial.Polynomial:
        r = self.smoothness_order
        poly = np.polynomial.Polynomial([1.0, 0.0, -1.0]) ** (r + 1)
        u = np.linspace(-1.0, 1.0, 1 << 15)
        worst = 0.0
        p = poly
        for _ in range(r + 1):
            worst = max(worst, float(np.max(np.abs(p(u)))))
            p = p.deriv()
        # small headroom: the sampled sup slightly undershoots the true one
        return poly / (worst * (1.0 + 1e-7))


@dataclass(frozen=True)
class ProbeReport:
    """Per-key empirical ratios: max over samples, and flatness across scales."""

    g_rows: dict
    pi_rows: dict

    def worst_flatness(self) -> float:
        rows = list(self.g_rows.values()) + list(self.pi_rows.values())
        return max((abs(r["slope"]) for r in rows if r["slope"] is not None), default=0.0)


def probe_model_norms(
    field: CharacterField, pi: ModelPi | None, probe: ModelNormProbe
) -> ProbeReport:
    """Empirical two-point and localized-pairing ratios of a model.

    For each word: max over base points of |g_yx(w)| / |y-x|^h at every
    dyadic separation.  For each comodule symbol: the bump pairing
    lambda^(-h) <realization twisted at x, bump at scale lambda> over base
    points and scales.  Each row reports the per-scale maxima, the overall
    maximum, and the slope of log2(max) against the scale exponent (flat
    means the declared homogeneity is honest).
    """
    grid = field.grid
    n = grid.size
    for m in probe.scale_exponents:
        if not 2 <= m <= grid.log2_size - 3:
            raise ConfigurationError(
                f"scale exponent {m} outside [2, {grid.log2_size - 3}]"
            )
    rng = np.random.default_rng(probe.seed)
    base = rng.integers(0, n, size=probe.n_base_points)
    ms = np.asarray(probe.scale_exponents)

    def flat_slope(per_scale: list[float]) -> float | None:
        vals = np.asarray(per_scale)
        if np.any(vals <= 0.0):
            return None
        return float(np.polyfit(ms, np.log2(vals), 1)[0])

    g_rows = {}
    for w in field.words():
        if w.is_empty:
            continue
        h = float(field.alphabet.homogeneity(w))
        per_scale = []
        for m in probe.scale_exponents:
            step = n >> m
            dist = step / n
            vals = [
                abs(g_two_point(field, w, int(x), int((x + step) % n))) / dist**h
                for x in base
            ]
            per_scale.append(max(vals))
        g_rows[w] = {
            "per_scale": per_scale,
            "max": max(per_scale),
            "slope": flat_slope(per_scale),
        }

    pi_rows = {}
    if pi is not None:
        inverse = field.inverse_values()
        bump = probe.bump()
        points = grid.points()
        for tau in pi.values:
            h = float(field.alphabet.homogeneity(tau))
            splits = [
                (sigma, mono[0] if mono else EMPTY_WORD)
                for (sigma, mono), _ in hopf.comodule_coproduct(tau).terms.items()
            ]
            per_scale = []
            for m in probe.scale_exponents:
                lam = 2.0 ** (-m)
                best = 0.0
                for ix in base:
                    ix = int(ix)
                    centered = np.zeros(n)
                    for sigma, q in splits:
                        centered += pi.value(sigma).samples * inverse[q][ix]
                    u = points - points[ix]
                    u -= np.round(u)  # periodic wrap to [-1/2, 1/2)
                    window = np.abs(u) <= lam
                    pairing = np.sum(
                        centered[window] * bump(u[window] / lam)
                    ) / (n * lam)
                    best = max(best, lam ** (-h) * abs(pairing))
                per_scale.append(best)
            pi_rows[tau] = {
                "per_scale": per_scale,
                "max": max(per_scale),
                "slope": flat_slope(per_scale),
            }
    return ProbeReport(g_rows=g_rows, pi_rows=pi_rows)
