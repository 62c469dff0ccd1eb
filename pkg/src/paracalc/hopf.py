"""Word coalgebra with deconcatenation coproduct, characters, and the noise comodule.

Everything here is exact symbolic linear algebra over small finite bases.
Words are tuples of 1-based letters; linear objects are dicts keyed by
canonically sorted monomials; homogeneities are kept as `Fraction`s so that
graded identities can be asserted with equality instead of tolerance.

The deconcatenation coproduct splits a word into (suffix, prefix) pairs;
tensors carry the basis-side factor on the left and the algebra-side factor
on the right throughout.  The comodule adds one noise symbol and the tail
symbols (k..n)Xi built on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import NotACharacterError, OutOfStructureError, UsageError

__all__ = [
    "Word",
    "EMPTY_WORD",
    "Alphabet",
    "ComoduleBasis",
    "AlgebraElement",
    "TensorElement",
    "coproduct",
    "counit",
    "comodule_coproduct",
    "expansion",
    "quotient",
    "PointCharacter",
    "counit_character",
    "char_product",
    "char_inverse",
    "partitions",
    "render_word",
    "render_monomial",
    "render_tensor",
]

MAX_WORD_LENGTH = 4


@dataclass(frozen=True, order=True)
class Word:
    """A word over a 1-based integer alphabet; the empty tuple is the unit."""

    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_empty(self) -> bool:
        return not self.letters

    def prefix(self, length: int) -> "Word":
        return Word(self.letters[:length])

    def suffix_from(self, start: int) -> "Word":
        return Word(self.letters[start:])

    def splits(self) -> list[tuple["Word", "Word"]]:
        """All (suffix, prefix) cuts, including the two trivial ones."""
        k = len(self.letters)
        return [(self.suffix_from(c), self.prefix(c)) for c in range(k + 1)]

    def __repr__(self):
        return render_word(self)


EMPTY_WORD = Word(())


@dataclass(frozen=True)
class ComoduleBasis:
    """Noise symbol Xi (start = n + 1) or a tail symbol (start..n)Xi."""

    start: int
    n: int

    def __post_init__(self):
        if not 1 <= self.start <= self.n + 1:
            raise UsageError(f"tail start {self.start} outside 1..{self.n + 1}")

    @classmethod
    def xi(cls, n: int) -> "ComoduleBasis":
        return cls(start=n + 1, n=n)

    @classmethod
    def tail(cls, start: int, n: int) -> "ComoduleBasis":
        return cls(start=start, n=n)

    @property
    def is_xi(self) -> bool:
        return self.start == self.n + 1

    @property
    def word_part(self) -> Word:
        return Word(tuple(range(self.start, self.n + 1)))

    def __repr__(self):
        if self.is_xi:
            return "Xi"
        return f"({''.join(str(i) for i in self.word_part.letters)})Xi"


BasisKey = Union[Word, ComoduleBasis]

Monomial = tuple[Word, ...]  # commutative, canonically sorted, no empty-word factors


def _canonical_monomial(words: Iterable[Word]) -> Monomial:
    return tuple(sorted((w for w in words if not w.is_empty)))


class Alphabet:
    """Finite graded alphabet: letter i has homogeneity alphas[i-1] in (0, 1).

    An optional noise weight (negative) grades the comodule symbols.
    Homogeneities are exact rationals; floats are taken at their decimal
    face value, so 0.3 means 3/10.
    """

    def __init__(self, alphas: Sequence, noise_homogeneity=None):
        fracs = tuple(self._to_fraction(a) for a in alphas)
        for a in fracs:
            if not 0 < a < 1:
                raise OutOfStructureError(f"letter homogeneity {a} outside (0, 1)")
        self.alphas = fracs
        if noise_homogeneity is not None:
            noise_homogeneity = self._to_fraction(noise_homogeneity)
            if noise_homogeneity >= 0:
                raise OutOfStructureError(f"noise homogeneity {noise_homogeneity} must be < 0")
        self.noise = noise_homogeneity

    @staticmethod
    def _to_fraction(x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        return Fraction(str(float(x)))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def check_word(self, word: Word) -> Word:
        for letter in word.letters:
            if not 1 <= letter <= self.n:
                raise OutOfStructureError(f"letter {letter} outside alphabet 1..{self.n}")
        return word

    def homogeneity(self, item: BasisKey) -> Fraction:
        if isinstance(item, ComoduleBasis):
            if self.noise is None:
                raise OutOfStructureError("alphabet has no noise homogeneity")
            return self.noise + self.homogeneity(item.word_part)
        self.check_word(item)
        return sum((self.alphas[i - 1] for i in item.letters), Fraction(0))

    def words(self, max_length: int = MAX_WORD_LENGTH, include_empty: bool = True) -> list[Word]:
        """All words of homogeneity < 1 up to ``max_length``, by length then lex."""
        out = [EMPTY_WORD] if include_empty else []
        for k in range(1, max_length + 1):
            for letters in itertools.product(range(1, self.n + 1), repeat=k):
                w = Word(letters)
                if self.homogeneity(w) < 1:
                    out.append(w)
        return out

    def comodule_basis(self) -> list[ComoduleBasis]:
        """Xi and the tails (k..n)Xi, in decreasing start (increasing length)."""
        if self.noise is None:
            raise OutOfStructureError("alphabet has no noise homogeneity")
        return [ComoduleBasis(start, self.n) for start in range(self.n + 1, 0, -1)]


class AlgebraElement:
    """Finite linear combination of commutative monomials in words."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Monomial, float] | None = None):
        clean: dict[Monomial, float] = {}
        if coeffs:
            for mono, c in coeffs.items():
                if c != 0:
                    clean[mono] = clean.get(mono, 0.0) + c
        self.coeffs = {m: c for m, c in clean.items() if c != 0}

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    @classmethod
    def unit(cls, coefficient: float = 1.0) -> "AlgebraElement":
        return cls({(): float(coefficient)})

    @classmethod
    def from_word(cls, word: Word, coefficient: float = 1.0) -> "AlgebraElement":
        return cls({_canonical_monomial([word]): float(coefficient)})

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0.0) + c
        return AlgebraElement(out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            out: dict[Monomial, float] = {}
            for m1, c1 in self.coeffs.items():
                for m2, c2 in other.coeffs.items():
                    m = _canonical_monomial(m1 + m2)
                    out[m] = out.get(m, 0.0) + c1 * c2
            return AlgebraElement(out)
        return AlgebraElement({m: c * float(other) for m, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for m in sorted(self.coeffs):
            c = self.coeffs[m]
            bits.append(f"{'+' if c >= 0 else '-'}{abs(c):g}*{render_monomial(m)}")
        return " ".join(bits)


class TensorElement:
    """Linear combination of (basis element) x (algebra monomial) pairs."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[BasisKey, Monomial], float] | None = None):
        clean: dict[tuple[BasisKey, Monomial], float] = {}
        if terms:
            for key, c in terms.items():
                if c != 0:
                    clean[key] = clean.get(key, 0.0) + c
        self.terms = {k: c for k, c in clean.items() if c != 0}

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return TensorElement(out)

    def __eq__(self, other):
        return isinstance(other, TensorElement) and self.terms == other.terms

    def right_sum_for(self, left: BasisKey) -> AlgebraElement:
        """Algebra element collecting the right factors attached to ``left``."""
        return AlgebraElement(
            {mono: c for (l, mono), c in self.terms.items() if l == left}
        )

    def __repr__(self):
        return render_tensor(self)


def coproduct(word: Word) -> TensorElement:
    """Deconcatenation: sum over cuts of (suffix) x (prefix)."""
    terms: dict[tuple[BasisKey, Monomial], float] = {}
    for suffix, prefix in word.splits():
        key = (suffix, _canonical_monomial([prefix]))
        terms[key] = terms.get(key, 0.0) + 1.0
    return TensorElement(terms)


def counit(element) -> float:
    """Coefficient of the empty monomial; kills every nonempty word."""
    if isinstance(element, Word):
        return 1.0 if element.is_empty else 0.0
    if isinstance(element, AlgebraElement):
        return element.coeffs.get((), 0.0)
    raise UsageError(f"counit expects Word or AlgebraElement, got {type(element)}")


def comodule_coproduct(basis: ComoduleBasis) -> TensorElement:
    """Splits of a tail symbol: sum of ((l+1)..n)Xi x (start..l)."""
    if basis.is_xi:
        return TensorElement({(basis, ()): 1.0})
    terms: dict[tuple[BasisKey, Monomial], float] = {}
    n = basis.n
    for cut in range(basis.start - 1, n + 1):
        left = ComoduleBasis(cut + 1, n)
        right = Word(tuple(range(basis.start, cut + 1)))
        key = (left, _canonical_monomial([right]))
        terms[key] = terms.get(key, 0.0) + 1.0
    return TensorElement(terms)


def expansion(key: BasisKey) -> TensorElement:
    """Coproduct of a basis element of either structure."""
    if isinstance(key, ComoduleBasis):
        return comodule_coproduct(key)
    if isinstance(key, Word):
        return coproduct(key)
    raise UsageError(f"expected Word or ComoduleBasis, got {type(key)}")


def quotient(tau: BasisKey, sigma: BasisKey) -> AlgebraElement:
    """Right factors of the coproduct of ``tau`` attached to left factor ``sigma``."""
    if isinstance(tau, ComoduleBasis) != isinstance(sigma, ComoduleBasis):
        raise UsageError("quotient needs both elements in the same structure")
    return expansion(tau).right_sum_for(sigma)


class PointCharacter:
    """Real values on words, extended multiplicatively to monomials.

    ``values`` must contain the empty word; a proper character has value 1
    there.  Values on all suffix- and prefix-closures of the words of
    interest are needed for products and inverses.
    """

    __slots__ = ("values",)

    def __init__(self, values: Mapping[Word, float]):
        vals = dict(values)
        if EMPTY_WORD not in vals:
            vals[EMPTY_WORD] = 1.0
        self.values = vals

    def __call__(self, element) -> float:
        if isinstance(element, Word):
            return self.values[element]
        if isinstance(element, tuple):  # monomial
            out = 1.0
            for w in element:
                out *= self.values[w]
            return out
        if isinstance(element, AlgebraElement):
            return sum(c * self(m) for m, c in element.coeffs.items())
        raise UsageError(f"cannot evaluate character on {type(element)}")

    def words(self) -> list[Word]:
        return list(self.values)


def counit_character(words: Iterable[Word]) -> PointCharacter:
    """The identity of the character group: 1 on the empty word, 0 elsewhere."""
    return PointCharacter({w: (1.0 if w.is_empty else 0.0) for w in words})


def char_product(a: PointCharacter, b: PointCharacter) -> PointCharacter:
    """Convolution product: (a * b)(w) = sum over cuts a(suffix) b(prefix)."""
    shared = [w for w in a.values if w in b.values]
    out: dict[Word, float] = {}
    for w in shared:
        total = 0.0
        for suffix, prefix in w.splits():
            total += a.values[suffix] * b.values[prefix]
        out[w] = total
    return PointCharacter(out)


def char_inverse(a: PointCharacter) -> PointCharacter:
    """Group inverse by recursion over word length.

    Solving (a * inv)(w) = 0 for nonempty w gives
    inv(w) = -a(w) - sum over proper cuts a(suffix) inv(prefix),
    which only needs inverse values on strictly shorter prefixes.
    """
    if a.values[EMPTY_WORD] != 1.0:
        raise NotACharacterError(
            f"value at the empty word is {a.values[EMPTY_WORD]!r}, expected 1"
        )
    inv: dict[Word, float] = {EMPTY_WORD: 1.0}
    for w in sorted(a.values, key=len):
        if w.is_empty:
            continue
        total = a.values[w]
        for cut in range(1, len(w)):
            prefix, suffix = w.prefix(cut), w.suffix_from(cut)
            total += a.values[suffix] * inv[prefix]
        inv[w] = -total
    return PointCharacter(inv)


def partitions(word: Word) -> list[tuple[Word, ...]]:
    """All ordered decompositions into consecutive nonempty subwords."""
    k = len(word)
    if k == 0:
        raise UsageError("the empty word has no partitions")
    out = []
    for cuts in itertools.chain.from_iterable(
        itertools.combinations(range(1, k), r) for r in range(k)
    ):
        bounds = (0, *cuts, k)
        out.append(tuple(Word(word.letters[a:b]) for a, b in zip(bounds, bounds[1:])))
    return out


# -- stable text rendering (used by the CLI and golden tests) -----------------


def render_word(word: Word) -> str:
    if word.is_empty:
        return "1"
    return "(" + "".join(str(i) for i in word.letters) + ")"


def render_monomial(mono: Monomial) -> str:
    if not mono:
        return "1"
    return "".join(render_word(w) for w in mono)


def _key_text(key: BasisKey) -> str:
    return repr(key) if isinstance(key, ComoduleBasis) else render_word(key)


def render_tensor(t: TensorElement) -> str:
    if not t.terms:
        return "0"
    def sort_key(item):
        (left, mono), _ = item
        left_txt = _key_text(left)
        return (len(left_txt), left_txt, render_monomial(mono))
    bits = []
    for (left, mono), c in sorted(t.terms.items(), key=sort_key):
        sign = "+" if c >= 0 else "-"
        bits.append(f"{sign}{abs(c):g}·{_key_text(left)}⊗{render_monomial(mono)}")
    return " ".join(bits)


# -- exact structural checks (all return the worst defect found) --------------


def _triple_from_left(word: Word) -> dict[tuple[Word, Word, Word], float]:
    out: dict[tuple[Word, Word, Word], float] = {}
    for (left, mono), c in coproduct(word).terms.items():
        for (l2, m2), c2 in coproduct(left).terms.items():
            key = (l2, m2[0] if m2 else EMPTY_WORD, mono[0] if mono else EMPTY_WORD)
            out[key] = out.get(key, 0.0) + c * c2
    return out


def _triple_from_right(word: Word) -> dict[tuple[Word, Word, Word], float]:
    out: dict[tuple[Word, Word, Word], float] = {}
    for (left, mono), c in coproduct(word).terms.items():
        right = mono[0] if mono else EMPTY_WORD
        for (l2, m2), c2 in coproduct(right).terms.items():
            key = (left, l2, m2[0] if m2 else EMPTY_WORD)
            out[key] = out.get(key, 0.0) + c * c2
    return out


def _dict_defect(d1: dict, d2: dict) -> float:
    keys = set(d1) | set(d2)
    return max((abs(d1.get(k, 0.0) - d2.get(k, 0.0)) for k in keys), default=0.0)


def coassociativity_defect(alphabet: Alphabet, max_length: int = MAX_WORD_LENGTH) -> float:
    return max(
        _dict_defect(_triple_from_left(w), _triple_from_right(w))
        for w in alphabet.words(max_length)
    )


def counit_defect(alphabet: Alphabet, max_length: int = MAX_WORD_LENGTH) -> float:
    """Worst defect of (counit x Id) o coproduct = Id = (Id x counit) o coproduct."""
    worst = 0.0
    for w in alphabet.words(max_length):
        left_collapse: dict[Word, float] = {}
        right_collapse: dict[Word, float] = {}
        for (left, mono), c in coproduct(w).terms.items():
            right = mono[0] if mono else EMPTY_WORD
            left_collapse[right] = left_collapse.get(right, 0.0) + c * counit(left)
            right_collapse[left] = right_collapse.get(left, 0.0) + c * counit(right)
        ident = {w: 1.0}
        worst = max(worst, _dict_defect(left_collapse, ident), _dict_defect(right_collapse, ident))
    return worst


def grading_violations(alphabet: Alphabet, max_length: int = MAX_WORD_LENGTH) -> int:
    """Terms of any coproduct whose factor homogeneities fail to add up exactly."""
    bad = 0
    for w in alphabet.words(max_length):
        target = alphabet.homogeneity(w)
        for (left, mono), _ in coproduct(w).terms.items():
            total = alphabet.homogeneity(left)
            for factor in mono:
                total += alphabet.homogeneity(factor)
            if total != target:
                bad += 1
    return bad


def comodule_law_defect(alphabet: Alphabet) -> float:
    """Worst defect of the two double-expansion routes on the comodule basis."""
    worst = 0.0
    for basis in alphabet.comodule_basis():
        via_left: dict[tuple[ComoduleBasis, Word, Word], float] = {}
        via_right: dict[tuple[ComoduleBasis, Word, Word], float] = {}
        for (left, mono), c in comodule_coproduct(basis).terms.items():
            right = mono[0] if mono else EMPTY_WORD
            for (l2, m2), c2 in comodule_coproduct(left).terms.items():
                key = (l2, m2[0] if m2 else EMPTY_WORD, right)
                via_left[key] = via_left.get(key, 0.0) + c * c2
            for (l2, m2), c2 in coproduct(right).terms.items():
                key = (left, l2, m2[0] if m2 else EMPTY_WORD)
                via_right[key] = via_right.get(key, 0.0) + c * c2
        worst = max(worst, _dict_defect(via_left, via_right))
    return worst


def connectedness_violations(alphabet: Alphabet, max_length: int = MAX_WORD_LENGTH) -> int:
    """Nontrivial coproduct terms must have both factors strictly shorter."""
    bad = 0
    for w in alphabet.words(max_length):
        if w.is_empty:
            continue
        for (left, mono), _ in coproduct(w).terms.items():
            right = mono[0] if mono else EMPTY_WORD
            if (left, right) in ((w, EMPTY_WORD), (EMPTY_WORD, w)):
                continue
            if len(left) >= len(w) or len(right) >= len(w):
                bad += 1
    return bad