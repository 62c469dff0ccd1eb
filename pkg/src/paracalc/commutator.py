"""Multicomponent commutator: recursion, unrolled form, and the paracontrolled route.

The base operation sends (g, xi) to the non-paraproduct part of their
product.  Adding middle factors recursively,

    C(g, f1, ..., fn, xi) = C(g < f1, f2, ..., fn, xi) - g * C(f1, ..., fn, xi),

produces an operator that gains regularity: its output lives at the sum of
all the input exponents, while the naive resonant of two of the factors
would sit strictly lower.  The same object falls out of the comodule
machinery: reconstruct the canonical noise-tensored expansion under the
realization map with zero tail brackets, subtract the paraproduct part, and
the remainder is the commutator again.  Both routes are implemented and
must agree to rounding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dataclass_field
from typing import Sequence

import numpy as np

from . import models
from .errors import ConfigurationError, UnsupportedParameterError, UsageError
from .hopf import ComoduleBasis, Word
from .models import (
    BracketFamily,
    CharacterField,
    ModelPi,
    brackets_to_model,
    canonical_md,
    canonical_model,
    contiguous_words,
    paracontrolled_remainder,
    pointwise_reconstruct,
    tensor_with_noise,
)
from .paraproducts import IteratedParaTable, para, para_ge, resonant
from .spectral import (
    GridFunction,
    PartitionOfUnity,
    decompose,
    default_partition,
    synth_holder,
    Grid,
)

__all__ = [
    "CommutatorInstance",
    "commutator",
    "commutator_unrolled",
    "gip_commutator",
    "canonical_field",
    "build_Z0",
    "build_Zs",
    "lemma47_check",
    "tilde_commutator",
    "refinement_differences",
]


@dataclass
class CommutatorInstance:
    """Inputs of one commutator evaluation with their declared exponents."""

    g: GridFunction
    beta: float
    fs: Sequence[GridFunction]
    alphas: Sequence[float]
    xi: GridFunction
    gamma: float
    partition: PartitionOfUnity | None = None

    def __post_init__(self):
        if len(self.fs) != len(self.alphas):
            raise UsageError("one exponent per middle factor required")
        grid = self.g.grid
        for f in list(self.fs) + [self.xi]:
            if f.grid != grid:
                raise UsageError("grid mismatch")
        if self.partition is None:
            self.partition = default_partition(grid)

    @property
    def n(self) -> int:
        return len(self.fs)

    @property
    def sum_alpha(self) -> float:
        return float(sum(self.alphas))

    @property
    def gamma_class(self) -> float:
        return self.beta + self.sum_alpha + self.gamma

    def invariant_violations(self) -> list[str]:
        """The exponent inequalities under which the extension is meaningful."""
        out = []
        if not self.beta + self.sum_alpha < 1:
            out.append(f"beta + sum(alpha) = {self.beta + self.sum_alpha} >= 1")
        if not self.sum_alpha + self.gamma < 0:
            out.append(f"sum(alpha) + gamma = {self.sum_alpha + self.gamma} >= 0")
        if not self.gamma_class > 0:
            out.append(f"beta + sum(alpha) + gamma = {self.gamma_class} <= 0")
        return out


def _commutator_rec(
    g: GridFunction,
    fs: Sequence[GridFunction],
    xi: GridFunction,
    partition: PartitionOfUnity,
) -> GridFunction:
    if not fs:
        return para_ge(g, xi, partition)
    head, rest = fs[0], fs[1:]
    return _commutator_rec(para(g, head, partition), rest, xi, partition) - g * _commutator_rec(
        head, rest, xi, partition
    )


def commutator(inst: CommutatorInstance, gip_variant: bool = False) -> GridFunction:
    """Evaluate the commutator recursion literally.

    The recursion is defined for any smooth inputs; exponent-inequality
    violations are reported as a warning, not an error.  ``gip_variant``
    switches to the resonant-only commutator (f < g) o h - f (g o h) as a
    cross-reference, available for a single middle factor.
    """
    bad = inst.invariant_violations()
    if bad:
        warnings.warn("exponent inequalities violated: " + "; ".join(bad), stacklevel=2)
    if gip_variant:
        if inst.n != 1:
            raise UnsupportedParameterError("the resonant-only variant needs exactly one middle factor")
        return resonant(para(inst.g, inst.fs[0], inst.partition), inst.xi, inst.partition) - inst.g * resonant(
            inst.fs[0], inst.xi, inst.partition
        )
    return _commutator_rec(inst.g, list(inst.fs), inst.xi, inst.partition)


def commutator_unrolled(inst: CommutatorInstance) -> GridFunction:
    """Closed form: one outer commutator of the full paraproduct minus corrections.

        C((g, f1, ..., fn)^<, xi) - sum_k (g, f1, ..., fk)^< * C(f_{k+1}, ..., fn, xi)

    Must agree with :func:`commutator` up to rounding.
    """
    table = IteratedParaTable([inst.g] + list(inst.fs), inst.partition)
    n = inst.n
    out = para_ge(table.value(0, n + 1), inst.xi, inst.partition)
    for k in range(n):
        inner = _commutator_rec(inst.fs[k], list(inst.fs[k + 1 :]), inst.xi, inst.partition)
        out = out - table.value(0, k + 1) * inner
    return out


def gip_commutator(inst: CommutatorInstance) -> GridFunction:
    """Resonant-only commutator for one middle factor (cross-reference form)."""
    return commutator(inst, gip_variant=True)


def canonical_field(inst: CommutatorInstance) -> CharacterField:
    """Canonical character field of the middle factors, on contiguous ranges."""
    return canonical_model(
        list(inst.fs),
        list(inst.alphas),
        partition=inst.partition,
        words=contiguous_words(inst.n),
        noise_homogeneity=inst.gamma,
    )


def _zero_tail_brackets(inst: CommutatorInstance, field: CharacterField) -> BracketFamily:
    brackets = BracketFamily(field.alphabet)
    brackets.set(ComoduleBasis.xi(inst.n), inst.xi)
    zero = GridFunction.zero(inst.g.grid)
    for k in range(1, inst.n + 1):
        brackets.set(ComoduleBasis.tail(k, inst.n), zero)
    return brackets


def build_Z0(inst: CommutatorInstance, field: CharacterField | None = None) -> ModelPi:
    """Realization with noise bracket xi and zero tail brackets."""
    if field is None:
        field = canonical_field(inst)
    return brackets_to_model(field, _zero_tail_brackets(inst, field))


def build_Zs(inst: CommutatorInstance, field: CharacterField | None = None) -> ModelPi:
    """Smooth realization: tail symbols go to true products with the noise."""
    if field is None:
        field = canonical_field(inst)
    n = inst.n
    values = {ComoduleBasis.xi(n): inst.xi}
    for k in range(1, n + 1):
        values[ComoduleBasis.tail(k, n)] = field.value(Word(tuple(range(k, n + 1)))) * inst.xi
    return ModelPi(field.alphabet, values)


def twisted_diagonal(pi: ModelPi, field: CharacterField, tau: ComoduleBasis) -> GridFunction:
    """x -> (realization twisted at x, applied to tau)(x), over the whole grid."""
    from . import hopf as _hopf

    inverse = field.inverse_values()
    total = np.zeros(field.grid.size)
    for (sigma, mono), _ in _hopf.comodule_coproduct(tau).terms.items():
        quotient_word = mono[0] if mono else _hopf.EMPTY_WORD
        total += pi.value(sigma).samples * inverse[quotient_word]
    return GridFunction(field.grid, total)


def lemma47_check(
    inst: CommutatorInstance, field: CharacterField | None = None, points: Sequence[int] = (0,)
) -> dict:
    """Pointwise identities of the twisted difference model.

    For Zbar = Zs - Z0: the twisted diagonal of the noise symbol vanishes,
    and at each tail symbol it reproduces the commutator of the remaining
    factors with the noise.  Returns max residuals per tail start, plus the
    noise-component residual, over the given grid indices.
    """
    if field is None:
        field = canonical_field(inst)
    n = inst.n
    pibar = build_Zs(inst, field) - build_Z0(inst, field)
    out: dict = {}
    xi_diag = twisted_diagonal(pibar, field, ComoduleBasis.xi(n))
    out["xi"] = max(abs(xi_diag(int(ix))) for ix in points)
    for k in range(1, n + 1):
        diag = twisted_diagonal(pibar, field, ComoduleBasis.tail(k, n))
        ck = _commutator_rec(inst.fs[k - 1], list(inst.fs[k:]), inst.xi, inst.partition)
        out[k] = max(abs(diag(int(ix)) - ck(int(ix))) for ix in points)
    return out


def tilde_commutator(inst: CommutatorInstance, field: CharacterField | None = None) -> GridFunction:
    """Commutator through the paracontrolled route.

    Builds the zero-tail realization, reconstructs the canonical
    noise-tensored expansion of g pointwise, and subtracts its paraproduct
    part.  Requires the exponent inequalities; at a fixed grid size the
    result coincides with the recursion up to rounding.
    """
    bad = inst.invariant_violations()
    if bad:
        raise ConfigurationError("exponent inequalities violated: " + "; ".join(bad))
    if field is None:
        field = canonical_field(inst)
    brackets = _zero_tail_brackets(inst, field)
    pi0 = brackets_to_model(field, brackets)
    expansion = tensor_with_noise(canonical_md(inst.g, inst.beta, field), field)
    reconstruction = pointwise_reconstruct(pi0, field, expansion)
    return paracontrolled_remainder(reconstruction, expansion, brackets, field.partition)


def refinement_differences(
    beta: float,
    alphas: Sequence[float],
    gamma: float,
    seed: int,
    levels: Sequence[int] = (10, 12, 14),
    block_cut: int = 8,
    base_cutoff: int = 2,
) -> list[float]:
    """Sup distance of low-block commutator content between consecutive grid sizes.

    The synthetic inputs extend consistently across grid sizes (each dyadic
    level depends only on the seed and the level index), so refining adds
    high-frequency input content.  For each consecutive pair of sizes the
    commutator outputs are cut to blocks <= ``block_cut`` and compared on
    the coarser grid; a healthy extension makes the differences shrink.
    """
    if sorted(levels) != list(levels) or len(levels) < 2:
        raise ConfigurationError("levels must be increasing, at least two")
    cut_outputs = []
    for L in levels:
        grid = Grid(L)
        partition = default_partition(grid, base_cutoff)
        g = synth_holder(beta, seed, grid, partition=partition)
        fs = [
            synth_holder(a, seed + 1 + i, grid, partition=partition)
            for i, a in enumerate(alphas)
        ]
        xi = synth_holder(gamma, seed + 101, grid, partition=partition)
        inst = CommutatorInstance(
            g=g, beta=beta, fs=fs, alphas=list(alphas), xi=xi, gamma=gamma, partition=partition
        )
        out = commutator(inst)
        dec = decompose(out, partition)
        rows = dec.blocks[: min(block_cut, dec.top_index) + 2]
        cut_outputs.append((L, rows.sum(axis=0)))
    diffs = []
    for (L1, a), (L2, b) in zip(cut_outputs, cut_outputs[1:]):
        stride = 1 << (L2 - L1)
        diffs.append(float(np.max(np.abs(b[::stride] - a))))
    return diffs
