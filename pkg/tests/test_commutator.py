import warnings

import numpy as np
import pytest

from paracalc import commutator as cm
from paracalc import models as md
from paracalc import paraproducts as pp
from paracalc import spectral as sp
from paracalc.errors import ConfigurationError, UnsupportedParameterError
from paracalc.hopf import ComoduleBasis


def make_instance(grid, beta, alphas, gamma, seed):
    return cm.CommutatorInstance(
        g=sp.synth_holder(beta, seed, grid),
        beta=beta,
        fs=[sp.synth_holder(a, seed + 10 + i, grid) for i, a in enumerate(alphas)],
        alphas=list(alphas),
        xi=sp.synth_holder(gamma, seed + 99, grid),
        gamma=gamma,
    )


@pytest.fixture(scope="module")
def inst1(grid12):
    return make_instance(grid12, 0.5, [0.3], -0.6, 43)


@pytest.fixture(scope="module")
def inst2(grid12):
    return make_instance(grid12, 0.4, [0.25, 0.2], -0.5, 44)


@pytest.fixture(scope="module")
def inst3(grid12):
    return make_instance(grid12, 0.3, [0.2, 0.15, 0.2], -0.6, 45)


class TestRecursion:
    def test_base_case_is_product_minus_paraproduct(self, grid12):
        inst = cm.CommutatorInstance(
            g=sp.synth_holder(0.5, 1, grid12), beta=0.5, fs=[], alphas=[],
            xi=sp.synth_holder(-0.7, 2, grid12), gamma=-0.7,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = cm.commutator(inst)
        expected = inst.g * inst.xi - pp.para(inst.g, inst.xi)
        assert (out - expected).sup() <= 1e-10 * expected.sup()

    def test_zero_input_gives_zero(self, grid12):
        inst = cm.CommutatorInstance(
            g=sp.GridFunction.zero(grid12), beta=0.5,
            fs=[sp.synth_holder(0.3, 5, grid12)], alphas=[0.3],
            xi=sp.synth_holder(-0.7, 6, grid12), gamma=-0.7,
        )
        assert cm.commutator(inst).sup() == 0.0

    def test_warns_on_violated_exponents(self, grid12):
        inst = cm.CommutatorInstance(
            g=sp.synth_holder(0.5, 1, grid12), beta=0.5,
            fs=[sp.synth_holder(0.6, 2, grid12)], alphas=[0.6],
            xi=sp.synth_holder(-0.3, 3, grid12), gamma=-0.3,
        )
        with pytest.warns(UserWarning, match="exponent"):
            cm.commutator(inst)

    @pytest.mark.parametrize("lam", [3.7, -0.25])
    def test_multilinear_in_first_slot(self, inst1, lam):
        scaled = cm.CommutatorInstance(
            g=inst1.g * lam, beta=inst1.beta, fs=inst1.fs, alphas=inst1.alphas,
            xi=inst1.xi, gamma=inst1.gamma,
        )
        base = cm.commutator(inst1)
        assert (cm.commutator(scaled) - lam * base).sup() <= 1e-12 * abs(lam) * base.sup()

    def test_multilinear_in_noise_slot(self, inst1):
        lam = 2.5
        scaled = cm.CommutatorInstance(
            g=inst1.g, beta=inst1.beta, fs=inst1.fs, alphas=inst1.alphas,
            xi=inst1.xi * lam, gamma=inst1.gamma,
        )
        base = cm.commutator(inst1)
        assert (cm.commutator(scaled) - lam * base).sup() <= 1e-12 * lam * base.sup()


class TestUnrolled:
    def test_n1_matches_by_construction(self, inst1):
        a = cm.commutator(inst1)
        b = cm.commutator_unrolled(inst1)
        assert (a - b).sup() <= 1e-10 * a.sup()

    @pytest.mark.parametrize("fixture", ["inst2", "inst3"])
    def test_longer_chains(self, fixture, request):
        inst = request.getfixturevalue(fixture)
        a = cm.commutator(inst)
        b = cm.commutator_unrolled(inst)
        assert (a - b).sup() <= 1e-8 * a.sup()


class TestModels:
    def test_Z0_noise_value(self, inst2):
        field = cm.canonical_field(inst2)
        pi0 = cm.build_Z0(inst2, field)
        assert np.array_equal(pi0.value(ComoduleBasis.xi(2)).samples, inst2.xi.samples)

    def test_Z0_tail_is_paraproduct(self, inst1):
        field = cm.canonical_field(inst1)
        pi0 = cm.build_Z0(inst1, field)
        expected = pp.para(inst1.fs[0], inst1.xi)
        got = pi0.value(ComoduleBasis.tail(1, 1))
        assert (got - expected).sup() <= 1e-10 * max(expected.sup(), 1.0)

    def test_Z0_brackets_round_trip(self, inst2):
        field = cm.canonical_field(inst2)
        pi0 = cm.build_Z0(inst2, field)
        back = md.extract_comodule_brackets(field, pi0)
        assert (back.value(ComoduleBasis.xi(2)) - inst2.xi).sup() <= 1e-10 * inst2.xi.sup()
        for start in (1, 2):
            assert back.value(ComoduleBasis.tail(start, 2)).sup() <= 1e-10 * inst2.xi.sup()

    def test_Zs_values(self, inst2):
        field = cm.canonical_field(inst2)
        pis = cm.build_Zs(inst2, field)
        assert np.array_equal(pis.value(ComoduleBasis.xi(2)).samples, inst2.xi.samples)
        from paracalc.hopf import Word

        expected = field.value(Word((2,))) * inst2.xi
        assert np.array_equal(pis.value(ComoduleBasis.tail(2, 2)).samples, expected.samples)

    def test_Zs_reconstruction_is_product(self, inst2):
        field = cm.canonical_field(inst2)
        pis = cm.build_Zs(inst2, field)
        expansion = md.tensor_with_noise(md.canonical_md(inst2.g, inst2.beta, field), field)
        rec = md.pointwise_reconstruct(pis, field, expansion)
        expected = pp.iterated_para([inst2.g] + list(inst2.fs)) * inst2.xi
        assert (rec - expected).sup() <= 1e-9 * max(expected.sup(), 1.0)

    def test_Zs_twisted_diagonal_vanishes(self, inst2):
        field = cm.canonical_field(inst2)
        pis = cm.build_Zs(inst2, field)
        scale = inst2.xi.sup()
        for start in (1, 2):
            diag = cm.twisted_diagonal(pis, field, ComoduleBasis.tail(start, 2))
            assert diag.sup() <= 1e-8 * scale

    def test_reconstruction_additive_in_model(self, inst2):
        field = cm.canonical_field(inst2)
        pi0, pis = cm.build_Z0(inst2, field), cm.build_Zs(inst2, field)
        expansion = md.tensor_with_noise(md.canonical_md(inst2.g, inst2.beta, field), field)
        r0 = md.pointwise_reconstruct(pi0, field, expansion)
        rs = md.pointwise_reconstruct(pis, field, expansion)
        rbar = md.pointwise_reconstruct(pis - pi0, field, expansion)
        assert (rbar - (rs - r0)).sup() <= 1e-9 * max(rs.sup(), 1.0)


class TestTwistedDifferenceIdentities:
    @pytest.mark.parametrize("fixture", ["inst1", "inst2", "inst3"])
    def test_pointwise_identities(self, fixture, request, grid12):
        inst = request.getfixturevalue(fixture)
        field = cm.canonical_field(inst)
        points = np.random.default_rng(1).integers(0, grid12.size, size=32)
        residuals = cm.lemma47_check(inst, field, points=points)
        scale = max(cm.commutator(inst).sup(), inst.xi.sup())
        assert residuals["xi"] == 0.0
        for k in range(1, inst.n + 1):
            assert residuals[k] <= 1e-8 * scale

    def test_last_slot_agrees_with_base_case(self, inst2):
        # for the last tail symbol both sides reduce to the two-argument case
        field = cm.canonical_field(inst2)
        pibar = cm.build_Zs(inst2, field) - cm.build_Z0(inst2, field)
        diag = cm.twisted_diagonal(pibar, field, ComoduleBasis.tail(2, 2))
        expected = pp.para_ge(inst2.fs[1], inst2.xi)
        assert (diag - expected).sup() <= 1e-10 * expected.sup()


class TestTilde:
    @pytest.mark.parametrize("fixture", ["inst1", "inst2", "inst3"])
    def test_matches_recursion(self, fixture, request):
        inst = request.getfixturevalue(fixture)
        a = cm.commutator(inst)
        b = cm.tilde_commutator(inst)
        assert (a - b).sup() <= 1e-8 * a.sup()

    def test_requires_exponent_inequalities(self, grid12):
        inst = cm.CommutatorInstance(
            g=sp.synth_holder(0.5, 1, grid12), beta=0.5,
            fs=[sp.synth_holder(0.6, 2, grid12)], alphas=[0.6],
            xi=sp.synth_holder(-0.3, 3, grid12), gamma=-0.3,
        )
        with pytest.raises(ConfigurationError):
            cm.tilde_commutator(inst)

    def test_output_regularity(self, grid12):
        beta, alphas, gamma = 0.55, [0.35], -0.7
        regs = []
        for seed in range(6):
            inst = make_instance(grid12, beta, alphas, gamma, 1000 + 17 * seed)
            regs.append(sp.estimate_regularity(cm.tilde_commutator(inst)).regularity)
        assert np.mean(regs) >= (beta + sum(alphas) + gamma) - 0.1


class TestGipVariant:
    def test_closed_form(self, inst1):
        out = cm.gip_commutator(inst1)
        expected = pp.resonant(pp.para(inst1.g, inst1.fs[0]), inst1.xi) - inst1.g * pp.resonant(
            inst1.fs[0], inst1.xi
        )
        assert np.array_equal(out.samples, expected.samples)

    def test_needs_single_middle_factor(self, inst2):
        with pytest.raises(UnsupportedParameterError):
            cm.commutator(inst2, gip_variant=True)


class TestSmoothing:
    @pytest.mark.parametrize(
        "beta,alphas,gamma",
        [(0.55, (0.35,), -0.7), (0.6, (0.2, 0.15), -0.5), (0.8, (0.1,), -0.85)],
    )
    def test_gain_band(self, grid12, beta, alphas, gamma):
        gamma_class = beta + sum(alphas) + gamma
        regs = []
        for seed in range(6):
            inst = make_instance(grid12, beta, alphas, gamma, 800 + 23 * seed)
            regs.append(sp.estimate_regularity(cm.commutator(inst)).regularity)
        assert gamma_class - 0.12 <= np.mean(regs) <= gamma_class + 0.25

    def test_control_resonant_sits_lower(self, grid12):
        alphas, gamma = [0.35], -0.7
        regs = []
        for seed in range(6):
            f1 = sp.synth_holder(alphas[0], 500 + seed, grid12)
            xi = sp.synth_holder(gamma, 600 + seed, grid12)
            regs.append(sp.estimate_regularity(pp.resonant(f1, xi)).regularity)
        assert np.mean(regs) <= alphas[0] + gamma + 0.15


class TestRefinement:
    def test_differences_shrink(self):
        diffs = np.mean(
            [cm.refinement_differences(0.6, [0.3], -0.35, seed=1000 * s) for s in range(3)],
            axis=0,
        )
        assert diffs[0] > diffs[1]

    def test_level_validation(self):
        with pytest.raises(ConfigurationError):
            cm.refinement_differences(0.6, [0.3], -0.35, seed=0, levels=(12,))
