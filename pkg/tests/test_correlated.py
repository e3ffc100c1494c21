import itertools
import math
import random
from fractions import Fraction

import pytest

from cspcover import (
    CorrelatedSpace,
    Edge,
    LabelCoverInstance,
    MarkovOperator,
    PreconditionError,
    ProductDomain,
    T2Params,
    TabulatedFunction,
    blocks_left_domain,
    blocks_right_domain,
    commute_check,
    correlation_rho,
    efron_stein,
    invariance_gap,
    is_connected,
    lin,
    markov_apply,
    markov_apply_blocks,
    pairwise_product_check,
    product_space,
    t1_connect_atoms,
    t2_block_space,
)

import oracles


def bit_space(a, b, c, d):
    """2x2 joint table over single-bit atoms with the given masses."""
    total = a + b + c + d
    mu = {}
    for (x, y), w in zip(
        itertools.product((0, 1), repeat=2), (a, b, c, d)
    ):
        if w:
            mu[((x,), (y,))] = Fraction(w, total)
    return CorrelatedSpace(mu)


IDENTICAL_BITS = bit_space(1, 0, 0, 1)
UNIFORM_PRODUCT = bit_space(1, 1, 1, 1)


def tiny_one_to_one_source():
    return LabelCoverInstance(1, 1, 1, 1, [Edge(0, 0, (0,))], unique=True)


def t2_params(eps):
    half = Fraction(1, 2)
    return T2Params(
        lin(4),
        {(0, 0): half, (1, 1): half},
        {(0, 1): half, (1, 0): half},
        eps,
        tiny_one_to_one_source(),
    )


def random_block(rng):
    """A positive 2x2 correlated bit space with random integer masses."""
    return bit_space(*(rng.randrange(1, 7) for _ in range(4)))


def random_right_function(rng, blocks):
    dom = blocks_right_domain(blocks)
    return TabulatedFunction(
        dom,
        [Fraction(rng.randrange(-6, 7), rng.randrange(1, 4)) for _ in range(dom.size)],
    )


class TestCorrelatedSpace:
    def test_rejects_unnormalized_measure(self):
        with pytest.raises(PreconditionError):
            CorrelatedSpace({(((0,)), ((0,))): Fraction(1, 2)})

    def test_rejects_negative_mass(self):
        with pytest.raises(PreconditionError):
            CorrelatedSpace(
                {((0,), (0,)): Fraction(3, 2), ((1,), (1,)): Fraction(-1, 2)}
            )

    def test_rejects_mixed_shapes(self):
        with pytest.raises(PreconditionError):
            CorrelatedSpace(
                {((0,), (0,)): Fraction(1, 2), ((0, 1), (0,)): Fraction(1, 2)}
            )

    def test_marginals_are_consistent(self):
        sp = bit_space(1, 2, 3, 4)
        for a in sp.left_atoms:
            assert sp.marginal_left[a] == sum(
                w for (la, _ra), w in sp.mu.items() if la == a
            )
        for a in sp.right_atoms:
            assert sp.marginal_right[a] == sum(
                w for (_la, ra), w in sp.mu.items() if ra == a
            )
        assert sum(sp.marginal_left.values()) == 1

    def test_min_atom_and_support(self):
        sp = bit_space(1, 2, 3, 4)
        assert sp.min_atom() == Fraction(1, 10)
        assert len(sp.support()) == 4

    def test_accepts_pair_iterables_and_list_lookups(self):
        sp = CorrelatedSpace(
            [
                (((0,), (0,)), Fraction(3, 4)),
                (((1,), (1,)), Fraction(1, 4)),
            ]
        )
        assert sp.mu_value((0,), (0,)) == Fraction(3, 4)
        assert sp.mu_value([0], [0]) == Fraction(3, 4)

    def test_drop_zero_atoms(self):
        sp = CorrelatedSpace(
            {((0,), (0,)): 1, ((1,), (1,)): 0},
        )
        dropped = sp.drop_zero_atoms()
        assert dropped.left_atoms == ((0,),)

    def test_pair_marginal(self):
        sp = t2_block_space(t2_params(Fraction(1, 4)))
        pm = sp.pair_marginal(0, 1)
        assert sum(pm.values()) == 1


class TestConnectedness:
    def test_first_test_support_is_connected(self):
        atoms = t1_connect_atoms(2, 2, (0, 1))
        assert len(atoms) == 12
        assert is_connected(atoms)

    def test_opposite_corners_are_not_connected(self):
        assert not is_connected([(0, 0), (1, 1)])

    def test_full_cube_is_connected(self):
        assert is_connected(list(itertools.product((0, 1), repeat=3)))

    def test_space_argument_uses_joint_support(self):
        assert not is_connected(IDENTICAL_BITS)
        assert is_connected(UNIFORM_PRODUCT)

    def test_rejects_empty_support(self):
        with pytest.raises(PreconditionError):
            is_connected([])

    def test_rejects_length_mismatch(self):
        with pytest.raises(PreconditionError):
            is_connected([(0, 0), (1,)])


class TestPairwiseProduct:
    def test_product_measure_passes(self):
        assert pairwise_product_check(UNIFORM_PRODUCT)

    def test_identical_bits_fail(self):
        assert not pairwise_product_check(IDENTICAL_BITS)

    def test_block_distribution_factorizes(self):
        for eps in (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)):
            assert pairwise_product_check(t2_block_space(t2_params(eps)))


class TestCorrelationRho:
    def test_product_distribution(self):
        assert correlation_rho(UNIFORM_PRODUCT) <= 1e-9

    def test_identical_uniform_bits(self):
        assert abs(correlation_rho(IDENTICAL_BITS) - 1) <= 1e-9

    def test_block_space_bound(self):
        eps = Fraction(1, 4)
        rho = correlation_rho(t2_block_space(t2_params(eps)))
        assert rho <= math.sqrt(3 / 4) + 1e-9

    def test_zero_iff_product_denominator_eight(self):
        # Every joint 2x2 table with masses i/8: rho vanishes exactly when
        # the table factorizes (zero determinant).
        for a in range(9):
            for b in range(9 - a):
                for c in range(9 - a - b):
                    d = 8 - a - b - c
                    rho = correlation_rho(bit_space(a, b, c, d))
                    if a * d == b * c:
                        assert rho <= 1e-9
                    else:
                        assert rho > 1e-9

    def test_matches_two_by_two_oracle(self):
        rng = random.Random(55)
        for _ in range(25):
            sp = random_block(rng)
            mu = {
                (la[0], ra[0]): w for (la, ra), w in sp.mu.items()
            }
            expected = oracles.rho_two_by_two(mu)
            assert abs(correlation_rho(sp) - expected) <= 1e-8

    def test_within_unit_interval(self):
        rng = random.Random(56)
        for _ in range(20):
            rho = correlation_rho(random_block(rng))
            assert 0 <= rho <= 1


class TestMarkovOperator:
    def test_constant_one_maps_to_constant_one(self):
        sp = bit_space(2, 1, 1, 3)
        g = TabulatedFunction(sp.right_marginal_domain(), [1, 1])
        assert markov_apply(sp, g).values == (1, 1)

    def test_product_measure_maps_to_expectation(self):
        sp = bit_space(2, 4, 1, 2)  # determinant zero: product measure
        g = TabulatedFunction(sp.right_marginal_domain(), [3, -5])
        out = markov_apply(MarkovOperator(sp), g)
        assert all(v == g.expectation() for v in out.values)

    def test_preserves_averages(self):
        rng = random.Random(61)
        for _ in range(10):
            sp = random_block(rng)
            dom = sp.right_marginal_domain()
            g = TabulatedFunction(
                dom, [Fraction(rng.randrange(-5, 6)) for _ in range(dom.size)]
            )
            out = markov_apply(sp, g)
            assert out.expectation() == g.expectation()

    def test_component_norm_decay(self):
        rng = random.Random(62)
        for _ in range(10):
            blocks = [random_block(rng), random_block(rng)]
            rho = max(correlation_rho(b) for b in blocks)
            g = random_right_function(rng, blocks)
            for beta, comp in efron_stein(g).components.items():
                out = markov_apply_blocks(blocks, comp)
                lhs = math.sqrt(float(out.norm_sq()))
                rhs = rho ** len(beta) * math.sqrt(float(comp.norm_sq()))
                assert lhs <= rhs + 1e-9

    def test_blocks_domain_shapes(self):
        blocks = [bit_space(1, 1, 1, 1), bit_space(1, 2, 3, 4)]
        assert blocks_right_domain(blocks).sizes == (2, 2)
        assert blocks_left_domain(blocks).sizes == (2, 2)

    def test_rejects_mismatched_domain(self):
        blocks = [bit_space(1, 2, 3, 4)]
        g = TabulatedFunction(ProductDomain.binary_uniform(1), [1, -1])
        with pytest.raises(PreconditionError):
            markov_apply_blocks(blocks, g)


class TestCommutation:
    def test_single_block(self):
        sp = bit_space(3, 1, 1, 3)
        g = TabulatedFunction(sp.right_marginal_domain(), [1, -1])
        res = commute_check([sp], g)
        assert res.ok
        assert res.worst_deviation == 0.0

    def test_product_blocks(self):
        rng = random.Random(71)
        blocks = [bit_space(1, 2, 1, 2), bit_space(2, 1, 2, 1)]
        g = random_right_function(rng, blocks)
        res = commute_check(blocks, g)
        assert res.ok and res.worst_deviation == 0.0

    def test_random_correlated_blocks(self):
        rng = random.Random(72)
        for _ in range(8):
            blocks = [random_block(rng), random_block(rng)]
            g = random_right_function(rng, blocks)
            res = commute_check(blocks, g)
            assert bool(res)
            assert res.worst_deviation == 0.0


class TestInvarianceGap:
    def test_product_measure_gap_is_zero(self):
        rng = random.Random(81)
        sp = product_space({(0,): Fraction(1, 2), (1,): Fraction(1, 2)},
                           {(0,): Fraction(1, 2), (1,): Fraction(1, 2)})
        dom = ProductDomain.binary_uniform(2)
        for _ in range(5):
            f = TabulatedFunction(
                dom, [Fraction(rng.randrange(-4, 5), 4) for _ in range(4)]
            )
            g = TabulatedFunction(
                dom, [Fraction(rng.randrange(-4, 5), 4) for _ in range(4)]
            )
            res = invariance_gap(sp, 2, f, g)
            assert res.gap == 0
            assert res.gap <= res.bound

    def test_constant_side_gap_and_tau_vanish(self):
        sp = t2_block_space(t2_params(Fraction(1, 4)))
        nsym = len({la[0] for la in sp.left_atoms} | {la[1] for la in sp.left_atoms})
        fdom = ProductDomain((nsym,) * 2, ((Fraction(1, nsym),) * nsym,) * 2)
        f = TabulatedFunction(fdom, [1] * fdom.size)
        g = TabulatedFunction(fdom, [(-1) ** i for i in range(fdom.size)])
        res = invariance_gap(sp, 2, f, g)
        assert res.gap == 0
        assert res.tau == 0

    def test_block_space_respects_bound(self):
        rng = random.Random(83)
        sp = t2_block_space(t2_params(Fraction(1, 4)))
        fdom = ProductDomain((4,) * 2, ((Fraction(1, 4),) * 4,) * 2)
        for _ in range(3):
            f = TabulatedFunction(
                fdom, [rng.choice((-1, 1)) for _ in range(fdom.size)]
            )
            g = TabulatedFunction(
                fdom, [rng.choice((-1, 1)) for _ in range(fdom.size)]
            )
            res = invariance_gap(sp, 2, f, g)
            assert 0 <= res.gap <= res.bound

    def test_gap_bound_unpacks_as_pair(self):
        sp = product_space({(0,): Fraction(1, 2), (1,): Fraction(1, 2)},
                           {(0,): Fraction(1, 2), (1,): Fraction(1, 2)})
        dom = ProductDomain.binary_uniform(1)
        f = TabulatedFunction(dom, [1, -1])
        gap, bound = invariance_gap(sp, 1, f, f)
        assert gap == 0 and bound >= 0

    def test_rejects_non_factorizing_space(self):
        dom = ProductDomain.binary_uniform(1)
        f = TabulatedFunction(dom, [1, -1])
        with pytest.raises(PreconditionError):
            invariance_gap(IDENTICAL_BITS, 1, f, f)

    def test_rejects_unbounded_functions(self):
        sp = UNIFORM_PRODUCT
        dom = ProductDomain.binary_uniform(1)
        f = TabulatedFunction(dom, [2, 0])
        g = TabulatedFunction(dom, [1, -1])
        with pytest.raises(PreconditionError):
            invariance_gap(sp, 1, f, g)

    def test_rejects_wrong_domain(self):
        sp = UNIFORM_PRODUCT
        f = TabulatedFunction(ProductDomain.binary_uniform(2), [1, -1, 1, -1])
        with pytest.raises(PreconditionError):
            invariance_gap(sp, 1, f, f)
