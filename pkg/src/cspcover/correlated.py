"""Finite correlated probability spaces: connectedness, Markov operators,
correlation, Efron-Stein commutation, and an empirical product-test gap
checker with an explicit constant.

A CorrelatedSpace couples a left space (tuples of k_left symbols) with a
right space (tuples of k_right symbols) through an exact joint measure.
Correlation and the gap checker mix exact construction with numeric linear
algebra at stated tolerances; everything else is exact.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from .boolanalysis import ProductDomain, TabulatedFunction, efron_stein, influence
from .errors import PreconditionError, as_budget


class CorrelatedSpace:
    """Joint measure over pairs (left atom, right atom) of fixed shapes."""

    __slots__ = ("left_atoms", "right_atoms", "mu", "marginal_left",
                 "marginal_right", "k_left", "k_right")

    def __init__(self, mu, left_atoms=None, right_atoms=None):
        table = {}
        for (la, ra), w in dict(mu).items():
            la, ra = tuple(la), tuple(ra)
            w = Fraction(w)
            if w < 0:
                raise PreconditionError("measure entries must be nonnegative")
            table[(la, ra)] = table.get((la, ra), Fraction(0)) + w
        lefts = {la for (la, _ra) in table}
        rights = {ra for (_la, ra) in table}
        if left_atoms is not None:
            lefts |= {tuple(a) for a in left_atoms}
        if right_atoms is not None:
            rights |= {tuple(a) for a in right_atoms}
        if not table or all(w == 0 for w in table.values()):
            raise PreconditionError("support must be nonempty")
        if sum(table.values()) != 1:
            raise PreconditionError("joint measure must sum to 1 exactly")
        klens = {len(a) for a in lefts}
        rlens = {len(a) for a in rights}
        if len(klens) != 1 or len(rlens) != 1:
            raise PreconditionError("atoms on one side must share a shape")
        left_atoms = tuple(sorted(lefts))
        right_atoms = tuple(sorted(rights))
        ml = {a: Fraction(0) for a in left_atoms}
        mr = {a: Fraction(0) for a in right_atoms}
        for (la, ra), w in table.items():
            ml[la] += w
            mr[ra] += w
        object.__setattr__(self, "mu", table)
        object.__setattr__(self, "left_atoms", left_atoms)
        object.__setattr__(self, "right_atoms", right_atoms)
        object.__setattr__(self, "marginal_left", ml)
        object.__setattr__(self, "marginal_right", mr)
        object.__setattr__(self, "k_left", next(iter(klens)))
        object.__setattr__(self, "k_right", next(iter(rlens)))

    def __setattr__(self, name, value):
        raise AttributeError("CorrelatedSpace is immutable")

    def mu_value(self, la, ra):
        return self.mu.get((tuple(la), tuple(ra)), Fraction(0))

    def support(self):
        return tuple(sorted(k for k, w in self.mu.items() if w > 0))

    def min_atom(self):
        return min(w for w in self.mu.values() if w > 0)

    def drop_zero_atoms(self):
        """Restrict to atoms of positive marginal and positive joint entries."""
        mu = {k: w for k, w in self.mu.items() if w > 0}
        return CorrelatedSpace(mu)

    def left_marginal_domain(self):
        return ProductDomain(
            (len(self.left_atoms),),
            ((tuple(self.marginal_left[a] for a in self.left_atoms)),),
        )

    def right_marginal_domain(self):
        return ProductDomain(
            (len(self.right_atoms),),
            ((tuple(self.marginal_right[a] for a in self.right_atoms)),),
        )

    def single_coordinate_marginal(self, side, coord):
        """Distribution of one coordinate of one side, as a symbol -> mass map."""
        out = {}
        if side == "left":
            for (la, _ra), w in self.mu.items():
                out[la[coord]] = out.get(la[coord], Fraction(0)) + w
        elif side == "right":
            for (_la, ra), w in self.mu.items():
                out[ra[coord]] = out.get(ra[coord], Fraction(0)) + w
        else:
            raise PreconditionError("side must be 'left' or 'right'")
        return out

    def pair_marginal(self, left_coord, right_coord):
        out = {}
        for (la, ra), w in self.mu.items():
            key = (la[left_coord], ra[right_coord])
            out[key] = out.get(key, Fraction(0)) + w
        return out

    def __repr__(self):
        return "CorrelatedSpace(%d x %d atoms, k=(%d,%d))" % (
            len(self.left_atoms), len(self.right_atoms),
            self.k_left, self.k_right,
        )


def product_space(mu_left, mu_right):
    """The product coupling of two atom -> mass maps."""
    mu = {}
    for la, wl in dict(mu_left).items():
        for ra, wr in dict(mu_right).items():
            w = Fraction(wl) * Fraction(wr)
            if w:
                mu[(tuple(la), tuple(ra))] = w
    return CorrelatedSpace(mu)


def is_connected(arg):
    """True iff the support is connected under change-one-coordinate moves.

    Accepts a CorrelatedSpace (its joint support, left and right coordinates
    concatenated) or an explicit iterable of equal-length tuples.
    """
    if isinstance(arg, CorrelatedSpace):
        atoms = [la + ra for (la, ra) in arg.support()]
    else:
        atoms = [tuple(a) for a in arg]
    if not atoms:
        raise PreconditionError("support must be nonempty")
    atoms = sorted(set(atoms))
    if len({len(a) for a in atoms}) != 1:
        raise PreconditionError("atoms must share a length")
    index = {a: i for i, a in enumerate(atoms)}
    n = len(atoms)
    seen = [False] * n
    seen[0] = True
    queue = [atoms[0]]
    reached = 1
    # Group by the tuple with one coordinate masked; neighbors share a group.
    groups = {}
    for a in atoms:
        for c in range(len(a)):
            key = (c, a[:c], a[c + 1:])
            groups.setdefault(key, []).append(a)
    while queue:
        a = queue.pop()
        for c in range(len(a)):
            for b in groups[(c, a[:c], a[c + 1:])]:
                i = index[b]
                if not seen[i]:
                    seen[i] = True
                    reached += 1
                    queue.append(b)
    return reached == n


def pairwise_product_check(space):
    """True iff every (left coordinate, right coordinate) marginal factorizes."""
    for i in range(space.k_left):
        left = space.single_coordinate_marginal("left", i)
        for j in range(space.k_right):
            right = space.single_coordinate_marginal("right", j)
            pair = space.pair_marginal(i, j)
            for a, wa in left.items():
                for b, wb in right.items():
                    if pair.get((a, b), Fraction(0)) != wa * wb:
                        return False
    return True


def _normalized_joint_matrix(space):
    sp = space.drop_zero_atoms()
    nl, nr = len(sp.left_atoms), len(sp.right_atoms)
    m1 = [float(sp.marginal_left[a]) for a in sp.left_atoms]
    m2 = [float(sp.marginal_right[a]) for a in sp.right_atoms]
    mat = np.zeros((nl, nr))
    for (la, ra), w in sp.mu.items():
        i = sp.left_atoms.index(la)
        j = sp.right_atoms.index(ra)
        mat[i, j] = float(w) / math.sqrt(m1[i] * m2[j])
    return sp, mat, np.array(m2)


def correlation_rho(space, tol=1e-9):
    """Correlation of the two sides: the joint matrix's second singular value.

    Normalizing by the marginals makes the top singular pair the square-root
    marginals at value 1; the next singular value is the maximum of
    |E[f(X)g(Y)]| over mean-zero unit-variance f, g. A second computation
    path (maximizing the conditional-expectation norm over mean-zero g) must
    agree to 1e-8. Zero-probability atoms are dropped first.
    """
    sp, mat, m2 = _normalized_joint_matrix(space)
    if len(sp.left_atoms) < 2 or len(sp.right_atoms) < 2:
        return 0.0
    svals = np.linalg.svd(mat, compute_uv=False)
    rho_svd = float(svals[1]) if len(svals) > 1 else 0.0
    # Cross-check: spectrum of M^T M on the complement of sqrt(mu_right).
    h0 = np.sqrt(m2)
    proj = np.eye(len(m2)) - np.outer(h0, h0)
    gram = proj @ (mat.T @ mat) @ proj
    eigs = np.linalg.eigvalsh(gram)
    rho_opt = math.sqrt(max(0.0, float(eigs[-1])))
    if abs(rho_svd - rho_opt) > 1e-8:
        raise ArithmeticError(
            "correlation paths disagree: %.12g vs %.12g" % (rho_svd, rho_opt)
        )
    if rho_svd > 1 + tol:
        raise ArithmeticError("correlation exceeded 1 beyond tolerance")
    return min(max(rho_svd, 0.0), 1.0)


class MarkovOperator:
    """Conditional expectation onto the left side: (Ug)(x) = E[g(Y) | X=x].

    Defined on the positive-marginal atoms; rows of the conditional table sum
    to one, so the constant-1 function maps to constant 1.
    """

    __slots__ = ("space", "cond")

    def __init__(self, space):
        sp = space.drop_zero_atoms()
        cond = {}
        for (la, ra), w in sp.mu.items():
            cond.setdefault(la, {})[ra] = w / sp.marginal_left[la]
        object.__setattr__(self, "space", sp)
        object.__setattr__(self, "cond", cond)

    def __setattr__(self, name, value):
        raise AttributeError("MarkovOperator is immutable")

    def apply(self, g):
        sp = self.space
        values = _right_values(sp, g)
        out = []
        for la in sp.left_atoms:
            row = self.cond[la]
            out.append(
                sum(
                    (p * values[ra] for ra, p in row.items()),
                    Fraction(0),
                )
            )
        return TabulatedFunction(sp.left_marginal_domain(), out)


def _right_values(space, g):
    """Coerce g into a right-atom -> value map."""
    if isinstance(g, TabulatedFunction):
        if g.domain.size != len(space.right_atoms):
            raise PreconditionError("function does not match the right atoms")
        return {a: g.values[i] for i, a in enumerate(space.right_atoms)}
    if isinstance(g, dict):
        return {tuple(a): Fraction(v) for a, v in g.items()}
    values = [Fraction(v) for v in g]
    if len(values) != len(space.right_atoms):
        raise PreconditionError("function does not match the right atoms")
    return dict(zip(space.right_atoms, values))


def markov_apply(op, g):
    """Apply a Markov operator (or the operator of a space) to g; exact."""
    if isinstance(op, CorrelatedSpace):
        op = MarkovOperator(op)
    return op.apply(g)


def blocks_right_domain(blocks):
    """Product domain with one coordinate per block, right marginals."""
    blocks = [b.drop_zero_atoms() for b in blocks]
    return ProductDomain(
        tuple(len(b.right_atoms) for b in blocks),
        tuple(
            tuple(b.marginal_right[a] for a in b.right_atoms) for b in blocks
        ),
    )


def blocks_left_domain(blocks):
    blocks = [b.drop_zero_atoms() for b in blocks]
    return ProductDomain(
        tuple(len(b.left_atoms) for b in blocks),
        tuple(
            tuple(b.marginal_left[a] for a in b.left_atoms) for b in blocks
        ),
    )


def markov_apply_blocks(blocks, g):
    """Apply the tensor of per-block operators to g, one coordinate at a time.

    g lives on the product of the blocks' right sides (one coordinate per
    block); the result lives on the product of the left sides.
    """
    blocks = [b.drop_zero_atoms() for b in blocks]
    domain = blocks_right_domain(blocks)
    if not isinstance(g, TabulatedFunction) or g.domain != domain:
        raise PreconditionError("g must live on the blocks' right product domain")
    vals = list(g.values)
    sizes = [len(b.right_atoms) for b in blocks]
    for j, b in enumerate(blocks):
        cond = MarkovOperator(b).cond
        matrix = [
            [cond[la].get(ra, Fraction(0)) for ra in b.right_atoms]
            for la in b.left_atoms
        ]
        vals, sizes = _contract_coordinate(vals, sizes, j, matrix)
    return TabulatedFunction(blocks_left_domain(blocks), vals)


def _contract_coordinate(vals, sizes, j, matrix):
    """Replace coordinate j by matrix-weighted sums; sizes may change."""
    old = sizes[j]
    new = len(matrix)
    stride = math.prod(sizes[:j]) if j else 1
    outer = math.prod(sizes[j + 1:]) if j + 1 < len(sizes) else 1
    new_sizes = list(sizes)
    new_sizes[j] = new
    out = [Fraction(0)] * (stride * new * outer)
    in_block = stride * old
    out_block = stride * new
    for o in range(outer):
        for off in range(stride):
            base_in = o * in_block + off
            base_out = o * out_block + off
            col = [vals[base_in + y * stride] for y in range(old)]
            for x in range(new):
                row = matrix[x]
                out[base_out + x * stride] = sum(
                    (row[y] * col[y] for y in range(old)), Fraction(0)
                )
    return out, new_sizes


class CommuteResult:
    __slots__ = ("ok", "worst_deviation")

    def __init__(self, ok, worst_deviation):
        object.__setattr__(self, "ok", bool(ok))
        object.__setattr__(self, "worst_deviation", float(worst_deviation))

    def __setattr__(self, name, value):
        raise AttributeError("CommuteResult is immutable")

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "CommuteResult(ok=%r, worst_deviation=%g)" % (
            self.ok, self.worst_deviation,
        )


def commute_check(blocks, g, tol=1e-9):
    """Compare the two orders of Markov application and decomposition.

    For every subset S of the blocks, the S-component of Ug must equal U
    applied to the S-component of g. Both sides are computed independently
    and exactly; the worst pointwise deviation is reported against tol.
    """
    blocks = [b.drop_zero_atoms() for b in blocks]
    domain = blocks_right_domain(blocks)
    if not isinstance(g, TabulatedFunction) or g.domain != domain:
        raise PreconditionError("g must live on the blocks' right product domain")
    ug = markov_apply_blocks(blocks, g)
    dec_g = efron_stein(g)
    dec_ug = efron_stein(ug)
    worst = Fraction(0)
    for beta, comp in dec_g.components.items():
        lhs = dec_ug.components[beta]
        rhs = markov_apply_blocks(blocks, comp)
        for a, b in zip(lhs.values, rhs.values):
            dev = abs(a - b)
            if dev > worst:
                worst = dev
    return CommuteResult(float(worst) <= tol, float(worst))


class InvarianceGap:
    """Gap and bound from the product-vs-coupled comparison; iterates as
    (gap, bound) for tuple unpacking."""

    __slots__ = ("gap", "bound", "tau", "gamma")

    def __init__(self, gap, bound, tau, gamma):
        object.__setattr__(self, "gap", gap)
        object.__setattr__(self, "bound", float(bound))
        object.__setattr__(self, "tau", float(tau))
        object.__setattr__(self, "gamma", float(gamma))

    def __setattr__(self, name, value):
        raise AttributeError("InvarianceGap is immutable")

    def __iter__(self):
        return iter((self.gap, self.bound))

    def __repr__(self):
        return "InvarianceGap(gap=%s, bound=%g)" % (self.gap, self.bound)


def _symbol_axis(space, side):
    """Sorted symbol set and per-coordinate-equal marginal for one side."""
    coords = space.k_left if side == "left" else space.k_right
    marg = space.single_coordinate_marginal(side, 0)
    for c in range(1, coords):
        if space.single_coordinate_marginal(side, c) != marg:
            raise PreconditionError(
                "all %s coordinates must share one marginal" % side
            )
    symbols = tuple(sorted(marg))
    return symbols, tuple(marg[s] for s in symbols)


def invariance_gap(space, nblocks, f, g, budget=None):
    """Exact gap between the coupled and the factorized product expectations.

    Columns are drawn independently from the joint measure; f is applied to
    every left row and g to every right row, each row read as a word of
    length nblocks over the side's symbol alphabet. The reported bound is
    2^(4k+1) * Gamma * tau from the sum-of-influences quantities of f and g.
    Requires factorizing pairwise marginals, equal per-side coordinate
    marginals, and f, g bounded in [-1, 1].
    """
    budget = as_budget(budget)
    nblocks = int(nblocks)
    if nblocks < 1:
        raise PreconditionError("need at least one column")
    if space.k_left != space.k_right:
        raise PreconditionError("both sides must have the same number of rows")
    k = space.k_left
    if not pairwise_product_check(space):
        raise PreconditionError("pairwise marginals do not factorize")
    left_sym, left_measure = _symbol_axis(space, "left")
    right_sym, right_measure = _symbol_axis(space, "right")
    fdom = ProductDomain((len(left_sym),) * nblocks, (left_measure,) * nblocks)
    gdom = ProductDomain((len(right_sym),) * nblocks, (right_measure,) * nblocks)
    if not isinstance(f, TabulatedFunction) or f.domain != fdom:
        raise PreconditionError(
            "f must be tabulated on the left-symbol product domain"
        )
    if not isinstance(g, TabulatedFunction) or g.domain != gdom:
        raise PreconditionError(
            "g must be tabulated on the right-symbol product domain"
        )
    if f.sup_norm() > 1 or g.sup_norm() > 1:
        raise PreconditionError("f and g must be bounded in [-1, 1]")
    left_index = {s: i for i, s in enumerate(left_sym)}
    right_index = {s: i for i, s in enumerate(right_sym)}
    support = space.support()

    def coupled_expectation():
        total = Fraction(0)
        for cols in itertools.product(support, repeat=nblocks):
            budget.spend()
            w = Fraction(1)
            for la, ra in cols:
                w *= space.mu[(la, ra)]
            term = Fraction(1)
            for row in range(k):
                fx = f.values[fdom.index(
                    tuple(left_index[cols[c][0][row]] for c in range(nblocks))
                )]
                gy = g.values[gdom.index(
                    tuple(right_index[cols[c][1][row]] for c in range(nblocks))
                )]
                term *= fx * gy
            total += w * term
        return total

    def one_side_expectation(side, fn, dom, sym_index):
        marg = (
            space.marginal_left if side == "left" else space.marginal_right
        )
        atoms = [(a, w) for a, w in marg.items() if w > 0]
        total = Fraction(0)
        for cols in itertools.product(atoms, repeat=nblocks):
            budget.spend()
            w = Fraction(1)
            for _a, wa in cols:
                w *= wa
            term = Fraction(1)
            for row in range(k):
                term *= fn.values[dom.index(
                    tuple(sym_index[cols[c][0][row]] for c in range(nblocks))
                )]
            total += w * term
        return total

    coupled = coupled_expectation()
    left_only = one_side_expectation("left", f, fdom, left_index)
    right_only = one_side_expectation("right", g, gdom, right_index)
    gap = abs(coupled - left_only * right_only)
    inf_f = [influence(f, i) for i in range(nblocks)]
    inf_g = [influence(g, i) for i in range(nblocks)]
    tau = math.sqrt(float(sum(a * b for a, b in zip(inf_f, inf_g))))
    gamma = math.sqrt(max(float(sum(inf_f)), float(sum(inf_g))))
    bound = float(2 ** (4 * k + 1)) * gamma * tau
    if float(gap) > bound * (1 + 1e-12) + 1e-300:
        raise ArithmeticError(
            "gap %s exceeded its bound %g" % (float(gap), bound)
        )
    return InvarianceGap(gap, bound, tau, gamma)
