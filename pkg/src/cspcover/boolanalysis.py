"""Exact Fourier and Efron-Stein analysis on finite product domains.

Everything here is exact rational arithmetic: transforms, influences, the
noise operator, and the index-set operators used by the reduction layer. A
point of the product domain is encoded as a mixed-radix integer with
coordinate 0 varying fastest, so on binary domains bit i of the index is
coordinate i.
"""

import math
from fractions import Fraction

from .errors import PreconditionError

MAX_TABLE = 1 << 24


class ProductDomain:
    """Finite product of coordinate spaces with exact per-coordinate measures."""

    __slots__ = ("sizes", "measures", "_strides", "size")

    def __init__(self, sizes, measures=None):
        sizes = tuple(int(s) for s in sizes)
        if any(s < 1 for s in sizes):
            raise PreconditionError("coordinate spaces must be nonempty")
        if measures is None:
            measures = tuple(
                tuple(Fraction(1, s) for _ in range(s)) for s in sizes
            )
        else:
            measures = tuple(
                tuple(Fraction(m) for m in coord) for coord in measures
            )
            if len(measures) != len(sizes):
                raise PreconditionError("one measure per coordinate required")
            for s, coord in zip(sizes, measures):
                if len(coord) != s:
                    raise PreconditionError("measure length mismatches its coordinate")
                if any(m < 0 for m in coord):
                    raise PreconditionError("measures must be nonnegative")
                if sum(coord) != 1:
                    raise PreconditionError("each coordinate measure must sum to 1")
        size = math.prod(sizes) if sizes else 1
        if size > MAX_TABLE:
            raise PreconditionError(
                "domain has %d points; full tables are capped at %d" % (size, MAX_TABLE)
            )
        strides = []
        acc = 1
        for s in sizes:
            strides.append(acc)
            acc *= s
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "_strides", tuple(strides))
        object.__setattr__(self, "size", size)

    def __setattr__(self, name, value):
        raise AttributeError("ProductDomain is immutable")

    @classmethod
    def binary_uniform(cls, n):
        return cls((2,) * int(n))

    @property
    def n(self):
        return len(self.sizes)

    def stride(self, coord):
        return self._strides[coord]

    def point(self, index):
        out = []
        for s in self.sizes:
            out.append(index % s)
            index //= s
        return tuple(out)

    def index(self, point):
        if len(point) != len(self.sizes):
            raise PreconditionError("point has wrong dimension")
        idx = 0
        for x, s, st in zip(point, self.sizes, self._strides):
            if x < 0 or x >= s:
                raise PreconditionError("point coordinate out of range")
            idx += x * st
        return idx

    def weight(self, index):
        w = Fraction(1)
        for s, coord in zip(self.sizes, self.measures):
            w *= coord[index % s]
            index //= s
        return w

    def is_binary_uniform(self):
        return all(s == 2 for s in self.sizes) and all(
            coord == (Fraction(1, 2), Fraction(1, 2)) for coord in self.measures
        )

    def is_uniform(self):
        return all(
            coord == tuple(Fraction(1, s) for _ in range(s))
            for s, coord in zip(self.sizes, self.measures)
        )

    def __eq__(self, other):
        if not isinstance(other, ProductDomain):
            return NotImplemented
        return self.sizes == other.sizes and self.measures == other.measures

    def __hash__(self):
        return hash((self.sizes, self.measures))

    def __repr__(self):
        return "ProductDomain(sizes=%r)" % (self.sizes,)


class TabulatedFunction:
    """A function given by its full value table over a ProductDomain."""

    __slots__ = ("domain", "values")

    def __init__(self, domain, values):
        values = tuple(Fraction(v) for v in values)
        if len(values) != domain.size:
            raise PreconditionError(
                "table has %d entries for a domain of %d points"
                % (len(values), domain.size)
            )
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("TabulatedFunction is immutable")

    def __call__(self, point):
        return self.values[self.domain.index(point)]

    def expectation(self):
        return sum(
            (self.domain.weight(i) * v for i, v in enumerate(self.values)),
            Fraction(0),
        )

    def inner(self, other):
        if self.domain != other.domain:
            raise PreconditionError("functions live on different domains")
        return sum(
            (
                self.domain.weight(i) * a * b
                for i, (a, b) in enumerate(zip(self.values, other.values))
            ),
            Fraction(0),
        )

    def norm_sq(self):
        return self.inner(self)

    def variance(self):
        mean = self.expectation()
        return self.norm_sq() - mean * mean

    def sup_norm(self):
        return max(abs(v) for v in self.values)

    def is_pm_one(self):
        return all(v == 1 or v == -1 for v in self.values)

    def scale(self, c):
        c = Fraction(c)
        return TabulatedFunction(self.domain, (c * v for v in self.values))

    def add(self, other):
        if self.domain != other.domain:
            raise PreconditionError("functions live on different domains")
        return TabulatedFunction(
            self.domain, (a + b for a, b in zip(self.values, other.values))
        )

    def sub(self, other):
        if self.domain != other.domain:
            raise PreconditionError("functions live on different domains")
        return TabulatedFunction(
            self.domain, (a - b for a, b in zip(self.values, other.values))
        )

    def mul(self, other):
        if self.domain != other.domain:
            raise PreconditionError("functions live on different domains")
        return TabulatedFunction(
            self.domain, (a * b for a, b in zip(self.values, other.values))
        )

    def __eq__(self, other):
        if not isinstance(other, TabulatedFunction):
            return NotImplemented
        return self.domain == other.domain and self.values == other.values

    def __hash__(self):
        return hash((self.domain, self.values))

    def __repr__(self):
        return "TabulatedFunction(%r, %d values)" % (self.domain, len(self.values))


def wht(values):
    """In-place-style unnormalized Walsh-Hadamard transform of a sequence.

    Returns W with W[m] = sum_x values[x] * (-1)^{popcount(x & m)}; applying
    it twice multiplies by len(values). Works on ints or Fractions; length
    must be a power of two.
    """
    out = list(values)
    n = len(out)
    if n & (n - 1):
        raise PreconditionError("length must be a power of two")
    h = 1
    while h < n:
        for start in range(0, n, h * 2):
            for j in range(start, start + h):
                a, b = out[j], out[j + h]
                out[j], out[j + h] = a + b, a - b
        h *= 2
    return out


class FourierTable:
    """Walsh-Hadamard coefficients of a function on {0,1}^n uniform.

    Coefficient alpha is stored at the bitmask index with bit i set iff
    coordinate i is in alpha.
    """

    __slots__ = ("n", "coefficients")

    def __init__(self, n, coefficients):
        n = int(n)
        coefficients = tuple(Fraction(c) for c in coefficients)
        if len(coefficients) != 1 << n:
            raise PreconditionError("need exactly 2^n coefficients")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, name, value):
        raise AttributeError("FourierTable is immutable")

    def coefficient(self, alpha):
        return self.coefficients[_as_mask(alpha, self.n)]

    def weight_sq(self):
        return sum((c * c for c in self.coefficients), Fraction(0))

    def inverse(self):
        """The unique function with these coefficients, reproduced exactly."""
        vals = wht(self.coefficients)
        return TabulatedFunction(ProductDomain.binary_uniform(self.n), vals)

    def attenuate(self, rate):
        """Multiply coefficient alpha by rate^|alpha|."""
        rate = Fraction(rate)
        return FourierTable(
            self.n,
            (
                c * rate ** _popcount(m)
                for m, c in enumerate(self.coefficients)
            ),
        )

    def __repr__(self):
        return "FourierTable(n=%d)" % self.n


def _popcount(m):
    return bin(m).count("1")


def _as_mask(alpha, n):
    if isinstance(alpha, int):
        mask = alpha
    else:
        mask = 0
        for i in alpha:
            mask |= 1 << int(i)
    if mask < 0 or mask >= 1 << n:
        raise PreconditionError("index set leaves the coordinate range")
    return mask


def character(n, alpha):
    """chi_alpha as a +/-1 table on {0,1}^n uniform."""
    mask = _as_mask(alpha, n)
    dom = ProductDomain.binary_uniform(n)
    return TabulatedFunction(
        dom, (1 if _popcount(x & mask) % 2 == 0 else -1 for x in range(dom.size))
    )


def fourier(f):
    """Exact Fourier coefficients of f on a binary uniform domain."""
    if not f.domain.is_binary_uniform():
        raise PreconditionError("fourier requires a binary uniform domain")
    n = f.domain.n
    # Integer-scale so the butterfly runs over ints, then divide once.
    denom_lcm = 1
    for v in f.values:
        denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
    ints = [int(v * denom_lcm) for v in f.values]
    transformed = wht(ints)
    scale = denom_lcm << n
    return FourierTable(n, (Fraction(t, scale) for t in transformed))


def noise(f, gamma):
    """Attenuate coefficient alpha by (1-gamma)^|alpha|; exact."""
    gamma = Fraction(gamma)
    if gamma < 0 or gamma > 1:
        raise PreconditionError("noise rate must lie in [0, 1]")
    table = fourier(f).attenuate(1 - gamma)
    return table.inverse()


def _normalize_blocks(domain, blocks):
    if blocks is None:
        blocks = [(i,) for i in range(domain.n)]
    blocks = tuple(tuple(sorted(int(c) for c in b)) for b in blocks)
    seen = set()
    for b in blocks:
        if not b:
            raise PreconditionError("blocks must be nonempty")
        for c in b:
            if c < 0 or c >= domain.n:
                raise PreconditionError("block coordinate out of range")
            if c in seen:
                raise PreconditionError("blocks overlap at coordinate %d" % c)
            seen.add(c)
    if len(seen) != domain.n:
        raise PreconditionError("blocks must cover every coordinate")
    return blocks


def _average_out(values, domain, coord):
    """Replace coordinate `coord` by its mean; table keeps full size."""
    s = domain.sizes[coord]
    mu = domain.measures[coord]
    stride = domain.stride(coord)
    out = list(values)
    size = domain.size
    block = stride * s
    for base in range(0, size, block):
        for off in range(stride):
            start = base + off
            mean = sum(
                (mu[v] * values[start + v * stride] for v in range(s)),
                Fraction(0),
            )
            for v in range(s):
                out[start + v * stride] = mean
    return out


class EfronSteinDecomposition:
    """Orthogonal components f_beta indexed by subsets of the blocks."""

    __slots__ = ("domain", "blocks", "components")

    def __init__(self, domain, blocks, components):
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "components", dict(components))

    def __setattr__(self, name, value):
        raise AttributeError("EfronSteinDecomposition is immutable")

    def component(self, beta):
        return self.components[frozenset(beta)]

    def total(self):
        acc = [Fraction(0)] * self.domain.size
        for comp in self.components.values():
            for i, v in enumerate(comp.values):
                acc[i] += v
        return TabulatedFunction(self.domain, acc)

    def norms_sq(self):
        return {beta: comp.norm_sq() for beta, comp in self.components.items()}

    def __repr__(self):
        return "EfronSteinDecomposition(%d blocks)" % len(self.blocks)


def efron_stein(f, blocks=None):
    """Decompose f into mean-zero components via conditional expectations.

    Component f_beta is the inclusion-exclusion (Moebius) sum of E[f | x on
    the blocks of beta'] over beta' contained in beta. The per-coordinate
    measure structure makes the underlying measure a product measure by
    construction.
    """
    domain = f.domain
    blocks = _normalize_blocks(domain, blocks)
    nb = len(blocks)
    # cond[m] = table of E[f | coordinates in the blocks of m], full-size.
    cond = {}
    full = (1 << nb) - 1
    cond[full] = list(f.values)
    for m in range(full - 1, -1, -1):
        missing = next(b for b in range(nb) if not (m >> b) & 1)
        src = cond[m | (1 << missing)]
        vals = src
        for coord in blocks[missing]:
            vals = _average_out(vals, domain, coord)
        cond[m] = vals
    components = {}
    for m in range(full + 1):
        acc = [Fraction(0)] * domain.size
        sub = m
        while True:
            sign = 1 if (_popcount(m) - _popcount(sub)) % 2 == 0 else -1
            table = cond[sub]
            if sign == 1:
                for i in range(domain.size):
                    acc[i] += table[i]
            else:
                for i in range(domain.size):
                    acc[i] -= table[i]
            if sub == 0:
                break
            sub = (sub - 1) & m
        beta = frozenset(b for b in range(nb) if (m >> b) & 1)
        components[beta] = TabulatedFunction(domain, acc)
    return EfronSteinDecomposition(domain, blocks, components)


def influence(f, i, blocks=None):
    """Sum of squared component norms over sets containing block i.

    With the default singleton blocks this is the usual coordinate influence
    E[Var_{x_i} f].
    """
    dec = efron_stein(f, blocks)
    i = int(i)
    if i < 0 or i >= len(dec.blocks):
        raise PreconditionError("block index out of range")
    return sum(
        (comp.norm_sq() for beta, comp in dec.components.items() if i in beta),
        Fraction(0),
    )


def degree_d_influence(f, i, d, blocks=None):
    """Like influence, restricted to component sets of size at most d."""
    dec = efron_stein(f, blocks)
    i = int(i)
    if i < 0 or i >= len(dec.blocks):
        raise PreconditionError("block index out of range")
    d = int(d)
    return sum(
        (
            comp.norm_sq()
            for beta, comp in dec.components.items()
            if i in beta and len(beta) <= d
        ),
        Fraction(0),
    )


def influence_variance(f, i, blocks=None):
    """The variance form: E over the other coordinates of Var over block i."""
    domain = f.domain
    blocks = _normalize_blocks(domain, blocks)
    i = int(i)
    if i < 0 or i >= len(blocks):
        raise PreconditionError("block index out of range")
    sq = f.mul(f)
    mean_vals = list(f.values)
    meansq_vals = list(sq.values)
    for coord in blocks[i]:
        mean_vals = _average_out(mean_vals, domain, coord)
        meansq_vals = _average_out(meansq_vals, domain, coord)
    var = TabulatedFunction(
        domain, (b - a * a for a, b in zip(mean_vals, meansq_vals))
    )
    return var.expectation()


def all_influences(f, blocks=None):
    """Influence of every block from a single decomposition."""
    dec = efron_stein(f, blocks)
    out = [Fraction(0)] * len(dec.blocks)
    for beta, comp in dec.components.items():
        nsq = comp.norm_sq()
        for b in beta:
            out[b] += nsq
    return out


def all_degree_d_influences(f, d, blocks=None):
    dec = efron_stein(f, blocks)
    d = int(d)
    out = [Fraction(0)] * len(dec.blocks)
    for beta, comp in dec.components.items():
        if len(beta) > d:
            continue
        nsq = comp.norm_sq()
        for b in beta:
            out[b] += nsq
    return out


def block_image(alpha, blocks, n):
    """The set of blocks an index set touches (the block map of Eq-style
    coefficient regrouping): coordinates to containing blocks."""
    mask = _as_mask(alpha, n)
    owner = {}
    for b, blk in enumerate(blocks):
        for c in blk:
            owner[c] = b
    out = set()
    for c in range(n):
        if (mask >> c) & 1:
            if c not in owner:
                raise PreconditionError("coordinate %d is not in any block" % c)
            out.add(owner[c])
    return frozenset(out)


def pi_tilde(alpha, pi):
    """Left labels reachable from alpha through pi, folding the two halves.

    alpha is a subset of [2R]; index j and index j+R both witness pi[j].
    """
    pi = tuple(int(x) for x in pi)
    r = len(pi)
    out = set()
    for j in alpha:
        j = int(j)
        if j < 0 or j >= 2 * r:
            raise PreconditionError("index %d outside [2R]" % j)
        out.add(pi[j % r])
    return frozenset(out)


def pi_oplus(alpha, pi, nleft):
    """Parity-folded projection of alpha into [2L].

    Label i < L appears iff an odd number of first-half indices of alpha map
    to i; label L + i appears iff an odd number of second-half indices map to
    i. Satisfies the character identity against compose_projection.
    """
    pi = tuple(int(x) for x in pi)
    r = len(pi)
    nleft = int(nleft)
    if any(x < 0 or x >= nleft for x in pi):
        raise PreconditionError("projection leaves [L]")
    counts_lo = [0] * nleft
    counts_hi = [0] * nleft
    for j in alpha:
        j = int(j)
        if j < 0 or j >= 2 * r:
            raise PreconditionError("index %d outside [2R]" % j)
        if j < r:
            counts_lo[pi[j]] += 1
        else:
            counts_hi[pi[j - r]] += 1
    out = set()
    for i in range(nleft):
        if counts_lo[i] % 2:
            out.add(i)
        if counts_hi[i] % 2:
            out.add(nleft + i)
    return frozenset(out)


def compose_projection(y, pi):
    """Lift a length-2L string to length 2R: position j reads y[pi[j]] and
    position R + j reads y[L + pi[j]]. Generic over the symbol alphabet."""
    y = tuple(y)
    if len(y) % 2 != 0:
        raise PreconditionError("input must have even length 2L")
    half = len(y) // 2
    pi = tuple(int(x) for x in pi)
    if any(x < 0 or x >= half for x in pi):
        raise PreconditionError("projection leaves [L]")
    first = tuple(y[p] for p in pi)
    second = tuple(y[half + p] for p in pi)
    return first + second
