"""Plain-text formats for predicates, instances, games, spaces, and tables.

Every parser raises FormatError with a line reference on malformed input;
writers emit exactly what the parsers accept, so files round-trip.
"""

from fractions import Fraction

from .boolanalysis import ProductDomain, TabulatedFunction
from .correlated import CorrelatedSpace
from .csp import Assignment, CspInstance
from .errors import FormatError
from .labelcover import Edge, LabelCoverInstance, Labeling
from .predicate import Predicate


def _lines(text):
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((i, line))
    return out


def _ints(line, lineno, count=None):
    try:
        vals = [int(t) for t in line.split()]
    except ValueError:
        raise FormatError("line %d: expected integers" % lineno)
    if count is not None and len(vals) != count:
        raise FormatError(
            "line %d: expected %d integers, got %d" % (lineno, count, len(vals))
        )
    return vals


def _rational(token, lineno):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError("line %d: bad rational %r" % (lineno, token))


def _digits(token, lineno, count, base):
    if len(token) != count or not token.isdigit():
        raise FormatError(
            "line %d: expected %d digits, got %r" % (lineno, count, token)
        )
    vals = tuple(int(c) for c in token)
    if any(v >= base for v in vals):
        raise FormatError("line %d: digit outside [%d]" % (lineno, base))
    return vals


def format_rational(x):
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_digits(token, count, base):
    """A bare tuple of `count` digits below `base`, e.g. a predicate member."""
    if len(token) != count or not token.isdigit():
        raise FormatError("expected %d digits, got %r" % (count, token))
    vals = tuple(int(c) for c in token)
    if any(v >= base for v in vals):
        raise FormatError("digit outside [%d] in %r" % (base, token))
    return vals


# -- predicates -------------------------------------------------------------


def parse_predicate(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty predicate file")
    lineno, header = lines[0]
    q, k = _ints(header, lineno, 2)
    members = []
    for lineno, line in lines[1:]:
        members.append(_digits(line, lineno, k, q))
    return Predicate(q, k, members)


def format_predicate(pred):
    out = ["%d %d" % (pred.q, pred.k)]
    for m in pred.members:
        out.append("".join(str(v) for v in m))
    return "\n".join(out) + "\n"


# -- CSP instances ----------------------------------------------------------


def parse_instance(text, predicate):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty instance file")
    lineno, header = lines[0]
    q, k, nvars, ncons = _ints(header, lineno, 4)
    if q != predicate.q or k != predicate.k:
        raise FormatError(
            "instance header (q=%d, k=%d) does not match the predicate" % (q, k)
        )
    if len(lines) - 1 != ncons:
        raise FormatError(
            "expected %d constraints, found %d" % (ncons, len(lines) - 1)
        )
    constraints = []
    for lineno, line in lines[1:]:
        toks = line.split()
        if len(toks) != k + 2:
            raise FormatError(
                "line %d: expected %d tokens, got %d" % (lineno, k + 2, len(toks))
            )
        try:
            vars_ = tuple(int(t) for t in toks[:k])
        except ValueError:
            raise FormatError("line %d: bad variable indices" % lineno)
        literals = _digits(toks[k], lineno, k, q)
        weight = _rational(toks[k + 1], lineno)
        constraints.append((vars_, literals, weight))
    return CspInstance(predicate, range(nvars), constraints)


def format_instance(inst):
    pred = inst.predicate
    out = [
        "%d %d %d %d" % (pred.q, pred.k, inst.nvars, len(inst.constraints))
    ]
    for c in inst.constraints:
        out.append(
            "%s %s %s"
            % (
                " ".join(str(v) for v in c.vars),
                "".join(str(x) for x in c.literals),
                format_rational(c.weight),
            )
        )
    return "\n".join(out) + "\n"


# -- projection games -------------------------------------------------------


def parse_labelcover(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty game file")
    lineno, header = lines[0]
    nu, nv, nl, nr, unique = _ints(header, lineno, 5)
    if unique not in (0, 1):
        raise FormatError("line %d: unique flag must be 0 or 1" % lineno)
    edges = []
    for lineno, line in lines[1:]:
        vals = _ints(line, lineno, 2 + nr)
        edges.append(Edge(vals[0], vals[1], vals[2:]))
    return LabelCoverInstance(nu, nv, nl, nr, edges, unique=bool(unique))


def format_labelcover(g):
    out = [
        "%d %d %d %d %d"
        % (g.nu, g.nv, g.nlabels_u, g.nlabels_v, 1 if g.unique else 0)
    ]
    for e in g.edges:
        out.append(
            "%d %d %s" % (e.u, e.v, " ".join(str(x) for x in e.proj))
        )
    return "\n".join(out) + "\n"


# -- correlated spaces ------------------------------------------------------


def parse_space(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty space file")
    lineno, header = lines[0]
    ql, kl, qr, kr = _ints(header, lineno, 4)
    mu = {}
    for lineno, line in lines[1:]:
        toks = line.split()
        if len(toks) != 3:
            raise FormatError("line %d: expected 3 tokens" % lineno)
        la = _digits(toks[0], lineno, kl, ql)
        ra = _digits(toks[1], lineno, kr, qr)
        w = _rational(toks[2], lineno)
        mu[(la, ra)] = mu.get((la, ra), Fraction(0)) + w
    return CorrelatedSpace(mu)


def _side_encoding(atoms):
    """Digit encoding of one side's coordinate values.

    Integer values are kept as they are; structured values (for example
    whole rows of a block distribution) are replaced by their index in the
    sorted list of distinct values.  Correlation, connectedness, and
    factorization checks only see coordinate identity, so the relabeling is
    analysis-preserving.
    """
    entries = {x for a in atoms for x in a}
    if all(isinstance(x, int) for x in entries):
        return None, 1 + max(entries)
    order = sorted(entries)
    return {x: i for i, x in enumerate(order)}, len(order)


def format_space(space):
    enc_l, ql = _side_encoding(space.left_atoms)
    enc_r, qr = _side_encoding(space.right_atoms)
    if ql > 10 or qr > 10:
        raise FormatError(
            "cannot encode more than 10 distinct symbols per side"
        )

    def word(enc, atom):
        return "".join(str(x if enc is None else enc[x]) for x in atom)

    out = ["%d %d %d %d" % (ql, space.k_left, qr, space.k_right)]
    for (la, ra) in space.support():
        out.append(
            "%s %s %s"
            % (
                word(enc_l, la),
                word(enc_r, ra),
                format_rational(space.mu[(la, ra)]),
            )
        )
    return "\n".join(out) + "\n"


# -- function tables --------------------------------------------------------


def parse_truth_table(text):
    """Header `n`, then 2^n rational values in index order."""
    lines = _lines(text)
    if not lines:
        raise FormatError("empty table file")
    lineno, header = lines[0]
    (n,) = _ints(header, lineno, 1)
    if n < 0 or n > 24:
        raise FormatError("line %d: unsupported dimension %d" % (lineno, n))
    values = []
    for lineno, line in lines[1:]:
        values.append(_rational(line, lineno))
    if len(values) != 1 << n:
        raise FormatError(
            "expected %d values, found %d" % (1 << n, len(values))
        )
    return TabulatedFunction(ProductDomain.binary_uniform(n), values)


def parse_values(text):
    """A bare list of rational values, one per line."""
    return [_rational(line, lineno) for lineno, line in _lines(text)]


def parse_distribution(text):
    """Header `k`, then `bits num/den` support lines."""
    lines = _lines(text)
    if not lines:
        raise FormatError("empty distribution file")
    lineno, header = lines[0]
    (k,) = _ints(header, lineno, 1)
    dist = {}
    for lineno, line in lines[1:]:
        toks = line.split()
        if len(toks) != 2:
            raise FormatError("line %d: expected `bits weight`" % lineno)
        key = _digits(toks[0], lineno, k, 2)
        dist[key] = dist.get(key, Fraction(0)) + _rational(toks[1], lineno)
    return dist


def parse_assignments(text, nvars, q):
    """One assignment per line as nvars digits."""
    out = []
    for lineno, line in _lines(text):
        out.append(Assignment(_digits(line, lineno, nvars, q)))
    return out


def format_assignments(assignments):
    return (
        "\n".join(
            "".join(str(v) for v in a.values) for a in assignments
        )
        + "\n"
    )


def parse_labelings(text, nu, nv):
    """One labeling per line: nu left labels then nv right labels."""
    out = []
    for lineno, line in _lines(text):
        vals = _ints(line, lineno, nu + nv)
        out.append(Labeling(vals[:nu], vals[nu:]))
    return out


def format_labelings(labelings):
    return (
        "\n".join(
            " ".join(str(x) for x in lab.left + lab.right) for lab in labelings
        )
        + "\n"
    )


def parse_tables(text):
    """Header `nv npoints q`, then `v digits` rows of per-vertex tables.

    Table width (number of coordinates) is recovered from npoints = q^width.
    """
    lines = _lines(text)
    if not lines:
        raise FormatError("empty tables file")
    lineno, header = lines[0]
    nv, npoints, q = _ints(header, lineno, 3)
    if q < 2:
        raise FormatError("line %d: alphabet size must be at least 2" % lineno)
    width = 0
    size = 1
    while size < npoints:
        size *= q
        width += 1
    if size != npoints:
        raise FormatError("npoints must be a power of the alphabet size")
    dom = ProductDomain((q,) * width)
    tables = {}
    for lineno, line in lines[1:]:
        toks = line.split()
        if len(toks) != 2:
            raise FormatError("line %d: expected `vertex digits`" % lineno)
        try:
            v = int(toks[0])
        except ValueError:
            raise FormatError("line %d: bad vertex index" % lineno)
        if not 0 <= v < nv:
            raise FormatError("line %d: vertex out of range" % lineno)
        values = _digits(toks[1], lineno, npoints, q)
        tables[v] = TabulatedFunction(dom, values)
    missing = [v for v in range(nv) if v not in tables]
    if missing:
        raise FormatError("missing tables for vertices %r" % (missing,))
    return tables


def format_tables(tables, q):
    nv = len(tables)
    npoints = next(iter(tables.values())).domain.size
    out = ["%d %d %d" % (nv, npoints, q)]
    for v in sorted(tables):
        f = tables[v]
        out.append(
            "%d %s" % (v, "".join(str(int(x)) for x in f.values))
        )
    return "\n".join(out) + "\n"
