"""Weighted P-CSP instances, cover checking, exact covering number, and the
covering/coloring translations.

A constraint is (variable indices, literal vector, weight). An assignment f
covers a constraint when (f(v_1), ..., f(v_k)) + literals lands in the
predicate, coordinatewise mod q. Covering semantics ignore weights (every
positive-weight constraint must be hit); fraction semantics use weights.
"""

from fractions import Fraction

from .errors import BudgetExceededError, PreconditionError, as_budget
from .predicate import add_tuples, constant_tuple, is_odd, is_shift_closed


class Constraint:
    __slots__ = ("vars", "literals", "weight")

    def __init__(self, vars, literals, weight):
        object.__setattr__(self, "vars", tuple(int(v) for v in vars))
        object.__setattr__(self, "literals", tuple(int(x) for x in literals))
        object.__setattr__(self, "weight", Fraction(weight))

    def __setattr__(self, name, value):
        raise AttributeError("Constraint is immutable")

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.literals == other.literals
            and self.weight == other.weight
        )

    def __hash__(self):
        return hash((self.vars, self.literals, self.weight))

    def __repr__(self):
        return "Constraint(%r, %r, %s)" % (self.vars, self.literals, self.weight)


class CspInstance:
    """Predicate, variables, and weighted constraints with literal vectors.

    `variables` is a sequence of hashable labels; constraints reference them by
    index. Duplicate (vars, literals) pairs are merged by summing weights.
    """

    __slots__ = ("predicate", "variables", "constraints", "_index")

    def __init__(self, predicate, variables, constraints):
        variables = tuple(variables)
        index = {}
        for i, v in enumerate(variables):
            if v in index:
                raise PreconditionError("duplicate variable label %r" % (v,))
            index[v] = i
        merged = {}
        order = []
        for c in constraints:
            if not isinstance(c, Constraint):
                c = Constraint(*c)
            if len(c.vars) != predicate.k or len(c.literals) != predicate.k:
                raise PreconditionError(
                    "constraint %r does not match arity %d" % (c, predicate.k)
                )
            if any(v < 0 or v >= len(variables) for v in c.vars):
                raise PreconditionError("constraint %r references unknown variables" % (c,))
            if any(x < 0 or x >= predicate.q for x in c.literals):
                raise PreconditionError("constraint %r has literals outside [q]" % (c,))
            if c.weight < 0:
                raise PreconditionError("constraint weights must be nonnegative")
            key = (c.vars, c.literals)
            if key in merged:
                merged[key] = merged[key] + c.weight
            else:
                merged[key] = c.weight
                order.append(key)
        cons = tuple(Constraint(v, l, merged[(v, l)]) for v, l in order)
        if cons and sum(c.weight for c in cons) == 0:
            raise PreconditionError("total constraint weight must be positive")
        object.__setattr__(self, "predicate", predicate)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("CspInstance is immutable")

    @property
    def nvars(self):
        return len(self.variables)

    def var_index(self, label):
        return self._index[label]

    def total_weight(self):
        return sum((c.weight for c in self.constraints), Fraction(0))

    def __repr__(self):
        return "CspInstance(q=%d, k=%d, %d vars, %d constraints)" % (
            self.predicate.q,
            self.predicate.k,
            self.nvars,
            len(self.constraints),
        )


class Assignment:
    """A total map from variable index to [q], stored as a value tuple."""

    __slots__ = ("values",)

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(int(x) for x in values))

    def __setattr__(self, name, value):
        raise AttributeError("Assignment is immutable")

    @classmethod
    def from_map(cls, mapping, nvars):
        missing = [i for i in range(nvars) if i not in mapping]
        if missing:
            raise PreconditionError("assignment is partial; missing %r" % (missing,))
        return cls(mapping[i] for i in range(nvars))

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "Assignment(%r)" % (self.values,)


class CoverSet:
    """A nonempty sequence of assignments over one variable set."""

    __slots__ = ("assignments",)

    def __init__(self, assignments):
        assignments = tuple(
            a if isinstance(a, Assignment) else Assignment(a) for a in assignments
        )
        if not assignments:
            raise PreconditionError("cover set must be nonempty")
        n = len(assignments[0].values)
        if any(len(a.values) != n for a in assignments):
            raise PreconditionError("assignments span different variable sets")
        object.__setattr__(self, "assignments", assignments)

    def __setattr__(self, name, value):
        raise AttributeError("CoverSet is immutable")

    def __len__(self):
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)


def _check_assignment(a, inst):
    if len(a.values) != inst.nvars:
        raise PreconditionError(
            "assignment has %d values for %d variables" % (len(a.values), inst.nvars)
        )
    q = inst.predicate.q
    if any(x < 0 or x >= q for x in a.values):
        raise PreconditionError("assignment values outside [%d]" % q)


def covers_constraint(a, inst, idx):
    """True iff assignment a satisfies constraint idx of inst."""
    _check_assignment(a, inst)
    if idx < 0 or idx >= len(inst.constraints):
        raise PreconditionError("constraint index %d out of range" % idx)
    c = inst.constraints[idx]
    q = inst.predicate.q
    vals = tuple(a.values[v] for v in c.vars)
    return add_tuples(vals, c.literals, q) in inst.predicate


def covered_fraction(cs, inst):
    """Weight fraction of constraints covered by at least one assignment in cs.

    An empty constraint list counts as fully covered.
    """
    if not inst.constraints:
        return Fraction(1)
    for a in cs:
        _check_assignment(a, inst)
    total = inst.total_weight()
    hit = Fraction(0)
    q = inst.predicate.q
    pred = inst.predicate
    for c in inst.constraints:
        for a in cs:
            vals = tuple(a.values[v] for v in c.vars)
            if add_tuples(vals, c.literals, q) in pred:
                hit += c.weight
                break
    return hit / total


def translate_assignment(a, b, q):
    """The assignment a + b-bar (every value shifted by b mod q)."""
    return Assignment((x + b) % q for x in a.values)


def trivial_odd_cover(inst, a):
    """The q translates of a; a valid cover whenever the predicate is odd."""
    if not is_odd(inst.predicate):
        raise PreconditionError("predicate is not odd")
    _check_assignment(a, inst)
    q = inst.predicate.q
    return CoverSet(translate_assignment(a, b, q) for b in range(q))


def _coverage_masks(inst, budget):
    """Deduplicated (mask, assignment) pairs over positive-weight constraints.

    Fixes the leading variable to 0 when the predicate is closed under global
    translation; translates then produce identical masks, so nothing is lost.
    """
    q = inst.predicate.q
    n = inst.nvars
    pred = inst.predicate
    cons = [c for c in inst.constraints if c.weight > 0]
    seen = {}
    order = []
    first_range = range(1) if (n > 0 and is_shift_closed(pred)) else range(q)
    stack_values = [0] * n

    def emit(values):
        budget.spend(len(cons))
        mask = 0
        for j, c in enumerate(cons):
            vals = tuple(values[v] for v in c.vars)
            if add_tuples(vals, c.literals, q) in pred:
                mask |= 1 << j
        if mask and mask not in seen:
            seen[mask] = Assignment(values)
            order.append(mask)

    def rec(pos):
        if pos == n:
            emit(stack_values)
            return
        rng = first_range if pos == 0 else range(q)
        for val in rng:
            stack_values[pos] = val
            rec(pos + 1)

    if n == 0:
        return [], cons
    rec(0)
    # Drop masks dominated by a superset mask; lossless for minimum covers.
    masks = sorted(order, key=lambda m: -bin(m).count("1"))
    kept = []
    for m in masks:
        if not any((m | k) == k for k in kept):
            kept.append(m)
    return [(m, seen[m]) for m in kept], cons


def _cover_search(inst, max_c, budget):
    """Smallest cover of size <= max_c, or None. Exact."""
    if max_c < 1:
        raise PreconditionError("max_c must be at least 1")
    positive = [c for c in inst.constraints if c.weight > 0]
    if not positive:
        return 0, CoverSet([Assignment([0] * inst.nvars)]) if inst.nvars else None
    pairs, cons = _coverage_masks(inst, budget)
    full_mask = (1 << len(cons)) - 1
    union_all = 0
    for m, _ in pairs:
        union_all |= m
    if union_all != full_mask:
        return None, None
    masks = [m for m, _ in pairs]

    def search(covered, chosen, remaining):
        budget.spend()
        if covered == full_mask:
            return list(chosen)
        if remaining == 0:
            return None
        # Branch on the uncovered constraint with the fewest candidate masks.
        uncovered = (~covered) & full_mask
        bit = uncovered & (-uncovered)
        best_bit, best_opts = None, None
        scan = uncovered
        while scan:
            b = scan & (-scan)
            opts = [m for m in masks if m & b]
            if best_opts is None or len(opts) < len(best_opts):
                best_bit, best_opts = b, opts
                if len(opts) <= 1:
                    break
            scan ^= b
        for m in best_opts:
            chosen.append(m)
            found = search(covered | m, chosen, remaining - 1)
            chosen.pop()
            if found is not None:
                return found
        return None

    by_mask = dict(pairs)
    for c in range(1, max_c + 1):
        found = search(0, [], c)
        if found is not None:
            return c, CoverSet(by_mask[m] for m in found)
    return None, None


def covering_number(inst, max_c, budget=None):
    """Smallest c <= max_c with a covering c-set of assignments, or None.

    Exact enumeration with pruning; empty instances have covering number 0.
    Raises BudgetExceededError (distinct from returning None) past the budget.
    """
    c, _ = _cover_search(inst, max_c, as_budget(budget))
    return c


def find_cover(inst, max_c, budget=None):
    """A witness CoverSet of minimum size <= max_c, or None."""
    c, cover = _cover_search(inst, max_c, as_budget(budget))
    if c == 0 or c is None:
        return cover
    return cover


def max_independent_set(inst, budget=None):
    """Exact maximum variable subset containing no positive-weight constraint.

    Returns (size, witness tuple of variable indices); deterministic witness.
    """
    budget = as_budget(budget)
    n = inst.nvars
    cons = []
    for c in inst.constraints:
        if c.weight > 0:
            s = frozenset(c.vars)
            cons.append(s)
    cons = sorted(set(cons), key=lambda s: sorted(s))
    # Constraints touching each variable, for incremental violation counts.
    touching = [[] for _ in range(n)]
    for j, s in enumerate(cons):
        for v in s:
            touching[v].append(j)
    need = [len(s) for s in cons]
    inside = [0] * len(cons)
    best = {"size": -1, "set": ()}
    chosen = []

    def rec(v):
        budget.spend()
        if len(chosen) + (n - v) <= best["size"]:
            return
        if v == n:
            if len(chosen) > best["size"]:
                best["size"] = len(chosen)
                best["set"] = tuple(chosen)
            return
        blocked = any(inside[j] == need[j] - 1 for j in touching[v] if need[j] >= 1)
        fully = any(need[j] == 1 for j in touching[v])
        if not blocked and not fully:
            chosen.append(v)
            for j in touching[v]:
                inside[j] += 1
            rec(v + 1)
            for j in touching[v]:
                inside[j] -= 1
            chosen.pop()
        rec(v + 1)

    rec(0)
    return best["size"], best["set"]


def cover_to_coloring(cs, inst):
    """Color each variable by its tuple of assigned values across the cover.

    Needs a NAE-subset predicate, all-zero literals, and a genuine cover; the
    result is a proper coloring of the constraint (hyper)graph.
    """
    from .predicate import nae

    pred = inst.predicate
    if pred.k < 2 or not pred.issubset(nae(pred.q, pred.k)):
        raise PreconditionError("predicate is not contained in NAE")
    for c in inst.constraints:
        if any(x != 0 for x in c.literals):
            raise PreconditionError("instance has nonzero literals")
    for a in cs:
        _check_assignment(a, inst)
    q = pred.q
    for idx, c in enumerate(inst.constraints):
        if c.weight <= 0:
            continue
        if not any(
            add_tuples(tuple(a.values[v] for v in c.vars), c.literals, q) in pred
            for a in cs
        ):
            raise PreconditionError("cover set does not cover constraint %d" % idx)
    coloring = {
        i: tuple(a.values[i] for a in cs) for i in range(inst.nvars)
    }
    for c in inst.constraints:
        if c.weight <= 0:
            continue
        colors = {coloring[v] for v in c.vars}
        if len(colors) == 1 and len(set(c.vars)) == len(c.vars):
            raise PreconditionError("coloring left a constraint monochromatic")
    return coloring


def weaken_predicate(inst, superset):
    """Same constraints and literals, predicate replaced by a superset."""
    if not inst.predicate.issubset(superset):
        raise PreconditionError("replacement predicate is not a superset")
    return CspInstance(superset, inst.variables, inst.constraints)


def apply_literal_shift(inst, h):
    """Add h to every literal vector mod q; the predicate stays untouched.

    Pairing with shift(predicate, -h) preserves covering numbers; that pairing
    is the caller's reduction step, not done here.
    """
    q = inst.predicate.q
    h = tuple(int(x) for x in h)
    if len(h) != inst.predicate.k or any(x < 0 or x >= q for x in h):
        raise PreconditionError("shift vector %r is not in [q]^k" % (h,))
    return CspInstance(
        inst.predicate,
        inst.variables,
        (
            Constraint(c.vars, add_tuples(c.literals, h, q), c.weight)
            for c in inst.constraints
        ),
    )
