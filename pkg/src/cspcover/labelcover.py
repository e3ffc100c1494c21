"""Bipartite projection games: satisfaction, coverability, smoothness, and
deterministic instance synthesis.

An instance has left vertices U with labels in [L], right vertices V with
labels in [R], and edges carrying projections pi: [R] -> [L]. An edge (u, v)
is satisfied by a labeling when pi(label(v)) == label(u). A c-cover is a list
of c labelings such that every left vertex has at least one labeling
satisfying all of its incident edges simultaneously.
"""

import itertools
import random
from fractions import Fraction

from .errors import PreconditionError, as_budget


class Edge:
    __slots__ = ("u", "v", "proj")

    def __init__(self, u, v, proj):
        object.__setattr__(self, "u", int(u))
        object.__setattr__(self, "v", int(v))
        object.__setattr__(self, "proj", tuple(int(x) for x in proj))

    def __setattr__(self, name, value):
        raise AttributeError("Edge is immutable")

    def __repr__(self):
        return "Edge(u=%d, v=%d, proj=%r)" % (self.u, self.v, self.proj)


class LabelCoverInstance:
    """Bipartite multigraph with per-edge projections [R] -> [L]."""

    __slots__ = ("nu", "nv", "nlabels_u", "nlabels_v", "edges", "unique",
                 "_adj_u", "_adj_v")

    def __init__(self, nu, nv, nlabels_u, nlabels_v, edges, unique=False):
        nu, nv = int(nu), int(nv)
        nlabels_u, nlabels_v = int(nlabels_u), int(nlabels_v)
        if nu < 1 or nv < 1:
            raise PreconditionError("both sides must be nonempty")
        if nlabels_u < 1 or nlabels_v < 1:
            raise PreconditionError("label sets must be nonempty")
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
        for e in edges:
            if e.u < 0 or e.u >= nu or e.v < 0 or e.v >= nv:
                raise PreconditionError("edge %r references unknown vertices" % (e,))
            if len(e.proj) != nlabels_v:
                raise PreconditionError("edge %r projection has wrong length" % (e,))
            if any(x < 0 or x >= nlabels_u for x in e.proj):
                raise PreconditionError("edge %r projection leaves [L]" % (e,))
        unique = bool(unique)
        if unique:
            if nlabels_u != nlabels_v:
                raise PreconditionError("unique instances need L == R")
            for e in edges:
                if len(set(e.proj)) != nlabels_v:
                    raise PreconditionError("edge %r projection is not a bijection" % (e,))
        adj_u = [[] for _ in range(nu)]
        adj_v = [[] for _ in range(nv)]
        for i, e in enumerate(edges):
            adj_u[e.u].append(i)
            adj_v[e.v].append(i)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "nv", nv)
        object.__setattr__(self, "nlabels_u", nlabels_u)
        object.__setattr__(self, "nlabels_v", nlabels_v)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "unique", unique)
        object.__setattr__(self, "_adj_u", tuple(tuple(a) for a in adj_u))
        object.__setattr__(self, "_adj_v", tuple(tuple(a) for a in adj_v))

    def __setattr__(self, name, value):
        raise AttributeError("LabelCoverInstance is immutable")

    def edges_at_u(self, u):
        return self._adj_u[u]

    def edges_at_v(self, v):
        return self._adj_v[v]

    def __repr__(self):
        return "LabelCoverInstance(%d+%d vertices, %d edges, L=%d, R=%d%s)" % (
            self.nu, self.nv, len(self.edges), self.nlabels_u, self.nlabels_v,
            ", unique" if self.unique else "",
        )


class Labeling:
    """Total label choice: one value per left vertex and per right vertex."""

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        object.__setattr__(self, "left", tuple(int(x) for x in left))
        object.__setattr__(self, "right", tuple(int(x) for x in right))

    def __setattr__(self, name, value):
        raise AttributeError("Labeling is immutable")

    def __eq__(self, other):
        if not isinstance(other, Labeling):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self):
        return hash((self.left, self.right))

    def __repr__(self):
        return "Labeling(left=%r, right=%r)" % (self.left, self.right)


def _check_labeling(g, lab):
    if len(lab.left) != g.nu or len(lab.right) != g.nv:
        raise PreconditionError("labeling does not match the vertex sets")
    if any(x < 0 or x >= g.nlabels_u for x in lab.left):
        raise PreconditionError("left labels outside [L]")
    if any(x < 0 or x >= g.nlabels_v for x in lab.right):
        raise PreconditionError("right labels outside [R]")


def edge_satisfied(g, lab, idx):
    e = g.edges[idx]
    return e.proj[lab.right[e.v]] == lab.left[e.u]


def satisfied_fraction(g, lab):
    """Fraction of edges satisfied, uniform over the edge multiset."""
    _check_labeling(g, lab)
    if not g.edges:
        raise PreconditionError("instance has no edges")
    hits = sum(1 for i in range(len(g.edges)) if edge_satisfied(g, lab, i))
    return Fraction(hits, len(g.edges))


def max_satisfiable(g, budget=None):
    """Exact maximum satisfied fraction with one witness labeling.

    Enumerates left labelings; each right vertex then greedily takes a best
    label, which is optimal because right labels only see their own edges.
    """
    budget = as_budget(budget)
    if not g.edges:
        raise PreconditionError("instance has no edges")
    best = (-1, None)
    for left in itertools.product(range(g.nlabels_u), repeat=g.nu):
        budget.spend(g.nv)
        right = []
        hits = 0
        for v in range(g.nv):
            edge_ids = g.edges_at_v(v)
            best_label, best_hits = 0, -1
            for r in range(g.nlabels_v):
                h = sum(1 for i in edge_ids if g.edges[i].proj[r] == left[g.edges[i].u])
                if h > best_hits:
                    best_label, best_hits = r, h
            right.append(best_label)
            hits += best_hits
        if hits > best[0]:
            best = (hits, Labeling(left, right))
    return Fraction(best[0], len(g.edges)), best[1]


def _u_classes_covers(g, classes, budget):
    """One labeling per class covering that class's left vertices, or None.

    A class is a set of left vertices that one labeling must serve: every
    vertex in it needs all of its incident edges satisfied.
    """
    out = []
    for cls in classes:
        found = None
        # Left labels only matter on cls; right labels must agree with every
        # class edge at their vertex. Enumerate left choices on cls.
        cls = sorted(cls)
        for choice in itertools.product(range(g.nlabels_u), repeat=len(cls)):
            budget.spend()
            want = dict(zip(cls, choice))
            right = [None] * g.nv
            ok = True
            for v in range(g.nv):
                edge_ids = [
                    i for i in g.edges_at_v(v) if g.edges[i].u in want
                ]
                if not edge_ids:
                    right[v] = 0
                    continue
                picked = None
                for r in range(g.nlabels_v):
                    budget.spend()
                    if all(g.edges[i].proj[r] == want[g.edges[i].u] for i in edge_ids):
                        picked = r
                        break
                if picked is None:
                    ok = False
                    break
                right[v] = picked
            if ok:
                left = [0] * g.nu
                for u, val in want.items():
                    left[u] = val
                found = Labeling(left, right)
                break
        if found is None:
            return None
        out.append(found)
    return out


def is_c_coverable(g, c, budget=None):
    """c labelings such that each left vertex has one satisfying all its
    edges, or None if no such family exists. Exact.
    """
    budget = as_budget(budget)
    if c < 1:
        raise PreconditionError("c must be at least 1")
    isolated = [u for u in range(g.nu) if not g.edges_at_u(u)]
    active = [u for u in range(g.nu) if g.edges_at_u(u)]
    # Partition active left vertices into at most c classes (restricted-growth
    # strings avoid symmetric repeats), then check each class independently.
    def partitions(items, maxc):
        n = len(items)
        rgs = [0] * n

        def rec(i, used):
            if i == n:
                groups = [[] for _ in range(used)]
                for j, gidx in enumerate(rgs):
                    groups[gidx].append(items[j])
                yield groups
                return
            for v in range(min(used + 1, maxc)):
                rgs[i] = v
                yield from rec(i + 1, max(used, v + 1))

        if n == 0:
            yield []
            return
        yield from rec(0, 0)

    for groups in partitions(active, c):
        labelings = _u_classes_covers(g, groups, budget)
        if labelings is not None:
            if isolated and not labelings:
                labelings = [Labeling([0] * g.nu, [0] * g.nv)]
            while len(labelings) < c:
                labelings.append(labelings[-1] if labelings else
                                 Labeling([0] * g.nu, [0] * g.nv))
            return labelings
    return None


def smoothness_profile(g, v, alpha):
    """Average over incident edges at right vertex v of 1/|proj(alpha)|.

    alpha is a nonempty set of right labels; proj(alpha) is its image under
    the edge projection. Exact rational result.
    """
    alpha = sorted(set(int(x) for x in alpha))
    if not alpha:
        raise PreconditionError("alpha must be nonempty")
    if any(x < 0 or x >= g.nlabels_v for x in alpha):
        raise PreconditionError("alpha leaves [R]")
    if v < 0 or v >= g.nv:
        raise PreconditionError("vertex %d out of range" % v)
    edge_ids = g.edges_at_v(v)
    if not edge_ids:
        raise PreconditionError("vertex %d is isolated" % v)
    total = Fraction(0)
    for i in edge_ids:
        image = {g.edges[i].proj[x] for x in alpha}
        total += Fraction(1, len(image))
    return total / len(edge_ids)


def _rand_permutation(rng, n):
    p = list(range(n))
    rng.shuffle(p)
    return p


def synthesize(kind, *, nu, nv, nlabels_u, nlabels_v, degree=None, seed,
               retries=50):
    """Deterministic (seeded) construction of benchmark instances.

    Kinds:
      unique-consistent    bijective projections consistent with one hidden
                           labeling; 1-coverable by construction.
      unique-2-cover       bijective projections consistent with a hidden
                           2-labeling family split across a left partition;
                           verified not 1-coverable (retries then error).
      dto1-random          nlabels_v == d * nlabels_u with all fibers of size
                           d, projections random.
      dto1-contradictory   as dto1-random, retried until no labeling
                           satisfies every edge.
    """
    rng = random.Random(seed)
    nu, nv = int(nu), int(nv)
    L, R = int(nlabels_u), int(nlabels_v)
    if nu < 1 or nv < 1 or L < 1 or R < 1:
        raise PreconditionError("sizes must be positive")

    def edge_endpoints():
        if degree is None:
            return [(u, v) for u in range(nu) for v in range(nv)]
        d = int(degree)
        if d < 1:
            raise PreconditionError("degree must be positive")
        out = []
        for u in range(nu):
            for s in range(d):
                out.append((u, (u * d + s) % nv))
        return out

    if kind == "unique-consistent":
        if L != R:
            raise PreconditionError("unique instances need L == R")
        hidden_left = [rng.randrange(L) for _ in range(nu)]
        hidden_right = [rng.randrange(R) for _ in range(nv)]
        edges = []
        for (u, v) in edge_endpoints():
            proj = _rand_permutation(rng, R)
            # Swap to force proj[hidden_right[v]] == hidden_left[u].
            j = proj.index(hidden_left[u])
            proj[j], proj[hidden_right[v]] = proj[hidden_right[v]], proj[j]
            edges.append(Edge(u, v, proj))
        return LabelCoverInstance(nu, nv, L, R, edges, unique=True)

    if kind == "unique-2-cover":
        if L != R:
            raise PreconditionError("unique instances need L == R")
        if nu < 2:
            raise PreconditionError("need at least two left vertices")
        for _ in range(int(retries)):
            half = nu // 2
            hidden = []
            for _side in range(2):
                hidden.append((
                    [rng.randrange(L) for _ in range(nu)],
                    [rng.randrange(R) for _ in range(nv)],
                ))
            edges = []
            for (u, v) in edge_endpoints():
                side = 0 if u < half else 1
                hl, hr = hidden[side]
                proj = _rand_permutation(rng, R)
                j = proj.index(hl[u])
                proj[j], proj[hr[v]] = proj[hr[v]], proj[j]
                edges.append(Edge(u, v, proj))
            g = LabelCoverInstance(nu, nv, L, R, edges, unique=True)
            if is_c_coverable(g, 1) is None and is_c_coverable(g, 2) is not None:
                return g
        raise PreconditionError(
            "could not synthesize a 2-but-not-1 coverable instance; "
            "try other sizes or seeds"
        )

    if kind in ("dto1-random", "dto1-contradictory"):
        if R % L != 0:
            raise PreconditionError("d-to-1 instances need L | R")
        d = R // L

        def random_dto1():
            slots = list(range(R))
            rng.shuffle(slots)
            proj = [0] * R
            for i in range(L):
                for s in slots[i * d:(i + 1) * d]:
                    proj[s] = i
            return proj

        attempts = int(retries) if kind == "dto1-contradictory" else 1
        for _ in range(attempts):
            edges = [Edge(u, v, random_dto1()) for (u, v) in edge_endpoints()]
            g = LabelCoverInstance(nu, nv, L, R, edges, unique=False)
            if kind == "dto1-random":
                return g
            frac, _ = max_satisfiable(g)
            if frac < 1:
                return g
        raise PreconditionError(
            "could not synthesize a contradictory instance; "
            "try other sizes or seeds"
        )

    raise PreconditionError("unknown synthesis kind %r" % (kind,))
