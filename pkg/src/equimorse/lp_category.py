"""Loopfree poset-enriched categories.

Objects and morphisms are integer ids. ``compose(f, g)`` is the composite
that runs ``f`` first, i.e. ``g . f``. Each hom-set carries a partial order
``f => g`` stored as its reflexive, transitive closure.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .errors import BudgetExceeded, InputError, Report

NERVE_BOUND = 10**6
ISO_BUDGET = 200_000


class LPCategory:
    def __init__(self, objects, mors, identities, comp, le=(), name=""):
        self.name = name
        self.objects = list(objects)
        self.src = [m[0] for m in mors]
        self.dst = [m[1] for m in mors]
        self.mor_labels = [m[2] if len(m) > 2 else str(i) for i, m in enumerate(mors)]
        self.ident = list(identities)
        self._ident_set = set(self.ident)
        self.hom = defaultdict(list)
        for f, (x, y) in enumerate(zip(self.src, self.dst)):
            self.hom[x, y].append(f)
        self.hom = {k: tuple(v) for k, v in self.hom.items()}
        self.out = defaultdict(list)
        self.inn = defaultdict(list)
        for x, y in self.hom:
            self.out[x].append(y)
            self.inn[y].append(x)
        self.comp = dict(comp)
        self.raw_le = [(a, b) for a, b in le if a != b]
        self._close_order()

    def _close_order(self):
        up = {f: {f} for f in range(self.n_mor)}
        for a, b in self.raw_le:
            up[a].add(b)
        # transitive closure inside each hom-set
        for fs in self.hom.values():
            if len(fs) < 2:
                continue
            changed = True
            while changed:
                changed = False
                for f in fs:
                    ext = set()
                    for g in up[f]:
                        ext |= up[g]
                    if not ext <= up[f]:
                        up[f] |= ext
                        changed = True
        self.up = {f: frozenset(s) for f, s in up.items()}

    @property
    def n_obj(self):
        return len(self.objects)

    @property
    def n_mor(self):
        return len(self.src)

    def is_identity(self, f):
        return f in self._ident_set

    def leq(self, f, g):
        """True when ``f => g``."""
        return g in self.up[f]

    def compose(self, f, g):
        if f in self._ident_set:
            return g
        if g in self._ident_set:
            return f
        return self.comp[f, g]

    def homset(self, x, y):
        return self.hom.get((x, y), ())

    def non_identity(self):
        return [f for f in range(self.n_mor) if f not in self._ident_set]

    def composable_pairs(self):
        for f in range(self.n_mor):
            for z in self.out[self.dst[f]]:
                for g in self.hom[self.dst[f], z]:
                    yield f, g

    def hom_shape(self, x, y):
        """Isomorphism-invariant summary of one hom-poset."""
        fs = self.homset(x, y)
        return tuple(sorted((len(self.up[f]), sum(1 for g in fs if f in self.up[g])) for f in fs))

    def __repr__(self):
        return f"LPCategory({self.name!r}, {self.n_obj} objects, {self.n_mor} morphisms)"


class CategoryBuilder:
    """Incremental construction helper; identities are added per object."""

    def __init__(self, name=""):
        self.name = name
        self.objects = []
        self.mors = []
        self.ident = []
        self.comp = {}
        self.le = []

    def add_object(self, label):
        x = len(self.objects)
        self.objects.append(label)
        self.ident.append(self.add_mor(x, x, "id"))
        return x

    def add_mor(self, x, y, label=""):
        self.mors.append((x, y, label))
        return len(self.mors) - 1

    def build(self):
        return LPCategory(self.objects, self.mors, self.ident, self.comp, self.le, self.name)


def validate_lp(C, check_assoc=True):
    rep = Report("validate_lp")
    for x in range(C.n_obj):
        i = C.ident[x]
        if C.src[i] != x or C.dst[i] != x:
            rep.add("identity", object=x)
        loops = C.homset(x, x)
        if tuple(loops) != (i,):
            rep.add("loopfree", object=x, endomorphisms=[f for f in loops if f != i])
    for (x, y) in C.hom:
        if x < y and (y, x) in C.hom:
            rep.add("two_cycle", objects=(x, y))
    for f, g in C.composable_pairs():
        if C.is_identity(f) or C.is_identity(g):
            continue
        h = C.comp.get((f, g))
        if h is None:
            rep.add("composition_missing", pair=(f, g))
        elif C.src[h] != C.src[f] or C.dst[h] != C.dst[g]:
            rep.add("composition_typing", pair=(f, g), result=h)
    if not rep.ok:
        return rep
    for (f, g), h in C.comp.items():
        if C.dst[f] != C.src[g]:
            rep.add("composition_typing", pair=(f, g), result=h)
    if check_assoc:
        for f, g in C.composable_pairs():
            gf = C.compose(f, g)
            for w in C.out[C.dst[g]]:
                for h in C.hom[C.dst[g], w]:
                    if C.compose(gf, h) != C.compose(f, C.compose(g, h)):
                        rep.add("associativity", triple=(f, g, h))
    for a, b in C.raw_le:
        if (C.src[a], C.dst[a]) != (C.src[b], C.dst[b]):
            rep.add("order_typing", pair=(a, b))
    for f in range(C.n_mor):
        for g in C.up[f]:
            if g != f and f in C.up[g]:
                if f < g:
                    rep.add("antisymmetry", pair=(f, g))
    # monotonicity, one variable at a time (transitivity covers the rest)
    for f0 in range(C.n_mor):
        for f1 in C.up[f0]:
            if f1 == f0:
                continue
            y = C.dst[f0]
            for z in C.out[y]:
                for g in C.hom[y, z]:
                    if not C.leq(C.compose(f0, g), C.compose(f1, g)):
                        rep.add("monotone", left=(f0, f1), right=g)
            x = C.src[f0]
            for w in C.inn[x]:
                for e in C.hom[w, x]:
                    if not C.leq(C.compose(e, f0), C.compose(e, f1)):
                        rep.add("monotone", left=e, right=(f0, f1))
    return rep


@dataclass
class LPFunctor:
    obj_map: list
    mor_map: list

    def inverse(self):
        om = [0] * len(self.obj_map)
        for a, b in enumerate(self.obj_map):
            om[b] = a
        mm = [0] * len(self.mor_map)
        for a, b in enumerate(self.mor_map):
            mm[b] = a
        return LPFunctor(om, mm)

    def then(self, other):
        return LPFunctor([other.obj_map[x] for x in self.obj_map], [other.mor_map[f] for f in self.mor_map])


def identity_functor(C):
    return LPFunctor(list(range(C.n_obj)), list(range(C.n_mor)))


def check_lp_functor(F, C, D):
    rep = Report("check_lp_functor")
    if len(F.obj_map) != C.n_obj or len(F.mor_map) != C.n_mor:
        rep.add("not_total")
        return rep
    for f in range(C.n_mor):
        g = F.mor_map[f]
        if D.src[g] != F.obj_map[C.src[f]] or D.dst[g] != F.obj_map[C.dst[f]]:
            rep.add("typing", morphism=f)
    if not rep.ok:
        return rep
    for x in range(C.n_obj):
        if F.mor_map[C.ident[x]] != D.ident[F.obj_map[x]]:
            rep.add("identity", object=x)
    for f, g in C.composable_pairs():
        if F.mor_map[C.compose(f, g)] != D.compose(F.mor_map[f], F.mor_map[g]):
            rep.add("composition", pair=(f, g))
    for f in range(C.n_mor):
        for g in C.up[f]:
            if not D.leq(F.mor_map[f], F.mor_map[g]):
                rep.add("order", pair=(f, g))
    return rep


def check_isomorphism(F, C, D):
    rep = check_lp_functor(F, C, D)
    if not rep.ok:
        return rep
    if sorted(F.obj_map) != list(range(D.n_obj)):
        rep.add("objects_not_bijective")
    if sorted(F.mor_map) != list(range(D.n_mor)):
        rep.add("morphisms_not_bijective")
    if rep.ok:
        rep.extend(check_lp_functor(F.inverse(), D, C))
    return rep


# --- isomorphism search -------------------------------------------------

@dataclass
class IsoResult:
    status: str  # "iso", "none" or "inconclusive"
    functor: LPFunctor = None
    nodes: int = 0

    @property
    def found(self):
        return self.status == "iso"


class _Budget:
    def __init__(self, n):
        self.left = n
        self.used = 0

    def tick(self):
        self.used += 1
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("isomorphism search budget exhausted")


def _object_signatures(C, rounds=2):
    sig = {}
    for x in range(C.n_obj):
        outs = sorted(C.hom_shape(x, y) for y in C.out[x] if y != x)
        ins = sorted(C.hom_shape(w, x) for w in C.inn[x] if w != x)
        sig[x] = hash((tuple(outs), tuple(ins)))
    for _ in range(rounds):
        sig = {
            x: hash((sig[x],
                     tuple(sorted((sig[y], C.hom_shape(x, y)) for y in C.out[x] if y != x)),
                     tuple(sorted((sig[w], C.hom_shape(w, x)) for w in C.inn[x] if w != x))))
            for x in range(C.n_obj)
        }
    return sig


def _mor_signature(C, f):
    fs = C.homset(C.src[f], C.dst[f])
    above = len(C.up[f])
    below = sum(1 for g in fs if f in C.up[g])
    return (above, below)


def find_isomorphism(C, D, hints=None, budget=ISO_BUDGET, actions=None, mor_actions=None):
    """Search for an LP isomorphism C -> D.

    ``hints`` is a partial object map. ``actions`` optionally gives a pair of
    object-action tables ``(actC, actD)`` indexed ``[g][x]``; the object map
    is then required to be equivariant. ``mor_actions`` does the same for
    morphisms.
    """
    if C.n_obj != D.n_obj or C.n_mor != D.n_mor:
        return IsoResult("none")
    if sorted(len(v) for v in C.hom.values()) != sorted(len(v) for v in D.hom.values()):
        return IsoResult("none")
    sc, sd = _object_signatures(C), _object_signatures(D)
    if sorted(sc.values()) != sorted(sd.values()):
        return IsoResult("none")
    by_sig = defaultdict(list)
    for y in range(D.n_obj):
        by_sig[sd[y]].append(y)
    bud = _Budget(budget)
    order = _search_order(C, sc, by_sig)
    try:
        for om in _object_maps(C, D, order, sc, by_sig, hints or {}, bud, actions):
            F = _morphism_map(C, D, om, bud, mor_actions)
            if F is not None:
                return IsoResult("iso", F, bud.used)
    except BudgetExceeded:
        return IsoResult("inconclusive", None, bud.used)
    return IsoResult("none", None, bud.used)


def _search_order(C, sc, by_sig):
    # most constrained first, then grow along hom-connectivity
    remaining = set(range(C.n_obj))
    order = []
    while remaining:
        start = min(remaining, key=lambda x: (len(by_sig[sc[x]]), x))
        stack = [start]
        while stack:
            x = stack.pop()
            if x not in remaining:
                continue
            remaining.discard(x)
            order.append(x)
            nbrs = [y for y in list(C.out[x]) + list(C.inn[x]) if y in remaining]
            nbrs.sort(key=lambda y: (-len(by_sig[sc[y]]), -y))
            stack.extend(nbrs)
    return order


def _object_maps(C, D, order, sc, by_sig, hints, bud, actions):
    n = C.n_obj
    om = [-1] * n
    used = [False] * D.n_obj

    def assign(x, y, trail):
        if om[x] == y:
            return True
        if om[x] != -1 or used[y] or sc[x] != sd_cache[y]:
            return False
        om[x] = y
        used[y] = True
        trail.append(x)
        return True

    sd_cache = _object_signatures(D)

    def consistent(x):
        y = om[x]
        for x2 in C.out[x]:
            if om[x2] != -1 and C.hom_shape(x, x2) != D.hom_shape(y, om[x2]):
                return False
        for x2 in C.inn[x]:
            if om[x2] != -1 and C.hom_shape(x2, x) != D.hom_shape(om[x2], y):
                return False
        for y2 in D.out[y]:
            if y2 != y and y2 in pre and (x, pre[y2]) not in C.hom:
                return False
        for y2 in D.inn[y]:
            if y2 != y and y2 in pre and (pre[y2], x) not in C.hom:
                return False
        return True

    pre = {}

    def undo(trail):
        for x in trail:
            del pre[om[x]]
            used[om[x]] = False
            om[x] = -1

    def place(x, y):
        trail = []
        todo = [(x, y)]
        while todo:
            a, b = todo.pop()
            if om[a] == b:
                continue
            if not assign(a, b, trail):
                undo(trail)
                return None
            pre[b] = a
            if actions is not None:
                actC, actD = actions
                for g in range(len(actC)):
                    todo.append((actC[g][a], actD[g][b]))
        for a in trail:
            if not consistent(a):
                undo(trail)
                return None
        return trail

    # hints first
    base_trail = []
    for x, y in sorted(hints.items()):
        t = place(x, y)
        if t is None:
            return
        base_trail.extend(t)

    def rec(i):
        while i < n and om[order[i]] != -1:
            i += 1
        if i == n:
            yield list(om)
            return
        x = order[i]
        for y in by_sig[sc[x]]:
            if used[y]:
                continue
            bud.tick()
            t = place(x, y)
            if t is None:
                continue
            yield from rec(i + 1)
            undo(t)

    yield from rec(0)


def _height_order(C, om):
    # hom-sets ordered so that factors come before composites
    depth = {}

    def longest(x):
        if x in depth:
            return depth[x]
        best = 0
        for y in C.out[x]:
            if y != x:
                best = max(best, 1 + longest(y))
        depth[x] = best
        return best

    keys = [k for k in C.hom if k[0] != k[1]]
    for x in range(C.n_obj):
        longest(x)
    return sorted(keys, key=lambda k: (depth[k[0]] - depth[k[1]], k))


def _morphism_map(C, D, om, bud, mor_actions):
    mm = [-1] * C.n_mor
    for x in range(C.n_obj):
        mm[C.ident[x]] = D.ident[om[x]]
    keys = _height_order(C, om)
    factor = defaultdict(list)
    for f, g in C.composable_pairs():
        if not (C.is_identity(f) or C.is_identity(g)):
            factor[C.compose(f, g)].append((f, g))

    def try_key(k):
        x, y = k
        fs = C.homset(x, y)
        targets = D.homset(om[x], om[y])
        forced = {f: mm[f] for f in fs if mm[f] >= 0}
        for f in fs:
            for a, b in factor[f]:
                if mm[a] >= 0 and mm[b] >= 0:
                    v = D.compose(mm[a], mm[b])
                    if forced.setdefault(f, v) != v:
                        return
        if len(set(forced.values())) != len(forced):
            return
        free = [f for f in fs if f not in forced]
        left = [t for t in targets if t not in set(forced.values())]
        if len(free) != len(left):
            return
        groups = defaultdict(list)
        for t in left:
            groups[_mor_signature(D, t)].append(t)
        for perm in permutations(left):
            bud.tick()
            if any(_mor_signature(C, f) != _mor_signature(D, t) for f, t in zip(free, perm)):
                continue
            assign = dict(forced)
            assign.update(zip(free, perm))
            if all(D.leq(assign[f], assign[g]) == C.leq(f, g) for f in fs for g in fs):
                yield assign

    def place(assign):
        # extend along the group actions; None on a clash
        trail = []
        todo = list(assign.items())
        while todo:
            f, t = todo.pop()
            if mm[f] >= 0:
                if mm[f] != t:
                    for a in trail:
                        mm[a] = -1
                    return None
                continue
            mm[f] = t
            trail.append(f)
            if mor_actions is not None:
                actC, actD = mor_actions
                todo.extend((actC[g][f], actD[g][t]) for g in range(len(actC)))
        return trail

    def rec(i):
        if i == len(keys):
            return True
        for assign in try_key(keys[i]):
            trail = place(assign)
            if trail is None:
                continue
            if rec(i + 1):
                return True
            for f in trail:
                mm[f] = -1
        return False

    if not rec(0):
        return None
    F = LPFunctor(list(om), mm)
    if not check_isomorphism(F, C, D).ok:
        return None
    if mor_actions is not None:
        actC, actD = mor_actions
        for g in range(len(actC)):
            for f in range(C.n_mor):
                if mm[actC[g][f]] != actD[g][mm[f]]:
                    return None
    return F


def full_subcategory(C, objects):
    """Full subcategory on ``objects`` (renumbered in the given order)."""
    keep = list(objects)
    new = {x: i for i, x in enumerate(keep)}
    mors = [f for f in range(C.n_mor) if C.src[f] in new and C.dst[f] in new]
    mnew = {f: i for i, f in enumerate(mors)}
    comp = {(mnew[f], mnew[g]): mnew[h] for (f, g), h in C.comp.items() if f in mnew and g in mnew}
    le = [(mnew[f], mnew[g]) for f in mors for g in C.up[f] if g != f]
    return LPCategory([C.objects[x] for x in keep],
                      [(new[C.src[f]], new[C.dst[f]], C.mor_labels[f]) for f in mors],
                      [mnew[C.ident[x]] for x in keep], comp, le, C.name + "|sub")


# --- geometric nerve -------------------------------------------------------

@dataclass
class NerveSimplicialSet:
    """Nondegenerate simplices per dimension.

    A simplex is ``(objects, mors)`` where ``mors`` lists ``f_ij`` for the
    pairs ``i < j`` in ``combinations`` order. Objects may repeat in
    consecutive positions (joined by an identity) as long as the simplex is
    not a degeneracy; this is how two-cells of hom-posets enter.
    """

    simplices: list = field(default_factory=list)
    exact_below: int = None

    def f_vector(self):
        return tuple(len(s) for s in self.simplices)

    def faces(self, simplex):
        objs, mors = simplex
        n = len(objs)
        where = {p: k for k, p in enumerate(combinations(range(n), 2))}
        out = []
        for j in range(n):
            keep = [i for i in range(n) if i != j]
            out.append((tuple(objs[i] for i in keep),
                        tuple(mors[where[a, b]] for a, b in combinations(keep, 2))))
        return out


def is_degenerate(simplex):
    """True when the simplex is the image of a degeneracy map."""
    objs, mors = simplex
    n = len(objs)
    where = {p: k for k, p in enumerate(combinations(range(n), 2))}
    for i in range(n - 1):
        if objs[i] != objs[i + 1]:
            continue
        if all(mors[where[k, i]] == mors[where[k, i + 1]] for k in range(i)) and \
           all(mors[where[i, k]] == mors[where[i + 1, k]] for k in range(i + 2, n)):
            return True
    return False


def object_chain_length(C):
    """Length of the longest chain of distinct objects joined by morphisms."""
    memo = {}

    def longest(x):
        if x not in memo:
            memo[x] = max((1 + longest(y) for y in C.out[x] if y != x), default=0)
        return memo[x]

    return max((longest(x) for x in range(C.n_obj)), default=0)


def geometric_nerve(C, max_dim=None, bound=NERVE_BOUND):
    """Nondegenerate simplices of the geometric nerve.

    When every hom-set is a singleton the nerve is finite and enumerated
    completely. Otherwise runs of a repeated object give nondegenerate
    simplices in every dimension, so enumeration stops at ``max_dim``
    (default: longest object chain plus two) and ``exact_below`` records the
    degrees whose homology the truncation still computes.
    """
    posetal = all(len(fs) == 1 for fs in C.hom.values())
    if max_dim is None and not posetal:
        max_dim = object_chain_length(C) + 2
    level = [((x,), ()) for x in range(C.n_obj)]
    out = [level]
    total = len(level)
    dim = 0
    while level and (max_dim is None or dim < max_dim):
        nxt = []
        for objs, mors in level:
            n = len(objs)
            where = {p: k for k, p in enumerate(combinations(range(n), 2))}
            last = objs[-1]
            for z in C.out[last]:
                if z == last and posetal:
                    continue
                if (z != last and z in objs) or any((o, z) not in C.hom for o in objs):
                    continue
                for col in _columns(C, objs, mors, where, z):
                    full = {}
                    for (a, b), k in where.items():
                        full[a, b] = mors[k]
                    for i in range(n):
                        full[i, n] = col[i]
                    nxt.append((objs + (z,), tuple(full[p] for p in combinations(range(n + 1), 2))))
                    total += 1
                    if total > bound:
                        raise BudgetExceeded(f"nerve too large (> {bound} simplices)")
        dim += 1
        level = nxt
        out.append([s for s in level if not is_degenerate(s)])
    while len(out) > 1 and not out[-1]:
        out.pop()
    N = NerveSimplicialSet(out)
    N.exact_below = None if posetal else max_dim
    return N


def _columns(C, objs, mors, where, z):
    n = len(objs)
    col = [None] * n

    def rec(i):
        if i < 0:
            yield tuple(col)
            return
        x = objs[i]
        for f in C.hom[x, z]:
            ok = True
            for j in range(i + 1, n):
                if not C.leq(f, C.compose(mors[where[i, j]], col[j])):
                    ok = False
                    break
            if ok:
                col[i] = f
                yield from rec(i - 1)
        col[i] = None

    yield from rec(n - 1)


# --- text dump -------------------------------------------------------------

def dump_category(C):
    lines = []
    for x, lab in enumerate(C.objects):
        lines.append(f"object {x} {lab}")
    for f in range(C.n_mor):
        lines.append(f"mor {f} {C.src[f]} -> {C.dst[f]} {C.mor_labels[f]}")
    for f in range(C.n_mor):
        for g in sorted(C.up[f]):
            if g != f:
                lines.append(f"le {f} {g}")
    for (f, g), h in sorted(C.comp.items()):
        lines.append(f"comp {f} {g} = {h}")
    return "\n".join(lines) + "\n"


def load_category(text, name=""):
    objects, mors, comp, le = {}, {}, {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        parts = line.split()
        try:
            if parts[0] == "object":
                objects[int(parts[1])] = line.split(None, 2)[2] if len(parts) > 2 else parts[1]
            elif parts[0] == "mor":
                if parts[3] != "->":
                    raise ValueError
                rest = line.split(None, 5)
                mors[int(parts[1])] = (int(parts[2]), int(parts[4]), rest[5] if len(rest) > 5 else "")
            elif parts[0] == "le":
                le.append((int(parts[1]), int(parts[2])))
            elif parts[0] == "comp":
                if parts[3] != "=":
                    raise ValueError
                comp[int(parts[1]), int(parts[2])] = int(parts[4])
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise InputError(f"cannot parse {raw!r}", lineno) from None
    if sorted(objects) != list(range(len(objects))) or sorted(mors) != list(range(len(mors))):
        raise InputError("object and morphism ids must be 0..n-1")
    ident = [None] * len(objects)
    for f, (x, y, _) in mors.items():
        if x == y:
            if ident[x] is not None:
                raise InputError(f"object {x} has a non-identity endomorphism")
            ident[x] = f
    if any(i is None for i in ident):
        raise InputError("every object needs an identity morphism")
    return LPCategory([objects[i] for i in range(len(objects))],
                      [mors[i] for i in range(len(mors))], ident, comp, le, name)
