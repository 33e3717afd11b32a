"""Acyclic matchings, entrance paths and the flow category of a matching.

A zigzag is a tuple of forward entrance paths, each a tuple of simplex
indices. Consecutive paths are joined by a backward arrow: the last cell of
one path is the lower cell of a matched pair whose upper cell starts the next
path (or the two cells coincide, which is an identity backward arrow).

Zigzags between critical cells are stored in a normal form obtained by two
shortening moves, both instances of single-column equality ladders:

    ... -> (s a) x' <-s x -> b ...   becomes   ... -> (b a) ...
    ... -> a x' <-s x -> (b s) ...   becomes   ... -> (b a) ...

Morphisms of the flow category are the normal forms.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter

from .errors import BudgetExceeded, InputError, Report, VerificationError
from .lp_category import CategoryBuilder, validate_lp

ZIGZAG_BUDGET = 100_000
CLASS_BUDGET = 10_000
PATH_BOUND = 200_000


class Matching:
    """Pairs ``(upper, lower)`` of sorted vertex tuples."""

    def __init__(self, pairs=()):
        self.pairs = sorted({(tuple(sorted(u)), tuple(sorted(l))) for u, l in pairs},
                            key=lambda p: (len(p[1]), p[1], p[0]))
        self.lower_of = {}
        self.upper_of = {}
        for u, l in self.pairs:
            self.lower_of.setdefault(u, l)
            self.upper_of.setdefault(l, u)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __eq__(self, other):
        return isinstance(other, Matching) and self.pairs == other.pairs

    def matched(self, s):
        return s in self.lower_of or s in self.upper_of

    def critical(self, X):
        return [s for s in X.simplices if not self.matched(s)]

    def __repr__(self):
        return f"Matching({len(self.pairs)} pairs)"


def parse_matching_text(text, X=None):
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "pair" or "->" not in parts:
            raise InputError(f"expected 'pair <lower> -> <upper>', got {raw!r}", lineno)
        k = parts.index("->")
        lower, upper = tuple(sorted(parts[1:k])), tuple(sorted(parts[k + 1:]))
        if not lower or not upper:
            raise InputError("empty simplex in pair", lineno)
        for s in (lower, upper):
            if X is not None and s not in X.index:
                raise InputError(f"unknown simplex {' '.join(s)}", lineno)
        pairs.append((upper, lower))
    return Matching(pairs)


def format_matching(M):
    return "".join(f"pair {' '.join(l)} -> {' '.join(u)}\n" for u, l in M.pairs)


def validate_matching(X, M):
    rep = Report("validate_matching")
    for u, l in M.pairs:
        for s in (u, l):
            if s not in X.index:
                rep.add("unknown_simplex", simplex=" ".join(s))
        if not set(l) < set(u):
            rep.add("not_a_face", pair=(" ".join(l), " ".join(u)))
        elif len(u) - len(l) != 1:
            rep.add("dimension", pair=(" ".join(l), " ".join(u)))
    seen = {}
    for u, l in M.pairs:
        for s in (u, l):
            seen[s] = seen.get(s, 0) + 1
    for s, n in seen.items():
        if n > 1:
            rep.add("partition", simplex=" ".join(s), occurrences=n)
    if not rep.ok:
        return rep
    graph = {p: set() for p in M.pairs}
    for p in M.pairs:
        up = set(p[0])
        for q in M.pairs:
            if q != p and set(q[1]) < up:
                graph[p].add(q)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as e:
        cycle = e.args[1]
        rep.add("cycle", cycle=[f"{' '.join(l)} -> {' '.join(u)}" for u, l in cycle])
    return rep


# --- entrance paths -----------------------------------------------------------

def _proper_faces(X):
    return [[X.index[f] for f in X.faces(s)] for s in X.simplices]


def chain_enumerator(X, bound=PATH_BOUND):
    """Function mapping a simplex index to all descending chains starting there."""
    faces = _proper_faces(X)
    total = [0]

    @lru_cache(maxsize=None)
    def chains(i):
        out = [(i,)]
        for j in faces[i]:
            out.extend((i,) + c for c in chains(j))
        total[0] += len(out)
        if total[0] > bound:
            raise BudgetExceeded(f"more than {bound} entrance paths")
        return tuple(out)

    return chains


def is_subsequence(short, long):
    it = iter(long)
    return all(x in it for x in short)


def path_label(X, p):
    return " > ".join(",".join(X.simplices[i]) for i in p)


def entrance_category(X, bound=PATH_BOUND):
    chains = chain_enumerator(X, bound)
    b = CategoryBuilder("Ent")
    for s in X.simplices:
        b.add_object(X.label(s))
    mor = {}
    for i in range(len(X)):
        mor[(i,)] = b.ident[i]
        for c in chains(i):
            if len(c) > 1:
                mor[c] = b.add_mor(i, c[-1], path_label(X, c))
    by_start = {}
    for c in mor:
        by_start.setdefault(c[0], []).append(c)
    hom = {}
    for c, m in mor.items():
        if len(c) > 1:
            hom.setdefault((c[0], c[-1]), []).append(c)
            for d in by_start[c[-1]]:
                if len(d) > 1:
                    b.comp[m, mor[d]] = mor[c + d[1:]]
    for cs in hom.values():
        for p in cs:
            for q in cs:
                if len(p) < len(q) and is_subsequence(p, q):
                    b.le.append((mor[p], mor[q]))
    C = b.build()
    C.path_of = {m: c for c, m in mor.items()}
    return C


# --- zigzags ------------------------------------------------------------------

class ZigzagContext:
    """Index-level view of a complex with a matching."""

    def __init__(self, X, M, bound=PATH_BOUND):
        self.X = X
        self.upper = {X.index[l]: X.index[u] for u, l in M.pairs}
        self.lower = {X.index[u]: X.index[l] for u, l in M.pairs}
        self.critical = [i for i in range(len(X)) if i not in self.upper and i not in self.lower]
        self.chains = chain_enumerator(X, bound)
        self._face = {i: set(f) for i, f in enumerate(_proper_faces(X))}

    def is_zigzag(self, zz):
        for p in zz:
            if any(b not in self._face[a] for a, b in zip(p, p[1:])):
                return False
        return all(a[-1] == b[0] or self.upper.get(a[-1]) == b[0] for a, b in zip(zz, zz[1:]))

    def normalize(self, zz):
        paths = [tuple(p) for p in zz]
        changed = True
        while changed:
            changed = False
            for i in range(len(paths) - 1):
                a, b = paths[i], paths[i + 1]
                if a[-1] == b[0]:
                    merged = a + b[1:]
                elif len(a) > 1 and a[-2] == b[0]:
                    merged = a[:-1] + b[1:]
                elif len(b) > 1 and b[1] == a[-1]:
                    merged = a + b[2:]
                else:
                    continue
                paths[i:i + 2] = [merged]
                changed = True
                break
        return tuple(paths)

    def expansions(self, zz):
        """Zigzags one shortening move away from ``zz``."""
        out = []
        for j, p in enumerate(zz):
            for k, x in enumerate(p):
                if x in self.lower:
                    out.append(zz[:j] + (p[:k + 1] + (self.lower[x],), p[k:]) + zz[j + 1:])
                if x in self.upper:
                    out.append(zz[:j] + (p[:k + 1], (self.upper[x],) + p[k:]) + zz[j + 1:])
        return out

    def irreducible_from(self, w, budget=ZIGZAG_BUDGET):
        crit = set(self.critical)
        out = [((w,),)]

        def rec(prefix, c):
            for p in self.chains(c):
                if len(p) < 2 or (prefix and p[1] == prefix[-1][-1]):
                    continue
                end = p[-1]
                if end in crit:
                    out.append(prefix + (p,))
                    if len(out) > budget:
                        raise BudgetExceeded(f"more than {budget} zigzags from one critical cell")
                x = self.upper.get(end)
                if x is not None and p[-2] != x:
                    rec(prefix + (p,), x)

        rec((), w)
        return out

    def pairs_of(self, zz):
        return [(b[0], a[-1]) for a, b in zip(zz, zz[1:]) if a[-1] != b[0]]

    def _extend(self, nf, piece):
        return self.normalize(nf[:-1] + (nf[-1] + piece[1:],))

    def _climb(self, nf):
        return self.normalize(nf + ((self.upper[nf[-1][-1]],),))

    def ladders_from(self, w, equal=False, budget=ZIGZAG_BUDGET):
        """All pairs (bottom, top) of normal forms joined by a ladder, starting at ``w``.

        Rows are arbitrary representatives, tracked by the normal form of
        the part already traversed. Verticals are identities or matched pairs.
        A forward square carries an order cell (the bottom composite refines
        the top one), or an equality when ``equal`` is set. Backward squares
        are forced to commute. Returns every reachable pair of prefixes whose
        end cells agree.
        """
        start = (((w,),), ((w,),))
        seen = {start}
        stack = [start]
        lower, upper = self.lower, self.upper
        while stack:
            top, bot = stack.pop()
            a, b = top[-1][-1], bot[-1][-1]
            nxt = []
            if a == b:
                if a in upper:
                    t2 = self._climb(top)
                    nxt.append((t2, bot))
                    nxt.append((t2, self._climb(bot)))
            elif b in upper:
                nxt.append((top, self._climb(bot)))
            for T in self.chains(a):
                a2 = T[-1]
                for b2 in (a2, lower.get(a2)):
                    if b2 is None:
                        continue
                    right = T if b2 == a2 else T + (b2,)
                    for L in ((right,) if equal else _subsequences(right)):
                        if a != b and (len(L) < 2 or L[1] != b):
                            continue
                        B = L if a == b else L[1:]
                        if len(T) == 1 and len(B) == 1:
                            continue
                        nxt.append((self._extend(top, T), self._extend(bot, B)))
            for st in nxt:
                if st not in seen:
                    seen.add(st)
                    stack.append(st)
                    if len(seen) > budget:
                        raise BudgetExceeded(f"ladder search exceeded {budget} states")
        return [(bot, top) for top, bot in seen if top[-1][-1] == bot[-1][-1]]


def _subsequences(path):
    """Subsequences of ``path`` keeping both endpoints."""
    inner = path[1:-1]
    out = []
    for mask in range(1 << len(inner)):
        mid = tuple(x for i, x in enumerate(inner) if mask >> i & 1)
        out.append((path[0],) + mid + ((path[-1],) if len(path) > 1 else ()))
    return out


def compose_zigzags(z1, z2):
    """``z2`` after ``z1``; the junction paths are concatenated."""
    return z1[:-1] + (z1[-1] + z2[0][1:],) + z2[1:]


def zigzag_label(X, zz):
    return " < ".join(path_label(X, p) for p in zz)


# --- the flow category ----------------------------------------------------------

@dataclass
class FlowCategory:
    category: object
    complex: object
    matching: Matching
    context: ZigzagContext
    critical: list
    obj_of: dict
    zigzags: list
    mor_of: dict = field(default_factory=dict)

    def label(self, m):
        return zigzag_label(self.complex, self.zigzags[m])


def flow_category(X, M, budget=ZIGZAG_BUDGET, class_budget=CLASS_BUDGET, check=True, self_check=True):
    rep = validate_matching(X, M)
    if not rep.ok:
        raise VerificationError("matching is not an acyclic partial matching", rep)
    ctx = ZigzagContext(X, M)
    b = CategoryBuilder("Flo")
    obj_of = {}
    for i in ctx.critical:
        obj_of[i] = b.add_object(X.label(X.simplices[i]))
    zigzags = [None] * len(b.mors)
    mor_of = {}
    for i in ctx.critical:
        mor_of[((i,),)] = b.ident[obj_of[i]]
        zigzags[b.ident[obj_of[i]]] = ((i,),)
    total = 0
    for w in ctx.critical:
        found = ctx.irreducible_from(w, budget)
        total += len(found)
        if total > budget:
            raise BudgetExceeded(f"zigzag budget exceeded: {total} > {budget}")
        for zz in found:
            if len(zz) == 1 and len(zz[0]) == 1:
                continue
            m = b.add_mor(obj_of[w], obj_of[zz[-1][-1]], zigzag_label(X, zz))
            zigzags.append(zz)
            mor_of[zz] = m
    if len(mor_of) > class_budget:
        raise BudgetExceeded(f"class budget exceeded: {len(mor_of)} > {class_budget}")
    out = {}
    for m, (x, y, _) in enumerate(b.mors):
        if x != y:
            out.setdefault(x, []).append(m)
    for m, (x, y, _) in enumerate(b.mors):
        if x == y:
            continue
        for m2 in out.get(y, ()):
            zz = compose_zigzags(zigzags[m], zigzags[m2])
            if zz not in mor_of:
                raise VerificationError(f"composite {zigzag_label(X, zz)} is not a normal form")
            b.comp[m, m2] = mor_of[zz]
    crit = set(ctx.critical)
    for w in ctx.critical:
        for bot, top in ctx.ladders_from(w, budget=budget):
            if bot != top and top[-1][-1] in crit:
                b.le.append((mor_of[bot], mor_of[top]))
        if self_check:
            for bot, top in ctx.ladders_from(w, equal=True, budget=budget):
                if bot != top:
                    raise VerificationError(f"distinct normal forms {bot} and {top} are equivalent")
    C = b.build()
    if check:
        rep = validate_lp(C)
        if not rep.ok:
            raise VerificationError("flow category is not an LP-category", rep)
    return FlowCategory(C, X, M, ctx, list(ctx.critical), obj_of, zigzags, mor_of)


# --- compatibility and lifting ------------------------------------------------------

def check_compatibility(F, Y, M):
    """Matched morphisms map to isomorphisms, and triangles through them stay strict."""
    rep = Report("check_compatibility")
    C, G = F.base, F.group
    for u, l in M.pairs:
        f = C.homset(Y.index[u], Y.index[l])[0]
        pair = (" ".join(l), " ".join(u))
        if not F.homs[f].is_surjective():
            rep.add("not_isomorphism", pair=pair,
                    source_order=len(F.groups[C.src[f]]), target_order=len(F.groups[C.dst[f]]))
        x, y = C.src[f], C.dst[f]
        tri = [(g, f) for w in C.inn[x] if w != x for g in C.hom[w, x]]
        tri += [(f, h) for z in C.out[y] if z != y for h in C.hom[y, z]]
        for g1, g2 in tri:
            comp = C.compose(g1, g2)
            for k in F.groups[C.src[g1]]:
                if F.homs[g2](F.homs[g1](k)) != F.homs[comp](k):
                    rep.add("triangle_map", pair=pair, first=C.mor_labels[g1], second=C.mor_labels[g2],
                            element=G.name(k))
                    break
            if F.twist(g1, g2) != 0:
                rep.add("triangle_twist", pair=pair, first=C.mor_labels[g1], second=C.mor_labels[g2],
                        twist=G.name(F.twist(g1, g2)))
    return rep


def lift_matching(A, Qd, LT, M, F=None):
    """Union of the orbits of the lifted matched morphisms."""
    if F is not None:
        rep = check_compatibility(F, Qd.complex, M)
        if not rep.ok:
            raise VerificationError("matching is not compatible; see check_compatibility (matchcheck)", rep)
    X, G, Y = A.complex, A.group, Qd.complex
    C = Qd.action.category
    pairs = set()
    for u, l in M.pairs:
        f = Qd.morphism(Y.index[u], Y.index[l])
        (m,) = LT.lifted_morphism(Qd.action, Qd, f)
        up, lo = X.simplices[C.src[m]], X.simplices[C.dst[m]]
        pairs.update((A.act(g, up), A.act(g, lo)) for g in G.elements())
    lifted = Matching(pairs)
    rep = validate_matching(X, lifted)
    for u, l in lifted.pairs:
        if (Qd.x_to_y[u], Qd.x_to_y[l]) not in set(M.pairs):
            rep.add("image_not_in_matching", pair=(" ".join(l), " ".join(u)))
    if Matching((Qd.x_to_y[u], Qd.x_to_y[l]) for u, l in lifted.pairs) != M:
        rep.add("image_not_onto_matching")
    if not rep.ok:
        raise VerificationError("lifted matching failed verification", rep)
    return lifted


def induced_flow_action(A, flow):
    """Arrow-wise action of the group on the flow category of an invariant matching."""
    from .group_action import LPAction, validate_lp_action
    G, ctx = A.group, flow.context
    table = A.simplex_table()
    obj_act, mor_act = [], []
    for g in G.elements():
        t = table[g]
        obj_act.append([flow.obj_of.get(t[i], -1) for i in flow.critical])
        row = []
        for zz in flow.zigzags:
            img = tuple(tuple(t[i] for i in p) for p in zz)
            m = flow.mor_of.get(img)
            if m is None or ctx.normalize(img) != img:
                raise VerificationError(f"image of {zigzag_label(flow.complex, zz)} is not a normal form; "
                                        "matching is not invariant")
            for e in ctx.expansions(zz):
                ge = tuple(tuple(t[i] for i in p) for p in e)
                if ctx.normalize(ge) != img:
                    raise VerificationError("action does not respect zigzag equivalence")
            row.append(m)
        mor_act.append(row)
    act = LPAction(flow.category, G, obj_act, mor_act)
    rep = validate_lp_action(act)
    if not rep.ok:
        raise VerificationError("induced flow action failed verification", rep)
    return act
