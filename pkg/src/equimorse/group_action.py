"""Group actions on simplicial complexes and on LP-categories."""

import random
from dataclasses import dataclass, field

from .errors import InputError, Report, VerificationError
from .group_core import Subgroup, format_cycles, group_from_generators, parse_group_text
from .lp_category import LPCategory, LPFunctor, check_lp_functor, validate_lp
from .simplicial_complex import SimplicialComplex, barycentric_subdivision, face_poset

SUBDIVIDE_HINT = ("the action is not regular; run `equimorse subdivide` (twice at most) "
                  "to pass to a barycentric subdivision, which is always regular")


class SimplicialAction:
    def __init__(self, group, complex):
        self.group = group
        self.complex = complex
        X = complex
        if group.n_points != len(X.vertices):
            raise InputError("group permutes a different number of points than the complex has vertices")
        self.vertex_action = [[X.vertices[p[i]] for i in range(len(X.vertices))] for p in group.perms]
        self._vpos = {v: i for i, v in enumerate(X.vertices)}

    def act_vertex(self, g, v):
        return self.vertex_action[g][self._vpos[v]]

    def act(self, g, s):
        return tuple(sorted(self.act_vertex(g, v) for v in s))

    def simplex_table(self):
        X = self.complex
        return [[X.index[self.act(g, s)] for s in X.simplices] for g in self.group.elements()]


def action_from_vertex_perms(X, names, perms):
    """Build the action of the group generated by ``perms`` (indexed like X.vertices)."""
    for name, p in zip(names, perms):
        for s in X.simplices:
            img = tuple(sorted(X.vertices[p[X.vertices.index(v)]] for v in s))
            if img not in X.index:
                raise InputError(f"generator {name} maps simplex {' '.join(s)} to a non-simplex {' '.join(img)}")
    G = group_from_generators(len(X.vertices), perms, names)
    return SimplicialAction(G, X)


def load_action(X, group_text):
    names, perms = parse_group_text(group_text, X.vertices)
    return action_from_vertex_perms(X, names, perms)


def format_group(A):
    X = A.complex
    G = A.group
    return "".join(f"gen {n} = {format_cycles(G.generator_perms[i], X.vertices)}\n"
                   for i, n in enumerate(G.gen_names))


def vertex_orbits(A):
    seen, out = set(), []
    for v in A.complex.vertices:
        if v not in seen:
            orb = sorted({A.act_vertex(g, v) for g in A.group.elements()})
            seen.update(orb)
            out.append(orb)
    return out


def check_regularity(A):
    """Both regularity conditions; failures carry witnesses and a remedy note."""
    rep = Report("check_regularity")
    X, G = A.complex, A.group
    for s in X.simplices:
        for g in G.elements():
            if A.act(g, s) == s and any(A.act_vertex(g, v) != v for v in s):
                rep.add("stabilizer_moves_vertex", simplex=" ".join(s), element=G.name(g))
                break
    orbit_of = {}
    for k, orb in enumerate(vertex_orbits(A)):
        for v in orb:
            orbit_of[v] = k
    classes = {}
    for s in X.simplices:
        key = tuple(sorted(orbit_of[v] for v in s))
        if len(set(key)) < len(key):
            # two vertices of s can be moved onto one vertex
            rep.add("orbit_repeated_in_simplex", simplex=" ".join(s))
            continue
        classes.setdefault(key, []).append(s)
    for key, members in classes.items():
        orb = {A.act(g, members[0]) for g in G.elements()}
        stray = [s for s in members if s not in orb]
        if stray:
            rep.add("mixed_orbit_simplex", simplex=" ".join(members[0]), outside=" ".join(stray[0]))
    if not rep.ok:
        rep.note = SUBDIVIDE_HINT
    return rep


def subdivide_action(A):
    """Barycentric subdivision together with the induced action."""
    X = A.complex
    Xs, name = barycentric_subdivision(X)
    pos = {v: i for i, v in enumerate(Xs.vertices)}
    back = {name(s): s for s in X.simplices}
    perms = []
    for gi in A.group.generators:
        perms.append([pos[name(A.act(gi, back[v]))] for v in Xs.vertices])
    return action_from_vertex_perms(Xs, A.group.gen_names, perms)


# --- LP actions -------------------------------------------------------------

@dataclass
class LPAction:
    category: LPCategory
    group: object
    obj_act: list
    mor_act: list

    def stabilizer(self, x):
        return Subgroup(self.group, [g for g in self.group.elements() if self.obj_act[g][x] == x])

    def mor_stabilizer(self, f):
        return Subgroup(self.group, [g for g in self.group.elements() if self.mor_act[g][f] == f])

    def orbit(self, x):
        return sorted({self.obj_act[g][x] for g in self.group.elements()})


def validate_lp_action(A):
    rep = Report("validate_lp_action")
    C, G = A.category, A.group
    for g in G.elements():
        F = LPFunctor(A.obj_act[g], A.mor_act[g])
        sub = check_lp_functor(F, C, C)
        for kind, w in sub.violations:
            rep.add("not_functorial", element=G.name(g), detail=kind)
            break
        if sorted(A.obj_act[g]) != list(range(C.n_obj)) or sorted(A.mor_act[g]) != list(range(C.n_mor)):
            rep.add("not_invertible", element=G.name(g))
    if not rep.ok:
        return rep
    for g in G.elements():
        for h in G.elements():
            gh = G.mul[g][h]
            if any(A.obj_act[gh][x] != A.obj_act[g][A.obj_act[h][x]] for x in range(C.n_obj)) or \
               any(A.mor_act[gh][f] != A.mor_act[g][A.mor_act[h][f]] for f in range(C.n_mor)):
                rep.add("not_homomorphic", pair=(G.name(g), G.name(h)))
    if any(A.obj_act[0][x] != x for x in range(C.n_obj)):
        rep.add("identity_moves_objects")
    for f in C.non_identity():
        x, y = C.src[f], C.dst[f]
        for g in G.elements():
            if A.obj_act[g][x] == y:
                rep.add("moves_source_to_target", morphism=f, element=G.name(g))
            if A.obj_act[g][x] == x and A.mor_act[g][f] != f:
                rep.add("stabilizer_moves_morphism", morphism=f, element=G.name(g))
    return rep


def lp_action_from_simplicial(A, check=True):
    if check:
        reg = check_regularity(A)
        if not reg.ok:
            raise VerificationError("action is not regular: " + SUBDIVIDE_HINT, reg)
    X = A.complex
    C = face_poset(X)
    table = A.simplex_table()
    mor_act = [[C.face_mor[t[C.src[f]], t[C.dst[f]]] if not C.is_identity(f) else C.ident[t[C.src[f]]]
                for f in range(C.n_mor)] for t in table]
    return LPAction(C, A.group, table, mor_act)


# --- quotients ----------------------------------------------------------------

@dataclass
class QuotientData:
    action: LPAction
    quotient: LPCategory
    functor: LPFunctor
    obj_orbits: list
    mor_orbits: list
    complex: SimplicialComplex = None
    simplex_obj: dict = field(default_factory=dict)
    x_to_y: dict = field(default_factory=dict)
    action_complex: SimplicialComplex = None

    def stabilizers(self):
        return [self.action.stabilizer(orb[0]) for orb in self.obj_orbits]

    def morphism(self, y, y2):
        """The unique morphism y -> y2 of a quotient face poset."""
        return self.quotient.homset(y, y2)[0]


def quotient_lp(A, key=None, labels=None):
    """Orbit category: objects and morphisms are orbits, ordered by ``key``."""
    C, G = A.category, A.group
    orb_of = [-1] * C.n_obj
    orbits, seen = [], set()
    for x in range(C.n_obj):
        if x not in seen:
            orbits.append(A.orbit(x))
            seen.update(orbits[-1])
    orbits.sort(key=key or (lambda o: o[0]))
    for k, o in enumerate(orbits):
        for y in o:
            orb_of[y] = k
    morb_of = [-1] * C.n_mor
    morbits = []
    for f in range(C.n_mor):
        if morb_of[f] < 0:
            o = sorted({A.mor_act[g][f] for g in G.elements()})
            for m in o:
                morb_of[m] = len(morbits)
            morbits.append(o)
    # order morphism orbits by (source orbit, target orbit, least member)
    perm = sorted(range(len(morbits)),
                  key=lambda k: (orb_of[C.src[morbits[k][0]]], orb_of[C.dst[morbits[k][0]]], morbits[k][0]))
    morbits = [morbits[k] for k in perm]
    for k, o in enumerate(morbits):
        for m in o:
            morb_of[m] = k
    lab = labels or (lambda k: C.objects[orbits[k][0]])
    mors = [(orb_of[C.src[o[0]]], orb_of[C.dst[o[0]]], C.mor_labels[o[0]]) for o in morbits]
    ident = [morb_of[C.ident[o[0]]] for o in orbits]
    comp = {}
    rep = Report("quotient_lp")
    for f, g in C.composable_pairs():
        if C.is_identity(f) or C.is_identity(g):
            continue
        key2 = (morb_of[f], morb_of[g])
        h = morb_of[C.compose(f, g)]
        if comp.setdefault(key2, h) != h:
            rep.add("composition_not_well_defined", pair=(f, g))
    # every pair of orbits that is composable in the quotient has a composable lift
    for a in range(len(morbits)):
        for b in range(len(morbits)):
            if mors[a][1] == mors[b][0] and (a, b) not in comp and a not in ident and b not in ident:
                rep.add("composition_missing", pair=(a, b))
    le = {(morb_of[f], morb_of[g]) for f in range(C.n_mor) for g in C.up[f] if f != g}
    Q = LPCategory([lab(k) for k in range(len(orbits))], mors, ident, comp, sorted(le), "quotient")
    if not rep.ok:
        raise VerificationError("quotient composition ill-defined", rep)
    P = LPFunctor(list(orb_of), list(morb_of))
    return QuotientData(A, Q, P, orbits, morbits)


def check_quotient(Qd):
    """Validate the quotient and the orbit functor (antisymmetry, surjectivity)."""
    rep = validate_lp(Qd.quotient)
    rep.name = "quotient"
    rep.extend(check_lp_functor(Qd.functor, Qd.action.category, Qd.quotient))
    if sorted(set(Qd.functor.obj_map)) != list(range(Qd.quotient.n_obj)):
        rep.add("orbit_functor_not_surjective")
    n = len(Qd.action.group)
    for k, orb in enumerate(Qd.obj_orbits):
        if len(orb) * len(Qd.action.stabilizer(orb[0])) != n:
            rep.add("orbit_stabilizer", orbit=k)
    return rep


def quotient_complex(A):
    """Orbit complex Y, with vertices named by the least member of each vertex orbit."""
    rep_of = {}
    for orb in vertex_orbits(A):
        for v in orb:
            rep_of[v] = orb[0]
    X = A.complex
    smap = {s: tuple(sorted({rep_of[v] for v in s})) for s in X.simplices}
    return SimplicialComplex(smap.values()), smap


def quotient_face_poset(A, lpa=None):
    """Quotient of Fac[X] whose objects are numbered like face_poset(Y)."""
    lpa = lpa or lp_action_from_simplicial(A)
    Y, smap = quotient_complex(A)
    X = A.complex

    def key(orb):
        y = smap[X.simplices[orb[0]]]
        return Y.index[y]

    Qd = quotient_lp(lpa, key=key)
    Qd.quotient.objects = [Y.label(y) for y in Y.simplices]
    Qd.complex = Y
    Qd.simplex_obj = {y: Y.index[y] for y in Y.simplices}
    Qd.x_to_y = smap
    Qd.action_complex = X
    return Qd


# --- lifts and transfers ----------------------------------------------------------

@dataclass
class LiftTransfer:
    lift: list
    transfer: list
    seed: int = 0

    def lifted_morphism(self, A, Qd, f):
        """The unique morphism over f from lift(src) to transfer(f)^-1 lift(dst)."""
        C, G = A.category, A.group
        Q = Qd.quotient
        s = self.lift[Q.src[f]]
        t = A.obj_act[G.inv[self.transfer[f]]][self.lift[Q.dst[f]]]
        return [m for m in Qd.mor_orbits[f] if C.src[m] == s and C.dst[m] == t]


def seeded_rank(n, seed):
    order = list(range(n))
    random.Random(seed).shuffle(order)
    rank = [0] * n
    for r, x in enumerate(order):
        rank[x] = r
    return rank


def _coherent_lifts(A, Qd, orank, fixed):
    # objects with more outgoing morphisms (higher simplices) first; each
    # later lift is taken inside as many earlier lifts as possible
    C = A.category
    order = sorted(range(len(Qd.obj_orbits)), key=lambda y: (-len(C.out[Qd.obj_orbits[y][0]]), y))
    lift = [None] * len(Qd.obj_orbits)
    for y in order:
        if y in fixed:
            lift[y] = fixed[y]
            continue
        done = [lift[z] for z in order if lift[z] is not None]
        lift[y] = min(Qd.obj_orbits[y], key=lambda x: (-sum((w, x) in C.hom for w in done), orank[x]))
    return lift


def choose_lifts_transfers(A, Qd, seed=0, lifts=None, coherent=False):
    """Least orbit member under a seed-scrambled order; transfers likewise.

    ``lifts`` optionally fixes some lifts explicitly (quotient object -> object).
    With ``coherent`` the lifts are built top-down so that faces of lifted
    cells are preferred, as for a fundamental domain; this keeps transfers
    and twisting elements trivial wherever the geometry allows.
    """
    C, G = A.category, A.group
    Q = Qd.quotient
    orank = seeded_rank(C.n_obj, seed)
    grank = seeded_rank(len(G), seed + 1)
    for y, x in (lifts or {}).items():
        if Qd.functor.obj_map[x] != y:
            raise InputError(f"object {x} does not lie over {y}")
    if coherent:
        lift = _coherent_lifts(A, Qd, orank, lifts or {})
    else:
        lift = [min(orb, key=lambda x: orank[x]) for orb in Qd.obj_orbits]
        for y, x in (lifts or {}).items():
            lift[y] = x
    transfer = [0] * Q.n_mor
    for f in range(Q.n_mor):
        if Q.is_identity(f):
            continue
        s, target = lift[Q.src[f]], lift[Q.dst[f]]
        valid = set()
        for m in Qd.mor_orbits[f]:
            if C.src[m] == s:
                d = C.dst[m]
                valid.update(g for g in G.elements() if A.obj_act[g][d] == target)
        transfer[f] = 0 if coherent and 0 in valid else min(valid, key=lambda g: grank[g])
    LT = LiftTransfer(lift, transfer, seed)
    rep = check_lift_transfer(A, Qd, LT)
    if not rep.ok:
        raise VerificationError("lift/transfer choice violates uniqueness", rep)
    return LT


def parse_lifts_text(text, Qd):
    """Lines ``lift <quotient simplex> -> <simplex of X>``; returns quotient object -> object."""
    X, Y = Qd.action_complex, Qd.complex
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        lo, arrow, hi = rest.partition("->")
        if head != "lift" or not arrow:
            raise InputError(f"expected 'lift <simplex> -> <simplex>', got {raw!r}", lineno)
        y, x = tuple(sorted(lo.split())), tuple(sorted(hi.split()))
        if y not in Y.index or x not in X.index:
            raise InputError(f"unknown simplex in {raw!r}", lineno)
        out[Y.index[y]] = X.index[x]
    return out


def format_lifts(Qd, LT):
    X, Y = Qd.action_complex, Qd.complex
    return "".join(f"lift {Y.label(y)} -> {X.label(X.simplices[LT.lift[k]])}\n"
                   for k, y in enumerate(Y.simplices))


def fixed_subcomplex(A, H):
    """Simplices fixed setwise by every element of H (a subcomplex for regular actions)."""
    return [s for s in A.complex.simplices if all(A.act(h, s) == s for h in H)]


def check_lift_transfer(A, Qd, LT):
    rep = Report("lift_transfer")
    Q = Qd.quotient
    for y in range(Q.n_obj):
        if Qd.functor.obj_map[LT.lift[y]] != y:
            rep.add("lift_not_section", object=y)
        if LT.transfer[Q.ident[y]] != 0:
            rep.add("identity_transfer", object=y)
    for f in range(Q.n_mor):
        if len(LT.lifted_morphism(A, Qd, f)) != 1:
            rep.add("lift_not_unique", morphism=f, count=len(LT.lifted_morphism(A, Qd, f)))
    return rep
