"""The basic construction.

Given a complex of groups ``F`` over ``Q`` and a monomorphism ``Phi`` into the
constant complex with group ``G``, the development has one object per pair
``(x, gH_x)`` with ``H_x = Phi_x(F x)``, one morphism ``(f, gH_x)`` per base
morphism ``f`` and source coset, and a left ``G``-action on cosets. The
target of ``(f, gH_x)`` is the coset of ``g tau(f)^-1`` in ``G/H_y``.
"""

from dataclasses import dataclass

from .group_action import LiftTransfer, LPAction, check_lift_transfer, quotient_lp, validate_lp_action
from .complex_of_groups import cog_from_action, validate_cog, validate_cog_morphism
from .errors import Report, VerificationError
from .group_core import Subgroup, left_cosets
from .lp_category import (ISO_BUDGET, IsoResult, LPCategory, LPFunctor, check_isomorphism, dump_category,
                    find_isomorphism, validate_lp)

BASE_CHANGE_READING = "Phi_f is read as the transfer tau_Phi(f) of the morphism f"


@dataclass
class Development:
    category: LPCategory
    action: LPAction
    base: LPCategory
    group: object
    cosets: list     # CosetSpace per base object
    obj_of: dict     # (x, coset class) -> object id
    mor_of: dict     # (f, coset class) -> morphism id
    obj_key: list
    mor_key: list
    report: Report

    def canonical_lift(self, x):
        return self.obj_of[x, self.cosets[x].class_of[0]]


def _images(F, Phi):
    G = F.group
    return [Subgroup(G, sorted(set(Phi.inj[x].values()))) for x in range(F.base.n_obj)]


def develop(F, Phi, check=True):
    Q, G = F.base, F.group
    tau = Phi.tau
    if check:
        for sub in (validate_cog(F), validate_cog_morphism(Phi, F)):
            if not sub.ok:
                raise VerificationError("refusing to develop an invalid pair", sub)
    cosets = [left_cosets(H) for H in _images(F, Phi)]
    rep = Report("develop")

    def target_class(f, g):
        return cosets[Q.dst[f]].class_of[G.mul[g][G.inv[tau[f]]]]

    # representative independence of targets and closure of composition
    for f in range(Q.n_mor):
        cs = cosets[Q.src[f]]
        seen = {}
        for g in G.elements():
            if seen.setdefault(cs.class_of[g], target_class(f, g)) != target_class(f, g):
                rep.add("target_depends_on_representative", morphism=f, element=G.name(g))
                break
    for f1, f2 in Q.composable_pairs():
        h = Q.compose(f1, f2)
        cz = cosets[Q.dst[f2]]
        for g in G.elements():
            g2 = cosets[Q.dst[f1]].reps[target_class(f1, g)]
            if target_class(f2, g2) != cz.class_of[G.mul[g][G.inv[tau[h]]]]:
                rep.add("composite_leaves_coset", pair=(f1, f2), element=G.name(g))
                break
    if not rep.ok:
        raise VerificationError("development is not well defined", rep)

    objects, obj_key, obj_of = [], [], {}
    for x in range(Q.n_obj):
        for c, r in enumerate(cosets[x].reps):
            obj_of[x, c] = len(objects)
            obj_key.append((x, c))
            objects.append(f"({Q.objects[x]} | {G.name(r)})")
    mors, mor_key, mor_of = [], [], {}
    for f in range(Q.n_mor):
        x = Q.src[f]
        for c, r in enumerate(cosets[x].reps):
            mor_of[f, c] = len(mors)
            mor_key.append((f, c))
            mors.append((obj_of[x, c], obj_of[Q.dst[f], target_class(f, r)],
                         f"({Q.mor_labels[f]} | {G.name(r)})"))
    ident = [mor_of[Q.ident[x], c] for x, c in obj_key]
    comp = {}
    for f1, f2 in Q.composable_pairs():
        if Q.is_identity(f1) or Q.is_identity(f2):
            continue
        h = Q.compose(f1, f2)
        for c, r in enumerate(cosets[Q.src[f1]].reps):
            c2 = target_class(f1, r)
            comp[mor_of[f1, c], mor_of[f2, c2]] = mor_of[h, c]
    le = []
    for f in range(Q.n_mor):
        Hy = cosets[Q.dst[f]].subgroup
        for f2 in Q.up[f]:
            if f2 != f and G.mul[tau[f]][G.inv[tau[f2]]] in Hy:
                le.extend((mor_of[f, c], mor_of[f2, c]) for c in range(len(cosets[Q.src[f]])))
    D = LPCategory(objects, mors, ident, comp, le, "development")

    obj_act, mor_act = [], []
    for h in G.elements():
        obj_act.append([obj_of[x, cosets[x].class_of[G.mul[h][cosets[x].reps[c]]]] for x, c in obj_key])
        mor_act.append([mor_of[f, cosets[Q.src[f]].class_of[G.mul[h][cosets[Q.src[f]].reps[c]]]]
                        for f, c in mor_key])
    act = LPAction(D, G, obj_act, mor_act)
    dev = Development(D, act, Q, G, cosets, obj_of, mor_of, obj_key, mor_key, rep)
    if check:
        for sub in (validate_lp(D), validate_lp_action(act), check_quotient_clause(dev),
                    check_reproduces(dev, F, Phi)):
            if not sub.ok:
                raise VerificationError(f"development failed {sub.name}", sub)
    return dev


def _orbit_functor(dev, Qd):
    # orbit k of the quotient -> base object / morphism
    return LPFunctor([dev.obj_key[o[0]][0] for o in Qd.obj_orbits],
                     [dev.mor_key[o[0]][0] for o in Qd.mor_orbits])


def check_quotient_clause(dev):
    """D/G is isomorphic to the base, first via the canonical functor."""
    Qd = quotient_lp(dev.action)
    rep = check_isomorphism(_orbit_functor(dev, Qd), Qd.quotient, dev.base)
    rep.name = "quotient_clause"
    if not rep.ok:
        res = find_isomorphism(Qd.quotient, dev.base)
        if res.found:
            rep = Report("quotient_clause")
            rep.note = "canonical functor failed; another isomorphism exists"
    return rep


def check_reproduces(dev, F, Phi):
    """Lifts x -> (x, H_x) with transfers tau reproduce the tables of (F, Phi)."""
    Q = dev.base
    rep = Report("reproduces_pair")
    Qd = quotient_lp(dev.action)
    E = _orbit_functor(dev, Qd)
    q_of = {x: q for q, x in enumerate(E.obj_map)}
    qm_of = {f: q for q, f in enumerate(E.mor_map)}
    lift = [dev.canonical_lift(E.obj_map[q]) for q in range(Qd.quotient.n_obj)]
    transfer = [Phi.tau[f] for f in E.mor_map]
    LT = LiftTransfer(lift, transfer)
    rep.extend(check_lift_transfer(dev.action, Qd, LT))
    if not rep.ok:
        return rep
    F2, Phi2 = cog_from_action(dev.action, Qd, LT)
    for x in range(Q.n_obj):
        inj = Phi.inj[x]
        if set(F2.groups[q_of[x]]) != set(inj.values()):
            rep.add("group_differs", object=x)
    if not rep.ok:
        return rep
    for f in range(Q.n_mor):
        inj_x, inj_y = Phi.inj[Q.src[f]], Phi.inj[Q.dst[f]]
        if any(F2.homs[qm_of[f]](inj_x[k]) != inj_y[F.homs[f](k)] for k in F.groups[Q.src[f]]):
            rep.add("hom_differs", morphism=f)
        if Phi2.tau[qm_of[f]] != Phi.tau[f]:
            rep.add("transfer_differs", morphism=f)
    for (f1, f2), t in F.pair_twist.items():
        z = Q.dst[f2]
        if F2.pair_twist.get((qm_of[f1], qm_of[f2])) != Phi.inj[z][t]:
            rep.add("twist_differs", pair=(f1, f2))
    for (f1, f2), t in F.order_twist.items():
        if F2.order_twist.get((qm_of[f1], qm_of[f2])) != Phi.inj[Q.dst[f1]][t]:
            rep.add("order_twist_differs", pair=(f1, f2))
    return rep


def _equivariant(Fn, actC, actD):
    G = actC.group
    return all(Fn.obj_map[actC.obj_act[g][x]] == actD.obj_act[g][Fn.obj_map[x]]
               for g in G.elements() for x in range(actC.category.n_obj)) and \
        all(Fn.mor_map[actC.mor_act[g][f]] == actD.mor_act[g][Fn.mor_map[f]]
            for g in G.elements() for f in range(actC.category.n_mor))


def check_equivariant_iso(actC, actD, witness=None, budget=ISO_BUDGET):
    """An equivariant isomorphism C -> D, trying ``witness`` first."""
    if actC.group is not actD.group:
        return IsoResult("none")
    C, D = actC.category, actD.category
    if witness is not None and check_isomorphism(witness, C, D).ok and _equivariant(witness, actC, actD):
        return IsoResult("iso", witness, 0)
    res = find_isomorphism(C, D, budget=budget, actions=(actC.obj_act, actD.obj_act),
                           mor_actions=(actC.mor_act, actD.mor_act))
    if res.found and not _equivariant(res.functor, actC, actD):
        return IsoResult("none", None, res.used)
    return res


def canonical_witness(dev, A, Qd, LT, base_map=None):
    """(x, gH_x) -> g.lift(x) and (f, gH_x) -> g.lift(f).

    ``Qd``/``LT`` describe the action ``A`` on the target; ``base_map`` is an
    isomorphism from ``Qd.quotient`` to the development's base (identity when
    omitted).
    """
    nq = Qd.quotient
    bm = base_map or LPFunctor(list(range(nq.n_obj)), list(range(nq.n_mor)))
    q_of = {x: q for q, x in enumerate(bm.obj_map)}
    qm_of = {f: q for q, f in enumerate(bm.mor_map)}
    obj = []
    for x, c in dev.obj_key:
        g = dev.cosets[x].reps[c]
        obj.append(A.obj_act[g][LT.lift[q_of[x]]])
    mor = []
    for f, c in dev.mor_key:
        g = dev.cosets[dev.base.src[f]].reps[c]
        lf = LT.lifted_morphism(A, Qd, qm_of[f])
        if len(lf) != 1:
            raise VerificationError(f"no unique lifted morphism over {dev.base.mor_labels[f]}")
        mor.append(A.mor_act[g][lf[0]])
    return LPFunctor(obj, mor)


def check_base_change(F, Phi, F2, Phi2, E, budget=ISO_BUDGET):
    """Developments agree when F = F2.E and the transfers agree along E."""
    rep = Report("base_change")
    rep.note = BASE_CHANGE_READING
    Q = F.base
    for x in range(Q.n_obj):
        if set(F.groups[x]) != set(F2.groups[E.obj_map[x]]):
            rep.add("groups_do_not_commute", object=x)
    for f in range(Q.n_mor):
        if F.homs[f].map != F2.homs[E.mor_map[f]].map:
            rep.add("homs_do_not_commute", morphism=f)
        if Phi.tau[f] != Phi2.tau[E.mor_map[f]]:
            rep.add("transfers_differ", morphism=f)
    if not rep.ok:
        return rep, None
    d1, d2 = develop(F, Phi), develop(F2, Phi2)
    obj = [d2.obj_of[E.obj_map[x], c] for x, c in d1.obj_key]
    mor = [d2.mor_of[E.mor_map[f], c] for f, c in d1.mor_key]
    res = check_equivariant_iso(d1.action, d2.action, LPFunctor(obj, mor), budget)
    if not res.found:
        rep.add("developments_not_isomorphic", status=res.status)
    return rep, res


def dump_development(dev):
    G = dev.group
    lines = [dump_category(dev.category).rstrip("\n")]
    for g in G.elements():
        lines.append(f"act {G.name(g)} : " + " ".join(str(y) for y in dev.action.obj_act[g]))
    return "\n".join(lines) + "\n"


def nerve_vs_subdivision(C, functor, X):
    """Compare the nerve of a posetal C with the barycentric subdivision of X.

    ``functor`` is an isomorphism from C to the face poset of X; the nerve
    simplices are pushed through it and compared with the chains of X.
    """
    from .lp_category import geometric_nerve
    from .simplicial_complex import barycentric_subdivision

    rep = Report("nerve_vs_subdivision")
    if any(len(v) != 1 for v in C.hom.values()):
        rep.add("not_posetal")
        return rep
    N = geometric_nerve(C)
    Xs, name = barycentric_subdivision(X)
    pushed = set()
    for level in N.simplices:
        for objs, _ in level:
            if len(set(objs)) != len(objs):
                rep.add("repeated_object", simplex=objs)
            pushed.add(tuple(sorted(name(X.simplices[functor.obj_map[x]]) for x in objs)))
    if pushed != set(Xs.simplices):
        rep.add("simplices_differ", extra=len(pushed - set(Xs.simplices)), missing=len(set(Xs.simplices) - pushed))
    return rep
