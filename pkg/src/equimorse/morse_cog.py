"""The Morse complex of groups over a quotient flow category, and its comparison
with the lifted flow category upstairs."""

from dataclasses import dataclass

from .group_action import LiftTransfer, check_lift_transfer, quotient_lp
from .complex_of_groups import ComplexOfGroups, CoGMorphismToConstant, cog_from_action, validate_cog, validate_cog_morphism
from .errors import Report, VerificationError
from .group_core import GroupHom
from .lp_category import LPFunctor, check_isomorphism, check_lp_functor
from .discrete_morse import zigzag_label


@dataclass
class MorseCoG:
    cog: ComplexOfGroups
    psi: CoGMorphismToConstant
    sigma: list
    flow: object
    report: Report


def zigzag_transfer(F, Phi, zz):
    """Accumulated transfer of a zigzag in the quotient; identities contribute 1."""
    C, G = F.base, F.group
    tau = Phi.tau
    acc = 0
    for i, p in enumerate(zz):
        if len(p) > 1:
            acc = G.mul[tau[C.homset(p[0], p[-1])[0]]][acc]
        if i + 1 < len(zz) and zz[i + 1][0] != p[-1]:
            f = C.homset(zz[i + 1][0], p[-1])[0]
            acc = G.mul[G.inv[tau[f]]][acc]
    return acc


def morse_cog(F, Phi, flowY, check=True):
    """Groups of critical cells, conjugation by accumulated transfers along zigzags."""
    G = F.group
    Fl = flowY.category
    ctx = flowY.context
    crit = flowY.critical
    groups = [F.groups[y] for y in crit]
    sigma = [zigzag_transfer(F, Phi, zz) for zz in flowY.zigzags]
    rep = Report("morse_cog")
    twisted = 0
    for m, zz in enumerate(flowY.zigzags):
        src, dst = groups[Fl.src[m]], groups[Fl.dst[m]]
        for e in ctx.expansions(zz):
            if ctx.normalize(e) != zz:
                raise VerificationError(f"expansion of {zigzag_label(flowY.complex, zz)} left its class")
            se = zigzag_transfer(F, Phi, e)
            if all(G.conj(se, k) == G.conj(sigma[m], k) for k in src):
                continue
            # agreement up to an inner twist of the target group
            d = G.mul[se][G.inv[sigma[m]]]
            if d in dst:
                twisted += 1
                continue
            rep.add("representative_disagreement", morphism=m, label=Fl.mor_labels[m])
    if twisted:
        rep.note = f"{twisted} representatives agree only up to a twist in the target group"
    if not rep.ok:
        raise VerificationError("Morse complex of groups depends on the representative", rep)
    homs = [GroupHom(groups[Fl.src[m]], groups[Fl.dst[m]],
                     {k: G.conj(sigma[m], k) for k in groups[Fl.src[m]]}) for m in range(Fl.n_mor)]
    order_twist = {(m, m2): G.mul[sigma[m]][G.inv[sigma[m2]]] for m in range(Fl.n_mor) for m2 in Fl.up[m]}
    pair_twist = {(m1, m2): G.prod(sigma[m2], sigma[m1], G.inv[sigma[Fl.compose(m1, m2)]])
                  for m1, m2 in Fl.composable_pairs()}
    Mc = ComplexOfGroups(Fl, G, groups, homs, order_twist, pair_twist, dict(enumerate(sigma)))
    Psi = CoGMorphismToConstant(G, [{k: k for k in H} for H in groups], list(sigma))
    if check:
        for sub in (validate_cog(Mc), validate_cog_morphism(Psi, Mc)):
            if not sub.ok:
                raise VerificationError("Morse complex of groups failed validation", sub)
    return MorseCoG(Mc, Psi, sigma, flowY, rep)


def project_zigzag(Qd, zz_x, X, Y):
    """Image of a zigzag of X in the quotient complex Y."""
    return tuple(tuple(Y.index[Qd.x_to_y[X.simplices[i]]] for i in p) for p in zz_x)


@dataclass
class FlowQuotient:
    quotient: object      # QuotientData of the induced action
    projection: LPFunctor  # lifted flow category -> quotient flow category
    iso: LPFunctor         # orbit category -> quotient flow category


def quotient_flow_iso(act, flowX, flowY, Qd):
    """The orbit category of the induced action is the quotient flow category."""
    X, Y = flowX.complex, flowY.complex
    FX, FY = flowX.category, flowY.category
    obj = [flowY.obj_of.get(Y.index[Qd.x_to_y[X.simplices[i]]], -1) for i in flowX.critical]
    mor = []
    for zz in flowX.zigzags:
        img = project_zigzag(Qd, zz, X, Y)
        nf = flowY.context.normalize(img)
        if nf != img or nf not in flowY.mor_of:
            raise VerificationError(f"projection of {zigzag_label(X, zz)} is not a quotient normal form")
        mor.append(flowY.mor_of[nf])
    P = LPFunctor(obj, mor)
    rep = check_lp_functor(P, FX, FY)
    if sorted(set(obj)) != list(range(FY.n_obj)) or sorted(set(mor)) != list(range(FY.n_mor)):
        rep.add("projection_not_surjective")
    if not rep.ok:
        raise VerificationError("projection to the quotient flow category failed", rep)
    Qf = quotient_lp(act)
    e_obj, e_mor = [], []
    for orb in Qf.obj_orbits:
        images = {obj[x] for x in orb}
        if len(images) != 1:
            rep.add("orbit_splits", objects=orb)
        e_obj.append(min(images))
    for orb in Qf.mor_orbits:
        images = {mor[m] for m in orb}
        if len(images) != 1:
            rep.add("orbit_splits", morphisms=orb)
        e_mor.append(min(images))
    E = LPFunctor(e_obj, e_mor)
    if rep.ok:
        rep.extend(check_isomorphism(E, Qf.quotient, FY))
    if not rep.ok:
        raise VerificationError("quotient of the lifted flow category is not the quotient flow category", rep)
    return FlowQuotient(Qf, P, E)


def lift_zigzag(A, Qd, LT, lifted, zz):
    """Unique lift of a quotient zigzag starting at the lift of its source."""
    X, Y = A.complex, Qd.complex
    cur = X.simplices[LT.lift[zz[0][0]]]
    out = []
    for i, p in enumerate(zz):
        path = [cur]
        for y in p[1:]:
            cands = [f for f in X.faces(cur) if Qd.x_to_y[f] == Y.simplices[y]]
            if len(cands) != 1:
                raise VerificationError(f"face lift of {Y.label(Y.simplices[y])} not unique")
            cur = cands[0]
            path.append(cur)
        out.append(tuple(X.index[s] for s in path))
        if i + 1 < len(zz):
            cur = lifted.upper_of[cur]
    return tuple(out)


def commuting_lifts(A, Qd, LT, fq, flowX, flowY, mcog):
    """Lifts and transfers on the lifted flow category that reproduce (M, Psi)."""
    G = A.group
    act_q = fq.quotient
    E = fq.iso
    FX = flowX.category
    sigma = mcog.sigma
    rep = Report("commuting_lifts")
    table = A.simplex_table()
    lift = []
    for q in range(act_q.quotient.n_obj):
        y = flowY.critical[E.obj_map[q]]
        lift.append(flowX.obj_of[LT.lift[y]])
    transfer = []
    for qm in range(act_q.quotient.n_mor):
        m = E.mor_map[qm]
        transfer.append(sigma[m])
        zz = flowY.zigzags[m]
        up = lift_zigzag(A, Qd, LT, flowX.matching, zz)
        if up not in flowX.mor_of:
            rep.add("lift_not_normal", morphism=m)
            continue
        end = table[G.inv[sigma[m]]][LT.lift[zz[-1][-1]]]
        if up[-1][-1] != end:
            rep.add("lift_endpoint", morphism=m, label=flowY.category.mor_labels[m])
        mx = flowX.mor_of[up]
        cands = [f for f in act_q.mor_orbits[qm]
                 if FX.src[f] == flowX.obj_of[up[0][0]] and FX.dst[f] == flowX.obj_of[end]]
        if cands != [mx]:
            rep.add("lift_not_unique", morphism=m, count=len(cands))
    if not rep.ok:
        raise VerificationError("lifted zigzags do not realise the transfers", rep)
    LT2 = LiftTransfer(lift, transfer, LT.seed)
    sub = check_lift_transfer(act_q.action, act_q, LT2)
    if not sub.ok:
        raise VerificationError("lifts on the flow category are not valid", sub)
    F2, Psi2 = cog_from_action(act_q.action, act_q, LT2)
    Mc = mcog.cog
    for q in range(act_q.quotient.n_obj):
        if F2.groups[q] != Mc.groups[E.obj_map[q]]:
            rep.add("group_mismatch", object=q)
    for qm in range(act_q.quotient.n_mor):
        m = E.mor_map[qm]
        if F2.homs[qm].map != Mc.homs[m].map:
            rep.add("hom_mismatch", morphism=qm)
        if Psi2.tau[qm] != mcog.psi.tau[m]:
            rep.add("tau_mismatch", morphism=qm)
    for (a, b), t in F2.pair_twist.items():
        if Mc.pair_twist.get((E.mor_map[a], E.mor_map[b])) != t:
            rep.add("twist_mismatch", pair=(a, b))
    for (a, b), t in F2.order_twist.items():
        if Mc.order_twist.get((E.mor_map[a], E.mor_map[b])) != t:
            rep.add("order_twist_mismatch", pair=(a, b))
    if not rep.ok:
        raise VerificationError("pulled-back data differs from the Morse complex of groups", rep)
    return LT2, (F2, Psi2)
