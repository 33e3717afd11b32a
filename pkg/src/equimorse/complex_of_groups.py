"""Complexes of groups over LP-categories and morphisms to constant complexes.

All local groups are subgroups of one ambient finite group, so twisting
elements and transfers are plain element ids of that group.
"""

from dataclasses import dataclass, field

from .errors import Report
from .group_core import GroupHom


@dataclass
class ComplexOfGroups:
    base: object
    group: object
    groups: list
    homs: list
    order_twist: dict
    pair_twist: dict
    conj_by: dict = field(default_factory=dict)

    def twist(self, f, g):
        return self.pair_twist.get((f, g), 0)


@dataclass
class CoGMorphismToConstant:
    group: object
    inj: list
    tau: list


def _identity_hom(H):
    return GroupHom(H, H, {k: k for k in H})


def constant_cog(C, G):
    H = G.whole()
    F = ComplexOfGroups(
        C, G, [H] * C.n_obj, [_identity_hom(H) for _ in range(C.n_mor)],
        {(f, g): 0 for f in range(C.n_mor) for g in C.up[f]},
        {(f, g): 0 for f, g in C.composable_pairs()},
        {f: 0 for f in range(C.n_mor)},
    )
    Phi = CoGMorphismToConstant(G, [{k: k for k in H} for _ in range(C.n_obj)], [0] * C.n_mor)
    return F, Phi


def cog_from_action(A, Qd, LT):
    """Stabilisers of lifts, conjugation by transfers, and the inclusion into G."""
    G = A.group
    Q = Qd.quotient
    sigma = LT.transfer
    groups = [A.stabilizer(LT.lift[y]) for y in range(Q.n_obj)]
    homs = []
    for h in range(Q.n_mor):
        src, dst = groups[Q.src[h]], groups[Q.dst[h]]
        homs.append(GroupHom(src, dst, {k: G.conj(sigma[h], k) for k in src}))
    order_twist = {(h, h2): G.mul[sigma[h]][G.inv[sigma[h2]]] for h in range(Q.n_mor) for h2 in Q.up[h]}
    pair_twist = {}
    for h1, h2 in Q.composable_pairs():
        pair_twist[h1, h2] = G.prod(sigma[h2], sigma[h1], G.inv[sigma[Q.compose(h1, h2)]])
    F = ComplexOfGroups(Q, G, groups, homs, order_twist, pair_twist, {h: sigma[h] for h in range(Q.n_mor)})
    Phi = CoGMorphismToConstant(G, [{k: k for k in H} for H in groups], list(sigma))
    return F, Phi


def validate_cog(F):
    rep = Report("validate_cog")
    C, G = F.base, F.group
    for f in range(C.n_mor):
        x, y = C.src[f], C.dst[f]
        phi = F.homs[f]
        if phi.source != F.groups[x] or phi.target != F.groups[y]:
            rep.add("hom_typing", morphism=f)
            continue
        d = phi.defect()
        if d:
            rep.add("not_homomorphism", morphism=f, defect=d)
        elif not phi.is_injective():
            rep.add("not_injective", morphism=f)
    for x in range(C.n_obj):
        if any(k != v for k, v in F.homs[C.ident[x]].map.items()):
            rep.add("identity_hom", object=x)
    if not rep.ok:
        return rep
    for f in range(C.n_mor):
        y = C.dst[f]
        for f2 in C.up[f]:
            t = F.order_twist.get((f, f2))
            if t is None:
                rep.add("order_twist_missing", pair=(f, f2))
                continue
            if t not in F.groups[y]:
                rep.add("order_twist_outside", pair=(f, f2))
            if f2 == f and t != 0:
                rep.add("order_twist_reflexive", morphism=f)
            for k in F.groups[C.src[f]]:
                if F.homs[f](k) != G.conj(t, F.homs[f2](k)):
                    rep.add("order_twist_conjugation", pair=(f, f2), element=k)
                    break
            for f3 in C.up[f2]:
                t3 = F.order_twist.get((f, f3))
                if t3 is not None and G.mul[t][F.order_twist.get((f2, f3), 0)] != t3:
                    rep.add("order_twist_associativity", triple=(f, f2, f3))
    for f1, f2 in C.composable_pairs():
        g = F.pair_twist.get((f1, f2))
        if g is None:
            rep.add("pair_twist_missing", pair=(f1, f2))
            continue
        z = C.dst[f2]
        if g not in F.groups[z]:
            rep.add("pair_twist_outside", pair=(f1, f2))
        if (C.is_identity(f1) or C.is_identity(f2)) and g != 0:
            rep.add("unit_twist", pair=(f1, f2))
        h = C.compose(f1, f2)
        for k in F.groups[C.src[f1]]:
            if F.homs[f2](F.homs[f1](k)) != G.conj(g, F.homs[h](k)):
                rep.add("pair_twist_conjugation", pair=(f1, f2), element=k)
                break
    if not rep.ok:
        return rep
    # cocycle: g(f2,f3) g(f1,f3f2) = F(f3)(g(f1,f2)) g(f2f1,f3)
    for f1, f2 in C.composable_pairs():
        for w in C.out[C.dst[f2]]:
            for f3 in C.hom[C.dst[f2], w]:
                lhs = G.mul[F.twist(f2, f3)][F.twist(f1, C.compose(f2, f3))]
                rhs = G.mul[F.homs[f3](F.twist(f1, f2))][F.twist(C.compose(f1, f2), f3)]
                if lhs != rhs:
                    rep.add("cocycle", triple=(f1, f2, f3))
    return rep


def validate_cog_morphism(Phi, F):
    rep = Report("validate_cog_morphism")
    C, G = F.base, F.group
    for x in range(C.n_obj):
        inj = Phi.inj[x]
        if set(inj) != set(F.groups[x].members):
            rep.add("injection_domain", object=x)
            continue
        if len(set(inj.values())) != len(inj):
            rep.add("injection_not_injective", object=x)
        if any(inj[G.mul[a][b]] != G.mul[inj[a]][inj[b]] for a in inj for b in inj):
            rep.add("injection_not_homomorphism", object=x)
        if Phi.tau[C.ident[x]] != 0:
            rep.add("tau_identity", object=x)
    if not rep.ok:
        return rep
    for f in range(C.n_mor):
        x, y = C.src[f], C.dst[f]
        t = Phi.tau[f]
        for k in F.groups[x]:
            if G.conj(t, Phi.inj[x][k]) != Phi.inj[y].get(F.homs[f](k)):
                rep.add("twisting_law", morphism=f, element=k)
                break
        for f2 in C.up[f]:
            tw = F.order_twist.get((f, f2), 0)
            if tw not in Phi.inj[y] or G.mul[Phi.inj[y][tw]][Phi.tau[f2]] != t:
                rep.add("order_compatibility", pair=(f, f2))
    for f1, f2 in C.composable_pairs():
        z = C.dst[f2]
        g = F.twist(f1, f2)
        if g not in Phi.inj[z]:
            rep.add("composition_law", pair=(f1, f2))
            continue
        if G.mul[Phi.inj[z][g]][Phi.tau[C.compose(f1, f2)]] != G.mul[Phi.tau[f2]][Phi.tau[f1]]:
            rep.add("composition_law", pair=(f1, f2))
    return rep


def dump_cog(F, Phi=None):
    C, G = F.base, F.group
    lines = []
    for x in range(C.n_obj):
        lines.append(f"grp {x} : " + " ".join(G.name(k) for k in F.groups[x]))
    for f in range(C.n_mor):
        c = F.conj_by.get(f)
        if c is not None and all(F.homs[f](k) == G.conj(c, k) for k in F.groups[C.src[f]]):
            lines.append(f"hom {f} : conj {G.name(c)}")
        else:
            pairs = ", ".join(f"{G.name(k)}->{G.name(v)}" for k, v in sorted(F.homs[f].map.items()))
            lines.append(f"hom {f} : map {pairs}")
    for (f, f2), t in sorted(F.order_twist.items()):
        if f != f2:
            lines.append(f"order {f},{f2} = {G.name(t)}")
    for (f, g), t in sorted(F.pair_twist.items()):
        if not (C.is_identity(f) or C.is_identity(g)):
            lines.append(f"twist {f},{g} = {G.name(t)}")
    if Phi is not None:
        for f in range(C.n_mor):
            lines.append(f"tau {f} = {G.name(Phi.tau[f])}")
    return "\n".join(lines) + "\n"
