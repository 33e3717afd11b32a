import copy

import pytest

from equimorse.complex_of_groups import constant_cog, dump_cog, validate_cog, validate_cog_morphism
from equimorse.group_core import GroupHom, group_from_generators
from equimorse.simplicial_complex import SimplicialComplex, face_poset

import instances
from conftest import Setup

SYMMETRIC = instances.symmetric_actions()


def test_annulus_stabilizers(annulus_setup):
    s = annulus_setup
    Q = s.F.base
    orders = {Q.objects[y]: len(s.F.groups[y]) for y in range(Q.n_obj)}
    assert sorted(orders.values()) == [1] * 5 + [2] * 6
    assert orders["i0 i1 o1"] == orders["i0 o0 o1"] == 1
    assert s.F.groups[Q.objects.index("i0")].names() == ["e", "s"]


def test_annulus_transfers(annulus_setup):
    s = annulus_setup
    Q, G = s.F.base, s.G
    nontrivial = {Q.mor_labels[f]: G.name(s.Phi.tau[f]) for f in Q.non_identity() if s.Phi.tau[f]}
    # the only nontrivial transfer out of a 2-simplex is r^2 s
    two_dim = {k: v for k, v in nontrivial.items() if len(k.split(">")[0].split()) == 3}
    assert two_dim == {"i0 o0 o1 > o0 o1": "r^2*s"}
    assert validate_cog(s.F).ok
    assert validate_cog_morphism(s.Phi, s.F).ok


@pytest.mark.parametrize("name,A", SYMMETRIC, ids=[n for n, _ in SYMMETRIC])
@pytest.mark.parametrize("seed", [0, 3])
def test_action_cog_validates(name, A, seed):
    s = Setup(A, seed=seed)
    assert validate_cog(s.F).ok
    assert validate_cog_morphism(s.Phi, s.F).ok
    for f in range(s.F.base.n_mor):
        assert s.F.homs[f].is_injective()


def test_constant_cog():
    C = face_poset(SimplicialComplex([("a", "b", "c")]))
    G = group_from_generators(3, [[1, 2, 0]])
    F, Phi = constant_cog(C, G)
    assert validate_cog(F).ok and validate_cog_morphism(Phi, F).ok


def test_mutations_detected(annulus_setup):
    s = annulus_setup
    F, Phi = s.F, s.Phi
    f = next(f for f in F.base.non_identity() if F.base.src[f] == F.base.objects.index("i0 o0 o1")
             and F.base.dst[f] == F.base.objects.index("o0 o1"))
    bad = copy.copy(Phi)
    bad.tau = list(Phi.tau)
    bad.tau[f] = 0
    assert not validate_cog_morphism(bad, F).ok

    key = next(k for k, t in F.pair_twist.items() if t and not any(F.base.is_identity(m) for m in k))
    F2 = copy.copy(F)
    F2.pair_twist = dict(F.pair_twist)
    F2.pair_twist[key] = 0
    assert not (validate_cog(F2).ok and validate_cog_morphism(Phi, F2).ok)

    y = F.base.objects.index("i0")
    h = next(f for f in F.base.non_identity() if F.base.dst[f] == y and len(F.groups[F.base.src[f]]) == 2)
    F3 = copy.copy(F)
    F3.homs = list(F.homs)
    F3.homs[h] = GroupHom(F.homs[h].source, F.groups[y], {k: 0 for k in F.homs[h].source})
    assert not validate_cog(F3).ok


def test_dump_lists_every_morphism(annulus_setup):
    s = annulus_setup
    text = dump_cog(s.F, s.Phi)
    assert sum(1 for l in text.splitlines() if l.startswith("hom ")) == s.F.base.n_mor
    assert "tau" in text and "grp 0 : e s" in text
