import pytest

from equimorse.complex_of_groups import validate_cog, validate_cog_morphism
from equimorse.discrete_morse import (Matching, check_compatibility, flow_category, induced_flow_action,
                                      lift_matching)
from equimorse.errors import VerificationError
from equimorse.lp_category import check_isomorphism
from equimorse.morse_cog import commuting_lifts, morse_cog, quotient_flow_iso, zigzag_transfer

import instances
from conftest import Setup

S = lambda *v: tuple(sorted(v))  # noqa: E731
APEX_COLLAPSE = Matching([(S("a", "v0"), S("v0")), (S("a", "m0"), S("m0")), (S("a", "m0", "v0"), S("m0", "v0"))])


def test_annulus_morse_cog(annulus_pipeline):
    s = annulus_pipeline
    mc = s.mc
    assert mc.report.ok and mc.report.note is None
    assert validate_cog(mc.cog).ok and validate_cog_morphism(mc.psi, mc.cog).ok
    for k, y in enumerate(s.FY.critical):
        assert mc.cog.groups[k] == s.F.groups[y]
    C = s.FY.category
    assert all(mc.sigma[C.ident[x]] == 0 for x in range(C.n_obj))


def test_sigma_of_plain_paths_is_tau(annulus_pipeline):
    s = annulus_pipeline
    Q = s.F.base
    for m, zz in enumerate(s.FY.zigzags):
        if len(zz) == 1 and len(zz[0]) == 2:
            f = Q.homset(zz[0][0], zz[0][1])[0]
            assert zigzag_transfer(s.F, s.Phi, zz) == s.Phi.tau[f]


def test_annulus_quotient_and_lifts(annulus_pipeline):
    s = annulus_pipeline
    q = s.fq.quotient
    assert check_isomorphism(s.fq.iso, q.quotient, s.FY.category).ok
    assert len(s.LT2.lift) == s.FY.category.n_obj


def test_trivial_group_gives_trivial_groups():
    A = instances.trivial(instances.SPHERE)
    s = Setup(A)
    M = instances.random_matching(s.Y, instances.rng_for(5))
    mc = morse_cog(s.F, s.Phi, flow_category(s.Y, M))
    assert all(len(H) == 1 for H in mc.cog.groups)
    assert set(mc.sigma) == {0}


def apex_setup(coherent):
    A = dict(instances.pure_two_dim_actions())["cone3-dihedral"]
    return Setup(A, coherent=coherent)


def test_apex_collapse_needs_coherent_lifts():
    s = apex_setup(True)
    assert check_compatibility(s.F, s.Y, APEX_COLLAPSE).ok
    FY = flow_category(s.Y, APEX_COLLAPSE)
    mc = morse_cog(s.F, s.Phi, FY)
    assert FY.category.n_obj == 1
    assert len(mc.cog.groups[0]) == len(s.G) == 6

    scrambled = [seed for seed in range(6)
                 if not check_compatibility(Setup(s.A, seed=seed).F, s.Y, APEX_COLLAPSE).ok]
    assert scrambled


@pytest.mark.parametrize("name,A", instances.pure_two_dim_actions(),
                         ids=[n for n, _ in instances.pure_two_dim_actions()])
def test_lifted_flow_reproduces_morse_cog(name, A):
    s = Setup(A, coherent=True)
    rng = instances.rng_for(11)
    singles = [Matching([(u, l)]) for u in s.Y.simplices for l in s.Y.facets(u)]
    candidates = singles + [instances.random_matching(s.Y, rng) for _ in range(6)]
    used = 0
    for M in candidates:
        if not check_compatibility(s.F, s.Y, M).ok:
            continue
        used += 1
        FY = flow_category(s.Y, M)
        mc = morse_cog(s.F, s.Phi, FY)
        St = lift_matching(s.A, s.Qd, s.LT, M, s.F)
        FX = flow_category(s.X, St)
        act = induced_flow_action(s.A, FX)
        fq = quotient_flow_iso(act, FX, FY, s.Qd)
        commuting_lifts(s.A, s.Qd, s.LT, fq, FX, FY, mc)
    assert used >= 2


def test_incompatible_matching_refused():
    A = dict(instances.symmetric_actions())["path-reflection"]
    s = Setup(A)
    with pytest.raises(VerificationError):
        lift_matching(s.A, s.Qd, s.LT, Matching([(S("p0", "p1"), S("p1"))]), s.F)
