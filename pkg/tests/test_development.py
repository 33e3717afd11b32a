import copy

import pytest

from equimorse.complex_of_groups import constant_cog
from equimorse.development import (canonical_witness, check_base_change, check_equivariant_iso,
                                   check_quotient_clause, check_reproduces, develop, dump_development,
                                   nerve_vs_subdivision)
from equimorse.errors import VerificationError
from equimorse.group_core import group_from_generators
from equimorse.lp_category import LPFunctor, find_isomorphism, identity_functor, validate_lp
from equimorse.simplicial_complex import SimplicialComplex, face_poset

import instances
from conftest import Setup

SYMMETRIC = instances.symmetric_actions()


def test_constant_cog_develops_to_base():
    C = face_poset(SimplicialComplex([("a", "b", "c")]))
    G = group_from_generators(3, [[1, 2, 0]])
    dev = develop(*constant_cog(C, G))
    assert dev.category.n_obj == C.n_obj
    assert find_isomorphism(dev.category, C).found
    assert all(row == list(range(C.n_obj)) for row in dev.action.obj_act)


def test_free_action_develops_to_copies():
    A = dict(SYMMETRIC)["two-triangles-swap"]
    s = Setup(A)
    dev = develop(s.F, s.Phi)
    assert dev.category.n_obj == 2 * s.F.base.n_obj == len(s.X)


def test_annulus_development(annulus_setup):
    s = annulus_setup
    dev = develop(s.F, s.Phi)
    assert dev.report.ok
    assert dev.category.n_obj == len(s.X)
    assert validate_lp(dev.category).ok
    assert check_quotient_clause(dev).ok
    assert check_reproduces(dev, s.F, s.Phi).ok
    w = canonical_witness(dev, s.lpa, s.Qd, s.LT)
    assert check_equivariant_iso(dev.action, s.lpa, w).found
    searched = check_equivariant_iso(dev.action, s.lpa)
    assert searched.found


def test_equivariant_iso_needs_same_group(annulus_setup):
    s = annulus_setup
    dev = develop(s.F, s.Phi)
    other = copy.copy(s.lpa)
    other.group = instances.annulus().group
    assert check_equivariant_iso(dev.action, other).status == "none"


def test_non_equivariant_witness_is_not_trusted(annulus_setup):
    s = annulus_setup
    dev = develop(s.F, s.Phi)
    w = canonical_witness(dev, s.lpa, s.Qd, s.LT)
    G = s.G
    r = G.element("r")
    # composing with the action of r breaks equivariance but keeps an isomorphism
    bent = LPFunctor([s.lpa.obj_act[r][y] for y in w.obj_map], [s.lpa.mor_act[r][m] for m in w.mor_map])
    res = check_equivariant_iso(dev.action, s.lpa, bent)
    assert res.found and res.functor != bent


def test_invalid_pair_refused(annulus_setup):
    s = annulus_setup
    Phi = copy.copy(s.Phi)
    Phi.tau = [1] * len(s.Phi.tau)
    with pytest.raises(VerificationError):
        develop(s.F, Phi)


def test_base_change(annulus_setup):
    s = annulus_setup
    E = identity_functor(s.F.base)
    rep, res = check_base_change(s.F, s.Phi, s.F, s.Phi, E)
    assert rep.ok and res.found
    assert rep.note
    Phi2 = copy.copy(s.Phi)
    Phi2.tau = list(s.Phi.tau)
    f = next(f for f in s.F.base.non_identity() if s.Phi.tau[f])
    Phi2.tau[f] = 0
    rep2, res2 = check_base_change(s.F, s.Phi, s.F, Phi2, E)
    assert rep2.kinds() == ["transfers_differ"] and res2 is None


@pytest.mark.parametrize("name,A", SYMMETRIC, ids=[n for n, _ in SYMMETRIC])
def test_development_nerve_is_subdivision(name, A):
    s = Setup(A, seed=1)
    dev = develop(s.F, s.Phi)
    w = canonical_witness(dev, s.lpa, s.Qd, s.LT)
    res = check_equivariant_iso(dev.action, s.lpa, w)
    assert res.found
    assert nerve_vs_subdivision(dev.category, res.functor, s.X).ok


def test_dump_development(annulus_setup):
    s = annulus_setup
    text = dump_development(develop(s.F, s.Phi))
    acts = [l for l in text.splitlines() if l.startswith("act ")]
    assert len(acts) == 8 and acts[0].startswith("act e :")
