"""End-to-end acceptance checks; each test reports one PASS/FAIL line."""

import copy
import itertools
import time

from equimorse.cli import _agree, nerve_degrees
from equimorse.complex_of_groups import CoGMorphismToConstant, validate_cog, validate_cog_morphism
from equimorse.development import canonical_witness, check_equivariant_iso, develop, nerve_vs_subdivision
from equimorse.discrete_morse import Matching, check_compatibility, flow_category, validate_matching
from equimorse.group_action import check_regularity
from equimorse.group_core import GroupHom
from equimorse.homology import nerve_homology
from equimorse.lp_category import find_isomorphism
from equimorse.morse_cog import morse_cog
from equimorse.simplicial_complex import SimplicialComplex, face_poset, simplicial_homology_oracle

import instances
from conftest import Setup


def all_matchings(Y, limit=400):
    cand = [(s, f) for s in Y.simplices for f in Y.facets(s)]
    out = []

    def rec(i, pairs, used):
        if len(out) >= limit:
            return
        if i == len(cand):
            out.append(Matching(pairs))
            return
        rec(i + 1, pairs, used)
        s, f = cand[i]
        if s not in used and f not in used:
            M = Matching(pairs + [(s, f)])
            if validate_matching(Y, M).ok:
                rec(i + 1, pairs + [(s, f)], used | {s, f})

    rec(0, [], frozenset())
    return out


def test_annulus_golden(annulus_pipeline, criterion):
    s = annulus_pipeline
    problems = []
    if s.Y.f_vector() != (4, 5, 2):
        problems.append(f"quotient f-vector {s.Y.f_vector()}")
    if not check_compatibility(s.F, s.Y, s.M).ok:
        problems.append("matching not compatible")
    if s.FY.category.n_obj != 9:
        problems.append(f"{s.FY.category.n_obj} flow objects")
    upper = s.X.index[s.X.simplices[s.LT.lift[s.Y.index[s.M.pairs[0][0]]]]]
    by_orbit = len(s.G) // len(s.lpa.stabilizer(upper))
    if not len(s.St) == by_orbit == 8:
        problems.append(f"lifted pairs {len(s.St)}, orbit count {by_orbit}")
    D = develop(s.mc.cog, s.mc.psi)
    w = canonical_witness(D, s.act, s.fq.quotient, s.LT2, s.fq.iso)
    if not check_equivariant_iso(D.action, s.act, w).found:
        problems.append("no equivariant isomorphism via witness")
    if not check_equivariant_iso(D.action, s.act).found:
        problems.append("equivariant search failed")
    H = nerve_homology(D.category, max_dim=nerve_degrees(D.category, s.X))
    if H.betti[:3] != [1, 1, 0] or any(H.torsion[:3]):
        problems.append(f"homology {H.betti} {H.torsion}")
    assert criterion(1, not problems, "; ".join(problems)), problems


def test_development_suite(criterion):
    t0 = time.time()
    problems = []
    acts = instances.symmetric_actions()
    for name, A in acts:
        if len(A.complex) > 25 or not check_regularity(A).ok:
            problems.append(f"{name}: not a small regular action")
            continue
        s = Setup(A)
        D = develop(s.F, s.Phi)
        res = check_equivariant_iso(D.action, s.lpa, canonical_witness(D, s.lpa, s.Qd, s.LT))
        if not res.found:
            problems.append(f"{name}: development not isomorphic to the face poset")
            continue
        if not nerve_vs_subdivision(D.category, res.functor, s.X).ok:
            problems.append(f"{name}: nerve differs from the subdivision")
        if not nerve_homology(D.category).same_as(simplicial_homology_oracle(s.X)):
            problems.append(f"{name}: homology differs")
    elapsed = time.time() - t0
    if len(acts) < 20:
        problems.append(f"only {len(acts)} actions")
    if elapsed > 60:
        problems.append(f"took {elapsed:.1f}s")
    assert criterion(2, not problems, f"{len(acts)} actions in {elapsed:.1f}s " + "; ".join(problems)), problems


def test_random_flow_suite(criterion):
    t0 = time.time()
    rng = instances.rng_for(2024)
    problems = []
    n = 60
    for i in range(n):
        X = instances.random_complex(rng)
        M = instances.random_matching(X, rng)
        fl = flow_category(X, M)
        H = nerve_homology(fl.category, max_dim=nerve_degrees(fl.category, X))
        if len(X) > 25 or not _agree(H, simplicial_homology_oracle(X)):
            problems.append(f"complex {i} f={X.f_vector()}")
    elapsed = time.time() - t0
    if elapsed > 120:
        problems.append(f"took {elapsed:.1f}s")
    assert criterion(3, not problems, f"{n} complexes in {elapsed:.1f}s " + "; ".join(problems)), problems


def mutants(F, Phi):
    """Every single-entry change of the transfer, twist and homomorphism tables."""
    G, C = F.group, F.base
    for f in range(C.n_mor):
        for g in G.elements():
            if g != Phi.tau[f]:
                tau = list(Phi.tau)
                tau[f] = g
                yield F, CoGMorphismToConstant(G, Phi.inj, tau)
    for key, t in F.pair_twist.items():
        for g in G.elements():
            if g != t:
                F2 = copy.copy(F)
                F2.pair_twist = dict(F.pair_twist)
                F2.pair_twist[key] = g
                yield F2, Phi
    for f in range(C.n_mor):
        h = F.homs[f]
        for k in h.map:
            for g in G.elements():
                if g != h.map[k]:
                    F2 = copy.copy(F)
                    F2.homs = list(F.homs)
                    m = dict(h.map)
                    m[k] = g
                    F2.homs[f] = GroupHom(h.source, h.target, m)
                    yield F2, Phi


def test_validators_and_mutations(criterion):
    problems = []
    for name, A in instances.symmetric_actions() + instances.pure_two_dim_actions():
        for coherent in (False, True):
            s = Setup(A, coherent=coherent)
            if not (validate_cog(s.F).ok and validate_cog_morphism(s.Phi, s.F).ok):
                problems.append(f"{name}: action complex of groups invalid")
            for M in all_matchings(s.Y, limit=200):
                if check_compatibility(s.F, s.Y, M).ok:
                    mc = morse_cog(s.F, s.Phi, flow_category(s.Y, M), check=False)
                    if not (validate_cog(mc.cog).ok and validate_cog_morphism(mc.psi, mc.cog).ok):
                        problems.append(f"{name}: Morse complex of groups invalid")
    valid = [(n, Setup(A)) for n, A in instances.pure_two_dim_actions()]
    valid.append(("annulus-seed1", Setup(instances.annulus(), seed=1)))
    total = missed = 0
    for name, s in valid:
        for F2, P2 in mutants(s.F, s.Phi):
            total += 1
            if validate_cog(F2).ok and validate_cog_morphism(P2, F2).ok:
                missed += 1
    if missed or len(valid) < 10:
        problems.append(f"{missed} of {total} mutants undetected on {len(valid)} instances")
    detail = f"{total} mutants on {len(valid)} instances " + "; ".join(problems[:5])
    assert criterion(4, not problems, detail), problems


def test_seed_invariance(criterion):
    wanted = ["polygon4-dihedral", "chain-polygon4-cyclic", "cone3-dihedral", "two-polygons-d3xz2"]
    acts = [(n, A) for n, A in instances.symmetric_actions() if n in wanted] + [("annulus", instances.annulus())]
    problems = []
    differing = 0
    for name, A in acts:
        setups = [Setup(A, seed=seed) for seed in (0, 1, 2)]
        differing += len({tuple(s.Phi.tau) for s in setups}) > 1
        devs = [develop(s.F, s.Phi) for s in setups]
        for a, b in itertools.combinations(devs, 2):
            if not find_isomorphism(a.category, b.category).found:
                problems.append(f"{name}: developments differ")
    if len(acts) != 5 or not differing:
        problems.append(f"{len(acts)} actions, {differing} with seed-dependent transfers")
    assert criterion(5, not problems, f"{len(acts)} actions x 3 seeds " + "; ".join(problems)), problems


def test_equivariant_collapse(criterion):
    problems = []
    found = []
    for name, A in instances.symmetric_actions() + instances.pure_two_dim_actions():
        s = Setup(A, coherent=True)
        for M in all_matchings(s.Y, limit=2000):
            crit = M.critical(s.Y)
            if len(crit) != 1 or len(crit[0]) != 1:
                continue
            y = s.Y.index[crit[0]]
            if len(s.F.groups[y]) != len(s.G) or not check_compatibility(s.F, s.Y, M).ok:
                continue
            mc = morse_cog(s.F, s.Phi, flow_category(s.Y, M))
            D = develop(mc.cog, mc.psi)
            H = nerve_homology(D.category, max_dim=nerve_degrees(D.category, s.X))
            point = H.betti[0] == 1 and not any(H.betti[1:]) and not any(H.torsion)
            if D.category.n_obj != 1 or len(mc.cog.groups[0]) != len(s.G) or not point:
                problems.append(name)
            found.append((name, len(s.G)))
            break
    if sum(order > 1 for _, order in found) < 3:
        problems.append(f"collapses found only for {found}")
    assert criterion(6, not problems, f"collapses on {sorted({n for n, _ in found})} " + "; ".join(problems)), problems


def test_surface_homology(criterion):
    expected = {
        "sphere": (instances.SPHERE, [1, 0, 1], [[], [], []]),
        "torus": (instances.TORUS, [1, 2, 1], [[], [], []]),
        "projective plane": (instances.RP2, [1, 0, 0], [[], [2], []]),
    }
    problems = []
    for name, (simplices, betti, torsion) in expected.items():
        X = SimplicialComplex(simplices)
        H = simplicial_homology_oracle(X)
        if H.betti != betti or H.torsion != torsion:
            problems.append(f"{name}: {H.betti} {H.torsion}")
        if not nerve_homology(face_poset(X)).same_as(H):
            problems.append(f"{name}: face poset nerve disagrees")
    assert criterion(7, not problems, "; ".join(problems)), problems
