"""Generators of small test instances shared by the test modules."""

import random
from pathlib import Path

from equimorse.discrete_morse import Matching, validate_matching
from equimorse.group_action import SimplicialAction, action_from_vertex_perms, load_action
from equimorse.group_core import trivial_group
from equimorse.simplicial_complex import SimplicialComplex, parse_complex_text

DATA = Path(__file__).resolve().parent.parent / "data" / "annulus"


def annulus():
    X = parse_complex_text((DATA / "complex.txt").read_text())
    return load_action(X, (DATA / "group.txt").read_text())


def annulus_lifts_text():
    return (DATA / "lifts.txt").read_text()


def annulus_matching_text():
    return (DATA / "matching.txt").read_text()


def acting(simplices, gens):
    """Action generated by vertex maps given as dicts name -> name."""
    X = SimplicialComplex(simplices)
    pos = {v: i for i, v in enumerate(X.vertices)}
    names = [f"g{i}" for i in range(len(gens))] if not isinstance(gens, dict) else list(gens)
    maps = gens if not isinstance(gens, dict) else list(gens.values())
    perms = [[pos[m.get(v, v)] for v in X.vertices] for m in maps]
    return action_from_vertex_perms(X, names, perms)


def trivial(simplices):
    X = SimplicialComplex(simplices)
    return SimplicialAction(trivial_group(len(X.vertices)), X)


def polygon(n):
    """Subdivided n-gon: corners v_i, midpoints m_i."""
    return [(f"v{i}", f"m{i}") for i in range(n)] + [(f"m{i}", f"v{(i + 1) % n}") for i in range(n)]


def chain_polygon(n):
    """Each side v_i v_(i+1) replaced by the path v_i a_i b_i v_(i+1)."""
    out = []
    for i in range(n):
        out += [(f"v{i}", f"a{i}"), (f"a{i}", f"b{i}"), (f"b{i}", f"v{(i + 1) % n}")]
    return out


def chain_rotation(n):
    return {f"{c}{i}": f"{c}{(i + 1) % n}" for c in "vab" for i in range(n)}


def rotation(n, k=1, extra=None):
    m = {f"v{i}": f"v{(i + k) % n}" for i in range(n)}
    m.update({f"m{i}": f"m{(i + k) % n}" for i in range(n)})
    m.update(extra or {})
    return m


def reflection(n):
    m = {f"v{i}": f"v{(-i) % n}" for i in range(n)}
    m.update({f"m{i}": f"m{(-i - 1) % n}" for i in range(n)})
    return m


def cone(simplices, apex="a"):
    return [tuple(s) + (apex,) for s in simplices]


def symmetric_actions():
    """Regular actions on complexes with at most 25 simplices."""
    out = []
    for n in (3, 4):
        out.append((f"chain-polygon{n}-cyclic", acting(chain_polygon(n), {"r": chain_rotation(n)})))
    for n in range(3, 7):
        out.append((f"polygon{n}-dihedral", acting(polygon(n), {"r": rotation(n), "s": reflection(n)})))
    for n in (3, 4, 5):
        out.append((f"polygon{n}-reflection", acting(polygon(n), {"s": reflection(n)})))
    for n in (4, 6):
        out.append((f"polygon{n}-antipodal", acting(polygon(n), {"t": rotation(n, n // 2)})))
    out.append(("polygon6-z3", acting(polygon(6), {"r": rotation(6, 2)})))
    out.append(("polygon6-d3", acting(polygon(6), {"r": rotation(6, 2), "s": reflection(6)})))
    out.append(("cone3-dihedral", acting(cone(polygon(3)), {"r": rotation(3), "s": reflection(3)})))
    out.append(("path-reflection", acting([("p0", "p1"), ("p1", "p2")], {"s": {"p0": "p2", "p2": "p0"}})))
    two_tri = [("a0", "b0", "c0"), ("a1", "b1", "c1")]
    out.append(("two-triangles-swap", acting(two_tri, {"t": {"a0": "a1", "a1": "a0", "b0": "b1", "b1": "b0",
                                                              "c0": "c1", "c1": "c0"}})))
    edges3 = [(f"x{i}", f"y{i}") for i in range(3)]
    cyc3 = {f"{c}{i}": f"{c}{(i + 1) % 3}" for c in "xy" for i in range(3)}
    out.append(("three-edges-cyclic", acting(edges3, {"r": cyc3})))
    out.append(("star-cyclic", acting(cone([("x0",), ("x1",), ("x2",)]), {"r": {"x0": "x1", "x1": "x2", "x2": "x0"}})))
    out.append(("cone-three-edges", acting(cone(edges3), {"r": cyc3})))
    paths2 = [("p0", "p1"), ("p1", "p2"), ("q0", "q1"), ("q1", "q2")]
    out.append(("two-paths-klein", acting(paths2, {
        "s": {"p0": "p2", "p2": "p0", "q0": "q2", "q2": "q0"},
        "t": {"p0": "q0", "q0": "p0", "p1": "q1", "q1": "p1", "p2": "q2", "q2": "p2"}})))
    two_polys = polygon(3) + [(a.upper(), b.upper()) for a, b in polygon(3)]
    rot, ref = rotation(3), reflection(3)
    rot.update({k.upper(): v.upper() for k, v in rotation(3).items()})
    ref.update({k.upper(): v.upper() for k, v in reflection(3).items()})
    swap = {v: (v.upper() if v.islower() else v.lower()) for s in two_polys for v in s}
    out.append(("two-polygons-d3xz2", acting(two_polys, {"r": rot, "s": ref, "t": swap})))
    out.append(("triangle-trivial", trivial([("a", "b", "c")])))
    out.append(("sphere-trivial", trivial([("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")])))
    return out


def pure_two_dim_actions():
    """Actions on pure 2-dimensional complexes; every morphism of the face poset
    lies in a composable pair, so the axioms see every table entry."""
    out = []
    for n in (3, 4, 5):
        out.append((f"cone{n}-dihedral", acting(cone(polygon(n)), {"r": rotation(n), "s": reflection(n)})))
    for n in (3, 4):
        out.append((f"cone{n}-reflection", acting(cone(polygon(n)), {"s": reflection(n)})))
    out.append(("cone6-d3", acting(cone(polygon(6)), {"r": rotation(6, 2), "s": reflection(6)})))
    edges3 = [(f"x{i}", f"y{i}") for i in range(3)]
    out.append(("cone-three-edges", acting(cone(edges3), {"r": {f"{c}{i}": f"{c}{(i + 1) % 3}"
                                                                for c in "xy" for i in range(3)}})))
    two_tri = [("a0", "b0", "c0"), ("a1", "b1", "c1")]
    out.append(("two-triangles-swap", acting(two_tri, {"t": {"a0": "a1", "a1": "a0", "b0": "b1", "b1": "b0",
                                                              "c0": "c1", "c1": "c0"}})))
    out.append(("annulus", annulus()))
    return out


def random_complex(rng, max_simplices=25, n_vertices=(3, 7), max_dim=3):
    vs = [chr(ord("a") + i) for i in range(rng.randint(*n_vertices))]
    sims = set()
    for _ in range(40):
        s = tuple(sorted(rng.sample(vs, rng.randint(1, min(max_dim + 1, len(vs))))))
        if len(SimplicialComplex(list(sims | {s}))) > max_simplices:
            break
        sims.add(s)
    return SimplicialComplex(list(sims))


def random_matching(X, rng):
    """Greedy random acyclic matching."""
    pairs, used = [], set()
    cand = [(s, f) for s in X.simplices for f in X.facets(s)]
    rng.shuffle(cand)
    for s, f in cand:
        if s in used or f in used:
            continue
        M = Matching(pairs + [(s, f)])
        if validate_matching(X, M).ok:
            pairs.append((s, f))
            used |= {s, f}
    return Matching(pairs)


def rng_for(seed):
    return random.Random(seed)


# standard minimal triangulations
SPHERE = [("0", "1", "2"), ("0", "1", "3"), ("0", "2", "3"), ("1", "2", "3")]
TORUS = sorted({tuple(sorted((str(i), str((i + 1) % 7), str((i + 3) % 7)))) for i in range(7)}
               | {tuple(sorted((str(i), str((i + 2) % 7), str((i + 3) % 7)))) for i in range(7)})
RP2 = [("0", "1", "2"), ("0", "2", "3"), ("0", "3", "4"), ("0", "4", "5"), ("0", "1", "5"),
       ("1", "2", "4"), ("2", "3", "5"), ("1", "3", "4"), ("2", "4", "5"), ("1", "3", "5")]
