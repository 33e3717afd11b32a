"""Finite abstract simplicial complexes and their face posets."""

from itertools import combinations

from .errors import InputError
from .homology import ChainComplex, homology
from .lp_category import CategoryBuilder


class SimplicialComplex:
    """Simplices are sorted tuples of vertex names, ordered by (dim, tuple)."""

    def __init__(self, simplices):
        closed = set()
        for s in simplices:
            s = tuple(sorted(s))
            if len(set(s)) != len(s):
                raise InputError(f"repeated vertex in simplex {s}")
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        self.simplices = sorted(closed, key=lambda s: (len(s), s))
        self.index = {s: i for i, s in enumerate(self.simplices)}
        self.vertices = [s[0] for s in self.simplices if len(s) == 1]

    def __len__(self):
        return len(self.simplices)

    def __contains__(self, s):
        return tuple(sorted(s)) in self.index

    def __repr__(self):
        return f"SimplicialComplex(f={self.f_vector()})"

    @property
    def dim(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def of_dim(self, d):
        return [s for s in self.simplices if len(s) == d + 1]

    def f_vector(self):
        return tuple(len(self.of_dim(d)) for d in range(self.dim + 1))

    def facets(self, s):
        """Codimension-one faces of ``s``."""
        if len(s) == 1:
            return []
        return [s[:i] + s[i + 1:] for i in range(len(s))]

    def faces(self, s):
        """All proper nonempty faces of ``s``."""
        return [f for k in range(1, len(s)) for f in combinations(s, k)]

    def cofaces(self, s):
        ss = set(s)
        return [t for t in self.simplices if len(t) > len(s) and ss <= set(t)]

    def maximal(self):
        cover = set()
        for s in self.simplices:
            cover.update(self.facets(s))
        return [s for s in self.simplices if s not in cover]

    def label(self, s):
        return " ".join(s)


def complex_from_maximal(simplices):
    return SimplicialComplex(simplices)


def parse_complex_text(text):
    simplices = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "simplex" or len(parts) < 2:
            raise InputError(f"expected 'simplex <v0> ...', got {raw!r}", lineno)
        if len(set(parts[1:])) != len(parts) - 1:
            raise InputError("repeated vertex", lineno)
        simplices.append(tuple(parts[1:]))
    return SimplicialComplex(simplices)


def format_complex(X):
    return "".join("simplex " + " ".join(s) + "\n" for s in X.maximal())


def face_poset(X):
    """One object per simplex, one morphism x -> x' whenever x' is a proper face of x."""
    b = CategoryBuilder("Fac")
    for s in X.simplices:
        b.add_object(X.label(s))
    mor = {}
    for s in X.simplices:
        i = X.index[s]
        for f in X.faces(s):
            j = X.index[f]
            mor[i, j] = b.add_mor(i, j, f"{X.label(s)} > {X.label(f)}")
    by_src = {}
    for (i, j), m in mor.items():
        by_src.setdefault(i, []).append((j, m))
    for (i, j), m in mor.items():
        for k, m2 in by_src.get(j, ()):
            b.comp[m, m2] = mor[i, k]
    C = b.build()
    C.face_mor = mor
    return C


def simplicial_chains(X):
    dims = [len(X.of_dim(d)) for d in range(X.dim + 1)]
    pos = [{s: i for i, s in enumerate(X.of_dim(d))} for d in range(X.dim + 1)]
    boundary = [[]]
    for d in range(1, X.dim + 1):
        boundary.append([[(pos[d - 1][f], (-1) ** i) for i, f in enumerate(X.facets(s))]
                         for s in X.of_dim(d)])
    return ChainComplex(dims, boundary)


def simplicial_homology_oracle(X):
    return homology(simplicial_chains(X))


def barycentric_subdivision(X):
    """Vertices are the simplices of X, named ``[a,b,...]``; simplices are chains."""
    def name(s):
        return "[" + ",".join(s) + "]"

    chains = []

    def extend(chain):
        top = chain[-1]
        ext = False
        for f in X.facets(top):
            extend(chain + [f])
            ext = True
        if not ext:
            chains.append(tuple(name(s) for s in chain))

    for s in X.maximal():
        extend([s])
    return SimplicialComplex(chains), name
