"""Finite permutation groups stored by multiplication table.

Elements are integers; 0 is the identity and the rest follow the order in
which closure discovers them. Products compose permutations right to left,
so ``mul[a][b]`` acts by ``b`` first and then ``a``.
"""

import re
from collections import deque
from dataclasses import dataclass

from .errors import InputError

MAX_ORDER = 10_000


class FiniteGroup:
    def __init__(self, n_points, perms, gen_names=None, max_order=MAX_ORDER):
        self.n_points = n_points
        gens = [tuple(p) for p in perms]
        for p in gens:
            if sorted(p) != list(range(n_points)):
                raise ValueError(f"not a permutation of {n_points} points: {p}")
        self.gen_names = list(gen_names) if gen_names else [f"g{i}" for i in range(len(gens))]
        self.generator_perms = gens

        ident = tuple(range(n_points))
        elements = [ident]
        words = [()]
        index = {ident: 0}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            pa = elements[a]
            for gi, q in enumerate(gens):
                c = tuple(pa[i] for i in q)
                if c not in index:
                    if len(elements) >= max_order:
                        raise ValueError("group too large")
                    index[c] = len(elements)
                    elements.append(c)
                    words.append(words[a] + (gi,))
                    queue.append(index[c])

        self.perms = elements
        self._index = index
        n = len(elements)
        self.n_elements = n
        self.identity = 0
        self.mul = [[index[tuple(pa[i] for i in pb)] for pb in elements] for pa in elements]
        self.inv = [row.index(0) for row in self.mul]
        self.element_names = [_word_name(w, self.gen_names) for w in words]
        self.generators = [index[p] for p in gens]

    def __len__(self):
        return self.n_elements

    def __repr__(self):
        return f"FiniteGroup(order={self.n_elements})"

    def elements(self):
        return range(self.n_elements)

    def element_of_perm(self, perm):
        return self._index[tuple(perm)]

    def act(self, g, point):
        return self.perms[g][point]

    def prod(self, *elems):
        r = 0
        for e in elems:
            r = self.mul[r][e]
        return r

    def conj(self, g, k):
        return self.mul[self.mul[g][k]][self.inv[g]]

    def name(self, g):
        return self.element_names[g]

    def element(self, word):
        """Look up an element from a word such as ``r^2*s`` or ``e``."""
        word = word.strip()
        if word in ("e", "1", ""):
            return 0
        g = 0
        for part in word.split("*"):
            m = re.fullmatch(r"(\w+?)(?:\^(-?\d+))?", part.strip())
            if not m or m.group(1) not in self.gen_names:
                raise KeyError(f"unknown word {word!r}")
            x = self.generators[self.gen_names.index(m.group(1))]
            k = int(m.group(2) or 1)
            if k < 0:
                x, k = self.inv[x], -k
            for _ in range(k):
                g = self.mul[g][x]
        return g

    def order_of(self, g):
        k, x = 1, g
        while x != 0:
            x = self.mul[x][g]
            k += 1
        return k

    def whole(self):
        return Subgroup(self, range(self.n_elements))

    def trivial(self):
        return Subgroup(self, [0])


def _word_name(word, gen_names):
    if not word:
        return "e"
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        k = j - i
        parts.append(gen_names[word[i]] + (f"^{k}" if k > 1 else ""))
        i = j
    return "*".join(parts)


def group_from_generators(n_points, perms, gen_names=None, max_order=MAX_ORDER):
    return FiniteGroup(n_points, perms, gen_names, max_order)


def trivial_group(n_points=0):
    return FiniteGroup(n_points, [])


class Subgroup:
    """A subset of ``parent`` closed under products and inverses."""

    __slots__ = ("parent", "members", "_set")

    def __init__(self, parent, members):
        self.parent = parent
        self.members = tuple(sorted(set(members)))
        self._set = frozenset(self.members)

    def __contains__(self, g):
        return g in self._set

    def __repr__(self):
        return f"Subgroup({list(self.members)})"

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.parent is other.parent and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def is_closed(self):
        G = self.parent
        s = self._set
        return 0 in s and all(G.mul[a][b] in s for a in s for b in s) and all(G.inv[a] in s for a in s)

    def names(self):
        return [self.parent.name(g) for g in self.members]


def subgroup_generated(G, elems):
    members = {0}
    frontier = list(set(elems) - members)
    members.update(frontier)
    while frontier:
        new = []
        for a in list(members):
            for b in frontier:
                for c in (G.mul[a][b], G.mul[b][a]):
                    if c not in members:
                        members.add(c)
                        new.append(c)
        frontier = new
    return Subgroup(G, members)


def all_subgroups(G):
    """Every subgroup, as joins of cyclic subgroups; sorted by (order, members)."""
    cyclic = {frozenset(subgroup_generated(G, [g]).members) for g in G.elements()}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        new = []
        for H in frontier:
            for C in cyclic:
                if not C <= H:
                    J = frozenset(subgroup_generated(G, H | C).members)
                    if J not in found:
                        found.add(J)
                        new.append(J)
        frontier = new
    return [Subgroup(G, sorted(H)) for H in sorted(found, key=lambda h: (len(h), sorted(h)))]


@dataclass
class GroupHom:
    source: Subgroup
    target: Subgroup
    map: dict

    def __call__(self, k):
        return self.map[k]

    def is_injective(self):
        return len(set(self.map.values())) == len(self.map)

    def is_surjective(self):
        return set(self.map.values()) == set(self.target.members)

    def image(self):
        return sorted(set(self.map.values()))

    def defect(self):
        """First witness that this is not a homomorphism into target, else None."""
        G = self.source.parent
        if set(self.map) != set(self.source.members):
            return ("domain", sorted(set(self.map) ^ set(self.source.members)))
        for k, v in self.map.items():
            if v not in self.target:
                return ("image", k)
        for a in self.source:
            for b in self.source:
                if self.map[G.mul[a][b]] != G.mul[self.map[a]][self.map[b]]:
                    return ("multiplicative", (a, b))
        return None


def conjugation_hom(G, g, H, target=None):
    m = {k: G.conj(g, k) for k in H}
    if target is None:
        target = subgroup_generated(G, m.values())
    return GroupHom(H, target, m)


def compose_homs(second, first):
    return GroupHom(first.source, second.target, {k: second.map[v] for k, v in first.map.items()})


@dataclass
class CosetSpace:
    subgroup: Subgroup
    reps: list
    class_of: list

    def rep_of(self, g):
        return self.reps[self.class_of[g]]

    def __len__(self):
        return len(self.reps)


def left_cosets(H):
    G = H.parent
    class_of = [-1] * G.n_elements
    reps = []
    for g in G.elements():
        if class_of[g] < 0:
            c = len(reps)
            reps.append(g)
            for h in H:
                class_of[G.mul[g][h]] = c
    return CosetSpace(H, reps, class_of)


_GEN_LINE = re.compile(r"gen\s+(\w+)\s*=\s*(.*)")
_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_group_text(text, vertex_names):
    """Parse ``gen <name> = <cycles>`` lines into (names, permutations)."""
    pos = {v: i for i, v in enumerate(vertex_names)}
    names, perms = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _GEN_LINE.fullmatch(line)
        if not m:
            raise InputError(f"expected 'gen <name> = <cycles>', got {raw!r}", lineno)
        name, body = m.group(1), m.group(2).strip()
        if name in names:
            raise InputError(f"duplicate generator {name}", lineno)
        if _CYCLE.sub("", body).strip():
            raise InputError(f"bad cycle notation {body!r}", lineno)
        perm = list(range(len(vertex_names)))
        seen = set()
        for cyc in _CYCLE.findall(body):
            pts = cyc.split()
            for v in pts:
                if v not in pos:
                    raise InputError(f"unknown vertex {v!r}", lineno)
                if v in seen:
                    raise InputError(f"vertex {v!r} appears twice", lineno)
                seen.add(v)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                perm[pos[a]] = pos[b]
        names.append(name)
        perms.append(perm)
    return names, perms


def format_cycles(perm, vertex_names):
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(vertex_names[j])
            j = perm[j]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"
