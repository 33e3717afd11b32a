"""Integral homology via Smith normal form."""

from dataclasses import dataclass, field
from math import gcd

from .errors import VerificationError

INT64_MAX = 2**63 - 1


def _check(x):
    if x > INT64_MAX or x < -INT64_MAX:
        raise OverflowError("matrix entry exceeds 64 bits during reduction")
    return x


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M, transforms=False):
    """Smith normal form of an integer matrix given as a list of rows.

    Returns ``(factors, rank)`` where ``factors`` are the nonzero invariant
    factors ``d1 | d2 | ...``. With ``transforms=True`` also returns
    unimodular ``U`` and ``V`` together with the diagonal ``D`` such that
    ``U M V = D``.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m) if transforms else None
    V = _identity(n) if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if transforms:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        ra, rs = A[dst], A[src]
        for k in range(n):
            if rs[k]:
                ra[k] = _check(ra[k] + q * rs[k])
        if transforms:
            ua, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ua[k] = _check(ua[k] + q * us[k])

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in A:
            if row[src]:
                row[dst] = _check(row[dst] + q * row[src])
        if transforms:
            for row in V:
                if row[src]:
                    row[dst] = _check(row[dst] + q * row[src])

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
            rest = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda r: r[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if transforms:
                U[t] = [-x for x in U[t]]
        t += 1
    factors = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    if transforms:
        return factors, len(factors), U, V, A
    return factors, len(factors)


def invariant_factors(diag):
    """Normalize positive diagonal entries into a divisibility chain."""
    d = sorted(abs(x) for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            a, b = d[i], d[j]
            g = gcd(a, b)
            d[i], d[j] = g, a * b // g
    return sorted(d)


def sparse_rank_torsion(rows, n_cols=None):
    """Rank and torsion of a sparse integer matrix ``{row: {col: val}}``.

    Unit pivots are eliminated sparsely; whatever remains is handed to the
    dense Smith normal form.
    """
    rows = {r: dict(v) for r, v in rows.items() if v}
    cols = {}
    for r, v in rows.items():
        for c in v:
            cols.setdefault(c, set()).add(r)
    rank = 0
    while True:
        pick = None
        for r in sorted(rows, key=lambda r: len(rows[r])):
            units = [c for c, x in rows[r].items() if x in (1, -1)]
            if units:
                c = min(units, key=lambda c: (len(cols[c]), c))
                pick = (r, c)
                break
        if pick is None:
            break
        r, c = pick
        prow = rows.pop(r)
        p = prow[c]
        for c2 in prow:
            cols[c2].discard(r)
        for i in list(cols[c]):
            row = rows[i]
            q = row[c] * p  # p is a unit, so q * p * ... clears the entry
            for c2, x in prow.items():
                v = _check(row.get(c2, 0) - q * x)
                if v:
                    if c2 not in row:
                        cols[c2].add(i)
                    row[c2] = v
                elif c2 in row:
                    del row[c2]
                    cols[c2].discard(i)
            if not row:
                del rows[i]
        del cols[c]
        rank += 1
    if not rows:
        return rank, []
    used_cols = sorted({c for v in rows.values() for c in v})
    where = {c: k for k, c in enumerate(used_cols)}
    dense = []
    for v in rows.values():
        line = [0] * len(used_cols)
        for c, x in v.items():
            line[where[c]] = x
        dense.append(line)
    factors, r2 = smith_normal_form(dense)
    return rank + r2, [d for d in invariant_factors(factors) if d > 1]


@dataclass
class ChainComplex:
    """``boundary[n]`` maps each n-cell index to a list of (face index, sign)."""

    dims: list
    boundary: list = field(default_factory=list)

    def matrix(self, n):
        rows = {}
        if 0 < n < len(self.dims):
            for j, faces in enumerate(self.boundary[n]):
                for i, s in faces:
                    rows.setdefault(i, {})
                    rows[i][j] = rows[i].get(j, 0) + s
        return rows

    def check_dd(self):
        for n in range(2, len(self.dims)):
            for j, faces in enumerate(self.boundary[n]):
                acc = {}
                for i, s in faces:
                    for k, t in self.boundary[n - 1][i]:
                        acc[k] = acc.get(k, 0) + s * t
                if any(acc.values()):
                    raise VerificationError(f"boundary of boundary nonzero at degree {n}, cell {j}")


@dataclass
class HomologyProfile:
    betti: list
    torsion: list

    def trimmed(self):
        b, t = list(self.betti), [list(x) for x in self.torsion]
        while len(b) > 1 and b[-1] == 0 and not t[-1]:
            b.pop()
            t.pop()
        return HomologyProfile(b, t)

    def same_as(self, other):
        a, b = self.trimmed(), other.trimmed()
        return a.betti == b.betti and a.torsion == b.torsion

    def euler(self):
        return sum((-1) ** n * b for n, b in enumerate(self.betti))

    def lines(self):
        out = []
        for n, (b, tor) in enumerate(zip(self.betti, self.torsion)):
            parts = []
            if b:
                parts.append("Z" if b == 1 else f"Z^{b}")
            parts += [f"Z/{d}" for d in tor]
            out.append(f"H_{n} = " + (" + ".join(parts) if parts else "0"))
        out.append(f"betti: {list(self.betti)}")
        out.append(f"torsion: {[list(t) for t in self.torsion]}")
        return out


def homology(C):
    C.check_dd()
    N = len(C.dims)
    ranks, tors = [0] * (N + 1), [[] for _ in range(N + 1)]
    for n in range(1, N):
        ranks[n], tors[n] = sparse_rank_torsion(C.matrix(n))
    betti = [C.dims[n] - ranks[n] - ranks[n + 1] for n in range(N)]
    return HomologyProfile(betti, [tors[n + 1] for n in range(N)])


def normalized_chains(nerve):
    """Chain complex of nondegenerate nerve simplices; degenerate faces contribute 0."""
    from .lp_category import is_degenerate
    index = [{s: i for i, s in enumerate(level)} for level in nerve.simplices]
    boundary = [[]]
    for n in range(1, len(nerve.simplices)):
        col = []
        for s in nerve.simplices[n]:
            faces = []
            for j, f in enumerate(nerve.faces(s)):
                k = index[n - 1].get(f)
                if k is None:
                    if not is_degenerate(f):
                        raise VerificationError(f"nerve face {f} missing")
                    continue
                faces.append((k, (-1) ** j))
            col.append(faces)
        boundary.append(col)
    cc = ChainComplex([len(level) for level in nerve.simplices], boundary)
    cc.check_dd()
    return cc


def nerve_homology(C, bound=None, max_dim=None):
    """Homology of the nerve, in the degrees the enumerated skeleton determines."""
    from .lp_category import NERVE_BOUND, geometric_nerve
    N = geometric_nerve(C, max_dim=max_dim, bound=bound or NERVE_BOUND)
    H = homology(normalized_chains(N))
    if N.exact_below is not None:
        k = N.exact_below
        H = HomologyProfile(H.betti[:k], H.torsion[:k])
    return H
