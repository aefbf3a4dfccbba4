"""Finite-dimensional integrable representations of quantum affine sl_N.

Modules are given concretely: a labeled weight basis plus sparse matrices for
the Chevalley generators e_i, f_i over the cyclic affine index set {0..N-1}.
The K_i matrices are always the diagonal q^{<h_i, wt>} implied by the weights.
Fundamental modules are modeled on k-subsets of {1..N}; index 0 acts by the
cyclic move 1 <-> N, so that all defining relations hold with level-0 weights.

Spectral parameters enter through contexts: an affinized module carries an
extra invertible variable scaling e_0 (by z) and f_0 (by 1/z).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .linalg import SparseMat, nullspace, rank, rref
from .scalars import QMono, RatFun, ScalarRing, quantum_binomial


class Report:
    """Accumulated named checks; falsy entries carry a detail string."""

    def __init__(self, title):
        self.title = title
        self.entries = []

    def add(self, name, ok, detail=""):
        self.entries.append((name, bool(ok), detail))

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.entries)

    def failures(self):
        return [(n, d) for n, ok, d in self.entries if not ok]

    def __str__(self):
        lines = ["[%s] %s" % ("PASS" if self.ok else "FAIL", self.title)]
        for n, ok, d in self.entries:
            lines.append("  %-4s %s%s" % ("ok" if ok else "FAIL", n,
                                          (" : " + d) if d and not ok else ""))
        return "\n".join(lines)


def affine_cartan(N):
    """Cartan matrix of the cyclic affine diagram on {0..N-1} (N >= 2)."""
    a = [[0] * N for _ in range(N)]
    for i in range(N):
        a[i][i] = 2
    if N == 2:
        a[0][1] = a[1][0] = -2
    else:
        for i in range(N):
            a[i][(i + 1) % N] = -1
            a[(i + 1) % N][i] = -1
    return a


class FinModule:
    """Integrable module with weight basis and sparse generator matrices."""

    def __init__(self, N, ctx, basis, weights, E, F, name=""):
        self.N = N
        self.ctx = tuple(ctx)
        self.ring = ScalarRing(self.ctx)
        self.basis = list(basis)
        self.weights = [tuple(w) for w in weights]
        self.E = E  # dict i -> SparseMat
        self.F = F
        self.name = name or "module"
        assert len(self.basis) == len(self.weights)

    @property
    def dim(self):
        return len(self.basis)

    def index_of(self, label):
        return self.basis.index(label)

    def K(self, i, power=1):
        m = SparseMat(self.dim, self.dim, self.ring)
        for b in range(self.dim):
            m.set(b, b, self.ring.var("q", power * self.weights[b][i]))
        return m

    def weight_character(self):
        ch = {}
        for w in self.weights:
            ch[w] = ch.get(w, 0) + 1
        return ch

    def alpha(self, j):
        """Simple root alpha_j as a weight increment vector."""
        a = affine_cartan(self.N)
        return tuple(a[i][j] for i in range(self.N))

    def with_entries(self, fn, ctx=None):
        ctx = ctx or self.ctx
        ring = ScalarRing(ctx)
        E = {i: m.map_entries(fn, ring) for i, m in self.E.items()}
        F = {i: m.map_entries(fn, ring) for i, m in self.F.items()}
        return FinModule(self.N, ctx, self.basis, self.weights, E, F, self.name)

    def embed_ctx(self, big_ctx):
        if tuple(big_ctx) == self.ctx:
            return self
        return self.with_entries(lambda v: v.embed(tuple(big_ctx)), tuple(big_ctx))

    def __repr__(self):
        return "FinModule(%s, N=%d, dim=%d, ctx=%r)" % (self.name, self.N,
                                                        self.dim, self.ctx)


def fundamental_module(N, k, ctx=("q",)):
    """The k-th fundamental module on k-subsets of {1..N}; entries 0/1."""
    if not (1 <= k <= N - 1):
        raise ValueError("fundamental index k=%d out of range for N=%d" % (k, N))
    ring = ScalarRing(ctx)
    basis = [tuple(sorted(s)) for s in combinations(range(1, N + 1), k)]
    pos = {b: i for i, b in enumerate(basis)}

    def wt(A):
        s = set(A)
        w = [0] * N
        w[0] = (N in s) - (1 in s)
        for i in range(1, N):
            w[i] = (i in s) - (i + 1 in s)
        return tuple(w)

    weights = [wt(b) for b in basis]
    E = {i: SparseMat(len(basis), len(basis), ring) for i in range(N)}
    F = {i: SparseMat(len(basis), len(basis), ring) for i in range(N)}
    one = ring.one
    for b in basis:
        s = set(b)
        for i in range(1, N):
            if i + 1 in s and i not in s:  # e_i moves i+1 -> i
                t = tuple(sorted(s - {i + 1} | {i}))
                E[i].set(pos[t], pos[b], one)
            if i in s and i + 1 not in s:  # f_i moves i -> i+1
                t = tuple(sorted(s - {i} | {i + 1}))
                F[i].set(pos[t], pos[b], one)
        if 1 in s and N not in s:  # e_0 moves 1 -> N
            t = tuple(sorted(s - {1} | {N}))
            E[0].set(pos[t], pos[b], one)
        if N in s and 1 not in s:  # f_0 moves N -> 1
            t = tuple(sorted(s - {N} | {1}))
            F[0].set(pos[t], pos[b], one)
    return FinModule(N, ctx, basis, weights, E, F, name="V(w%d)@N=%d" % (k, N))


def dominant_label(N, k):
    return tuple(range(1, k + 1))


def twist(M: FinModule, x: QMono) -> FinModule:
    """Scale e_0 by x and f_0 by 1/x (evaluation twist by an anchor)."""
    xf = M.ring.qmono(x)
    E = dict(M.E)
    F = dict(M.F)
    E[0] = M.E[0].scale(xf)
    F[0] = M.F[0].scale(1 / xf)
    return FinModule(M.N, M.ctx, M.basis, M.weights, E, F,
                     name="%s[x=%s]" % (M.name, x))


def affinize(M: FinModule, var="z") -> FinModule:
    """Adjoin a formal invertible spectral variable scaling the 0-generators."""
    if var in M.ctx:
        raise ValueError("context already contains %r" % var)
    ctx = M.ctx + (var,)
    Mb = M.embed_ctx(ctx)
    zf = Mb.ring.var(var)
    E = dict(Mb.E)
    F = dict(Mb.F)
    E[0] = Mb.E[0].scale(zf)
    F[0] = Mb.F[0].scale(1 / zf)
    return FinModule(M.N, ctx, M.basis, M.weights, E, F,
                     name="%s_aff(%s)" % (M.name, var))


def evaluate(Ma: FinModule, a: QMono, var="z") -> FinModule:
    """Specialize the spectral variable to the anchor a."""
    def sub(v):
        return v.subs_qmono(var, a).drop_var(var)

    ctx = tuple(v for v in Ma.ctx if v != var)
    return Ma.with_entries(sub, ctx)


def tensor(M1: FinModule, M2: FinModule) -> FinModule:
    """Tensor product via the coproduct e |-> e x 1 + K x e, f |-> f x K^-1 + 1 x f."""
    assert M1.N == M2.N
    ctx = tuple(dict.fromkeys(M1.ctx + M2.ctx))
    A = M1.embed_ctx(ctx)
    B = M2.embed_ctx(ctx)
    basis = [(x, y) for x in A.basis for y in B.basis]
    weights = [tuple(u + v for u, v in zip(A.weights[i], B.weights[j]))
               for i in range(A.dim) for j in range(B.dim)]
    idA = SparseMat.identity(A.dim, A.ring)
    idB = SparseMat.identity(B.dim, B.ring)
    E, F = {}, {}
    for i in range(A.N):
        E[i] = A.E[i].kron(idB) + A.K(i).kron(B.E[i])
        F[i] = A.F[i].kron(B.K(i, -1)) + idA.kron(B.F[i])
    return FinModule(A.N, ctx, basis, weights, E, F,
                     name="(%s)x(%s)" % (M1.name, M2.name))


def check_defining_relations(M: FinModule) -> Report:
    """Verify the quantum group presentation as exact matrix identities."""
    rep = Report("defining relations for %s" % M.name)
    N = M.N
    a = affine_cartan(N)
    rep.add("level-zero weights",
            all(sum(w) == 0 for w in M.weights),
            "nonzero level weight found")

    def increments_ok(mat, inc):
        for (r, c) in mat.data:
            dw = tuple(x - y for x, y in zip(M.weights[r], M.weights[c]))
            if dw != inc:
                return False
        return True

    for j in range(N):
        alpha = M.alpha(j)
        rep.add("e_%d raises by alpha_%d" % (j, j),
                increments_ok(M.E[j], alpha), "weight increment mismatch")
        rep.add("f_%d lowers by alpha_%d" % (j, j),
                increments_ok(M.F[j], tuple(-x for x in alpha)),
                "weight increment mismatch")

    qv = M.ring.var("q")
    for i in range(N):
        for j in range(N):
            comm = M.E[i] @ M.F[j] - M.F[j] @ M.E[i]
            if i == j:
                target = (M.K(i) - M.K(i, -1)).scale(1 / (qv - 1 / qv))
            else:
                target = SparseMat.zero(M.dim, M.dim, M.ring)
            rep.add("[e_%d, f_%d]" % (i, j), comm == target,
                    "commutator relation fails")

    for (gens, tag) in ((M.E, "e"), (M.F, "f")):
        for i in range(N):
            for j in range(N):
                if i == j or a[i][j] == 0:
                    continue
                n = 1 - a[i][j]
                acc = SparseMat.zero(M.dim, M.dim, M.ring)
                for r in range(n + 1):
                    coef = quantum_binomial(n, r).to_ratfun(M.ctx)
                    if r % 2:
                        coef = -coef
                    term = SparseMat.identity(M.dim, M.ring)
                    for _ in range(n - r):
                        term = gens[i] @ term
                    term = gens[j] @ term
                    for _ in range(r):
                        term = gens[i] @ term
                    acc = acc + term.scale(coef)
                rep.add("serre %s(%d,%d)" % (tag, i, j), acc.is_zero(),
                        "quantum Serre relation fails")
    return rep


def hom_space(M1: FinModule, M2: FinModule):
    """Basis of intertwiners M1 -> M2 over the merged scalar context.

    Solves Phi e_i = e_i Phi and Phi f_i = f_i Phi for all i; K-commutation
    is enforced structurally by restricting to weight-matched matrix entries.
    """
    assert M1.N == M2.N
    ctx = tuple(dict.fromkeys(M1.ctx + M2.ctx))
    A = M1.embed_ctx(ctx)
    B = M2.embed_ctx(ctx)
    ring = A.ring
    unknowns = [(t, s) for t in range(B.dim) for s in range(A.dim)
                if B.weights[t] == A.weights[s]]
    if not unknowns:
        return []
    uidx = {u: n for n, u in enumerate(unknowns)}
    rows = []
    for gens_a, gens_b in ((A.E, B.E), (A.F, B.F)):
        for i in range(A.N):
            GA, GB = gens_a[i], gens_b[i]
            # (Phi G_A - G_B Phi)[t, s]
            #   = sum_r Phi[t, r] GA[r, s] - sum_c GB[t, c] Phi[c, s] = 0
            eqs = {}
            for (r, s), v in GA.data.items():
                for t in range(B.dim):
                    n = uidx.get((t, r))
                    if n is None:
                        continue
                    row = eqs.setdefault((t, s), {})
                    row[n] = row.get(n, ring.zero) + v
            for (t, c), v in GB.data.items():
                for s in range(A.dim):
                    n = uidx.get((c, s))
                    if n is None:
                        continue
                    row = eqs.setdefault((t, s), {})
                    row[n] = row.get(n, ring.zero) - v
            for row in eqs.values():
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    basis = []
    for vec in nullspace_from_rows(rows, len(unknowns), ring):
        m = SparseMat(B.dim, A.dim, ring)
        for n, v in vec.items():
            t, s = unknowns[n]
            m.set(t, s, v)
        basis.append(m)
    return basis


def nullspace_from_rows(rows, ncols, ring):
    pivots, echelon = rref(rows, ncols, ring)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    out = []
    erow = dict(zip(pivots, echelon))
    for f in free:
        vec = {f: ring.one}
        for p in pivots:
            v = erow[p].get(f)
            if v:
                vec[p] = -v
        out.append(vec)
    return out


def weyl_orbit_stable(M: FinModule) -> bool:
    """The weight multiset is preserved by the finite reflections s_1..s_{N-1}."""
    from collections import Counter

    a = affine_cartan(M.N)
    ws = Counter(M.weights)
    for i in range(1, M.N):
        refl = Counter()
        for w, mult in ws.items():
            wi = w[i]
            new = tuple(w[j] - wi * a[j][i] for j in range(M.N))
            refl[new] += mult
        if refl != ws:
            return False
    return True
