"""Sparse exact linear algebra over a field given by a ring handle.

Entries just need +, -, *, /, bool and ==; both RatFun and Fraction qualify.
Vectors are dicts {index: value} with no stored zeros.
"""

from __future__ import annotations


class SparseMat:
    __slots__ = ("rows", "cols", "data", "ring")

    def __init__(self, rows, cols, ring, data=None):
        self.rows = rows
        self.cols = cols
        self.ring = ring
        self.data = {}
        for (r, c), v in (data or {}).items():
            if v:
                self.data[(r, c)] = v

    @staticmethod
    def identity(n, ring):
        return SparseMat(n, n, ring, {(i, i): ring.one for i in range(n)})

    @staticmethod
    def zero(rows, cols, ring):
        return SparseMat(rows, cols, ring)

    def copy(self):
        return SparseMat(self.rows, self.cols, self.ring, dict(self.data))

    def set(self, r, c, v):
        if v:
            self.data[(r, c)] = v
        else:
            self.data.pop((r, c), None)

    def get(self, r, c):
        return self.data.get((r, c), self.ring.zero)

    def __add__(self, other):
        out = dict(self.data)
        for k, v in other.data.items():
            s = out.get(k, self.ring.zero) + v
            if s:
                out[k] = s
            else:
                del out[k]
        return SparseMat(self.rows, self.cols, self.ring, out)

    def __sub__(self, other):
        return self + other.scale(-self.ring.one)

    def scale(self, s):
        if not s:
            return SparseMat.zero(self.rows, self.cols, self.ring)
        return SparseMat(self.rows, self.cols, self.ring,
                         {k: v * s for k, v in self.data.items()})

    def __matmul__(self, other):
        assert self.cols == other.rows, "shape mismatch"
        bycol = {}
        for (r, c), v in other.data.items():
            bycol.setdefault(r, []).append((c, v))
        out = {}
        for (r, k), v in self.data.items():
            for c, w in bycol.get(k, ()):
                key = (r, c)
                s = out.get(key, self.ring.zero) + v * w
                if s:
                    out[key] = s
                else:
                    del out[key]
        return SparseMat(self.rows, other.cols, self.ring, out)

    __mul__ = __matmul__

    def apply(self, vec: dict) -> dict:
        """Matrix times sparse column vector."""
        out = {}
        byc = {}
        for (r, c), v in self.data.items():
            byc.setdefault(c, []).append((r, v))
        for c, x in vec.items():
            for r, v in byc.get(c, ()):
                s = out.get(r, self.ring.zero) + v * x
                if s:
                    out[r] = s
                else:
                    del out[r]
        return out

    def transpose(self):
        return SparseMat(self.cols, self.rows, self.ring,
                         {(c, r): v for (r, c), v in self.data.items()})

    def kron(self, other):
        """Kronecker product; row index = r1 * other.rows + r2."""
        out = {}
        for (r1, c1), v1 in self.data.items():
            for (r2, c2), v2 in other.data.items():
                out[(r1 * other.rows + r2, c1 * other.cols + c2)] = v1 * v2
        return SparseMat(self.rows * other.rows, self.cols * other.cols,
                         self.ring, out)

    def is_zero(self):
        return not self.data

    def __eq__(self, other):
        return (isinstance(other, SparseMat) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __repr__(self):
        return "SparseMat(%dx%d, %d nonzero)" % (self.rows, self.cols, len(self.data))

    def map_entries(self, fn, ring=None):
        out = SparseMat(self.rows, self.cols, ring or self.ring)
        for k, v in self.data.items():
            out.set(k[0], k[1], fn(v))
        return out

    def to_rows(self):
        rows = {}
        for (r, c), v in self.data.items():
            rows.setdefault(r, {})[c] = v
        return [rows.get(r, {}) for r in range(self.rows)]


def _pivot_weight(v):
    """Prefer structurally simple pivots to limit fraction growth."""
    num = getattr(v, "num", None)
    if num is None:
        return 1
    return len(num) + len(getattr(v, "den", ()))


def rref(rows, ncols, ring, pivot_bound=None):
    """Reduced row echelon form of a list of sparse row dicts.

    Returns (pivots, echelon): pivots is a sorted list of pivot columns and
    echelon the matching normalized rows.  Each echelon row has value one at
    its own pivot and no support at any other pivot.  If pivot_bound is set,
    pivots are only taken from columns < pivot_bound.
    """
    echelon = {}  # pivot col -> normalized row dict
    for row in rows:
        row = dict(row)
        # reduce against existing pivots until support is pivot-free
        hit = [c for c in row if c in echelon]
        while hit:
            for c in hit:
                coef = row.pop(c, None)
                if coef is None:
                    continue
                for cc, vv in echelon[c].items():
                    if cc == c:
                        continue
                    s = row.get(cc, ring.zero) - coef * vv
                    if s:
                        row[cc] = s
                    else:
                        row.pop(cc, None)
            hit = [c for c in row if c in echelon]
        if not row:
            continue
        cand = [c for c in row if pivot_bound is None or c < pivot_bound]
        if not cand:
            continue
        c = min(cand, key=lambda cc: (_pivot_weight(row[cc]), cc))
        piv = row.pop(c)
        newrow = {cc: vv / piv for cc, vv in row.items()}
        newrow[c] = ring.one
        # back-eliminate the new pivot from all stored rows
        for cp, erow in echelon.items():
            coef = erow.pop(c, None)
            if coef is None:
                continue
            for cc, vv in newrow.items():
                if cc == c:
                    continue
                s = erow.get(cc, ring.zero) - coef * vv
                if s:
                    erow[cc] = s
                else:
                    erow.pop(cc, None)
        echelon[c] = newrow
    pivots = sorted(echelon)
    return pivots, [echelon[c] for c in pivots]


def rank(mat: SparseMat) -> int:
    pivots, _ = rref(mat.to_rows(), mat.cols, mat.ring)
    return len(pivots)


def nullspace(mat: SparseMat):
    """Basis of the right kernel as a list of sparse column-vector dicts."""
    pivots, echelon = rref(mat.to_rows(), mat.cols, mat.ring)
    pivset = set(pivots)
    free = [c for c in range(mat.cols) if c not in pivset]
    basis = []
    erow_by_piv = dict(zip(pivots, echelon))
    for f in free:
        vec = {f: mat.ring.one}
        for p in pivots:
            v = erow_by_piv[p].get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def reduce_vector(vec: dict, pivots, echelon, ring):
    """Reduce a vector against an echelon basis; the result has no pivot support."""
    out = dict(vec)
    erow_by_piv = dict(zip(pivots, echelon))
    for p in pivots:
        if p in out:
            coef = out.pop(p)
            for c, v in erow_by_piv[p].items():
                if c == p:
                    continue
                s = out.get(c, ring.zero) - coef * v
                if s:
                    out[c] = s
                else:
                    out.pop(c, None)
    return out


def inverse(mat: SparseMat) -> SparseMat:
    """Inverse of a square matrix; raises if singular."""
    n = mat.rows
    assert n == mat.cols
    ring = mat.ring
    rows = mat.to_rows()
    aug = []
    for r in range(n):
        row = {c: v for c, v in rows[r].items()}
        row[n + r] = ring.one
        aug.append(row)
    pivots, echelon = rref(aug, 2 * n, ring, pivot_bound=n)
    if len(pivots) != n:
        raise ArithmeticError("matrix is singular")
    out = SparseMat(n, n, ring)
    for p, row in zip(pivots, echelon):
        for c, v in row.items():
            if c >= n:
                out.set(p, c - n, v)
    return out


def matrix_from_cols(cols, nrows, ring):
    out = SparseMat(nrows, len(cols), ring)
    for j, col in enumerate(cols):
        for i, v in col.items():
            out.set(i, j, v)
    return out
