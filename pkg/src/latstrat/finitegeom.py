"""Finite orthogonal geometry over F_{p^k}.

Spaces carry the printed standard bases: hyperbolic pairs e_i, f_i with
[e_i, f_j] = delta, the structural Frobenius acting coordinate-wise for the
split kind and composed with the e_d <-> f_d swap for the non-split kind;
odd spaces use e_1..e_{d-1}, e_d + f_d, f_{d-1}..f_1 of the ambient even
space.  Level-k points are subspaces with F_{p^k}-coordinates; stratum
labels always use the p-power Frobenius.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .arith import FiniteField, legendre


class FiniteQuadSpace:
    """A quadratic space over F_p with its semilinear structure.

    kind in {'split', 'nonsplit', 'odd'}.  The Gram matrix is over F_p in
    the standard basis; phi_twist records the basis permutation composed
    with the coordinate Frobenius.
    """

    def __init__(self, p: int, n: int, kind: str):
        self.p = p
        self.n = n
        self.kind = kind
        if kind in ("split", "nonsplit"):
            if n % 2:
                raise ValueError("even kinds need even dimension")
            d = n // 2
            self.d = d
            gram = [[0] * n for _ in range(n)]
            # basis order e_1..e_d, f_1..f_d
            for i in range(d):
                gram[i][d + i] = 1
                gram[d + i][i] = 1
            self.gram = gram
            if kind == "split":
                self.twist = list(range(n))
            else:
                tw = list(range(n))
                tw[d - 1], tw[2 * d - 1] = tw[2 * d - 1], tw[d - 1]
                self.twist = tw
        elif kind == "odd":
            if n % 2 == 0:
                raise ValueError("odd kind needs odd dimension")
            d = (n + 1) // 2
            self.d = d
            gram = [[0] * n for _ in range(n)]
            # basis e_1..e_{d-1}, w := e_d + f_d, f_{d-1}..f_1
            for i in range(d - 1):
                gram[i][n - 1 - i] = 1
                gram[n - 1 - i][i] = 1
            gram[d - 1][d - 1] = 2 % p
            self.gram = gram
            self.twist = list(range(n))
        else:
            raise ValueError(kind)

    def field(self, k: int) -> FiniteField:
        return FiniteField(self.p, k)

    def witt_index(self, k: int = 1) -> int:
        """Witt index of the F_{p^k}-rational form (for even kinds this
        distinguishes split from non-split at odd k)."""
        if self.kind == "split":
            return self.d
        if self.kind == "odd":
            return self.d - 1
        # nonsplit: d over F_{p^k} with k even, d - 1 otherwise
        return self.d if k % 2 == 0 else self.d - 1

    def max_isotropic_dim(self) -> int:
        """Over the algebraic closure."""
        return self.n // 2

    def __repr__(self):
        return f"FiniteQuadSpace(p={self.p}, n={self.n}, {self.kind})"


class SpaceLevel:
    """A space together with a working field F_{p^k} and fast vector ops."""

    def __init__(self, space: FiniteQuadSpace, k: int):
        self.space = space
        self.k = k
        self.ff = space.field(k)
        self.n = space.n
        p = space.p
        self.gram = [[space.gram[i][j] % p for j in range(self.n)]
                     for i in range(self.n)]

    # vectors are tuples of field elements (ints)

    def bil(self, u, v) -> int:
        ff = self.ff
        acc = 0
        for i in range(self.n):
            ui = u[i]
            if not ui:
                continue
            gi = self.gram[i]
            for j in range(self.n):
                if gi[j] and v[j]:
                    acc = ff.add(acc, ff.mul(ff.mul(ui, v[j]), gi[j]))
        return acc

    def qform(self, v) -> int:
        # char != 2: q(v) = B(v,v)/2; isotropy tests use B(v,v) = 0 directly
        return self.bil(v, v)

    def phi_vec(self, v):
        ff = self.ff
        w = tuple(ff.frobenius(x) for x in v)
        tw = self.space.twist
        return tuple(w[tw[i]] for i in range(self.n))

    def echelon(self, rows):
        ff = self.ff
        n = self.n
        rows = [list(r) for r in rows]
        out = []
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = ff.inv(rows[r][c])
            rows[r] = [ff.mul(inv, x) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [ff.sub(x, ff.mul(f, y)) for x, y in zip(rows[i], rows[r])]
            r += 1
            if r == len(rows):
                break
        return tuple(tuple(row) for row in rows[:r])

    def phi_sub(self, sub):
        return self.echelon([self.phi_vec(v) for v in sub])

    def span_dim(self, rows) -> int:
        return len(self.echelon(rows))

    def inter_dim(self, A, B) -> int:
        return len(A) + len(B) - self.span_dim(list(A) + list(B))

    def sub_add(self, A, B):
        return self.echelon(list(A) + list(B))

    def perp(self, sub):
        rows = [[self._bil_col(v, j) for j in range(self.n)] for v in sub]
        return self.echelon(_kernel_basis(self.ff, rows, self.n))

    def _bil_col(self, v, j):
        ff = self.ff
        acc = 0
        for i in range(self.n):
            if self.gram[i][j] and v[i]:
                acc = ff.add(acc, ff.mul(v[i], self.gram[i][j]))
        return acc


def _kernel_basis(ff, rows, n):
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = ff.inv(M[r][c])
        M[r] = [ff.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [ff.sub(x, ff.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for ri, pc in enumerate(pivots):
            v[pc] = ff.neg(M[ri][fc])
        out.append(tuple(v))
    return out


# ---------------------------------------------------------------------------
# enumeration

DEFAULT_CEILING = 10 ** 6


class CeilingExceeded(RuntimeError):
    pass


def enumerate_isotropic(space: FiniteQuadSpace, dim: int, k: int,
                        ceiling: int = DEFAULT_CEILING):
    """All totally isotropic subspaces of the given dimension with
    F_{p^k}-coordinates, as canonical echelon tuples."""
    lv = SpaceLevel(space, k)
    if space.n == 6 and dim == 3 and space.kind in ("split", "nonsplit"):
        subs = _maximal_isotropic_dim6(lv)
        if len(subs) > ceiling:
            raise CeilingExceeded(f"{len(subs)} subspaces exceed {ceiling}")
        return sorted(subs)
    ff = lv.ff
    n = lv.n

    points = []
    for vec in _proj_vectors(ff, n):
        if lv.bil(vec, vec) == 0:
            points.append(vec)
    level = {(pt,) for pt in points}
    cur_dim = 1
    while cur_dim < dim:
        nxt = set()
        for sub in level:
            # isotropic projective points inside the perp of sub
            perp = lv.perp(sub)
            for pt in _proj_span(ff, perp):
                if lv.bil(pt, pt):
                    continue
                e = lv.echelon(list(sub) + [pt])
                if len(e) == cur_dim + 1:
                    nxt.add(e)
                    if len(nxt) > ceiling:
                        raise CeilingExceeded(
                            f"more than {ceiling} subspaces at dim {cur_dim+1}")
        level = nxt
        cur_dim += 1
    return sorted(level)


def _proj_span(ff, basis):
    """Projective representatives of the span of the basis rows."""
    q = ff.q
    m = len(basis)
    n = len(basis[0]) if basis else 0
    for lead in range(m):
        for tail in itertools.product(range(q), repeat=m - lead - 1):
            coeffs = (0,) * lead + (1,) + tail
            v = [0] * n
            for c, row in zip(coeffs, basis):
                if c:
                    v = [ff.add(x, ff.mul(c, y)) for x, y in zip(v, row)]
            yield tuple(v)


def _maximal_isotropic_dim6(lv: SpaceLevel):
    """Both rulings of the 6-dim quadric via wedge squares of F_q^4.

    Family A: x ^ F_q^4 for x in P^3; family B: Lambda^2(H) for hyperplanes
    H.  The wedge coordinates (a12, a13, a14, a23, a24, a34) map to the
    standard basis as (e1, e2, e3, f3, -f2, f1)."""
    ff = lv.ff
    q = ff.q

    def wedge(x, y):
        def w(i, j):
            return ff.sub(ff.mul(x[i], y[j]), ff.mul(x[j], y[i]))
        a12, a13, a14 = w(0, 1), w(0, 2), w(0, 3)
        a23, a24, a34 = w(1, 2), w(1, 3), w(2, 3)
        # standard coords e1 e2 e3 f1 f2 f3
        return (a12, a13, a14, a34, ff.neg(a24), a23)

    std4 = [tuple(1 if i == j else 0 for i in range(4)) for j in range(4)]
    subs = set()
    for x in _proj_vectors(ff, 4):
        rows = [wedge(x, u) for u in std4]
        subs.add(lv.echelon(rows))
    for h in _proj_vectors(ff, 4):
        piv = next(i for i in range(4) if h[i])
        ivp = ff.inv(h[piv])
        ker = []
        for j in range(4):
            if j == piv:
                continue
            w4 = [0] * 4
            w4[j] = 1
            w4[piv] = ff.neg(ff.mul(ivp, h[j]))
            ker.append(tuple(w4))
        rows = [wedge(ker[a], ker[b]) for a in range(3) for b in range(a + 1, 3)]
        subs.add(lv.echelon(rows))
    return subs


def _proj_vectors(ff, n):
    """Projective representatives: leading nonzero coordinate = 1."""
    q = ff.q
    for lead in range(n):
        for tail in itertools.product(range(q), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


# ---------------------------------------------------------------------------
# components and labels

def reference_lagrangian(space: FiniteQuadSpace, k: int):
    lv = SpaceLevel(space, k)
    d = space.n // 2
    rows = []
    for i in range(d):
        v = [0] * space.n
        v[i] = 1
        rows.append(tuple(v))
    return lv.echelon(rows)


def ogr_component(lv: SpaceLevel, sub, ref) -> str:
    d = len(sub)
    codim = d - lv.inter_dim(sub, ref)
    return "+" if codim % 2 == 0 else "-"


@dataclass(frozen=True)
class StratumLabel:
    r: int
    sign: str  # '+', '-', or 'n/a'

    def as_tuple(self):
        return (self.r, self.sign)


def dl_stratum_label(lv: SpaceLevel, sub, ref=None) -> StratumLabel:
    """r = minimal i with L^(i) = L + Phi L + ... + Phi^i L Phi-stable."""
    chain = sub
    r = 0
    while True:
        up = lv.sub_add(chain, lv.phi_sub(chain))
        if len(up) == len(chain):
            break
        chain = up
        r += 1
        if r > lv.n:
            raise AssertionError("label chain failed to stabilize")
    if lv.space.kind == "odd" or ref is None:
        sign = "n/a"
    else:
        sign = ogr_component(lv, sub, ref)
    return StratumLabel(r, sign)


def s_membership(lv: SpaceLevel, sub) -> bool:
    """The closed-locus condition rk(L cap Phi_* L) >= m.

    m follows the printed case table for the even kinds; for odd spaces the
    printed (n-1)/2 would collapse the locus to the Phi-fixed points, so
    the degree-consistent (n-3)/2 is used (see the decisions ledger).
    """
    n = lv.space.n
    kind = lv.space.kind
    if kind == "split":
        m = n // 2 - 2
    elif kind == "nonsplit":
        m = n // 2 - 1
    else:
        m = (n - 3) // 2
    if m <= 0:
        return True
    return lv.inter_dim(sub, lv.phi_sub(sub)) >= m


def stratum_point_counts(space: FiniteQuadSpace, k_max: int,
                         ceiling: int = DEFAULT_CEILING):
    """Table {k: {(r, sign): count}} for maximal isotropics, plus totals."""
    out = {}
    totals = {}
    d = space.max_isotropic_dim()
    for k in range(1, k_max + 1):
        subs = enumerate_isotropic(space, d, k, ceiling)
        lv = SpaceLevel(space, k)
        ref = reference_lagrangian(space, k) if space.kind != "odd" else None
        table = Counter()
        for sub in subs:
            lab = dl_stratum_label(lv, sub, ref)
            table[lab.as_tuple()] += 1
        out[k] = dict(table)
        totals[k] = len(subs)
    return out, totals


# ---------------------------------------------------------------------------
# Fermat comparison and the SO6 <-> SO5 bijection

def fermat_count(p: int, k: int) -> int:
    """Projective points of x0^{p+1} + x1^{p+1} + x2^{p+1} + x3^{p+1} = 0
    over F_{p^k}, by exhaustion."""
    ff = FiniteField(p, k)
    q = ff.q
    count = 0
    e = p + 1
    pw = [ff.pow(x, e) for x in range(q)]
    for vec in _proj_vectors(ff, 4):
        acc = 0
        for x in vec:
            acc = ff.add(acc, pw[x])
        if acc == 0:
            count += 1
    return count


def s_counts_per_component(space: FiniteQuadSpace, k: int,
                           ceiling: int = DEFAULT_CEILING):
    """Counts of S-members per component sign at level k."""
    d = space.max_isotropic_dim()
    subs = enumerate_isotropic(space, d, k, ceiling)
    lv = SpaceLevel(space, k)
    ref = reference_lagrangian(space, k)
    out = Counter()
    for sub in subs:
        if s_membership(lv, sub):
            out[ogr_component(lv, sub, ref)] += 1
    return dict(out)


def compare_s_fermat(p: int, k_max: int, ceiling: int = DEFAULT_CEILING):
    """Per-component S-counts for the 6-dim space carrying the swapped
    Frobenius structure (the structure under which the closed stratum is
    the Fermat surface), against fermat_count.

    Returns a list of per-k records with both sides and a pass flag.
    """
    space = FiniteQuadSpace(p, 6, "nonsplit")
    rows = []
    for k in range(1, k_max + 1):
        sc = s_counts_per_component(space, k, ceiling)
        fc = fermat_count(p, k)
        plus = sc.get("+", 0)
        minus = sc.get("-", 0)
        rows.append({
            "k": k,
            "s_plus": plus,
            "s_minus": minus,
            "fermat": fc,
            "match": plus == fc and minus == fc,
        })
    return rows


def omega_odd_of_even(space: FiniteQuadSpace):
    """The odd space omega_d^perp for omega_d = e_d - f_d, with the basis
    the paper prescribes; returns (odd_space, inclusion matrix rows)."""
    if space.kind != "split":
        raise ValueError("the comparison is set up for the split case")
    n = space.n
    d = space.d
    p = space.p
    odd = FiniteQuadSpace(p, n - 1, "odd")
    # embedding of the odd basis into the even space:
    # e_1..e_{d-1}, e_d + f_d, f_{d-1}..f_1
    rows = []
    for i in range(d - 1):
        v = [0] * n
        v[i] = 1
        rows.append(tuple(v))
    v = [0] * n
    v[d - 1] = 1
    v[2 * d - 1] = 1
    rows.append(tuple(v))
    for i in range(d - 2, -1, -1):
        v = [0] * n
        v[d + i] = 1
        rows.append(tuple(v))
    return odd, rows


def so6_so5_bijection(p: int, d: int, k_max: int,
                      ceiling: int = DEFAULT_CEILING):
    """Verify L -> L cap omega^perp is a bijection from one component of
    the even split OGr onto the odd OGr, preserving stratum labels."""
    space = FiniteQuadSpace(p, 2 * d, "split")
    odd, emb_rows = omega_odd_of_even(space)
    report = []
    for k in range(1, k_max + 1):
        lv = SpaceLevel(space, k)
        lv_odd = SpaceLevel(odd, k)
        ff = lv.ff
        subs = enumerate_isotropic(space, d, k, ceiling)
        ref = reference_lagrangian(space, k)
        plus = [s for s in subs if ogr_component(lv, s, ref) == "+"]
        odd_subs = set(enumerate_isotropic(odd, d - 1, k, ceiling))
        emb = [list(r) for r in emb_rows]

        omega = [0] * (2 * d)
        omega[d - 1] = 1
        omega[2 * d - 1] = ff.neg(1)
        omega = tuple(omega)

        def restrict(sub):
            # L cap omega^perp via the kernel of c -> [sum c_i s_i, omega]
            cond = [[lv.bil(s, omega) for s in sub]]
            kern = _kernel_basis(ff, cond, len(sub))
            rows = []
            for coeffs in kern:
                v = [0] * (2 * d)
                for c, s in zip(coeffs, sub):
                    if c:
                        v = [ff.add(x, ff.mul(c, y)) for x, y in zip(v, s)]
                rows.append(tuple(v))
            inter = lv.echelon(rows)
            out = [_coords_in(ff, emb, v) for v in inter]
            return lv_odd.echelon(out)

        image = {}
        label_pairs = []
        for sub in plus:
            z = restrict(sub)
            if len(z) != d - 1:
                return {"k": k, "ok": False, "reason": "restriction rank"}
            if z in image:
                return {"k": k, "ok": False, "reason": "not injective"}
            image[z] = sub
            l6 = dl_stratum_label(lv, sub, ref).r
            l5 = dl_stratum_label(lv_odd, z).r
            label_pairs.append((l6, l5))
        surj = set(image) == odd_subs
        labels_ok = all(a == b for a, b in label_pairs)
        report.append({"k": k, "bijective": surj and len(image) == len(plus),
                       "labels_match": labels_ok,
                       "count": len(plus), "odd_count": len(odd_subs)})
    return report


def _subspace_vectors(ff, sub):
    """All nonzero vectors of a subspace given by basis rows."""
    q = ff.q
    m = len(sub)
    for coeffs in itertools.product(range(q), repeat=m):
        if not any(coeffs):
            continue
        v = [0] * len(sub[0])
        for c, row in zip(coeffs, sub):
            if c:
                v = [ff.add(x, ff.mul(c, y)) for x, y in zip(v, row)]
        yield tuple(v)


def _coords_in(ff, basis_rows, v):
    """Coordinates of v in the span of basis_rows (rows independent)."""
    n = len(v)
    m = len(basis_rows)
    # solve basis^T c = v by elimination
    M = [[basis_rows[j][i] for j in range(m)] + [v[i]] for i in range(n)]
    r = 0
    pivcols = []
    for c in range(m):
        piv = next((i for i in range(r, n) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = ff.inv(M[r][c])
        M[r] = [ff.mul(inv, x) for x in M[r]]
        for i in range(n):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [ff.sub(x, ff.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivcols.append(c)
        r += 1
    out = [0] * m
    for ri, c in enumerate(pivcols):
        out[c] = M[ri][m]
    # consistency: rows beyond rank must have zero RHS
    for i in range(r, n):
        if M[i][m]:
            raise ValueError("vector not in span")
    return tuple(out)


def classify_gram(p: int, gram) -> str:
    """Splitness tag of an even-dimensional F_p quadratic space from its
    Gram matrix: split iff disc = (-1)^{n/2} is a square class."""
    n = len(gram)
    det = _det_mod(gram, p)
    if det == 0:
        raise ValueError("degenerate")
    target = pow(-1, n // 2, p)
    return "split" if legendre(det * pow(target, -1, p), p) == 1 else "nonsplit"


def _det_mod(M, p):
    n = len(M)
    A = [[x % p for x in row] for row in M]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = (det * A[c][c]) % p
        inv = pow(A[c][c], -1, p)
        for i in range(c + 1, n):
            if A[i][c]:
                f = (A[i][c] * inv) % p
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[c])]
    return det % p
