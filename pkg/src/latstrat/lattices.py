"""Lattice arithmetic over discrete valuation rings.

All computations run through a small adapter protocol so the same Smith /
Hermite routines serve four coefficient layers: the symbolic ramified field
Q(eps)(pi), plain rationals with the p-adic valuation, truncated Witt rings,
and their ramified quadratic extensions.

A lattice is the column span (over the DVR) of an invertible matrix.  Bases
are canonicalized to a triangular Hermite form so equality is matrix
equality and lattices are hashable.
"""

from __future__ import annotations

from fractions import Fraction

from .arith import INF, PrecisionError, RamRing, SymElem, SymRing, WittRing, _padic_val



def _rat_canonical_mod(x: Fraction, p: int, t: int) -> Fraction:
    """Canonical representative of a p-adic rational mod p^t (t may relate
    to entries of negative valuation: the representative keeps the p-power)."""
    if x == 0:
        return Fraction(0)
    v = _padic_val(x, p)
    if v >= t:
        return Fraction(0)
    u = x / Fraction(p) ** v
    mod = p ** (t - v)
    num, den = u.numerator, u.denominator
    rep = (num * pow(den, -1, mod)) % mod
    return Fraction(rep) * Fraction(p) ** v


# ---------------------------------------------------------------------------
# adapters

class SymAdapter:
    """Q(eps)(pi) with the pi-adic valuation.  Exact."""

    precision_cap = None

    def __init__(self, ring: SymRing):
        self.ring = ring
        self.zero = ring.zero
        self.one = ring.one

    def ring_tag(self):
        return ("sym", self.ring.p, str(self.ring.c))

    def add(self, a, b): return a + b
    def sub(self, a, b): return a - b
    def neg(self, a): return -a
    def mul(self, a, b): return a * b
    def div(self, a, b): return a / b
    def is_zero(self, a): return a.is_zero()
    def val(self, a): return a.valuation()
    def conj(self, a): return a.conj()
    def sigma(self, a): return a.sigma()

    def unif(self, n: int):
        return self.ring.pi ** n

    def canonical_mod(self, a, t: int):
        """Canonical representative mod pi^t (entries may have negative
        valuation)."""
        p = self.ring.p
        ta = (t + 1) // 2   # p-precision on the unramified coefficients
        tb = t // 2         # and on the pi-coefficients
        c = a.c
        return SymElem(self.ring, (_rat_canonical_mod(c[0], p, ta),
                                   _rat_canonical_mod(c[1], p, ta),
                                   _rat_canonical_mod(c[2], p, tb),
                                   _rat_canonical_mod(c[3], p, tb)))

    def to_str(self, a):
        return repr(a)


class SymUnramAdapter:
    """The unramified part Q(eps) of the symbolic tower, with the p-adic
    valuation (uniformizer p).  Exact.  Elements are SymElem with vanishing
    pi-components."""

    precision_cap = None

    def __init__(self, ring: SymRing):
        self.ring = ring
        self.zero = ring.zero
        self.one = ring.one

    def ring_tag(self):
        return ("symu", self.ring.p, str(self.ring.c))

    def add(self, a, b): return a + b
    def sub(self, a, b): return a - b
    def neg(self, a): return -a
    def mul(self, a, b): return a * b
    def div(self, a, b): return a / b
    def is_zero(self, a): return a.is_zero()

    def val(self, a):
        v = a.valuation()
        if v == INF:
            return INF
        if v % 2:
            raise ValueError("element not in the unramified layer")
        return v // 2

    def conj(self, a): return a
    def sigma(self, a): return a.sigma()

    def unif(self, n: int):
        return self.ring(Fraction(self.ring.p) ** n)

    def canonical_mod(self, a, t: int):
        p = self.ring.p
        c = a.c
        return SymElem(self.ring, (_rat_canonical_mod(c[0], p, t),
                                   _rat_canonical_mod(c[1], p, t),
                                   Fraction(0), Fraction(0)))

    def to_str(self, a):
        return repr(a)


class RatAdapter:
    """Q with the p-adic valuation.  Exact."""

    precision_cap = None

    def __init__(self, p: int):
        self.p = p
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def ring_tag(self):
        return ("rat", self.p)

    def add(self, a, b): return a + b
    def sub(self, a, b): return a - b
    def neg(self, a): return -a
    def mul(self, a, b): return a * b
    def div(self, a, b): return a / b
    def is_zero(self, a): return a == 0
    def val(self, a): return _padic_val(a, self.p)
    def conj(self, a): return a
    def sigma(self, a): return a

    def unif(self, n: int):
        return Fraction(self.p) ** n

    def canonical_mod(self, a, t: int):
        return _rat_canonical_mod(a, self.p, t)

    def to_str(self, a):
        return str(a)


class WittPadAdapter:
    """Fraction field of W_m(F_{p^k}) as normalized pairs (shift, unit).

    Elements are (s, u): the value p^s * u with u a unit (or the exact-zero
    pair).  Additive cancellation below working precision is reported via
    PrecisionError by the precision guard in _snf when it matters.
    """

    def __init__(self, W: WittRing, margin: int = 2):
        self.W = W
        self.margin = margin
        self.precision_cap = W.m - margin
        self.zero = (0, W.zero)
        self.one = (0, W.one)

    def ring_tag(self):
        return ("witt", self.W.p, self.W.k, self.W.m)

    def lift(self, w):
        """Wrap an integral Witt element."""
        W = self.W
        v = W.val(w)
        if v == INF:
            return self.zero
        if v:
            pf = W.p ** v
            w = tuple(x // pf for x in w)
        return (v, w)

    def elem(self, x: int):
        return self.lift(self.W.elem(x))

    def add(self, a, b):
        W = self.W
        if a == self.zero:
            return b
        if b == self.zero:
            return a
        s = min(a[0], b[0])
        ua = W.scal(W.p ** (a[0] - s), a[1])
        ub = W.scal(W.p ** (b[0] - s), b[1])
        r = W.add(ua, ub)
        if W.is_zero(r):
            return self.zero
        v = W.val(r)
        pf = W.p ** v
        return (s + v, tuple(x // pf for x in r))

    def neg(self, a):
        if a == self.zero:
            return a
        return (a[0], self.W.neg(a[1]))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == self.zero or b == self.zero:
            return self.zero
        return (a[0] + b[0], self.W.mul(a[1], b[1]))

    def div(self, a, b):
        if b == self.zero:
            raise ZeroDivisionError
        if a == self.zero:
            return a
        return (a[0] - b[0], self.W.mul(a[1], self.W.unit_inverse(b[1])))

    def is_zero(self, a):
        return a == self.zero

    def val(self, a):
        return INF if a == self.zero else a[0]

    def conj(self, a):
        return a

    def sigma(self, a):
        if a == self.zero:
            return a
        return (a[0], self.W.frobenius(a[1]))

    def sigma_inv(self, a):
        if a == self.zero:
            return a
        return (a[0], self.W.frobenius_inv(a[1]))

    def unif(self, n: int):
        return (n, self.W.one)

    def canonical_mod(self, a, t: int):
        if a == self.zero or a[0] >= t:
            return self.zero
        W = self.W
        pf = W.p ** (t - a[0])
        red = tuple((x % pf) for x in a[1])
        if all(x == 0 for x in red):
            return self.zero
        v = W.val(red)
        if v:
            red = tuple(x // W.p ** v for x in red)
        return (a[0] + v, red)

    def to_str(self, a):
        if a == self.zero:
            return "0"
        return f"p^{a[0]}*{list(a[1])}"


class RamPadAdapter:
    """Fraction field of a ramified truncated ring, pairs (shift, unit) with
    the pi-adic normalization v(pi) = 1, v(p) = 2."""

    def __init__(self, R: RamRing, margin: int = 4):
        self.R = R
        self.margin = margin
        self.precision_cap = 2 * R.W.m - margin
        self.zero = (0, R.zero)
        self.one = (0, R.one)

    def ring_tag(self):
        return ("ram", R.W.p, R.W.k, R.W.m, R.uniformizer)

    def lift(self, x):
        R = self.R
        v = R.val(x)
        if v == INF:
            return self.zero
        for _ in range(v):
            x = R.div_pi(x)
        return (v, x)

    def add(self, a, b):
        R = self.R
        if a == self.zero:
            return b
        if b == self.zero:
            return a
        s = min(a[0], b[0])
        xa, xb = a[1], b[1]
        for _ in range(a[0] - s):
            xa = R.mul(R.pi, xa)
        for _ in range(b[0] - s):
            xb = R.mul(R.pi, xb)
        r = R.add(xa, xb)
        if R.is_zero(r):
            return self.zero
        v = R.val(r)
        for _ in range(v):
            r = R.div_pi(r)
        return (s + v, r)

    def neg(self, a):
        if a == self.zero:
            return a
        return (a[0], self.R.neg(a[1]))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == self.zero or b == self.zero:
            return self.zero
        return (a[0] + b[0], self.R.mul(a[1], b[1]))

    def div(self, a, b):
        if b == self.zero:
            raise ZeroDivisionError
        if a == self.zero:
            return a
        return (a[0] - b[0], self.R.mul(a[1], self.R.unit_inverse(b[1])))

    def is_zero(self, a):
        return a == self.zero

    def val(self, a):
        return INF if a == self.zero else a[0]

    def conj(self, a):
        if a == self.zero:
            return a
        # conj(pi^s u) = (-pi)^s conj(u)
        x = self.R.conj(a[1])
        if a[0] % 2:
            x = self.R.neg(x)
        return (a[0], x)

    def sigma(self, a):
        if a == self.zero:
            return a
        return (a[0], self.R.sigma(a[1]))

    def sigma_inv(self, a):
        if a == self.zero:
            return a
        return (a[0], self.R.sigma_inv(a[1]))

    def unif(self, n: int):
        return (n, self.R.one)

    def canonical_mod(self, a, t: int):
        if a == self.zero or a[0] >= t:
            return self.zero
        R = self.R
        s, x = a
        # reduce the unit part mod pi^{t-s}: components mod p^{ceil/floor}
        ta = (t - s + 1) // 2
        tb = (t - s) // 2
        pa = R.W.p ** max(ta, 0)
        pb = R.W.p ** max(tb, 0)
        red = (tuple(c % pa for c in x[0]), tuple(c % pb for c in x[1]))
        if R.is_zero(red):
            return self.zero
        v = R.val(red)
        for _ in range(v):
            red = R.div_pi(red)
        return (s + v, red)

    def to_str(self, a):
        if a == self.zero:
            return "0"
        return f"pi^{a[0]}*{a[1]}"


# ---------------------------------------------------------------------------
# matrices (row-major lists; lattice generators are columns)

def mat_mul(ad, A, B):
    n, m = len(A), len(A[0])
    m2, r = len(B), len(B[0])
    assert m == m2
    out = [[ad.zero] * r for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for k in range(m):
            a = Ai[k]
            if ad.is_zero(a):
                continue
            Bk = B[k]
            oi = out[i]
            for j in range(r):
                if not ad.is_zero(Bk[j]):
                    oi[j] = ad.add(oi[j], ad.mul(a, Bk[j]))
    return out

def mat_vec(ad, A, v):
    return [r[0] for r in mat_mul(ad, A, [[x] for x in v])]

def mat_transpose(A):
    return [list(r) for r in zip(*A)]

def mat_identity(ad, n):
    return [[ad.one if i == j else ad.zero for j in range(n)] for i in range(n)]

def mat_apply(ad, fn, A):
    return [[fn(x) for x in row] for row in A]

def mat_scale(ad, c, A):
    return [[ad.mul(c, x) for x in row] for row in A]

def mat_eq(ad, A, B):
    for ra, rb in zip(A, B):
        for a, b in zip(ra, rb):
            if not ad.is_zero(ad.sub(a, b)):
                return False
    return True


def mat_inverse(ad, A):
    """Inverse over the fraction field by Gauss-Jordan with min-valuation
    pivoting (keeps truncated computations stable)."""
    n = len(A)
    M = [list(row) + list(r2) for row, r2 in zip(A, mat_identity(ad, n))]
    for col in range(n):
        piv, pv = None, INF
        for i in range(col, n):
            v = ad.val(M[i][col])
            if v < pv:
                piv, pv = i, v
        if piv is None or pv == INF:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = ad.div(ad.one, M[col][col])
        M[col] = [ad.mul(inv, x) for x in M[col]]
        for i in range(n):
            if i != col and not ad.is_zero(M[i][col]):
                f = M[i][col]
                M[i] = [ad.sub(x, ad.mul(f, y)) for x, y in zip(M[i], M[col])]
    return [row[n:] for row in M]


def mat_det_val(ad, A):
    """Valuation of det(A), or INF; by triangularization."""
    n = len(A)
    M = [list(r) for r in A]
    total = 0
    for col in range(n):
        piv, pv = None, INF
        for i in range(col, n):
            v = ad.val(M[i][col])
            if v < pv:
                piv, pv = i, v
        if pv == INF:
            return INF
        M[col], M[piv] = M[piv], M[col]
        total += pv
        for i in range(col + 1, n):
            if not ad.is_zero(M[i][col]):
                f = ad.div(M[i][col], M[col][col])
                M[i] = [ad.sub(x, ad.mul(f, y)) for x, y in zip(M[i], M[col])]
    return total


# ---------------------------------------------------------------------------
# Hermite and Smith forms over the DVR

def hermite_columns(ad, A):
    """Canonical column-Hermite form of a full-column-rank n x m matrix
    (m >= rank r); returns the n x r reduced basis matrix.

    Pivot p_i = pi^{a_i} in row order; entries right of pivots are zero,
    entries left of pivots are canonical representatives mod the pivot.
    """
    n = len(A)
    cols = [list(c) for c in zip(*A)]
    done = []
    row = 0
    while row < n and cols:
        piv, pv = None, INF
        for j, c in enumerate(cols):
            v = ad.val(c[row])
            if v < pv:
                piv, pv = j, v
        if pv == INF:
            row += 1
            continue
        c = cols.pop(piv)
        unit = ad.div(c[row], ad.unif(pv))
        inv = ad.div(ad.one, unit)
        c = [ad.mul(inv, x) for x in c]
        for j, d in enumerate(cols):
            if not ad.is_zero(d[row]):
                f = ad.div(d[row], c[row])
                cols[j] = [ad.sub(x, ad.mul(f, y)) for x, y in zip(d, c)]
        done.append((row, pv, c))
        row += 1
    # reduce earlier columns against later pivots
    for idx in range(len(done)):
        r_i, a_i, c_i = done[idx]
        for jdx in range(idx):
            r_j, a_j, c_j = done[jdx]
            e = c_j[r_i]
            if ad.is_zero(e):
                continue
            red = ad.canonical_mod(e, a_i) if ad.val(e) < a_i else ad.zero
            f = ad.div(ad.sub(e, red), c_i[r_i])
            done[jdx] = (r_j, a_j, [ad.sub(x, ad.mul(f, y)) for x, y in zip(c_j, c_i)])
    out_cols = [c for (_, _, c) in done]
    return [list(r) for r in zip(*out_cols)] if out_cols else [[] for _ in range(n)]


def smith_normal_form(ad, A, want_transforms=False):
    """U*A*V = D over the DVR; returns (divisors, U, V) where divisors is the
    non-decreasing valuation list.  U, V are None unless requested.

    Raises PrecisionError when a pivot cannot be certified nonzero within
    the adapter's precision cap.
    """
    n = len(A)
    m = len(A[0])
    M = [list(r) for r in A]
    U = mat_identity(ad, n) if want_transforms else None
    V = mat_identity(ad, m) if want_transforms else None
    divisors = []
    top = 0
    cap = ad.precision_cap
    for top in range(min(n, m)):
        piv, pv = None, INF
        for i in range(top, n):
            for j in range(top, m):
                v = ad.val(M[i][j])
                if v < pv:
                    piv, pv = (i, j), v
        if pv == INF:
            break
        if cap is not None and pv >= cap:
            raise PrecisionError(
                f"pivot valuation {pv} at precision cap {cap}")
        i0, j0 = piv
        M[top], M[i0] = M[i0], M[top]
        if U is not None:
            U[top], U[i0] = U[i0], U[top]
        for r in range(n):
            M[r][top], M[r][j0] = M[r][j0], M[r][top]
        if V is not None:
            for r in range(m):
                V[r][top], V[r][j0] = V[r][j0], V[r][top]
        unit = ad.div(M[top][top], ad.unif(pv))
        inv = ad.div(ad.one, unit)
        M[top] = [ad.mul(inv, x) for x in M[top]]
        if U is not None:
            U[top] = [ad.mul(inv, x) for x in U[top]]
        for i in range(n):
            if i != top and not ad.is_zero(M[i][top]):
                f = ad.div(M[i][top], M[top][top])
                M[i] = [ad.sub(x, ad.mul(f, y)) for x, y in zip(M[i], M[top])]
                if U is not None:
                    U[i] = [ad.sub(x, ad.mul(f, y)) for x, y in zip(U[i], U[top])]
        for j in range(m):
            if j != top and not ad.is_zero(M[top][j]):
                f = ad.div(M[top][j], M[top][top])
                for r in range(n):
                    M[r][j] = ad.sub(M[r][j], ad.mul(f, M[r][top]))
                if V is not None:
                    for r in range(m):
                        V[r][j] = ad.sub(V[r][j], ad.mul(f, V[r][top]))
        divisors.append(pv)
    divisors.sort()
    return divisors, U, V


# ---------------------------------------------------------------------------
# lattices

class DvrLattice:
    """Full-rank column-span lattice over a DVR adapter."""

    __slots__ = ("ad", "n", "mat", "_key")

    def __init__(self, ad, mat, canonical=False):
        self.ad = ad
        self.n = len(mat)
        self.mat = mat if canonical else hermite_columns(ad, mat)
        if len(self.mat[0]) != self.n:
            raise ValueError("basis matrix not full rank")
        self._key = None

    # -- identity ------------------------------------------------------------

    def key(self):
        if self._key is None:
            self._key = tuple(tuple(self.ad.to_str(x) for x in row) for row in self.mat)
        return self._key

    def __eq__(self, other):
        return (isinstance(other, DvrLattice)
                and self.ad.ring_tag() == other.ad.ring_tag()
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    # -- constructions --------------------------------------------------------

    @classmethod
    def standard(cls, ad, n):
        return cls(ad, mat_identity(ad, n), canonical=True)

    def scale(self, k: int) -> "DvrLattice":
        """pi^k * L."""
        c = self.ad.unif(k)
        return DvrLattice(self.ad, mat_scale(self.ad, c, self.mat))

    def transform(self, g) -> "DvrLattice":
        """g * L for an invertible matrix g over the fraction field."""
        return DvrLattice(self.ad, mat_mul(self.ad, g, self.mat))

    def add(self, other: "DvrLattice") -> "DvrLattice":
        joint = [ra + rb for ra, rb in zip(self.mat, other.mat)]
        return DvrLattice(self.ad, joint)

    def intersect(self, other: "DvrLattice") -> "DvrLattice":
        ad = self.ad
        # x = B1 a in L2  <=>  a integral and B2^{-1} B1 a integral
        rel = mat_mul(ad, mat_inverse(ad, other.mat), self.mat)
        stacked = mat_identity(ad, self.n) + rel
        pre = preimage_lattice(ad, stacked)
        return DvrLattice(ad, mat_mul(ad, self.mat, pre.mat))

    def coords(self, other: "DvrLattice"):
        """Matrix of other's generators in self's basis."""
        return mat_mul(self.ad, mat_inverse(self.ad, self.mat), other.mat)

    def contains(self, other: "DvrLattice") -> bool:
        rel = self.coords(other)
        return all(self.ad.val(x) >= 0 for row in rel for x in row)

    def contains_vector(self, v) -> bool:
        c = mat_vec(self.ad, mat_inverse(self.ad, self.mat), v)
        return all(self.ad.val(x) >= 0 for x in c)

    def apply_entrywise(self, fn) -> "DvrLattice":
        return DvrLattice(self.ad, mat_apply(self.ad, fn, self.mat))

    def serialize(self):
        return [[self.ad.to_str(x) for x in row] for row in self.mat]

    def __repr__(self):
        return f"DvrLattice(n={self.n})"


def preimage_lattice(ad, A) -> DvrLattice:
    """{ t : A t integral } as a lattice in the column space (A is m x n of
    full column rank n over the fraction field)."""
    n = len(A[0])
    div, U, V = smith_normal_form(ad, A, want_transforms=True)
    if len(div) != n:
        raise ValueError("A not of full column rank")
    # smith_normal_form sorts the divisor list; recover per-column pivots
    # from D = U A V directly
    D = mat_mul(ad, mat_mul(ad, U, A), V)
    cols = []
    for j in range(n):
        dj = ad.val(D[j][j])
        col = [V[i][j] for i in range(n)]
        f = ad.unif(-dj)
        cols.append([ad.mul(f, x) for x in col])
    mat = [list(r) for r in zip(*cols)]
    return DvrLattice(ad, mat)


def module_length(M: DvrLattice, Mp: DvrLattice, ramified_halving=False) -> int:
    """length of M / M' (M' contained in M); sum of relative SNF divisors.

    For the ramified adapters the valuation is already pi-normalized so the
    sum IS the O_F-length; no halving is ever applied unless asked.
    """
    rel = M.coords(Mp)
    bad = [(j, min(M.ad.val(rel[i][j]) for i in range(M.n)))
           for j in range(M.n)
           if any(M.ad.val(rel[i][j]) < 0 for i in range(M.n))]
    if bad:
        raise ValueError(f"inclusion failure at columns {[j for j, _ in bad]}")
    div, _, _ = smith_normal_form(M.ad, rel)
    total = sum(div)
    return total // 2 if ramified_halving else total


def dual_lattice(L: DvrLattice, gram, kind: str) -> DvrLattice:
    """{ x : form(x, L) integral } for a non-degenerate form given by its
    Gram matrix on the ambient standard basis.

    kind 'hermitian': form(x, y) = x^T G conj(y) (linear in x);
    kind 'symmetric' / 'alternating': form(x, y) = x^T G y.
    """
    ad = L.ad
    if mat_det_val(ad, gram) == INF:
        raise ValueError("degenerate form")
    B = L.mat
    if kind == "hermitian":
        Bc = mat_apply(ad, ad.conj, B)
        A = mat_mul(ad, mat_transpose(Bc), mat_transpose(gram))
    else:
        A = mat_mul(ad, mat_transpose(B), gram)
    # x in L^dual  <=>  A x integral
    return preimage_lattice(ad, A)


def vertex_type(T: DvrLattice, gram, kind: str, ambient: str):
    """Vertex test and type.

    ambient 'hermitian': tests T <= T^v <= pi^{-1} T, type = length(T^v / T).
    ambient 'quadratic': tests pT <= T^v <= T, type = length(T / T^v).
    Returns the type or None when the chain fails.
    """
    Tv = dual_lattice(T, gram, kind)
    if ambient == "hermitian":
        if not Tv.contains(T):
            return None
        if not T.scale(-1).contains(Tv):
            return None
        return module_length(Tv, T)
    elif ambient == "quadratic":
        if not T.contains(Tv):
            return None
        if not Tv.contains(T.scale(1)):
            return None
        return module_length(T, Tv)
    raise ValueError(ambient)
