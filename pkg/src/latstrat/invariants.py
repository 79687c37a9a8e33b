"""Form invariants and the Kottwitz machinery.

Quadratic invariants (discriminant square class, Hasse invariant), hermitian
splitness over the ramified quadratic extension, the explicit Kottwitz pair
(ord of similitude, residue class of det/similitude^2), the four-way
neutrality report, the slope criterion, and the admissible-lattice test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import SymElem, SymRing, hilbert_symbol, legendre, _padic_val, _padic_unit
from .lattices import (DvrLattice, SymAdapter, mat_apply, mat_identity,
                       mat_mul, mat_transpose, module_length, smith_normal_form)


# ---------------------------------------------------------------------------
# Gram forms

class GramForm:
    """A form on the ambient standard basis given by its Gram matrix.

    kind is one of 'symmetric', 'hermitian', 'alternating'; the symmetry of
    the matrix is checked against the kind at construction.
    """

    def __init__(self, ad, matrix, kind: str):
        self.ad = ad
        self.matrix = matrix
        self.kind = kind
        self.n = len(matrix)
        for i in range(self.n):
            for j in range(self.n):
                a = matrix[i][j]
                b = matrix[j][i]
                if kind == "symmetric":
                    ok = ad.is_zero(ad.sub(a, b))
                elif kind == "hermitian":
                    ok = ad.is_zero(ad.sub(a, ad.conj(b)))
                elif kind == "alternating":
                    ok = ad.is_zero(ad.add(a, b))
                else:
                    raise ValueError(kind)
                if not ok:
                    raise ValueError(f"Gram matrix not {kind} at ({i},{j})")

    def value(self, x, y):
        ad = self.ad
        acc = ad.zero
        for i, xi in enumerate(x):
            if ad.is_zero(xi):
                continue
            for j, yj in enumerate(y):
                if ad.is_zero(yj):
                    continue
                t = ad.mul(xi, self.matrix[i][j])
                if self.kind == "hermitian":
                    t = ad.mul(t, ad.conj(yj))
                else:
                    t = ad.mul(t, yj)
                acc = ad.add(acc, t)
        return acc


# ---------------------------------------------------------------------------
# square classes and quadratic invariants over Q_p (odd p)

@dataclass(frozen=True)
class SquareClass:
    """Square class of Q_p^x as (valuation mod 2, Legendre of the unit)."""
    v: int
    s: int

    def __mul__(self, other):
        return SquareClass((self.v + other.v) % 2, self.s * other.s)


def square_class(x: Fraction, p: int) -> SquareClass:
    if x == 0:
        raise ValueError("square class of 0")
    v = _padic_val(x, p) % 2
    u = _padic_unit(x, p)
    return SquareClass(v, legendre(u.numerator * u.denominator, p))


@dataclass(frozen=True)
class QuadInvariants:
    dim: int
    disc: SquareClass
    hasse: int


def diagonalize_symmetric(G, p: int):
    """Congruence diagonalization of a nondegenerate rational symmetric
    matrix; returns the diagonal entries."""
    n = len(G)
    M = [[Fraction(x) for x in row] for row in G]
    diag = []
    idx = list(range(n))
    while idx:
        i = idx[0]
        if M[i][i] == 0:
            j = next((j for j in idx[1:] if M[i][j] != 0), None)
            if j is None:
                raise ValueError("degenerate form")
            for r in idx:
                M[i][r] += M[j][r]
            for r in idx:
                M[r][i] += M[r][j]
        d = M[i][i]
        diag.append(d)
        for j in idx[1:]:
            f = M[i][j] / d
            if f:
                for r in idx:
                    M[j][r] -= f * M[i][r]
                for r in idx:
                    M[r][j] -= f * M[r][i]
        idx = idx[1:]
    return diag


def quad_invariants(G, p: int) -> QuadInvariants:
    """Discriminant class and Hasse invariant of a rational symmetric Gram."""
    diag = diagonalize_symmetric(G, p)
    disc = square_class(Fraction(1), p)
    for d in diag:
        disc = disc * square_class(d, p)
    hasse = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            hasse *= hilbert_symbol(diag[i], diag[j], p)
    return QuadInvariants(len(diag), disc, hasse)


def hyperbolic_split(G, p: int):
    """Split a nondegenerate rational symmetric form into hyperbolic planes
    and an anisotropic kernel (anisotropy certified by exhausting the
    quadric mod p^3 after normalization).

    Returns (pairs, kernel) where pairs is a list of (v, w) with q(v) =
    q(w) = 0, [v, w] = 1, and kernel is a list of diagonalized vectors.
    All vectors are exact rational coordinate lists.
    """
    n = len(G)
    G = [[Fraction(x) for x in row] for row in G]

    def bil(x, y):
        acc = Fraction(0)
        for i in range(n):
            if x[i]:
                for j in range(n):
                    if G[i][j] and y[j]:
                        acc += x[i] * G[i][j] * y[j]
        return acc

    basis = [[Fraction(1) if i == j else Fraction(0) for i in range(n)]
             for j in range(n)]
    pairs = []
    while True:
        m = len(basis)
        if m == 0:
            break
        iso = _find_isotropic(bil, basis, p)
        if iso is None:
            break
        v = iso
        w0 = next(b for b in basis if bil(v, b) != 0)
        c = bil(v, w0)
        w = [x / c for x in w0]
        qw = bil(w, w)
        w = [wx - qw / 2 * vx for wx, vx in zip(w, v)]
        assert bil(v, w) == 1 and bil(w, w) == 0
        pairs.append((v, w))
        newb = []
        for b in basis:
            b2 = [bx - bil(b, w) * vx - bil(b, v) * wx
                  for bx, vx, wx in zip(b, v, w)]
            newb.append(b2)
        # reduce to an independent complement
        basis = _independent_subset(newb, m - 2)
    # diagonalize the kernel
    kernel = []
    kb = basis
    while kb:
        b0 = next((b for b in kb if bil(b, b) != 0), None)
        if b0 is None:
            raise AssertionError("degenerate kernel")
        kernel.append(b0)
        kb = [_proj_away(bil, b, b0) for b in kb]
        kb = _independent_subset(kb, len(kb) - 1)
    return pairs, kernel


def _proj_away(bil, b, b0):
    c = bil(b, b0) / bil(b0, b0)
    return [x - c * y for x, y in zip(b, b0)]


def _independent_subset(vecs, want):
    out = []
    rows = []
    for v in vecs:
        cand = rows + [list(v)]
        # rational row reduction
        mat = [r[:] for r in cand]
        rank = 0
        ncol = len(mat[0])
        for col in range(ncol):
            piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
            if piv is None:
                continue
            mat[rank], mat[piv] = mat[piv], mat[rank]
            for i in range(len(mat)):
                if i != rank and mat[i][col] != 0:
                    f = mat[i][col] / mat[rank][col]
                    mat[i] = [a - f * bb for a, bb in zip(mat[i], mat[rank])]
            rank += 1
        if rank == len(cand):
            rows = cand
            out.append(v)
        if len(out) == want:
            break
    return out


def _find_isotropic(bil, basis, p: int):
    """Small search for a nonzero isotropic combination of the basis."""
    import itertools
    m = len(basis)
    if m <= 2:
        # 2-dim: isotropic iff disc is minus a square; handled by search too
        rng_range = range(-6, 7)
    else:
        rng_range = range(-3, 4)
    n = len(basis[0])
    for coeffs in itertools.product(rng_range, repeat=m):
        if all(c == 0 for c in coeffs):
            continue
        v = [Fraction(0)] * n
        for c, b in zip(coeffs, basis):
            if c:
                v = [x + c * y for x, y in zip(v, b)]
        if bil(v, v) == 0 and any(v):
            return v
    return None


# ---------------------------------------------------------------------------
# norms and hermitian splitness over F = Q_p(pi), pi^2 = c

def is_norm(x: Fraction, ring: SymRing) -> bool:
    """Membership of a nonzero rational in N_{F/Q_p}(F^x).

    Unit norms are exactly the units with square residue; Nm(pi) = -c.  So
    p^e w is a norm iff w * (unit part of (-c)^e) has square residue.
    """
    p = ring.p
    e = _padic_val(x, p)
    w = _padic_unit(x, p)
    mc_unit = _padic_unit(Fraction(-ring.c), p)
    t = w * mc_unit ** (e % 2)
    return legendre(t.numerator * t.denominator, p) == 1


def norm_oracle(x: Fraction, ring: SymRing, depth: int = 3) -> bool:
    """Exhaustive search for a^2 - c b^2 = x modulo p^depth, over scaled
    integral witnesses.  Independent check of is_norm for small p."""
    p = ring.p
    c = ring.c
    e = _padic_val(x, p)
    # normalize to valuation in {0,1}
    x0 = x / Fraction(p) ** (2 * (e // 2))
    mod = p ** depth
    cnum = int(c)
    xv = _padic_val(x0, p)
    xunit = x0
    scale = p ** max(0, -0)
    xint = int(xunit * 1) if xunit.denominator == 1 else None
    if xint is None:
        # clear denominators by multiplying by a square
        d = xunit.denominator
        xunit = xunit * d * d
        xint = int(xunit)
    xint %= mod
    for a in range(mod):
        for b in range(mod):
            if (a * a - cnum * b * b) % mod == xint % mod:
                # solubility mod p^3 with a unit target certifies a norm for odd p
                if (a % p != 0) or (b % p != 0) or xv > 0:
                    return True
    return False


def hermitian_is_split(G: GramForm, ring: SymRing) -> bool:
    """Split test for an even-dimensional nondegenerate hermitian space:
    det(G) * (-1)^(n(n-1)/2) must be a norm."""
    if G.kind != "hermitian":
        raise ValueError("hermitian Gram required")
    n = G.n
    if n % 2:
        raise ValueError("odd hermitian dimension out of scope")
    det = sym_det(ring, G.matrix)
    if not det.is_rational():
        # hermitian determinants are conj-invariant; eps-free and pi-free
        raise ValueError("hermitian determinant not rational")
    d = det.rational() * Fraction(-1) ** ((n * (n - 1) // 2) % 2)
    return is_norm(d, ring)


def sym_det(ring: SymRing, A) -> SymElem:
    """Determinant over the symbolic field by fraction-free-ish Gauss."""
    n = len(A)
    M = [list(row) for row in A]
    det = ring.one
    for col in range(n):
        piv = next((i for i in range(col, n) if not M[i][col].is_zero()), None)
        if piv is None:
            return ring.zero
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col]
        inv = M[col][col].inverse()
        for i in range(col + 1, n):
            if not M[i][col].is_zero():
                f = M[i][col] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return det


# ---------------------------------------------------------------------------
# group elements and the Kottwitz map

class GroupElement:
    """(g, c): a 4x4 matrix over the F-layer together with its similitude
    scalar, validated against the hermitian Gram at construction."""

    def __init__(self, ring: SymRing, g, c: SymElem, gram: GramForm | None = None):
        self.ring = ring
        self.g = g
        self.c = ring(c) if not isinstance(c, SymElem) else c
        self.gram = gram if gram is not None else split_hermitian_gram(ring, len(g))
        ad = SymAdapter(ring)
        n = len(g)
        basis = mat_identity(ad, n)
        for i in range(n):
            for j in range(n):
                gi = [g[r][i] for r in range(n)]
                gj = [g[r][j] for r in range(n)]
                lhs = self.gram.value(gi, gj)
                rhs = self.c * self.gram.matrix[i][j]
                if lhs != rhs:
                    raise ValueError(
                        f"not a similitude: <ge_{i},ge_{j}> = {lhs} != c<e_i,e_j> = {rhs}")

    def sigma(self) -> "GroupElement":
        gs = [[x.sigma() for x in row] for row in self.g]
        return GroupElement(self.ring, gs, self.c.sigma(), self.gram)

    def inverse_matrix(self):
        from .lattices import mat_inverse
        return mat_inverse(SymAdapter(self.ring), self.g)

    def det(self) -> SymElem:
        return sym_det(self.ring, self.g)


@dataclass(frozen=True)
class KottwitzClass:
    w: int
    d: int

    def as_tuple(self):
        return (self.w, self.d)


def kottwitz(b: GroupElement) -> KottwitzClass:
    """kappa(b) = (ord_p sml(b), class of det(b)/sml(b)^2 mod pi)."""
    ring = b.ring
    vc = b.c.valuation()
    if vc % 2:
        raise ValueError("similitude with odd pi-valuation")
    w = vc // 2
    det = b.det()
    ratio = det / (b.c * b.c)
    if ratio.valuation() != 0:
        raise ValueError("det/sml^2 is not a unit")
    if not (ratio * ratio.conj() == ring.one):
        raise ValueError("det/sml^2 does not have norm 1")
    r = (ratio - ring.one).valuation()
    if r >= 1:
        d = 0
    elif (ratio + ring.one).valuation() >= 1:
        d = 1
    else:
        raise ValueError("det/sml^2 not congruent to +-1 mod pi")
    return KottwitzClass(w, d)


def is_mu_neutral(b: GroupElement) -> bool:
    return kottwitz(b).as_tuple() == (1, 0)


def is_basic_slope_half(b: GroupElement) -> bool:
    """All elementary divisors of b*sigma(b) have pi-valuation 2."""
    ad = SymAdapter(b.ring)
    bs = mat_mul(ad, b.g, [[x.sigma() for x in row] for row in b.g])
    div, _, _ = smith_normal_form(ad, bs)
    return all(d == 2 for d in div)


# ---------------------------------------------------------------------------
# frame constants

def split_hermitian_gram(ring: SymRing, n: int = 4) -> GramForm:
    ad = SymAdapter(ring)
    M = [[ring.zero] * n for _ in range(n)]
    for i in range(n):
        M[i][n - 1 - i] = ring.one
    return GramForm(ad, M, "hermitian")


def nonsplit_hermitian_gram(ring: SymRing) -> GramForm:
    ad = SymAdapter(ring)
    M = [[ring.zero] * 4 for _ in range(4)]
    for i in range(3):
        M[i][i] = ring.one
    M[3][3] = ring(ring.u)
    return GramForm(ad, M, "hermitian")


def lambda_bar(ring: SymRing) -> DvrLattice:
    """O e1 + O e2 + O(pi e3) + O(pi e4), the pi-modular standard lattice."""
    ad = SymAdapter(ring)
    M = mat_identity(ad, 4)
    M[2][2] = ring.pi
    M[3][3] = ring.pi
    return DvrLattice(ad, M)


def rep_b0(ring: SymRing) -> GroupElement:
    pi = ring.pi
    z = ring.zero
    g = [[z, z, z, pi],
         [z, z, pi, z],
         [z, pi, z, z],
         [pi, z, z, z]]
    return GroupElement(ring, g, -(pi * pi))


def rep_b1(ring: SymRing) -> GroupElement:
    """Representative of the non-neutral class.

    The diagonal/antidiagonal mix with a -pi; the sign placement is pinned
    by the similitude condition and kappa = (1, 1).
    """
    pi = ring.pi
    z = ring.zero
    g = [[z, z, z, pi],
         [z, pi, z, z],
         [z, z, -pi, z],
         [-pi, z, z, z]]
    return GroupElement(ring, g, pi * pi)


def rep_b_neutral_frame(ring: SymRing) -> GroupElement:
    """The neutral-class representative adapted to the isocrystal frame
    construction (rational entries, similitude p)."""
    p = ring(ring.p)
    z = ring.zero
    one = ring.one
    g = [[z, z, z, -p],
         [z, z, p, z],
         [z, one, z, z],
         [-one, z, z, z]]
    return GroupElement(ring, g, ring(ring.p))


def cb_gram(ring: SymRing, neutral: bool) -> GramForm:
    """Shipped Gram of the fixed-part hermitian space per class."""
    return split_hermitian_gram(ring) if neutral else nonsplit_hermitian_gram(ring)


# ---------------------------------------------------------------------------
# lattice-side operators and the neutrality report

def frobenius_inverse_on_lattice(b: GroupElement, M: DvrLattice) -> DvrLattice:
    """F_b^{-1}(M) = sigma^{-1}(b^{-1} M) (sigma is an involution here)."""
    ad = M.ad
    binv = b.inverse_matrix()
    mat = mat_mul(ad, binv, M.mat)
    mat = mat_apply(ad, ad.sigma, mat)
    return DvrLattice(ad, mat)


def vb_lattice(b: GroupElement, M: DvrLattice) -> DvrLattice:
    """V_b(M) = p * F_b^{-1}(M)."""
    return frobenius_inverse_on_lattice(b, M).scale(2)


def is_dil_lattice(M: DvrLattice, b: GroupElement, gram: GramForm) -> bool:
    """The admissibility conditions: M^v = pi^{-1} M, pM <= F_b^{-1}(pM) <= M,
    length M / F_b^{-1}(pM) = 4 and length pi M + F^{-1}(pM) / F^{-1}(pM) <= 2."""
    from .lattices import dual_lattice
    Mv = dual_lattice(M, gram.matrix, "hermitian")
    if Mv != M.scale(-1):
        return False
    FpM = frobenius_inverse_on_lattice(b, M.scale(2))
    if not (FpM.contains(M.scale(2)) and M.contains(FpM)):
        return False
    if module_length(M, FpM) != 4:
        return False
    upper = M.scale(1).add(FpM)
    if module_length(upper, FpM) > 2:
        return False
    return True


@dataclass
class NeutralityReport:
    kottwitz_neutral: bool          # (i)
    unit_residue_detsml2: bool      # (ii), det/sml^2 reading
    unit_residue_detsml: bool       # (ii), literal det/sml reading
    cb_split: bool                  # (iii)
    length_even: bool               # (iv)
    length_value: int
    agree: bool
    literal_reading_agrees: bool


def neutrality_report(b: GroupElement, M: DvrLattice, cb: GramForm,
                      ambient: GramForm | None = None) -> NeutralityReport:
    """Evaluate the four equivalent neutrality conditions and check they
    agree.  Both printed readings of condition (ii) are evaluated; the
    det/sml^2 reading participates in the agreement flag."""
    ring = b.ring
    gram = ambient if ambient is not None else split_hermitian_gram(ring)
    if not is_dil_lattice(M, b, gram):
        raise ValueError("M is not an admissible lattice for b")
    i_neutral = is_mu_neutral(b)
    det = b.det()
    r2 = det / (b.c * b.c)
    ii_sq = (r2 - ring.one).valuation() >= 1
    r1 = det / b.c
    ii_lit = (r1 - ring.one).valuation() >= 1
    iii_split = hermitian_is_split(cb, ring)
    V = vb_lattice(b, M)
    upper = M.scale(1).add(V)
    ell = module_length(upper, V)
    iv_even = ell % 2 == 0
    agree = (i_neutral == ii_sq == iii_split == iv_even)
    if not agree:
        raise AssertionError(
            f"neutrality conditions disagree: {(i_neutral, ii_sq, iii_split, iv_even)}")
    return NeutralityReport(i_neutral, ii_sq, ii_lit, iii_split, iv_even,
                            ell, agree, ii_lit == i_neutral)


# ---------------------------------------------------------------------------
# random integral similitudes (test support)

def unitary_transvection(ring: SymRing, i: int, j: int, a: SymElem):
    """Integral element of U(split antidiagonal form): e_j += a e_i with the
    dual compensation; requires j != i, j != n-1-i."""
    n = 4
    ad = SymAdapter(ring)
    g = mat_identity(ad, n)
    g[i][j] = g[i][j] + a
    ic, jc = n - 1 - i, n - 1 - j
    g[jc][ic] = g[jc][ic] - a.conj()
    if j == ic:
        raise ValueError("use a norm-zero parameter for long-root case")
    return g


def random_integral_similitude(ring: SymRing, rng, steps: int = 6) -> GroupElement:
    """Random product of integral unitary transvections and diagonal units."""
    ad = SymAdapter(ring)
    g = mat_identity(ad, 4)
    made = 0
    while made < steps:
        kind = rng.randrange(3)
        if kind == 0:
            i, j = rng.randrange(4), rng.randrange(4)
            if i == j or j == 3 - i or i == 3 - j:
                continue
            a = ring.elem(rng.randrange(-2, 3), 0, rng.randrange(-1, 2), 0)
            h = unitary_transvection(ring, i, j, a)
        elif kind == 1:
            t = ring.elem(rng.choice([1, -1, 1 + ring.p]), 0, rng.randrange(-1, 2), 0)
            h = mat_identity(ad, 4)
            h[0][0] = t
            h[3][3] = t.conj().inverse()
        else:
            t = ring.elem(rng.choice([1, -1]), 0, 0, 0)
            h = mat_identity(ad, 4)
            h[1][1] = t
            h[2][2] = t.conj().inverse()
        g = mat_mul(ad, g, h)
        made += 1
    return GroupElement(ring, g, ring.one)
