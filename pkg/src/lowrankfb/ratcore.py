"""Polynomial, rational function and rational matrix arithmetic.

Coefficients are stored in ascending powers of ``z``.  Rational matrices
are compared on a set of unit-circle points rather than by coefficients,
because the same function has many representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConstantPolynomial, DimensionMismatch, SingularMatrix, ZeroPolynomial

CANCEL_TOL = 1e-7
_CHOP = 1e-12
_CLUSTER = 1e-4


def _as_coeffs(c):
    arr = np.atleast_1d(np.asarray(c))
    if arr.ndim != 1:
        raise ValueError("polynomial coefficients must be one-dimensional")
    if np.iscomplexobj(arr):
        scale = np.max(np.abs(arr)) if arr.size else 0.0
        if scale == 0 or np.max(np.abs(arr.imag)) <= 1e-12 * scale:
            arr = arr.real
    arr = arr.astype(complex if np.iscomplexobj(arr) else float)
    nz = np.flatnonzero(arr)
    arr = arr[: nz[-1] + 1] if nz.size else arr[:0]
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


class Polynomial:
    """Polynomial in ``z`` with ascending coefficients.

    The zero polynomial has an empty coefficient array and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        object.__setattr__(self, "coeffs", _as_coeffs(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_roots(cls, rts, lead=1.0):
        rts = np.asarray(rts)
        if rts.size == 0:
            return cls([lead])
        return cls(lead * npoly.polyfromroots(rts))

    @classmethod
    def monomial(cls, k, coef=1.0):
        c = np.zeros(k + 1)
        c[k] = coef
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def lead(self):
        if self.is_zero():
            return 0.0
        return self.coeffs[-1]

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=complex))
        return npoly.polyval(z, self.coeffs)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, Number):
            return Polynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs) if len(self.coeffs) and len(other.coeffs)
                          else (self.coeffs if len(self.coeffs) else other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(npoly.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Polynomial(self.coeffs / other)
        return NotImplemented

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Polynomial({np.array2string(self.coeffs, precision=6)})"

    def monic(self):
        if self.is_zero():
            raise ZeroPolynomial("cannot normalize the zero polynomial")
        return Polynomial(self.coeffs / self.lead)

    def chop(self, atol: float):
        """Drop leading coefficients whose modulus is at most ``atol``."""
        c = np.array(self.coeffs)
        k = len(c)
        while k and abs(c[k - 1]) <= atol:
            k -= 1
        return Polynomial(c[:k])

    def reverse(self, degree: int | None = None):
        """Return ``z**degree * p(1/z)``."""
        d = self.degree if degree is None else degree
        if self.is_zero():
            return Polynomial()
        if d < self.degree:
            raise ValueError("reverse degree below polynomial degree")
        c = np.zeros(d + 1, dtype=self.coeffs.dtype)
        c[: len(self.coeffs)] = self.coeffs
        return Polynomial(c[::-1])

    def deriv(self):
        if self.degree < 1:
            return Polynomial()
        return Polynomial(npoly.polyder(self.coeffs))

    def roots(self):
        return roots(self)


def roots(p: Polynomial) -> np.ndarray:
    """Roots of ``p`` with multiplicity, from companion-matrix eigenvalues.

    Raises
    ------
    ZeroPolynomial
        If ``p`` is identically zero.
    ConstantPolynomial
        If ``p`` has degree zero.
    """
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no well-defined roots")
    if p.degree == 0:
        raise ConstantPolynomial("a nonzero constant has no roots")
    return np.asarray(npoly.polyroots(p.coeffs), dtype=complex)


def _cluster(rts, radius=_CLUSTER):
    """Group nearby roots; a perturbed multiple root becomes one cluster."""
    centers, counts, members = [], [], []
    for r in sorted(rts, key=lambda x: (round(x.real, 6), x.imag)):
        for i, c in enumerate(centers):
            if abs(r - c) <= radius * max(1.0, abs(c)):
                members[i].append(r)
                centers[i] = np.mean(members[i])
                counts[i] += 1
                break
        else:
            centers.append(r)
            counts.append(1)
            members.append([r])
    return centers, counts


def _common_root_count(num: Polynomial, den: Polynomial, tol: float) -> int:
    if num.degree < 1 or den.degree < 1:
        return 0
    cn, kn = _cluster(roots(num))
    cd, kd = _cluster(roots(den))
    kd = list(kd)
    total = 0
    for c, k in zip(cn, kn):
        best, dist = None, np.inf
        for j, d in enumerate(cd):
            if kd[j] and abs(c - d) < dist:
                best, dist = j, abs(c - d)
        if best is not None and dist <= tol * max(1.0, abs(cd[best])):
            share = min(k, kd[best])
            kd[best] -= share
            total += share
    return total


def _conv_matrix(c, ncols):
    """Matrix T with T @ x equal to the ascending convolution of c and x."""
    T = np.zeros((len(c) + ncols - 1, ncols), dtype=c.dtype)
    for j in range(ncols):
        T[j : j + len(c), j] = c
    return T


def _cofactors(num: Polynomial, den: Polynomial, k: int):
    """Cofactors (v, u) with num*u = den*v and deg u = deg den - k.

    Uses the right null vector of a Sylvester-type matrix, which is
    numerically kinder than rebuilding polynomials from computed roots.
    """
    a = num.coeffs / num.norm()
    b = den.coeffs / den.norm()
    du, dv = den.degree - k, num.degree - k
    M = np.hstack([_conv_matrix(a, du + 1), -_conv_matrix(b, dv + 1)])
    _, _, vh = np.linalg.svd(M)
    x = vh[-1].conj()
    x[np.abs(x) <= 1e-14 * np.max(np.abs(x))] = 0
    u = Polynomial(x[: du + 1])
    v = Polynomial(x[du + 1 :] * num.norm() / den.norm())
    return v, u


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Scalar rational function ``num(z) / den(z)``."""

    num: Polynomial
    den: Polynomial = field(default_factory=lambda: Polynomial([1.0]))

    def __post_init__(self):
        num = self.num if isinstance(self.num, Polynomial) else Polynomial(self.num)
        den = self.den if isinstance(self.den, Polynomial) else Polynomial(self.den)
        if den.is_zero():
            raise ZeroPolynomial("denominator is the zero polynomial")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def const(cls, c):
        return cls(Polynomial([c]), Polynomial([1.0]))

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Polynomial):
            return cls(x)
        if isinstance(x, Number) or np.isscalar(x):
            return cls.const(x)
        raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, z):
        if self.num.is_zero():
            return np.zeros_like(np.asarray(z, dtype=complex))
        return self.num(z) / self.den(z)

    def poles(self):
        return roots(self.den) if self.den.degree >= 1 else np.zeros(0, complex)

    def zeros(self):
        return roots(self.num) if self.num.degree >= 1 else np.zeros(0, complex)

    @property
    def relative_degree(self) -> int:
        return self.den.degree - self.num.degree

    def is_proper(self) -> bool:
        return self.is_zero() or self.relative_degree >= 0

    def simplify(self, tol: float = CANCEL_TOL):
        return simplify(self, tol)

    def _binary(self, other):
        try:
            return RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._binary(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return simplify(RationalFunction(self.num + other.num, self.den))
        return simplify(RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._binary(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._binary(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RationalFunction.const(0.0)
        return simplify(RationalFunction(self.num * other.num, self.den * other.den))

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return simplify(RationalFunction(self.den, self.num))

    def __truediv__(self, other):
        other = self._binary(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return simplify(RationalFunction(self.num ** k, self.den ** k))

    def paraconj(self):
        """Return ``r(1/z)`` as a rational function of ``z``."""
        if self.is_zero():
            return self
        dn, dd = self.num.degree, self.den.degree
        num, den = self.num.reverse(), self.den.reverse()
        if dd >= dn:
            num = num * Polynomial.monomial(dd - dn)
        else:
            den = den * Polynomial.monomial(dn - dd)
        return simplify(RationalFunction(num, den))

    def substitute_mobius(self, a, b, c, d):
        """Return ``r((a s + b) / (c s + d))`` as a rational function of ``s``."""
        if self.is_zero():
            return self
        top, bot = Polynomial([b, a]), Polynomial([d, c])
        dn, dd = self.num.degree, self.den.degree
        N = sum((self.num.coeffs[k] * top ** k * bot ** (dn - k) for k in range(dn + 1)), Polynomial())
        D = sum((self.den.coeffs[k] * top ** k * bot ** (dd - k) for k in range(dd + 1)), Polynomial())
        if dd >= dn:
            N = N * bot ** (dd - dn)
        else:
            D = D * bot ** (dn - dd)
        return simplify(RationalFunction(N, D))

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"


def simplify(r: RationalFunction, tol: float = CANCEL_TOL) -> RationalFunction:
    """Cancel common roots of numerator and denominator and make den monic.

    Roots closer than ``tol * max(1, |root|)`` cancel.  Near-multiple roots
    are clustered first so that a perturbed double root still cancels.
    """
    num, den = r.num, r.den
    if num.is_zero():
        return RationalFunction(Polynomial(), Polynomial([1.0]))
    scale = max(num.norm(), den.norm())
    num = num.chop(_CHOP * scale)
    den = den.chop(_CHOP * den.norm())
    if num.is_zero():
        return RationalFunction(Polynomial(), Polynomial([1.0]))
    # strip a shared power of z exactly
    s = 0
    nc, dc = num.coeffs, den.coeffs
    while (
        s < min(num.degree, den.degree)
        and abs(nc[s]) <= 1e-13 * num.norm()
        and abs(dc[s]) <= 1e-13 * den.norm()
    ):
        s += 1
    if s:
        num, den = Polynomial(nc[s:]), Polynomial(dc[s:])
    if tol > 0:
        k = _common_root_count(num, den, tol)
        if k:
            v, u = _cofactors(num, den, k)
            z = np.exp(1j * np.linspace(0.1, 2 * np.pi + 0.1, 17)[:-1]) * 1.01
            orig = num(z) / den(z)
            new = v(z) / u(z)
            if np.max(np.abs(orig - new)) <= 1e-9 * max(1.0, np.max(np.abs(orig))):
                num, den = v, u
    lead = den.lead
    return RationalFunction(num / lead, den / lead)


# ---------------------------------------------------------------------------
# unit-circle grid


@dataclass(frozen=True)
class UnitCircleGrid:
    """Evaluation points on the unit circle, built from angles."""

    angles: np.ndarray

    @classmethod
    def default(cls, G: int = 64, extra: int = 16, seed: int = 20240611):
        base = 2 * np.pi * np.arange(G) / G
        rng = np.random.default_rng(seed)
        rand = rng.uniform(0, 2 * np.pi, extra)
        return cls(np.concatenate([base, rand]))

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def G(self) -> int:
        return len(self.angles)


# ---------------------------------------------------------------------------
# rational matrices


class RationalMatrix:
    """Rectangular array of rational functions.

    Zero rows or columns are allowed, so that blocks such as a
    ``(p - m) x 0`` slice remain well formed.
    """

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries, rows: int | None = None, cols: int | None = None):
        ent = tuple(tuple(RationalFunction.coerce(x) for x in row) for row in entries)
        r = len(ent) if rows is None else rows
        c = (len(ent[0]) if ent else 0) if cols is None else cols
        if len(ent) != r or any(len(row) != c for row in ent):
            raise DimensionMismatch("ragged or mis-sized rational matrix")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # construction helpers
    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0.0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n):
        return cls([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def constant(cls, M):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return cls([[float(x) for x in row] for row in M], M.shape[0], M.shape[1])

    @classmethod
    def diag(cls, items):
        n = len(items)
        return cls([[items[i] if i == j else 0.0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def scalar(cls, r):
        return cls([[r]], 1, 1)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        if isinstance(i, slice) or isinstance(j, slice):
            ri = range(self.rows)[i] if isinstance(i, slice) else [i]
            cj = range(self.cols)[j] if isinstance(j, slice) else [j]
            return self.select(list(ri), list(cj))
        return self.entries[i][j]

    def select(self, rows, cols):
        return RationalMatrix([[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                out[..., i, j] = e(z)
        return out

    evaluate = __call__

    def map(self, fn):
        return RationalMatrix([[fn(e) for e in row] for row in self.entries], self.rows, self.cols)

    def simplify(self, tol=CANCEL_TOL):
        return self.map(lambda e: simplify(e, tol))

    @property
    def T(self):
        return RationalMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.cols, self.rows
        )

    def para(self):
        """Para-conjugate ``M(1/z)^T``."""
        return self.T.map(lambda e: e.paraconj())

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_same(other)
        return RationalMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)], self.rows, self.cols
        )

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, RationalMatrix):
            return NotImplemented
        rc = RationalFunction.coerce(c)
        return self.map(lambda e: e * rc)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            other = RationalMatrix.constant(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = RationalFunction.const(0.0)
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RationalMatrix(out, self.rows, other.cols)

    def __rmatmul__(self, other):
        return RationalMatrix.constant(other) @ self

    def is_square(self):
        return self.rows == self.cols

    def poles(self):
        """Union of entry denominators' roots (entrywise, with repetition)."""
        out = [e.poles() for row in self.entries for e in row if not e.is_zero()]
        return np.concatenate(out) if out else np.zeros(0, complex)

    def max_modulus(self, points) -> float:
        if self.rows == 0 or self.cols == 0:
            return 0.0
        return float(np.max(np.abs(self(points))))

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols})"


def hstack(blocks):
    blocks = [b for b in blocks]
    rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise DimensionMismatch("hstack needs equal row counts")
    ent = [sum((list(b.entries[i]) for b in blocks), []) for i in range(rows)]
    return RationalMatrix(ent, rows, sum(b.cols for b in blocks))


def vstack(blocks):
    cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise DimensionMismatch("vstack needs equal column counts")
    ent = [row for b in blocks for row in b.entries]
    return RationalMatrix(ent, sum(b.rows for b in blocks), cols)


def block(rows_of_blocks):
    return vstack([hstack(r) for r in rows_of_blocks])


def _poly_det(P):
    """Determinant of a square list-of-lists of Polynomials (cofactor expansion)."""
    n = len(P)
    if n == 0:
        return Polynomial([1.0])
    if n == 1:
        return P[0][0]
    if n == 2:
        return P[0][0] * P[1][1] - P[0][1] * P[1][0]
    zeros_per_row = [sum(e.is_zero() for e in row) for row in P]
    i = int(np.argmax(zeros_per_row))
    acc = Polynomial()
    for j in range(n):
        if P[i][j].is_zero():
            continue
        minor = [[P[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
        term = P[i][j] * _poly_det(minor)
        acc = acc + term if (i + j) % 2 == 0 else acc - term
    return acc


def _poly_cofactor(P, i, j):
    n = len(P)
    minor = [[P[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
    d = _poly_det(minor)
    return d if (i + j) % 2 == 0 else -d


def poly_adjugate(P):
    """Adjugate of a square polynomial matrix given as nested lists."""
    n = len(P)
    return [[_poly_cofactor(P, j, i) for j in range(n)] for i in range(n)]


def common_denominator_form(M: RationalMatrix):
    """Write ``M = N / d`` with N a polynomial matrix and d a monic polynomial.

    ``d`` is the product of the distinct entry denominators, so no
    polynomial division is needed.
    """
    dens = []
    for row in M.entries:
        for e in row:
            if e.is_zero():
                continue
            dm = e.den.monic()
            if not any(x.coeffs.shape == dm.coeffs.shape and np.allclose(x.coeffs, dm.coeffs, rtol=1e-13, atol=1e-15)
                       for x in dens):
                dens.append(dm)
    d = Polynomial([1.0])
    for x in dens:
        d = d * x
    N = []
    for row in M.entries:
        nrow = []
        for e in row:
            if e.is_zero():
                nrow.append(Polynomial())
                continue
            dm = e.den.monic()
            acc = e.num / e.den.lead
            skipped = False
            for x in dens:
                if not skipped and x.coeffs.shape == dm.coeffs.shape and np.allclose(x.coeffs, dm.coeffs, rtol=1e-13,
                                                                                   atol=1e-15):
                    skipped = True
                    continue
                acc = acc * x
            nrow.append(acc)
        N.append(nrow)
    return N, d


_SHIFTS = (1.7, -1.9, 2.9, -0.55, 0.45, 3.7, -3.3, 1.23)


def _shift_point(M: RationalMatrix) -> float:
    """Real point away from the poles of M where ``M(z0)`` is best conditioned.

    Raises
    ------
    SingularMatrix
        If ``M`` is numerically singular at every candidate.
    """
    poles = M.poles()
    best, best_rc = None, 0.0
    for z0 in _SHIFTS:
        if poles.size and np.min(np.abs(poles - z0)) < 1e-3 * (1 + abs(z0)):
            continue
        s = np.linalg.svd(M(z0), compute_uv=False)
        rc = s[-1] / s[0] if s[0] > 0 else 0.0
        if rc > best_rc:
            best, best_rc = z0, rc
    if best is None or best_rc <= 1e-12:
        raise SingularMatrix("matrix is singular at every probe point")
    return best


def _shifted_realization(M: RationalMatrix):
    """Minimal realization of ``M(z0 + 1/w)`` in the variable ``w``.

    The shift makes every entry proper with invertible feedthrough
    ``M(z0)``, so inverses and determinants follow from state-space
    formulas whose size is the McMillan degree of M.
    """
    from .ssreal import realize  # ssreal is built on this module

    z0 = _shift_point(M)
    Mw = M.map(lambda e: e.substitute_mobius(z0, 1.0, 1.0, 0.0))
    return realize(Mw), z0


def _unshift(r: RationalFunction, z0: float) -> RationalFunction:
    # w = 1 / (z - z0)
    return simplify(r.substitute_mobius(0.0, 1.0, 1.0, -z0))


def rm_det(M: RationalMatrix) -> RationalFunction:
    """Determinant via ``det W = det D * det(wI - A + B D^{-1} C) / det(wI - A)``."""
    if not M.is_square():
        raise DimensionMismatch("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return RationalFunction.const(1.0)
    if n == 1:
        return M.entries[0][0]
    try:
        R, z0 = _shifted_realization(M)
    except SingularMatrix:
        return RationalFunction.const(0.0)
    Dinv = np.linalg.inv(R.D)
    num = Polynomial(np.poly(R.A - R.B @ Dinv @ R.C)[::-1]) if R.n else Polynomial([1.0])
    den = Polynomial(np.poly(R.A)[::-1]) if R.n else Polynomial([1.0])
    return _unshift(RationalFunction(num * float(np.linalg.det(R.D)), den), z0)


def _probe_points():
    rng = np.random.default_rng(7)
    return 0.3 * np.exp(2j * np.pi * rng.uniform(size=6)) + 1.7 * np.exp(2j * np.pi * rng.uniform(size=6))


def polymatrix_solve_right(Nrhs, N):
    """Entries of ``Nrhs @ N^{-1}`` for polynomial matrices, as rational functions.

    Uses ``N^{-1} = adj(N) / det(N)``; simplification happens once per
    entry of the result.
    """
    det = _poly_det(N)
    probe = _probe_points()
    scale = max([1.0] + [float(np.max(np.abs(e(probe)))) for row in N for e in row if not e.is_zero()]) ** len(N)
    if det.is_zero() or np.max(np.abs(det(probe))) <= 1e-11 * scale:
        raise SingularMatrix("determinant is identically zero")
    adj = poly_adjugate(N)
    n = len(N)
    out = []
    for row in Nrhs:
        orow = []
        for j in range(n):
            acc = Polynomial()
            for k in range(n):
                if not (row[k].is_zero() or adj[k][j].is_zero()):
                    acc = acc + row[k] * adj[k][j]
            orow.append(simplify(RationalFunction(acc, det)))
        out.append(orow)
    return out


def rm_inverse(M: RationalMatrix) -> RationalMatrix:
    """Inverse through a minimal realization of the shifted matrix.

    With ``z = z0 + 1/w`` and a minimal realization ``(A, B, C, D)`` in
    ``w``, the inverse is realized by ``(A - B D^{-1} C, B D^{-1},
    -D^{-1} C, D^{-1})`` and shifted back.

    Raises
    ------
    SingularMatrix
        If the determinant vanishes identically.
    """
    from .ssreal import Realization, transfer_function

    if not M.is_square():
        raise DimensionMismatch("inverse of a non-square matrix")
    n = M.rows
    if n == 0:
        return RationalMatrix([], 0, 0)
    R, z0 = _shifted_realization(M)
    Di = np.linalg.inv(R.D)
    Ri = Realization(R.A - R.B @ Di @ R.C, R.B @ Di, -Di @ R.C, Di)
    Wi = transfer_function(Ri)
    return Wi.map(lambda e: _unshift(e, z0))


@dataclass(frozen=True)
class GridComparison:
    equal: bool
    max_deviation: float
    argmax_point: complex | None
    skipped_points: tuple = ()

    def __bool__(self):
        return self.equal


def rm_equal_on_grid(A: RationalMatrix, B: RationalMatrix, grid: UnitCircleGrid | None = None,
                     tol: float = 1e-8, relative: bool = False, pole_guard: float = 1e-6) -> GridComparison:
    """Compare two rational matrices at the points of ``grid``.

    Points within ``pole_guard`` of a pole of either argument are skipped
    and listed in the report.  With ``relative=True`` the deviation is
    divided by ``max(1, max |B|)`` over retained points.
    """
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    grid = grid or UnitCircleGrid.default()
    pts = grid.points
    poles = np.concatenate([A.poles(), B.poles()])
    keep = np.ones(len(pts), bool)
    if poles.size:
        dist = np.min(np.abs(pts[:, None] - poles[None, :]), axis=1)
        keep = dist >= pole_guard
    skipped = tuple(complex(p) for p in pts[~keep])
    pts = pts[keep]
    if A.rows == 0 or A.cols == 0 or len(pts) == 0:
        return GridComparison(True, 0.0, None, skipped)
    va, vb = A(pts), B(pts)
    dev = np.max(np.abs(va - vb), axis=(1, 2))
    if relative:
        dev = dev / max(1.0, float(np.max(np.abs(vb))))
    k = int(np.argmax(dev))
    return GridComparison(bool(dev[k] <= tol), float(dev[k]), complex(pts[k]), skipped)
