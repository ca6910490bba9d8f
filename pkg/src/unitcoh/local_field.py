"""Finite extensions of Q_p built as towers, with exact truncated arithmetic.

A field is one optional unramified step (given by a monic integer polynomial
irreducible mod p) followed by Eisenstein steps with integer coefficients.
Elements live in the O_L-basis u^i * pi^j with coefficients in Z/p^M; the
internal pi-adic precision is e*M, which exceeds the requested field-level
precision N by the guard digits.  Divisions by pi lose top digits only, and
the guard absorbs them; the verifier's stabilization checks are the safety
net against precision artifacts.
"""

import math
from dataclasses import dataclass, field as dc_field

from .errors import (DivisionByIndistinguishableZero, NonUnit, NotEisenstein,
                     NotIrreducibleResiduePoly, PrecisionTooSmall)
from .padic_arith import CoeffRing, is_prime, valuation
from .residue_field import ResidueField, is_irreducible_mod_p

INDISTINGUISHABLE_ZERO = math.inf


@dataclass(frozen=True)
class TowerSpec:
    """Tower data: prime, optional residue polynomial, Eisenstein steps.

    Polynomials are integer coefficient lists, lowest degree first.
    """
    p: int
    unramified_poly: tuple = None
    eisenstein_polys: tuple = ()

    def __post_init__(self):
        if self.unramified_poly is not None:
            object.__setattr__(self, "unramified_poly", tuple(self.unramified_poly))
        object.__setattr__(self, "eisenstein_polys",
                           tuple(tuple(q) for q in self.eisenstein_polys))


class FieldElement:
    """An element of O_L in the tower power basis, valid mod pi^(e*M)."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(c % field.ring.modulus for c in coords)

    def __repr__(self):
        return f"<{self.coords} in {self.field.label()}>"

    def __add__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field,
                            [a + b for a, b in zip(self.coords, other.coords)])

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field,
                            [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return self.field.coerce(other).__sub__(self)

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __mul__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field,
                            self.field._mul_coords(self.coords, other.coords))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.field.one
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def __truediv__(self, other):
        return self.field.divide(self, self.field.coerce(other))

    def raw_val(self):
        return self.field.raw_val(self)

    def val(self):
        return self.field.val(self)

    def is_unit(self):
        return self.field.raw_val(self) == 0

    def inverse(self):
        return self.field.invert(self)

    def residue(self):
        return self.field.residue(self)

    def equals(self, other, prec=None):
        return self.field.eq(self, self.field.coerce(other), prec)


class LocalField:
    """A tower-built extension of Q_p at fixed working precision."""

    def __init__(self, spec, N, guard=4):
        if not is_prime(spec.p):
            raise ValueError(f"{spec.p} is not prime")
        if N < 4:
            raise PrecisionTooSmall(f"need N >= 4, got {N}")
        self.spec = spec
        self.p = spec.p
        self.N = N

        # unramified step
        h = spec.unramified_poly
        if h is not None and len(h) - 1 >= 2:
            if h[-1] != 1:
                raise NotIrreducibleResiduePoly("residue polynomial must be monic")
            if not is_irreducible_mod_p(list(h), self.p):
                raise NotIrreducibleResiduePoly(
                    f"{list(h)} is reducible mod {self.p}")
            self.f = len(h) - 1
            self._H = tuple(h)
            self.residue_field = ResidueField(self.p, list(h))
        else:
            # degree <= 1 means no genuine unramified step
            self.f = 1
            self._H = None
            self.residue_field = ResidueField(self.p)

        # Eisenstein steps: each validated against the valuation of its floor
        self.e = 1
        self._E = None
        last_linear_const = None
        for q in spec.eisenstein_polys:
            q = tuple(q)
            d = len(q) - 1
            if d < 1 or q[-1] != 1:
                raise NotEisenstein(f"{list(q)} is not monic of positive degree")
            for i in range(1, d):
                if self.e * _vp(q[i], self.p) < 1:
                    raise NotEisenstein(
                        f"coefficient {q[i]} of degree {i} is a unit")
            if self.e * _vp(q[0], self.p) != 1:
                raise NotEisenstein(
                    f"constant term {q[0]} has valuation "
                    f"{self.e * _vp(q[0], self.p)} over the floor, need exactly 1")
            if d == 1:
                last_linear_const = q[0]
            else:
                # reachable only over an unramified floor (constant-term check)
                self._E = q
                last_linear_const = None
                self.e *= d

        self.n = self.e * self.f
        M = -(-N // self.e) + guard
        self.ring = CoeffRing(self.p, M)
        self.internal_precision = self.e * M

        self.zero = FieldElement(self, (0,) * self.n)
        self.one = self.from_int(1)
        if self.f > 1:
            self.unram_gen = FieldElement(
                self, tuple(1 if k == 1 else 0 for k in range(self.n)))
        else:
            self.unram_gen = None

        # distinguished uniformizer: root of the last Eisenstein step, else p
        if self._E is not None and last_linear_const is None:
            self.pi = FieldElement(
                self, tuple(1 if k == self.f else 0 for k in range(self.n)))
        elif last_linear_const is not None:
            self.pi = self.from_int(-last_linear_const)
        else:
            self.pi = self.from_int(self.p)

        self._pi_pows = [self.one]
        for _ in range(self.e):
            self._pi_pows.append(self._pi_pows[-1] * self.pi)
        # pi^e = p * beta with beta a unit; beta is exact mod p^(M-1)
        self._beta = FieldElement(
            self, [self._exact_div_residue(c, 1) for c in self._pi_pows[self.e].coords])
        if self.raw_val(self._beta) != 0:
            raise NotEisenstein("pi^e / p is not a unit; uniformizer is broken")
        self._beta_inv = self.invert(self._beta)

        if self.raw_val(self.from_int(self.p)) != self.e:
            raise PrecisionTooSmall("p does not factor as unit * pi^e")

        self._primitive = None
        self._teich_cache = {}

    # -- bookkeeping -------------------------------------------------------

    def label(self):
        return f"Q_{self.p} tower (e={self.e}, f={self.f}, N={self.N})"

    def __repr__(self):
        return f"LocalField({self.label()})"

    @property
    def q(self):
        return self.p ** self.f

    def coerce(self, x):
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element from a different field")
            return x
        if isinstance(x, int):
            return self.from_int(x)
        raise TypeError(f"cannot coerce {type(x)} into the field")

    def from_int(self, a):
        return FieldElement(self, (a,) + (0,) * (self.n - 1))

    def from_coords(self, coords):
        if len(coords) != self.n:
            raise ValueError("coordinate length mismatch")
        return FieldElement(self, coords)

    def lift_residue(self, c):
        """Any O_L-lift of a residue-field element (integer digit lift)."""
        coords = [0] * self.n
        for i, a in enumerate(c):
            coords[i] = a
        return FieldElement(self, coords)

    # -- core arithmetic -----------------------------------------------------

    def _mul_coords(self, a, b):
        f, e, mod = self.f, self.e, self.ring.modulus
        width = 2 * f - 1
        tmp = [[0] * width for _ in range(2 * e - 1)]
        for j1 in range(e):
            off1 = j1 * f
            for i1 in range(f):
                x = a[off1 + i1]
                if not x:
                    continue
                for j2 in range(e):
                    row = tmp[j1 + j2]
                    off2 = j2 * f
                    for i2 in range(f):
                        y = b[off2 + i2]
                        if y:
                            row[i1 + i2] = (row[i1 + i2] + x * y) % mod
        if f > 1:
            H = self._H
            for row in tmp:
                for i in range(width - 1, f - 1, -1):
                    c = row[i]
                    if c:
                        row[i] = 0
                        for t in range(f):
                            row[t + i - f] = (row[t + i - f] - c * H[t]) % mod
        if e > 1:
            E = self._E
            for j in range(2 * e - 2, e - 1, -1):
                row = tmp[j]
                if any(row[:f]):
                    for t in range(e):
                        c = E[t]
                        if c % mod == 0:
                            continue
                        target = tmp[j - e + t]
                        for i in range(f):
                            target[i] = (target[i] - c * row[i]) % mod
        return tuple(tmp[j][i] for j in range(e) for i in range(f))

    def raw_val(self, x):
        """Exact valuation when < internal precision, else None."""
        best = None
        f, e, p = self.f, self.e, self.p
        for j in range(e):
            for i in range(f):
                c = x.coords[j * f + i]
                if c:
                    v = e * valuation(c, p) + j
                    if best is None or v < best:
                        best = v
        return best

    def val(self, x):
        """Valuation capped at the field precision N; inf means
        indistinguishable from zero at level N."""
        v = self.raw_val(x)
        if v is None or v >= self.N:
            return INDISTINGUISHABLE_ZERO
        return v

    def eq(self, x, y, prec=None):
        v = self.raw_val(x - y)
        return v is None or v >= (self.N if prec is None else prec)

    def is_zero(self, x, prec=None):
        v = self.raw_val(x)
        return v is None or v >= (self.N if prec is None else prec)

    def _mul_matrix(self, x):
        """Columns: coordinates of x * basis_k."""
        cols = []
        for k in range(self.n):
            basis = tuple(1 if t == k else 0 for t in range(self.n))
            cols.append(self._mul_coords(x.coords, basis))
        return cols

    def invert(self, x):
        v = self.raw_val(x)
        if v != 0:
            raise NonUnit(f"element of valuation {v} is not a unit of O_L")
        mod = self.ring.modulus
        n = self.n
        cols = self._mul_matrix(x)
        aug = [[cols[j][i] for j in range(n)] + [1 if i == 0 else 0]
               for i in range(n)]
        for k in range(n):
            piv = next(i for i in range(k, n) if aug[i][k] % self.p)
            aug[k], aug[piv] = aug[piv], aug[k]
            inv = pow(aug[k][k], -1, mod)
            aug[k] = [a * inv % mod for a in aug[k]]
            for i in range(n):
                if i != k and aug[i][k]:
                    c = aug[i][k]
                    aug[i] = [(a - c * b) % mod for a, b in zip(aug[i], aug[k])]
        return FieldElement(self, [aug[i][n] for i in range(n)])

    def _exact_div_residue(self, c, k):
        if c % self.p ** k:
            raise NonUnit("residue not divisible by p^k")
        return c // self.p ** k

    def shift_down(self, x, v):
        """x / pi^v for x with valuation >= v.  Loses ceil(v/e) guard digits."""
        if v == 0:
            return x
        k = -(-v // self.e)
        s = self.e * k - v
        z = x * self._pi_pows[s] * (self._beta_inv ** k)
        try:
            coords = [self._exact_div_residue(c, k) for c in z.coords]
        except NonUnit:
            raise NonUnit(f"element has valuation below {v}, cannot shift") from None
        return FieldElement(self, coords)

    def divide(self, y, x):
        vx = self.raw_val(x)
        if vx is None or vx >= self.N:
            raise DivisionByIndistinguishableZero(
                f"divisor valuation >= N={self.N}")
        vy = self.raw_val(y)
        if vy is None:
            return self.zero
        if vy < vx:
            raise NonUnit(
                f"quotient has negative valuation ({vy} < {vx}); not in O_L")
        if vx == 0:
            return y * self.invert(x)
        return self.shift_down(y, vx) * self.invert(self.shift_down(x, vx))

    # -- residue field interface ----------------------------------------------

    def residue(self, x):
        lam = self.residue_field
        return lam.element([x.coords[i] % self.p for i in range(self.f)])

    def teichmuller(self, c):
        """The unique (q-1)-th root of unity lifting the nonzero residue c."""
        lam = self.residue_field
        c = lam.element(c)
        if c == lam.zero:
            raise ZeroDivisionError("no Teichmuller lift of zero")
        if c in self._teich_cache:
            return self._teich_cache[c]
        x = self.lift_residue(c)
        for _ in range(self.internal_precision + 4):
            y = x ** self.q
            if y.coords == x.coords:
                break
            x = y
        else:
            raise PrecisionTooSmall("Teichmuller iteration failed to stabilize")
        assert (x ** (self.q - 1)).coords == self.one.coords
        self._teich_cache[c] = x
        return x

    def digit_set(self):
        """Fixed lifts of all residues, used as digits in expansions."""
        return [self.lift_residue(c) for c in self.residue_field.elements()]

    # -- primitive element ------------------------------------------------------

    def primitive_element(self):
        """(gamma, minimal polynomial coefficients over Z_p, monic).

        gamma generates L over Q_p; found as u + c*pi for small c when the
        tower is mixed.  The minimal polynomial is solved from the power
        matrix; small valuation loss is tolerated and verified downstream.
        """
        if self._primitive is not None:
            return self._primitive
        if self.e == 1 and self.f == 1:
            c0 = self.pi.coords[0]
            self._primitive = (self.pi, [(-c0) % self.ring.modulus, 1])
        elif self.f == 1:
            gamma = self.pi
            self._primitive = (gamma, [c % self.ring.modulus for c in self._E])
        elif self.e == 1:
            gamma = self.unram_gen
            self._primitive = (gamma, [c % self.ring.modulus for c in self._H])
        else:
            for c in range(1, 40):
                gamma = self.unram_gen + c * self.pi
                coeffs = self._minpoly_attempt(gamma)
                if coeffs is not None:
                    self._primitive = (gamma, coeffs)
                    break
            else:
                raise PrecisionTooSmall("no primitive element with small "
                                        "coefficients found")
        return self._primitive

    def _minpoly_attempt(self, gamma, max_loss=2):
        """Coefficients of the degree-n minimal polynomial of gamma, or None
        when the power matrix is too degenerate at working precision."""
        n, mod, p = self.n, self.ring.modulus, self.p
        pows = [self.one]
        for _ in range(n):
            pows.append(pows[-1] * gamma)
        A = [[pows[k].coords[i] for k in range(n)] for i in range(n)]
        rhs = [(-pows[n].coords[i]) % mod for i in range(n)]
        aug = [row[:] + [rhs[i]] for i, row in enumerate(A)]
        perm = []
        used_rows, used_cols = set(), set()
        total_loss = 0
        for _ in range(n):
            best = None
            for i in range(n):
                if i in used_rows:
                    continue
                for j in range(n):
                    if j in used_cols:
                        continue
                    v = valuation(aug[i][j], p) if aug[i][j] else None
                    if v is not None and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                return None
            v, pi_, pj = best
            total_loss += v
            if total_loss > max_loss:
                return None
            used_rows.add(pi_)
            used_cols.add(pj)
            perm.append((pi_, pj, v))
            unit = aug[pi_][pj] // p ** v
            uinv = pow(unit, -1, mod)
            for i in range(n):
                if i in used_rows:
                    continue
                a = aug[i][pj]
                if a:
                    factor = (a // p ** v) * uinv % mod
                    aug[i] = [(x - factor * y) % mod
                              for x, y in zip(aug[i], aug[pi_])]
        coeffs = [0] * n
        for pi_, pj, v in reversed(perm):
            acc = aug[pi_][n]
            for j in range(n):
                if j != pj and coeffs[j]:
                    acc = (acc - aug[pi_][j] * coeffs[j]) % mod
            if acc % p ** v:
                return None
            unit = aug[pi_][pj] // p ** v
            coeffs[pj] = (acc // p ** v) * pow(unit, -1, mod) % mod
        return coeffs + [1]

    def eval_int_poly(self, coeffs, x):
        """Evaluate a polynomial with integer (residue) coefficients at x."""
        acc = self.zero
        for c in reversed(coeffs):
            acc = acc * x + self.from_int(c)
        return acc


def _vp(a, p):
    v = valuation(a, p)
    return 10 ** 9 if v is None else v


def build_tower(spec, N, guard=4):
    """Construct the field for a TowerSpec at field-level precision N."""
    if not isinstance(spec, TowerSpec):
        spec = TowerSpec(**spec)
    return LocalField(spec, N, guard=guard)
