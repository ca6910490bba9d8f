"""Truncated p-adic coefficient arithmetic: Z/p^M, polynomials, Hensel lifting.

All elements are canonical residues in [0, p^M).  Precision is a property
of the ring, never of individual elements; bounded digit loss from
divisions is absorbed by the guard digits the caller builds in.
"""

from .errors import HenselFailure, NonUnit, PrecisionExhausted

# Deterministic Miller-Rabin witness set, valid for n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


def is_prime(n):
    """Deterministic primality test (Miller-Rabin with proven witness set)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    if n >= _MR_BOUND:
        raise ValueError("primality test only deterministic below 3.3e24")
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation(n, p):
    """p-adic valuation of an integer; None for 0 (infinite)."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class CoeffRing:
    """The ring Z/p^M with p prime, holding the working coefficient precision."""

    def __init__(self, p, M):
        if M < 1:
            raise ValueError("precision M must be >= 1")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.M = M
        self.modulus = p ** M

    def __repr__(self):
        return f"CoeffRing(p={self.p}, M={self.M})"

    def __eq__(self, other):
        return isinstance(other, CoeffRing) and (self.p, self.M) == (other.p, other.M)

    def reduce(self, a):
        return a % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def invert(self, a):
        if a % self.p == 0:
            raise NonUnit(f"{a} is divisible by {self.p}")
        return pow(a, -1, self.modulus)

    def val(self, a):
        """p-adic valuation of the residue a; None when a == 0 (>= M)."""
        return valuation(a % self.modulus, self.p)

    def unit_part(self, a):
        """(v, u) with a = p^v * u and u a unit; a must be nonzero."""
        v = self.val(a)
        if v is None:
            raise NonUnit("cannot split the zero residue")
        return v, (a % self.modulus) // self.p ** v


class Poly:
    """Dense polynomial over a CoeffRing, lowest-degree coefficient first."""

    def __init__(self, ring, coeffs):
        self.ring = ring
        c = [ring.reduce(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0]
        self.coeffs = tuple(c)

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"

    @property
    def degree(self):
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ring == other.ring \
            and self.coeffs == other.coeffs

    def __add__(self, other):
        r = self.ring
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly(r, [r.add(x, y) for x, y in zip(a, b)])

    def __sub__(self, other):
        r = self.ring
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly(r, [r.sub(x, y) for x, y in zip(a, b)])

    def __mul__(self, other):
        r = self.ring
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % r.modulus
        return Poly(r, out)

    def scale(self, k):
        r = self.ring
        return Poly(r, [r.mul(k, c) for c in self.coeffs])

    def __call__(self, x):
        r = self.ring
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % r.modulus
        return acc

    def derivative(self):
        r = self.ring
        if self.degree < 1:
            return Poly(r, [0])
        return Poly(r, [r.mul(i, c) for i, c in enumerate(self.coeffs)][1:])

    def divmod_monic(self, other):
        """Quotient and remainder by a monic divisor."""
        r = self.ring
        if other.coeffs[-1] != 1:
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        d = other.degree
        if d < 0:
            raise ZeroDivisionError
        q = [0] * max(len(rem) - d, 1)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q[i - d] = c
            for j, b in enumerate(other.coeffs):
                rem[i - d + j] = (rem[i - d + j] - c * b) % r.modulus
        return Poly(r, q), Poly(r, rem)


def hensel_lift_root(f, r0, target_precision):
    """Lift an approximate root of f by Newton iteration.

    Requires the general Hensel regime v(f(r0)) > 2*v(f'(r0)).  The result r
    satisfies v(f(r)) >= target_precision and agrees with r0 modulo
    p^(v(f(r0)) - v(f'(r0))).  Newton doubles the correct digits per step, so
    the loop is logarithmic in the target.
    """
    ring = f.ring
    if target_precision > ring.M:
        raise PrecisionExhausted(
            f"target {target_precision} exceeds ring precision {ring.M}")
    df = f.derivative()
    r = ring.reduce(r0)
    fr = f(r)
    k = ring.val(df(r))
    m = ring.val(fr)
    if k is None or (m is not None and m <= 2 * k):
        raise HenselFailure(
            f"v(f(r0))={m} not greater than 2*v(f'(r0))={2 * k if k is not None else 'inf'}")
    while m is not None and m < target_precision:
        dfr = df(r)
        kv, du = ring.unit_part(dfr)
        # f(r)/f'(r): exact because v(f(r)) > 2*v(f'(r)) >= v(f'(r))
        step = (fr // ring.p ** kv) * ring.invert(du) % ring.modulus
        r = ring.sub(r, step)
        fr = f(r)
        new_m = ring.val(fr)
        if new_m is not None and new_m <= m:
            raise HenselFailure("Newton iteration stalled")
        m = new_m
    return r
