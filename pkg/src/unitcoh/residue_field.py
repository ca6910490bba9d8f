"""Small finite fields F_{p^f} in the power basis of a defining polynomial.

Desk-scale only: q = p^f stays tiny here, so discrete logs are table lookups
and generators are found by exhaustive order checks.
"""

from .padic_arith import is_prime


def poly_mod_gcd(a, b, p):
    """gcd of polynomials over F_p (coefficient lists, lowest degree first)."""
    a = [x % p for x in a]
    b = [x % p for x in b]

    def trim(c):
        while c and c[-1] == 0:
            c.pop()
        return c

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        r = a[:]
        for i in range(len(r) - 1, len(b) - 2, -1):
            c = r[i] * inv % p
            if c == 0:
                continue
            for j, bc in enumerate(b):
                r[i - len(b) + 1 + j] = (r[i - len(b) + 1 + j] - c * bc) % p
        a, b = b, trim(r)
    return a


def is_irreducible_mod_p(coeffs, p):
    """Rabin irreducibility test for a monic polynomial over F_p."""
    h = [c % p for c in coeffs]
    f = len(h) - 1
    if f < 1 or h[-1] != 1:
        return False
    if f == 1:
        return True

    def mulmod(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % p
        # reduce by monic h
        for i in range(len(out) - 1, f - 1, -1):
            c = out[i]
            if c:
                out[i] = 0
                for j in range(f):
                    out[i - f + j] = (out[i - f + j] - c * h[j]) % p
        return out[:f] + [0] * (f - len(out[:f]))

    def xq_power(e):
        # x^(p^e) mod h by repeated Frobenius
        cur = [0, 1] + [0] * (f - 2) if f >= 2 else [0]
        for _ in range(e):
            # raise to p-th power by square-and-multiply on the exponent
            base = cur
            acc = [1] + [0] * (f - 1)
            n = p
            while n:
                if n & 1:
                    acc = mulmod(acc, base)
                base = mulmod(base, base)
                n >>= 1
            cur = acc
        return cur

    x = [0, 1] + [0] * (f - 2)
    if xq_power(f) != x:
        return False
    fac = {d for d in range(2, f + 1) if f % d == 0 and is_prime(d)}
    for ell in fac:
        diff = [a - b for a, b in zip(xq_power(f // ell), x)]
        g = poly_mod_gcd(diff, h, p)
        if len(g) - 1 > 0:
            return False
    return True


class ResidueField:
    """F_{p^f} = F_p[y]/(h), elements as length-f tuples of residues mod p."""

    def __init__(self, p, defining_poly=None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        if defining_poly is None:
            defining_poly = [0, 1]  # F_p itself
        h = [c % p for c in defining_poly]
        self.f = len(h) - 1
        if h[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        self.defining_poly = tuple(h)
        self.q = p ** self.f
        self.zero = (0,) * self.f
        self.one = self._embed_int(1)
        self.gen = tuple(1 if i == 1 else 0 for i in range(self.f)) \
            if self.f > 1 else self.one
        self._dlog_table = None

    def __repr__(self):
        return f"ResidueField(p={self.p}, f={self.f})"

    def __eq__(self, other):
        return isinstance(other, ResidueField) and self.p == other.p \
            and self.defining_poly == other.defining_poly

    def _embed_int(self, n):
        return (n % self.p,) + (0,) * (self.f - 1)

    def element(self, coeffs):
        c = list(coeffs) + [0] * (self.f - len(coeffs))
        return tuple(x % self.p for x in c[:self.f])

    def elements(self):
        def rec(i):
            if i == self.f:
                yield ()
                return
            for rest in rec(i + 1):
                for a in range(self.p):
                    yield (a,) + rest
        return list(rec(0))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def scale(self, k, a):
        return tuple(k * x % self.p for x in a)

    def mul(self, a, b):
        p, f = self.p, self.f
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % p
        h = self.defining_poly
        for i in range(len(out) - 1, f - 1, -1):
            c = out[i]
            if c:
                out[i] = 0
                for j in range(f):
                    out[i - f + j] = (out[i - f + j] - c * h[j]) % p
        return tuple(out[:f])

    def pow(self, a, n):
        if n < 0:
            a = self.inv(a)
            n = -n
        acc = self.one
        base = a
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverting zero residue")
        return self.pow(a, self.q - 2)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def multiplicative_order(self, a):
        if a == self.zero:
            raise ZeroDivisionError
        n = self.q - 1
        order = 1
        x = a
        while x != self.one:
            x = self.mul(x, a)
            order += 1
            if order > n:
                raise RuntimeError("order search overran the group")
        return order

    def primitive_root(self):
        """First element (in enumeration order) of multiplicative order q-1."""
        if self.q == 2:
            return self.one
        for a in self.elements():
            if a != self.zero and self.multiplicative_order(a) == self.q - 1:
                return a
        raise RuntimeError("no primitive root found")

    def dlog(self, a, base=None):
        """Discrete log of a with respect to the cached primitive root."""
        if base is None:
            base = self.primitive_root()
        if self._dlog_table is None or self._dlog_table[0] != base:
            table = {}
            x = self.one
            for k in range(self.q - 1):
                table[x] = k
                x = self.mul(x, base)
            self._dlog_table = (base, table)
        return self._dlog_table[1][a]

    def poly_roots(self, coeffs):
        """All roots in the field of a polynomial given by coefficient tuples."""
        roots = []
        for a in self.elements():
            acc = self.zero
            for c in reversed(coeffs):
                acc = self.add(self.mul(acc, a), c)
            if acc == self.zero:
                roots.append(a)
        return roots
