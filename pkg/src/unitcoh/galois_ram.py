"""Galois groups by root lifting, ramification filtration, theta maps.

Automorphisms are assembled from Hensel lifts of the roots of the unramified
generator's minimal polynomial together with the roots of the Eisenstein
step; every image is then verified to be a root of the primitive element's
minimal polynomial, and the n images are verified pairwise distinct, so the
group is exactly the root set of the primitive minimal polynomial.
"""

import random

from .errors import (LevelMismatch, NotGalois, NotInLevel, PrecisionExhausted)


def poly_eval(coeffs, x):
    """Evaluate a polynomial with FieldElement coefficients at x (Horner)."""
    acc = x.field.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs):
    return [i * coeffs[i] for i in range(1, len(coeffs))]


def _newton_polish(field, coeffs, deriv, x):
    prev = -1
    for _ in range(64):
        fv = poly_eval(coeffs, x)
        v = field.raw_val(fv)
        if v is None:
            break
        if v <= prev:
            break
        prev = v
        x = x - field.divide(fv, poly_eval(deriv, x))
    if not field.is_zero(poly_eval(coeffs, x)):
        raise PrecisionExhausted("Newton polish did not reach a root at "
                                 "field precision")
    return x


def roots_in_field(field, coeffs):
    """All distinct roots in O_L of a monic polynomial over O_L.

    Digit-by-digit branch search: a partial expansion survives depth k only
    if the value has valuation > k; once a branch satisfies the Hensel
    regime v(F) > 2 v(F') it is polished by Newton iteration.  Branches from
    the same root cluster converge to the same root and are deduplicated at
    field precision.
    """
    deriv = poly_derivative(coeffs)
    digits = field.digit_set()
    branches = [field.zero]
    pi_pow = field.one
    roots = []

    def register(r):
        for s in roots:
            if s.equals(r):
                return
        roots.append(r)

    for depth in range(field.N + 1):
        nxt = []
        for base in branches:
            for d in digits:
                cand = base + d * pi_pow
                fv = poly_eval(coeffs, cand)
                v = field.raw_val(fv)
                if v is not None and v < depth + 1:
                    continue
                dv = field.raw_val(poly_eval(deriv, cand))
                if v is None or (dv is not None and v > 2 * dv):
                    register(_newton_polish(field, coeffs, deriv, cand))
                else:
                    nxt.append(cand)
        branches = nxt
        if not branches:
            break
        pi_pow = pi_pow * field.pi
    if branches:
        raise PrecisionExhausted("root branches did not separate within the "
                                 "field precision")
    return roots


def _unramified_roots(field):
    """Roots of the unramified generator's minimal polynomial, the generator
    itself first, then its Frobenius conjugates in orbit order."""
    if field.f == 1:
        return [None]
    lam = field.residue_field
    H = [field.from_int(c) for c in field._H]
    dH = poly_derivative(H)
    out = [field.unram_gen]
    target = lam.gen
    for _ in range(field.f - 1):
        target = lam.frobenius(target)
        x = field.lift_residue(target)
        prev = -1
        for _ in range(64):
            fv = poly_eval(H, x)
            v = field.raw_val(fv)
            if v is None or v <= prev:
                break
            prev = v
            x = x - poly_eval(H, x) * poly_eval(dH, x).inverse()
        if not field.is_zero(poly_eval(H, x), field.internal_precision):
            raise PrecisionExhausted("unramified root lift failed")
        out.append(x)
    return out


class Automorphism:
    """A field automorphism, stored by the images of the tower generators.

    The image of the primitive element is cached and verified to be a root
    of its minimal polynomial at working precision.
    """

    __slots__ = ("field", "u_image", "pi_image", "gamma_image", "_mix",
                 "frobenius_power")

    def __init__(self, field, u_image, pi_image):
        self.field = field
        self.u_image = u_image
        self.pi_image = pi_image
        f, e = field.f, field.e
        upows = [field.one]
        for _ in range(f - 1):
            upows.append(upows[-1] * u_image)
        pipows = [field.one]
        for _ in range(e - 1):
            pipows.append(pipows[-1] * pi_image)
        self._mix = tuple((upows[i] * pipows[j]).coords
                          for j in range(e) for i in range(f))
        lam = field.residue_field
        if field.f == 1:
            self.frobenius_power = 0
        else:
            r = field.residue(u_image)
            t = lam.gen
            for k in range(field.f):
                if t == r:
                    self.frobenius_power = k
                    break
                t = lam.frobenius(t)
            else:
                raise NotGalois("automorphism does not permute residue roots")
        gamma, _ = field.primitive_element()
        self.gamma_image = self(gamma)

    def __call__(self, x):
        mod = self.field.ring.modulus
        acc = [0] * self.field.n
        for idx, c in enumerate(x.coords):
            if c:
                mix = self._mix[idx]
                for t in range(self.field.n):
                    acc[t] = (acc[t] + c * mix[t]) % mod
        return self.field.from_coords(acc)

    def apply(self, x):
        return self(x)

    def residue_action(self, c):
        """Induced action on the residue field."""
        lam = self.field.residue_field
        return lam.pow(c, self.field.p ** self.frobenius_power)

    def is_identity(self):
        L = self.field
        pi_ok = self.pi_image.equals(L.pi)
        u_ok = L.f == 1 or self.u_image.equals(L.unram_gen)
        return pi_ok and u_ok

    def same_as(self, other):
        if self.field.f > 1 and not self.u_image.equals(other.u_image):
            return False
        return self.pi_image.equals(other.pi_image)


class GaloisGroup:
    """All automorphisms with composition and inverse tables; identity first."""

    def __init__(self, field, automorphisms):
        self.field = field
        self.elements = list(automorphisms)
        self.order = len(self.elements)
        if not self.elements[0].is_identity():
            raise NotGalois("identity automorphism must come first")
        for i in range(self.order):
            for j in range(i + 1, self.order):
                if self.elements[i].same_as(self.elements[j]):
                    raise PrecisionExhausted(
                        "two automorphisms are indistinguishable at precision")
        self.table = [[self._locate(si, sj) for sj in self.elements]
                      for si in self.elements]
        self.inverse_table = [row.index(0) for row in self.table]
        self._check_tables()
        self._spot_check()

    def _locate(self, si, sj):
        """Index of si o sj (apply sj, then si)."""
        L = self.field
        pi_img = si(sj.pi_image)
        u_img = si(sj.u_image) if L.f > 1 else None
        for k, sk in enumerate(self.elements):
            if L.f > 1 and not sk.u_image.equals(u_img):
                continue
            if sk.pi_image.equals(pi_img):
                return k
        raise NotGalois("composition leaves the automorphism set")

    def _check_tables(self):
        n = self.order
        for i in range(n):
            if self.table[0][i] != i or self.table[i][0] != i:
                raise NotGalois("identity row or column broken")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise NotGalois("composition table is not associative")

    def _spot_check(self):
        L = self.field
        rng = random.Random(1729)
        for sigma in self.elements:
            for _ in range(3):
                x = L.from_coords([rng.randrange(L.ring.modulus)
                                   for _ in range(L.n)])
                if L.raw_val(sigma(x)) != L.raw_val(x):
                    raise PrecisionExhausted("automorphism does not preserve "
                                             "the valuation")
            c = rng.randrange(1, L.ring.modulus)
            if not sigma(L.from_int(c)).equals(L.from_int(c), L.internal_precision):
                raise NotGalois("automorphism moves a base-field element")

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        return self.inverse_table[i]

    def __len__(self):
        return self.order

    def subgroup_closed(self, indices):
        s = set(indices)
        if 0 not in s:
            return False
        return all(self.table[i][j] in s for i in s for j in s)


def galois_group(L):
    """Compute Gal(L/Q_p); raises NotGalois when L is not normal over Q_p."""
    u_roots = _unramified_roots(L)
    if L._E is not None and L.e > 1:
        E = [L.from_int(c) for c in L._E]
        pi_roots = roots_in_field(L, E)
        pi_roots.sort(key=lambda r: not r.equals(L.pi))
        if not pi_roots or not pi_roots[0].equals(L.pi):
            raise PrecisionExhausted("distinguished uniformizer lost in root "
                                     "search")
        pi_roots[0] = L.pi
        if len(pi_roots) > L.e:
            raise PrecisionExhausted("more root clusters than the degree; "
                                     "precision too small to separate")
    else:
        pi_roots = [L.pi]
    if len(pi_roots) * len(u_roots) < L.n:
        raise NotGalois(
            f"only {len(pi_roots) * len(u_roots)} automorphisms exist for "
            f"degree {L.n}")
    gamma, mp = L.primitive_element()
    autos = []
    for ur in u_roots:
        for pr in pi_roots:
            a = Automorphism(L, ur, pr)
            if not L.is_zero(L.eval_int_poly(mp, a.gamma_image)):
                raise PrecisionExhausted(
                    "automorphism image is not a root of the primitive "
                    "minimal polynomial at precision")
            autos.append(a)
    return GaloisGroup(L, autos)


class RamificationFiltration:
    """Lower-numbering ramification data: breaks, subgroups, e = t * w.

    For sigma in the inertia group the break is i(sigma) =
    v(sigma(pi)/pi - 1); elements outside inertia get i(sigma) = -1 by
    convention.  Subgroups are derived views over the stored breaks.
    """

    def __init__(self, group):
        self.group = group
        L = group.field
        lam = L.residue_field
        inertia = []
        for idx, sigma in enumerate(group.elements):
            if sigma.residue_action(lam.gen) == lam.gen:
                inertia.append(idx)
        self.inertia = tuple(inertia)
        if len(self.inertia) != L.e:
            raise NotGalois(f"inertia has order {len(self.inertia)}, "
                            f"expected e = {L.e}")

        self.breaks = {}
        for idx in self.inertia:
            if idx == 0:
                continue
            sigma = group.elements[idx]
            r = L.divide(sigma.pi_image, L.pi) - L.one
            v = L.raw_val(r)
            if v is None or v >= L.N:
                raise PrecisionExhausted(
                    "sigma(pi)/pi - 1 indistinguishable from zero; raise N")
            self.breaks[idx] = v
        self.max_break = max(self.breaks.values(), default=0)
        if self.max_break + 2 > L.N:
            raise PrecisionExhausted(
                f"N = {L.N} must exceed max break {self.max_break} + 2")

        self.e = L.e
        self.f = L.f
        self.w = len(self.subgroup(1))
        self.t = self.e // self.w
        self._check()

    def subgroup(self, i):
        """Element indices of G_i (i >= -1)."""
        if i <= -1:
            return tuple(range(self.group.order))
        if i == 0:
            return self.inertia
        return (0,) + tuple(idx for idx, b in self.breaks.items() if b >= i)

    def break_of(self, idx):
        if idx == 0:
            return None
        return self.breaks.get(idx, -1)

    def distinct_breaks(self):
        return sorted(set(self.breaks.values()))

    def _check(self):
        G = self.group
        p = G.field.p
        if self.t % p == 0:
            raise NotGalois("tame index divisible by p")
        w = self.w
        while w % p == 0:
            w //= p
        if w != 1:
            raise NotGalois("wild index is not a power of p")
        for i in range(0, self.max_break + 2):
            sub = set(self.subgroup(i))
            if not set(self.subgroup(i + 1)) <= sub:
                raise NotGalois("filtration is not decreasing")
            for g in range(G.order):
                for s in sub:
                    if G.mul(G.mul(g, s), G.inv(g)) not in sub:
                        raise NotGalois(f"G_{i} is not normal")
        # G/G_0 is cyclic of order f, generated by a Frobenius lift
        counts = {}
        for sigma in G.elements:
            counts[sigma.frobenius_power] = counts.get(sigma.frobenius_power, 0) + 1
        if counts != {k: self.e for k in range(self.f)}:
            raise NotGalois("residue action is not cyclic of order f")


def ramification_filtration(G):
    return RamificationFiltration(G)


def theta(filtration, i, sigma_idx):
    """theta_i(sigma): the level-i digit of sigma(pi)/pi.

    Level 0 lands in the multiplicative group of the residue field, level
    i >= 1 in its additive group (via the chosen pi).
    """
    if sigma_idx not in filtration.subgroup(i):
        raise NotInLevel(f"element {sigma_idx} is not in G_{i}")
    L = filtration.group.field
    sigma = filtration.group.elements[sigma_idx]
    r = L.divide(sigma.pi_image, L.pi)
    if i == 0:
        return L.residue(r)
    return L.residue(L.shift_down(r - L.one, i))


class Cocycle:
    """A 1-cocycle G -> M in additive module coordinates.

    values[k] is the coordinate vector of c(sigma_k); the identity entry is
    zero and the cocycle identity c(st) = c(s) + A_s c(t) is checked
    exhaustively at construction.
    """

    def __init__(self, module, values, check=True):
        self.module = module
        self.values = [tuple(v) for v in values]
        if len(self.values) != module.group.order:
            raise ValueError("one value per group element required")
        if any(self.values[0]):
            raise NotInLevel("cocycle must vanish at the identity")
        if check:
            self.check_identity()

    def check_identity(self):
        M = self.module
        G = M.group
        for i in range(G.order):
            Ai = M.actions[i]
            for j in range(G.order):
                lhs = self.values[G.mul(i, j)]
                rhs = [a + b for a, b in zip(self.values[i],
                                             Ai @ list(self.values[j]))]
                if not M.coords_equal(lhs, rhs):
                    from .errors import NotACocycle
                    raise NotACocycle(f"identity fails at pair ({i}, {j})")

    def __sub__(self, other):
        if other.module is not self.module:
            raise ValueError("cocycles over different modules")
        return Cocycle(self.module,
                       [tuple(a - b for a, b in zip(x, y))
                        for x, y in zip(self.values, other.values)],
                       check=False)

    def scaled(self, k):
        return Cocycle(self.module,
                       [tuple(k * a for a in v) for v in self.values],
                       check=False)


def fundamental_cocycle(G, M):
    """The cocycle sigma -> sigma(pi)/pi with values in the level-0 module."""
    if getattr(M, "level", None) != 0:
        raise LevelMismatch("fundamental cocycle needs the level-0 unit module")
    return uniformizer_cocycle(G, M, G.field.pi)


def uniformizer_cocycle(G, M, pi_prime):
    """The cocycle sigma -> sigma(pi')/pi' for any uniformizer pi'."""
    L = G.field
    if L.raw_val(pi_prime) != 1:
        raise LevelMismatch("not a uniformizer (valuation != 1)")
    values = []
    for sigma in G.elements:
        r = L.divide(sigma(pi_prime), pi_prime)
        if L.raw_val(r) != 0:
            raise PrecisionExhausted("sigma(pi)/pi is not a unit")
        values.append(M.dlog(r))
    return Cocycle(M, values)
