"""Finite G-modules: unit-group quotients, residue modules, morphisms.

A module is a relation matrix over its generators plus one integer action
matrix per group element.  Unit quotients U^i/U^N use polycyclic generators
by filtration level (the Teichmuller generator of the residue units at
level 0, then 1 + basis * pi^j per level), so the relation matrix is upper
triangular and discrete logs are digit extraction.
"""

import itertools
import random
from math import prod

from .errors import (LayerMismatch, NotEquivariant, PrecisionExhausted,
                     WrongLevel)
from .fg_abelian import FgAbelianPresentation, IntMatrix


class GroupTable:
    """A finite group as a multiplication table; the identity has index 0."""

    def __init__(self, table):
        self.table = [list(r) for r in table]
        self.order = len(self.table)
        for i in range(self.order):
            if self.table[0][i] != i or self.table[i][0] != i:
                raise ValueError("index 0 is not an identity")
        self.inverse_table = [row.index(0) for row in self.table]

    @classmethod
    def cyclic(cls, n):
        return cls([[(i + j) % n for j in range(n)] for i in range(n)])

    @classmethod
    def product(cls, a, b):
        n, m = a.order, b.order

        def idx(i, j):
            return i * m + j

        table = [[0] * (n * m) for _ in range(n * m)]
        for i1 in range(n):
            for j1 in range(m):
                for i2 in range(n):
                    for j2 in range(m):
                        table[idx(i1, j1)][idx(i2, j2)] = \
                            idx(a.mul(i1, i2), b.mul(j1, j2))
        return cls(table)

    @classmethod
    def subgroup(cls, parent, indices):
        """(table, index map) for a closed subset containing the identity."""
        idx = sorted(set(indices))
        if 0 not in idx:
            raise ValueError("subgroup must contain the identity")
        pos = {g: k for k, g in enumerate(idx)}
        table = []
        for g in idx:
            row = []
            for h in idx:
                gh = parent.mul(g, h)
                if gh not in pos:
                    raise ValueError("subset is not closed under the table")
                row.append(pos[gh])
            table.append(row)
        return cls(table), idx

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        return self.inverse_table[i]

    def __len__(self):
        return self.order


class ReducedGModule:
    """SNF-diagonalized coordinates of a finite module: Z/d1 x ... x Z/dr."""

    def __init__(self, group, dvec, actions, to_matrix, from_matrix):
        self.group = group
        self.dvec = tuple(dvec)
        self.rank = len(self.dvec)
        self.actions = actions
        self.to_matrix = to_matrix
        self.from_matrix = from_matrix
        self.order = prod(self.dvec) if self.dvec else 1

    def reduce_vec(self, x):
        y = self.to_matrix @ list(x)
        return tuple(a % d for a, d in zip(y, self.dvec))

    def lift_vec(self, y):
        return tuple(self.from_matrix @ list(y))

    def normalize(self, y):
        return tuple(a % d for a, d in zip(y, self.dvec))

    def elements(self):
        return itertools.product(*[range(d) for d in self.dvec])

    def act(self, sigma_idx, y):
        return self.normalize(self.actions[sigma_idx] @ list(y))


class GModule:
    """A finite abelian group with a G-action by integer matrices."""

    def __init__(self, group, relations, actions, name="M", check=True):
        self.group = group
        self.relations = relations
        self.actions = list(actions)
        self.name = name
        self.ngens = relations.nrows
        self.presentation = FgAbelianPresentation(self.ngens, relations)
        if not self.presentation.is_finite():
            raise ValueError("module must be finite")
        self.order = self.presentation.order()
        self._reduced = None
        if check:
            self._self_test()

    def __repr__(self):
        return f"<GModule {self.name}: order {self.order}>"

    def invariant_factors(self):
        return self.presentation.invariant_factors()

    def coords_equal(self, a, b):
        return self.presentation.contains([x - y for x, y in zip(a, b)])

    def _self_test(self):
        G = self.group
        ident = IntMatrix.identity(self.ngens)
        for k in range(self.ngens):
            if not self.coords_equal(self.actions[0].col(k), ident.col(k)):
                raise ValueError("identity does not act trivially")
        # actions map the relation lattice into itself
        for A in self.actions:
            AR = A @ self.relations
            for k in range(AR.ncols):
                if not self.presentation.contains(AR.col(k)):
                    raise ValueError("action matrix does not respect relations")
        for i in range(G.order):
            for j in range(G.order):
                AiAj = self.actions[i] @ self.actions[j]
                Aij = self.actions[G.mul(i, j)]
                for k in range(self.ngens):
                    if not self.coords_equal(Aij.col(k), AiAj.col(k)):
                        raise ValueError(
                            f"actions are not functorial at pair ({i}, {j})")

    def reduced(self):
        if self._reduced is not None:
            return self._reduced
        U, D, V = self.presentation.snf()
        diag = self.presentation.diagonal()
        keep = [i for i, d in enumerate(diag) if d != 1]
        dvec = [diag[i] for i in keep]
        Uinv = U.inverse_unimodular()
        T = IntMatrix([U.rows[i] for i in keep], ncols=self.ngens)
        S = IntMatrix([[Uinv.rows[i][j] for j in keep]
                       for i in range(self.ngens)], ncols=len(keep))
        red_actions = []
        for A in self.actions:
            RA = T @ A @ S
            rows = [[x % dvec[i] if dvec[i] else x for x in row]
                    for i, row in enumerate(RA.rows)]
            red_actions.append(IntMatrix(rows, ncols=len(keep)))
        self._reduced = ReducedGModule(self.group, dvec, red_actions, T, S)
        return self._reduced


class DiagonalGModule(GModule):
    """Synthetic module Z/d1 x ... x Z/dr with explicit action matrices."""

    def __init__(self, group, dvec, actions, name="D"):
        super().__init__(group, IntMatrix.diagonal(list(dvec)),
                         [IntMatrix(a.rows if isinstance(a, IntMatrix) else a,
                                    ncols=len(dvec)) for a in actions],
                         name=name)


# -- unit quotient modules ---------------------------------------------------

class UnitQuotientModule(GModule):
    """U_L^i / U_L^N as a finite G-module in polycyclic coordinates.

    Generators: the Teichmuller generator of the residue units (level 0
    only), then 1 + beta_k pi^j for j = max(i,1) .. N-1 over a fixed F_p
    basis beta_k of the residue field.  The relation matrix comes from
    raising each generator to p (or q-1) and digit-extracting the result
    into strictly higher levels; the constructor is self-testing.
    """

    def __init__(self, L, G, level, N=None):
        self.field = L
        self.level = level
        self.N = L.N if N is None else N
        if not 0 <= level < self.N:
            raise WrongLevel(f"need 0 <= level < N, got {level} / {self.N}")
        if self.N > L.N:
            raise WrongLevel("module truncation exceeds the field precision")
        lam = L.residue_field
        self.q = lam.q

        self._basis_lifts = [L.one]
        for _ in range(L.f - 1):
            self._basis_lifts.append(self._basis_lifts[-1] * L.unram_gen)

        gens = []
        self.gen_levels = []
        if level == 0:
            self._omega_bar = lam.primitive_root()
            self.omega = L.teichmuller(self._omega_bar)
            gens.append(self.omega)
            self.gen_levels.append(0)
        for j in range(max(level, 1), self.N):
            for bk in self._basis_lifts:
                gens.append(L.one + bk * (L.pi ** j))
                self.gen_levels.append(j)
        self.generator_units = gens
        self._gen_inverses = [L.invert(g) for g in gens]

        m = len(gens)
        rel_cols = []
        for k, g in enumerate(gens):
            exp = self.q - 1 if self.gen_levels[k] == 0 else L.p
            power_coords = self.dlog(g ** exp)
            col = [exp * (t == k) - power_coords[t] for t in range(m)]
            rel_cols.append(col)
        relations = IntMatrix.from_cols(rel_cols, m)

        actions = []
        for sigma in G.elements:
            cols = [self.dlog(sigma(g)) for g in gens]
            actions.append(IntMatrix.from_cols([list(c) for c in cols], m))

        super().__init__(G, relations, actions,
                         name=f"U^{level}/U^{self.N}", check=True)
        self._self_test_unit()

    def _self_test_unit(self):
        L = self.field
        expected = (self.q - 1 if self.level == 0 else 1) * \
            self.q ** (self.N - max(self.level, 1))
        if self.order != expected:
            raise PrecisionExhausted(
                f"module order {self.order} != filtration count {expected}")
        for k, g in enumerate(self.generator_units):
            if self.dlog(g) != tuple(int(t == k) for t in range(self.ngens)):
                raise PrecisionExhausted("generator dlog is not a basis vector")
        rng = random.Random(9157)
        for _ in range(3):
            u = self.random_unit(rng)
            if not self.exp(self.dlog(u)).equals(u):
                raise PrecisionExhausted("exp/dlog round trip failed")

    def random_unit(self, rng):
        """A random unit of the module's level (for round-trip checks)."""
        L = self.field
        while True:
            x = L.from_coords([rng.randrange(L.ring.modulus)
                               for _ in range(L.n)])
            if self.level == 0:
                if L.raw_val(x) == 0:
                    return x
                continue
            return L.one + x * (L.pi ** self.level)

    def dlog(self, u):
        """Coordinates with exp(dlog(u)) = u mod pi^N.

        Digit extraction: peel the residue-unit part (level 0), then one
        filtration level at a time; terminates in at most N - level passes.
        """
        L = self.field
        lam = L.residue_field
        if L.raw_val(u) != 0:
            raise WrongLevel("dlog of a non-unit")
        if self.level >= 1:
            v = L.raw_val(u - L.one)
            if v is not None and v < self.level:
                raise WrongLevel(
                    f"unit is in U^{v} but the module starts at U^{self.level}")
        coords = []
        work = u
        pos = 0
        if self.level == 0:
            r = L.residue(work)
            a = lam.dlog(r, base=self._omega_bar) if self.q > 2 else 0
            coords.append(a)
            if a:
                work = work * (self._gen_inverses[0] ** a)
            pos = 1
        for j in range(max(self.level, 1), self.N):
            digit = L.residue(L.shift_down(work - L.one, j)) \
                if not L.is_zero(work - L.one, j + 1) else lam.zero
            for k in range(L.f):
                a = digit[k]
                coords.append(a)
                if a:
                    work = work * (self._gen_inverses[pos] ** a)
                pos += 1
        if not L.is_zero(work - L.one, self.N):
            raise PrecisionExhausted("digit extraction did not terminate")
        return tuple(coords)

    def exp(self, coords):
        L = self.field
        acc = L.one
        for g, a in zip(self.generator_units, coords):
            if a:
                acc = acc * (g ** a if a > 0 else
                             L.invert(g) ** (-a))
        return acc


def unit_quotient(L, G, level, N=None):
    return UnitQuotientModule(L, G, level, N)


# -- residue modules -----------------------------------------------------------

class ResidueGModule(GModule):
    """The residue field as a G-module.

    kind "mult": the cyclic group of nonzero residues, acting through the
    residue Galois action.  kind "add": the additive group; `twist` twists
    the action by residue(sigma(pi)/pi)^twist, which is exactly what makes
    the level-`twist` digit map of the unit filtration equivariant.
    """

    def __init__(self, L, group, kind, twist=0, actions=None, name=None):
        self.field = L
        self.kind = kind
        self.twist = twist
        lam = L.residue_field
        if kind == "mult":
            self.base = lam.primitive_root()
            relations = IntMatrix([[lam.q - 1]])
            if actions is None:
                actions = []
                for sigma in group.elements:
                    img = sigma.residue_action(self.base)
                    actions.append(IntMatrix([[lam.dlog(img, base=self.base)
                                               if lam.q > 2 else 0]]))
        elif kind == "add":
            relations = IntMatrix.diagonal([L.p] * lam.f)
            if actions is None:
                actions = [self._add_action(sigma) for sigma in group.elements]
        else:
            raise ValueError(kind)
        super().__init__(group, relations, actions,
                         name=name or f"residue-{kind}" +
                         (f"(twist {twist})" if twist else ""))

    def _add_action(self, sigma):
        L = self.field
        lam = L.residue_field
        chi = lam.one
        if self.twist:
            r = L.residue(L.divide(sigma.pi_image, L.pi))
            chi = lam.pow(r, self.twist)
        cols = []
        for k in range(lam.f):
            basis = tuple(int(t == k) for t in range(lam.f))
            img = lam.mul(chi, sigma.residue_action(basis))
            cols.append(list(img))
        return IntMatrix.from_cols(cols, lam.f)

    def dlog_residue(self, c):
        """Module coordinates of a residue-field element."""
        lam = self.field.residue_field
        if self.kind == "mult":
            return (lam.dlog(c, base=self.base) if lam.q > 2 else 0,)
        return tuple(c)


def residue_mult_module(L, G):
    return ResidueGModule(L, G, "mult")


def residue_add_module(L, G, twist=0):
    return ResidueGModule(L, G, "add", twist=twist)


def residue_galois_add_module(L):
    """The additive residue field over Gal(lambda/kappa), as its own group."""
    lam = L.residue_field
    group = GroupTable.cyclic(lam.f)
    actions = []
    for k in range(lam.f):
        cols = []
        for t in range(lam.f):
            basis = tuple(int(s == t) for s in range(lam.f))
            img = lam.pow(basis, L.p ** k)
            cols.append(list(img))
        actions.append(IntMatrix.from_cols(cols, lam.f))
    mod = GModule(group, IntMatrix.diagonal([L.p] * lam.f), actions,
                  name="residue-add over Gal(lambda/kappa)")
    return mod


# -- morphisms ------------------------------------------------------------------

class ModuleMorphism:
    """A G-equivariant homomorphism in generator coordinates."""

    def __init__(self, domain, codomain, matrix, check=True):
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        if matrix.nrows != codomain.ngens or matrix.ncols != domain.ngens:
            raise ValueError("morphism matrix shape mismatch")
        if check:
            self.check_equivariant()

    def __call__(self, coords):
        return tuple(self.matrix @ list(coords))

    def check_equivariant(self):
        if self.domain.group is not self.codomain.group:
            raise NotEquivariant("domain and codomain have different groups")
        for idx in range(self.domain.group.order):
            lhs = self.matrix @ self.domain.actions[idx]
            rhs = self.codomain.actions[idx] @ self.matrix
            for k in range(lhs.ncols):
                if not self.codomain.coords_equal(lhs.col(k), rhs.col(k)):
                    raise NotEquivariant(
                        f"morphism does not commute with element {idx}")

    def compose(self, other):
        """self after other."""
        if other.codomain is not self.domain:
            raise ValueError("composition mismatch")
        return ModuleMorphism(other.domain, self.codomain,
                              self.matrix @ other.matrix, check=False)


def projection_to_layer(M, j):
    """The G-equivariant bottom-layer digit map of a unit quotient module.

    Only j == M.level is a well-defined homomorphism on all of M (digit
    maps at non-bottom layers do not kill the power relations).  At level 0
    this is the residue map onto the multiplicative residue module; at
    level i >= 1 it reads the pi^i digit into the twisted additive module.
    """
    if j != M.level:
        raise LayerMismatch(
            f"layer {j} is not the bottom layer {M.level}; no canonical "
            "homomorphism exists on the whole module")
    L = M.field
    G = M.group
    if j == 0:
        target = residue_mult_module(L, G)
        row = [[1 if M.gen_levels[k] == 0 else 0 for k in range(M.ngens)]]
        matrix = IntMatrix(row)
    else:
        target = residue_add_module(L, G, twist=j)
        rows = [[0] * M.ngens for _ in range(L.f)]
        for pos, k in enumerate(_level_positions(M)[j]):
            rows[pos][k] = 1
        matrix = IntMatrix(rows, ncols=M.ngens)
    return ModuleMorphism(M, target, matrix)


def _level_positions(M):
    """level -> ordered generator indices at that level."""
    out = {}
    for k, j in enumerate(M.gen_levels):
        out.setdefault(j, []).append(k)
    return out


def inclusion_map(M_sub, M_amb):
    """The inclusion U^i/U^N -> U^j/U^N for i >= j (same field, same N).

    The submodule's generators are a subset of the ambient generators, so
    the matrix just reindexes them.
    """
    if M_sub.field is not M_amb.field or M_sub.N != M_amb.N:
        raise LayerMismatch("modules live over different truncations")
    if M_sub.level < M_amb.level:
        raise LayerMismatch("inclusion goes from higher level to lower")
    amb_pos = _level_positions(M_amb)
    cols = []
    for j, ks in sorted(_level_positions(M_sub).items()):
        for pos, _ in enumerate(ks):
            col = [0] * M_amb.ngens
            col[amb_pos[j][pos]] = 1
            cols.append(col)
    return ModuleMorphism(M_sub, M_amb, IntMatrix.from_cols(cols, M_amb.ngens))
