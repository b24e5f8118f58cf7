"""Seeded random instances for the property suites and experiment scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .expfield import ExpField, FieldElement
from .lindeq import (
    Equation,
    FundamentalSystem,
    Solution,
    fundamental_system,
    make_equation,
    solution_from_coefficients,
)
from .predimension import FGStructure, make_structure
from .rotundity import (
    ParamVariety,
    check_en_free,
    check_exp_free,
    eigenvalues_independent,
    en_point_variety,
    exp_point_variety,
)
from .transcendence import ldim_mod_C


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    constants: tuple[str, ...] = ("s",)
    base: str = "t"
    eigen_pool: tuple[str, ...] = ("1", "-1", "2", "-2", "s", "2*s", "s+1")
    x_slopes: tuple[str, ...] = ("1", "2", "1/2", "s")
    x_offsets: tuple[str, ...] = ("0", "1", "s")
    x_fixed: tuple[str, ...] = ("t", "2*t", "t+1", "s*t", "t^2")
    coeff_pool: tuple[int, ...] = (0, 1, -1, 2)
    max_order: int = 4
    max_solutions: int = 3
    exp_lattice: tuple[str, ...] = ("t", "s*t", "t^2")
    max_pairs: int = 3
    gamma_pool: tuple[str, ...] = ("1", "2", "-1", "s")

    def rng(self, salt: int = 0) -> random.Random:
        return random.Random(self.seed * 1_000_003 + salt)


@dataclass
class Generator:
    config: GeneratorConfig = field(default_factory=GeneratorConfig)

    def __post_init__(self):
        self.rng = self.config.rng()
        self.field = ExpField(self.config.constants, self.config.base)

    # -- equations ----------------------------------------------------------
    def multiplicities(self, n: int) -> list[int]:
        out = []
        left = n
        while left:
            m = self.rng.randint(1, left)
            out.append(m)
            left -= m
        return out

    def equation(self, max_order: int | None = None, independent: bool = False) -> Equation:
        cfg = self.config
        max_order = max_order or cfg.max_order
        while True:
            n = self.rng.randint(1, max_order)
            mults = self.multiplicities(n)
            if len(mults) > len(cfg.eigen_pool):
                continue
            mus = self.rng.sample(list(cfg.eigen_pool), len(mults))
            E = make_equation(list(zip(mus, mults)), cfg.constants, cfg.base)
            if independent and not eigenvalues_independent(E):
                continue
            return E

    # -- bases and solutions ------------------------------------------------
    def x(self, fixed: bool = False) -> FieldElement:
        cfg = self.config
        F = self.field
        if fixed:
            return F(self.rng.choice(cfg.x_fixed))
        a = F(self.rng.choice(cfg.x_slopes))
        b = F(self.rng.choice(cfg.x_offsets))
        return a * F.t + b

    def coefficients(self, E: Equation, proper: bool = False, block_constant: bool = False) -> list[int]:
        pool = [c for c in self.config.coeff_pool if c] if proper else list(self.config.coeff_pool)
        if block_constant:
            per = [self.rng.choice(pool) for _ in E.mult]
            return [per[i] for i, _ in E.blocks]
        return [self.rng.choice(pool) for _ in range(E.n)]

    def solution(
        self, E: Equation, x: FieldElement | None = None, proper: bool = False, block_constant: bool = False
    ) -> tuple[FundamentalSystem, list[int], Solution]:
        x = self.x() if x is None else x
        FS = fundamental_system(E, x)
        coeffs = self.coefficients(E, proper, block_constant)
        return FS, coeffs, solution_from_coefficients(FS, coeffs)

    def solutions(self, E: Equation, m: int | None = None, proper: bool = False, nonzero: bool = True):
        m = m if m is not None else self.rng.randint(1, self.config.max_solutions)
        out = []
        while len(out) < m:
            FS, coeffs, sol = self.solution(E, proper=proper)
            if nonzero and not any(coeffs):
                continue
            out.append(sol)
        return out

    # -- exponential pairs --------------------------------------------------
    def exp_pair(self) -> tuple[FieldElement, FieldElement]:
        cfg = self.config
        F = self.field
        while True:
            ks = [self.rng.randint(-2, 2) for _ in cfg.exp_lattice]
            if any(ks):
                break
        a = F(0)
        for k, h in zip(ks, cfg.exp_lattice):
            a = a + F(h) * k
        a = a + F(self.rng.choice(cfg.x_offsets))
        G, y = F.adjoin(a.to_ct())
        gamma = G(self.rng.choice(cfg.gamma_pool))
        return G.embed(a), y * gamma

    def exp_pairs(self, count: int | None = None) -> list[tuple[FieldElement, FieldElement]]:
        count = count if count is not None else self.rng.randint(1, self.config.max_pairs)
        pairs = []
        for _ in range(count):
            if pairs and self.rng.random() < 0.25:
                # a dependent pair: an integer multiple plus a constant shift
                a, b = self.rng.choice(pairs)
                k = self.rng.choice([-1, 2])
                shift = self.field(self.rng.choice(self.config.x_offsets))
                G, y = a.field.adjoin((a * k + shift).to_ct())
                pairs.append((G.embed(a * k + shift), y))
            else:
                pairs.append(self.exp_pair())
        return pairs

    # -- structures ---------------------------------------------------------
    def element(self) -> FieldElement:
        F = self.field
        choices = ["t", "t^2+s", "s", "2", "1/(t+1)", "s*t-1"]
        return F(self.rng.choice(choices))

    def structure(self, mode: str = "exp", constant_only: bool = False) -> FGStructure:
        F = self.field
        if constant_only:
            gens = [F(self.rng.choice(["1", "s", "2/3", "s^2+1"])) for _ in range(self.rng.randint(0, 3))]
            pairs = [(F(c), F(g)) for c, g in [("s", "2"), ("1", "s")][: self.rng.randint(0, 2)]]
            return make_structure(gens, pairs, field=F)
        gens = [self.element() for _ in range(self.rng.randint(0, 2))]
        if mode == "exp":
            return make_structure(gens, self.exp_pairs())
        E = self.equation(max_order=3)
        sols = self.solutions(E, self.rng.randint(1, 2))
        return make_structure(gens, (), sols, equation=E)

    # -- matrices -----------------------------------------------------------
    def unimodular(self, k: int, steps: int = 6) -> list[list[int]]:
        """Random product of elementary integer row operations."""
        U = [[int(i == j) for j in range(k)] for i in range(k)]
        for _ in range(steps):
            if k == 1:
                U[0][0] = -U[0][0]
                continue
            i, j = self.rng.sample(range(k), 2)
            c = self.rng.choice([-2, -1, 1, 2])
            U[i] = [a + c * b for a, b in zip(U[i], U[j])]
            if self.rng.random() < 0.3:
                U[i], U[j] = U[j], U[i]
        return U

    def int_matrix(self, k: int, n: int, entry: int = 3) -> list[list[int]]:
        return [[self.rng.randint(-entry, entry) for _ in range(n)] for _ in range(k)]

    # -- varieties ----------------------------------------------------------
    def exp_free_variety(self, n: int) -> tuple[ParamVariety, list]:
        """Locus of an exp point with Q-independent nonconstant exponents."""
        while True:
            pairs = [self.exp_pair() for _ in range(n)]
            if ldim_mod_C([a for a, _ in pairs]).dimension != n:
                continue
            V = exp_point_variety(pairs)
            if check_exp_free(V).free:
                return V, pairs

    def en_free_variety(self, max_cells: int = 3) -> tuple[Equation, ParamVariety, list[Solution]]:
        """Locus of proper E_n solutions (block-constant coefficients), E_n-free."""
        while True:
            E = self.equation(max_order=3, independent=True)
            if E.k > max_cells:
                continue
            m = self.rng.randint(1, max(1, max_cells // E.k))
            sols = []
            for _ in range(m):
                _, _, sol = self.solution(E, proper=True, block_constant=True)
                sols.append(sol)
            V = en_point_variety(E, sols)
            if check_en_free(E, V).free:
                return E, V, sols
