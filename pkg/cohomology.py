"""
Normalized bar cochains with values in a C-module and their cohomology

Cochain groups are presented as integer lattices modulo the element orders of
a cyclic decomposition of B; differentials become integer matrices and
Z^n, H^n are read off a Smith normal form. Exhaustive oracles are kept next
to the lattice path so the two can be compared.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

import config
from errors import (BudgetExceeded, DegreeTooHigh, InternalError, ModuleMismatch,
                    NotACocycle, NotNormalized, ValidationError)
from fingroup import AbelianAction, FiniteGroup, Homomorphism, abelian_group
from linalg import LatticeQuotient, kernel_basis, lattice_quotient, smith_normal_form, solve

logger = logging.getLogger(__name__)

MAX_DEGREE = 3


# Cyclic decomposition of the coefficient group

@dataclass(frozen=True, eq=False)
class CyclicDecomposition:
    """B ≅ Z/d1 ⊕ ... ⊕ Z/dr with d1 | d2 | ..., generators and coordinates"""
    group: FiniteGroup
    moduli: Tuple[int, ...]
    generators: Tuple[int, ...]
    coordinates: Tuple[Tuple[int, ...], ...]
    element_of: Mapping[Tuple[int, ...], int] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def to_vector(self, b: int) -> Tuple[int, ...]:
        return self.coordinates[b]

    def from_vector(self, v: Sequence[int]) -> int:
        return self.element_of[tuple(int(x) % d for x, d in zip(v, self.moduli))]

    def prime_powers(self) -> List[int]:
        """Elementary divisors, via the factorization of each invariant factor"""
        return sorted(p ** k for d in self.moduli for p, k in sympy.factorint(d).items())


def cyclic_decomposition(B: FiniteGroup) -> CyclicDecomposition:
    """
    Invariant-factor decomposition of a finite abelian group

    B is presented on generators e_b (b ≠ 0) with relations e_a + e_b = e_{a+b};
    the Smith form of the relation matrix gives the moduli, and its S / S⁻¹
    give generators and coordinates.
    """
    n = B.order
    if n == 1:
        return CyclicDecomposition(B, (), (), ((),), {(): 0})
    relations = []
    for a in range(1, n):
        for b in range(1, n):
            col = [0] * (n - 1)
            col[a - 1] += 1
            col[b - 1] += 1
            s = B.mul(a, b)
            if s != 0:
                col[s - 1] -= 1
            relations.append(col)
    R = np.array(relations, dtype=object).T
    form = smith_normal_form(R)
    diagonal = form.diagonal
    keep = [i for i, d in enumerate(diagonal) if d != 1]
    if any(diagonal[i] == 0 for i in keep):
        raise InternalError("abelian group presentation is not finite")
    moduli = tuple(diagonal[i] for i in keep)

    def element(coeffs) -> int:
        total = 0
        for x, k in enumerate(coeffs, start=1):
            total = B.mul(total, B.power(x, int(k)))
        return total

    gens = tuple(element(form.S[:, i]) for i in keep)
    coords = [tuple([0] * len(keep))]
    for b in range(1, n):
        coords.append(tuple(int(form.S_inv[i, b - 1]) % d for i, d in zip(keep, moduli)))
    element_of: Dict[Tuple[int, ...], int] = {}
    for v in itertools.product(*[range(d) for d in moduli]):
        b = 0
        for g, k in zip(gens, v):
            b = B.mul(b, B.power(g, k))
        if coords[b] != v:
            raise InternalError(f"cyclic decomposition of {B.name} is inconsistent at {v}")
        element_of[v] = b
    if len(element_of) != n:
        raise InternalError("cyclic decomposition does not cover the group")
    return CyclicDecomposition(B, moduli, gens, tuple(coords), element_of)


# Cochains

def _tuple_index(xs: Sequence[int], base: int) -> int:
    idx = 0
    for x in xs:
        idx = idx * base + x
    return idx


@dataclass(frozen=True, eq=False)
class Cochain:
    """A normalized map C^n -> B stored flat in lexicographic order of arguments"""
    degree: int
    action: AbelianAction
    values: Tuple[int, ...]
    name: str = ''

    def __call__(self, *xs: int) -> int:
        return self.values[_tuple_index(xs, self.action.actor.order)]

    @property
    def module(self) -> FiniteGroup:
        return self.action.module

    def _check_compatible(self, other: 'Cochain'):
        if self.degree != other.degree or self.action != other.action:
            raise ModuleMismatch("cochains live over different modules or degrees")

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and self.action == other.action and self.values == other.values

    def __hash__(self):
        return hash((self.degree, self.values))

    def __add__(self, other: 'Cochain') -> 'Cochain':
        self._check_compatible(other)
        B = self.module
        return Cochain(self.degree, self.action, tuple(B.mul(a, b) for a, b in zip(self.values, other.values)))

    def __neg__(self) -> 'Cochain':
        B = self.module
        return Cochain(self.degree, self.action, tuple(B.inv(a) for a in self.values))

    def __sub__(self, other: 'Cochain') -> 'Cochain':
        return self + (-other)

    def scale(self, k: int) -> 'Cochain':
        B = self.module
        return Cochain(self.degree, self.action, tuple(B.power(a, k) for a in self.values))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def items(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Nonzero values keyed by argument tuple"""
        C = self.action.actor
        keys = itertools.product(C.elements, repeat=self.degree)
        return [(xs, v) for xs, v in zip(keys, self.values) if v != 0]

    def push_forward(self, phi: Homomorphism, action: AbelianAction) -> 'Cochain':
        """phi·c, a cochain with values in action.module"""
        if phi.source != self.module or phi.target != action.module or action.actor != self.action.actor:
            raise ModuleMismatch("push-forward along an incompatible map")
        return Cochain(self.degree, action, tuple(phi(v) for v in self.values))

    def pull_back(self, psi: Homomorphism, action: Optional[AbelianAction] = None) -> 'Cochain':
        """c∘(psi × ... × psi), over the pulled-back action unless one is given"""
        action = self.action.pull_back(psi) if action is None else action
        if action.actor != psi.source or action.module != self.module:
            raise ModuleMismatch("pull-back into an incompatible module")
        values = tuple(self(*(psi(x) for x in xs))
                       for xs in itertools.product(psi.source.elements, repeat=self.degree))
        return Cochain(self.degree, action, values)

    def __repr__(self):
        return f"Cochain(degree={self.degree}, nonzero={len(self.items())})"

    def to_dict(self) -> Dict:
        return {'degree': self.degree,
                'values': [[list(xs), v] for xs, v in self.items()]}


def make_cochain(action: AbelianAction, degree: int,
                 values: Union[Mapping[Tuple[int, ...], int], Callable[..., int]], name: str = '') -> Cochain:
    """Cochain from a mapping of argument tuples (missing tuples are 0) or a function"""
    if degree > MAX_DEGREE + 1 or degree < 0:
        raise DegreeTooHigh(f"degree {degree} is not supported", (degree,))
    C, B = action.actor, action.module
    flat = []
    for xs in itertools.product(C.elements, repeat=degree):
        v = values(*xs) if callable(values) else values.get(tuple(xs), 0)
        if not 0 <= v < B.order:
            raise ValidationError(f"value {v} at {xs} is not an element of the module", xs)
        if v != 0 and 0 in xs:
            raise NotNormalized(f"value at {xs} involves the identity", tuple(xs))
        flat.append(int(v))
    return Cochain(degree, action, tuple(flat), name)


def zero_cochain(action: AbelianAction, degree: int) -> Cochain:
    return Cochain(degree, action, (0,) * (action.actor.order ** degree))


def random_cochain(rng: np.random.Generator, action: AbelianAction, degree: int) -> Cochain:
    C, B = action.actor, action.module
    flat = []
    for xs in itertools.product(C.elements, repeat=degree):
        flat.append(0 if 0 in xs else int(rng.integers(0, B.order)))
    return Cochain(degree, action, tuple(flat))


def differential(c: Cochain) -> Cochain:
    """
    The bar differential

    (dc)(x0..xn) = x0·c(x1..xn) + Σ_k (-1)^k c(.., x(k-1)xk, ..) + (-1)^(n+1) c(x0..x(n-1))
    """
    n = c.degree
    if n > MAX_DEGREE:
        raise DegreeTooHigh(f"differential of a degree {n} cochain", (n,))
    C, B, act = c.action.actor, c.module, c.action

    def signed(v: int, k: int) -> int:
        return v if k % 2 == 0 else B.inv(v)

    flat = []
    for xs in itertools.product(C.elements, repeat=n + 1):
        if 0 in xs:
            flat.append(0)
            continue
        total = act(xs[0], c(*xs[1:]))
        for k in range(1, n + 1):
            merged = xs[:k - 1] + (C.mul(xs[k - 1], xs[k]),) + xs[k + 1:]
            total = B.mul(total, signed(c(*merged), k))
        total = B.mul(total, signed(c(*xs[:n]), n + 1))
        flat.append(total)
    return Cochain(n + 1, c.action, tuple(flat))


# Lattice presentation

class CochainComplex:
    """Normalized cochains of one module as lattices, with integer differentials"""

    def __init__(self, action: AbelianAction):
        self.action = action
        self.decomposition = cyclic_decomposition(action.module)
        self.rank = self.decomposition.rank
        C = action.actor
        self.matrices = {
            c: np.array([[self.decomposition.to_vector(action(c, g))[i] for g in self.decomposition.generators]
                         for i in range(self.rank)], dtype=object).reshape(self.rank, self.rank)
            for c in C.elements
        }
        self._tuples: Dict[int, List[Tuple[int, ...]]] = {}
        self._differentials: Dict[int, np.ndarray] = {}

    def tuples(self, n: int) -> List[Tuple[int, ...]]:
        """Argument tuples without identities, lexicographic"""
        if n not in self._tuples:
            C = self.action.actor
            self._tuples[n] = list(itertools.product(range(1, C.order), repeat=n))
        return self._tuples[n]

    def dimension(self, n: int) -> int:
        return len(self.tuples(n)) * self.rank

    def moduli(self, n: int) -> List[int]:
        return list(self.decomposition.moduli) * len(self.tuples(n))

    def to_lattice(self, c: Cochain) -> np.ndarray:
        v = []
        for xs in self.tuples(c.degree):
            v.extend(self.decomposition.to_vector(c(*xs)))
        return np.array(v, dtype=object)

    def from_lattice(self, n: int, v: Sequence[int]) -> Cochain:
        C = self.action.actor
        r = self.rank
        index = {xs: i for i, xs in enumerate(self.tuples(n))}
        flat = []
        for xs in itertools.product(C.elements, repeat=n):
            if 0 in xs:
                flat.append(0)
            else:
                i = index[xs]
                flat.append(self.decomposition.from_vector(v[i * r:(i + 1) * r]))
        return Cochain(n, self.action, tuple(flat))

    def check_budget(self, rows: int, cols: int, matrix_budget: Optional[int]):
        limit = config.MATRIX_BUDGET if matrix_budget is None else matrix_budget
        if rows * cols > limit:
            raise BudgetExceeded(f"cochain matrix {rows}x{cols}", rows * cols, limit)

    def differential_matrix(self, n: int) -> np.ndarray:
        """Integer matrix of d: C^n -> C^(n+1) on lattice coordinates"""
        if n in self._differentials:
            return self._differentials[n]
        C = self.action.actor
        r = self.rank
        rows_t, cols_t = self.tuples(n + 1), self.tuples(n)
        col_of = {xs: i for i, xs in enumerate(cols_t)}
        D = np.zeros((len(rows_t) * r, len(cols_t) * r), dtype=object)
        eye = np.eye(r, dtype=object)
        for row, xs in enumerate(rows_t):
            R = slice(row * r, (row + 1) * r)

            def add(block: np.ndarray, args: Tuple[int, ...]):
                if 0 in args:
                    return
                j = col_of[args]
                D[R, j * r:(j + 1) * r] += block

            add(self.matrices[xs[0]], xs[1:])
            for k in range(1, n + 1):
                merged = xs[:k - 1] + (C.mul(xs[k - 1], xs[k]),) + xs[k + 1:]
                add(eye if k % 2 == 0 else -eye, merged)
            add(eye if (n + 1) % 2 == 0 else -eye, xs[:n])
        self._differentials[n] = D
        return D

    def cocycle_generators(self, n: int, matrix_budget: Optional[int] = None) -> np.ndarray:
        """Columns spanning the lattice of cocycle vectors in degree n"""
        k_n, k_next = self.dimension(n), self.dimension(n + 1)
        if k_n == 0:
            return np.zeros((0, 0), dtype=object)
        if k_next == 0:
            return np.eye(k_n, dtype=object)
        self.check_budget(k_next, k_n + k_next, matrix_budget)
        D = self.differential_matrix(n)
        M = np.concatenate([D, -np.diag(np.array(self.moduli(n + 1), dtype=object))], axis=1)
        K = kernel_basis(M)
        return K[:k_n]

    def modulus_lattice(self, n: int) -> np.ndarray:
        return np.diag(np.array(self.moduli(n), dtype=object)).reshape(self.dimension(n), self.dimension(n))


@functools.lru_cache(maxsize=256)
def cochain_complex(action: AbelianAction) -> CochainComplex:
    return CochainComplex(action)


# Cohomology groups

@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """H^n (or Z^n) as Z/d1 ⊕ ... ⊕ Z/dk with cocycle representatives"""
    degree: int
    action: AbelianAction
    invariant_factors: Tuple[int, ...]
    representatives: Tuple[Cochain, ...]
    quotient: LatticeQuotient = field(repr=False)
    kind: str = 'H'

    @property
    def order(self) -> int:
        return self.quotient.order

    def decompose(self, c: Cochain) -> Tuple[int, ...]:
        """Coordinates of a cocycle in the invariant-factor presentation"""
        if c.degree != self.degree or c.action != self.action:
            raise ModuleMismatch("cochain does not belong to this cohomology group")
        if not differential(c).is_zero():
            raise NotACocycle("decompose needs a cocycle")
        return self.quotient.coordinates(cochain_complex(self.action).to_lattice(c))

    def element(self, coords: Sequence[int]) -> Cochain:
        complex_ = cochain_complex(self.action)
        v = np.zeros(complex_.dimension(self.degree), dtype=object)
        for a, rep in zip(coords, self.quotient.representatives):
            v = v + int(a) * rep
        return complex_.from_lattice(self.degree, v)

    def coordinate_tuples(self) -> List[Tuple[int, ...]]:
        return list(itertools.product(*[range(d) for d in self.invariant_factors]))

    def elements(self) -> List[Cochain]:
        """One cocycle per element, coordinates in lexicographic order"""
        return [self.element(coords) for coords in self.coordinate_tuples()]

    def as_group(self) -> FiniteGroup:
        """The abstract group, element i matching elements()[i]"""
        return abelian_group(self.invariant_factors, f"{self.kind}{self.degree}")

    def to_dict(self) -> Dict:
        return {'degree': self.degree, 'kind': self.kind, 'order': self.order,
                'invariant_factors': list(self.invariant_factors)}


def _check_degree(n: int):
    if n not in (1, 2, 3):
        raise DegreeTooHigh(f"cohomology in degree {n} is not supported", (n,))


def cohomology_group(n: int, action: AbelianAction, matrix_budget: Optional[int] = None) -> CohomologyGroup:
    """H^n(C, B) = ker d^n / im d^(n-1) via Smith normal form"""
    _check_degree(n)
    complex_ = cochain_complex(action)
    k_n = complex_.dimension(n)
    cocycles = complex_.cocycle_generators(n, matrix_budget)
    if k_n == 0:
        return _assemble(n, action, lattice_quotient(np.zeros((0, 0), dtype=object), np.zeros((0, 0), dtype=object)), 'H')
    complex_.check_budget(k_n, complex_.dimension(n - 1) + k_n, matrix_budget)
    boundaries = np.concatenate([complex_.differential_matrix(n - 1), complex_.modulus_lattice(n)], axis=1)
    quotient = lattice_quotient(cocycles, boundaries)
    group = _assemble(n, action, quotient, 'H')
    logger.info(f"H{n}({action.actor.name}, {action.module.name}) has invariant factors {list(group.invariant_factors)}")
    return group


def cocycle_group(n: int, action: AbelianAction, matrix_budget: Optional[int] = None) -> CohomologyGroup:
    """Z^n(C, B); in degree 1 the crossed homomorphisms"""
    _check_degree(n)
    complex_ = cochain_complex(action)
    cocycles = complex_.cocycle_generators(n, matrix_budget)
    if complex_.dimension(n) == 0:
        return _assemble(n, action, lattice_quotient(np.zeros((0, 0), dtype=object), np.zeros((0, 0), dtype=object)), 'Z')
    quotient = lattice_quotient(cocycles, complex_.modulus_lattice(n))
    return _assemble(n, action, quotient, 'Z')


def _assemble(n: int, action: AbelianAction, quotient: LatticeQuotient, kind: str) -> CohomologyGroup:
    complex_ = cochain_complex(action)
    reps = tuple(complex_.from_lattice(n, v) for v in quotient.representatives)
    for rep in reps:
        if not differential(rep).is_zero():
            raise InternalError(f"{kind}{n} representative is not a cocycle")
    return CohomologyGroup(n, action, quotient.factors, reps, quotient, kind)


def is_coboundary(c: Cochain, matrix_budget: Optional[int] = None) -> Optional[Cochain]:
    """A cochain b with d(b) = c, or None when c is not a coboundary"""
    if c.degree < 1 or c.degree > MAX_DEGREE:
        raise DegreeTooHigh(f"coboundary question in degree {c.degree}", (c.degree,))
    d = differential(c)
    if not d.is_zero():
        raise NotACocycle("cochain is not a cocycle", d.items()[0][0])
    n = c.degree
    complex_ = cochain_complex(c.action)
    k_n, k_prev = complex_.dimension(n), complex_.dimension(n - 1)
    if k_n == 0:
        return zero_cochain(c.action, n - 1)
    complex_.check_budget(k_n, k_prev + k_n, matrix_budget)
    system = np.concatenate([complex_.differential_matrix(n - 1), complex_.modulus_lattice(n)], axis=1)
    x = solve(system, complex_.to_lattice(c))
    if x is None:
        return None
    witness = complex_.from_lattice(n - 1, x[:k_prev])
    if differential(witness) != c:
        raise InternalError("coboundary witness does not reproduce the cochain")
    return witness


def are_cohomologous(a: Cochain, b: Cochain, matrix_budget: Optional[int] = None) -> bool:
    return is_coboundary(a - b, matrix_budget) is not None


# Exhaustive oracles

def all_cochains(action: AbelianAction, n: int):
    """Every normalized n-cochain; the caller checks the size first"""
    C, B = action.actor, action.module
    keys = list(itertools.product(C.elements, repeat=n))
    free = [i for i, xs in enumerate(keys) if 0 not in xs]
    for choice in itertools.product(B.elements, repeat=len(free)):
        flat = [0] * len(keys)
        for i, v in zip(free, choice):
            flat[i] = v
        yield Cochain(n, action, tuple(flat))


def search_space(action: AbelianAction, n: int) -> int:
    return action.module.order ** ((action.actor.order - 1) ** n)


def _check_oracle(action: AbelianAction, n: int):
    size = search_space(action, n)
    if size > config.ORACLE_LIMIT:
        raise BudgetExceeded(f"exhaustive search over {n}-cochains", size, config.ORACLE_LIMIT)


def brute_force_order(n: int, action: AbelianAction) -> Tuple[int, int]:
    """(|Z^n|, |H^n|) by enumerating every cochain"""
    _check_oracle(action, n)
    cocycles = sum(1 for c in all_cochains(action, n) if differential(c).is_zero())
    if n == 0:
        return cocycles, cocycles
    _check_oracle(action, n - 1)
    boundaries = {differential(b).values for b in all_cochains(action, n - 1)}
    return cocycles, cocycles // len(boundaries)


def brute_force_coboundary(c: Cochain) -> Optional[Cochain]:
    _check_oracle(c.action, c.degree - 1)
    for b in all_cochains(c.action, c.degree - 1):
        if differential(b) == c:
            return b
    return None
