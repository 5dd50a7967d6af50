"""
Finite groups as multiplication tables

Elements are dense indices 0..n-1 with the identity at 0. Groups, homomorphisms
and actions are immutable once validated; every enumeration is lexicographic.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import (BudgetExceeded, NoIdentity, NoInverse, NotAbelian, NotAHomomorphism,
                    NotAssociative, NotAutomorphism, NotFunctorial, ValidationError)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A group on 0..n-1 given by its multiplication table, identity 0"""
    table: np.ndarray
    name: str = ''
    _rows: List[List[int]] = field(default=None, init=False, repr=False)
    _inverse: Tuple[int, ...] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, 'table', table)
        rows = table.tolist()
        object.__setattr__(self, '_rows', rows)
        inverse = tuple(row.index(0) for row in rows)
        object.__setattr__(self, '_inverse', inverse)

    @property
    def order(self) -> int:
        return len(self._rows)

    @property
    def identity(self) -> int:
        return 0

    @property
    def inverse(self) -> Tuple[int, ...]:
        return self._inverse

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def product(self, *xs: int) -> int:
        result = 0
        for x in xs:
            result = self._rows[result][x]
        return result

    def conj(self, g: int, x: int) -> int:
        """g·x·g⁻¹"""
        return self._rows[self._rows[g][x]][self._inverse[g]]

    def power(self, x: int, k: int) -> int:
        k %= self.element_order(x)
        result = 0
        for _ in range(k):
            result = self._rows[result][x]
        return result

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self._rows[y][x]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def rows(self) -> List[List[int]]:
        return [list(row) for row in self._rows]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.order == other.order and bool((self.table == other.table).all())

    def __hash__(self):
        return hash((self.order, self.table.tobytes()))

    def __repr__(self):
        label = self.name or 'group'
        return f"FiniteGroup({label}, order={self.order})"

    def to_dict(self) -> Dict:
        return {'name': self.name, 'order': self.order, 'abelian': self.is_abelian()}


def validate_group_with_relabel(table: Sequence[Sequence[int]], name: str = '') -> Tuple[FiniteGroup, List[int]]:
    """
    Validate a table and move its identity to index 0

    Returns the group and the relabelling old index -> new index.
    """
    rows = [list(r) for r in table]
    n = len(rows)
    if n == 0:
        raise ValidationError("empty table")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"row {i} has {len(row)} entries, expected {n}", (i,))
        for v in row:
            if not 0 <= v < n:
                raise ValidationError(f"entry {v} out of range in row {i}", (i, v))

    T = np.array(rows, dtype=np.int64)
    ar = np.arange(n)
    identities = [e for e in range(n) if (T[e] == ar).all() and (T[:, e] == ar).all()]
    if not identities:
        raise NoIdentity("table has no two-sided identity")
    e = identities[0]

    order = [e] + [x for x in range(n) if x != e]
    relabel = [0] * n
    for new, old in enumerate(order):
        relabel[old] = new
    relabel_arr = np.array(relabel)
    R = relabel_arr[T[np.ix_(order, order)]]

    for x in range(n):
        if not any(R[x, y] == 0 and R[y, x] == 0 for y in range(n)):
            raise NoInverse(f"element {order[x]} has no inverse", (order[x],))

    lhs = R[R, :]
    rhs = R[:, R]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y, z = (order[int(i)] for i in bad[0])
        raise NotAssociative(f"({x}·{y})·{z} ≠ {x}·({y}·{z})", (x, y, z))

    if e != 0:
        logger.debug(f"Group {name or '?'}: identity {e} re-indexed to 0")
    return FiniteGroup(R, name), relabel


def validate_group(table: Sequence[Sequence[int]], name: str = '') -> FiniteGroup:
    """Validated group with identity and inverses computed"""
    return validate_group_with_relabel(table, name)[0]


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A homomorphism given by the images of every source element"""
    source: FiniteGroup
    target: FiniteGroup
    images: Tuple[int, ...]
    name: str = ''

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: 'Homomorphism') -> 'Homomorphism':
        """self ∘ other"""
        return Homomorphism(other.source, self.target, tuple(self.images[i] for i in other.images))

    def kernel(self) -> List[int]:
        return [x for x in self.source.elements if self.images[x] == 0]

    def image(self) -> List[int]:
        return sorted(set(self.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.images)

    def inverse(self) -> 'Homomorphism':
        if not self.is_isomorphism():
            raise ValidationError("homomorphism is not invertible")
        inv = [0] * self.target.order
        for x, y in enumerate(self.images):
            inv[y] = x
        return Homomorphism(self.target, self.source, tuple(inv))

    def preimages(self, y: int) -> List[int]:
        return [x for x, v in enumerate(self.images) if v == y]

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Homomorphism({self.name or '?'}: {list(self.images)})"

    def to_dict(self) -> Dict:
        return {'name': self.name, 'images': list(self.images)}


def make_hom(source: FiniteGroup, target: FiniteGroup, images: Sequence[int], name: str = '') -> Homomorphism:
    images = tuple(int(v) for v in images)
    if len(images) != source.order:
        raise ValidationError(f"{len(images)} images for a group of order {source.order}")
    for x, v in enumerate(images):
        if not 0 <= v < target.order:
            raise ValidationError(f"image {v} of {x} out of range", (x, v))
    for x in source.elements:
        for y in source.elements:
            if images[source.mul(x, y)] != target.mul(images[x], images[y]):
                raise NotAHomomorphism(f"f({x}·{y}) ≠ f({x})·f({y})", (x, y))
    return Homomorphism(source, target, images, name)


def identity_hom(G: FiniteGroup) -> Homomorphism:
    return Homomorphism(G, G, tuple(G.elements))


def zero_hom(G: FiniteGroup, H: FiniteGroup) -> Homomorphism:
    return Homomorphism(G, H, (0,) * G.order)


def subgroup_generated(G: FiniteGroup, gens: Iterable[int]) -> List[int]:
    gens = list(gens)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def generators(G: FiniteGroup) -> List[int]:
    """Greedy generating set: each element not yet reached is added in index order"""
    gens: List[int] = []
    span = {0}
    for x in G.elements:
        if x not in span:
            gens.append(x)
            span = set(subgroup_generated(G, gens))
    return gens


def _extend(G: FiniteGroup, H: FiniteGroup, gens: List[int], choice: Sequence[int],
            allowed: Optional[List[set]]) -> Optional[Tuple[int, ...]]:
    images = [-1] * G.order
    images[0] = 0
    queue = [0]
    for x in queue:
        for g, hg in zip(gens, choice):
            y = G.mul(x, g)
            v = H.mul(images[x], hg)
            if images[y] == -1:
                images[y] = v
                queue.append(y)
            elif images[y] != v:
                return None
    if allowed is not None and any(images[x] not in allowed[x] for x in G.elements):
        return None
    return tuple(images)


def enumerate_homs(G: FiniteGroup, H: FiniteGroup, budget: Optional[int] = None,
                   allowed: Optional[Sequence[Iterable[int]]] = None) -> List[Homomorphism]:
    """
    All homomorphisms G -> H in lexicographic order of their image tuples

    A map is determined by the images of a generating set; every assignment is
    extended along the Cayley graph and kept when consistent. allowed, when
    given, restricts the image of each element.
    """
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    allowed_sets = [set(a) for a in allowed] if allowed is not None else None
    gens = generators(G)
    candidates = []
    for g in gens:
        order = G.element_order(g)
        pool = allowed_sets[g] if allowed_sets is not None else H.elements
        candidates.append([h for h in sorted(pool) if order % H.element_order(h) == 0])
    size = math.prod(len(c) for c in candidates)
    if size > budget:
        raise BudgetExceeded(f"homomorphisms {G.name or G.order} -> {H.name or H.order}", size, budget)

    found = []
    for choice in itertools.product(*candidates):
        images = _extend(G, H, gens, choice, allowed_sets)
        if images is not None:
            found.append(images)
    found.sort()
    logger.debug(f"{len(found)} homomorphisms out of {size} generator assignments")
    return [Homomorphism(G, H, images) for images in found]


def brute_force_homs(G: FiniteGroup, H: FiniteGroup) -> List[Homomorphism]:
    """Oracle: test every map fixing the identity"""
    size = H.order ** (G.order - 1)
    if size > config.ORACLE_LIMIT:
        raise BudgetExceeded("brute-force homomorphism oracle", size, config.ORACLE_LIMIT)
    found = []
    for rest in itertools.product(H.elements, repeat=G.order - 1):
        images = (0,) + rest
        if all(images[G.mul(x, y)] == H.mul(images[x], images[y]) for x in G.elements for y in G.elements):
            found.append(Homomorphism(G, H, images))
    return found


def find_section(f: Homomorphism, budget: Optional[int] = None) -> Optional[Homomorphism]:
    """A homomorphism s with f∘s = id, if there is one"""
    allowed = [f.preimages(c) for c in f.target.elements]
    sections = enumerate_homs(f.target, f.source, budget=budget, allowed=allowed)
    return sections[0] if sections else None


# Constructions

def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], f"Z{n}")


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], "1")


def symmetric_group(n: int) -> FiniteGroup:
    """Permutations of 0..n-1 in lexicographic order, composed right to left"""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[k]] for k in range(n))] for b in perms] for a in perms]
    return FiniteGroup(table, f"S{n}")


def abelian_group(factors: Sequence[int], name: str = '') -> FiniteGroup:
    """Z/d1 × ... × Z/dk with coordinate tuples in lexicographic order"""
    factors = [int(d) for d in factors]
    coords = list(itertools.product(*[range(d) for d in factors]))
    index = {c: i for i, c in enumerate(coords)}
    table = [[index[tuple((a + b) % d for a, b, d in zip(x, y, factors))] for y in coords] for x in coords]
    label = name or ('x'.join(f"Z{d}" for d in factors) if factors else '1')
    return FiniteGroup(table, label)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Pairs (g, h) at index g·|H| + h"""
    m = H.order
    table = [[G.mul(a // m, b // m) * m + H.mul(a % m, b % m) for b in range(G.order * m)]
             for a in range(G.order * m)]
    return FiniteGroup(table, f"{G.name}x{H.name}")


def semidirect_product(N: FiniteGroup, H: FiniteGroup, theta: Sequence[Sequence[int]]) -> FiniteGroup:
    """
    N ⋊ H with (n, h)·(n', h') = (n·θ(h)(n'), h·h')

    theta[h] is the automorphism of N attached to h, as an image tuple; pairs
    sit at index h·|N| + n.
    """
    m = N.order
    size = m * H.order
    table = [[0] * size for _ in range(size)]
    for a in range(size):
        n1, h1 = a % m, a // m
        for b in range(size):
            n2, h2 = b % m, b // m
            table[a][b] = H.mul(h1, h2) * m + N.mul(n1, theta[h1][n2])
    return validate_group(table, f"{N.name}:{H.name}")


def subgroup(G: FiniteGroup, elements: Iterable[int], name: str = '') -> Tuple[FiniteGroup, Homomorphism]:
    """The subgroup on the given elements together with its inclusion"""
    members = sorted(set(elements))
    if not members or members[0] != 0:
        raise ValidationError("subgroup must contain the identity")
    index = {x: i for i, x in enumerate(members)}
    table = []
    for x in members:
        row = []
        for y in members:
            z = G.mul(x, y)
            if z not in index:
                raise ValidationError(f"subset not closed: {x}·{y} = {z}", (x, y))
            row.append(index[z])
        table.append(row)
    S = FiniteGroup(table, name)
    return S, Homomorphism(S, G, tuple(members))


def quotient(G: FiniteGroup, normal: Iterable[int], name: str = '') -> Tuple[FiniteGroup, Homomorphism]:
    """G / N with cosets ordered by their smallest member, plus the projection"""
    N = sorted(set(normal))
    coset_of = [-1] * G.order
    reps: List[int] = []
    for x in G.elements:
        if coset_of[x] != -1:
            continue
        left = {G.mul(x, n) for n in N}
        right = {G.mul(n, x) for n in N}
        if left != right:
            raise ValidationError(f"subgroup is not normal at {x}", (x,))
        for y in left:
            coset_of[y] = len(reps)
        reps.append(x)
    table = [[coset_of[G.mul(a, b)] for b in reps] for a in reps]
    Q = FiniteGroup(table, name)
    return Q, Homomorphism(G, Q, tuple(coset_of))


def center(G: FiniteGroup) -> List[int]:
    return [z for z in G.elements if all(G.mul(z, x) == G.mul(x, z) for x in G.elements)]


# Structure

@dataclass(frozen=True, eq=False)
class GroupStructureReport:
    """Centre, automorphisms, inner and outer automorphisms of a group"""
    group: FiniteGroup
    center: Tuple[int, ...]
    automorphisms: FiniteGroup
    evaluation: Tuple[Tuple[int, ...], ...]
    inner: Tuple[int, ...]
    outer: FiniteGroup
    projection: Homomorphism
    conj: Homomorphism

    def to_dict(self) -> Dict:
        return {
            'group': self.group.name,
            'order': self.group.order,
            'center': list(self.center),
            'automorphisms': self.automorphisms.order,
            'inner': len(self.inner),
            'outer': self.outer.order,
        }


def structure_of(G: FiniteGroup, budget: Optional[int] = None) -> GroupStructureReport:
    autos = [h.images for h in enumerate_homs(G, G, budget=budget) if h.is_injective()]
    index = {a: i for i, a in enumerate(autos)}
    table = [[index[tuple(a[b[x]] for x in G.elements)] for b in autos] for a in autos]
    aut, relabel = validate_group_with_relabel(table, f"Aut({G.name})")
    if relabel != list(range(len(autos))):
        raise ValidationError("identity automorphism is not first")
    conj_images = tuple(index[tuple(G.conj(g, x) for x in G.elements)] for g in G.elements)
    conj = Homomorphism(G, aut, conj_images, 'conj')
    inner = tuple(sorted(set(conj_images)))
    outer, projection = quotient(aut, inner, f"Out({G.name})")
    centre = tuple(g for g in G.elements if conj_images[g] == 0)
    logger.info(f"Structure of {G.name or G.order}: |Z|={len(centre)} |Aut|={aut.order} "
                f"|Inn|={len(inner)} |Out|={outer.order}")
    return GroupStructureReport(G, centre, aut, tuple(autos), inner, outer, projection, conj)


# Actions

@dataclass(frozen=True, eq=False)
class AbelianAction:
    """A left action of C on an abelian group B by automorphisms"""
    actor: FiniteGroup
    module: FiniteGroup
    act: Tuple[Tuple[int, ...], ...]
    name: str = ''

    def __call__(self, c: int, b: int) -> int:
        return self.act[c][b]

    def pull_back(self, psi: Homomorphism) -> 'AbelianAction':
        """The action of psi.source through psi"""
        if psi.target != self.actor:
            raise ValidationError("pull-back along a map into a different group")
        return AbelianAction(psi.source, self.module, tuple(self.act[psi(c)] for c in psi.source.elements))

    def is_trivial(self) -> bool:
        return all(row == tuple(self.module.elements) for row in self.act)

    def __eq__(self, other):
        if not isinstance(other, AbelianAction):
            return NotImplemented
        return self.actor == other.actor and self.module == other.module and self.act == other.act

    def __hash__(self):
        return hash(self.act)

    def to_dict(self) -> Dict:
        return {'name': self.name, 'actor': self.actor.name, 'module': self.module.name,
                'act': [list(r) for r in self.act]}


def make_action(C: FiniteGroup, B: FiniteGroup, act: Sequence[Sequence[int]], name: str = '') -> AbelianAction:
    if not B.is_abelian():
        raise NotAbelian(f"module {B.name or ''} is not abelian")
    rows = tuple(tuple(int(v) for v in row) for row in act)
    if len(rows) != C.order or any(len(r) != B.order for r in rows):
        raise ValidationError("action table has the wrong shape")
    for c, row in enumerate(rows):
        if sorted(row) != list(B.elements):
            raise NotAutomorphism(f"act({c}, -) is not a bijection", (c,))
        if any(row[B.mul(a, b)] != B.mul(row[a], row[b]) for a in B.elements for b in B.elements):
            raise NotAutomorphism(f"act({c}, -) is not a homomorphism", (c,))
    if rows[0] != tuple(B.elements):
        raise NotFunctorial("identity does not act trivially", (0, 0))
    for c in C.elements:
        for d in C.elements:
            cd = C.mul(c, d)
            if any(rows[cd][b] != rows[c][rows[d][b]] for b in B.elements):
                raise NotFunctorial(f"act({c}·{d}) ≠ act({c})∘act({d})", (c, d))
    return AbelianAction(C, B, rows, name)


def trivial_action(C: FiniteGroup, B: FiniteGroup, name: str = '') -> AbelianAction:
    return make_action(C, B, [list(B.elements)] * C.order, name)


def inversion_action(C: FiniteGroup, B: FiniteGroup, sign: Homomorphism, name: str = '') -> AbelianAction:
    """C acts on B through sign: C -> Z2, the nontrivial element by b ↦ -b"""
    act = [[B.inv(b) if sign(c) else b for b in B.elements] for c in C.elements]
    return make_action(C, B, act, name)
