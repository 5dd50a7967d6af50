"""
Finite categories, functors and fibrations

Decides cartesian and opcartesian morphisms, (op)fibrations and fibrewise
opfibrations on explicit composition tables, builds the bijection Φ between
hom-sets over a base morphism and a vertical hom-set, and certifies the torsor
structure of those hom-sets. Also hosts the seeded generator of random
fibrewise opfibrations with groupoidal fibres.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import config
from errors import (CompositionMismatch, FibresNotGroupoidal, NotACategory, NotAFunctor,
                    ValidationError)
from fingroup import FiniteGroup, validate_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FinCategory:
    """Objects 0..k-1, morphisms 0..m-1 with src/dst, identities and a partial composition"""
    name: str
    num_objects: int
    src: Tuple[int, ...]
    dst: Tuple[int, ...]
    identities: Tuple[int, ...]
    composition: Mapping[Tuple[int, int], int] = field(repr=False)
    _homs: Dict[Tuple[int, int], List[int]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        homs: Dict[Tuple[int, int], List[int]] = {}
        for f, (a, b) in enumerate(zip(self.src, self.dst)):
            homs.setdefault((a, b), []).append(f)
        object.__setattr__(self, '_homs', homs)

    @property
    def objects(self) -> range:
        return range(self.num_objects)

    @property
    def morphisms(self) -> range:
        return range(len(self.src))

    @property
    def num_morphisms(self) -> int:
        return len(self.src)

    def hom(self, x: int, y: int) -> List[int]:
        return self._homs.get((x, y), [])

    def compose(self, g: int, f: int) -> int:
        """g·f (f first)"""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise ValidationError(f"{g}·{f} is not composable in {self.name}", (g, f))

    def is_identity(self, f: int) -> bool:
        return self.identities[self.src[f]] == f

    def inverse(self, f: int) -> Optional[int]:
        a, b = self.src[f], self.dst[f]
        for g in self.hom(b, a):
            if self.composition[(g, f)] == self.identities[a] and self.composition[(f, g)] == self.identities[b]:
                return g
        return None

    def is_invertible(self, f: int) -> bool:
        return self.inverse(f) is not None

    def __repr__(self):
        return f"FinCategory({self.name}, objects={self.num_objects}, morphisms={self.num_morphisms})"


def make_category(name: str, num_objects: int, arrows: Sequence[Tuple[int, int]],
                  identities: Sequence[int], composition: Mapping[Tuple[int, int], int]) -> FinCategory:
    """Validated category; unit and associativity laws are checked exhaustively"""
    src = tuple(int(a) for a, _ in arrows)
    dst = tuple(int(b) for _, b in arrows)
    m = len(arrows)
    for f, (a, b) in enumerate(arrows):
        if not (0 <= a < num_objects and 0 <= b < num_objects):
            raise NotACategory(f"morphism {f} has an endpoint outside the objects", (f,))
    identities = tuple(int(i) for i in identities)
    if len(identities) != num_objects:
        raise NotACategory("one identity per object is required")
    for x, i in enumerate(identities):
        if not 0 <= i < m or src[i] != x or dst[i] != x:
            raise NotACategory(f"identity of object {x} is not an endomorphism of {x}", (x, i))
    composition = {(int(g), int(f)): int(gf) for (g, f), gf in composition.items()}
    for (g, f), gf in composition.items():
        if not (0 <= g < m and 0 <= f < m and 0 <= gf < m) or dst[f] != src[g]:
            raise NotACategory(f"composition {g}·{f} is defined for a non-composable pair", (g, f))
        if src[gf] != src[f] or dst[gf] != dst[g]:
            raise NotACategory(f"{g}·{f} = {gf} has the wrong endpoints", (g, f, gf))
    for f in range(m):
        for g in range(m):
            if dst[f] == src[g] and (g, f) not in composition:
                raise NotACategory(f"composition {g}·{f} is missing", (g, f))
    for f in range(m):
        if composition[(identities[dst[f]], f)] != f or composition[(f, identities[src[f]])] != f:
            raise NotACategory(f"unit law fails at {f}", (f,))
    for f in range(m):
        for g in range(m):
            if dst[f] != src[g]:
                continue
            gf = composition[(g, f)]
            for h in range(m):
                if dst[g] == src[h] and composition[(h, gf)] != composition[(composition[(h, g)], f)]:
                    raise NotACategory(f"associativity fails at ({h}, {g}, {f})", (h, g, f))
    return FinCategory(name, num_objects, src, dst, identities, composition)


@dataclass(frozen=True, eq=False)
class FunctorTable:
    source: FinCategory
    target: FinCategory
    obj_map: Tuple[int, ...]
    mor_map: Tuple[int, ...]
    name: str = ''

    def __call__(self, f: int) -> int:
        return self.mor_map[f]

    def ob(self, x: int) -> int:
        return self.obj_map[x]

    def over(self, x: int, y: int, beta: int) -> List[int]:
        """Morphisms x -> y sent to beta"""
        return [f for f in self.source.hom(x, y) if self.mor_map[f] == beta]

    def is_vertical(self, f: int) -> bool:
        return self.target.is_identity(self.mor_map[f])

    def __eq__(self, other):
        if not isinstance(other, FunctorTable):
            return NotImplemented
        return (self.source is other.source and self.target is other.target
                and self.obj_map == other.obj_map and self.mor_map == other.mor_map)

    def __hash__(self):
        return hash((self.obj_map, self.mor_map))


def make_functor(source: FinCategory, target: FinCategory, obj_map: Sequence[int],
                 mor_map: Sequence[int], name: str = '') -> FunctorTable:
    obj_map = tuple(int(v) for v in obj_map)
    mor_map = tuple(int(v) for v in mor_map)
    if len(obj_map) != source.num_objects or len(mor_map) != source.num_morphisms:
        raise NotAFunctor("functor tables have the wrong length")
    for f in source.morphisms:
        g = mor_map[f]
        if not 0 <= g < target.num_morphisms:
            raise NotAFunctor(f"image of morphism {f} out of range", (f,))
        if target.src[g] != obj_map[source.src[f]] or target.dst[g] != obj_map[source.dst[f]]:
            raise NotAFunctor(f"morphism {f} is sent to a morphism with other endpoints", (f,))
    for x in source.objects:
        if mor_map[source.identities[x]] != target.identities[obj_map[x]]:
            raise NotAFunctor(f"identity of {x} is not preserved", (x,))
    for (g, f), gf in source.composition.items():
        if mor_map[gf] != target.compose(mor_map[g], mor_map[f]):
            raise NotAFunctor(f"composition {g}·{f} is not preserved", (g, f))
    return FunctorTable(source, target, obj_map, mor_map, name)


def identity_functor(X: FinCategory) -> FunctorTable:
    return FunctorTable(X, X, tuple(X.objects), tuple(X.morphisms), f"id_{X.name}")


def compose_functors(G: FunctorTable, P: FunctorTable) -> FunctorTable:
    """G∘P"""
    if P.target is not G.source:
        raise CompositionMismatch("functors are not composable")
    return FunctorTable(P.source, G.target, tuple(G.ob(P.ob(x)) for x in P.source.objects),
                        tuple(G(P(f)) for f in P.source.morphisms), f"{G.name}∘{P.name}")


# Products and chains

def chain_category(k: int, name: str = '') -> FinCategory:
    """The poset 0 < 1 < ... < k-1; morphism (i, j) for i ≤ j, lexicographic"""
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    index = {p: n for n, p in enumerate(pairs)}
    composition = {(index[(j, l)], index[(i, j)]): index[(i, l)]
                   for (i, j) in pairs for (j2, l) in pairs if j2 == j}
    identities = [index[(i, i)] for i in range(k)]
    return FinCategory(name or f"[{k}]", k, tuple(i for i, _ in pairs), tuple(j for _, j in pairs),
                       tuple(identities), composition)


def product_category(A: FinCategory, B: FinCategory, name: str = '') -> FinCategory:
    """A × B with objects a·|B| + b and morphisms f·|B_mor| + g"""
    nb, mb = B.num_objects, B.num_morphisms
    src, dst = [], []
    for f in A.morphisms:
        for g in B.morphisms:
            src.append(A.src[f] * nb + B.src[g])
            dst.append(A.dst[f] * nb + B.dst[g])
    identities = [A.identities[a] * mb + B.identities[b] for a in A.objects for b in B.objects]
    composition = {}
    for (f2, f1), f in A.composition.items():
        for (g2, g1), g in B.composition.items():
            composition[(f2 * mb + g2, f1 * mb + g1)] = f * mb + g
    return FinCategory(name or f"{A.name}x{B.name}", A.num_objects * nb, tuple(src), tuple(dst),
                       tuple(identities), composition)


def opposite(X: FinCategory, name: str = '') -> FinCategory:
    """Same objects and morphism ids with source and target swapped"""
    composition = {(f, g): gf for (g, f), gf in X.composition.items()}
    return FinCategory(name or f"{X.name}^op", X.num_objects, X.dst, X.src, X.identities, composition)


def projection_functor(A: FinCategory, B: FinCategory, AB: FinCategory, first: bool = True) -> FunctorTable:
    nb, mb = B.num_objects, B.num_morphisms
    if first:
        return FunctorTable(AB, A, tuple(x // nb for x in AB.objects), tuple(f // mb for f in AB.morphisms), 'pr1')
    return FunctorTable(AB, B, tuple(x % nb for x in AB.objects), tuple(f % mb for f in AB.morphisms), 'pr2')


# Cartesian and opcartesian morphisms

@dataclass
class Check:
    """Outcome of a decision procedure with the first witness of failure"""
    ok: bool
    witness: Optional[Tuple] = None
    reason: str = ''

    def __bool__(self):
        return self.ok

    def to_dict(self) -> Dict:
        return {'ok': self.ok, 'witness': list(self.witness) if self.witness else None, 'reason': self.reason}


def is_cartesian(P: FunctorTable, f: int) -> Check:
    """
    Every α: P(x') -> P(src f) lifts uniquely through f

    Composition with f must biject X_α(x', src f) onto X_{P(f)·α}(x', dst f).
    The witness is (x', α, lifted morphism, number of liftings).
    """
    X, B = P.source, P.target
    a, b = X.src[f], X.dst[f]
    for x2 in X.objects:
        for alpha in B.hom(P.ob(x2), P.ob(a)):
            counts = {g: 0 for g in P.over(x2, b, B.compose(P(f), alpha))}
            for h in P.over(x2, a, alpha):
                counts[X.compose(f, h)] += 1
            for g, n in counts.items():
                if n != 1:
                    return Check(False, (x2, alpha, g, n), f"{n} liftings of {alpha} through {f}")
    return Check(True)


def is_opcartesian(P: FunctorTable, f: int) -> Check:
    """Dual of is_cartesian: every β: P(dst f) -> P(y') extends uniquely from f"""
    X, B = P.source, P.target
    a, b = X.src[f], X.dst[f]
    for y2 in X.objects:
        for beta in B.hom(P.ob(b), P.ob(y2)):
            counts = {g: 0 for g in P.over(a, y2, B.compose(beta, P(f)))}
            for h in P.over(b, y2, beta):
                counts[X.compose(h, f)] += 1
            for g, n in counts.items():
                if n != 1:
                    return Check(False, (y2, beta, g, n), f"{n} extensions of {beta} through {f}")
    return Check(True)


def cartesian_lift(P: FunctorTable, phi: int, y: int) -> Optional[int]:
    """Smallest cartesian morphism over phi with codomain y"""
    for f in _over_into(P, y, phi):
        if is_cartesian(P, f):
            return f
    return None


def opcartesian_lift(P: FunctorTable, phi: int, x: int) -> Optional[int]:
    """Smallest opcartesian morphism over phi with domain x"""
    for f in _over_from(P, x, phi):
        if is_opcartesian(P, f):
            return f
    return None


def _over_into(P: FunctorTable, y: int, phi: int) -> List[int]:
    X = P.source
    return [f for f in X.morphisms if X.dst[f] == y and P(f) == phi]


def _over_from(P: FunctorTable, x: int, phi: int) -> List[int]:
    X = P.source
    return [f for f in X.morphisms if X.src[f] == x and P(f) == phi]


def is_fibration(P: FunctorTable) -> Check:
    X, B = P.source, P.target
    for phi in B.morphisms:
        for y in X.objects:
            if P.ob(y) == B.dst[phi] and cartesian_lift(P, phi, y) is None:
                return Check(False, (phi, y), f"no cartesian lifting of {phi} at {y}")
    return Check(True)


def is_opfibration(P: FunctorTable) -> Check:
    X, B = P.source, P.target
    for phi in B.morphisms:
        for x in X.objects:
            if P.ob(x) == B.src[phi] and opcartesian_lift(P, phi, x) is None:
                return Check(False, (phi, x), f"no opcartesian lifting of {phi} at {x}")
    return Check(True)


@dataclass(frozen=True, eq=False)
class Fibre:
    """The subcategory over an identity, with index maps back to the ambient category"""
    category: FinCategory
    objects: Tuple[int, ...]
    morphisms: Tuple[int, ...]

    def local_object(self, x: int) -> int:
        return self.objects.index(x)

    def local_morphism(self, f: int) -> int:
        return self.morphisms.index(f)


def fibre_of(F: FunctorTable, b: int) -> Fibre:
    X, B = F.source, F.target
    objs = tuple(x for x in X.objects if F.ob(x) == b)
    mors = tuple(f for f in X.morphisms if F(f) == B.identities[b])
    obj_index = {x: i for i, x in enumerate(objs)}
    mor_index = {f: i for i, f in enumerate(mors)}
    composition = {(mor_index[g], mor_index[f]): mor_index[X.compose(g, f)]
                   for g in mors for f in mors if X.dst[f] == X.src[g]}
    category = FinCategory(f"{X.name}_{b}", len(objs), tuple(obj_index[X.src[f]] for f in mors),
                           tuple(obj_index[X.dst[f]] for f in mors),
                           tuple(mor_index[X.identities[x]] for x in objs), composition)
    return Fibre(category, objs, mors)


def restrict_to_fibres(P: FunctorTable, X_b: Fibre, M_b: Fibre) -> FunctorTable:
    obj_map = tuple(M_b.local_object(P.ob(x)) for x in X_b.objects)
    mor_map = tuple(M_b.local_morphism(P(f)) for f in X_b.morphisms)
    return FunctorTable(X_b.category, M_b.category, obj_map, mor_map, f"{P.name}_b")


# Fibrewise opfibrations

@dataclass(frozen=True, eq=False)
class FOFTriple:
    """P: X -> M, F: X -> B, G: M -> B with G∘P = F"""
    P: FunctorTable
    F: FunctorTable
    G: FunctorTable
    name: str = ''
    cache: Dict = field(default_factory=dict, repr=False)

    @property
    def X(self) -> FinCategory:
        return self.P.source

    @property
    def M(self) -> FinCategory:
        return self.P.target

    @property
    def B(self) -> FinCategory:
        return self.F.target

    def fibre_functor(self, b: int) -> Tuple[FunctorTable, Fibre, Fibre]:
        key = ('fibre', b)
        if key not in self.cache:
            X_b, M_b = fibre_of(self.F, b), fibre_of(self.G, b)
            self.cache[key] = (restrict_to_fibres(self.P, X_b, M_b), X_b, M_b)
        return self.cache[key]

    def cartesian_lift(self, phi: int, y: int) -> Optional[int]:
        key = ('cart', phi, y)
        if key not in self.cache:
            self.cache[key] = cartesian_lift(self.F, phi, y)
        return self.cache[key]

    def vertical_opcartesian_lift(self, phi_v: int, x: int) -> Optional[int]:
        """Opcartesian lifting of a G-vertical phi_v at x inside the fibre of F(x)"""
        key = ('opcart', phi_v, x)
        if key not in self.cache:
            P_b, X_b, M_b = self.fibre_functor(self.F.ob(x))
            local = opcartesian_lift(P_b, M_b.local_morphism(phi_v), X_b.local_object(x))
            self.cache[key] = None if local is None else X_b.morphisms[local]
        return self.cache[key]


def make_fof_triple(P: FunctorTable, F: FunctorTable, G: FunctorTable, name: str = '') -> FOFTriple:
    if P.source is not F.source or P.target is not G.source or F.target is not G.target:
        raise CompositionMismatch("functors of the triple do not share their categories")
    if compose_functors(G, P) != F:
        raise CompositionMismatch("G∘P ≠ F")
    return FOFTriple(P, F, G, name)


def is_fibrewise_opfibration(triple: FOFTriple) -> Check:
    """
    F and G fibrations, P sending F-cartesian to G-cartesian morphisms, and
    every fibre restriction P_b an opfibration
    """
    P, F, G = triple.P, triple.F, triple.G
    GP = compose_functors(G, P)
    if GP.obj_map != F.obj_map or GP.mor_map != F.mor_map:
        raise CompositionMismatch("G∘P ≠ F")
    check = is_fibration(F)
    if not check:
        return Check(False, ('F',) + check.witness, check.reason)
    check = is_fibration(G)
    if not check:
        return Check(False, ('G',) + check.witness, check.reason)
    for f in triple.X.morphisms:
        if is_cartesian(F, f) and not is_cartesian(G, P(f)):
            return Check(False, ('P', f), f"P does not preserve the cartesian morphism {f}")
    for b in triple.B.objects:
        P_b, X_b, _ = triple.fibre_functor(b)
        check = is_opfibration(P_b)
        if not check:
            phi, x = check.witness
            return Check(False, ('fibre', b, x, phi), f"fibre over {b}: {check.reason}")
    logger.debug(f"{triple.name or 'triple'} is a fibrewise opfibration")
    return Check(True)


@dataclass
class PhiBijection:
    """Φ(f) = w·f·u from X_{P(φ*y)}(φ_*x, φ*y) to X_φ(x, y)"""
    w: int
    u: int
    phi_k: int
    phi_v: int
    pullback_object: int
    pushforward_object: int
    domain: List[int]
    codomain: List[int]
    table: Dict[int, int]
    bijective: bool

    def inverse(self) -> Dict[int, int]:
        return {v: k for k, v in self.table.items()}

    def to_dict(self) -> Dict:
        return {'w': self.w, 'u': self.u, 'phi_k': self.phi_k, 'phi_v': self.phi_v,
                'domain': self.domain, 'codomain': self.codomain, 'bijective': self.bijective}


def phi_bijection(triple: FOFTriple, x: int, y: int, phi: int) -> PhiBijection:
    P, F, G = triple.P, triple.F, triple.G
    X, M, Bc = triple.X, triple.M, triple.B
    if M.src[phi] != P.ob(x) or M.dst[phi] != P.ob(y):
        raise ValidationError(f"{phi} is not a morphism P({x}) -> P({y})", (x, y, phi))
    w = triple.cartesian_lift(G(phi), y)
    if w is None:
        raise ValidationError(f"no F-cartesian lifting of G({phi}) at {y}", (phi, y))
    phi_k = P(w)
    pulled = X.src[w]
    vertical_id = Bc.identities[F.ob(x)]
    factors = [m for m in M.hom(P.ob(x), P.ob(pulled))
               if G(m) == vertical_id and M.compose(phi_k, m) == phi]
    if len(factors) != 1:
        raise ValidationError(f"{len(factors)} vertical factorizations of {phi} through {phi_k}", (phi,))
    phi_v = factors[0]
    u = triple.vertical_opcartesian_lift(phi_v, x)
    if u is None:
        raise ValidationError(f"no opcartesian lifting of {phi_v} at {x} in its fibre", (phi_v, x))
    pushed = X.dst[u]
    domain = P.over(pushed, pulled, M.identities[P.ob(pulled)])
    codomain = P.over(x, y, phi)
    table = {f: X.compose(w, X.compose(f, u)) for f in domain}
    bijective = len(set(table.values())) == len(domain) and sorted(table.values()) == sorted(codomain)
    return PhiBijection(w, u, phi_k, phi_v, pulled, pushed, domain, codomain, table, bijective)


# Torsors

class Verdict(Enum):
    EMPTY = 'empty'
    TORSOR = 'torsor'
    VIOLATION = 'violation'


def certify_action(group: FiniteGroup, n_points: int, action: Sequence[Sequence[int]]) -> Tuple[Verdict, str]:
    """
    Decide whether action[g][p] is a simply transitive action on n_points points

    Returns EMPTY for no points and VIOLATION with a description when the
    table fails an action axiom or is not simply transitive.
    """
    if n_points == 0:
        return Verdict.EMPTY, ''
    if len(action) != group.order:
        return Verdict.VIOLATION, "action table has the wrong number of rows"
    if any(action[0][p] != p for p in range(n_points)):
        return Verdict.VIOLATION, "identity does not act trivially"
    for g in group.elements:
        for h in group.elements:
            gh = group.mul(g, h)
            for p in range(n_points):
                if action[gh][p] != action[g][action[h][p]]:
                    return Verdict.VIOLATION, f"action is not compatible at ({g}, {h}, {p})"
    if group.order != n_points:
        return Verdict.VIOLATION, f"group of order {group.order} acting on {n_points} points"
    for p in range(n_points):
        if len({action[g][p] for g in group.elements}) != n_points:
            return Verdict.VIOLATION, f"orbit of {p} is not everything"
    return Verdict.TORSOR, ''


@dataclass
class TorsorReport:
    homset: List
    acting_group: FiniteGroup
    action: List[List[int]]
    verdict: Verdict
    details: str = ''
    group_elements: List = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {'homset_size': len(self.homset), 'group_order': self.acting_group.order,
                'verdict': self.verdict.value, 'details': self.details}


def _check_groupoidal_fibres(triple: FOFTriple):
    if 'groupoidal' in triple.cache:
        return
    X, P = triple.X, triple.P
    for f in X.morphisms:
        if P.is_vertical(f) and not X.is_invertible(f):
            raise FibresNotGroupoidal(f"vertical morphism {f} over {P.ob(X.src[f])} is not invertible",
                                      (P.ob(X.src[f]), f))
    triple.cache['groupoidal'] = True


def vertical_automorphisms(triple: FOFTriple, z: int) -> Tuple[FiniteGroup, List[int]]:
    """The group of P-vertical endomorphisms of z, identity first"""
    X, P = triple.X, triple.P
    ident = X.identities[z]
    elements = [ident] + [h for h in P.over(z, z, triple.M.identities[P.ob(z)]) if h != ident]
    index = {h: i for i, h in enumerate(elements)}
    table = [[index[X.compose(g, h)] for h in elements] for g in elements]
    return validate_group(table, f"Aut_v({z})"), elements


def torsor_certificate(triple: FOFTriple, x: int, y: int, phi: int) -> TorsorReport:
    """The hom-set over phi as an H-set with H the vertical automorphisms of φ*y"""
    _check_groupoidal_fibres(triple)
    X = triple.X
    bij = phi_bijection(triple, x, y, phi)
    H, h_elements = vertical_automorphisms(triple, bij.pullback_object)
    homset = bij.codomain
    if not bij.bijective:
        return TorsorReport(homset, H, [], Verdict.VIOLATION, "Φ is not a bijection", h_elements)
    if not bij.domain and homset:
        return TorsorReport(homset, H, [], Verdict.VIOLATION, "hom-set nonempty without a vertical iso",
                            h_elements)
    position = {m: i for i, m in enumerate(homset)}
    inverse = bij.inverse()
    action = [[position[bij.table[X.compose(h, inverse[m])]] for m in homset] for h in h_elements]
    verdict, details = certify_action(H, len(homset), action)
    return TorsorReport(homset, H, action, verdict, details, h_elements)


# Random instances

@dataclass
class _FibreData:
    order: int
    perm: Tuple[int, ...]

    def act(self, a: int, s: int) -> int:
        for _ in range(a % self.order):
            s = self.perm[s]
        return s


def _random_fibres(rng: np.random.Generator, length: int):
    fibres = []
    for _ in range(length):
        r = int(rng.integers(1, config.MAX_FIBRE_GROUP + 1))
        size = int(rng.integers(1, config.MAX_FIBRE_SET + 1))
        for _attempt in range(20):
            perm = tuple(int(v) for v in rng.permutation(size))
            data = _FibreData(r, perm)
            if all(data.act(r, s) == s for s in range(size)):
                break
        else:
            data = _FibreData(r, tuple(range(size)))
        fibres.append(data)
    transitions = []
    for m in range(length - 1):
        A, A2 = fibres[m], fibres[m + 1]
        multipliers = [c for c in range(A2.order) if (c * A.order) % A2.order == 0]
        c = int(rng.choice(multipliers))
        for c_try in (c, 0):
            T = _equivariant_map(rng, A, A2, c_try)
            if T is not None:
                transitions.append((c_try, T))
                break
    return fibres, transitions


def _equivariant_map(rng, A: _FibreData, A2: _FibreData, c: int) -> Optional[Tuple[int, ...]]:
    size = len(A.perm)
    T = [-1] * size
    for s in range(size):
        if T[s] != -1:
            continue
        orbit = [s]
        while A.act(1, orbit[-1]) != s:
            orbit.append(A.act(1, orbit[-1]))
        length = len(orbit)
        targets = [t for t in range(len(A2.perm)) if A2.act(c * length, t) == t]
        if not targets:
            return None
        t = int(rng.choice(targets))
        for k, x in enumerate(orbit):
            T[x] = A2.act(c * k, t)
    return tuple(T)


class _FibredElements:
    """
    A B-indexed family of categories of elements over a chain of group actions

    Level b is the full action when b >= threshold and the orbit set with the
    trivial action below it; restriction from a full level to a lower one sends
    a point to the smallest element of its orbit.
    """

    def __init__(self, k: int, fibres, transitions, threshold: int):
        self.k = k
        self.fibres = fibres
        self.transitions = transitions
        self.threshold = threshold

    @property
    def length(self) -> int:
        return len(self.fibres)

    def full(self, b: int) -> bool:
        return b >= self.threshold

    def orbit_label(self, m: int, s: int) -> int:
        data = self.fibres[m]
        return min(data.act(a, s) for a in range(data.order))

    def level(self, b: int, m: int) -> List[int]:
        points = range(len(self.fibres[m].perm))
        if self.full(b):
            return list(points)
        return sorted({self.orbit_label(m, s) for s in points})

    def act(self, b: int, m: int, a: int, s: int) -> int:
        return self.fibres[m].act(a, s) if self.full(b) else s

    def transport(self, b: int, m: int, m2: int, s: int) -> int:
        for n in range(m, m2):
            s = self.transitions[n][1][s]
        return s if self.full(b) else self.orbit_label(m2, s)

    def push(self, m: int, m2: int, a: int) -> int:
        for n in range(m, m2):
            a = (self.transitions[n][0] * a) % self.fibres[n + 1].order
        return a

    def restrict(self, b: int, b2: int, m: int, s: int) -> int:
        if self.full(b2) and not self.full(b):
            return self.orbit_label(m, s)
        return s

    def objects(self) -> List[Tuple[int, int, int]]:
        return [(b, m, s) for b in range(self.k) for m in range(self.length) for s in self.level(b, m)]

    def records(self) -> List[Tuple[Tuple[int, int, int], Tuple[int, int, int], int]]:
        """Morphisms (b, m, s) -> (b', m', s'): a in the group at m' with a·s moved to m' equal to s' restricted to b"""
        out = []
        for b, m, s in self.objects():
            for b2 in range(b, self.k):
                for m2 in range(m, self.length):
                    moved = self.transport(b, m, m2, s)
                    for s2 in self.level(b2, m2):
                        goal = self.restrict(b, b2, m2, s2)
                        for a in range(self.fibres[m2].order):
                            if self.act(b, m2, a, moved) == goal:
                                out.append(((b, m, s), (b2, m2, s2), a))
        return out

    def triple(self, records, name: str = 'random') -> FOFTriple:
        objects = self.objects()
        obj_index = {o: i for i, o in enumerate(objects)}
        rec_index = {r: i for i, r in enumerate(records)}
        leaving: Dict[Tuple[int, int, int], List[int]] = {o: [] for o in objects}
        for i, (x, _, _) in enumerate(records):
            leaving[x].append(i)
        composition = {}
        for f, (x, y, a) in enumerate(records):
            for g in leaving[y]:
                _, z, a2 = records[g]
                order = self.fibres[z[1]].order
                composition[(g, f)] = rec_index[(x, z, (a2 + self.push(y[1], z[1], a)) % order)]
        identities = tuple(rec_index[(o, o, 0)] for o in objects)
        X = FinCategory('X', len(objects), tuple(obj_index[r[0]] for r in records),
                        tuple(obj_index[r[1]] for r in records), identities, composition)

        base = chain_category(self.k, 'B')
        chain = chain_category(self.length, 'D')
        M = product_category(base, chain, 'M')
        base_idx = {(base.src[f], base.dst[f]): f for f in base.morphisms}
        chain_idx = {(chain.src[f], chain.dst[f]): f for f in chain.morphisms}
        P = FunctorTable(X, M, tuple(b * self.length + m for b, m, _ in objects),
                         tuple(base_idx[(x[0], y[0])] * chain.num_morphisms + chain_idx[(x[1], y[1])]
                               for x, y, _ in records), 'P')
        F = FunctorTable(X, base, tuple(b for b, _, _ in objects),
                         tuple(base_idx[(x[0], y[0])] for x, y, _ in records), 'F')
        G = projection_functor(base, chain, M)
        return make_fof_triple(P, F, G, name)


def random_fof_triple(rng: np.random.Generator, max_morphisms: Optional[int] = None) -> FOFTriple:
    """
    A seeded fibrewise opfibration with groupoidal P-fibres

    B and D are chains and M = B × D. Over each b the fibre of X is the
    category of elements of a chain of cyclic-group actions along D; levels
    below a random threshold see only orbits, so moving down B collapses
    each action onto its orbit set.
    """
    limit = config.MAX_CATEGORY_MORPHISMS if max_morphisms is None else max_morphisms
    for _attempt in range(100):
        k = int(rng.integers(1, config.MAX_CHAIN_LENGTH + 1))
        length = int(rng.integers(1, config.MAX_CHAIN_LENGTH + 1))
        fibres, transitions = _random_fibres(rng, length)
        elements = _FibredElements(k, fibres, transitions, int(rng.integers(0, k + 1)))
        records = elements.records()
        if len(records) <= limit:
            break
    else:
        raise ValidationError("could not generate an instance within the morphism bound")
    triple = elements.triple(records)
    logger.debug(f"Random triple: |X|={triple.X.num_morphisms} morphisms, |M|={triple.M.num_morphisms}, "
                 f"threshold {elements.threshold} of {k}")
    return triple


def all_phi_triples(triple: FOFTriple) -> List[Tuple[int, int, int]]:
    """Every (x, y, φ) with φ: P(x) -> P(y)"""
    X, M, P = triple.X, triple.M, triple.P
    return [(x, y, phi) for x, y in itertools.product(X.objects, repeat=2) for phi in M.hom(P.ob(x), P.ob(y))]
