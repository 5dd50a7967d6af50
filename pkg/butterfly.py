"""
Butterflies between crossed extensions

A butterfly from X (H₂ -> H₁) to X′ (G₂ -> G₁) is a group E with wings
κ: H₂ -> E, ι: G₂ -> E and legs δ: E -> H₁, γ: E -> G₁. Isomorphism classes
of butterflies are the weak maps; weak_hom_set() enumerates them over a
module morphism through a normal form and checks the H²-torsor structure.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import config
from cohomology import cohomology_group, is_coboundary
from errors import BudgetExceeded, ButterflyViolation, InternalError, SourceTargetMismatch, ValidationError
from fincat import TorsorReport, Verdict, certify_action
from fingroup import (FiniteGroup, Homomorphism, direct_product, enumerate_homs, find_section, make_hom,
                      quotient, semidirect_product, validate_group)
from xmod import (CrossedExtension, XExtMorphism, identity_morphism, make_crossed_extension,
                  morphism_class, morphism_from_pair, pi, three_cocycle_of, validate_xmod)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Butterfly:
    source: CrossedExtension
    target: CrossedExtension
    E: FiniteGroup
    kappa: Homomorphism
    iota: Homomorphism
    delta: Homomorphism
    gamma: Homomorphism
    representable: bool = False
    flippable: bool = False
    name: str = ''

    def iota_inverse(self, e: int) -> int:
        return self.iota.images.index(e)

    def to_dict(self) -> Dict:
        return {'name': self.name, 'E': self.E.order, 'representable': self.representable,
                'flippable': self.flippable, 'kappa': list(self.kappa.images), 'iota': list(self.iota.images),
                'delta': list(self.delta.images), 'gamma': list(self.gamma.images)}


def _same_xext(X: CrossedExtension, Y: CrossedExtension) -> bool:
    return (X is Y) or (X.G2 == Y.G2 and X.G1 == Y.G1 and X.boundary.images == Y.boundary.images
                        and X.xmod.act == Y.xmod.act and X.j.images == Y.j.images and X.p.images == Y.p.images)


def validate_butterfly(X: CrossedExtension, X2: CrossedExtension, E: FiniteGroup, kappa: Homomorphism,
                       iota: Homomorphism, delta: Homomorphism, gamma: Homomorphism,
                       name: str = '') -> Butterfly:
    """Check the clauses in order i, ii, wings, iii, iv and compute the flags"""
    for hom, src, dst, label in ((kappa, X.G2, E, 'kappa'), (iota, X2.G2, E, 'iota'),
                                 (delta, E, X.G1, 'delta'), (gamma, E, X2.G1, 'gamma')):
        if hom.source != src or hom.target != dst:
            raise ValidationError(f"{label} has the wrong source or target")
    for h in X.G2.elements:
        if gamma(kappa(h)) != 0:
            raise ButterflyViolation('i', "gamma·kappa ≠ 0", (h,))
    if not iota.is_injective() or not delta.is_surjective() or sorted(iota.images) != delta.kernel():
        raise ButterflyViolation('ii', "(delta, iota) is not short exact")
    for h in X.G2.elements:
        if delta(kappa(h)) != X.boundary(h):
            raise ButterflyViolation('wing', "delta·kappa ≠ ∂", (h,))
    for g in X2.G2.elements:
        if gamma(iota(g)) != X2.boundary(g):
            raise ButterflyViolation('wing', "gamma·iota ≠ ∂′", (g,))
    for e in E.elements:
        for h in X.G2.elements:
            if kappa(X.xmod(delta(e), h)) != E.conj(e, kappa(h)):
                raise ButterflyViolation('iii', "kappa(delta(e)*h) ≠ e·kappa(h)·e⁻¹", (e, h))
    for e in E.elements:
        for g in X2.G2.elements:
            if iota(X2.xmod(gamma(e), g)) != E.conj(e, iota(g)):
                raise ButterflyViolation('iv', "iota(gamma(e)*g) ≠ e·iota(g)·e⁻¹", (e, g))
    representable = find_section(delta) is not None
    flippable = (kappa.is_injective() and gamma.is_surjective() and sorted(kappa.images) == gamma.kernel())
    return Butterfly(X, X2, E, kappa, iota, delta, gamma, representable, flippable, name)


def from_morphism(m: XExtMorphism, name: str = '') -> Butterfly:
    """
    The representable butterfly of (f₁, f₂)

    E = G₂ ⋊ H₁ with H₁ acting through f₁; δ(g, h) = h, γ(g, h) = ∂′(g)·f₁(h),
    ι(g) = (g, e) and κ(x) = (f₂(x)⁻¹, ∂x).
    """
    X, X2 = m.source, m.target
    G2, H1 = X2.G2, X.G1
    n = G2.order
    E = semidirect_product(G2, H1, [X2.xmod.act[m.f1(h)] for h in H1.elements])
    iota = make_hom(G2, E, list(G2.elements), 'iota')
    delta = make_hom(E, H1, [i // n for i in E.elements], 'delta')
    gamma = make_hom(E, X2.G1, [X2.G1.mul(X2.boundary(i % n), m.f1(i // n)) for i in E.elements], 'gamma')
    kappa = make_hom(X.G2, E, [X.boundary(x) * n + G2.inv(m.f2(x)) for x in X.G2.elements], 'kappa')
    return validate_butterfly(X, X2, E, kappa, iota, delta, gamma, name)


def identity_butterfly(X: CrossedExtension) -> Butterfly:
    return from_morphism(identity_morphism(X), f"id_{X.name}")


def flip(b: Butterfly) -> Butterfly:
    """The butterfly read backwards; needs (gamma, kappa) exact"""
    if not b.flippable:
        raise ValidationError("butterfly is not flippable")
    return validate_butterfly(b.target, b.source, b.E, b.iota, b.kappa, b.gamma, b.delta, f"flip({b.name})")


def project(b: Butterfly) -> Tuple[Homomorphism, Homomorphism]:
    """
    (φ₀, φ): φ(b) is the b′ with kappa(j(b))·iota(j′(b′)) = e, and
    φ₀(c) = p′(gamma(e)) for any e with p(delta(e)) = c
    """
    X, X2, E = b.source, b.target, b.E
    iota_index = {v: g for g, v in enumerate(b.iota.images)}
    kernel2 = {g: i for i, g in enumerate(X2.j.images)}
    phi = []
    for a in X.B.elements:
        g = iota_index.get(E.inv(b.kappa(X.j(a))))
        if g is None or g not in kernel2:
            raise InternalError(f"kappa(j({a})) does not come from the kernel of ∂′")
        phi.append(kernel2[g])
    phi0 = [None] * X.C.order
    for e in E.elements:
        c = X.p(b.delta(e))
        value = X2.p(b.gamma(e))
        if phi0[c] is None:
            phi0[c] = value
        elif phi0[c] != value:
            raise InternalError(f"φ₀({c}) depends on the lift")
    return make_hom(X.C, X2.C, phi0, 'φ₀'), make_hom(X.B, X2.B, phi, 'φ')


@dataclass
class Span:
    """X <-left- middle -right-> X′ with the left leg a weak equivalence"""
    left: XExtMorphism
    right: XExtMorphism
    middle: CrossedExtension


def span_of(b: Butterfly) -> Span:
    """Middle crossed module H₂ × G₂ -> E, (h, g) ↦ kappa(h)·iota(g), with E acting through delta and gamma"""
    X, X2, E = b.source, b.target, b.E
    H2, G2 = X.G2, X2.G2
    n = G2.order
    M2 = direct_product(H2, G2)
    boundary = make_hom(M2, E, [E.mul(b.kappa(i // n), b.iota(i % n)) for i in M2.elements], 'kappa#iota')
    act = [[X.xmod(b.delta(e), i // n) * n + X2.xmod(b.gamma(e), i % n) for i in M2.elements]
           for e in E.elements]
    middle = make_crossed_extension(validate_xmod(boundary, act, f"span({b.name})"), f"span({b.name})")
    p1 = make_hom(M2, H2, [i // n for i in M2.elements], 'p1')
    p2 = make_hom(M2, G2, [i % n for i in M2.elements], 'p2')
    left = morphism_from_pair(middle, X, b.delta, p1)
    right = morphism_from_pair(middle, X2, b.gamma, p2)
    if not morphism_class(left).weak_equivalence:
        raise InternalError("left leg of a span is not a weak equivalence")
    return Span(left, right, middle)


def compose(b2: Butterfly, b1: Butterfly, name: str = '') -> Butterfly:
    """b2 ∘ b1 = (E₁ ×_{G₁} E₂) / {(iota₁(g), kappa₂(g))} with wings [kappa₁, 1], [1, iota₂]"""
    if not _same_xext(b1.target, b2.source):
        raise SourceTargetMismatch("target of the first butterfly is not the source of the second")
    E1, E2 = b1.E, b2.E
    pairs = [(a, c) for a in E1.elements for c in E2.elements if b1.gamma(a) == b2.delta(c)]
    index = {pr: i for i, pr in enumerate(pairs)}
    table = [[index[(E1.mul(a[0], b[0]), E2.mul(a[1], b[1]))] for b in pairs] for a in pairs]
    P = validate_group(table, f"{E1.name}x{E2.name}")
    N = [index[(b1.iota(g), b2.kappa(g))] for g in b1.target.G2.elements]
    E, proj = quotient(P, N, name or 'E')
    kappa = make_hom(b1.source.G2, E, [proj(index[(b1.kappa(h), 0)]) for h in b1.source.G2.elements], 'kappa')
    iota = make_hom(b2.target.G2, E, [proj(index[(0, b2.iota(g))]) for g in b2.target.G2.elements], 'iota')
    delta_images = [0] * E.order
    gamma_images = [0] * E.order
    for i, (a, c) in enumerate(pairs):
        delta_images[proj(i)] = b1.delta(a)
        gamma_images[proj(i)] = b2.gamma(c)
    delta = make_hom(E, b1.source.G1, delta_images, 'delta')
    gamma = make_hom(E, b2.target.G1, gamma_images, 'gamma')
    return validate_butterfly(b1.source, b2.target, E, kappa, iota, delta, gamma, name or f"{b2.name}∘{b1.name}")


def find_two_cell(b1: Butterfly, b2: Butterfly, budget: Optional[int] = None) -> Optional[Homomorphism]:
    """alpha: E₁ -> E₂ commuting with both wings and both legs"""
    if not (_same_xext(b1.source, b2.source) and _same_xext(b1.target, b2.target)):
        raise SourceTargetMismatch("butterflies do not share source and target")
    allowed = [{e2 for e2 in b2.E.elements if b2.delta(e2) == b1.delta(e) and b2.gamma(e2) == b1.gamma(e)}
               for e in b1.E.elements]
    for h in b1.source.G2.elements:
        allowed[b1.kappa(h)] &= {b2.kappa(h)}
    for g in b1.target.G2.elements:
        allowed[b1.iota(g)] &= {b2.iota(g)}
    if any(not a for a in allowed):
        return None
    cells = enumerate_homs(b1.E, b2.E, budget=budget, allowed=allowed)
    if not cells:
        return None
    if not cells[0].is_isomorphism():
        raise InternalError("two-cell is not an isomorphism")
    return cells[0]


# Normal form

def _sigma0(X: CrossedExtension, X2: CrossedExtension, phi0: Homomorphism) -> Tuple[int, ...]:
    """Smallest element of G₁ over φ₀(p(h)), for each h in H₁"""
    return tuple(min(X2.p.preimages(phi0(X.p(h)))) for h in X.G1.elements)


def _normal_data(b: Butterfly, sigma0: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(f, tau) of b for the section s(h) = smallest e over h with gamma(e) = σ₀(h)"""
    X, E = b.source, b.E
    H1 = X.G1
    s = []
    for h in H1.elements:
        s.append(min(e for e in E.elements if b.delta(e) == h and b.gamma(e) == sigma0[h]))
    f = tuple(b.iota_inverse(E.product(s[h], s[k], E.inv(s[H1.mul(h, k)])))
              for h in H1.elements for k in H1.elements)
    tau = tuple(b.iota_inverse(E.mul(b.kappa(x), E.inv(s[X.boundary(x)]))) for x in X.G2.elements)
    return f, tau


def _gauges(X: CrossedExtension, X2: CrossedExtension, budget: Optional[int]):
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    size = X2.B.order ** (X.G1.order - 1)
    if size > budget:
        raise BudgetExceeded("butterfly gauge transformations", size, budget)
    for rest in itertools.product(X2.B.elements, repeat=X.G1.order - 1):
        yield (0,) + rest


def _minimal_form(X: CrossedExtension, X2: CrossedExtension, phi0: Homomorphism, f: Sequence[int],
                  tau: Sequence[int], budget: Optional[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Smallest (f·j′(d¹u), tau·j′(-u∘∂)) over gauges u: H₁ -> B′"""
    H1, G2, B2 = X.G1, X2.G2, X2.B
    module = pi(X2)
    best = None
    for u in _gauges(X, X2, budget):
        du = [B2.product(module(phi0(X.p(h)), u[k]), B2.inv(u[H1.mul(h, k)]), u[h])
              for h in H1.elements for k in H1.elements]
        f2 = tuple(G2.mul(v, X2.j(d)) for v, d in zip(f, du))
        tau2 = tuple(G2.mul(t, X2.j(B2.inv(u[X.boundary(x)]))) for x, t in zip(X.G2.elements, tau))
        if best is None or (f2, tau2) < best:
            best = (f2, tau2)
    return best


def canonical_key(b: Butterfly, budget: Optional[int] = None) -> Tuple:
    """Invariant of the two-cell class: projection plus the minimal normal data"""
    phi0, phi = project(b)
    sigma0 = _sigma0(b.source, b.target, phi0)
    f, tau = _normal_data(b, sigma0)
    f_min, tau_min = _minimal_form(b.source, b.target, phi0, f, tau, budget)
    return (phi0.images, phi.images, f_min, tau_min)


@dataclass
class WeakMap:
    """A two-cell class of butterflies with its canonical representative"""
    representative: Butterfly
    key: Tuple

    @property
    def invertible(self) -> bool:
        return self.representative.flippable

    def to_dict(self) -> Dict:
        return {'phi0': list(self.key[0]), 'phi': list(self.key[1]), 'f': list(self.key[2]),
                'tau': list(self.key[3]), 'invertible': self.invertible}


def weak_map_of(b: Butterfly, budget: Optional[int] = None) -> WeakMap:
    return WeakMap(b, canonical_key(b, budget))


def _carrier_group(X: CrossedExtension, X2: CrossedExtension, sigma0: Sequence[int], f: Sequence[int],
                  name: str = '') -> FiniteGroup:
    """G₂ × H₁ at index h·|G₂| + g with (g, h)(g′, h′) = (g·(σ₀(h)*g′)·f(h, h′), hh′)"""
    H1, G2 = X.G1, X2.G2
    n, m = G2.order, H1.order
    size = n * m
    table = [[0] * size for _ in range(size)]
    for a in range(size):
        g, h = a % n, a // n
        for b in range(size):
            g2, h2 = b % n, b // n
            table[a][b] = H1.mul(h, h2) * n + G2.product(g, X2.xmod(sigma0[h], g2), f[h * m + h2])
    return validate_group(table, name or 'E')


def _butterfly_from_data(X: CrossedExtension, X2: CrossedExtension, sigma0: Sequence[int],
                         f: Sequence[int], tau: Sequence[int], name: str = '') -> Butterfly:
    """E on G₂ × H₁ at index h·|G₂| + g with (g, h)(g′, h′) = (g·(σ₀(h)*g′)·f(h, h′), hh′)"""
    H1, G2, G1 = X.G1, X2.G2, X2.G1
    n = G2.order
    E = _carrier_group(X, X2, sigma0, f, name)
    iota = make_hom(G2, E, list(G2.elements), 'iota')
    delta = make_hom(E, H1, [i // n for i in E.elements], 'delta')
    gamma = make_hom(E, G1, [G1.mul(X2.boundary(i % n), sigma0[i // n]) for i in E.elements], 'gamma')
    kappa = make_hom(X.G2, E, [X.boundary(x) * n + t for x, t in zip(X.G2.elements, tau)], 'kappa')
    return validate_butterfly(X, X2, E, kappa, iota, delta, gamma, name)


def _factor_systems(X: CrossedExtension, X2: CrossedExtension, sigma0: Sequence[int],
                    budget: Optional[int]) -> List[Tuple[int, ...]]:
    """Normalized f: H₁ × H₁ -> G₂ lifting σ₀(h)σ₀(k)σ₀(hk)⁻¹ and satisfying the cocycle identity"""
    H1, G1, G2 = X.G1, X2.G1, X2.G2
    m = H1.order
    preimages: Dict[int, List[int]] = {}
    for g in G2.elements:
        preimages.setdefault(X2.boundary(g), []).append(g)
    free = [(h, k) for h in H1.elements for k in H1.elements if h and k]
    choices = []
    for h, k in free:
        target = G1.product(sigma0[h], sigma0[k], G1.inv(sigma0[H1.mul(h, k)]))
        choices.append(preimages.get(target, []))
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    size = math.prod(len(c) for c in choices)
    if size > budget:
        raise BudgetExceeded("butterfly factor systems", size, budget)

    # identities with an identity argument hold for normalized f; the rest are
    # checked once their last free entry is assigned
    slot = {pair: i for i, pair in enumerate(free)}
    checks_at: List[List[Tuple[int, int, int]]] = [[] for _ in free]
    nonzero = [h for h in H1.elements if h]
    for x, y, z in itertools.product(nonzero, repeat=3):
        entries = ((y, z), (x, H1.mul(y, z)), (x, y), (H1.mul(x, y), z))
        checks_at[max(slot[e] for e in entries if e in slot)].append((x, y, z))

    f = [0] * (m * m)
    found = []

    def holds(x: int, y: int, z: int) -> bool:
        return (G2.mul(X2.xmod(sigma0[x], f[y * m + z]), f[x * m + H1.mul(y, z)])
                == G2.mul(f[x * m + y], f[H1.mul(x, y) * m + z]))

    def extend(i: int):
        if i == len(free):
            found.append(tuple(f))
            return
        h, k = free[i]
        for v in choices[i]:
            f[h * m + k] = v
            if all(holds(*t) for t in checks_at[i]):
                extend(i + 1)
        f[h * m + k] = 0

    extend(0)
    logger.debug(f"{len(found)} factor systems out of {size} candidates")
    return found


@dataclass
class WeakHomReport:
    classes: List[WeakMap]
    torsor: TorsorReport
    h2_order: int
    cocycle_criterion: bool
    verdict: Verdict
    details: str = ''

    def to_dict(self) -> Dict:
        return {'classes': len(self.classes), 'h2_order': self.h2_order,
                'cocycle_criterion': self.cocycle_criterion, 'verdict': self.verdict.value,
                'details': self.details, 'keys': [c.to_dict() for c in self.classes]}


def weak_hom_set(X: CrossedExtension, X2: CrossedExtension, phi0: Homomorphism, phi: Homomorphism,
                 budget: Optional[int] = None) -> WeakHomReport:
    """
    Two-cell classes of butterflies X -> X′ projecting to (φ₀, φ)

    Every such butterfly is isomorphic to one on G₂ × H₁ built from a factor
    system f and wing data tau; classes are the gauge orbits. The count is
    compared with |H²(C, B′, φ₀*ξ′)| and with the 3-cocycle criterion, and
    H² acts on the classes by twisting f with central cocycles.
    """
    xi, xi2 = pi(X), pi(X2)
    for c in X.C.elements:
        for a in X.B.elements:
            if phi(xi(c, a)) != xi2(phi0(c), phi(a)):
                raise ValidationError(f"(φ₀, φ) is not a module morphism at {(c, a)}", (c, a))
    sigma0 = _sigma0(X, X2, phi0)
    n = X2.G2.order
    target_on_kernel = {X.j(a): X2.G2.inv(X2.j(phi(a))) for a in X.B.elements}

    classes: Dict[Tuple, WeakMap] = {}
    for f in _factor_systems(X, X2, sigma0, budget):
        E = _carrier_group(X, X2, sigma0, f)
        allowed = []
        for x in X.G2.elements:
            if x in target_on_kernel:
                allowed.append([target_on_kernel[x]])
            else:
                allowed.append([X.boundary(x) * n + g for g in X2.G2.elements
                                if X2.G1.mul(X2.boundary(g), sigma0[X.boundary(x)]) == 0])
        for kappa in enumerate_homs(X.G2, E, budget=budget, allowed=allowed):
            tau = tuple(i % n for i in kappa.images)
            try:
                b = _butterfly_from_data(X, X2, sigma0, f, tau)
            except ButterflyViolation:
                continue
            key = (phi0.images, phi.images) + _minimal_form(X, X2, phi0, f, tau, budget)
            if key not in classes:
                classes[key] = WeakMap(b, key)
    ordered = [classes[k] for k in sorted(classes)]

    target_action = xi2.pull_back(phi0)
    H2 = cohomology_group(2, target_action)
    difference = three_cocycle_of(X).push_forward(phi, target_action) - three_cocycle_of(X2).pull_back(phi0)
    criterion = is_coboundary(difference) is not None

    position = {c.key: i for i, c in enumerate(ordered)}
    m = X.G1.order
    table: List[List[int]] = []
    details = ''
    for z in H2.elements():
        row = []
        for c in ordered:
            f, tau = c.key[2], c.key[3]
            twisted = tuple(X2.G2.mul(f[h * m + k], X2.j(z(X.p(h), X.p(k))))
                            for h in X.G1.elements for k in X.G1.elements)
            key = (phi0.images, phi.images) + _minimal_form(X, X2, phi0, twisted, tau, budget)
            if key not in position:
                details = "twisting by a 2-cocycle leaves the hom-set"
                break
            row.append(position[key])
        table.append(row)
    if details:
        verdict = Verdict.VIOLATION
    else:
        verdict, details = certify_action(H2.as_group(), len(ordered), table)
    if bool(ordered) != criterion:
        verdict = Verdict.VIOLATION
        details = f"{len(ordered)} classes but coboundary criterion {criterion}"
    elif ordered and len(ordered) != H2.order:
        verdict = Verdict.VIOLATION
        details = f"{len(ordered)} classes for |H2| = {H2.order}"
    torsor = TorsorReport([c.key for c in ordered], H2.as_group(), table, verdict, details)
    level = logging.INFO if verdict != Verdict.VIOLATION else logging.WARNING
    logger.log(level, f"Weak maps {X.name or '?'} -> {X2.name or '?'}: {len(ordered)} classes, "
                      f"|H2|={H2.order}, verdict={verdict.value}")
    return WeakHomReport(ordered, torsor, H2.order, criterion, verdict, details)


def is_invertible_class(b: Butterfly, budget: Optional[int] = None) -> bool:
    """
    Whether some weak map c: X′ -> X has c∘b ≅ id_X and b∘c ≅ id_X′

    An inverse projects to the inverse of project(b), so the candidates are
    the classes of weak_hom_set over (φ₀⁻¹, φ⁻¹). Does not look at the flip.
    """
    phi0, phi = project(b)
    if not (phi0.is_isomorphism() and phi.is_isomorphism()):
        return False
    X, X2 = b.source, b.target
    id_X, id_X2 = identity_butterfly(X), identity_butterfly(X2)
    candidates = weak_hom_set(X2, X, phi0.inverse(), phi.inverse(), budget)
    for weak_map in candidates.classes:
        c = weak_map.representative
        if (find_two_cell(compose(c, b), id_X, budget) is not None
                and find_two_cell(compose(b, c), id_X2, budget) is not None):
            return True
    return False

