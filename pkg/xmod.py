"""
Crossed modules and crossed extensions

A crossed extension B -j-> G₂ -∂-> G₁ -p-> C carries an action of G₁ on G₂
compatible with ∂. Its module Π(X) is C acting on B; three_cocycle_of()
reads off the class in H³(C, B) and transport_xext() moves an extension along
a module morphism.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from cohomology import Cochain, differential
from errors import (InternalError, NotAutomorphism, NotEquivariant, NotExact, NotFunctorial,
                    PeifferViolation, PrecrossedViolation, ValidationError)
from fingroup import (AbelianAction, FiniteGroup, Homomorphism, direct_product, enumerate_homs,
                      identity_hom, make_hom, quotient, structure_of, subgroup, validate_group)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CrossedModule:
    """∂: G₂ -> G₁ with act[g₁][g₂] = g₁*g₂"""
    boundary: Homomorphism
    act: Tuple[Tuple[int, ...], ...]
    name: str = ''

    @property
    def G1(self) -> FiniteGroup:
        return self.boundary.target

    @property
    def G2(self) -> FiniteGroup:
        return self.boundary.source

    def __call__(self, g1: int, g2: int) -> int:
        return self.act[g1][g2]


def validate_xmod(boundary: Homomorphism, act: Sequence[Sequence[int]], name: str = '') -> CrossedModule:
    G1, G2 = boundary.target, boundary.source
    rows = tuple(tuple(int(v) for v in row) for row in act)
    if len(rows) != G1.order or any(len(r) != G2.order for r in rows):
        raise ValidationError("action table has the wrong shape")
    for g1, row in enumerate(rows):
        if sorted(row) != list(G2.elements):
            raise NotAutomorphism(f"{g1}*- is not a bijection", (g1,))
        for a in G2.elements:
            for b in G2.elements:
                if row[G2.mul(a, b)] != G2.mul(row[a], row[b]):
                    raise NotAutomorphism(f"{g1}*- is not a homomorphism", (g1, a, b))
    if rows[0] != tuple(G2.elements):
        raise NotFunctorial("identity does not act trivially", (0,))
    for a in G1.elements:
        for b in G1.elements:
            ab = G1.mul(a, b)
            if any(rows[ab][g] != rows[a][rows[b][g]] for g in G2.elements):
                raise NotFunctorial(f"({a}·{b})* ≠ {a}*∘{b}*", (a, b))
    for g1 in G1.elements:
        for g2 in G2.elements:
            if boundary(rows[g1][g2]) != G1.conj(g1, boundary(g2)):
                raise PrecrossedViolation(f"∂({g1}*{g2}) ≠ {g1}·∂({g2})·{g1}⁻¹", (g1, g2))
    for g2 in G2.elements:
        for h in G2.elements:
            if rows[boundary(g2)][h] != G2.conj(g2, h):
                raise PeifferViolation(f"∂({g2})*{h} ≠ {g2}·{h}·{g2}⁻¹", (g2, h))
    for z in boundary.kernel():
        if any(G2.mul(z, g) != G2.mul(g, z) for g in G2.elements):
            raise ValidationError(f"kernel element {z} is not central", (z,))
    return CrossedModule(boundary, rows, name)


def conjugation_crossed_module(G: FiniteGroup, N: Sequence[int], name: str = '') -> CrossedModule:
    """Inclusion of a normal subgroup with G acting by conjugation"""
    S, inclusion = subgroup(G, N, f"N({G.name})")
    position = {x: i for i, x in enumerate(inclusion.images)}
    act = []
    for g in G.elements:
        row = []
        for n in inclusion.images:
            c = G.conj(g, n)
            if c not in position:
                raise ValidationError(f"subgroup is not normal at {g}", (g, n))
            row.append(position[c])
        act.append(row)
    return validate_xmod(inclusion, act, name)


@dataclass(frozen=True, eq=False)
class CrossedExtension:
    """B -j-> G₂ -∂-> G₁ -p-> C, exact, with ∂ a crossed module"""
    xmod: CrossedModule
    j: Homomorphism
    p: Homomorphism
    name: str = ''

    @property
    def B(self) -> FiniteGroup:
        return self.j.source

    @property
    def C(self) -> FiniteGroup:
        return self.p.target

    @property
    def G1(self) -> FiniteGroup:
        return self.xmod.G1

    @property
    def G2(self) -> FiniteGroup:
        return self.xmod.G2

    @property
    def boundary(self) -> Homomorphism:
        return self.xmod.boundary

    def j_inverse(self, g2: int) -> int:
        return self.j.images.index(g2)

    def section(self, mode: str = 'min') -> Tuple[int, ...]:
        pick = min if mode == 'min' else max
        return tuple(0 if c == 0 else pick(self.p.preimages(c)) for c in self.C.elements)

    def __repr__(self):
        return (f"CrossedExtension({self.name or '?'}: {self.B.name} -> {self.G2.name} -> "
                f"{self.G1.name} -> {self.C.name})")

    def to_dict(self) -> Dict:
        return {'name': self.name, 'B': self.B.order, 'G2': self.G2.order, 'G1': self.G1.order,
                'C': self.C.order}


def validate_crossed_extension(xmod: CrossedModule, j: Homomorphism, p: Homomorphism,
                               name: str = '') -> CrossedExtension:
    if not j.is_injective():
        raise NotExact("j is not injective")
    if sorted(j.images) != xmod.boundary.kernel():
        raise NotExact("image(j) ≠ kernel(∂)")
    if not p.is_surjective():
        raise NotExact("p is not surjective")
    if p.kernel() != xmod.boundary.image():
        raise NotExact("kernel(p) ≠ image(∂)")
    if not j.source.is_abelian():
        raise NotExact("kernel of ∂ is not abelian")
    return CrossedExtension(xmod, j, p, name)


def make_crossed_extension(xmod: CrossedModule, name: str = '') -> CrossedExtension:
    """Complete a crossed module with its canonical kernel and cokernel"""
    B, j = subgroup(xmod.G2, xmod.boundary.kernel(), 'ker')
    C, p = quotient(xmod.G1, xmod.boundary.image(), 'coker')
    return validate_crossed_extension(xmod, j, p, name)


def zero_crossed_extension(action: AbelianAction, name: str = '') -> CrossedExtension:
    """B = B -0-> C = C with C acting on B through the module"""
    B, C = action.module, action.actor
    xmod = validate_xmod(Homomorphism(B, C, (0,) * B.order), action.act, name)
    return validate_crossed_extension(xmod, identity_hom(B), identity_hom(C), name or 'zero')


def automorphism_crossed_extension(K: FiniteGroup, budget: Optional[int] = None,
                                   name: str = '') -> CrossedExtension:
    """Z(K) -> K -conj-> Aut(K) -> Out(K) with Aut(K) acting by evaluation"""
    report = structure_of(K, budget)
    xmod = validate_xmod(report.conj, report.evaluation, name or f"Aut({K.name})")
    centre, j = subgroup(K, report.center, f"Z({K.name})")
    return validate_crossed_extension(xmod, j, report.projection, name or f"Aut({K.name})")


def pi(X: CrossedExtension) -> AbelianAction:
    """The C-module B with x*a = j⁻¹(g₁*j(a)) for any g₁ over x"""
    rows = []
    for c in X.C.elements:
        preimages = X.p.preimages(c)
        row = tuple(X.j_inverse(X.xmod(preimages[0], X.j(a))) for a in X.B.elements)
        for g1 in preimages[1:]:
            if tuple(X.j_inverse(X.xmod(g1, X.j(a))) for a in X.B.elements) != row:
                raise InternalError(f"induced action depends on the lift of {c}")
        rows.append(row)
    return AbelianAction(X.C, X.B, tuple(rows), f"Π({X.name})" if X.name else '')


@dataclass(frozen=True, eq=False)
class XExtMorphism:
    source: CrossedExtension
    target: CrossedExtension
    gamma: Homomorphism
    f1: Homomorphism
    f2: Homomorphism
    beta: Homomorphism

    def to_dict(self) -> Dict:
        return {'gamma': list(self.gamma.images), 'f1': list(self.f1.images),
                'f2': list(self.f2.images), 'beta': list(self.beta.images)}


def make_xext_morphism(X: CrossedExtension, X2: CrossedExtension, gamma: Homomorphism, f1: Homomorphism,
                       f2: Homomorphism, beta: Homomorphism) -> XExtMorphism:
    """Validated morphism: the four squares commute and (f₁, f₂) is equivariant"""
    for g in X.G2.elements:
        if X2.boundary(f2(g)) != f1(X.boundary(g)):
            raise ValidationError("∂′∘f₂ ≠ f₁∘∂", (g,))
    for g1 in X.G1.elements:
        if X2.p(f1(g1)) != gamma(X.p(g1)):
            raise ValidationError("p′∘f₁ ≠ γ∘p", (g1,))
        for g2 in X.G2.elements:
            if f2(X.xmod(g1, g2)) != X2.xmod(f1(g1), f2(g2)):
                raise NotEquivariant(f"f₂({g1}*{g2}) ≠ f₁({g1})*f₂({g2})", (g1, g2))
    for b in X.B.elements:
        if f2(X.j(b)) != X2.j(beta(b)):
            raise ValidationError("f₂∘j ≠ j′∘β", (b,))
    return XExtMorphism(X, X2, gamma, f1, f2, beta)


def morphism_from_pair(X: CrossedExtension, X2: CrossedExtension, f1: Homomorphism,
                       f2: Homomorphism) -> XExtMorphism:
    """The morphism with γ and β induced by (f₁, f₂)"""
    kernel2 = set(X2.j.images)
    beta_images = []
    for b in X.B.elements:
        g = f2(X.j(b))
        if g not in kernel2:
            raise ValidationError("f₂ does not carry the kernel into the kernel", (b,))
        beta_images.append(X2.j_inverse(g))
    s = X.section()
    gamma_images = [X2.p(f1(s[c])) for c in X.C.elements]
    gamma = make_hom(X.C, X2.C, gamma_images, 'γ')
    beta = make_hom(X.B, X2.B, beta_images, 'β')
    return make_xext_morphism(X, X2, gamma, f1, f2, beta)


def identity_morphism(X: CrossedExtension) -> XExtMorphism:
    return XExtMorphism(X, X, identity_hom(X.C), identity_hom(X.G1), identity_hom(X.G2), identity_hom(X.B))


def compose_morphisms(m2: XExtMorphism, m1: XExtMorphism) -> XExtMorphism:
    """m2 ∘ m1"""
    if m1.target is not m2.source:
        raise ValidationError("morphisms are not composable")
    return XExtMorphism(m1.source, m2.target, m2.gamma.compose(m1.gamma), m2.f1.compose(m1.f1),
                        m2.f2.compose(m1.f2), m2.beta.compose(m1.beta))


@dataclass
class MorphismClass:
    weak_equivalence: bool
    final: bool
    discrete_fibration: bool

    def to_dict(self) -> Dict:
        return {'weak_equivalence': self.weak_equivalence, 'final': self.final,
                'discrete_fibration': self.discrete_fibration}


def morphism_class(m: XExtMorphism) -> MorphismClass:
    """Flags from π₀ = γ, π₁ = β and f₂"""
    pi0_iso = m.gamma.is_isomorphism()
    return MorphismClass(
        weak_equivalence=pi0_iso and m.beta.is_isomorphism(),
        final=pi0_iso and m.beta.is_surjective(),
        discrete_fibration=m.f2.is_isomorphism(),
    )


def is_internal_equivalence(m: XExtMorphism, budget: Optional[int] = None) -> bool:
    """
    A weak equivalence admitting a strict morphism back that inverts it on Π

    Crossed-module 2-cells are not modelled, so the inverse is only asked to
    undo m on the module level.
    """
    if not morphism_class(m).weak_equivalence:
        return False
    X, X2 = m.source, m.target
    gamma_inv, beta_inv = m.gamma.inverse(), m.beta.inverse()
    candidates_f2 = enumerate_homs(X2.G2, X.G2, budget=budget)
    for f1 in enumerate_homs(X2.G1, X.G1, budget=budget):
        for f2 in candidates_f2:
            try:
                back = morphism_from_pair(X2, X, f1, f2)
            except ValidationError:
                continue
            if back.gamma == gamma_inv and back.beta == beta_inv:
                return True
    return False


def three_cocycle_of(X: CrossedExtension, section: str = 'min') -> Cochain:
    """
    The 3-cocycle of a crossed extension

    With a section s of p and m(x, y) ∈ G₂ lifting s(x)s(y)s(xy)⁻¹ along ∂,
    ω(x, y, z) = j⁻¹(m(x,y)·m(xy,z)·(s(x)*m(y,z)·m(x,yz))⁻¹).
    """
    C, G1, G2 = X.C, X.G1, X.G2
    s = X.section(section)
    pick = min if section == 'min' else max

    preimages: Dict[int, list] = {}
    for g in G2.elements:
        preimages.setdefault(X.boundary(g), []).append(g)

    def lift(target: int) -> int:
        if target == 0:
            return 0
        if target not in preimages:
            raise InternalError(f"{target} is not in the image of ∂")
        return pick(preimages[target])

    m = {(x, y): lift(G1.product(s[x], s[y], G1.inv(s[C.mul(x, y)])))
         for x in C.elements for y in C.elements}
    kernel = set(X.j.images)
    values = []
    for x, y, z in itertools.product(C.elements, repeat=3):
        right = G2.mul(X.xmod(s[x], m[(y, z)]), m[(x, C.mul(y, z))])
        value = G2.product(m[(x, y)], m[(C.mul(x, y), z)], G2.inv(right))
        if value not in kernel:
            raise InternalError(f"ω{(x, y, z)} escapes the kernel of ∂")
        values.append(X.j_inverse(value))
    omega = Cochain(3, pi(X), tuple(values))
    if any(v != 0 and 0 in xs for xs, v in omega.items()):
        raise InternalError("3-cocycle is not normalized")
    if not differential(omega).is_zero():
        raise InternalError("d³ω ≠ 0")
    return omega


def transport_xext(X: CrossedExtension, X2: CrossedExtension, phi0: Homomorphism,
                   phi: Homomorphism) -> Tuple[CrossedExtension, CrossedExtension]:
    """
    (push-forward along φ, pull-back along φ₀), both over (C, B′, φ₀*ξ′)

    Pull-back: G₁′ ×_{C′} C with G₂′ unchanged and ∂ = ⟨∂′, 0⟩.
    Push-forward: (B′ × G₂)/{(φ(b), j(b)⁻¹)} over the unchanged G₁ and C.
    """
    xi, xi2 = pi(X), pi(X2)
    for x in X.C.elements:
        for b in X.B.elements:
            if phi(xi(x, b)) != xi2(phi0(x), phi(b)):
                raise NotEquivariant(f"φ({x}·{b}) ≠ φ₀({x})·φ({b})", (x, b))

    # pull-back
    pairs = [(g, c) for g in X2.G1.elements for c in X.C.elements if X2.p(g) == phi0(c)]
    index = {pr: i for i, pr in enumerate(pairs)}
    table = [[index[(X2.G1.mul(a[0], b[0]), X.C.mul(a[1], b[1]))] for b in pairs] for a in pairs]
    P = validate_group(table, f"{X2.G1.name}x_C'{X.C.name}")
    boundary = make_hom(X2.G2, P, [index[(X2.boundary(g), 0)] for g in X2.G2.elements], '∂')
    act = [X2.xmod.act[g] for g, _ in pairs]
    pull_xmod = validate_xmod(boundary, act, 'pullback')
    pullback = validate_crossed_extension(pull_xmod, X2.j, make_hom(P, X.C, [c for _, c in pairs], 'p'),
                                          'pullback')

    # push-forward
    B2, G2 = X2.B, X.G2
    n = G2.order
    product = direct_product(B2, G2)
    relations = [phi(b) * n + G2.inv(X.j(b)) for b in X.B.elements]
    Q, proj = quotient(product, relations, f"{B2.name}x^B{G2.name}")
    reps = [min(proj.preimages(q)) for q in Q.elements]
    module = xi2.pull_back(phi0)
    push_boundary = make_hom(Q, X.G1, [X.boundary(r % n) for r in reps], '∂')
    push_act = [[proj(module(X.p(g1), r // n) * n + X.xmod(g1, r % n)) for r in reps]
                for g1 in X.G1.elements]
    push_xmod = validate_xmod(push_boundary, push_act, 'pushforward')
    j_push = make_hom(B2, Q, [proj(b * n) for b in B2.elements], 'j')
    pushforward = validate_crossed_extension(push_xmod, j_push, X.p, 'pushforward')
    logger.debug(f"Transported crossed extension: |pushforward G2|={Q.order} |pullback G1|={P.order}")
    return pushforward, pullback
