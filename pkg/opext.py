"""
Extensions of groups with abelian kernel

An extension B -k-> E -f-> C is stored by its two homomorphisms. Cocycles are
read off through a section of f, transport along a module morphism
(φ₀, φ₁) produces the pull-back and push-forward extensions, and classify()
checks the hom-set over (φ₀, φ₁) against Z¹ and the cocycle criterion.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from cohomology import (Cochain, CohomologyGroup, cocycle_group, cohomology_group, differential,
                        is_coboundary, zero_cochain)
from errors import ModuleMismatch, NotACocycle, NotAbelian, NotEquivariant, NotExact, NotNormalized, ValidationError
from fincat import (FinCategory, FOFTriple, FunctorTable, Verdict, certify_action, make_fof_triple)
from fingroup import (AbelianAction, FiniteGroup, Homomorphism, enumerate_homs, make_hom, quotient,
                      semidirect_product, validate_group)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Extension:
    """B -k-> E -f-> C with B abelian and image(k) = kernel(f)"""
    k: Homomorphism
    f: Homomorphism
    name: str = ''

    @property
    def B(self) -> FiniteGroup:
        return self.k.source

    @property
    def E(self) -> FiniteGroup:
        return self.k.target

    @property
    def C(self) -> FiniteGroup:
        return self.f.target

    def k_inverse(self, e: int) -> int:
        return self.k.images.index(e)

    def section(self, mode: str = 'min') -> Tuple[int, ...]:
        """s(x) is the smallest (or largest) preimage of x, with s(e) = e"""
        pick = min if mode == 'min' else max
        return tuple(0 if x == 0 else pick(self.f.preimages(x)) for x in self.C.elements)

    def action(self) -> AbelianAction:
        """x·b = k⁻¹(s(x)·k(b)·s(x)⁻¹)"""
        E, s = self.E, self.section()
        act = tuple(tuple(self.k_inverse(E.conj(s[x], self.k(b))) for b in self.B.elements)
                    for x in self.C.elements)
        return AbelianAction(self.C, self.B, act, f"ξ({self.name})" if self.name else '')

    def __repr__(self):
        return f"Extension({self.name or '?'}: {self.B.name} -> {self.E.name} -> {self.C.name})"

    def to_dict(self) -> Dict:
        return {'name': self.name, 'B': self.B.order, 'E': self.E.order, 'C': self.C.order,
                'k': list(self.k.images), 'f': list(self.f.images)}


def make_extension(k: Homomorphism, f: Homomorphism, name: str = '') -> Extension:
    if k.target != f.source:
        raise NotExact("k and f do not meet in the same group")
    if not k.source.is_abelian():
        raise NotAbelian("kernel group is not abelian")
    if not k.is_injective():
        raise NotExact("k is not injective", tuple(k.kernel()[1:2]))
    if not f.is_surjective():
        raise NotExact("f is not surjective")
    if sorted(k.images) != f.kernel():
        missing = sorted(set(f.kernel()) ^ set(k.images))
        raise NotExact("image(k) ≠ kernel(f)", (missing[0],))
    return Extension(k, f, name)


def cocycle_of_ext(ext: Extension, section: str = 'min') -> Tuple[AbelianAction, Cochain]:
    """ε(x, y) = k⁻¹(s(x)·s(y)·s(xy)⁻¹) for the chosen section"""
    E, C = ext.E, ext.C
    s = ext.section(section)
    action = ext.action()
    values = tuple(ext.k_inverse(E.product(s[x], s[y], E.inv(s[C.mul(x, y)])))
                   for x in C.elements for y in C.elements)
    return action, Cochain(2, action, values)


def ext_of_cocycle(action: AbelianAction, eps: Cochain, name: str = '') -> Extension:
    """
    Carrier B × C at index x·|B| + b with (b, x)(b', y) = (b + x·b' + ε(x, y), xy)

    The canonical section of the result is x ↦ (0, x), so cocycle_of_ext
    returns eps unchanged.
    """
    if eps.degree != 2 or eps.action != action:
        raise ModuleMismatch("cocycle is not a 2-cochain over this module")
    if any(v != 0 and 0 in xs for xs, v in eps.items()):
        raise NotNormalized("cocycle is not normalized", next(xs for xs, v in eps.items() if 0 in xs))
    d = differential(eps)
    if not d.is_zero():
        raise NotACocycle("d²ε ≠ 0", d.items()[0][0])
    B, C = action.module, action.actor
    m = B.order
    size = m * C.order
    table = [[0] * size for _ in range(size)]
    for i in range(size):
        b1, x = i % m, i // m
        for j in range(size):
            b2, y = j % m, j // m
            table[i][j] = C.mul(x, y) * m + B.product(b1, action(x, b2), eps(x, y))
    E = validate_group(table, name or f"E({B.name},{C.name})")
    k = Homomorphism(B, E, tuple(B.elements), 'k')
    f = Homomorphism(E, C, tuple(i // m for i in range(size)), 'f')
    return Extension(k, f, name)


def split_extension(action: AbelianAction, name: str = '') -> Extension:
    return ext_of_cocycle(action, zero_cochain(action, 2), name or 'split')


def extensions_over(action: AbelianAction) -> List[Extension]:
    """One extension per class of H²(C, B, ξ), in the order of CohomologyGroup.elements()"""
    H2 = cohomology_group(2, action)
    return [ext_of_cocycle(action, eps, f"ext{i}") for i, eps in enumerate(H2.elements())]


@dataclass(frozen=True, eq=False)
class ExtensionMorphism:
    source: Extension
    target: Extension
    phi1: Homomorphism
    h: Homomorphism
    phi0: Homomorphism

    def is_invertible(self) -> bool:
        return self.h.is_isomorphism()

    def to_dict(self) -> Dict:
        return {'phi1': list(self.phi1.images), 'h': list(self.h.images), 'phi0': list(self.phi0.images)}


def make_extension_morphism(source: Extension, target: Extension, phi1: Homomorphism, h: Homomorphism,
                            phi0: Homomorphism) -> ExtensionMorphism:
    """Validated morphism: h∘k = k'∘φ₁ and f'∘h = φ₀∘f"""
    for b in source.B.elements:
        if h(source.k(b)) != target.k(phi1(b)):
            raise ValidationError("h∘k ≠ k'∘φ₁", (b,))
    for e in source.E.elements:
        if target.f(h(e)) != phi0(source.f(e)):
            raise ValidationError("f'∘h ≠ φ₀∘f", (e,))
    return ExtensionMorphism(source, target, phi1, h, phi0)


def _same_module(E1: Extension, E2: Extension) -> AbelianAction:
    a1, a2 = E1.action(), E2.action()
    if a1 != a2:
        raise ModuleMismatch("extensions live over different modules")
    return a1


def baer_sum(E1: Extension, E2: Extension, name: str = '') -> Extension:
    """Extension of the cocycle sum ε₁ + ε₂"""
    action = _same_module(E1, E2)
    _, eps1 = cocycle_of_ext(E1)
    _, eps2 = cocycle_of_ext(E2)
    return ext_of_cocycle(action, eps1 + eps2, name or f"{E1.name}+{E2.name}")


def check_equivariant(xi: AbelianAction, xi2: AbelianAction, phi0: Homomorphism, phi1: Homomorphism):
    """φ₁(x·b) = φ₀(x)·φ₁(b)"""
    for x in xi.actor.elements:
        for b in xi.module.elements:
            if phi1(xi(x, b)) != xi2(phi0(x), phi1(b)):
                raise NotEquivariant(f"φ₁({x}·{b}) ≠ φ₀({x})·φ₁({b})", (x, b))


def module_morphisms(xi: AbelianAction, xi2: AbelianAction,
                     budget: Optional[int] = None) -> List[Tuple[Homomorphism, Homomorphism]]:
    """Every equivariant pair (φ₀, φ₁), φ₀ outermost in enumeration order"""
    found = []
    phi1s = enumerate_homs(xi.module, xi2.module, budget=budget)
    for phi0 in enumerate_homs(xi.actor, xi2.actor, budget=budget):
        for phi1 in phi1s:
            try:
                check_equivariant(xi, xi2, phi0, phi1)
            except NotEquivariant:
                continue
            found.append((phi0, phi1))
    return found


def transport(E: Extension, E2: Extension, phi0: Homomorphism, phi1: Homomorphism) -> Tuple[Extension, Extension]:
    """
    (push-forward φ₁·E, pull-back φ₀*E′), both extensions of C by B′ over φ₀*ξ′

    The push-forward is (B′ ⋊ E) / {(φ₁(b), k(b)⁻¹)} with E acting through
    φ₀∘f; the pull-back is E′ ×_{C′} C on pairs in lexicographic order.
    """
    xi, xi2 = E.action(), E2.action()
    check_equivariant(xi, xi2, phi0, phi1)
    B2, m = E2.B, E2.B.order

    theta = [tuple(xi2(phi0(E.f(e)), b) for b in B2.elements) for e in E.E.elements]
    SD = semidirect_product(B2, E.E, theta)
    relations = [E.E.inv(E.k(b)) * m + phi1(b) for b in E.B.elements]
    Q, proj = quotient(SD, relations, f"{phi1.name or 'φ₁'}·{E.E.name}")
    k_push = make_hom(B2, Q, [proj(b) for b in B2.elements], 'k')
    f_images = [0] * Q.order
    for a in SD.elements:
        f_images[proj(a)] = E.f(a // m)
    pushforward = make_extension(k_push, make_hom(Q, E.C, f_images, 'f'), 'pushforward')

    pairs = [(e2, c) for e2 in E2.E.elements for c in E.C.elements if E2.f(e2) == phi0(c)]
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(E2.E.mul(a[0], b[0]), E.C.mul(a[1], b[1]))] for b in pairs] for a in pairs]
    P = validate_group(table, f"{E2.E.name}x_C'{E.C.name}")
    k_pull = make_hom(B2, P, [index[(E2.k(b), 0)] for b in B2.elements], 'k')
    f_pull = make_hom(P, E.C, [c for _, c in pairs], 'f')
    pullback = make_extension(k_pull, f_pull, 'pullback')
    return pushforward, pullback


def fibre_iso(E1: Extension, E2: Extension) -> Optional[ExtensionMorphism]:
    """
    A morphism E1 -> E2 over the identities, built from a coboundary witness

    With ε₁ − ε₂ = d¹t the map k₁(b)·s₁(x) ↦ k₂(b + t(x))·s₂(x) is a
    homomorphism; None when the classes differ.
    """
    action = _same_module(E1, E2)
    _, eps1 = cocycle_of_ext(E1)
    _, eps2 = cocycle_of_ext(E2)
    t = is_coboundary(eps1 - eps2)
    if t is None:
        return None
    s1, s2 = E1.section(), E2.section()
    B = action.module
    images = []
    for e in E1.E.elements:
        x = E1.f(e)
        b = E1.k_inverse(E1.E.mul(e, E1.E.inv(s1[x])))
        images.append(E2.E.mul(E2.k(B.mul(b, t(x))), s2[x]))
    h = make_hom(E1.E, E2.E, images, 'h')
    ident_B = Homomorphism(B, B, tuple(B.elements))
    ident_C = Homomorphism(action.actor, action.actor, tuple(action.actor.elements))
    return make_extension_morphism(E1, E2, ident_B, h, ident_C)


def morphisms_over(E: Extension, E2: Extension, phi0: Homomorphism, phi1: Homomorphism,
                   budget: Optional[int] = None) -> List[Homomorphism]:
    """Every h: E -> E′ with h∘k = k′∘φ₁ and f′∘h = φ₀∘f"""
    kernel_image = {E.k(b): E2.k(phi1(b)) for b in E.B.elements}
    allowed = []
    for e in E.E.elements:
        if e in kernel_image:
            allowed.append([kernel_image[e]])
        else:
            target = phi0(E.f(e))
            allowed.append(E2.f.preimages(target))
    return enumerate_homs(E.E, E2.E, budget=budget, allowed=allowed)


def find_fibre_iso_brute(E1: Extension, E2: Extension, budget: Optional[int] = None) -> Optional[Homomorphism]:
    """Oracle: search the homomorphisms over the identities directly"""
    _same_module(E1, E2)
    ident_B = Homomorphism(E1.B, E1.B, tuple(E1.B.elements))
    ident_C = Homomorphism(E1.C, E1.C, tuple(E1.C.elements))
    found = morphisms_over(E1, E2, ident_C, ident_B, budget)
    return found[0] if found else None


def fibre_automorphisms(E: Extension, budget: Optional[int] = None) -> List[Homomorphism]:
    """Automorphisms of E over the identities; there are |Z¹(C, B, ξ)| of them"""
    ident_B = Homomorphism(E.B, E.B, tuple(E.B.elements))
    ident_C = Homomorphism(E.C, E.C, tuple(E.C.elements))
    return morphisms_over(E, E, ident_C, ident_B, budget)


@dataclass
class ClassificationReport:
    pullback_ext: Extension
    pushforward_ext: Extension
    fibre_iso: Optional[ExtensionMorphism]
    homset: List[Homomorphism]
    z1: CohomologyGroup
    action_table: List[List[int]]
    verdict: Verdict
    cocycle_criterion: bool
    details: str = ''

    def to_dict(self) -> Dict:
        return {
            'homset_size': len(self.homset),
            'z1_order': self.z1.order,
            'fibre_iso': self.fibre_iso is not None,
            'cocycle_criterion': self.cocycle_criterion,
            'verdict': self.verdict.value,
            'details': self.details,
        }


def classify(E: Extension, E2: Extension, phi0: Homomorphism, phi1: Homomorphism,
             budget: Optional[int] = None) -> ClassificationReport:
    """
    Morphisms of extensions over (φ₀, φ₁) as a Z¹(C, B′, φ₀*ξ′)-torsor

    Three answers to "is the hom-set nonempty" are computed independently: the
    hom-set itself, a fibre isomorphism between the transports, and whether
    φ₁·ε − ε′∘(φ₀×φ₀) is a coboundary. Any disagreement is a violation.
    """
    pushforward, pullback = transport(E, E2, phi0, phi1)
    iso = fibre_iso(pushforward, pullback)
    homset = morphisms_over(E, E2, phi0, phi1, budget)

    target_action = E2.action().pull_back(phi0)
    z1 = cocycle_group(1, target_action)
    _, eps = cocycle_of_ext(E)
    _, eps2 = cocycle_of_ext(E2)
    difference = eps.push_forward(phi1, target_action) - eps2.pull_back(phi0)
    criterion = is_coboundary(difference) is not None

    position = {h.images: i for i, h in enumerate(homset)}
    table: List[List[int]] = []
    details = ''
    for t in z1.elements():
        row = []
        for h in homset:
            moved = tuple(E2.E.mul(E2.k(t(E.f(e))), h(e)) for e in E.E.elements)
            if moved not in position:
                details = "t⋆h leaves the hom-set"
                break
            row.append(position[moved])
        table.append(row)
    if details:
        verdict = Verdict.VIOLATION
    else:
        verdict, details = certify_action(z1.as_group(), len(homset), table)

    answers = (bool(homset), iso is not None, criterion)
    if len(set(answers)) != 1:
        verdict = Verdict.VIOLATION
        details = f"hom-set nonempty={answers[0]}, fibre iso={answers[1]}, coboundary={answers[2]}"
    level = logging.INFO if verdict != Verdict.VIOLATION else logging.WARNING
    logger.log(level, f"classify {E.name or '?'} -> {E2.name or '?'}: |hom|={len(homset)} "
                      f"|Z1|={z1.order} verdict={verdict.value}")
    return ClassificationReport(pullback, pushforward, iso, homset, z1, table, verdict, criterion, details)


# Finite-category encoding

@dataclass
class OpextTriangle:
    """X (extensions) -> M (modules) -> B (groups) over a finite universe"""
    triple: FOFTriple
    modules: List[AbelianAction]
    extensions: List[Extension]
    extension_module: List[int]
    module_morphisms: List[Tuple[Homomorphism, Homomorphism]]
    extension_morphisms: List[Homomorphism] = field(default_factory=list)


def _category_from(name: str, objects: int, records: List[Tuple[int, int, Tuple]],
                   compose, identity_key) -> FinCategory:
    """records are (src, dst, key); compose(g_key, f_key) is the key of g·f, identity_key(x) the key of id_x"""
    index = {(s, d, key): i for i, (s, d, key) in enumerate(records)}
    composition = {}
    for f, (s1, d1, k1) in enumerate(records):
        for g, (s2, d2, k2) in enumerate(records):
            if s2 == d1:
                composition[(g, f)] = index[(s1, d2, compose(k2, k1))]
    identities = [index[(x, x, identity_key(x))] for x in range(objects)]
    return FinCategory(name, objects, tuple(r[0] for r in records), tuple(r[1] for r in records),
                       tuple(identities), composition)


def opext_triangle(modules: Sequence[AbelianAction], budget: Optional[int] = None) -> OpextTriangle:
    """
    Encode extensions over a universe of modules as finite categories

    B has the actor groups and all homomorphisms between them; M has the
    modules and the equivariant pairs (φ₀, φ₁); X has one extension per H²
    class and every homomorphism carrying kernel into kernel. The universe is
    expected to be closed under transport up to isomorphism.
    """
    groups: List[FiniteGroup] = []
    for action in modules:
        if action.actor not in groups:
            groups.append(action.actor)
    group_of = [groups.index(a.actor) for a in modules]

    b_records = []
    for i, Ci in enumerate(groups):
        for j, Cj in enumerate(groups):
            for h in enumerate_homs(Ci, Cj, budget=budget):
                b_records.append((i, j, h.images))
    B = _category_from('B', len(groups), b_records, lambda g, f: tuple(g[v] for v in f),
                       lambda x: tuple(groups[x].elements))
    b_index = {r: n for n, r in enumerate(b_records)}

    m_records, morphisms = [], []
    for i, xi in enumerate(modules):
        for j, xj in enumerate(modules):
            for phi0, phi1 in module_morphisms(xi, xj, budget):
                m_records.append((i, j, (phi0.images, phi1.images)))
                morphisms.append((phi0, phi1))
    M = _category_from('M', len(modules), m_records,
                       lambda g, f: (tuple(g[0][v] for v in f[0]), tuple(g[1][v] for v in f[1])),
                       lambda x: (tuple(modules[x].actor.elements), tuple(modules[x].module.elements)))
    m_index = {r: n for n, r in enumerate(m_records)}

    extensions, extension_module = [], []
    for i, action in enumerate(modules):
        for ext in extensions_over(action):
            extensions.append(ext)
            extension_module.append(i)

    x_records, x_homs, p_map = [], [], []
    for p, Ep in enumerate(extensions):
        sp = Ep.section()
        for q, Eq in enumerate(extensions):
            kernel_q = set(Eq.k.images)
            for h in enumerate_homs(Ep.E, Eq.E, budget=budget):
                if any(h(Ep.k(b)) not in kernel_q for b in Ep.B.elements):
                    continue
                phi1 = tuple(Eq.k_inverse(h(Ep.k(b))) for b in Ep.B.elements)
                phi0 = tuple(Eq.f(h(sp[c])) for c in Ep.C.elements)
                x_records.append((p, q, h.images))
                x_homs.append(h)
                p_map.append(m_index[(extension_module[p], extension_module[q], (phi0, phi1))])
    X = _category_from('X', len(extensions), x_records, lambda g, f: tuple(g[v] for v in f),
                       lambda x: tuple(extensions[x].E.elements))

    G = FunctorTable(M, B, tuple(group_of), tuple(
        b_index[(group_of[s], group_of[d], key[0])] for s, d, key in m_records), 'G')
    P = FunctorTable(X, M, tuple(extension_module), tuple(p_map), 'P')
    F = FunctorTable(X, B, tuple(group_of[m] for m in extension_module),
                     tuple(G(P(f)) for f in X.morphisms), 'F')
    logger.info(f"Extension universe: |B|={B.num_morphisms} |M|={M.num_morphisms} |X|={X.num_morphisms} morphisms")
    triple = make_fof_triple(P, F, G, 'opext')
    return OpextTriangle(triple, list(modules), extensions, extension_module, morphisms, x_homs)
