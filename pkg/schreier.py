"""
Non-abelian extensions through factor systems

An extension of C by K with abstract kernel ψ₀: C -> Out(K) is encoded by a
lift C -> Aut(K) over ψ₀ and a normalized fset: C × C -> K. The obstruction
to existence is the pull-back of the 3-cocycle of Z(K) -> K -> Aut(K) -> Out(K);
when it vanishes the classes form an H²(C, Z(K))-torsor.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import config
from cohomology import Cochain, CohomologyGroup, cohomology_group, is_coboundary
from errors import BudgetExceeded, NotExact, ValidationError
from fincat import Verdict, certify_action
from fingroup import (AbelianAction, FiniteGroup, GroupStructureReport, Homomorphism, enumerate_homs,
                      make_hom, structure_of, validate_group)
from xmod import CrossedExtension, automorphism_crossed_extension, pi, three_cocycle_of

logger = logging.getLogger(__name__)


def canonical_faithful_xext(K: FiniteGroup, budget: Optional[int] = None) -> CrossedExtension:
    """Z(K) -> K -conj-> Aut(K) -> Out(K)"""
    return automorphism_crossed_extension(K, budget, f"Aut({K.name})")


@dataclass(frozen=True, eq=False)
class AbstractKernel:
    """ψ₀: C -> Out(K)"""
    psi0: Homomorphism
    K: FiniteGroup
    structure: GroupStructureReport = field(repr=False)
    name: str = ''

    @property
    def C(self) -> FiniteGroup:
        return self.psi0.source

    def to_dict(self) -> Dict:
        return {'name': self.name, 'C': self.C.name, 'K': self.K.name, 'psi0': list(self.psi0.images)}


def make_abstract_kernel(C: FiniteGroup, K: FiniteGroup, images: Sequence[int], name: str = '',
                         budget: Optional[int] = None) -> AbstractKernel:
    structure = structure_of(K, budget)
    psi0 = make_hom(C, structure.outer, images, 'ψ₀')
    return AbstractKernel(psi0, K, structure, name)


def abstract_kernels(C: FiniteGroup, K: FiniteGroup, budget: Optional[int] = None) -> List[AbstractKernel]:
    """Every homomorphism C -> Out(K)"""
    structure = structure_of(K, budget)
    return [AbstractKernel(h, K, structure, f"ψ{i}")
            for i, h in enumerate(enumerate_homs(C, structure.outer, budget=budget))]


@dataclass(frozen=True, eq=False)
class FactorSystem:
    """lift[x] indexes Aut(K); fset is flat over C × C"""
    C: FiniteGroup
    K: FiniteGroup
    lift: Tuple[int, ...]
    fset: Tuple[int, ...]
    structure: GroupStructureReport = field(repr=False)

    def act(self, x: int, a: int) -> int:
        return self.structure.evaluation[self.lift[x]][a]

    def f(self, x: int, y: int) -> int:
        return self.fset[x * self.C.order + y]

    def group(self) -> FiniteGroup:
        """K × C at index x·|K| + a with (a, x)(b, y) = (a·lift(x)(b)·f(x, y), xy)"""
        C, K = self.C, self.K
        n = K.order
        size = n * C.order
        table = [[C.mul(i // n, j // n) * n + K.product(i % n, self.act(i // n, j % n), self.f(i // n, j // n))
                  for j in range(size)] for i in range(size)]
        return validate_group(table, f"{K.name}x{C.name}")

    def to_dict(self) -> Dict:
        return {'lift': list(self.lift), 'fset': list(self.fset)}


def is_factor_system(fs: FactorSystem) -> bool:
    """lift(x)∘lift(y) = conj(f(x,y))∘lift(xy) and lift(x)(f(y,z))·f(x,yz) = f(x,y)·f(xy,z)"""
    C, K = fs.C, fs.K
    aut, conj = fs.structure.automorphisms, fs.structure.conj
    if fs.lift[0] != 0 or any(fs.f(0, x) or fs.f(x, 0) for x in C.elements):
        return False
    for x in C.elements:
        for y in C.elements:
            if aut.mul(fs.lift[x], fs.lift[y]) != aut.mul(conj(fs.f(x, y)), fs.lift[C.mul(x, y)]):
                return False
    return all(K.mul(fs.act(x, fs.f(y, z)), fs.f(x, C.mul(y, z))) == K.mul(fs.f(x, y), fs.f(C.mul(x, y), z))
               for x in C.elements for y in C.elements for z in C.elements)


def extension_of(fs: FactorSystem) -> Tuple[FiniteGroup, Homomorphism, Homomorphism]:
    """(E, K -> E, E -> C) for the factor system"""
    E = fs.group()
    n = fs.K.order
    k = make_hom(fs.K, E, list(fs.K.elements), 'k')
    f = make_hom(E, fs.C, [i // n for i in E.elements], 'f')
    return E, k, f


def _canonical_lift(C: FiniteGroup, structure: GroupStructureReport, psi0: Homomorphism) -> Tuple[int, ...]:
    """Smallest automorphism index in each ψ₀-coset"""
    return tuple(min(a for a in structure.automorphisms.elements if structure.projection(a) == psi0(x))
                 for x in C.elements)


def _gauge_key(fs: FactorSystem, budget: Optional[int] = None) -> Tuple[int, ...]:
    """Smallest fset over central re-sectionings h: C -> Z(K), f ↦ h(x)·lift(x)(h(y))·f(x,y)·h(xy)⁻¹"""
    C, K = fs.C, fs.K
    centre = fs.structure.center
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    size = len(centre) ** (C.order - 1)
    if size > budget:
        raise BudgetExceeded("central re-sectionings", size, budget)
    best = None
    for rest in itertools.product(centre, repeat=C.order - 1):
        h = (0,) + rest
        f2 = tuple(K.product(h[x], fs.act(x, h[y]), fs.f(x, y), K.inv(h[C.mul(x, y)]))
                   for x in C.elements for y in C.elements)
        if best is None or f2 < best:
            best = f2
    return best


def normalize(fs: FactorSystem, psi0: Homomorphism, budget: Optional[int] = None) -> FactorSystem:
    """Re-section so the lift is canonical over ψ₀, then take the smallest fset in the central gauge orbit"""
    C, K, st = fs.C, fs.K, fs.structure
    lift = _canonical_lift(C, st, psi0)
    a = []
    for x in C.elements:
        choices = [t for t in K.elements if st.automorphisms.mul(st.conj(t), fs.lift[x]) == lift[x]]
        if not choices:
            raise ValidationError(f"lift of {x} is not over ψ₀({x})", (x,))
        a.append(choices[0])
    fset = tuple(K.product(a[x], fs.act(x, a[y]), fs.f(x, y), K.inv(a[C.mul(x, y)]))
                 for x in C.elements for y in C.elements)
    moved = FactorSystem(C, K, lift, fset, st)
    return FactorSystem(C, K, lift, _gauge_key(moved, budget), st)


def factor_system_of(k: Homomorphism, f: Homomorphism, structure: Optional[GroupStructureReport] = None,
                     budget: Optional[int] = None) -> FactorSystem:
    """Factor system of K -k-> E -f-> C read through the smallest-preimage section"""
    K, E, C = k.source, k.target, f.target
    if not k.is_injective() or not f.is_surjective() or sorted(k.images) != f.kernel():
        raise NotExact("K -> E -> C is not short exact")
    structure = structure or structure_of(K, budget)
    position = {auto: i for i, auto in enumerate(structure.evaluation)}
    k_inv = {e: a for a, e in enumerate(k.images)}
    s = [0 if x == 0 else min(f.preimages(x)) for x in C.elements]
    lift = tuple(position[tuple(k_inv[E.conj(s[x], k(a))] for a in K.elements)] for x in C.elements)
    fset = tuple(k_inv[E.product(s[x], s[y], E.inv(s[C.mul(x, y)]))] for x in C.elements for y in C.elements)
    return FactorSystem(C, K, lift, fset, structure)


def induced_abstract_kernel(fs: FactorSystem) -> Tuple[int, ...]:
    return tuple(fs.structure.projection(a) for a in fs.lift)


def ext_classes(kernel: AbstractKernel, budget: Optional[int] = None) -> List[FactorSystem]:
    """
    One normalized factor system per equivalence class of extensions inducing ψ₀

    With the lift fixed to canonical coset representatives, f(x, y) ranges over
    the Z(K)-coset conj⁻¹(lift(x)·lift(y)·lift(xy)⁻¹); candidates passing the
    cocycle identity are reduced by the central gauge.
    """
    C, K, st = kernel.C, kernel.K, kernel.structure
    aut = st.automorphisms
    lift = _canonical_lift(C, st, kernel.psi0)
    free = [(x, y) for x in C.elements for y in C.elements if x and y]
    choices = []
    for x, y in free:
        target = aut.mul(aut.mul(lift[x], lift[y]), aut.inv(lift[C.mul(x, y)]))
        choices.append([t for t in K.elements if st.conj(t) == target])
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    size = math.prod(len(c) for c in choices)
    if size > budget:
        raise BudgetExceeded(f"factor systems of {C.name} by {K.name}", size, budget)
    keys = set()
    m = C.order
    for values in itertools.product(*choices):
        fset = [0] * (m * m)
        for (x, y), v in zip(free, values):
            fset[x * m + y] = v
        fs = FactorSystem(C, K, lift, tuple(fset), st)
        if is_factor_system(fs):
            keys.add(_gauge_key(fs, budget))
    classes = [FactorSystem(C, K, lift, key, st) for key in sorted(keys)]
    logger.info(f"Ext({C.name}, {K.name}, {kernel.name or 'ψ₀'}): {len(classes)} classes from {size} candidates")
    return classes


def extensions_equivalent(fs1: FactorSystem, fs2: FactorSystem, budget: Optional[int] = None) -> bool:
    """Oracle: an isomorphism of the K × C groups fixing K pointwise and inducing the identity on C"""
    E1, E2 = fs1.group(), fs2.group()
    n = fs1.K.order
    allowed = [[i] if i < n else [(i // n) * n + b for b in fs2.K.elements] for i in E1.elements]
    return bool(enumerate_homs(E1, E2, budget=budget, allowed=allowed))


@dataclass
class ObstructionResult:
    cocycle: Cochain
    vanishes: bool
    witness: Optional[Cochain] = None

    def to_dict(self) -> Dict:
        return {'vanishes': self.vanishes, 'nonzero_values': len(self.cocycle.items())}


def obstruction_class(kernel: AbstractKernel, section: str = 'min',
                      budget: Optional[int] = None) -> ObstructionResult:
    """ω_K∘(ψ₀ × ψ₀ × ψ₀) over (C, Z(K), ψ₀*ζ_K) and whether it is a coboundary"""
    X = canonical_faithful_xext(kernel.K, budget)
    omega = three_cocycle_of(X, section)
    pulled = omega.pull_back(kernel.psi0)
    witness = is_coboundary(pulled)
    return ObstructionResult(pulled, witness is not None, witness)


def centre_action(kernel: AbstractKernel, budget: Optional[int] = None) -> AbelianAction:
    """ψ₀*ζ_K: C acting on Z(K)"""
    return pi(canonical_faithful_xext(kernel.K, budget)).pull_back(kernel.psi0)


@dataclass
class SMLReport:
    obstruction_vanishes: bool
    ext_classes: List[FactorSystem]
    h2: CohomologyGroup
    torsor_verdict: Verdict
    action_table: List[List[int]] = field(default_factory=list)
    details: str = ''

    def summary(self) -> str:
        noun = 'class' if len(self.ext_classes) == 1 else 'classes'
        status = {'torsor': 'torsor verified', 'empty': 'no extensions',
                  'violation': f'VIOLATION: {self.details}'}[self.torsor_verdict.value]
        return f"{len(self.ext_classes)} extension {noun}; H² order {self.h2.order}; {status}"

    def to_dict(self) -> Dict:
        return {'obstruction_vanishes': self.obstruction_vanishes, 'classes': len(self.ext_classes),
                'h2_order': self.h2.order, 'h2_invariant_factors': list(self.h2.invariant_factors),
                'verdict': self.torsor_verdict.value, 'details': self.details,
                'fsets': [list(c.fset) for c in self.ext_classes]}


def sml_report(kernel: AbstractKernel, budget: Optional[int] = None) -> SMLReport:
    """Obstruction, extension classes and the H²(C, Z(K)) action by fset ↦ fset·z"""
    classes = ext_classes(kernel, budget)
    obstruction = obstruction_class(kernel, budget=budget)
    action = centre_action(kernel, budget)
    H2 = cohomology_group(2, action)
    centre = kernel.structure.center
    C, K = kernel.C, kernel.K

    position = {c.fset: i for i, c in enumerate(classes)}
    table: List[List[int]] = []
    details = ''
    for z in H2.elements():
        row = []
        for c in classes:
            twisted = tuple(K.mul(c.f(x, y), centre[z(x, y)]) for x in C.elements for y in C.elements)
            key = _gauge_key(FactorSystem(C, K, c.lift, twisted, c.structure), budget)
            if key not in position:
                details = "twisting by a 2-cocycle leaves the extension classes"
                break
            row.append(position[key])
        table.append(row)
    if details:
        verdict = Verdict.VIOLATION
    else:
        verdict, details = certify_action(H2.as_group(), len(classes), table)
    if bool(classes) != obstruction.vanishes:
        verdict = Verdict.VIOLATION
        details = f"{len(classes)} classes but obstruction vanishes={obstruction.vanishes}"
    elif classes and len(classes) != H2.order:
        verdict = Verdict.VIOLATION
        details = f"{len(classes)} classes for |H2| = {H2.order}"
    report = SMLReport(obstruction.vanishes, classes, H2, verdict, table, details)
    level = logging.INFO if verdict != Verdict.VIOLATION else logging.WARNING
    logger.log(level, f"SML({C.name}, {K.name}): {report.summary()}")
    return report
