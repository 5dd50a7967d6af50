"""
Verification suites

Each suite expands into independent items that run through joblib and come
back in submission order. An item returns how many checks it made and the
failures it saw; a suite passes when no item reports a failure.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

import config
from bundle import parse_bundle, parse_text, serialize
from butterfly import (Butterfly, compose, find_two_cell, flip, from_morphism, identity_butterfly,
                       is_invertible_class, project, span_of, validate_butterfly, weak_hom_set)
from cohomology import (brute_force_order, cocycle_group, cohomology_group, differential, random_cochain,
                        search_space)
from errors import ButterflyViolation, ParseError, ValidationError
from fincat import Verdict, all_phi_triples, is_fibrewise_opfibration, random_fof_triple, torsor_certificate
from fingroup import (AbelianAction, FiniteGroup, Homomorphism, abelian_group, cyclic_group, enumerate_homs,
                      identity_hom, inversion_action, make_action, make_hom, structure_of, symmetric_group,
                      trivial_action, trivial_group)
from opext import classify, extensions_over, module_morphisms, opext_triangle
from schreier import abstract_kernels, extensions_equivalent, make_abstract_kernel, sml_report
from xmod import (CrossedExtension, XExtMorphism, automorphism_crossed_extension, compose_morphisms,
                  make_crossed_extension, morphism_class, morphism_from_pair, pi, validate_xmod, zero_crossed_extension)

logger = logging.getLogger(__name__)

SUITES = ('torsor', 'opext', 'cohomology', 'butterfly', 'weak-maps', 'sml', 'cross-stack', 'io')

Outcome = Tuple[int, List[str]]


@dataclass
class ItemResult:
    suite: str
    name: str
    checks: int
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class SuiteReport:
    suite: str
    seed: int
    items: List[ItemResult]

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    @property
    def checks(self) -> int:
        return sum(item.checks for item in self.items)

    def dataframe(self) -> pd.DataFrame:
        if not self.items:
            return pd.DataFrame(columns=['Suite', 'Item', 'Checks', 'Status', 'First Failure'])
        return pd.DataFrame([{
            'Suite': item.suite,
            'Item': item.name,
            'Checks': item.checks,
            'Status': 'PASS' if item.ok else 'FAIL',
            'First Failure': item.failures[0] if item.failures else '',
        } for item in self.items])

    def summary(self) -> str:
        frame = self.dataframe()
        per_suite = frame.groupby('Suite', sort=False).agg(Items=('Item', 'count'), Checks=('Checks', 'sum'),
                                                           Failed=('Status', lambda s: int((s == 'FAIL').sum())))
        lines = [per_suite.to_string()]
        failed = frame[frame['Status'] == 'FAIL']
        if len(failed):
            lines += ['', failed.to_string(index=False)]
        status = 'PASS' if self.ok else 'FAIL'
        lines += ['', f"{self.suite}: {len(self.items)} items, {self.checks} checks, {status}"]
        return '\n'.join(lines)

    def to_dict(self) -> Dict:
        return {'suite': self.suite, 'seed': self.seed, 'ok': self.ok, 'checks': self.checks,
                'items': [{'suite': i.suite, 'name': i.name, 'checks': i.checks, 'failures': i.failures}
                          for i in self.items]}


# Fixture universes

def small_groups(max_order: int) -> List[FiniteGroup]:
    groups = [trivial_group(), cyclic_group(2), cyclic_group(3), cyclic_group(4), abelian_group([2, 2]),
              cyclic_group(5), cyclic_group(6), symmetric_group(3)]
    return [G for G in groups if G.order <= max_order]


def all_actions(C: FiniteGroup, B: FiniteGroup, budget: Optional[int] = None) -> List[AbelianAction]:
    """Every action of C on the abelian group B, one per homomorphism C -> Aut(B)"""
    st = structure_of(B, budget)
    return [make_action(C, B, [st.evaluation[h(c)] for c in C.elements], f"{C.name}-{B.name}-{i}")
            for i, h in enumerate(enumerate_homs(C, st.automorphisms, budget=budget))]


def module_universe(max_order: int = 4, max_product: int = 12,
                    budget: Optional[int] = None) -> List[AbelianAction]:
    """Modules (C, B, ξ) with 2 ≤ |B|, |C| ≤ max_order and |B|·|C| ≤ max_product"""
    groups = [G for G in small_groups(max_order) if G.order >= 2]
    modules = []
    for C in groups:
        for B in groups:
            if B.is_abelian() and B.order * C.order <= max_product:
                modules.extend(all_actions(C, B, budget))
    return modules


def crossed_extension_corpus(max_order: int, budget: Optional[int] = None, prefix: str = 'X') -> List[CrossedExtension]:
    """Every crossed module G₂ -> G₁ on the small groups, completed by kernel and cokernel"""
    groups = small_groups(max_order)
    corpus = []
    for G2 in groups:
        st = structure_of(G2, budget)
        for G1 in groups:
            actions = [[st.evaluation[h(g)] for g in G1.elements]
                       for h in enumerate_homs(G1, st.automorphisms, budget=budget)]
            for boundary in enumerate_homs(G2, G1, budget=budget):
                for act in actions:
                    name = f"{prefix}{len(corpus)}"
                    try:
                        xmod = validate_xmod(boundary, act, name)
                    except ValidationError:
                        continue
                    corpus.append(make_crossed_extension(xmod, name))
    logger.debug(f"{len(corpus)} crossed extensions with components of order ≤ {max_order}")
    return corpus


def pair_corpus(budget: Optional[int] = None) -> List[CrossedExtension]:
    """Sources and targets of the pairwise sweeps: the whole corpus up to SWEEP_MAX_ORDER"""
    return crossed_extension_corpus(config.SWEEP_MAX_ORDER, budget, 'P')


def s3_butterfly(budget: Optional[int] = None):
    """
    S3 between the zero crossed extension on Z2 and Z3 -> Aut(Z3) -> Out(Z3):
    kappa trivial, iota the inclusion of the rotations, delta the sign, gamma conjugation
    """
    S3, Z3 = symmetric_group(3), cyclic_group(3)
    X = zero_crossed_extension(trivial_action(cyclic_group(2), trivial_group()), 'zeroZ2')
    X2 = automorphism_crossed_extension(Z3, budget, 'autZ3')
    iota = make_hom(Z3, S3, [0, 3, 4], 'iota')
    sign = [0, 1, 1, 0, 0, 1]
    delta = make_hom(S3, X.G1, sign, 'delta')
    evaluation = structure_of(Z3, budget).evaluation
    position = {auto: i for i, auto in enumerate(evaluation)}
    gamma = make_hom(S3, X2.G1, [position[tuple(iota.images.index(S3.conj(e, iota(g))) for g in Z3.elements)]
                                 for e in S3.elements], 'gamma')
    kappa = make_hom(X.G2, S3, [0], 'kappa')
    return X, X2, S3, kappa, iota, delta, gamma


def xext_morphisms(X: CrossedExtension, X2: CrossedExtension, budget: Optional[int] = None) -> List[XExtMorphism]:
    """Every morphism of crossed extensions X -> X′, by enumerating (f₁, f₂)"""
    found = []
    f2s = enumerate_homs(X.G2, X2.G2, budget=budget)
    for f1 in enumerate_homs(X.G1, X2.G1, budget=budget):
        for f2 in f2s:
            try:
                found.append(morphism_from_pair(X, X2, f1, f2))
            except ValidationError:
                continue
    return found


# Items

def _torsor_chunk(seed: int, start: int, stop: int) -> Outcome:
    checks, failures = 0, []
    for i in range(start, stop):
        rng = np.random.default_rng([seed, i])
        triple = random_fof_triple(rng)
        check = is_fibrewise_opfibration(triple)
        checks += 1
        if not check:
            failures.append(f"instance {i}: not a fibrewise opfibration ({check.reason})")
            continue
        for x, y, phi in all_phi_triples(triple):
            report = torsor_certificate(triple, x, y, phi)
            checks += 1
            if report.verdict == Verdict.VIOLATION:
                failures.append(f"instance {i} at {(x, y, phi)}: {report.details}")
            elif report.verdict == Verdict.TORSOR and len(report.homset) != report.acting_group.order:
                failures.append(f"instance {i} at {(x, y, phi)}: |hom|={len(report.homset)} "
                                f"|H|={report.acting_group.order}")
    return checks, failures


def _opext_pair(xi: AbelianAction, xi2: AbelianAction, budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    morphisms = module_morphisms(xi, xi2, budget)
    if not morphisms:
        return 0, []
    targets = extensions_over(xi2)
    for E in extensions_over(xi):
        for E2 in targets:
            for phi0, phi1 in morphisms:
                report = classify(E, E2, phi0, phi1, budget)
                checks += 1
                if report.verdict == Verdict.VIOLATION:
                    failures.append(f"{E.name}->{E2.name} over {phi0.images}/{phi1.images}: {report.details}")
                elif report.homset and len(report.homset) != report.z1.order:
                    failures.append(f"{E.name}->{E2.name}: |hom|={len(report.homset)} |Z1|={report.z1.order}")
    return checks, failures


def _cohomology_pinned() -> Outcome:
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    expected = [
        ('H2(Z2,Z2,triv)', cohomology_group(2, trivial_action(Z2, Z2)).invariant_factors, (2,)),
        ('H2(Z3,Z3,triv)', cohomology_group(2, trivial_action(Z3, Z3)).invariant_factors, (3,)),
        ('|H2(Z2,Z3,inv)|', cohomology_group(2, inversion_action(Z2, Z3, identity_hom(Z2))).order, 1),
        ('|Z1(Z2,Z2,triv)|', cocycle_group(1, trivial_action(Z2, Z2)).order, 2),
    ]
    failures = [f"{label} = {got}, expected {want}" for label, got, want in expected if got != want]
    return len(expected), failures


def _cohomology_oracle(action: AbelianAction) -> Outcome:
    checks, failures = 0, []
    for n in (1, 2, 3):
        if search_space(action, n) > config.ORACLE_LIMIT:
            continue
        z_order, h_order = brute_force_order(n, action)
        got = (cocycle_group(n, action).order, cohomology_group(n, action).order)
        checks += 1
        if got != (z_order, h_order):
            failures.append(f"degree {n}: SNF gives |Z|,|H| = {got}, enumeration {(z_order, h_order)}")
    return checks, failures


def _cohomology_dd(seed: int, modules: Sequence[AbelianAction], count: int) -> Outcome:
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(count):
        action = modules[i % len(modules)]
        degree = i % 3
        c = random_cochain(rng, action, degree)
        if not differential(differential(c)).is_zero():
            failures.append(f"d∘d ≠ 0 on a degree-{degree} cochain over {action.name}")
    return count, failures


def _butterfly_single(X: CrossedExtension, budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    b = identity_butterfly(X)
    expect = [
        ('identity butterfly is representable', b.representable),
        ('identity butterfly is flippable', b.flippable),
        ('project(identity) = (id, id)', project(b) == (identity_hom(X.C), identity_hom(X.B))),
        ('id∘id ≅ id', find_two_cell(compose(b, b), b, budget) is not None),
        ('flip(id)∘id ≅ id', find_two_cell(compose(flip(b), b), b, budget) is not None),
    ]
    span = span_of(b)
    expect.append(('span legs are weak equivalences', morphism_class(span.left).weak_equivalence
                   and morphism_class(span.right).weak_equivalence))
    for label, ok in expect:
        checks += 1
        if not ok:
            failures.append(f"{X.name}: {label}")
    return checks, failures


def _projection_of_span(span) -> Tuple[Homomorphism, Homomorphism]:
    left, right = span.left, span.right
    return right.gamma.compose(left.gamma.inverse()), right.beta.compose(left.beta.inverse())


def _butterfly_pair(X: CrossedExtension, X2: CrossedExtension, ends: Sequence[Tuple[XExtMorphism, Butterfly]],
                    budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    id_X, id_X2 = identity_butterfly(X), identity_butterfly(X2)
    for m in xext_morphisms(X, X2, budget):
        b = from_morphism(m)
        phi0, phi = project(b)
        expect = [
            ('project∘from_morphism = Π', (phi0, phi) == (m.gamma, m.beta)),
            ('flippable ⇔ weak equivalence', b.flippable == morphism_class(m).weak_equivalence),
            ('b∘id ≅ b', find_two_cell(compose(b, id_X), b, budget) is not None),
            ('id∘b ≅ b', find_two_cell(compose(id_X2, b), b, budget) is not None),
            ('span projection = project', _projection_of_span(span_of(b)) == (phi0, phi)),
        ]
        for m2, b2 in ends:
            p0, p = project(b2)
            composite = compose(b2, b)
            expect.append(('project is functorial',
                           project(composite) == (p0.compose(phi0), p.compose(phi))))
            expect.append(('from_morphism(m2)∘from_morphism(m) ≅ from_morphism(m2∘m)',
                           find_two_cell(composite, from_morphism(compose_morphisms(m2, m)), budget) is not None))
            for _, b3 in ends:
                left = compose(b3, composite)
                right = compose(compose(b3, b2), b)
                expect.append(('composition is associative up to a two-cell',
                               find_two_cell(left, right, budget) is not None))
        for label, ok in expect:
            checks += 1
            if not ok:
                failures.append(f"{X.name}->{X2.name} via f1={m.f1.images} f2={m.f2.images}: {label}")
    return checks, failures


def _butterfly_target(sources: Sequence[CrossedExtension], X2: CrossedExtension,
                      budget: Optional[int]) -> Outcome:
    """Every source against one target, sharing the target's composition chain"""
    ends = [(m, from_morphism(m)) for m in xext_morphisms(X2, X2, budget)[:config.CHAIN_LIMIT]]
    checks, failures = 0, []
    for X in sources:
        c, f = _butterfly_pair(X, X2, ends, budget)
        checks += c
        failures.extend(f)
    return checks, failures


def _invertibility(b: Butterfly, budget: Optional[int]) -> Optional[str]:
    """None when flippable ⇔ invertible holds for b, a failure message otherwise"""
    invertible = is_invertible_class(b, budget)
    if invertible != b.flippable:
        return f"{b.source.name}->{b.target.name}: flippable={b.flippable} but invertible={invertible}"
    return None


def _s3_butterfly_item(budget: Optional[int]) -> Outcome:
    X, X2, S3, kappa, iota, delta, gamma = s3_butterfly(budget)
    failures = []
    b = validate_butterfly(X, X2, S3, kappa, iota, delta, gamma, 'sigma')
    phi0, phi = project(b)
    if not phi0.is_isomorphism() or not phi.is_trivial():
        failures.append(f"projection of the S3 butterfly is {phi0.images}, {phi.images}")
    zero = make_hom(S3, X2.G1, [0] * S3.order, 'gamma')
    try:
        validate_butterfly(X, X2, S3, kappa, iota, delta, zero, 'broken')
        failures.append("zero gamma was accepted")
    except ButterflyViolation as e:
        if e.clause != 'iv':
            failures.append(f"zero gamma broke clause {e.clause}, expected iv")
    mismatch = _invertibility(b, budget)
    if mismatch:
        failures.append(mismatch)
    return 3, failures


def _weak_maps_pair(X: CrossedExtension, X2: CrossedExtension, budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    for phi0, phi in module_morphisms(pi(X), pi(X2), budget):
        report = weak_hom_set(X, X2, phi0, phi, budget)
        checks += 1
        if report.verdict == Verdict.VIOLATION:
            failures.append(f"{X.name}->{X2.name} over {phi0.images}/{phi.images}: {report.details}")
        for weak_map in report.classes:
            checks += 1
            mismatch = _invertibility(weak_map.representative, budget)
            if mismatch:
                failures.append(f"{mismatch} over {phi0.images}/{phi.images}")
    return checks, failures


def _weak_maps_target(sources: Sequence[CrossedExtension], X2: CrossedExtension,
                      budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    for X in sources:
        c, f = _weak_maps_pair(X, X2, budget)
        checks += c
        failures.extend(f)
    return checks, failures


def _sml_sweep(C: FiniteGroup, K: FiniteGroup, budget: Optional[int]) -> Outcome:
    checks, failures = 0, []
    for kernel in abstract_kernels(C, K, budget):
        report = sml_report(kernel, budget)
        checks += 1
        if report.torsor_verdict == Verdict.VIOLATION:
            failures.append(f"({C.name}, {K.name}, {kernel.psi0.images}): {report.details}")
        classes = report.ext_classes
        if len(classes) <= 4:
            for i, a in enumerate(classes):
                for b in classes[i + 1:]:
                    checks += 1
                    if extensions_equivalent(a, b, budget):
                        failures.append(f"({C.name}, {K.name}): classes {a.fset} and {b.fset} are equivalent")
    return checks, failures


def _sml_pinned(budget: Optional[int]) -> Outcome:
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    cases = [(make_abstract_kernel(Z2, Z3, [0, 1], 'id', budget), 1),
             (make_abstract_kernel(Z2, Z2, [0, 0], 'triv', budget), 2)]
    failures = []
    for kernel, want in cases:
        got = len(sml_report(kernel, budget).ext_classes)
        if got != want:
            failures.append(f"({kernel.C.name}, {kernel.K.name}, {kernel.name}): {got} classes, expected {want}")
    return len(cases), failures


def _cross_stack(budget: Optional[int]) -> Outcome:
    Z2 = cyclic_group(2)
    triangle = opext_triangle([trivial_action(Z2, Z2, 'triv-Z2-Z2')], budget)
    triple = triangle.triple
    check = is_fibrewise_opfibration(triple)
    if not check:
        return 1, [f"encoding is not a fibrewise opfibration: {check.reason}"]
    checks, failures = 1, []
    for x, y, phi in all_phi_triples(triple):
        certificate = torsor_certificate(triple, x, y, phi)
        phi0, phi1 = triangle.module_morphisms[phi]
        report = classify(triangle.extensions[x], triangle.extensions[y], phi0, phi1, budget)
        checks += 1
        if certificate.verdict != report.verdict or len(certificate.homset) != len(report.homset):
            failures.append(f"{(x, y, phi)}: certificate {certificate.verdict.value}/{len(certificate.homset)} "
                            f"vs classify {report.verdict.value}/{len(report.homset)}")
    return checks, failures


BAD_TABLE = "group bad\norder 2\ntable\n0 1\n1\nend\n"


def _io_round_trip(directory: str) -> Outcome:
    bundle = parse_bundle([directory])
    failures = []
    for file in bundle.files:
        original = Path(file).read_text(encoding='utf-8')
        if serialize(bundle, file) != original:
            failures.append(f"{file}: serialize(parse(x)) differs from x")
    checks = len(bundle.files) + 1
    try:
        parse_text(BAD_TABLE, 'bad.grp')
        failures.append("non-square table was accepted")
    except ParseError as e:
        if e.line != 5:
            failures.append(f"non-square table reported at line {e.line}, expected 5")
    return checks, failures


# Runner

def _items(suite: str, seed: int, budget: Optional[int]) -> List[Tuple[str, Callable[..., Outcome], tuple]]:
    if suite == 'torsor':
        step = 10
        return [(f"instances {i}-{min(i + step, config.RANDOM_INSTANCES) - 1}", _torsor_chunk,
                 (seed, i, min(i + step, config.RANDOM_INSTANCES)))
                for i in range(0, config.RANDOM_INSTANCES, step)]
    if suite == 'opext':
        modules = module_universe(budget=budget)
        return [(f"{a.name} -> {b.name}", _opext_pair, (a, b, budget)) for a in modules for b in modules]
    if suite == 'cohomology':
        modules = module_universe(budget=budget)
        return ([('pinned groups', _cohomology_pinned, ())]
                + [(f"oracle {a.name}", _cohomology_oracle, (a,)) for a in modules]
                + [('d∘d = 0', _cohomology_dd, (seed, modules, config.RANDOM_COCHAINS))])
    if suite == 'butterfly':
        corpus = crossed_extension_corpus(config.SWEEP_MAX_ORDER, budget)
        pairs = pair_corpus(budget)
        return ([(f"identity {X.name}", _butterfly_single, (X, budget)) for X in corpus]
                + [(f"all -> {Y.name}", _butterfly_target, (pairs, Y, budget)) for Y in pairs]
                + [('S3 butterfly', _s3_butterfly_item, (budget,))])
    if suite == 'weak-maps':
        pairs = pair_corpus(budget)
        return [(f"all -> {Y.name}", _weak_maps_target, (pairs, Y, budget)) for Y in pairs]
    if suite == 'sml':
        Cs = small_groups(config.SML_MAX_C)
        Ks = small_groups(config.SML_MAX_K)
        return ([('pinned kernels', _sml_pinned, (budget,))]
                + [(f"{C.name} by {K.name}", _sml_sweep, (C, K, budget)) for C in Cs for K in Ks])
    if suite == 'cross-stack':
        return [('Z2 by Z2 triangle', _cross_stack, (budget,))]
    if suite == 'io':
        return [('fixture corpus', _io_round_trip, (config.FIXTURE_DIR,))]
    raise ValueError(f"unknown suite '{suite}'")


def _run_item(suite: str, name: str, func: Callable[..., Outcome], args: tuple) -> ItemResult:
    checks, failures = func(*args)
    return ItemResult(suite, name, checks, failures)


def run_suite(suite: str, seed: int = config.DEFAULT_SEED, budget: Optional[int] = None) -> SuiteReport:
    """Run one suite, or every suite for 'all'"""
    names = SUITES if suite == 'all' else (suite,)
    items = []
    for name in names:
        work = _items(name, seed, budget)
        logger.info(f"Suite {name}: {len(work)} items on {config.MAX_WORKERS} worker(s)")
        results = Parallel(n_jobs=config.MAX_WORKERS)(
            delayed(_run_item)(name, label, func, args) for label, func, args in work)
        for result in results:
            if not result.ok:
                logger.warning(f"{name}/{result.name}: {result.failures[0]}")
        items.extend(results)
    report = SuiteReport(suite, seed, items)
    logger.info(f"Suite {suite}: {len(items)} items, {report.checks} checks, ok={report.ok}")
    return report
