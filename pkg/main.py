"""
Main entry point for obstrukt
Runs any operation or verification suite on fixture bundles
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import config
from bundle import Bundle, parse_bundle, parse_text
from butterfly import compose, project, weak_hom_set
from cohomology import cohomology_group, differential, is_coboundary
from errors import BudgetExceeded, ParseError, ValidationError
from fincat import Verdict, is_fibrewise_opfibration
from fingroup import FiniteGroup, Homomorphism, identity_hom, structure_of, zero_hom
from opext import classify, fibre_iso, transport
from schreier import AbstractKernel, make_abstract_kernel, obstruction_class, sml_report
from suites import SUITES, run_suite
from xmod import pi, three_cocycle_of, transport_xext

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


@dataclass
class CommandResult:
    title: str
    lines: List[str]
    data: Dict = field(default_factory=dict)
    code: int = EXIT_OK

    def text(self) -> str:
        return '\n'.join(["=" * 60, self.title, "=" * 60] + self.lines)


def _strip(value: str) -> str:
    """`C=Z2` -> `Z2`"""
    return value.split('=', 1)[1] if '=' in value else value


def _lookup(bundle: Bundle, kind: str, name: str):
    try:
        return bundle.get(kind, name)
    except KeyError as e:
        raise ValidationError(e.args[0])


def _resolve_hom(bundle: Bundle, name: str, source: FiniteGroup, target: FiniteGroup) -> Homomorphism:
    """A bundle hom, or `id` / `zero` between the given groups"""
    if name == 'id':
        if source != target:
            raise ValidationError(f"'id' needs equal groups, got {source.name} and {target.name}")
        return identity_hom(source)
    if name == 'zero':
        return zero_hom(source, target)
    hom = _lookup(bundle, 'hom', name)
    if hom.source != source or hom.target != target:
        raise ValidationError(f"hom '{name}' does not go from {source.name} to {target.name}")
    return hom


def _resolve_akernel(bundle: Bundle, name: str, C: FiniteGroup, K: FiniteGroup,
                     budget: Optional[int]) -> AbstractKernel:
    """A bundle abstract kernel, `triv`, or `id` (x ↦ x into Out(K))"""
    if name == 'triv':
        return make_abstract_kernel(C, K, [0] * C.order, 'triv', budget)
    if name == 'id':
        return make_abstract_kernel(C, K, list(C.elements), 'id', budget)
    kernel = _lookup(bundle, 'akernel', name)
    if kernel.C != C or kernel.K != K:
        raise ValidationError(f"abstract kernel '{name}' is not over ({C.name}, {K.name})")
    return kernel


def _describe(kind: str, name: str, obj) -> str:
    if kind == 'group':
        return f"group {name}: order {obj.order}, {'abelian' if obj.is_abelian() else 'nonabelian'}"
    if kind == 'hom':
        return (f"hom {name}: {obj.source.name} -> {obj.target.name}, kernel {obj.kernel()}, "
                f"image size {len(obj.image())}")
    if kind == 'action':
        return f"action {name}: {obj.actor.name} on {obj.module.name}, {'trivial' if obj.is_trivial() else 'nontrivial'}"
    if kind == 'cochain':
        cocycle = obj.degree > 3 or differential(obj).is_zero()
        return f"cochain {name}: degree {obj.degree}, {len(obj.items())} nonzero values, cocycle {cocycle}"
    if kind == 'extension':
        return f"extension {name}: {obj.B.order} -> {obj.E.order} -> {obj.C.order}"
    if kind == 'xext':
        return f"xext {name}: {obj.B.order} -> {obj.G2.order} -> {obj.G1.order} -> {obj.C.order}"
    if kind == 'butterfly':
        return (f"butterfly {name}: |E|={obj.E.order} representable={obj.representable} "
                f"flippable={obj.flippable}")
    if kind == 'akernel':
        return f"akernel {name}: {obj.C.name} -> Out({obj.K.name}) images {list(obj.psi0.images)}"
    if kind == 'category':
        return f"category {name}: {obj.num_objects} objects, {obj.num_morphisms} morphisms"
    if kind == 'functor':
        return f"functor {name}: {obj.source.name} -> {obj.target.name}"
    if kind == 'fof':
        check = is_fibrewise_opfibration(obj)
        return f"fof {name}: fibrewise opfibration {bool(check)}" + ('' if check else f" ({check.reason})")
    return f"{kind} {name}"


# Commands

def cmd_check(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    target = args.object
    path = Path(target)
    if path.is_file():
        loaded = parse_text(path.read_text(encoding='utf-8'), str(path), Bundle())
        names = [n for ns in loaded.files.values() for n in ns]
        lines = [_describe(loaded.kinds[n], n, loaded.get(loaded.kinds[n], n)) for n in names]
        return CommandResult(f"CHECK {target}", lines + [f"{len(names)} objects valid"],
                             {'file': target, 'objects': names})
    try:
        kind, obj = bundle.find(target)
    except KeyError as e:
        raise ValidationError(e.args[0])
    return CommandResult(f"CHECK {target}", [_describe(kind, target, obj)], {'object': target, 'kind': kind})


def cmd_structure(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    G = _lookup(bundle, 'group', args.group)
    report = structure_of(G, budget)
    lines = [
        f"order: {G.order}",
        f"abelian: {G.is_abelian()}",
        f"centre: {list(report.center)}",
        f"|Aut|: {report.automorphisms.order}",
        f"|Inn|: {len(report.inner)}",
        f"|Out|: {report.outer.order}",
    ]
    return CommandResult(f"STRUCTURE {args.group}", lines, report.to_dict())


def cmd_cohomology(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    action = _lookup(bundle, 'action', args.action)
    H = cohomology_group(args.n, action)
    factors = [int(d) for d in H.invariant_factors]
    lines = [f"order: {H.order}", f"invariant factors: {factors}"]
    return CommandResult(f"H^{args.n}({action.actor.name}, {action.module.name}) for {args.action}", lines,
                         H.to_dict())


def cmd_classify_opext(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    E, E2 = _lookup(bundle, 'extension', args.E), _lookup(bundle, 'extension', args.E2)
    phi0 = _resolve_hom(bundle, args.phi0, E.C, E2.C)
    phi1 = _resolve_hom(bundle, args.phi1, E.B, E2.B)
    report = classify(E, E2, phi0, phi1, budget)
    lines = [
        f"morphisms over (phi0, phi1): {len(report.homset)}",
        f"|Z1|: {report.z1.order}",
        f"fibre isomorphism: {report.fibre_iso is not None}",
        f"coboundary criterion: {report.cocycle_criterion}",
        f"verdict: {report.verdict.value}" + (f" ({report.details})" if report.details else ''),
    ]
    code = EXIT_VIOLATION if report.verdict == Verdict.VIOLATION else EXIT_OK
    return CommandResult(f"CLASSIFY {args.E} -> {args.E2}", lines, report.to_dict(), code)


def cmd_transport(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    kind, source = bundle.find(args.E) if args.E in bundle.kinds else (None, None)
    if kind == 'xext':
        X, X2 = source, _lookup(bundle, 'xext', args.E2)
        phi0 = _resolve_hom(bundle, args.phi0, X.C, X2.C)
        phi = _resolve_hom(bundle, args.phi1, X.B, X2.B)
        pushforward, pullback = transport_xext(X, X2, phi0, phi)
        target = pi(X2).pull_back(phi0)
        difference = three_cocycle_of(X).push_forward(phi, target) - three_cocycle_of(X2).pull_back(phi0)
        same = is_coboundary(difference) is not None
        lines = [
            f"push-forward: {pushforward.B.order} -> {pushforward.G2.order} -> {pushforward.G1.order} -> "
            f"{pushforward.C.order}",
            f"pull-back: {pullback.B.order} -> {pullback.G2.order} -> {pullback.G1.order} -> {pullback.C.order}",
            f"3-cocycle classes agree: {same}",
        ]
        return CommandResult(f"TRANSPORT {args.E} -> {args.E2}", lines,
                             {'pushforward': pushforward.to_dict(), 'pullback': pullback.to_dict(),
                              'classes_agree': same})
    E, E2 = _lookup(bundle, 'extension', args.E), _lookup(bundle, 'extension', args.E2)
    phi0 = _resolve_hom(bundle, args.phi0, E.C, E2.C)
    phi1 = _resolve_hom(bundle, args.phi1, E.B, E2.B)
    pushforward, pullback = transport(E, E2, phi0, phi1)
    iso = fibre_iso(pushforward, pullback)
    lines = [
        f"push-forward: |E| = {pushforward.E.order}",
        f"pull-back: |E| = {pullback.E.order}",
        f"fibre isomorphism: {iso is not None}",
    ]
    return CommandResult(f"TRANSPORT {args.E} -> {args.E2}", lines,
                         {'pushforward': pushforward.to_dict(), 'pullback': pullback.to_dict(),
                          'fibre_iso': iso is not None})


def cmd_butterfly_compose(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    b1, b2 = _lookup(bundle, 'butterfly', args.b1), _lookup(bundle, 'butterfly', args.b2)
    b = compose(b2, b1, f"{args.b2}∘{args.b1}")
    phi0, phi = project(b)
    lines = [
        f"|E|: {b.E.order}",
        f"representable: {b.representable}",
        f"flippable: {b.flippable}",
        f"projection: phi0 = {list(phi0.images)}, phi = {list(phi.images)}",
    ]
    data = b.to_dict()
    data.update({'phi0': list(phi0.images), 'phi': list(phi.images)})
    return CommandResult(f"COMPOSE {args.b2} o {args.b1}", lines, data)


def cmd_weak_homs(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    X, X2 = _lookup(bundle, 'xext', args.X), _lookup(bundle, 'xext', args.X2)
    phi0 = _resolve_hom(bundle, args.phi0, X.C, X2.C)
    phi = _resolve_hom(bundle, args.phi, X.B, X2.B)
    report = weak_hom_set(X, X2, phi0, phi, budget)
    lines = [
        f"weak maps: {len(report.classes)}",
        f"|H2|: {report.h2_order}",
        f"3-cocycle criterion: {report.cocycle_criterion}",
        f"verdict: {report.verdict.value}" + (f" ({report.details})" if report.details else ''),
    ]
    code = EXIT_VIOLATION if report.verdict == Verdict.VIOLATION else EXIT_OK
    return CommandResult(f"WEAK MAPS {args.X} -> {args.X2}", lines, report.to_dict(), code)


def cmd_obstruction(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    kernel = _lookup(bundle, 'akernel', args.akernel)
    result = obstruction_class(kernel, budget=budget)
    state = 'vanishes' if result.vanishes else 'does not vanish'
    lines = [f"obstruction in H3({kernel.C.name}, Z({kernel.K.name})) {state}",
             f"nonzero values of the pulled-back 3-cocycle: {len(result.cocycle.items())}"]
    return CommandResult(f"OBSTRUCTION {args.akernel}", lines, result.to_dict())


def cmd_sml(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    C, K = _lookup(bundle, 'group', args.C), _lookup(bundle, 'group', args.K)
    kernel = _resolve_akernel(bundle, args.akernel, C, K, budget)
    report = sml_report(kernel, budget)
    lines = [report.summary(), f"obstruction vanishes: {report.obstruction_vanishes}"]
    lines += [f"class {i}: fset {list(fs.fset)}" for i, fs in enumerate(report.ext_classes)]
    code = EXIT_VIOLATION if report.torsor_verdict == Verdict.VIOLATION else EXIT_OK
    return CommandResult(f"SML {args.C} {args.K} {args.akernel}", lines, report.to_dict(), code)


def cmd_verify(bundle: Bundle, args, budget: Optional[int]) -> CommandResult:
    seed = getattr(args, 'seed', config.DEFAULT_SEED)
    report = run_suite(args.suite, seed, budget)
    code = EXIT_OK if report.ok else EXIT_VIOLATION
    return CommandResult(f"VERIFY {args.suite} (seed {seed})", [report.summary()], report.to_dict(), code)


def _common_options() -> argparse.ArgumentParser:
    """Flags accepted both before and after the command; SUPPRESS keeps the outer value"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', default=argparse.SUPPRESS,
                        help='Print a canonical JSON report instead of text')
    common.add_argument('--budget', type=int, default=argparse.SUPPRESS,
                        help=f'Enumeration budget (default: {config.ENUMERATION_BUDGET})')
    common.add_argument('--seed', type=int, default=argparse.SUPPRESS,
                        help=f'Seed for random instances (default: {config.DEFAULT_SEED})')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog='obstrukt',
        description='obstrukt - exhaustive checks of extension and obstruction theory on finite groups',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[common],
        epilog="""
Examples:
  # Second cohomology of Z2 acting trivially on Z2
  python main.py cohomology 2 triv-Z2-Z2

  # Schreier classification of extensions of Z2 by Z3 inducing inversion
  python main.py sml C=Z2 K=Z3 akernel=id

  # Weak maps between fixture crossed extensions
  python main.py --bundle fixtures weak-homs zeroZ2Z2 zeroZ2Z2 id id

  # Run a verification suite
  python main.py verify --suite sml --seed 0
        """
    )
    parser.add_argument('--bundle', action='append', default=None,
                        help=f'Fixture file or directory, repeatable (default: {config.FIXTURE_DIR})')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        default=None, help=f'Logging level (default: {config.LOG_LEVEL})')

    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('check', parents=[common], help='Validate a named object or a file')
    p.add_argument('object', type=_strip)
    p.set_defaults(handler=cmd_check)

    p = commands.add_parser('structure', parents=[common], help='Centre, Aut, Inn and Out of a group')
    p.add_argument('group', type=_strip)
    p.set_defaults(handler=cmd_structure)

    p = commands.add_parser('cohomology', parents=[common], help='H^n of a module, n = 1, 2, 3')
    p.add_argument('n', type=lambda v: int(_strip(v)))
    p.add_argument('action', type=_strip)
    p.set_defaults(handler=cmd_cohomology)

    p = commands.add_parser('classify-opext', parents=[common], help='Morphisms of extensions over (phi0, phi1)')
    for name in ('E', 'E2', 'phi0', 'phi1'):
        p.add_argument(name, type=_strip)
    p.set_defaults(handler=cmd_classify_opext)

    p = commands.add_parser('transport', parents=[common], help='Push-forward and pull-back along (phi0, phi1)')
    for name in ('E', 'E2', 'phi0', 'phi1'):
        p.add_argument(name, type=_strip)
    p.set_defaults(handler=cmd_transport)

    p = commands.add_parser('butterfly-compose', parents=[common], help='Compose b2 after b1')
    p.add_argument('b1', type=_strip)
    p.add_argument('b2', type=_strip)
    p.set_defaults(handler=cmd_butterfly_compose)

    p = commands.add_parser('weak-homs', parents=[common], help='Weak maps X -> X2 over (phi0, phi)')
    for name in ('X', 'X2', 'phi0', 'phi'):
        p.add_argument(name, type=_strip)
    p.set_defaults(handler=cmd_weak_homs)

    p = commands.add_parser('obstruction', parents=[common], help='Obstruction class of an abstract kernel')
    p.add_argument('akernel', type=_strip)
    p.set_defaults(handler=cmd_obstruction)

    p = commands.add_parser('sml', parents=[common], help='Extension classes for an abstract kernel')
    p.add_argument('C', type=_strip)
    p.add_argument('K', type=_strip)
    p.add_argument('akernel', type=_strip)
    p.set_defaults(handler=cmd_sml)

    p = commands.add_parser('verify', parents=[common], help='Run a verification suite')
    p.add_argument('--suite', choices=SUITES + ('all',), required=True)
    p.set_defaults(handler=cmd_verify)
    return parser


def _exit_code(error: Exception) -> int:
    if isinstance(error, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(error, (ParseError, ValidationError)):
        return EXIT_INPUT
    raise error


def run_command(bundle: Bundle, command: Sequence[str]) -> Tuple[str, int]:
    """Parse one command, run it and return (report text, exit code)"""
    args = build_parser().parse_args(list(command))
    budget = getattr(args, 'budget', None)
    try:
        result = args.handler(bundle, args, budget)
    except (BudgetExceeded, ParseError, ValidationError) as e:
        code = _exit_code(e)
        logger.error(f"{args.command}: {e}")
        if getattr(args, 'json', False):
            return json.dumps({'error': str(e), 'exit_code': code}, sort_keys=True, indent=2), code
        return f"error: {e}", code
    if getattr(args, 'json', False):
        return json.dumps(dict(result.data, exit_code=result.code), sort_keys=True, indent=2), result.code
    return result.text(), result.code


def load_bundle(paths: Optional[List[str]]) -> Bundle:
    if paths is None:
        paths = [config.FIXTURE_DIR] if Path(config.FIXTURE_DIR).is_dir() else []
    return parse_bundle(paths)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    level = args.log_level or config.LOG_LEVEL
    logging.basicConfig(level=getattr(logging, level), format=config.LOG_FORMAT)
    if getattr(args, 'budget', None) is not None:
        config.ENUMERATION_BUDGET = args.budget

    try:
        bundle = load_bundle(args.bundle)
    except (ParseError, ValidationError) as e:
        logger.error(f"Could not load bundle: {e}")
        print(f"error: {e}")
        return EXIT_INPUT

    command = _command_tokens(argv)
    text, code = run_command(bundle, command)
    print(text)
    return code


def _command_tokens(argv: List[str]) -> List[str]:
    """Drop the bundle and log-level flags, which only the outer parser understands"""
    out, skip = [], False
    for token in argv:
        if skip:
            skip = False
            continue
        if token in ('--bundle', '--log-level'):
            skip = True
            continue
        if token.startswith('--bundle=') or token.startswith('--log-level='):
            continue
        out.append(token)
    return out


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("\nInterrupted by user")
        sys.exit(EXIT_VIOLATION)
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        sys.exit(EXIT_VIOLATION)
