"""
Line-oriented fixture files

Every object lives in a block opened by a header line `<kind> <name> ...` and
closed by `end`. Blank lines and lines starting with `#` are skipped. Groups
are re-indexed so the identity is 0 and every reference to their elements is
translated on load; serialize() writes the canonical form back.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from butterfly import validate_butterfly
from cohomology import make_cochain
from errors import ParseError, ValidationError
from fincat import make_category, make_fof_triple, make_functor
from fingroup import (AbelianAction, FiniteGroup, Homomorphism, abelian_group, cyclic_group, make_action,
                      make_hom, symmetric_group, trivial_action, trivial_group, validate_group_with_relabel)
from opext import make_extension
from schreier import make_abstract_kernel
from xmod import CrossedExtension, validate_crossed_extension, validate_xmod

logger = logging.getLogger(__name__)

KINDS = ('group', 'hom', 'action', 'cochain', 'extension', 'xext', 'butterfly', 'akernel',
         'category', 'functor', 'fof')

# header arity including the keyword
HEADER_SIZE = {'group': 2, 'hom': 4, 'action': 4, 'cochain': 4, 'extension': 5, 'xext': 6,
               'butterfly': 5, 'akernel': 4, 'category': 2, 'functor': 4, 'fof': 5}


def builtin_group(name: str) -> Optional[FiniteGroup]:
    """`1`, `Zn`, `Sn` for n ≤ 4 and products such as `Z2xZ2`"""
    if name == '1':
        return trivial_group()
    m = re.fullmatch(r'S([1-4])', name)
    if m:
        return symmetric_group(int(m.group(1)))
    parts = name.split('x')
    if all(re.fullmatch(r'Z[1-9]\d*', p) for p in parts):
        factors = [int(p[1:]) for p in parts]
        return cyclic_group(factors[0]) if len(factors) == 1 else abelian_group(factors, name)
    return None


@dataclass
class Bundle:
    """Named, validated objects; names are unique across kinds"""
    objects: Dict[str, Dict[str, Any]] = field(default_factory=lambda: {k: {} for k in KINDS})
    refs: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    kinds: Dict[str, str] = field(default_factory=dict)
    files: Dict[str, List[str]] = field(default_factory=dict)
    relabels: Dict[str, List[int]] = field(default_factory=dict)
    _builtins: Dict[str, Any] = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.kinds)

    def add(self, kind: str, name: str, obj: Any, refs: Tuple[str, ...] = (), file: str = '<memory>'):
        self.objects[kind][name] = obj
        self.kinds[name] = kind
        self.refs[name] = refs
        self.files.setdefault(file, []).append(name)

    def names(self, kind: str) -> List[str]:
        return list(self.objects[kind])

    def get(self, kind: str, name: str) -> Any:
        if name in self.objects[kind]:
            return self.objects[kind][name]
        if kind == 'group':
            return self.group(name)
        if kind == 'action':
            return self.action(name)
        raise KeyError(f"unknown {kind} '{name}'")

    def group(self, name: str) -> FiniteGroup:
        if name in self.objects['group']:
            return self.objects['group'][name]
        if name not in self._builtins:
            G = builtin_group(name)
            if G is None:
                raise KeyError(f"unknown group '{name}'")
            self._builtins[name] = G
        return self._builtins[name]

    def action(self, name: str) -> AbelianAction:
        """Bundle actions plus the built-in trivial actions `triv-<C>-<B>`"""
        if name in self.objects['action']:
            return self.objects['action'][name]
        m = re.fullmatch(r'triv-([^-\s]+)-([^-\s]+)', name)
        if not m:
            raise KeyError(f"unknown action '{name}'")
        if name not in self._builtins:
            self._builtins[name] = trivial_action(self.group(m.group(1)), self.group(m.group(2)), name)
        return self._builtins[name]

    def find(self, name: str) -> Tuple[str, Any]:
        """(kind, object) for any name, built-in groups and actions included"""
        if name in self.kinds:
            kind = self.kinds[name]
            return kind, self.objects[kind][name]
        for kind in ('group', 'action'):
            try:
                return kind, self.get(kind, name)
            except KeyError:
                continue
        raise KeyError(f"unknown object '{name}'")

    def relabel(self, group: str) -> Optional[List[int]]:
        return self.relabels.get(group)


class _Lines:
    """Tokenized non-comment lines of one file with their line numbers"""

    def __init__(self, text: str, file: str):
        self.file = file
        self.items: List[Tuple[int, List[str]]] = []
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if stripped and not stripped.startswith('#'):
                self.items.append((number, stripped.split()))
        self.pos = 0
        self.last = len(text.splitlines())

    def done(self) -> bool:
        return self.pos >= len(self.items)

    def next(self, what: str) -> Tuple[int, List[str]]:
        if self.done():
            raise ParseError(self.file, self.last, f"unexpected end of file, expected {what}")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def peek(self) -> Optional[List[str]]:
        return None if self.done() else self.items[self.pos][1]

    def error(self, line: int, reason: str) -> ParseError:
        return ParseError(self.file, line, reason)

    def ints(self, line: int, tokens: Sequence[str]) -> List[int]:
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise self.error(line, f"expected integers, got '{' '.join(tokens)}'")

    def keyword(self, word: str) -> Tuple[int, List[str]]:
        line, tokens = self.next(f"'{word}'")
        if tokens[0] != word:
            raise self.error(line, f"expected '{word}', got '{tokens[0]}'")
        return line, tokens[1:]

    def int_line(self, word: Optional[str] = None, count: Optional[int] = None) -> Tuple[int, List[int]]:
        if word is None:
            line, tokens = self.next("a line of integers")
        else:
            line, tokens = self.keyword(word)
        values = self.ints(line, tokens)
        if count is not None and len(values) != count:
            raise self.error(line, f"expected {count} values, got {len(values)}")
        return line, values

    def end(self):
        line, tokens = self.next("'end'")
        if tokens != ['end']:
            raise self.error(line, f"expected 'end', got '{' '.join(tokens)}'")


class _Loader:
    def __init__(self, bundle: Bundle, lines: _Lines):
        self.bundle = bundle
        self.lines = lines
        self.readers: Dict[str, Callable[[int, str, List[str]], Tuple[Any, Tuple[str, ...]]]] = {
            'group': self.read_group, 'hom': self.read_hom, 'action': self.read_action,
            'cochain': self.read_cochain, 'extension': self.read_extension, 'xext': self.read_xext,
            'butterfly': self.read_butterfly, 'akernel': self.read_akernel,
            'category': self.read_category, 'functor': self.read_functor, 'fof': self.read_fof,
        }

    def run(self):
        lines = self.lines
        while not lines.done():
            line, tokens = lines.next("a block header")
            kind = tokens[0]
            if kind not in self.readers:
                raise lines.error(line, f"unknown block '{kind}'")
            if len(tokens) != HEADER_SIZE[kind]:
                raise lines.error(line, f"'{kind}' header takes {HEADER_SIZE[kind] - 1} fields")
            name = tokens[1]
            if name in self.bundle.kinds:
                raise lines.error(line, f"duplicate name '{name}'")
            try:
                obj, refs = self.readers[kind](line, name, tokens[2:])
            except ValidationError as e:
                e.object_name = e.object_name or name
                raise
            self.bundle.add(kind, name, obj, refs, lines.file)
            logger.debug(f"{lines.file}:{line}: loaded {kind} {name}")

    # references

    def resolve(self, line: int, kind: str, name: str) -> Any:
        try:
            return self.bundle.get(kind, name)
        except KeyError as e:
            raise self.lines.error(line, e.args[0])

    def _index(self, line: int, group: str, G: FiniteGroup, v: int) -> int:
        if not 0 <= v < G.order:
            raise self.lines.error(line, f"{v} is not an element of {group}")
        r = self.bundle.relabel(group)
        return v if r is None else r[v]

    def images(self, line: int, values: Sequence[int], src: str, dst: str) -> List[int]:
        S, T = self.bundle.group(src), self.bundle.group(dst)
        if len(values) != S.order:
            raise self.lines.error(line, f"expected {S.order} images, got {len(values)}")
        out = [0] * S.order
        for i, v in enumerate(values):
            out[self._index(line, src, S, i)] = self._index(line, dst, T, v)
        return out

    def hom_line(self, word: Optional[str], src: str, dst: str, label: str) -> Homomorphism:
        line, values = self.lines.int_line(word)
        self.resolve(line, 'group', src)
        self.resolve(line, 'group', dst)
        return make_hom(self.bundle.group(src), self.bundle.group(dst), self.images(line, values, src, dst), label)

    def perm_rows(self, line: int, actor: str, module: str) -> List[List[int]]:
        """|actor| lines, each the map a ↦ g*a on the module"""
        A, M = self.resolve(line, 'group', actor), self.resolve(line, 'group', module)
        rows = [[0] * M.order for _ in A.elements]
        for g in A.elements:
            row_line, values = self.lines.int_line(count=M.order)
            rows[self._index(row_line, actor, A, g)] = self.images(row_line, values, module, module)
        return rows

    # blocks

    def read_group(self, line: int, name: str, args: List[str]):
        lines = self.lines
        order_line, (n,) = lines.int_line('order', 1)
        if n < 1:
            raise lines.error(order_line, "order must be positive")
        lines.keyword('table')
        rows = []
        for i in range(n):
            row_line, tokens = lines.next(f"row {i} of the table")
            if tokens == ['end']:
                raise lines.error(row_line, f"table has {i} rows, expected {n}")
            values = lines.ints(row_line, tokens)
            if len(values) != n:
                raise lines.error(row_line, f"table is not square: row {i} has {len(values)} entries, expected {n}")
            rows.append(values)
        lines.end()
        G, relabel = validate_group_with_relabel(rows, name)
        if relabel != list(range(n)):
            self.bundle.relabels[name] = relabel
        return G, ()

    def read_hom(self, line: int, name: str, args: List[str]):
        src, dst = args
        hom = self.hom_line(None, src, dst, name)
        self.lines.end()
        return hom, (src, dst)

    def read_action(self, line: int, name: str, args: List[str]):
        C, B = args
        rows = self.perm_rows(line, C, B)
        self.lines.end()
        return make_action(self.bundle.group(C), self.bundle.group(B), rows, name), (C, B)

    def read_cochain(self, line: int, name: str, args: List[str]):
        lines = self.lines
        degree_text, action_name = args
        degree = lines.ints(line, [degree_text])[0]
        action = self.resolve(line, 'action', action_name)
        C_name, B_name = self._action_groups(action_name)
        C, B = action.actor, action.module
        values: Dict[Tuple[int, ...], int] = {}
        while lines.peek() != ['end']:
            row_line, tokens = lines.next("'x1 ... xn -> b' or 'end'")
            if '->' not in tokens or tokens.index('->') != degree or len(tokens) != degree + 2:
                raise lines.error(row_line, f"expected {degree} arguments, '->' and a value")
            xs = tuple(self._index(row_line, C_name, C, x) for x in lines.ints(row_line, tokens[:degree]))
            if 0 in xs:
                raise lines.error(row_line, "argument tuples must avoid the identity")
            if xs in values:
                raise lines.error(row_line, f"repeated argument tuple {xs}")
            values[xs] = self._index(row_line, B_name, B, lines.ints(row_line, tokens[-1:])[0])
        lines.end()
        return make_cochain(action, degree, values, name), (degree_text, action_name)

    def _action_groups(self, action_name: str) -> Tuple[str, str]:
        """Group names an action was declared over; relabels are looked up by them"""
        if action_name in self.bundle.refs:
            return self.bundle.refs[action_name]
        m = re.fullmatch(r'triv-([^-\s]+)-([^-\s]+)', action_name)
        return m.group(1), m.group(2)

    def read_extension(self, line: int, name: str, args: List[str]):
        B, E, C = args
        k = self.hom_line('k', B, E, 'k')
        f = self.hom_line('f', E, C, 'f')
        self.lines.end()
        return make_extension(k, f, name), (B, E, C)

    def read_xext(self, line: int, name: str, args: List[str]):
        B, G2, G1, C = args
        j = self.hom_line('j', B, G2, 'j')
        partial = self.hom_line('partial', G2, G1, '∂')
        p = self.hom_line('p', G1, C, 'p')
        self.lines.keyword('act')
        rows = self.perm_rows(line, G1, G2)
        self.lines.end()
        xmod = validate_xmod(partial, rows, name)
        return validate_crossed_extension(xmod, j, p, name), (B, G2, G1, C)

    def _xext_groups(self, line: int, name: str) -> Tuple[CrossedExtension, str, str]:
        X = self.resolve(line, 'xext', name)
        _, G2, G1, _ = self.bundle.refs[name]
        return X, G2, G1

    def read_butterfly(self, line: int, name: str, args: List[str]):
        X_name, X2_name, E = args
        X, H2, H1 = self._xext_groups(line, X_name)
        X2, G2, G1 = self._xext_groups(line, X2_name)
        self.resolve(line, 'group', E)
        kappa = self.hom_line('kappa', H2, E, 'kappa')
        iota = self.hom_line('iota', G2, E, 'iota')
        delta = self.hom_line('delta', E, H1, 'delta')
        gamma = self.hom_line('gamma', E, G1, 'gamma')
        self.lines.end()
        b = validate_butterfly(X, X2, self.bundle.group(E), kappa, iota, delta, gamma, name)
        return b, (X_name, X2_name, E)

    def read_akernel(self, line: int, name: str, args: List[str]):
        C, K = args
        G = self.resolve(line, 'group', C)
        self.resolve(line, 'group', K)
        row_line, values = self.lines.int_line(count=G.order)
        images = [0] * G.order
        for i, v in enumerate(values):
            images[self._index(row_line, C, G, i)] = v
        self.lines.end()
        return make_abstract_kernel(G, self.bundle.group(K), images, name), (C, K)

    def read_category(self, line: int, name: str, args: List[str]):
        lines = self.lines
        _, (k,) = lines.int_line('objects', 1)
        _, (m,) = lines.int_line('morphisms', 1)
        arrows = []
        for i in range(m):
            row_line, values = lines.int_line(count=3)
            if values[0] != i:
                raise lines.error(row_line, f"morphism ids must be listed in order, expected {i}")
            arrows.append((values[1], values[2]))
        _, identities = lines.int_line('identities', k)
        lines.keyword('compose')
        composition = {}
        while lines.peek() != ['end']:
            row_line, (g, f, gf) = lines.int_line(count=3)
            composition[(g, f)] = gf
        lines.end()
        return make_category(name, k, arrows, identities, composition), ()

    def read_functor(self, line: int, name: str, args: List[str]):
        src, dst = args
        A = self.resolve(line, 'category', src)
        B = self.resolve(line, 'category', dst)
        _, obj_map = self.lines.int_line('objects', A.num_objects)
        _, mor_map = self.lines.int_line('morphisms', A.num_morphisms)
        self.lines.end()
        return make_functor(A, B, obj_map, mor_map, name), (src, dst)

    def read_fof(self, line: int, name: str, args: List[str]):
        P, F, G = (self.resolve(line, 'functor', n) for n in args)
        self.lines.end()
        return make_fof_triple(P, F, G, name), tuple(args)


def parse_text(text: str, file: str = '<memory>', bundle: Optional[Bundle] = None) -> Bundle:
    bundle = Bundle() if bundle is None else bundle
    loader = _Loader(bundle, _Lines(text, file))
    loader.run()
    return bundle


def parse_bundle(paths: Iterable[str]) -> Bundle:
    """Load files in order into one bundle; a directory contributes its files sorted by name"""
    bundle = Bundle()
    for path in paths:
        p = Path(path)
        if p.is_dir():
            files = sorted(f for f in p.iterdir() if f.is_file() and not f.name.startswith('.'))
        else:
            files = [p]
        for f in files:
            try:
                text = f.read_text(encoding='utf-8')
            except OSError as e:
                raise ParseError(str(f), 0, f"cannot read file: {e.strerror}")
            parse_text(text, str(f), bundle)
    logger.info(f"Loaded {len(bundle)} objects from {len(bundle.files)} files")
    return bundle


# Serialization

def _ints(values: Iterable[int]) -> str:
    return ' '.join(str(int(v)) for v in values)


def _write_group(bundle: Bundle, name: str) -> List[str]:
    G = bundle.objects['group'][name]
    return [f"group {name}", f"order {G.order}", "table"] + [_ints(r) for r in G.rows()] + ["end"]


def _write_hom(bundle: Bundle, name: str) -> List[str]:
    h = bundle.objects['hom'][name]
    return [f"hom {name} {' '.join(bundle.refs[name])}", _ints(h.images), "end"]


def _write_action(bundle: Bundle, name: str) -> List[str]:
    a = bundle.objects['action'][name]
    return [f"action {name} {' '.join(bundle.refs[name])}"] + [_ints(r) for r in a.act] + ["end"]


def _write_cochain(bundle: Bundle, name: str) -> List[str]:
    c = bundle.objects['cochain'][name]
    body = [f"{_ints(xs)} -> {v}" for xs, v in c.items()]
    return [f"cochain {name} {' '.join(bundle.refs[name])}"] + body + ["end"]


def _write_extension(bundle: Bundle, name: str) -> List[str]:
    e = bundle.objects['extension'][name]
    return [f"extension {name} {' '.join(bundle.refs[name])}", f"k {_ints(e.k.images)}",
            f"f {_ints(e.f.images)}", "end"]


def _write_xext(bundle: Bundle, name: str) -> List[str]:
    X = bundle.objects['xext'][name]
    return ([f"xext {name} {' '.join(bundle.refs[name])}", f"j {_ints(X.j.images)}",
             f"partial {_ints(X.boundary.images)}", f"p {_ints(X.p.images)}", "act"]
            + [_ints(r) for r in X.xmod.act] + ["end"])


def _write_butterfly(bundle: Bundle, name: str) -> List[str]:
    b = bundle.objects['butterfly'][name]
    return [f"butterfly {name} {' '.join(bundle.refs[name])}", f"kappa {_ints(b.kappa.images)}",
            f"iota {_ints(b.iota.images)}", f"delta {_ints(b.delta.images)}",
            f"gamma {_ints(b.gamma.images)}", "end"]


def _write_akernel(bundle: Bundle, name: str) -> List[str]:
    a = bundle.objects['akernel'][name]
    return [f"akernel {name} {' '.join(bundle.refs[name])}", _ints(a.psi0.images), "end"]


def _write_category(bundle: Bundle, name: str) -> List[str]:
    X = bundle.objects['category'][name]
    out = [f"category {name}", f"objects {X.num_objects}", f"morphisms {X.num_morphisms}"]
    out += [f"{f} {X.src[f]} {X.dst[f]}" for f in X.morphisms]
    out += [f"identities {_ints(X.identities)}", "compose"]
    out += [f"{g} {f} {gf}" for (g, f), gf in sorted(X.composition.items())]
    return out + ["end"]


def _write_functor(bundle: Bundle, name: str) -> List[str]:
    F = bundle.objects['functor'][name]
    return [f"functor {name} {' '.join(bundle.refs[name])}", f"objects {_ints(F.obj_map)}",
            f"morphisms {_ints(F.mor_map)}", "end"]


def _write_fof(bundle: Bundle, name: str) -> List[str]:
    return [f"fof {name} {' '.join(bundle.refs[name])}", "end"]


WRITERS: Dict[str, Callable[[Bundle, str], List[str]]] = {
    'group': _write_group, 'hom': _write_hom, 'action': _write_action, 'cochain': _write_cochain,
    'extension': _write_extension, 'xext': _write_xext, 'butterfly': _write_butterfly,
    'akernel': _write_akernel, 'category': _write_category, 'functor': _write_functor, 'fof': _write_fof,
}


def serialize(bundle: Bundle, file: Optional[str] = None) -> str:
    """Canonical text of one loaded file, or of the whole bundle; blocks are separated by a blank line"""
    names = bundle.files.get(file, []) if file is not None else [n for ns in bundle.files.values() for n in ns]
    blocks = ['\n'.join(WRITERS[bundle.kinds[n]](bundle, n)) + '\n' for n in names]
    return '\n'.join(blocks)
