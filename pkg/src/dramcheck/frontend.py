"""Frontend for the DRAMml protocol description language.

Lexes, parses and validates `.dramml` text into a NetSpec, and renders a
NetSpec back to text.  Both directions are deterministic; parse(render(s))
is structurally equal to s after ordering normalization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class ArcKind(Enum):
    P2T = "P2T"
    T2P = "T2P"
    INHIBITOR = "INHIBITOR"
    RESET = "RESET"
    TIMING = "TIMING"


class Scope(Enum):
    SAME_INSTANCE = "same"
    SIBLING_INSTANCE = "sibling"
    ALL_INSTANCES = "all"


ARC_OPERATORS = {
    ArcKind.P2T: "->",
    ArcKind.T2P: "->",
    ArcKind.INHIBITOR: "-o",
    ArcKind.RESET: "->>",
    ArcKind.TIMING: "-<>",
}


@dataclass(frozen=True)
class SourcePos:
    line: int
    col: int


@dataclass(frozen=True, order=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class FrontendError(Exception):
    """Base class for frontend failures; carries an ordered diagnostic list."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class DrammlSyntaxError(FrontendError):
    pass


class DrammlValidationError(FrontendError):
    pass


@dataclass(frozen=True)
class HierarchyDecl:
    name: str
    instance_count_param: str
    children: tuple = ()
    pos: Optional[SourcePos] = field(default=None, compare=False)


@dataclass(frozen=True)
class PlaceDecl:
    name: str
    owner: tuple  # hierarchy name path, () = root
    capacity: Optional[int] = None
    lifetime: Optional[str] = None  # timing parameter name
    initial_tokens: int = 0
    pos: Optional[SourcePos] = field(default=None, compare=False)


@dataclass(frozen=True)
class TransitionDecl:
    name: str
    owner: tuple
    pos: Optional[SourcePos] = field(default=None, compare=False)


@dataclass(frozen=True)
class ArcDecl:
    kind: ArcKind
    src: str
    dst: str
    owner: tuple  # hierarchy path of the declaring Arcs block
    timing_param: Optional[str] = None
    scope: Scope = Scope.SAME_INSTANCE
    pos: Optional[SourcePos] = field(default=None, compare=False)

    def identity(self):
        """Stable key identifying this constraint across elaborations."""
        return (self.kind.value, self.src, self.dst, self.timing_param,
                self.scope.value, self.owner)


@dataclass(frozen=True)
class NetSpec:
    standard_name: str
    hierarchies: tuple  # tuple[HierarchyDecl]
    places: tuple  # tuple[PlaceDecl]
    transitions: tuple  # tuple[TransitionDecl]
    arcs: tuple  # tuple[ArcDecl]
    timing_params: tuple  # tuple[str]

    def place(self, name):
        for p in self.places:
            if p.name == name:
                return p
        raise KeyError(name)

    def transition(self, name):
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(name)

    def place_names(self):
        return {p.name for p in self.places}

    def transition_names(self):
        return {t.name for t in self.transitions}

    def hierarchy_paths(self):
        """All hierarchy paths, root first, as tuples of names."""
        paths = [()]

        def walk(node, prefix):
            path = prefix + (node.name,)
            paths.append(path)
            for child in node.children:
                walk(child, path)

        for h in self.hierarchies:
            walk(h, ())
        return paths

    def normalized(self):
        """Copy with declaration lists sorted into canonical order."""
        return replace(
            self,
            places=tuple(sorted(self.places, key=lambda p: p.name)),
            transitions=tuple(sorted(self.transitions, key=lambda t: t.name)),
            arcs=tuple(sorted(self.arcs, key=lambda a: a.identity())),
            timing_params=tuple(sorted(self.timing_params)),
        )


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>//[^\n]*)
      | (?P<op>->>|-<>|->|-o)
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[{}();:@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "op" | "int" | "ident" | "punct" | "eof"
    value: str
    line: int
    col: int


def _tokenize(text):
    tokens = []
    line = 1
    col = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DrammlSyntaxError(
                [Diagnostic(line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_BLOCK_KEYWORDS = ("Places", "Transitions", "Arcs", "Timings")


@dataclass
class _RawArc:
    op: str
    src: str
    dst: str
    timing_param: Optional[str]
    scope_tag: Optional[str]
    owner: tuple
    pos: SourcePos


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self.places = []
        self.transitions = []
        self.arcs = []
        self.timing_params = []
        self.timing_pos = {}

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected):
        tok = self.peek()
        got = tok.value if tok.kind != "eof" else "end of input"
        raise DrammlSyntaxError(
            [Diagnostic(tok.line, tok.col, f"expected {expected}, got {got!r}")])

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            self.error(value if value is not None else kind)
        return self.next()

    def expect_ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            self.error(what)
        return self.next()

    def parse_document(self):
        self.expect("ident", "Standard")
        name = self.expect_ident("standard name")
        self.expect("punct", "{")
        hierarchies = self.parse_items(())
        self.expect("punct", "}")
        if self.peek().kind != "eof":
            self.error("end of input")
        return name.value, tuple(hierarchies)

    def parse_items(self, owner):
        """Parse block items at one nesting level; returns child hierarchies."""
        children = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                return children
            if tok.kind == "eof":
                self.error("'}'")
            if tok.kind != "ident":
                self.error("block or hierarchy declaration")
            if tok.value in _BLOCK_KEYWORDS:
                self.parse_block(owner)
            else:
                children.append(self.parse_hierarchy(owner))

    def parse_hierarchy(self, owner):
        count = self.expect_ident("instance count parameter")
        self.expect("punct", ":")
        name = self.expect_ident("hierarchy name")
        self.expect("punct", "{")
        children = self.parse_items(owner + (name.value,))
        self.expect("punct", "}")
        return HierarchyDecl(
            name=name.value,
            instance_count_param=count.value,
            children=tuple(children),
            pos=SourcePos(name.line, name.col),
        )

    def parse_block(self, owner):
        kw = self.next()
        self.expect("punct", "{")
        while not (self.peek().kind == "punct" and self.peek().value == "}"):
            if kw.value == "Places":
                self.parse_place(owner)
            elif kw.value == "Transitions":
                self.parse_transition(owner)
            elif kw.value == "Arcs":
                self.parse_arc(owner)
            else:
                self.parse_timing()
        self.expect("punct", "}")

    def parse_place(self, owner):
        name = self.expect_ident("place name")
        capacity = None
        lifetime = None
        initial = 0
        while self.peek().kind == "ident":
            annot = self.next()
            self.expect("punct", "(")
            if annot.value == "capacity":
                capacity = int(self.expect("int").value)
            elif annot.value == "lifetime":
                lifetime = self.expect_ident("timing parameter").value
            elif annot.value == "initial":
                initial = int(self.expect("int").value)
            else:
                raise DrammlSyntaxError([Diagnostic(
                    annot.line, annot.col,
                    f"unknown place annotation {annot.value!r} "
                    "(expected capacity, lifetime or initial)")])
            self.expect("punct", ")")
        self.expect("punct", ";")
        self.places.append(PlaceDecl(
            name=name.value, owner=owner, capacity=capacity,
            lifetime=lifetime, initial_tokens=initial,
            pos=SourcePos(name.line, name.col)))

    def parse_transition(self, owner):
        name = self.expect_ident("transition name")
        self.expect("punct", ";")
        self.transitions.append(TransitionDecl(
            name=name.value, owner=owner,
            pos=SourcePos(name.line, name.col)))

    def parse_timing(self):
        name = self.expect_ident("timing parameter name")
        self.expect("punct", ";")
        if name.value not in self.timing_params:
            self.timing_params.append(name.value)
            self.timing_pos[name.value] = SourcePos(name.line, name.col)

    def parse_arc(self, owner):
        src = self.expect_ident("arc endpoint")
        op_tok = self.peek()
        if op_tok.kind != "op":
            self.error("arc operator ('->', '-o', '->>' or '-<>')")
        self.next()
        dst = self.expect_ident("arc endpoint")
        timing_param = None
        scope_tag = None
        if self.peek().kind == "punct" and self.peek().value == "(":
            self.next()
            timing_param = self.expect_ident("timing parameter").value
            self.expect("punct", ")")
        if self.peek().kind == "punct" and self.peek().value == "@":
            self.next()
            tag = self.expect_ident("scope qualifier")
            scope_tag = tag.value
            if scope_tag not in ("same", "sibling", "all"):
                raise DrammlSyntaxError([Diagnostic(
                    tag.line, tag.col,
                    f"unknown scope qualifier '@{scope_tag}' "
                    "(expected @same, @sibling or @all)")])
        self.expect("punct", ";")
        self.arcs.append(_RawArc(
            op=op_tok.value, src=src.value, dst=dst.value,
            timing_param=timing_param, scope_tag=scope_tag, owner=owner,
            pos=SourcePos(src.line, src.col)))


# ---------------------------------------------------------------------------
# Validation

def _validate(standard, hierarchies, places, transitions, raw_arcs,
              timing_params):
    diags = []

    hier_names = []

    def walk(node, path):
        if node.name in path:
            diags.append(Diagnostic(
                node.pos.line, node.pos.col,
                f"hierarchy name '{node.name}' repeats along its path"))
        if node.name in hier_names:
            diags.append(Diagnostic(
                node.pos.line, node.pos.col,
                f"duplicate hierarchy name '{node.name}'"))
        else:
            hier_names.append(node.name)
        for child in node.children:
            walk(child, path + (node.name,))

    for h in hierarchies:
        walk(h, ())

    place_names = {}
    for p in places:
        if p.name in place_names:
            diags.append(Diagnostic(p.pos.line, p.pos.col,
                                    f"duplicate place '{p.name}'"))
        else:
            place_names[p.name] = p
        if p.capacity is not None and p.capacity < 1:
            diags.append(Diagnostic(p.pos.line, p.pos.col,
                                    f"place '{p.name}' capacity must be >= 1"))
        if p.lifetime is not None and p.lifetime not in timing_params:
            diags.append(Diagnostic(
                p.pos.line, p.pos.col,
                f"place '{p.name}' lifetime references undeclared timing "
                f"parameter '{p.lifetime}'"))

    trans_names = {}
    for t in transitions:
        if t.name in trans_names:
            diags.append(Diagnostic(t.pos.line, t.pos.col,
                                    f"duplicate transition '{t.name}'"))
        else:
            trans_names[t.name] = t
        if t.name in place_names:
            diags.append(Diagnostic(
                t.pos.line, t.pos.col,
                f"name '{t.name}' declared as both place and transition"))

    arcs = []
    seen = set()
    for ra in raw_arcs:
        arc = _resolve_arc(ra, place_names, trans_names, timing_params, diags)
        if arc is None:
            continue
        key = arc.identity()
        if key in seen:
            diags.append(Diagnostic(ra.pos.line, ra.pos.col,
                                    f"duplicate arc '{ra.src} {ra.op} {ra.dst}'"))
            continue
        seen.add(key)
        arcs.append(arc)

    if diags:
        raise DrammlValidationError(sorted(diags))

    return NetSpec(
        standard_name=standard,
        hierarchies=hierarchies,
        places=tuple(places),
        transitions=tuple(transitions),
        arcs=tuple(arcs),
        timing_params=tuple(timing_params),
    )


def _resolve_arc(ra, place_names, trans_names, timing_params, diags):
    def is_place(name):
        return name in place_names

    def is_trans(name):
        return name in trans_names

    for name in (ra.src, ra.dst):
        if not is_place(name) and not is_trans(name):
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                f"arc references undeclared place or transition '{name}'"))
            return None

    if ra.op == "->":
        if is_place(ra.src) and is_trans(ra.dst):
            kind = ArcKind.P2T
        elif is_trans(ra.src) and is_place(ra.dst):
            kind = ArcKind.T2P
        else:
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                "'->' arc must connect a place and a transition"))
            return None
    elif ra.op == "-o":
        kind = ArcKind.INHIBITOR
        if not (is_place(ra.src) and is_trans(ra.dst)):
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                "inhibitor arc must go from a place to a transition"))
            return None
    elif ra.op == "->>":
        kind = ArcKind.RESET
        if not (is_place(ra.src) and is_trans(ra.dst)):
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                "reset arc must go from a place to a transition"))
            return None
    else:  # "-<>"
        kind = ArcKind.TIMING
        if not (is_trans(ra.src) and is_trans(ra.dst)):
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                "timing arc must connect two transitions"))
            return None

    if kind is ArcKind.TIMING:
        if ra.timing_param is None:
            diags.append(Diagnostic(ra.pos.line, ra.pos.col,
                                    "timing arc requires a timing parameter"))
            return None
        if ra.timing_param not in timing_params:
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                f"undeclared timing parameter '{ra.timing_param}'"))
            return None
    elif ra.timing_param is not None:
        diags.append(Diagnostic(
            ra.pos.line, ra.pos.col,
            f"only timing arcs may carry a parameter, not '{ra.op}'"))
        return None

    scope = Scope.SAME_INSTANCE
    if ra.scope_tag is not None:
        scope = {s.value: s for s in Scope}[ra.scope_tag]
        if scope is not Scope.SAME_INSTANCE and kind not in (
                ArcKind.TIMING, ArcKind.RESET):
            diags.append(Diagnostic(
                ra.pos.line, ra.pos.col,
                f"scope qualifier '@{ra.scope_tag}' is only allowed on "
                "timing and reset arcs"))
            return None

    return ArcDecl(kind=kind, src=ra.src, dst=ra.dst, owner=ra.owner,
                   timing_param=ra.timing_param, scope=scope,
                   pos=ra.pos)


def parse(source_text):
    """Parse DRAMml text into a validated NetSpec."""
    tokens = _tokenize(source_text)
    parser = _Parser(tokens)
    standard, hierarchies = parser.parse_document()
    return _validate(standard, hierarchies, parser.places, parser.transitions,
                     parser.arcs, parser.timing_params)


# ---------------------------------------------------------------------------
# Renderer

def render(spec):
    """Render a NetSpec back to DRAMml text (deterministic layout)."""
    out = []

    def emit(depth, text):
        out.append("    " * depth + text)

    emit(0, f"Standard {spec.standard_name} {{")

    def emit_level(owner, depth, nodes):
        if owner == () and spec.timing_params:
            emit(depth, "Timings {")
            for name in spec.timing_params:
                emit(depth + 1, f"{name};")
            emit(depth, "}")
        places_here = [p for p in spec.places if p.owner == owner]
        if places_here:
            emit(depth, "Places {")
            for p in places_here:
                annots = ""
                if p.capacity is not None:
                    annots += f" capacity({p.capacity})"
                if p.lifetime is not None:
                    annots += f" lifetime({p.lifetime})"
                if p.initial_tokens:
                    annots += f" initial({p.initial_tokens})"
                emit(depth + 1, f"{p.name}{annots};")
            emit(depth, "}")
        trans_here = [t for t in spec.transitions if t.owner == owner]
        if trans_here:
            emit(depth, "Transitions {")
            for t in trans_here:
                emit(depth + 1, f"{t.name};")
            emit(depth, "}")
        arcs_here = [a for a in spec.arcs if a.owner == owner]
        if arcs_here:
            emit(depth, "Arcs {")
            for a in arcs_here:
                text = f"{a.src} {ARC_OPERATORS[a.kind]} {a.dst}"
                if a.timing_param is not None:
                    text += f" ({a.timing_param})"
                if a.scope is not Scope.SAME_INSTANCE:
                    text += f" @{a.scope.value}"
                emit(depth + 1, text + ";")
            emit(depth, "}")
        for node in nodes:
            emit(depth, f"{node.instance_count_param} : {node.name} {{")
            emit_level(owner + (node.name,), depth + 1, node.children)
            emit(depth, "}")

    emit_level((), 1, spec.hierarchies)
    emit(0, "}")
    return "\n".join(out) + "\n"
