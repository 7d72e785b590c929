"""Derivation of checkable properties from an elaborated net and their
rendering as SystemVerilog Assertion text.

Place-to-transition, inhibitor and timing arcs each produce one property;
timed-token capacity places produce windowed sequence properties.
Transition-to-place and reset arcs contribute state-update logic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .core import Config, ElaboratedNet
from .frontend import ArcKind, Scope


class PropertyGenError(Exception):
    pass


@dataclass(frozen=True)
class SignalMap:
    """Names binding generated properties to a controller's command bus."""

    clock: str = "clk"
    reset: str = "reset"
    command: str = "cmd"
    module_name: Optional[str] = None
    coords: Mapping[str, str] = field(default_factory=dict)

    def coord(self, hier):
        return self.coords.get(hier, f"cmd_{hier}")


@dataclass(frozen=True)
class Property:
    unique_id: str
    kind: str  # "ARC" | "INHIBITOR" | "TIMING" | "WINDOW"
    endpoints: tuple  # (place, trans) or (src_trans, dst_trans)
    scope_path: tuple  # hierarchy names the property instantiates over
    qualifier: Scope
    multiplicity: int
    command_kinds: tuple
    arc_identity: tuple
    timing_param: Optional[str] = None
    timing_value: Optional[int] = None
    window: Optional[tuple] = None  # (window cycles, max fire count)
    sva_text: str = field(default="", compare=False)


@dataclass(frozen=True)
class PropertySet:
    properties: tuple
    config: Config
    model_name: str
    net: ElaboratedNet = field(repr=False, compare=False, default=None)

    def by_id(self, uid):
        for p in self.properties:
            if p.unique_id == uid:
                return p
        raise KeyError(uid)

    def by_identity(self):
        return {p.arc_identity: p for p in self.properties}


def count_summary(props: PropertySet):
    """(generated, unique) totals; generated sums instance expansions."""
    generated = sum(p.multiplicity for p in props.properties)
    return generated, len(props.properties)


# ---------------------------------------------------------------------------
# Derivation


def _require_prefix_related(a, b, what):
    d = min(len(a), len(b))
    if a[:d] != b[:d]:
        raise PropertyGenError(
            f"{what}: hierarchy paths {a} and {b} are not nested")


def derive(net: ElaboratedNet) -> PropertySet:
    spec = net.spec
    drafts = []

    for arc in spec.arcs:
        if arc.kind is ArcKind.P2T:
            pl = net.place_level[arc.src]
            tr = net.transition_level[arc.dst]
            _require_prefix_related(pl, tr, f"arc {arc.src} -> {arc.dst}")
            scope = pl if len(pl) > len(tr) else tr
            drafts.append(dict(
                base=f"arc_{arc.src}_{arc.dst}", kind="ARC",
                endpoints=(arc.src, arc.dst), scope_path=scope,
                qualifier=Scope.SAME_INSTANCE,
                multiplicity=net.count_at(scope),
                command_kinds=(arc.dst,), arc_identity=arc.identity()))
        elif arc.kind is ArcKind.INHIBITOR:
            pl = net.place_level[arc.src]
            tr = net.transition_level[arc.dst]
            _require_prefix_related(pl, tr, f"arc {arc.src} -o {arc.dst}")
            drafts.append(dict(
                base=f"inhibitor_{arc.src}_{arc.dst}", kind="INHIBITOR",
                endpoints=(arc.src, arc.dst), scope_path=pl,
                qualifier=Scope.SAME_INSTANCE,
                multiplicity=net.count_at(pl),
                command_kinds=(arc.dst,), arc_identity=arc.identity()))
        elif arc.kind is ArcKind.TIMING:
            value = net.timing_values[arc.timing_param]
            if value < 1:
                raise PropertyGenError(
                    f"timing value for {arc.timing_param} must be >= 1")
            src_d = len(net.transition_level[arc.src])
            dst_d = len(net.transition_level[arc.dst])
            s = len(arc.owner)
            if arc.scope is Scope.SIBLING_INSTANCE:
                scope = arc.owner
                n = net.counts[scope[-1]]
                mult = net.count_at(scope[:-1]) * n * (n - 1)
            elif arc.scope is Scope.ALL_INSTANCES:
                scope = ()
                mult = 1
            else:
                scope = arc.owner[:min(s, src_d, dst_d)]
                mult = net.count_at(scope)
            kinds = (arc.src,) if arc.src == arc.dst else (arc.src, arc.dst)
            drafts.append(dict(
                base=f"timing_{arc.src}_{arc.dst}", kind="TIMING",
                endpoints=(arc.src, arc.dst), scope_path=scope,
                qualifier=arc.scope, multiplicity=mult,
                command_kinds=kinds, arc_identity=arc.identity(),
                timing_param=arc.timing_param, timing_value=value))

    for place, feeders in net.window_places():
        window = net.timing_values[place.lifetime]
        for feeder in feeders:
            drafts.append(dict(
                base=f"window_{place.name}_{feeder}", kind="WINDOW",
                endpoints=(place.name, feeder), scope_path=place.owner,
                qualifier=Scope.SAME_INSTANCE,
                multiplicity=net.count_at(place.owner),
                command_kinds=(feeder,),
                arc_identity=("WINDOW", place.name, feeder,
                              place.lifetime, place.owner),
                timing_param=place.lifetime, timing_value=window,
                window=(window, place.capacity)))

    _assign_unique_ids(drafts)

    properties = []
    for d in drafts:
        base = d.pop("base")
        uid = d.pop("uid")
        prop = Property(unique_id=uid, **d)
        properties.append(prop)

    props = PropertySet(
        properties=tuple(properties), config=net.cfg,
        model_name=spec.standard_name, net=net)
    rendered = tuple(
        _with_sva(p, net, SignalMap()) for p in props.properties)
    return PropertySet(properties=rendered, config=net.cfg,
                       model_name=spec.standard_name, net=net)


def _assign_unique_ids(drafts):
    by_base = {}
    for d in drafts:
        by_base.setdefault(d["base"], []).append(d)
    for base, group in by_base.items():
        if len(group) == 1:
            group[0]["uid"] = base
            continue
        names = []
        for d in group:
            level = d["scope_path"][-1] if d["scope_path"] else "root"
            names.append(f"{base}_{d['qualifier'].value}_{level}")
        if len(set(names)) < len(names):
            names = [f"{n}_{d['timing_param']}" if d.get("timing_param")
                     else n for n, d in zip(names, group)]
        for d, name in zip(group, names):
            d["uid"] = name


def _with_sva(prop, net, sigmap):
    from dataclasses import replace
    return replace(prop, sva_text=render_property(prop, net, sigmap))


# ---------------------------------------------------------------------------
# SVA rendering


def _cmd_cond(net, sigmap, kind, depth, vars_by_level):
    """(cmd == KIND) plus coordinate comparisons down to depth levels."""
    path = net.transition_level[kind]
    terms = [f"({sigmap.command} == {kind})"]
    for level, hier in enumerate(path[:depth]):
        terms.append(f"({sigmap.coord(hier)} == {vars_by_level[level]})")
    return " && ".join(terms)


def _loop_vars(path, sibling_level=None):
    vars_ = [f"{h}_id" for h in path]
    if sibling_level is not None:
        vars_ = list(vars_)
    return vars_


def render_property(prop: Property, net: ElaboratedNet,
                    sigmap: SignalMap, indent=0) -> str:
    pad = " " * indent
    uid = prop.unique_id
    scope = prop.scope_path
    vars_ = [f"{h}_id" for h in scope]

    if prop.kind == "ARC":
        place, trans = prop.endpoints
        tdepth = min(len(net.transition_level[trans]), len(scope))
        cond = _cmd_cond(net, sigmap, trans, tdepth, vars_)
        body = (f"{cond} |-> ({place} >= 1'b1);")
        lines = _property_block(uid, body, sigmap, pad)
    elif prop.kind == "INHIBITOR":
        place, trans = prop.endpoints
        tdepth = min(len(net.transition_level[trans]), len(scope))
        cond = _cmd_cond(net, sigmap, trans, tdepth, vars_)
        body = f"({place} >= 1'b1) |-> not ({cond});"
        lines = _property_block(uid, body, sigmap, pad,
                                clocked_assert=True)
    elif prop.kind == "TIMING":
        src, dst = prop.endpoints
        if prop.qualifier is Scope.SIBLING_INSTANCE:
            cvars = list(vars_)
            cvars[-1] = f"{scope[-1]}_jd"
            a = _cmd_cond(net, sigmap, src, len(scope), vars_)
            c = _cmd_cond(net, sigmap, dst, len(scope), cvars)
        else:
            a = _cmd_cond(net, sigmap, src, len(scope), vars_)
            c = _cmd_cond(net, sigmap, dst, len(scope), vars_)
        body = (f"({a}) |->\n"
                f"{pad}            not ##[1:({prop.timing_param} - 1)] "
                f"({c});")
        lines = _property_block(uid, body, sigmap, pad)
        if prop.timing_value == 1:
            commented = []
            for line in lines.splitlines():
                stripped = line[len(pad):] if line.startswith(pad) else line
                commented.append(f"{pad}// {stripped}" if stripped else line)
            lines = (f"{pad}// vacuous: timing value 1 leaves the empty "
                     "window [1:0]\n" + "\n".join(commented))
    elif prop.kind == "WINDOW":
        place, trans = prop.endpoints
        tdepth = min(len(net.transition_level[trans]), len(scope))
        cond = _cmd_cond(net, sigmap, trans, tdepth, vars_)
        cap = prop.window[1]
        body = (f"({cond}) |->\n"
                f"{pad}            ((cycle_cnt - {place}_hist[{cap - 1}]) >= "
                f"{prop.timing_param});")
        lines = _property_block(uid, body, sigmap, pad)
    else:
        raise PropertyGenError(f"unknown property kind {prop.kind}")
    return lines


def _property_block(uid, body, sigmap, pad, clocked_assert=False):
    assert_arg = (f"@(posedge {sigmap.clock}) {uid}"
                  if clocked_assert else uid)
    return (
        f"{pad}property {uid};\n"
        f"{pad}    @(posedge {sigmap.clock}) disable iff ({sigmap.reset})\n"
        f"{pad}        {body}\n"
        f"{pad}endproperty\n"
        f"\n"
        f"{pad}assert property({assert_arg});"
    )


def _place_width_decl(place):
    if place.capacity is not None and place.capacity > 1:
        width = max(1, place.capacity.bit_length())
        return f"logic [{width - 1}:0] {place.name};"
    return f"logic {place.name};"


def _render_place_logic(place, net, sigmap, pad):
    """State variable and clocked update block for one place."""
    spec = net.spec
    name = place.name
    scope = place.owner
    vars_ = [f"{h}_id" for h in scope]

    t2p = [a.src for a in spec.arcs
           if a.kind is ArcKind.T2P and a.dst == name]
    p2t = [a.dst for a in spec.arcs
           if a.kind is ArcKind.P2T and a.src == name]
    resets = [a.dst for a in spec.arcs
              if a.kind is ArcKind.RESET and a.src == name]
    # self loops cancel out within the cycle and are elided
    self_loops = set(t2p) & set(p2t)
    t2p = [t for t in t2p if t not in self_loops]
    p2t = [t for t in p2t if t not in self_loops]

    def cond(kind):
        depth = min(len(net.transition_level[kind]), len(scope))
        return _cmd_cond(net, sigmap, kind, depth, vars_)

    if place.capacity is not None and place.lifetime is not None:
        # timed-token window place: fire-time history instead of a counter
        cap = place.capacity
        lines = [f"{pad}int {name}_hist [0:{cap - 1}];", ""]
        lines.append(f"{pad}always @(posedge {sigmap.clock}) begin")
        lines.append(f"{pad}    if ({sigmap.reset}) begin")
        for i in range(cap):
            lines.append(
                f"{pad}        {name}_hist[{i}] <= -{place.lifetime};")
        lines.append(f"{pad}    end")
        feeders = sorted(set(t2p) | self_loops)
        fire = " || ".join(f"({cond(k)})" for k in feeders)
        lines.append(f"{pad}    else if ({fire}) begin")
        for i in range(cap - 1, 0, -1):
            lines.append(
                f"{pad}        {name}_hist[{i}] <= {name}_hist[{i - 1}];")
        lines.append(f"{pad}        {name}_hist[0] <= cycle_cnt;")
        lines.append(f"{pad}    end")
        lines.append(f"{pad}end")
        return "\n".join(lines)

    reset_value = (f"{place.initial_tokens}" if place.initial_tokens
                   else "1'b0")
    lines = [f"{pad}{_place_width_decl(place)}", ""]
    lines.append(f"{pad}always @(posedge {sigmap.clock}) begin")
    lines.append(f"{pad}    if ({sigmap.reset})")
    lines.append(f"{pad}        {name} <= {reset_value};")
    lines.append(f"{pad}    else begin")
    first = True
    for kind in t2p:
        kw = "if" if first else "else if"
        first = False
        lines.append(f"{pad}        {kw} ({cond(kind)})")
        lines.append(f"{pad}            {name} <= {name} + 1'b1;")
    for kind in p2t:
        kw = "if" if first else "else if"
        first = False
        lines.append(f"{pad}        {kw} ({cond(kind)})")
        lines.append(f"{pad}            {name} <= {name} - 1'b1;")
    for kind in resets:
        kw = "if" if first else "else if"
        first = False
        lines.append(f"{pad}        {kw} ({cond(kind)})")
        lines.append(f"{pad}            {name} <= 1'b0;")
    lines.append(f"{pad}    end")
    lines.append(f"{pad}end")
    return "\n".join(lines)


def emit_sva(props: PropertySet, sigmap: Optional[SignalMap] = None) -> str:
    """Complete bindable SVA module for a derived PropertySet."""
    if sigmap is None:
        sigmap = SignalMap()
    net = props.net
    if net is None:
        raise PropertyGenError("PropertySet lost its elaborated net")
    spec = net.spec

    module = sigmap.module_name or f"{spec.standard_name.lower()}_protocol_props"
    hier_names = [p[-1] for p in net.paths if p]
    needs_cycle_cnt = any(p.kind == "WINDOW" for p in props.properties)

    out = []
    out.append(f"// {spec.standard_name} protocol properties")
    out.append("// format=1")
    cfg_echo = " ".join(
        f"{h}={net.counts[h]}" for h in hier_names)
    out.append(f"// standard={spec.standard_name} {cfg_echo}")
    out.append("// command encodings "
               f"({', '.join(net.kinds)}) are expected from the bound scope")
    ports = [f"    input logic {sigmap.clock}",
             f"    input logic {sigmap.reset}",
             f"    input logic [31:0] {sigmap.command}"]
    for h in hier_names:
        ports.append(f"    input logic [31:0] {sigmap.coord(h)}")
    out.append(f"module {module} (")
    out.append(",\n".join(ports))
    out.append(");")
    out.append("")
    for name in spec.timing_params:
        out.append(
            f"    localparam int {name} = {net.timing_values[name]};")
    out.append("")
    if needs_cycle_cnt:
        out.append("    int cycle_cnt;")
        out.append("")
        out.append(f"    always @(posedge {sigmap.clock}) begin")
        out.append(f"        if ({sigmap.reset})")
        out.append("            cycle_cnt <= 0;")
        out.append("        else")
        out.append("            cycle_cnt <= cycle_cnt + 1;")
        out.append("    end")
        out.append("")

    main_props = [p for p in props.properties
                  if p.qualifier is not Scope.SIBLING_INSTANCE]
    sibling_props = [p for p in props.properties
                     if p.qualifier is Scope.SIBLING_INSTANCE]

    def content_at(path, indent):
        pad = " " * indent
        blocks = []
        for place in spec.places:
            if place.owner == path:
                blocks.append(_render_place_logic(place, net, sigmap, pad))
        for p in main_props:
            if p.scope_path == path:
                blocks.append(render_property(p, net, sigmap, indent))
        return blocks

    # root-level content sits directly in the module body
    for block in content_at((), 4):
        out.append(block)
        out.append("")

    def walk(nodes, prefix, indent):
        lines = []
        pad = " " * indent
        for node in nodes:
            path = prefix + (node.name,)
            var = f"{node.name}_id"
            n = net.counts[node.name]
            lines.append(f"{pad}for ({var} = 0; {var} < {n}; "
                         f"{var}++) begin : g_{node.name}")
            for block in content_at(path, indent + 4):
                lines.append(block)
                lines.append("")
            lines.extend(walk(node.children, path, indent + 4))
            if lines[-1] == "":
                lines.pop()
            lines.append(f"{pad}end")
        return lines

    if spec.hierarchies:
        for h in hier_names:
            out.append(f"    genvar {h}_id;")
        sib_levels = sorted({p.scope_path[-1] for p in sibling_props})
        for h in sib_levels:
            out.append(f"    genvar {h}_jd;")
        out.append("")
        out.append("    generate")
        out.extend(walk(spec.hierarchies, (), 8))
        out.append("    endgenerate")
        out.append("")

    for p in sibling_props:
        out.append("    generate")
        lines = []
        indent = 8
        for h in p.scope_path[:-1]:
            pad = " " * indent
            var = f"{h}_id"
            lines.append(f"{pad}for ({var} = 0; {var} < {net.counts[h]}; "
                         f"{var}++) begin : g_{p.unique_id}_{h}")
            indent += 4
        level = p.scope_path[-1]
        n = net.counts[level]
        pad = " " * indent
        lines.append(f"{pad}for ({level}_id = 0; {level}_id < {n}; "
                     f"{level}_id++) begin : g_{p.unique_id}_a")
        lines.append(f"{pad}    for ({level}_jd = 0; {level}_jd < {n}; "
                     f"{level}_jd++) begin : g_{p.unique_id}_b")
        lines.append(f"{pad}        if ({level}_id != {level}_jd) begin")
        lines.append(render_property(p, net, sigmap, indent + 12))
        lines.append(f"{pad}        end")
        lines.append(f"{pad}    end")
        lines.append(f"{pad}end")
        indent -= 4
        for h in reversed(p.scope_path[:-1]):
            pad = " " * indent
            lines.append(f"{pad}end")
            indent -= 4
        out.extend(lines)
        out.append("    endgenerate")
        out.append("")

    out.append("endmodule")
    return "\n".join(out) + "\n"
