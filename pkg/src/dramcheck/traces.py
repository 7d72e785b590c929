"""Command trace ingestion and property evaluation.

Traces are checked against the derived PropertySet under the
single-command-per-cycle interpretation.  Each property is evaluated
independently (its own activation count, first witness and observed
timing gaps); place values are maintained by the same update rules as
the Petri net core.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .core import Command, ElaboratedNet
from .frontend import Scope
from .propgen import PropertySet


class TraceError(Exception):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigMismatchError(TraceError):
    pass


class Status(Enum):
    HOLDS = "HOLDS"
    VIOLATED = "VIOLATED"
    NOT_ACTIVATED = "NOT_ACTIVATED"


@dataclass(frozen=True)
class CommandTrace:
    header: dict  # standard/count echo from the trace file
    commands: tuple  # tuple[Command]
    line_numbers: tuple = ()

    def __len__(self):
        return len(self.commands)


@dataclass(frozen=True)
class Witness:
    cycle: int
    command: str
    constraint: str


@dataclass
class PropertyVerdict:
    unique_id: str
    kind: str
    status: Status = Status.NOT_ACTIVATED
    activation_count: int = 0
    witness: Optional[Witness] = None
    min_gap: Optional[int] = None  # TIMING/WINDOW: smallest observed gap
    slack: Optional[int] = None  # min_gap - required cycles
    timing_value: Optional[int] = None
    command_kinds: tuple = ()


@dataclass(frozen=True)
class VerdictReport:
    model_name: str
    verdicts: dict  # unique_id -> PropertyVerdict
    trace_length: int
    kind_counts: dict = field(default_factory=dict)  # issued commands by kind

    def violated(self):
        return [v for v in self.verdicts.values()
                if v.status is Status.VIOLATED]

    def not_activated(self):
        return [v for v in self.verdicts.values()
                if v.status is Status.NOT_ACTIVATED]

    def counts(self):
        out = {s.value: 0 for s in Status}
        for v in self.verdicts.values():
            out[v.status.value] += 1
        return out


@dataclass(frozen=True)
class FeatureCoverageSummary:
    unexercised: tuple  # command kinds the corpus never issued
    issued_by_kind: dict
    inactive_properties_by_kind: dict


# ---------------------------------------------------------------------------
# Trace format


def load_trace(text, net: ElaboratedNet) -> CommandTrace:
    """Parse and validate the whitespace trace format against a net."""
    header = {}
    commands = []
    lines = []
    last_cycle = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and not line[0].isdigit():
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
            continue
        fields = line.split()
        try:
            cycle = int(fields[0])
        except ValueError:
            raise TraceError(f"malformed record {line!r}", lineno)
        if len(fields) < 2:
            raise TraceError(f"malformed record {line!r}", lineno)
        kind = fields[1]
        try:
            coords = tuple(int(f) for f in fields[2:])
        except ValueError:
            raise TraceError(f"malformed coordinates in {line!r}", lineno)
        if cycle <= last_cycle:
            raise TraceError(
                f"cycle {cycle} not after previous cycle {last_cycle} "
                "(cycles strictly increasing, one command per cycle)", lineno)
        last_cycle = cycle
        cmd = Command(cycle=cycle, kind=kind, coords=coords)
        try:
            net.resolve(cmd)
        except Exception as exc:
            raise TraceError(str(exc), lineno)
        commands.append(cmd)
        lines.append(lineno)

    _check_header(header, net)
    return CommandTrace(header=header, commands=tuple(commands),
                        line_numbers=tuple(lines))


def _check_header(header, net):
    std = header.get("standard")
    if std is not None and std != net.spec.standard_name:
        raise ConfigMismatchError(
            f"trace standard '{std}' does not match model "
            f"'{net.spec.standard_name}'")
    for name, count in net.counts.items():
        if name in header and int(header[name]) != count:
            raise ConfigMismatchError(
                f"trace declares {name}={header[name]} but the "
                f"configuration binds {name}={count}")


def render_trace(trace: CommandTrace) -> str:
    out = [f"{k}={v}" for k, v in trace.header.items()]
    out.extend(str(cmd) for cmd in trace.commands)
    return "\n".join(out) + "\n"


def trace_from_commands(net, commands, header=None) -> CommandTrace:
    hdr = {"format": "1", "standard": net.spec.standard_name}
    hdr.update({name: str(net.counts[name]) for name in net.counts})
    if header:
        hdr.update(header)
    for cmd in commands:
        net.resolve(cmd)
    return CommandTrace(header=hdr, commands=tuple(commands))


# ---------------------------------------------------------------------------
# Property evaluation


class _Evaluator:
    """Single forward pass evaluating every property of one PropertySet."""

    def __init__(self, props: PropertySet):
        self.props = props
        self.net = props.net
        net = self.net
        self.verdicts = {
            p.unique_id: PropertyVerdict(
                unique_id=p.unique_id, kind=p.kind,
                timing_value=p.timing_value, command_kinds=p.command_kinds)
            for p in props.properties}

        # dispatch tables keyed by triggering command kind
        self.arc_by_kind = {}
        self.inh_by_kind = {}
        self.timing_by_dst = {}
        self.timing_by_src = {}
        self.window_by_kind = {}
        self.inh_by_place = {}
        for p in props.properties:
            if p.kind == "ARC":
                self.arc_by_kind.setdefault(p.endpoints[1], []).append(p)
            elif p.kind == "INHIBITOR":
                self.inh_by_kind.setdefault(p.endpoints[1], []).append(p)
                self.inh_by_place.setdefault(p.endpoints[0], []).append(p)
            elif p.kind == "TIMING":
                self.timing_by_dst.setdefault(p.endpoints[1], []).append(p)
                self.timing_by_src.setdefault(p.endpoints[0], []).append(p)
            elif p.kind == "WINDOW":
                self.window_by_kind.setdefault(p.endpoints[1], []).append(p)

        # place state, same update rules as the core
        self.tokens = [0] * len(net.place_names)
        self.timed = {}
        for pid, name in enumerate(net.place_names):
            meta = net.places_meta[name]
            if meta.initial_tokens:
                self.tokens[pid] = meta.initial_tokens
                for p in self.inh_by_place.get(name, ()):
                    v = self.verdicts[p.unique_id]
                    v.activation_count += 1  # token present from reset
            if meta.lifetime is not None:
                self.timed[pid] = []
        self.last_fire = {}
        self.sibling_fire = {}
        self._pi_cache = {}

    def live(self, pid, cycle):
        n = self.tokens[pid]
        expiries = self.timed.get(pid)
        if expiries:
            if any(e <= cycle for e in expiries):
                expiries[:] = [e for e in expiries if e > cycle]
            n += len(expiries)
        return n

    def place_instances(self, place, coords):
        """pids of `place` whose coordinates share the command's prefix."""
        net = self.net
        depth = min(len(net.place_level[place]), len(coords))
        prefix = coords[:depth]
        key = (place, prefix)
        pids = self._pi_cache.get(key)
        if pids is None:
            pids = [pid for (name, pc), pid in net.place_ids.items()
                    if name == place and pc[:depth] == prefix]
            self._pi_cache[key] = pids
        return pids

    def _violate(self, prop, cmd, message):
        v = self.verdicts[prop.unique_id]
        if v.witness is None:
            v.witness = Witness(cycle=cmd.cycle, command=str(cmd),
                                constraint=message)
        v.status = Status.VIOLATED

    def _gap(self, prop, coords):
        net = self.net
        scope = prop.scope_path
        src = prop.endpoints[0]
        if prop.qualifier is Scope.SIBLING_INSTANCE:
            s = len(scope)
            entry = self.sibling_fire.get((src, coords[:s - 1], s))
            if entry is None:
                return None
            c1, i1, c2, i2 = entry
            own = coords[s - 1]
            if i1 != own:
                return c1
            if i2 is not None and i2 != own:
                return c2
            return None
        if prop.qualifier is Scope.ALL_INSTANCES:
            return self.last_fire.get((src, ()))
        depth = len(scope)
        return self.last_fire.get((src, coords[:depth]))

    def feed(self, cmd: Command):
        net = self.net
        cycle = cmd.cycle
        kind = cmd.kind
        coords = cmd.coords
        tid = net.resolve(cmd)

        for p in self.arc_by_kind.get(kind, ()):
            v = self.verdicts[p.unique_id]
            v.activation_count += 1
            place = p.endpoints[0]
            for pid in self.place_instances(place, coords):
                if self.live(pid, cycle) < 1:
                    self._violate(
                        p, cmd,
                        f"{kind} requires a token in {place}"
                        f"{net.place_coords[pid]}")
                    break

        for p in self.inh_by_kind.get(kind, ()):
            place = p.endpoints[0]
            for pid in self.place_instances(place, coords):
                if self.live(pid, cycle) >= 1:
                    self._violate(
                        p, cmd,
                        f"{kind} inhibited by token in {place}"
                        f"{net.place_coords[pid]}")
                    break

        for p in self.timing_by_dst.get(kind, ()):
            last = self._gap(p, coords)
            if last is not None:
                gap = cycle - last
                v = self.verdicts[p.unique_id]
                if v.min_gap is None or gap < v.min_gap:
                    v.min_gap = gap
                if gap < p.timing_value:
                    self._violate(
                        p, cmd,
                        f"{p.endpoints[0]}@{last} -> {kind}@{cycle} closer "
                        f"than {p.timing_value} cycles")

        for p in self.timing_by_src.get(kind, ()):
            self.verdicts[p.unique_id].activation_count += 1

        for p in self.window_by_kind.get(kind, ()):
            v = self.verdicts[p.unique_id]
            v.activation_count += 1
            window, cap = p.window
            place = p.endpoints[0]
            for pid in self.place_instances(place, coords):
                expiries = self.timed[pid]
                live = sorted(e for e in expiries if e > cycle)
                if len(live) >= cap:
                    gap = cycle - (live[-cap] - window)
                    if v.min_gap is None or gap < v.min_gap:
                        v.min_gap = gap
                    self._violate(
                        p, cmd,
                        f"more than {cap} {kind} fires within {window} "
                        f"cycles for {place}{net.place_coords[pid]}")

        self._apply(tid, cmd)

    def _apply(self, tid, cmd):
        net = self.net
        cycle = cmd.cycle
        for pid in net.p2t[tid]:
            expiries = self.timed.get(pid)
            if expiries:
                expiries.remove(min(expiries))
            elif self.tokens[pid] > 0:
                self.tokens[pid] -= 1
        for pid in net.t2p[tid]:
            meta = net.places_meta[net.place_names[pid]]
            if meta.lifetime is not None:
                self.timed[pid].append(
                    cycle + net.timing_values[meta.lifetime])
            else:
                was = self.tokens[pid]
                self.tokens[pid] += 1
                if was == 0:
                    for p in self.inh_by_place.get(
                            net.place_names[pid], ()):
                        self.verdicts[p.unique_id].activation_count += 1
        for pid in net.reset[tid]:
            self.tokens[pid] = 0
            if pid in self.timed:
                self.timed[pid].clear()

        coords = cmd.coords
        for d in range(len(coords) + 1):
            self.last_fire[(cmd.kind, coords[:d])] = cycle
        for level in range(1, len(coords) + 1):
            key = (cmd.kind, coords[:level - 1], level)
            idx = coords[level - 1]
            entry = self.sibling_fire.get(key)
            if entry is None or entry[1] == idx:
                prev = entry[2:] if entry else (None, None)
                self.sibling_fire[key] = (cycle, idx) + prev
            else:
                self.sibling_fire[key] = (cycle, idx, entry[0], entry[1])

    def finish(self):
        for p in self.props.properties:
            v = self.verdicts[p.unique_id]
            if v.status is Status.VIOLATED:
                pass
            elif v.activation_count == 0:
                v.status = Status.NOT_ACTIVATED
            else:
                v.status = Status.HOLDS
            if p.kind in ("TIMING", "WINDOW") and v.min_gap is not None:
                v.slack = v.min_gap - p.timing_value
        return self.verdicts


def check(props: PropertySet, trace: CommandTrace) -> VerdictReport:
    """Evaluate every property of `props` over the whole trace."""
    _check_header(trace.header, props.net)
    ev = _Evaluator(props)
    kind_counts = {kind: 0 for kind in props.net.kinds}
    for cmd in trace.commands:
        kind_counts[cmd.kind] += 1
        ev.feed(cmd)
    verdicts = ev.finish()
    ordered = {uid: verdicts[uid] for uid in sorted(verdicts)}
    return VerdictReport(model_name=props.model_name, verdicts=ordered,
                         trace_length=len(trace), kind_counts=kind_counts)


def merge_reports(reports) -> VerdictReport:
    """Corpus-level aggregate: verdicts combined across several traces."""
    reports = list(reports)
    if not reports:
        raise ValueError("at least one report required")
    merged = {}
    for rep in reports:
        for uid, v in rep.verdicts.items():
            m = merged.get(uid)
            if m is None:
                merged[uid] = PropertyVerdict(
                    unique_id=v.unique_id, kind=v.kind, status=v.status,
                    activation_count=v.activation_count, witness=v.witness,
                    min_gap=v.min_gap, slack=v.slack,
                    timing_value=v.timing_value,
                    command_kinds=v.command_kinds)
                continue
            m.activation_count += v.activation_count
            if v.min_gap is not None and (
                    m.min_gap is None or v.min_gap < m.min_gap):
                m.min_gap = v.min_gap
                m.slack = v.slack
            if v.status is Status.VIOLATED and m.status is not Status.VIOLATED:
                m.status = Status.VIOLATED
                m.witness = v.witness
            elif (m.status is Status.NOT_ACTIVATED
                  and v.status is Status.HOLDS):
                m.status = Status.HOLDS
    kind_counts = {}
    for rep in reports:
        for kind, n in rep.kind_counts.items():
            kind_counts[kind] = kind_counts.get(kind, 0) + n
    return VerdictReport(
        model_name=reports[0].model_name,
        verdicts={uid: merged[uid] for uid in sorted(merged)},
        trace_length=sum(r.trace_length for r in reports),
        kind_counts=kind_counts)


def coverage(report: VerdictReport, *more) -> FeatureCoverageSummary:
    """Command kinds the corpus never issued, plus per-kind vacuity evidence."""
    if more:
        report = merge_reports([report, *more])
    inactive = {}
    for v in report.verdicts.values():
        if v.status is Status.NOT_ACTIVATED:
            for kind in v.command_kinds:
                inactive.setdefault(kind, []).append(v.unique_id)
    unexercised = tuple(sorted(
        k for k, total in report.kind_counts.items() if total == 0))
    return FeatureCoverageSummary(
        unexercised=unexercised,
        issued_by_kind=dict(sorted(report.kind_counts.items())),
        inactive_properties_by_kind={
            k: tuple(sorted(v)) for k, v in sorted(inactive.items())})
