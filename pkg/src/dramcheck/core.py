"""Timed Petri net core: elaboration, cycle-accurate execution, exploration.

The elaborated net is the legality oracle for DRAM command traces.  A
NetSpec plus a Config is flattened into per-instance places/transitions;
commands are then checked and applied one per clock cycle.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .frontend import ArcKind, NetSpec, Scope


class CoreError(Exception):
    pass


class ElaborationError(CoreError):
    pass


class CommandError(CoreError):
    pass


@dataclass(frozen=True)
class Config:
    """Binds a NetSpec's hierarchy counts and timing parameters."""

    standard_name: str
    instance_counts: Mapping[str, int]
    timing_values: Mapping[str, int]


@dataclass(frozen=True)
class Command:
    cycle: int
    kind: str
    coords: tuple  # instance indices down to the transition's hierarchy level

    def __str__(self):
        coords = " ".join(str(c) for c in self.coords)
        return f"{self.cycle} {self.kind} {coords}".rstrip()


@dataclass(frozen=True)
class Violation:
    code: str  # "no-token" | "inhibited" | "window" | "timing"
    message: str
    arc_identity: tuple

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class StepResult:
    command: Command
    violations: tuple

    @property
    def legal(self):
        return not self.violations


@dataclass(frozen=True)
class _TimingRule:
    src_kind: str
    qualifier: Scope
    scope_depth: int  # effective prefix depth for the aggregate lookup
    cycles: int
    arc_identity: tuple


class ElaboratedNet:
    """Flat per-instance net; immutable after construction."""

    def __init__(self, spec: NetSpec, cfg: Config):
        self.spec = spec
        self.cfg = cfg
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self):
        spec, cfg = self.spec, self.cfg

        self.paths = spec.hierarchy_paths()
        self.counts = {}
        for path in self.paths:
            if not path:
                continue
            name = path[-1]
            if name not in cfg.instance_counts:
                raise ElaborationError(
                    f"hierarchy '{name}' has no bound instance count")
            n = cfg.instance_counts[name]
            if n < 1:
                raise ElaborationError(
                    f"hierarchy '{name}' instance count must be >= 1, got {n}")
            self.counts[name] = n

        self.timing_values = {}
        for name in spec.timing_params:
            if name not in cfg.timing_values:
                raise ElaborationError(
                    f"timing parameter '{name}' has no bound value")
            v = cfg.timing_values[name]
            if v < 1:
                raise ElaborationError(
                    f"timing parameter '{name}' must be >= 1, got {v}")
            self.timing_values[name] = v

        self.place_level = {p.name: p.owner for p in spec.places}
        self.transition_level = {t.name: t.owner for t in spec.transitions}
        self.kinds = tuple(t.name for t in spec.transitions)
        self.places_meta = {p.name: p for p in spec.places}

        # flat instance tables, ordered by hierarchy path then index
        self.place_ids = {}
        self.place_names = []
        self.place_coords = []
        for p in spec.places:
            for coords in self.instances(p.owner):
                pid = len(self.place_names)
                self.place_ids[(p.name, coords)] = pid
                self.place_names.append(p.name)
                self.place_coords.append(coords)

        self.transition_ids = {}
        self.transition_keys = []
        for t in spec.transitions:
            for coords in self.instances(t.owner):
                tid = len(self.transition_keys)
                self.transition_ids[(t.name, coords)] = tid
                self.transition_keys.append((t.name, coords))

        n_tids = len(self.transition_keys)
        self.p2t = [[] for _ in range(n_tids)]
        self.t2p = [[] for _ in range(n_tids)]
        self.inhibit = [[] for _ in range(n_tids)]
        self.reset = [[] for _ in range(n_tids)]
        self.timing_rules = {kind: [] for kind in self.kinds}
        self.structural_arc_of = {}  # (list-name, tid, pid) -> arc identity

        for arc in spec.arcs:
            if arc.kind is ArcKind.TIMING:
                self._compile_timing(arc)
            else:
                self._expand_structural(arc)

        self.max_wait = max(
            list(self.timing_values.values()) or [1])

    def instances(self, path):
        """Coordinate tuples for one hierarchy path, in stable order."""
        ranges = [range(self.counts[name]) for name in path]
        return [tuple(c) for c in itertools.product(*ranges)]

    def count_at(self, path):
        n = 1
        for name in path:
            n *= self.counts[name]
        return n

    def _expand_structural(self, arc):
        if arc.kind is ArcKind.T2P:
            trans, place = arc.src, arc.dst
        else:
            place, trans = arc.src, arc.dst
        pl_path = self.place_level[place]
        tr_path = self.transition_level[trans]
        target = {ArcKind.P2T: self.p2t, ArcKind.T2P: self.t2p,
                  ArcKind.INHIBITOR: self.inhibit,
                  ArcKind.RESET: self.reset}[arc.kind]
        s = len(arc.owner)
        for coords in self.instances(tr_path):
            tid = self.transition_ids[(trans, coords)]
            for pc in self.instances(pl_path):
                if self._match(coords, pc, arc.scope, s):
                    pid = self.place_ids[(place, pc)]
                    target[tid].append(pid)
                    self.structural_arc_of[(arc.kind.value, tid, pid)] = \
                        arc.identity()

    @staticmethod
    def _match(a, b, scope, s):
        if scope is Scope.ALL_INSTANCES:
            return True
        if scope is Scope.SIBLING_INSTANCE:
            if len(a) < s or len(b) < s:
                return False
            return a[:s - 1] == b[:s - 1] and a[s - 1] != b[s - 1]
        # same-instance: agreement on the common coordinate prefix
        d = min(len(a), len(b))
        return a[:d] == b[:d]

    def _compile_timing(self, arc):
        src_depth = len(self.transition_level[arc.src])
        dst_depth = len(self.transition_level[arc.dst])
        s = len(arc.owner)
        if arc.scope is Scope.SIBLING_INSTANCE:
            if src_depth < s or dst_depth < s or s < 1:
                raise ElaborationError(
                    f"sibling timing arc {arc.src} -<> {arc.dst} requires "
                    "both transitions at or below the declaring hierarchy")
            depth = s
        elif arc.scope is Scope.ALL_INSTANCES:
            depth = 0
        else:
            depth = min(s, src_depth, dst_depth)
        self.timing_rules[arc.dst].append(_TimingRule(
            src_kind=arc.src, qualifier=arc.scope, scope_depth=depth,
            cycles=self.timing_values[arc.timing_param],
            arc_identity=arc.identity()))

    # -- window (timed-token capacity) places -------------------------------

    def window_places(self):
        """(place, feeding transition kinds) for capacity+lifetime places."""
        result = []
        for p in self.spec.places:
            if p.capacity is None or p.lifetime is None:
                continue
            feeders = [a.src for a in self.spec.arcs
                       if a.kind is ArcKind.T2P and a.dst == p.name]
            if feeders:
                result.append((p, tuple(feeders)))
        return result

    # -- command validation --------------------------------------------------

    def resolve(self, cmd: Command):
        if cmd.kind not in self.transition_level:
            raise CommandError(f"unknown command kind '{cmd.kind}'")
        path = self.transition_level[cmd.kind]
        if len(cmd.coords) != len(path):
            raise CommandError(
                f"command {cmd.kind} expects {len(path)} coordinate(s) "
                f"({'/'.join(path) or 'none'}), got {len(cmd.coords)}")
        for name, idx in zip(path, cmd.coords):
            if not 0 <= idx < self.counts[name]:
                raise CommandError(
                    f"{cmd.kind} coordinate {name}={idx} out of range "
                    f"[0, {self.counts[name]})")
        return self.transition_ids[(cmd.kind, cmd.coords)]


class MarkingState:
    """Mutable marking plus per-transition firing history.

    Confined to one evaluation context; clone() for branching search.
    """

    def __init__(self, net: ElaboratedNet):
        self.net = net
        self.tokens = [0] * len(net.place_names)
        self.timed = {}  # pid -> list of token expiry cycles
        for pid, name in enumerate(net.place_names):
            meta = net.places_meta[name]
            if meta.initial_tokens:
                self.tokens[pid] = meta.initial_tokens
            if meta.lifetime is not None:
                self.timed[pid] = []
        # most recent fire cycle per (kind, coordinate prefix)
        self.last_fire = {}
        # two most recent fires with distinct indices per (kind, prefix, level)
        self.sibling_fire = {}
        self.cycle = -1

    def clone(self):
        c = MarkingState.__new__(MarkingState)
        c.net = self.net
        c.tokens = list(self.tokens)
        c.timed = {pid: list(v) for pid, v in self.timed.items()}
        c.last_fire = dict(self.last_fire)
        c.sibling_fire = dict(self.sibling_fire)
        c.cycle = self.cycle
        return c

    def live_tokens(self, pid, cycle):
        n = self.tokens[pid]
        expiries = self.timed.get(pid)
        if expiries:
            if any(e <= cycle for e in expiries):
                expiries[:] = [e for e in expiries if e > cycle]
            n += len(expiries)
        return n


def initial_state(net: ElaboratedNet):
    return MarkingState(net)


def check_command(net: ElaboratedNet, state: MarkingState, cmd: Command):
    """Legality of cmd in the current state; does not mutate the marking."""
    tid = net.resolve(cmd)
    cycle = cmd.cycle
    violations = []

    for pid in net.p2t[tid]:
        if state.live_tokens(pid, cycle) < 1:
            violations.append(Violation(
                "no-token",
                f"{cmd.kind}{cmd.coords} requires a token in "
                f"{net.place_names[pid]}{net.place_coords[pid]}",
                net.structural_arc_of[("P2T", tid, pid)]))
    for pid in net.inhibit[tid]:
        if state.live_tokens(pid, cycle) >= 1:
            violations.append(Violation(
                "inhibited",
                f"{cmd.kind}{cmd.coords} inhibited by token in "
                f"{net.place_names[pid]}{net.place_coords[pid]}",
                net.structural_arc_of[("INHIBITOR", tid, pid)]))
    for pid in net.t2p[tid]:
        meta = net.places_meta[net.place_names[pid]]
        if meta.capacity is not None and meta.lifetime is not None:
            if state.live_tokens(pid, cycle) >= meta.capacity:
                window = net.timing_values[meta.lifetime]
                violations.append(Violation(
                    "window",
                    f"{cmd.kind}{cmd.coords} exceeds {meta.capacity} fires "
                    f"per {window}-cycle window of "
                    f"{net.place_names[pid]}{net.place_coords[pid]}",
                    ("WINDOW", net.place_names[pid], cmd.kind,
                     meta.lifetime, meta.owner)))

    for rule in net.timing_rules[cmd.kind]:
        last = _lookup_last_fire(state, rule, cmd.coords)
        if last is not None and cycle - last < rule.cycles:
            violations.append(Violation(
                "timing",
                f"{rule.src_kind}@{last} -> {cmd.kind}@{cycle} closer than "
                f"{rule.cycles} cycles",
                rule.arc_identity))
    return violations


def _lookup_last_fire(state, rule, coords):
    if rule.qualifier is Scope.SIBLING_INSTANCE:
        s = rule.scope_depth
        entry = state.sibling_fire.get(
            (rule.src_kind, coords[:s - 1], s))
        if entry is None:
            return None
        c1, i1, c2, i2 = entry
        own = coords[s - 1]
        if i1 != own:
            return c1
        if i2 is not None and i2 != own:
            return c2
        return None
    prefix = coords[:rule.scope_depth]
    return state.last_fire.get((rule.src_kind, prefix))


def apply_command(net: ElaboratedNet, state: MarkingState, cmd: Command):
    """State update for cmd; applied regardless of legality."""
    tid = net.resolve(cmd)
    cycle = cmd.cycle

    for pid in net.p2t[tid]:
        expiries = state.timed.get(pid)
        if expiries:
            expiries.remove(min(expiries))
        elif state.tokens[pid] > 0:
            state.tokens[pid] -= 1
    for pid in net.t2p[tid]:
        meta = net.places_meta[net.place_names[pid]]
        if meta.lifetime is not None:
            state.timed[pid].append(cycle + net.timing_values[meta.lifetime])
        else:
            state.tokens[pid] += 1
    for pid in net.reset[tid]:
        state.tokens[pid] = 0
        if pid in state.timed:
            state.timed[pid].clear()

    coords = cmd.coords
    for d in range(len(coords) + 1):
        state.last_fire[(cmd.kind, coords[:d])] = cycle
    for level in range(1, len(coords) + 1):
        key = (cmd.kind, coords[:level - 1], level)
        idx = coords[level - 1]
        entry = state.sibling_fire.get(key)
        if entry is None or entry[1] == idx:
            prev = entry[2:] if entry else (None, None)
            state.sibling_fire[key] = (cycle, idx) + prev
        else:
            state.sibling_fire[key] = (cycle, idx, entry[0], entry[1])
    state.cycle = cycle


def step(net: ElaboratedNet, state: MarkingState, cmd: Command) -> StepResult:
    """Check-and-apply: observe-and-continue on violations."""
    if cmd.cycle <= state.cycle:
        raise CommandError(
            f"command cycle {cmd.cycle} not after current cycle {state.cycle} "
            "(one command per clock cycle)")
    violations = check_command(net, state, cmd)
    apply_command(net, state, cmd)
    return StepResult(command=cmd, violations=tuple(violations))


def run(net: ElaboratedNet, trace):
    """Fold step over a cycle-sorted command sequence from the initial state."""
    state = initial_state(net)
    return [step(net, state, cmd) for cmd in trace]


def elaborate(spec: NetSpec, cfg: Config) -> ElaboratedNet:
    return ElaboratedNet(spec, cfg)


# ---------------------------------------------------------------------------
# Reachability exploration


@dataclass(frozen=True)
class ReachabilitySummary:
    reachable: Mapping[str, bool]  # per transition kind
    witnesses: Mapping[str, tuple]  # kind -> Command sequence firing it
    explored_states: int
    complete: bool
    horizon: int


def explore(net: ElaboratedNet, horizon: int,
            state_bound: int = 100_000) -> ReachabilitySummary:
    """Which transition kinds admit some legal firing sequence.

    Breadth-first over markings, firing candidates spaced by the largest
    timing value so every minimum-separation constraint is met by
    construction.  Sound for "at least t cycles apart" constraints; a net
    that requires a token to be consumed before its lifetime expires may be
    reported unreachable even if a faster schedule exists.
    """
    if horizon < 0:
        raise CoreError("horizon must be >= 0")
    wait = net.max_wait
    reachable = {kind: False for kind in net.kinds}
    witnesses = {}

    start = initial_state(net)
    seen = {_state_key(start)}
    queue = deque([(start, 0, ())])
    explored = 0
    complete = True

    while queue and not all(reachable.values()):
        state, cycle, path = queue.popleft()
        if cycle > horizon:
            continue
        explored += 1
        if explored > state_bound:
            complete = False
            break
        for kind, coords in net.transition_keys:
            cmd = Command(cycle=cycle, kind=kind, coords=coords)
            if check_command(net, state, cmd):
                continue
            if not reachable[kind]:
                reachable[kind] = True
                witnesses[kind] = path + (cmd,)
            nxt = state.clone()
            apply_command(net, nxt, cmd)
            key = _state_key(nxt)
            if key not in seen:
                seen.add(key)
                queue.append((nxt, cycle + wait, path + (cmd,)))

    return ReachabilitySummary(
        reachable=reachable, witnesses=witnesses,
        explored_states=explored, complete=complete, horizon=horizon)


def _state_key(state):
    timed = tuple(sorted(
        (pid, tuple(sorted(e - state.cycle for e in exp if e > state.cycle)))
        for pid, exp in state.timed.items()))
    return (tuple(state.tokens), timed)
