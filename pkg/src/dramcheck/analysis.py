"""Performance-limit sweep and cross-standard property diff.

The sweep asks, per timing property, how many extra cycles could be added
to its minimum timing before the trace corpus violates it; surviving
increments point at controller-side timing overestimation.  The diff
classifies two property sets into unchanged / timing-changed / added /
removed / feature-discarded partitions to scope an upgrade.

The corpus can only establish observed lower bounds on command spacing;
it cannot prove that minimum-distance issuing is ever achieved.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional

from .core import Config, elaborate
from .propgen import PropertySet, derive
from .traces import Status, check, merge_reports


@dataclass(frozen=True)
class SlackEntry:
    unique_id: str
    base_timing: int
    max_surviving_increment: int  # largest k with the +k property holding
    activation_count: int
    candidate_overestimation: bool
    min_observed_gap: Optional[int]
    utilization: Optional[Fraction]  # base/(base+k) bus-cycle share
    note: str = ""


@dataclass(frozen=True)
class SlackSweepResult:
    entries: tuple  # ordered by unique_id
    k_max: int
    excluded_not_activated: tuple
    unconstrained: tuple  # activated but no source->target pair observed

    def survivors_at(self, k):
        return [e for e in self.entries if e.max_surviving_increment >= k]

    def candidates(self):
        return [e for e in self.entries if e.candidate_overestimation]


def slack_sweep(props: PropertySet, corpus, k_max: int,
                method: str = "analytic") -> SlackSweepResult:
    """Sweep every activated TIMING property over increments 1..k_max.

    `corpus` is a non-empty iterable of CommandTrace.  The analytic method
    reads the surviving increment off the minimum observed gap; the rerun
    method re-derives the property set at each increment and re-checks the
    corpus (same result, used for differential testing).
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus must be non-empty")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    report = merge_reports(check(props, t) for t in corpus)
    timing_props = [p for p in props.properties if p.kind == "TIMING"]

    excluded = tuple(sorted(
        p.unique_id for p in timing_props
        if report.verdicts[p.unique_id].status is Status.NOT_ACTIVATED))
    unconstrained = tuple(sorted(
        p.unique_id for p in timing_props
        if report.verdicts[p.unique_id].status is not Status.NOT_ACTIVATED
        and report.verdicts[p.unique_id].min_gap is None))

    if method == "rerun":
        survive = _rerun_survivors(props, corpus, k_max)
    elif method != "analytic":
        raise ValueError(f"unknown sweep method {method!r}")

    entries = []
    for p in sorted(timing_props, key=lambda p: p.unique_id):
        v = report.verdicts[p.unique_id]
        if v.status is Status.NOT_ACTIVATED or v.min_gap is None:
            continue
        slack = v.min_gap - p.timing_value
        if slack < 0:
            k = 0  # already violated at the base timing
            note = "violated at base timing"
        else:
            k = min(slack, k_max)
            note = ""
        if method == "rerun":
            k = survive[p.unique_id]
            note = note or ""
        candidate = k >= 1 and v.activation_count > 0
        utilization = (Fraction(p.timing_value, p.timing_value + k)
                       if candidate else None)
        if candidate:
            note = (f"commands spaced {k} cycle(s) wider than required; "
                    f"worst-case bus share {utilization}")
        entries.append(SlackEntry(
            unique_id=p.unique_id, base_timing=p.timing_value,
            max_surviving_increment=k,
            activation_count=v.activation_count,
            candidate_overestimation=candidate,
            min_observed_gap=v.min_gap,
            utilization=utilization, note=note))

    return SlackSweepResult(entries=tuple(entries), k_max=k_max,
                            excluded_not_activated=excluded,
                            unconstrained=unconstrained)


def _rerun_survivors(props, corpus, k_max):
    """Max surviving increment by re-deriving at each bumped timing."""
    net = props.net
    survive = {p.unique_id: 0 for p in props.properties
               if p.kind == "TIMING"}
    for k in range(1, k_max + 1):
        bumped = Config(
            standard_name=net.cfg.standard_name,
            instance_counts=dict(net.cfg.instance_counts),
            timing_values={name: v + k
                           for name, v in net.cfg.timing_values.items()})
        bprops = derive(elaborate(net.spec, bumped))
        rep = merge_reports(check(bprops, t) for t in corpus)
        for uid in survive:
            v = rep.verdicts[uid]
            if v.status is Status.HOLDS and survive[uid] == k - 1:
                survive[uid] = k
    return survive


# ---------------------------------------------------------------------------
# Upgrade diff


@dataclass(frozen=True)
class DiffEntry:
    key: tuple
    base_id: Optional[str]
    target_id: Optional[str]
    base_timing: Optional[int] = None
    target_timing: Optional[int] = None


@dataclass(frozen=True)
class UpgradeDiff:
    unchanged: tuple
    timing_changed: tuple
    added_in_target: tuple
    removed_from_target: tuple
    discarded: tuple

    def all_entries(self):
        return (self.unchanged + self.timing_changed + self.added_in_target
                + self.removed_from_target + self.discarded)


def _match_key(prop, rename):
    canon = tuple(rename.get(e, e) for e in prop.endpoints)
    level = prop.scope_path[-1] if prop.scope_path else ""
    return (prop.kind, canon, prop.qualifier.value, level)


def upgrade_diff(base: PropertySet, target: PropertySet,
                 unsupported_features=(),
                 rename: Optional[Mapping[str, str]] = None) -> UpgradeDiff:
    """Partition the union of both unique property sets.

    `rename` maps target-standard command/place names onto the base
    standard's vocabulary before matching.  Properties touching a command
    kind listed in `unsupported_features` (after renaming) are moved to
    the discarded partition before matching.
    """
    rename = dict(rename or {})
    unsupported = {rename.get(k, k) for k in unsupported_features}

    def index(props, apply_rename):
        table = {}
        for p in props.properties:
            key = _match_key(p, rename if apply_rename else {})
            if key in table:
                # same endpoints/scope twice: disambiguate by timing param
                key = key + (p.timing_param,)
            table[key] = p
        return table

    base_idx = index(base, False)
    target_idx = index(target, True)

    def touches_unsupported(prop, apply_rename):
        kinds = [rename.get(k, k) if apply_rename else k
                 for k in prop.command_kinds]
        return any(k in unsupported for k in kinds)

    unchanged, changed, added, removed, discarded = [], [], [], [], []
    for key in sorted(set(base_idx) | set(target_idx)):
        b = base_idx.get(key)
        t = target_idx.get(key)
        entry = DiffEntry(
            key=key,
            base_id=b.unique_id if b else None,
            target_id=t.unique_id if t else None,
            base_timing=b.timing_value if b else None,
            target_timing=t.timing_value if t else None)
        if ((b and touches_unsupported(b, False))
                or (t and touches_unsupported(t, True))):
            discarded.append(entry)
        elif b and t:
            if (b.kind == "TIMING" or b.kind == "WINDOW") and \
                    b.timing_value != t.timing_value:
                changed.append(entry)
            else:
                unchanged.append(entry)
        elif t:
            added.append(entry)
        else:
            removed.append(entry)

    return UpgradeDiff(
        unchanged=tuple(unchanged), timing_changed=tuple(changed),
        added_in_target=tuple(added), removed_from_target=tuple(removed),
        discarded=tuple(discarded))
