"""Synthetic trace builders for tests, demos and differential checking."""

from __future__ import annotations

import random

from .core import (Command, ElaboratedNet, check_command, apply_command,
                   initial_state)
from .traces import CommandTrace, trace_from_commands


def random_trace(net: ElaboratedNet, rng: random.Random, length: int,
                 p_legal: float = 0.7, max_gap: int = None) -> CommandTrace:
    """Random mixed legal/illegal trace.

    With probability p_legal the next command is drawn from the currently
    legal ones (falling back to a random pick if none is found quickly);
    otherwise any command at all may be issued.
    """
    if max_gap is None:
        max_gap = max(2, net.max_wait // 2)
    state = initial_state(net)
    keys = net.transition_keys
    commands = []
    cycle = 0
    for _ in range(length):
        cycle += rng.randint(1, max_gap)
        cmd = None
        if rng.random() < p_legal:
            for _ in range(8):
                kind, coords = rng.choice(keys)
                cand = Command(cycle=cycle, kind=kind, coords=coords)
                if not check_command(net, state, cand):
                    cmd = cand
                    break
        if cmd is None:
            kind, coords = rng.choice(keys)
            cmd = Command(cycle=cycle, kind=kind, coords=coords)
        apply_command(net, state, cmd)
        commands.append(cmd)
    return trace_from_commands(net, commands)


def act_dense_trace(net: ElaboratedNet, rng: random.Random,
                    length: int) -> CommandTrace:
    """Activate-heavy trace for exercising the four-activate window."""
    bank_insts = [coords for kind, coords in net.transition_keys
                  if kind == "ACT"]
    commands = []
    cycle = 0
    for _ in range(length):
        cycle += rng.randint(1, 4)
        roll = rng.random()
        if roll < 0.75:
            commands.append(Command(cycle=cycle, kind="ACT",
                                    coords=rng.choice(bank_insts)))
        elif roll < 0.9:
            commands.append(Command(cycle=cycle, kind="PRE",
                                    coords=rng.choice(bank_insts)))
        else:
            rank = rng.randrange(net.counts["rank"])
            commands.append(Command(cycle=cycle, kind="PREA",
                                    coords=(rank,)))
    return trace_from_commands(net, commands)


def legal_trace(net: ElaboratedNet, rng: random.Random,
                length: int, max_tries: int = 64) -> CommandTrace:
    """All-legal trace built by rejection sampling over the net."""
    state = initial_state(net)
    keys = net.transition_keys
    commands = []
    cycle = 0
    while len(commands) < length:
        cycle += rng.randint(1, net.max_wait)
        for _ in range(max_tries):
            kind, coords = rng.choice(keys)
            cand = Command(cycle=cycle, kind=kind, coords=coords)
            if not check_command(net, state, cand):
                apply_command(net, state, cand)
                commands.append(cand)
                break
        else:
            cycle += net.max_wait  # wait out every timing constraint
    return trace_from_commands(net, commands)


def paced_commands(net: ElaboratedNet, plan) -> CommandTrace:
    """Trace from explicit (cycle, kind, coords) triples."""
    commands = [Command(cycle=c, kind=k, coords=tuple(x))
                for c, k, x in plan]
    return trace_from_commands(net, commands)
