"""Deterministic churn-then-quiesce simulation.

Phase 1 applies randomly chosen enabled events of every kind under the fail
guard and base permanence. Phase 2 schedules only repair events, weakly
fairly, until no effective repair remains; the theorem says that point is the
ideal state and that it stays ideal.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .ident import RingParams
from .netstate import Network, Trace, TraceStep, init_network, network_to_dict, network_from_dict
from .events import (
    Event,
    EventKind,
    apply_event,
    apply_fail,
    apply_rectify,
    apply_stabilize_from_new_successor,
    apply_stabilize_from_old_successor,
    event_from_dict,
    event_to_dict,
    fail_guard_holds,
    is_enabled,
    join_precondition_holds,
)
from .invariants import conjuncts
from .measure import effective_enabled, total_error, visible_state
from .topology import is_ideal, structure

CHURN = "churn"
REPAIR = "repair"


class DivergenceError(Exception):
    """Phase 2 exceeded its step ceiling without quiescing."""


@dataclass(frozen=True)
class SimConfig:
    params: RingParams
    churn_steps: int
    seed: int
    base_ids: tuple[int, ...] | None = None
    join_weight: float = 2.0
    fail_weight: float = 1.0
    repair_weight: float = 3.0
    max_members: int | None = None
    fairness_window: int = 1
    step_ceiling: int = 10**6
    allow_base_fail: bool = False  # experimentation only; breaks the theorem's premise

    def __post_init__(self) -> None:
        if self.fairness_window < 1:
            raise ValueError("fairness window must be at least 1")
        if self.churn_steps < 0:
            raise ValueError("churn steps must be non-negative")


def _default_base(params: RingParams, rng: random.Random) -> tuple[int, ...]:
    k = params.r + 1
    # Spread the base around the ring, jittered but collision-free.
    step = params.space // k
    ids = [(i * step + rng.randrange(max(step // 2, 1))) % params.space for i in range(k)]
    while len(set(ids)) != k:
        ids = sorted(rng.sample(range(params.space), k))
    return tuple(sorted(set(ids)))


def _pick(rng: random.Random, items: list) -> object:
    return items[rng.randrange(len(items))]


def run_simulation(config: SimConfig) -> Trace:
    """Run churn then fair repair; returns the full tagged trace."""
    rng = random.Random(config.seed)
    params = config.params
    base = tuple(config.base_ids) if config.base_ids else _default_base(params, rng)
    net = init_network(params, base)
    steps: list[TraceStep] = []
    initial = net

    def record(ev: Event, post: Network, tag: str) -> Network:
        steps.append(TraceStep(event=ev, network=post, tag=tag))
        return post

    cap = config.max_members or params.space

    for _ in range(config.churn_steps):
        live = net.live_idents()
        joins: list[Event] = []
        if len(live) < cap:
            pending = [
                i
                for i in sorted(net.nodes)
                if not net.is_live(i) and net.nodes[i].pending_new_succ is not None
            ]
            for j in pending:
                target = net.nodes[j].pending_new_succ
                if not net.is_live(target) or join_precondition_holds(net, j, target):
                    # Completable, or a dead result that times out and clears.
                    joins.append(Event(EventKind.JOIN, j))
            fresh = [i for i in range(params.space) if not net.is_live(i)]
            fresh = [
                i
                for i in fresh
                if net.nodes.get(i) is None or net.nodes[i].pending_new_succ is None
            ]
            if fresh:
                j = _pick(rng, fresh)
                ev = Event(EventKind.JOIN_LOOKUP, j, known=_pick(rng, list(live)))
                if is_enabled(net, ev):
                    joins.append(ev)
        fails = [
            Event(EventKind.FAIL, n)
            for n in live
            if (config.allow_base_fail or n not in net.base) and fail_guard_holds(net, n)
        ]
        repairs: list[Event] = []
        for n in live:
            repairs.append(Event(EventKind.STABILIZE_FROM_OLD_SUCCESSOR, n))
            ev = Event(EventKind.STABILIZE_FROM_NEW_SUCCESSOR, n)
            if is_enabled(net, ev):
                repairs.append(ev)
        for p in live:
            head = net.node(p).succ_list[0]
            ev = Event(EventKind.RECTIFY, head, new_pred=p)
            if is_enabled(net, ev):
                repairs.append(ev)

        pools = [
            (config.join_weight, joins),
            (config.fail_weight, fails),
            (config.repair_weight, repairs),
        ]
        pools = [(w, p) for w, p in pools if p and w > 0]
        if not pools:
            break
        total_w = sum(w for w, _ in pools)
        roll = rng.random() * total_w
        pool: list[Event] = pools[-1][1]
        for w, p in pools:
            if roll < w:
                pool = p
                break
            roll -= w
        ev = _pick(rng, pool)
        if ev.kind is EventKind.FAIL:
            net = record(ev, apply_fail(net, ev.node, force=config.allow_base_fail), CHURN)
        else:
            net = record(ev, apply_event(net, ev), CHURN)

    # Phase 2: repair only, scheduled by bounded round-robin sweeps so every
    # enabled effective event fires within one sweep of the fairness window.
    applied = 0
    while effective_enabled(net):
        order = list(net.live_idents())
        rng.shuffle(order)
        for n in order:
            before = visible_state(net, n)
            post = apply_stabilize_from_old_successor(net, n)
            sfns = Event(EventKind.STABILIZE_FROM_NEW_SUCCESSOR, n)
            will_adopt = is_enabled(post, sfns)
            if visible_state(post, n) != before or will_adopt:
                net = record(Event(EventKind.STABILIZE_FROM_OLD_SUCCESSOR, n), post, REPAIR)
                applied += 1
                if will_adopt:
                    net = record(sfns, apply_stabilize_from_new_successor(net, n), REPAIR)
                    applied += 1
            head = net.node(n).succ_list[0]
            rect = Event(EventKind.RECTIFY, head, new_pred=n)
            if is_enabled(net, rect):
                target_before = visible_state(net, head)
                post = apply_rectify(net, head, n)
                if visible_state(post, head) != target_before:
                    net = record(rect, post, REPAIR)
                    applied += 1
            if applied > config.step_ceiling:
                raise DivergenceError(
                    f"repair phase exceeded {config.step_ceiling} steps"
                )

    return Trace(initial=initial, steps=tuple(steps))


def phase2_initial_error(trace: Trace) -> int:
    """Total error at the start of the repair-only phase."""
    net = trace.initial
    for step in trace.steps:
        if step.tag == REPAIR:
            break
        net = step.network
    return total_error(net)


def convergence_steps(trace: Trace) -> int:
    """Effective repair steps before the first ideal snapshot.

    Raises if the trace never reaches the ideal state or fails to stay there.
    """
    prev = trace.initial
    for step in trace.steps:
        if step.tag == REPAIR:
            break
        prev = step.network

    effective = 0
    converged_at: int | None = None
    repair_steps = [s for s in trace.steps if s.tag == REPAIR]
    for i, step in enumerate(repair_steps):
        changed = any(
            visible_state(prev, n) != visible_state(step.network, n)
            for n in step.network.live_idents()
        )
        if changed and converged_at is None:
            effective += 1
        if converged_at is None and is_ideal(step.network):
            converged_at = i
        elif converged_at is not None and not is_ideal(step.network):
            raise DivergenceError("network left the ideal state during repair")
        prev = step.network

    final = repair_steps[-1].network if repair_steps else trace.initial
    if converged_at is None and not is_ideal(final):
        raise DivergenceError("trace never reached the ideal state")
    return effective


# --- trace streaming ---------------------------------------------------------


def write_trace_jsonl(trace: Trace, path: str, snapshot_interval: int = 0) -> None:
    """Line-delimited trace: per-step summary records, full snapshots on an interval."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "type": "header",
            "initial": network_to_dict(trace.initial),
            "snapshotInterval": snapshot_interval,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i, step in enumerate(trace.steps, start=1):
            rec = {
                "type": "step",
                "step": i,
                "event": event_to_dict(step.event),
                "tag": step.tag,
                "totalError": total_error(step.network),
                "valid": conjuncts(step.network).valid,
                "ideal": is_ideal(step.network),
            }
            if snapshot_interval and (i % snapshot_interval == 0 or i == len(trace.steps)):
                rec["snapshot"] = network_to_dict(step.network)
                rec["structure"] = structure(step.network).to_dict()
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def replay_trace_jsonl(path: str) -> Trace:
    """Re-apply a streamed trace, checking any embedded snapshots bit-exactly."""
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    header = lines[0]
    net = network_from_dict(header["initial"])
    steps: list[TraceStep] = []
    initial = net
    for rec in lines[1:]:
        ev = event_from_dict(rec["event"])
        force = ev.kind is EventKind.FAIL and not is_enabled(net, ev)
        net = apply_event(net, ev, force=force)
        if "snapshot" in rec:
            expected = network_from_dict(rec["snapshot"])
            if expected != net:
                raise ValueError(f"snapshot mismatch at step {rec['step']}")
        steps.append(TraceStep(event=ev, network=net, tag=rec.get("tag")))
    return Trace(initial=initial, steps=tuple(steps))
