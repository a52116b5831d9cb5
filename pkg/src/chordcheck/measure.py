"""The pointer-error measure and the effective-repair predicates.

The total error of a network is the sum over all members and all r+1 pointer
roles of the per-pointer error. An ideal network has error zero. Effective
repair events are the state-changing stabilize and rectify steps that the
progress argument relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ident import between, clockwise_rank
from .netstate import Network
from .events import Event, EventKind
from .topology import best_successor

ROLE_PRED = "pred"


def succ_role(i: int) -> str:
    return f"succ{i}"


def _roles(r: int) -> list[str]:
    return [ROLE_PRED] + [succ_role(i) for i in range(1, r + 1)]


@dataclass(frozen=True)
class ErrorReport:
    per_pointer: dict[tuple[int, str], int]
    total: int


def pointer_error(net: Network, n: int, role: str) -> int:
    """Error of one pointer of one member.

    Predecessor and first successor score their clockwise rank distance from
    the globally correct target, s for a missing predecessor, s+1 for a dead
    target. A later successor scores 0 only when the first successor is live
    and the entry coincides with the matching entry of that successor's list.
    """
    if not net.is_live(n):
        raise ValueError(f"{n} is not a live member")
    state = net.node(n)
    s = net.size
    live = net.live
    if role == ROLE_PRED:
        v = state.pred
        if v is None:
            return s
        if v not in live:
            return s + 1
        return clockwise_rank(v, n, live)
    if role == succ_role(1):
        v = state.succ_list[0]
        if v not in live:
            return s + 1
        return clockwise_rank(n, v, live)
    idx = int(role[4:])
    v = state.succ_list[idx - 1]
    head = state.succ_list[0]
    if head in live and v == net.node(head).succ_list[idx - 2]:
        return 0
    return 1


def error_report(net: Network) -> ErrorReport:
    per: dict[tuple[int, str], int] = {}
    for n in net.live_idents():
        for role in _roles(net.params.r):
            per[(n, role)] = pointer_error(net, n, role)
    return ErrorReport(per_pointer=per, total=sum(per.values()))


def total_error(net: Network) -> int:
    return sum(
        pointer_error(net, n, role)
        for n in net.live
        for role in _roles(net.params.r)
    )


def visible_state(net: Network, n: int) -> tuple:
    """The pointer state of a member that the error measure can observe."""
    state = net.node(n)
    return (state.pred, state.succ_list)


def effective_enabled(net: Network) -> list[Event]:
    """Repair events that can occur now and would change their executor's pointers.

    Evaluated over pointer state alone: the stabilize adoption candidate is
    the value a stabilize running now would acquire (the first live
    successor's current predecessor), matching the progress lemmas' reading.
    """
    events: list[Event] = []
    r = net.params.r
    for n in net.live_idents():
        state = net.node(n)
        h = best_successor(net, n)
        if h is None:
            continue  # assumption breach; unreachable from valid states
        new_list = (h,) + net.node(h).succ_list[: r - 1]
        if new_list != state.succ_list:
            events.append(Event(EventKind.STABILIZE_FROM_OLD_SUCCESSOR, n))
        c = net.node(h).pred
        if c is not None and net.is_live(c) and between(n, c, h):
            adopted = (c,) + net.node(c).succ_list[: r - 1]
            if adopted != state.succ_list:
                events.append(Event(EventKind.STABILIZE_FROM_NEW_SUCCESSOR, n))
    for p in net.live_idents():
        head = net.node(p).succ_list[0]
        if not net.is_live(head):
            continue
        n = head
        cur = net.node(n).pred
        if cur == p:
            continue
        if cur is None or not net.is_live(cur) or between(cur, p, n):
            events.append(Event(EventKind.RECTIFY, n, new_pred=p))
    return sorted(events, key=Event.sort_key)


def network_is_improvable(net: Network) -> bool:
    return bool(effective_enabled(net))
