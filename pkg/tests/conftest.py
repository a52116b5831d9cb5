"""Shared fixture builders for the test suite."""

from __future__ import annotations

from hypothesis import settings

from chordcheck.ident import RingParams
from chordcheck.netstate import Network, NodeState

settings.register_profile("suite", max_examples=100, derandomize=True)
settings.load_profile("suite")


def make_net(m, r, base, nodes, live=None, dead=()):
    """Build a network from {ident: (pred, succ_list)} specs.

    `nodes` describes live members unless `live` is given; `dead` adds
    departed nodes with retained state in the same format.
    """
    states = {}
    for ident, (pred, succ) in nodes.items():
        states[ident] = NodeState(ident=ident, succ_list=tuple(succ), pred=pred)
    for ident, (pred, succ) in dict(dead).items():
        states[ident] = NodeState(ident=ident, succ_list=tuple(succ), pred=pred)
    live_set = frozenset(live if live is not None else nodes.keys())
    return Network(
        params=RingParams(m=m, r=r),
        base=frozenset(base),
        nodes=states,
        live=live_set,
    )


def wrap_trap_state():
    """Ordered four-ring with an appendage merged at the wrong place.

    The appendage sits behind the ring member whose second successor points
    at it, so a fail plus one stabilize disorders the ring.
    """
    return make_net(
        6,
        2,
        base=[20, 31, 52],
        nodes={
            3: (52, (20, 31)),
            20: (3, (31, 52)),
            31: (20, (52, 3)),
            45: (None, (20, 31)),
            52: (31, (3, 45)),
        },
    )


def undersized_init_state():
    """Size-1 ring with two appendages whose lists are duplicated entries."""
    return make_net(
        6,
        2,
        base=[],
        nodes={
            37: (None, (48, 48)),
            48: (48, (48, 48)),
            62: (None, (48, 48)),
        },
    )


def valid_with_appendage_chain():
    """Ordered ring {14, 23, 37, 48} with appendage chain 50 -> 53 -> 63 and 9."""
    return make_net(
        6,
        2,
        base=[14, 23, 37],
        nodes={
            9: (None, (14, 23)),
            14: (9, (23, 37)),
            23: (14, (37, 48)),
            37: (23, (48, 14)),
            48: (37, (14, 23)),
            50: (48, (53, 14)),
            53: (50, (63, 14)),
            63: (53, (14, 23)),
        },
    )


def valid_with_eject():
    """Valid network where ring member 0 lists appendage 20 as second successor."""
    return make_net(
        6,
        2,
        base=[0, 10, 30],
        nodes={
            0: (30, (10, 20)),
            10: (0, (30, 0)),
            20: (10, (30, 0)),
            30: (20, (0, 10)),
        },
    )


def valid_with_date_conflict():
    """Valid five-ring with mutual skips: 20 and 30 pre-date each other."""
    return make_net(
        6,
        2,
        base=[0, 10, 40],
        nodes={
            0: (40, (10, 30)),
            10: (0, (20, 40)),
            20: (10, (30, 40)),
            30: (20, (40, 0)),
            40: (30, (0, 10)),
        },
    )


def cross_term_state():
    """Valid state where the only effective repair does not lower total error.

    Adopting 15 as 10's successor desynchronizes 30's copied second entry,
    so the measure stays at 1 even though the adoption is a real improvement.
    """
    return make_net(
        6,
        2,
        base=[10, 20, 30],
        nodes={
            10: (30, (20, 30)),
            15: (10, (20, 30)),
            20: (15, (30, 10)),
            30: (20, (10, 20)),
        },
    )
