"""Seeded controller defects for validating the requirement checks.

Each mutation weakens one guard or emission in the controller; the checks
must catch every one of them on the reduced configuration.  ``caught_by``
names a requirement whose check is expected to flag the defect (others may
fire as well).
"""

from __future__ import annotations

from dataclasses import dataclass

from .controller import Mutation


@dataclass(frozen=True)
class MutationCase:
    mutation: Mutation
    caught_by: str


MUTATIONS: dict[str, MutationCase] = {
    m.mutation.name: m for m in [
        MutationCase(Mutation(
            "drop_water_guard",
            "gate opening no longer requires an equal water level",
            drop_water_guard=True),
            caught_by="safreq5"),
        MutationCase(Mutation(
            "drop_emergency_check_gate_close",
            "gates close even while the lock is in emergency mode",
            drop_emergency_check_gate_close=True),
            caught_by="safreq10"),
        MutationCase(Mutation(
            "barrier_open_without_light_reads",
            "the barrier opens unconditionally, without guard or light reads",
            barrier_open_unconditional=True),
            caught_by="safreq40"),
        MutationCase(Mutation(
            "skip_light_red_on_stop",
            "stopping a pair of gates no longer re-instructs the lights to red",
            skip_light_red_on_gate_stop=True),
            caught_by="commandreq8"),
        MutationCase(Mutation(
            "treat_fail_single_as_red",
            "a failed single-light sensor reading is accepted as showing red",
            treat_fail_single_as_red=True),
            caught_by="safreq6"),
        MutationCase(Mutation(
            "drop_opposite_paddle_check",
            "gate opening no longer checks that the opposite paddles are closed",
            drop_opposite_paddle_check=True),
            caught_by="safreq3"),
        MutationCase(Mutation(
            "drop_redgreen_guard",
            "entering lights accept red-green without the leaving lights set red",
            drop_redgreen_guard=True),
            caught_by="safreq13"),
        MutationCase(Mutation(
            "drop_endstop_condition",
            "every gate position report triggers an opening end-stop output",
            drop_endstop_condition=True),
            caught_by="safreq23"),
    ]
}
