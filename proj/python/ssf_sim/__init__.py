# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the single-slot-finality simulator."""

from ._ssf import (
    Corruption,
    DecodeError,
    ForkChoiceMode,
    Scenario,
    ScenarioError,
    SleepInterval,
    Trace,
    Verdict,
    accountability,
    check,
    check_determinism,
    check_equivalence,
    check_tau_sleepiness,
    compliance,
    property_names,
    quorum,
    run,
    slash_scan,
    third,
)


def check_all(trace):
    """Every trace property as a name -> Verdict mapping."""
    return {name: check(trace, name) for name in property_names()}


__all__ = [
    "Corruption",
    "DecodeError",
    "ForkChoiceMode",
    "Scenario",
    "ScenarioError",
    "SleepInterval",
    "Trace",
    "Verdict",
    "accountability",
    "check",
    "check_all",
    "check_determinism",
    "check_equivalence",
    "check_tau_sleepiness",
    "compliance",
    "property_names",
    "quorum",
    "run",
    "slash_scan",
    "third",
]
