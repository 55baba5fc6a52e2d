#!/usr/bin/env python3
"""Record the bundled replay fixtures.

Runs the scripted scenarios through the real pipeline with a scripted
provider standing in for the network, recording every request/reply pair
under fixtures/. Re-run after changing any scenario text; the output is
deterministic, so a clean run leaves git quiet.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

import scenario_data
from ace.engine import Engine
from ace.gateway import LLMGateway
from ace.ids import FixedClock, SequentialIds
from ace.store import Store

FIXTURES = REPO / "fixtures"


class ScriptedGateway(LLMGateway):
    """Record-mode gateway whose provider is a canned reply list."""

    def __init__(self, script, fixtures_dir, mode="record"):
        super().__init__(mode=mode, fixtures_dir=fixtures_dir, clock=FixedClock())
        self.script = list(script)

    def _forward(self, req):
        if not self.script:
            raise AssertionError(f"script exhausted at label {req.label!r}")
        label, reply = self.script.pop(0)
        if req.label != label:
            raise AssertionError(f"expected {label!r}, pipeline sent {req.label!r}")
        return reply


def run_all(fixtures_dir, mode):
    """Drive every scenario once; returns the number of gateway calls."""
    calls = 0
    for scenario in scenario_data.SCENARIOS:
        with tempfile.TemporaryDirectory() as scratch:
            store = Store(scratch, clock=FixedClock(), ids=SequentialIds())
            if mode == "record":
                gateway = ScriptedGateway(scenario_data.scenario_script(scenario),
                                          fixtures_dir)
            else:
                gateway = LLMGateway(mode="replay", fixtures_dir=fixtures_dir)
            engine = Engine(store, gateway)
            scenario_data.run_scenario(engine, scenario)
            calls += gateway.calls
    with tempfile.TemporaryDirectory() as scratch:
        store = Store(scratch, clock=FixedClock(), ids=SequentialIds())
        if mode == "record":
            gateway = ScriptedGateway(scenario_data.turnfarm_script(), fixtures_dir)
        else:
            gateway = LLMGateway(mode="replay", fixtures_dir=fixtures_dir)
        engine = Engine(store, gateway)
        scenario_data.run_turnfarm(engine)
        calls += gateway.calls
    return calls


def main():
    FIXTURES.mkdir(exist_ok=True)
    stale = list(FIXTURES.glob("*.fixture.json"))
    for path in stale:
        path.unlink()
    recorded_calls = run_all(FIXTURES, "record")
    count = len(list(FIXTURES.glob("*.fixture.json")))
    print(f"recorded {count} fixtures from {recorded_calls} gateway calls")
    replayed_calls = run_all(FIXTURES, "replay")
    print(f"replay check passed ({replayed_calls} calls served from fixtures)")


if __name__ == "__main__":
    main()
