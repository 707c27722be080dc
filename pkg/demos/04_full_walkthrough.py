"""End to end: a user walks past two tagged rooms and the client resolves
each against the location registry. Prints the replayable event log.

Run: python3 demos/04_full_walkthrough.py
"""

from pathlib import Path

from rfidlbs.sim import format_event_log, load_scenario, run

scenario_file = Path(__file__).parent.parent / "tests" / "data" / "walkthrough_hf.toml"
scenario = load_scenario(scenario_file)
print(f"scenario: {scenario.preset}, {scenario.duration}s, "
      f"{len(scenario.tags)} tags, seed {scenario.seed}\n")

log = run(scenario)
print(format_event_log(log))
print("same seed, same log:", format_event_log(run(scenario)) == format_event_log(log))
