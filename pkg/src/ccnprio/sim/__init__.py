from ccnprio.sim.engine import Simulation, run
from ccnprio.sim.log import EventLog, LogRecord
from ccnprio.sim.scenario import InvalidScenario, Scenario, load_scenario

__all__ = ["EventLog", "InvalidScenario", "LogRecord", "Scenario", "Simulation", "load_scenario", "run"]
