"""Lock complex controller, requirement monitors, explicit-state checker,
plant simulator, session service and CLI."""

__version__ = "0.1.0"
