"""Model files, simulation, reports and the command-line interface."""
