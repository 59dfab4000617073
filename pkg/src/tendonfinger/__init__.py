"""Constrained tendon-driven finger: dynamics, backstepping control and simulation."""

__version__ = "0.1.0"
