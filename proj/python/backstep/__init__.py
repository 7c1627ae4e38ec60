"""Simulation and verification toolkit for adaptive constrained backstepping.

Thin Python layer over the native core: scenario parsing, closed-loop
co-simulation against an exactly delayed plant, constraint and prerequisite
reports, and the gain feasibility search.
"""

from ._core import *  # noqa: F401,F403
