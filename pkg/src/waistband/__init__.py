"""Waistband planner.

Planning and simulation toolkit for an automated stretch elastic waistband
sewing machine.
"""

__version__ = "0.0.1"
