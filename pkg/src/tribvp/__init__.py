"""Numerical solvers and checks for boundary value problems of the
tri-analytic equation on the unit disc."""

__version__ = "0.1.0"
