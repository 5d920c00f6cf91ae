"""Scalarizing-function-based multiobjective evolutionary algorithms.

Library + benchmark harness: four methods (momsls, mogls, umogls, moead) over
three combinatorial problems (multiobjective TSP, TSP with profits,
multiobjective set covering), with quality indicators and experiment tooling.
"""

__version__ = "0.1.0"
