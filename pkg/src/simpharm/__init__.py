"""Simplicial area, simplicial energy and simplicial harmonic maps.

The package is organised as

``complex``   Delta-complexes, subdivisions
``metric``    simplicial metrics, simplicial area
``targets``   Euclidean, hyperbolic, flat torus, genus-2 surface, metric trees
``smap``      simplicial maps, energies, collapse of zero-length edges
``solver``    gradient flow, Dirichlet solves, metric optimisation
``verify``    property checks and the cotangent-weight comparison
``cli``       the ``simpharm`` command
"""
from __future__ import annotations

__version__ = "0.1.0"

from ._kernels import BACKEND_NAME
from .complex import ComplexError, DeltaComplex, build_complex, complex_from_polygons
from .metric import (
    MetricError,
    SimplicialMetric,
    induced_quasimetric,
    simplicial_area,
    validate_metric,
)
from .smap import (
    CollapseError,
    MapError,
    SimplicialMap,
    collapse_zero_subcomplex,
    riemannian_area,
    simplicial_area_of_map,
    simplicial_energy,
)
from .solver import FlowConfig, FlowReport, flow_to_harmonic, minimize_over_metrics
from .targets import make_target

__all__ = [
    "BACKEND_NAME",
    "CollapseError",
    "ComplexError",
    "DeltaComplex",
    "FlowConfig",
    "FlowReport",
    "MapError",
    "MetricError",
    "SimplicialMap",
    "SimplicialMetric",
    "__version__",
    "build_complex",
    "collapse_zero_subcomplex",
    "complex_from_polygons",
    "flow_to_harmonic",
    "induced_quasimetric",
    "make_target",
    "minimize_over_metrics",
    "riemannian_area",
    "simplicial_area",
    "simplicial_area_of_map",
    "simplicial_energy",
    "validate_metric",
]
