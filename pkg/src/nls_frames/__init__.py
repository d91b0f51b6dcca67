"""Gauge kernels for nonautonomous Schrodinger-type equations, a catalog of closed forms, and numerical oracles."""

from .coeffs import Scenario, demo_scenarios, load_scenario, parse_time_expression
from .equations import EquationSpec, WaveField
from .kernel import InitData, TransformKernel, build_kernel
from .transform import nonlinearity_map, pull_back, push_forward
from .verify import PropagatorConfig, propagate, residual

__version__ = "0.1.0"

__all__ = [
    "Scenario",
    "demo_scenarios",
    "load_scenario",
    "parse_time_expression",
    "EquationSpec",
    "WaveField",
    "InitData",
    "TransformKernel",
    "build_kernel",
    "nonlinearity_map",
    "pull_back",
    "push_forward",
    "PropagatorConfig",
    "propagate",
    "residual",
]
