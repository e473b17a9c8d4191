"""Two-shock Riemann data for the barotropic Navier-Stokes system: viscous
profiles, shift-weighted relative entropy, and the inviscid-limit harness."""
from .gas import DomainError, GasModel, State
from .profiles import build_composite, solve_profile
from .riemann import WaveFan, build_fan, eval_fan, fan_distance
from .shifts import ShiftState, WeightPair, shift_rhs
from .solver import Field, Grid, evolve, step

__all__ = ["DomainError", "GasModel", "State", "WaveFan", "build_fan", "eval_fan", "fan_distance",
           "solve_profile", "build_composite", "WeightPair", "ShiftState", "shift_rhs",
           "Field", "Grid", "evolve", "step"]
__version__ = "0.1.0"
