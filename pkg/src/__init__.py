"""
Gyromagnet qubit simulator - Main Package
"""
from .config import *
from .commands import (
    register_simulation_commands,
    register_analysis_commands,
    register_not_commands,
    register_geometry_commands,
)
