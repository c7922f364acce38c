"""
Commands package
"""
from .simulation_commands import register_simulation_commands
from .analysis_commands import register_analysis_commands
from .not_commands import register_not_commands
from .geometry_commands import register_geometry_commands
