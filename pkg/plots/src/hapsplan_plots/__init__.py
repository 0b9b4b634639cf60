"""Figure rendering for hapsplan sweep CSVs.

Consumes only the CSV contract (sweep,metric,grid_value,rate_target_bps,
mean,std,runs,seed); never imports the simulator.
"""

from .render import FigureSpec, SchemaError, build_figure, render

__all__ = ["FigureSpec", "SchemaError", "build_figure", "render"]

__version__ = "0.1.0"
