"""Figure rendering for bhchaos sweep outputs (pure view layer over the CSVs)."""

__version__ = "0.1.0"

from .figures import (FIGURE_KINDS, FigureSpec, PlotviewError, build_curves,
                      build_heatmap, build_spacetime, render, render_figure)
