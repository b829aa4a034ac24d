"""Figure rendering for the spin-readout CSV outputs."""

__version__ = "0.1.0"

from .render import (
    FIGURE_IDS,
    FigureSpec,
    render,
    render_fig1,
    render_fig2,
    render_fig3,
    render_husimi,
    render_supp1,
    render_supp2,
)

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "render",
    "render_fig1",
    "render_fig2",
    "render_fig3",
    "render_husimi",
    "render_supp1",
    "render_supp2",
]
