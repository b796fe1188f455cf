"""Figure rendering for secrecy-sweep result CSVs."""

from lspfigures.render import (
    COLUMNS,
    CurveData,
    FigureSpec,
    Metric,
    RenderResult,
    SchemaError,
    read_rows,
    render,
)

__all__ = [
    "COLUMNS",
    "CurveData",
    "FigureSpec",
    "Metric",
    "RenderResult",
    "SchemaError",
    "read_rows",
    "render",
]
