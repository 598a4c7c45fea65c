"""Exact disjoint-occurrence (BKR) operators on finite product spaces."""

from .bkr import (all_over_coordinate, bkr2, bkr_r, chained_product,
                  cylinder_closure, cylinder_table)
from .config import BKRInputError, ResourceLimitError, limits, override_limits
from .measure import (ProductMeasure, check_bkr2, check_bkr_r,
                      event_probability, uniform)
from .space import Event, SpaceShape, event_from_patterns, extend_base, project_base

__version__ = "0.1.0"

__all__ = [
    "Event", "SpaceShape", "event_from_patterns", "project_base", "extend_base",
    "all_over_coordinate", "cylinder_closure", "cylinder_table",
    "bkr2", "bkr_r", "chained_product",
    "ProductMeasure", "uniform", "event_probability", "check_bkr2", "check_bkr_r",
    "BKRInputError", "ResourceLimitError", "limits", "override_limits",
]
