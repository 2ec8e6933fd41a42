"""Stochastic set model toolkit.

Thin Python face over the C++ core: models, probability tables,
identification, estimation, axiom checks, and assortment optimization.
"""

try:
    from ._core import (
        CapacityError,
        InconsistencyError,
        Model,
        Table,
        asymmetry_index,
        check_axioms,
        evaluate,
        expected_revenue,
        fit,
        identify,
        load_model,
        load_table,
        optimize,
        save_model,
        save_table,
        simulate,
        vertex_cover_instance,
    )
except ImportError:  # development tree: extension built by CMake, not installed
    import os
    import sys

    _core_dir = os.environ.get("SSMKIT_CORE_DIR")
    if _core_dir:
        sys.path.insert(0, _core_dir)
    from _core import (  # noqa: F401
        CapacityError,
        InconsistencyError,
        Model,
        Table,
        asymmetry_index,
        check_axioms,
        evaluate,
        expected_revenue,
        fit,
        identify,
        load_model,
        load_table,
        optimize,
        save_model,
        save_table,
        simulate,
        vertex_cover_instance,
    )

__all__ = [
    "CapacityError",
    "InconsistencyError",
    "Model",
    "Table",
    "asymmetry_index",
    "check_axioms",
    "evaluate",
    "expected_revenue",
    "fit",
    "identify",
    "load_model",
    "load_table",
    "optimize",
    "save_model",
    "save_table",
    "simulate",
    "vertex_cover_instance",
]
