"""Selects the compiled unification kernel when it is built, else the Python one.

Set ``MINERROR_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("MINERROR_PURE_PYTHON"):
    from ._pykernel import TermGraph

    IMPLEMENTATION = "python"
else:
    try:
        from ._ckernel import TermGraph
    except ImportError:
        from ._pykernel import TermGraph

        IMPLEMENTATION = "python"
    else:
        IMPLEMENTATION = "cython"

__all__ = ["TermGraph", "IMPLEMENTATION"]
