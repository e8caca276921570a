"""Edit-distance kernels with a compiled fast path.

The compiled extension is preferred when it was built; otherwise the
pure-Python twin takes over with identical semantics. Set
``DUPLA_PURE_KERNELS=1`` to force the pure implementation (used by the
benchmark and the equivalence tests).
"""

import os

from . import pure

if os.environ.get("DUPLA_PURE_KERNELS"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

bounded_levenshtein = _impl.bounded_levenshtein
scan = _impl.scan
IMPLEMENTATION = "pure" if _impl is pure else "compiled"

__all__ = ["IMPLEMENTATION", "bounded_levenshtein", "scan", "pure"]
