"""Exact symbolic engine for counital idempotent complexes.

The heavy lifting lives in the compiled extension module; this package
re-exports its public surface.  When running from a build tree the
extension sits next to the sources on PYTHONPATH instead of inside the
package, so fall back to a top-level import in that case.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # build-tree layout
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
