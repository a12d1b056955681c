"""Physics-guided neural network inverse-dynamics identification.

Thin wrapper around the compiled extension. When installed as a wheel the
extension lives inside this package; in a plain CMake build it sits on
PYTHONPATH as a top-level module.
"""

try:
    from ._pgnnff import *  # noqa: F401,F403
    from ._pgnnff import __doc__  # noqa: F401
except ImportError:  # pragma: no cover - CMake-build layout
    from _pgnnff import *  # noqa: F401,F403
    from _pgnnff import __doc__  # noqa: F401
