"""Super-twisting closed-loop simulation, limit-cycle analysis and gain tuning."""

try:
    from stsmc._core import *  # noqa: F401,F403
    from stsmc import _core as core
except ImportError:
    # in-tree builds place the extension next to the interpreter path instead
    from _core import *  # noqa: F401,F403
    import _core as core

__version__ = "0.1.0"
