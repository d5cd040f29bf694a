"""Selects the compiled kernels when built, the pure-Python ones otherwise.

Set ``TESAGENTS_PURE=1`` to force the fallback.
"""
import os

COMPILED = False
if not os.environ.get("TESAGENTS_PURE"):
    try:
        from ._ckernel import acts_answered, enumerate_language, pair_steps, selections  # noqa: F401
        COMPILED = True
    except ImportError:
        pass

if not COMPILED:
    from ._pykernel import acts_answered, enumerate_language, pair_steps, selections  # noqa: F401
