"""Switch between numba-compiled kernels and the pure-numpy fallback.

Set ``COLLMEM_DISABLE_JIT=1`` before import to force the numpy path. The
choice can also be flipped at runtime with :func:`set_backend`, which the
test suite and the benchmark use to compare both paths in one process.
"""

import logging
import os
import warnings

logger = logging.getLogger(__name__)

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    # evaluation trials may call parallel kernels from several Python threads
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "threadsafe"
    warnings.filterwarnings("ignore", message="The TBB threading layer requires")
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range


_use_numba = HAVE_NUMBA and os.environ.get("COLLMEM_DISABLE_JIT", "").lower() not in _TRUTHY


def use_numba():
    return _use_numba


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` kernels; returns the previous name."""
    global _use_numba
    previous = backend()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        _use_numba = True
    elif name == "numpy":
        _use_numba = False
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def backend():
    return "numba" if _use_numba else "numpy"


def max_threads():
    if HAVE_NUMBA:
        return int(numba.config.NUMBA_NUM_THREADS)
    return os.cpu_count() or 1


def resolve_threads(threads):
    """Clamp a requested worker count to what the runtime can provide."""
    if threads is None or threads < 1:
        threads = 1
    return threads


class numba_threads:
    """Context manager pinning the numba worker pool size."""

    def __init__(self, threads):
        self.threads = resolve_threads(threads)
        self._prev = None

    def __enter__(self):
        if HAVE_NUMBA and _use_numba:
            limit = max_threads()
            n = min(self.threads, limit)
            if n < self.threads:
                logger.debug("numba pool limited to %d threads (asked %d)", limit, self.threads)
            self._prev = numba.get_num_threads()
            numba.set_num_threads(n)
        return self

    def __exit__(self, *exc):
        if self._prev is not None:
            numba.set_num_threads(self._prev)
        return False
