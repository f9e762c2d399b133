"""Kernel selection: compiled Cython core if importable, else numpy fallback.

Set ``CATSAMPLER_BACKEND=python`` to force the fallback.
"""
import os

from catsampler import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("CATSAMPLER_BACKEND", "").lower() != "python":
    try:
        from catsampler import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

ryser_permanent = _impl.ryser_permanent
gamma_batch = _impl.gamma_batch


def worker_count():
    """Worker threads for parallel loops (``CATSAMPLER_THREADS`` or CPU count)."""
    env = os.environ.get("CATSAMPLER_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1
