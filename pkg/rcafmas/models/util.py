"""
Utility functions for beamforming and image analysis.

.. include:: ../include/links.rst
"""

import numpy as np


def lin_interp(x, x1, y1, x2, y2):
    """
    Evaluate the line through (x1,y1) and (x2,y2) at x.

    Used to locate half-maximum crossings.  ``x1 == x2`` is not checked.
    """
    return y1 + (y2-y1) * (x-x1) / (x2-x1)


def interp_trace(trace, f):
    """
    Sample a uniformly sampled trace at fractional sample indices.

    Samples are linearly interpolated between the bracketing integer
    samples using `numpy.interp`_, separately for the real and imaginary
    parts of complex traces.  Any index outside ``[0, len(trace)-1]``, or
    that is not finite, yields 0.

    Args:
        trace (`numpy.ndarray`_):
            1D trace; can be real or complex.
        f (`numpy.ndarray`_):
            Fractional sample indices.

    Returns:
        `numpy.ndarray`_: Sampled values with the same shape as ``f``
        and the same type as ``trace``.
    """
    _f = np.atleast_1d(np.asarray(f, dtype=float))
    valid = np.isfinite(_f)
    _f = np.where(valid, _f, -1.)
    index = np.arange(trace.size, dtype=float)
    if np.iscomplexobj(trace):
        result = np.interp(_f, index, trace.real, left=0., right=0.) \
                    + 1j*np.interp(_f, index, trace.imag, left=0., right=0.)
    else:
        result = np.interp(_f, index, trace, left=0., right=0.)
    return result.astype(trace.dtype, copy=False)


def to_db(ratio, floor=None):
    """
    Convert an amplitude ratio to decibels, :math:`20\\log_{10}(r)`.

    Args:
        ratio (:obj:`float`, `numpy.ndarray`_):
            Amplitude ratio(s).
        floor (:obj:`float`, optional):
            Minimum returned value.  Ratios of 0 are set to this floor
            instead of :math:`-\\infty`.  If None, no floor is applied.

    Returns:
        :obj:`float`, `numpy.ndarray`_: Values in dB.
    """
    _r = np.atleast_1d(np.asarray(ratio, dtype=float))
    db = np.full(_r.shape, -np.inf if floor is None else float(floor))
    indx = _r > 0
    db[indx] = 20*np.log10(_r[indx])
    if floor is not None:
        db = np.maximum(db, floor)
    return db[0] if np.isscalar(ratio) or np.ndim(ratio) == 0 else db

