"""
Baseband conversion of RF channel data and delayed-sample extraction.

.. include:: ../include/links.rst
"""
from IPython import embed

import numpy as np
from scipy import signal

from .util import interp_trace


def design_lowpass(cutoff, sampling_frequency, width, ripple_db=60.):
    """
    Design a linear-phase low-pass FIR filter.

    The filter is a Kaiser-windowed sinc; the window parameters and the
    number of taps are set by `scipy.signal.kaiserord`_ for the requested
    stop-band attenuation and transition width.  The number of taps is
    always odd, so that the filter delay is an integer number of samples.

    Args:
        cutoff (:obj:`float`):
            Cutoff frequency (-6 dB point) in Hz.
        sampling_frequency (:obj:`float`):
            Sampling frequency in Hz.
        width (:obj:`float`):
            Width of the transition band in Hz.
        ripple_db (:obj:`float`, optional):
            Stop-band attenuation in dB.

    Returns:
        `numpy.ndarray`_: Filter taps, normalized to unit gain at 0 Hz.

    Raises:
        ValueError:
            Raised if the cutoff is not in :math:`(0, f_s/2)` or if the
            transition band extends beyond the Nyquist frequency.
    """
    nyq = sampling_frequency/2
    if cutoff <= 0 or cutoff >= nyq:
        raise ValueError(f'Filter cutoff ({cutoff/1e6:.3f} MHz) must be between 0 and the '
                         f'Nyquist frequency ({nyq/1e6:.3f} MHz).')
    if width <= 0:
        raise ValueError('Transition width must be positive.')
    if cutoff - width/2 <= 0 or cutoff + width/2 >= nyq:
        raise ValueError('Transition band must lie between 0 and the Nyquist frequency.')
    numtaps, beta = signal.kaiserord(ripple_db, width/nyq)
    if numtaps % 2 == 0:
        numtaps += 1
    return signal.firwin(numtaps, cutoff, window=('kaiser', beta), fs=sampling_frequency)


def iq_demodulate(rf, center_frequency, cutoff, decimation=1, width=1e6, ripple_db=60.):
    r"""
    Convert RF channel data to complex baseband.

    The data are mixed down by :math:`e^{-i 2\pi f_c t}`, where :math:`t`
    is the absolute sample time, low-pass filtered by a zero-phase FIR
    filter (see :func:`design_lowpass`), and decimated.

    Args:
        rf (:class:`~rcafmas.data.rfdata.RfDataSet`):
            RF channel data.
        center_frequency (:obj:`float`):
            Carrier frequency in Hz.
        cutoff (:obj:`float`):
            Low-pass cutoff frequency in Hz.
        decimation (:obj:`int`, optional):
            Decimation factor.
        width (:obj:`float`, optional):
            Transition width of the low-pass filter in Hz.
        ripple_db (:obj:`float`, optional):
            Stop-band attenuation of the low-pass filter in dB.

    Returns:
        :class:`~rcafmas.data.rfdata.IqDataSet`: The baseband data.

    Raises:
        ValueError:
            Raised if the cutoff is above the Nyquist frequency of the
            decimated data.
    """
    # Imported here to avoid a circular import with the data subpackage
    from ..data.rfdata import IqDataSet

    if int(decimation) != decimation or decimation < 1:
        raise ValueError('Decimation factor must be a positive integer.')
    if cutoff > rf.sampling_frequency/2/decimation:
        raise ValueError(f'Cutoff ({cutoff/1e6:.3f} MHz) exceeds the Nyquist frequency of the '
                         f'decimated data ({rf.sampling_frequency/2/decimation/1e6:.3f} MHz).')
    taps = design_lowpass(cutoff, rf.sampling_frequency, width, ripple_db=ripple_db)
    mixed = rf.samples * np.exp(-2j*np.pi*center_frequency*rf.time())[None,None,:]
    filtered = signal.fftconvolve(mixed, taps[None,None,:], mode='same', axes=-1)
    # Zero-padded channels stay zero
    for i in range(rf.nevents):
        filtered[i,rf.nchannels[i]:] = 0.
    return IqDataSet(filtered[...,::int(decimation)], rf.t0,
                     rf.sampling_frequency/decimation, rf.events, center_frequency,
                     nchannels=rf.nchannels, decimation=decimation)


def remodulate(iq):
    r"""
    Shift baseband data back to the carrier frequency.

    Computes :math:`2\ {\rm Re}[y(t)\, e^{i 2\pi f_c t}]`, which recovers
    the band-limited RF signal.  Only undecimated data are supported.

    Args:
        iq (:class:`~rcafmas.data.rfdata.IqDataSet`):
            Baseband data.

    Returns:
        :class:`~rcafmas.data.rfdata.RfDataSet`: The RF data.
    """
    from ..data.rfdata import RfDataSet

    if iq.decimation != 1:
        raise ValueError('Can only remodulate undecimated data.')
    rf = 2*np.real(iq.samples * np.exp(2j*np.pi*iq.center_frequency*iq.time())[None,None,:])
    return RfDataSet(rf, iq.t0, iq.sampling_frequency, iq.events, nchannels=iq.nchannels)


def hilbert_envelope(rf):
    """
    Compute the envelope of RF data using the analytic signal.

    Args:
        rf (:class:`~rcafmas.data.rfdata.RfDataSet`, `numpy.ndarray`_):
            RF data.  The last axis must be time.

    Returns:
        `numpy.ndarray`_: Envelope with the same shape as the data.
    """
    data = rf.samples if hasattr(rf, 'samples') else np.asarray(rf)
    return np.absolute(signal.hilbert(data, axis=-1))


def sample_trace(trace, t0, sampling_frequency, delays):
    """
    Sample a trace at a set of absolute times.

    Samples are linearly interpolated; any delay outside the recorded
    window yields 0.

    Args:
        trace (`numpy.ndarray`_):
            The sampled trace; can be complex.
        t0 (:obj:`float`):
            Time of the first sample in seconds.
        sampling_frequency (:obj:`float`):
            Sampling frequency in Hz.
        delays (:obj:`float`, `numpy.ndarray`_):
            Absolute sample times in seconds.

    Returns:
        `numpy.ndarray`_: Interpolated samples with the shape of
        ``delays``.
    """
    return interp_trace(trace, (np.asarray(delays) - t0)*sampling_frequency)


def sample_at(iq, event, channel, delay):
    """
    Sample one channel of one event at an absolute time.

    Args:
        iq (:class:`~rcafmas.data.rfdata.IqDataSet`):
            Baseband data.
        event (:obj:`int`):
            Event index.
        channel (:obj:`int`):
            Receive channel index.
        delay (:obj:`float`):
            Absolute time in seconds.

    Returns:
        :obj:`complex`: The linearly interpolated sample, or 0 if the time
        is outside the recorded window.
    """
    if event < 0 or event >= iq.nevents:
        raise IndexError(f'Event {event} is out of range.')
    if channel < 0 or channel >= iq.nchannels[event]:
        raise IndexError(f'Channel {channel} is out of range for event {event}.')
    return sample_trace(iq.samples[event,channel], iq.t0, iq.sampling_frequency, delay)[0]

