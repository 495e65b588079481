"""
Containers for multi-channel, multi-event ultrasound channel data.

.. include:: ../include/links.rst
"""
from IPython import embed

import numpy as np

from ..models.geometry import TransmitEvent


class ChannelData:
    r"""
    Base class for channel data recorded for a set of transmit events.

    Data are stored in a single array with shape :math:`(N_{\rm event},
    N_{\rm chan}, N_{\rm samp})`.  Row transmissions are received on the
    columns and vice versa, so the number of receiving channels can differ
    between events for non-square arrays.  The channel axis is always sized
    to the larger of the two; channels that do not exist for a given event
    are zero-padded and flagged by :attr:`nchannels`.

    Args:
        samples (`numpy.ndarray`_):
            Channel data with shape :math:`(N_{\rm event}, N_{\rm chan},
            N_{\rm samp})`.
        t0 (:obj:`float`):
            Time of the first sample in seconds, relative to the firing
            time.  The same for all events and channels.
        sampling_frequency (:obj:`float`):
            Sampling frequency in Hz.
        events (:obj:`list`):
            The :class:`~rcafmas.models.geometry.TransmitEvent` objects
            associated with each event.
        nchannels (array-like, optional):
            Number of valid receive channels for each event.  If None, all
            channels are valid.

    Raises:
        ValueError:
            Raised if the shapes of the input are inconsistent.
    """
    def __init__(self, samples, t0, sampling_frequency, events, nchannels=None):
        if samples.ndim != 3:
            raise ValueError('Channel data must be a 3D array (event, channel, time).')
        if len(events) != samples.shape[0]:
            raise ValueError('Number of events does not match the first axis of the data.')
        if not all([isinstance(e, TransmitEvent) for e in events]):
            raise TypeError('All events must be TransmitEvent instances.')
        if sampling_frequency <= 0:
            raise ValueError('Sampling frequency must be positive.')
        self.samples = samples
        self.t0 = float(t0)
        self.sampling_frequency = float(sampling_frequency)
        self.events = list(events)
        self.nchannels = np.full(self.nevents, samples.shape[1], dtype=int) \
                            if nchannels is None else np.atleast_1d(nchannels).astype(int)
        if self.nchannels.size != self.nevents or np.any(self.nchannels > samples.shape[1]) \
                or np.any(self.nchannels < 1):
            raise ValueError('Number of valid channels is inconsistent with the data shape.')

    def __repr__(self):
        return f'<{self.__class__.__name__}: events={self.nevents}, ' \
               f'channels={self.samples.shape[1]}, samples={self.nsamples}>'

    @property
    def nevents(self):
        return self.samples.shape[0]

    @property
    def nsamples(self):
        return self.samples.shape[2]

    @property
    def dt(self):
        """Sample interval in seconds."""
        return 1/self.sampling_frequency

    def time(self):
        """
        Return the absolute time of each sample, :math:`t_0 + k/f_s`.
        """
        return self.t0 + np.arange(self.nsamples, dtype=float)/self.sampling_frequency

    def event_data(self, event):
        """
        Return the valid channel data for a single event.

        Args:
            event (:obj:`int`):
                Index of the event in this dataset.

        Returns:
            `numpy.ndarray`_: Array with shape :math:`(N_{\\rm chan},
            N_{\\rm samp})`, with :math:`N_{\\rm chan}` the number of
            elements that received the event.
        """
        return self.samples[event,:self.nchannels[event]]

    def _new(self, samples):
        raise NotImplementedError(f'{self.__class__.__name__} must define _new.')

    def scaled(self, scale):
        """
        Return a copy of the data multiplied by a constant.
        """
        return self._new(self.samples*scale)

    def __add__(self, other):
        if not isinstance(other, self.__class__) or self.samples.shape != other.samples.shape \
                or self.t0 != other.t0 or self.sampling_frequency != other.sampling_frequency:
            raise ValueError('Can only add datasets with identical sampling.')
        return self._new(self.samples + other.samples)


class RfDataSet(ChannelData):
    """
    Real-valued radio-frequency channel data.

    See :class:`ChannelData` for the argument descriptions.
    """
    def __init__(self, samples, t0, sampling_frequency, events, nchannels=None):
        if np.iscomplexobj(samples):
            raise TypeError('RF data must be real.')
        super().__init__(np.asarray(samples, dtype=float), t0, sampling_frequency, events,
                         nchannels=nchannels)

    def _new(self, samples):
        return RfDataSet(samples, self.t0, self.sampling_frequency, self.events,
                         nchannels=self.nchannels)

    def signal_power(self):
        """
        Mean power over all valid samples.
        """
        return np.mean(np.concatenate([self.event_data(i).ravel()**2
                                        for i in range(self.nevents)]))


class IqDataSet(ChannelData):
    """
    Complex baseband (in-phase/quadrature) channel data.

    Args:
        samples (`numpy.ndarray`_):
            Complex baseband channel data.
        t0 (:obj:`float`):
            Time of the first sample in seconds.
        sampling_frequency (:obj:`float`):
            Sampling frequency of the baseband data, after any decimation.
        events (:obj:`list`):
            Transmit events associated with the first axis.
        center_frequency (:obj:`float`):
            The carrier frequency used for the demodulation.  This is
            needed to compensate the phase of delayed samples when
            beamforming.
        nchannels (array-like, optional):
            Number of valid receive channels for each event.
        decimation (:obj:`int`, optional):
            Decimation factor applied relative to the RF data.
    """
    def __init__(self, samples, t0, sampling_frequency, events, center_frequency,
                 nchannels=None, decimation=1):
        super().__init__(np.asarray(samples, dtype=complex), t0, sampling_frequency, events,
                         nchannels=nchannels)
        if center_frequency <= 0:
            raise ValueError('Carrier frequency must be positive.')
        self.center_frequency = float(center_frequency)
        self.decimation = int(decimation)

    def _new(self, samples):
        return IqDataSet(samples, self.t0, self.sampling_frequency, self.events,
                         self.center_frequency, nchannels=self.nchannels,
                         decimation=self.decimation)

