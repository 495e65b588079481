"""
Analytic synthesis of plane-wave channel data for point-scatterer phantoms.

Each scatterer returns a copy of the transmit pulse delayed by the two-way
travel time: the plane-wave delay from the transmitting strips to the
scatterer plus the shortest-path delay from the scatterer back to each
receiving strip.  Echoes are weighted by the transmit apodization at the
point where the plane wave that reaches the scatterer left the aperture,
blurred by diffraction at the aperture edges, and by :math:`1/r` spreading
on receive.  Element directivity, attenuation, and transmit-side spreading
are ignored.

.. include:: ../include/links.rst
"""
import time
from functools import partial

from IPython import embed

import numpy as np
from scipy import signal, stats

from ..models.geometry import element_positions, tukey_window
from ..models.beamform import tx_delay, rx_delay, event_coordinates
from ..util.parallel import parallel_map, substream
from .rfdata import RfDataSet


class PulseModel:
    """
    Gaussian-modulated sinusoidal transmit pulse.

    Args:
        center_frequency (:obj:`float`):
            Carrier frequency in Hz.
        bandwidth (:obj:`float`):
            Full width of the spectrum at -6 dB in Hz.
        amplitude (:obj:`float`, optional):
            Peak amplitude of the envelope.
        cutoff_db (:obj:`float`, optional):
            Envelope level in dB (relative to the peak) that sets the pulse
            duration.  Must be negative; the default of -60 dB encloses
            well over 99% of the pulse energy.
    """
    def __init__(self, center_frequency, bandwidth, amplitude=1., cutoff_db=-60.):
        if center_frequency <= 0 or bandwidth <= 0:
            raise ValueError('Pulse frequency and bandwidth must be positive.')
        if cutoff_db >= 0:
            raise ValueError('Pulse cutoff level must be negative.')
        self.center_frequency = float(center_frequency)
        self.bandwidth = float(bandwidth)
        self.amplitude = float(amplitude)
        self.cutoff_db = float(cutoff_db)

    def __repr__(self):
        return f'<{self.__class__.__name__}: fc={self.center_frequency/1e6:.2f} MHz, ' \
               f'bw={self.bandwidth/1e6:.2f} MHz>'

    @property
    def fractional_bandwidth(self):
        return self.bandwidth/self.center_frequency

    @property
    def half_duration(self):
        """
        Time from the envelope peak to the cutoff level in seconds.
        """
        return signal.gausspulse('cutoff', fc=self.center_frequency,
                                 bw=self.fractional_bandwidth, bwr=-6, tpr=self.cutoff_db)

    @property
    def duration(self):
        """Full pulse duration in seconds."""
        return 2*self.half_duration

    def __call__(self, t):
        """
        Evaluate the pulse at the provided times relative to the envelope
        peak.
        """
        return self.amplitude * signal.gausspulse(t, fc=self.center_frequency,
                                                  bw=self.fractional_bandwidth, bwr=-6)

    def sample_times(self, sampling_frequency):
        """
        Times at which :func:`make_pulse` samples the pulse.
        """
        n = int(np.ceil(self.half_duration*sampling_frequency))
        return np.arange(-n, n+1, dtype=float)/sampling_frequency


def make_pulse(model, sampling_frequency):
    """
    Sample the transmit pulse.

    The samples are symmetric about the central sample, which is at the
    envelope peak.

    Args:
        model (:class:`PulseModel`):
            Pulse model.
        sampling_frequency (:obj:`float`):
            Sampling frequency in Hz.

    Returns:
        `numpy.ndarray`_: The sampled pulse.

    Raises:
        ValueError:
            Raised if the sampling frequency is below the Nyquist rate of
            the pulse band.
    """
    nyq = 2*(model.center_frequency + model.bandwidth/2)
    if sampling_frequency <= nyq:
        raise ValueError(f'Sampling frequency ({sampling_frequency/1e6:.2f} MHz) must be larger '
                         f'than {nyq/1e6:.2f} MHz.')
    return model(model.sample_times(sampling_frequency))


def _delay_range(geom, schedule, positions):
    """
    Return bounds on the two-way delays to a set of positions.

    The receive distance is bounded using the full extent of the receiving
    aperture, so the lower bound can be slightly early.
    """
    tmin, tmax = np.inf, -np.inf
    for event in schedule:
        s, q = event_coordinates(event, positions[:,0], positions[:,1])
        d_tx = tx_delay(s, positions[:,2], event.angle, geom.sound_speed)
        r_n = element_positions(geom, event.receive)
        near = np.maximum(0., np.maximum(r_n[0] - q, q - r_n[-1]))
        far = np.maximum(np.absolute(q - r_n[0]), np.absolute(q - r_n[-1]))
        tmin = min(tmin, np.amin(d_tx + rx_delay(near, positions[:,2], 0., geom.sound_speed)))
        tmax = max(tmax, np.amax(d_tx + rx_delay(far, positions[:,2], 0., geom.sound_speed)))
    return tmin, tmax


def acquisition_window(geom, grid, schedule, pulse, margin=0.):
    """
    Determine a recording window that captures every echo from a voxel
    grid.

    The transmit delay is linear in position, so its extrema over the grid
    are at the grid corners; the receive delay is convex, so its maximum is
    at a corner and it is never smaller than :math:`z_{\\rm min}/c`.

    Args:
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        schedule (:class:`~rcafmas.models.geometry.TransmitSchedule`):
            Transmit schedule.
        pulse (:class:`PulseModel`):
            Transmit pulse.
        margin (:obj:`float`, optional):
            Additional time in seconds added to both ends of the window;
            e.g., to absorb filter edge effects.

    Returns:
        :obj:`tuple`: The time of the first sample in seconds and the number
        of samples.
    """
    corners = np.array([[x, y, z] for x in grid.axis(0)[[0,-1]] for y in grid.axis(1)[[0,-1]]
                            for z in grid.axis(2)[[0,-1]]])
    _, tmax = _delay_range(geom, schedule, corners)
    tmin = np.inf
    for event in schedule:
        s, _ = event_coordinates(event, corners[:,0], corners[:,1])
        tmin = min(tmin, np.amin(tx_delay(s, corners[:,2], event.angle, geom.sound_speed)))
    tmin += grid.origin[2]/geom.sound_speed
    t0 = max(0., tmin - pulse.half_duration - margin)
    nsamples = int(np.ceil((tmax + pulse.half_duration + margin - t0)
                           * geom.sampling_frequency)) + 1
    return t0, nsamples


def transmit_apodization(geom, event, positions, alpha=0.5):
    r"""
    Transmit apodization weight of the plane wave reaching each position.

    The plane wave that reaches a position left the probe where the ray
    through the position, traced back along the steering direction,
    crosses the probe surface, :math:`u = s - z\tan\theta`.  The weight is
    the Tukey taper of the transmitting elements
    (:func:`~rcafmas.models.geometry.tukey_window`) seen through the
    diffraction blur of the aperture edges: each element contributes a
    Gaussian of width

    .. math::

        \sigma^2 = \frac{\lambda z}{2\pi} + \left(\frac{p}{2}\right)^2

    centered on the element, with :math:`p` the element pitch, and the
    contributions are summed with the element weights.  Far from the
    aperture edges the weight is the taper itself.  Along the strips, the
    uniform strip length is blurred the same way.  The weight therefore
    decays smoothly, but never vanishes, outside the geometric shadow of
    the aperture.

    Args:
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        event (:class:`~rcafmas.models.geometry.TransmitEvent`):
            Transmit event.
        positions (`numpy.ndarray`_):
            Positions with shape :math:`(N,3)`; all :math:`z` must be
            positive.
        alpha (:obj:`float`, optional):
            Tukey parameter.

    Returns:
        `numpy.ndarray`_: Weights for each position.
    """
    _pos = np.atleast_2d(positions)
    z = _pos[:,2]
    if np.any(z <= 0):
        raise ValueError('Transmit apodization is only defined in front of the probe.')
    s, q = event_coordinates(event, _pos[:,0], _pos[:,1])
    u = s - z*np.tan(event.angle)
    r = element_positions(geom, event.orientation)
    w = tukey_window(r.size, alpha) if r.size > 1 else np.ones(r.size, dtype=float)
    sigma = np.sqrt(geom.wavelength*z/2/np.pi + (geom.pitch/2)**2)
    aperture = geom.pitch * np.sum(w[None,:]*stats.norm.pdf(u[:,None], loc=r[None,:],
                                                              scale=sigma[:,None]), axis=1)
    half_length = geom.strip_length(event.orientation)/2
    length = stats.norm.cdf((half_length - q)/sigma) - stats.norm.cdf((-half_length - q)/sigma)
    return aperture*length


def _simulate_event(event, geom=None, positions=None, amplitudes=None, pulse=None, t0=None,
                    nsamples=None, nchan=None, tx_alpha=None):
    """
    Synthesize the channel data for a single event.
    """
    fs = geom.sampling_frequency
    c = geom.sound_speed
    data = np.zeros((nchan, nsamples), dtype=float)
    if positions.shape[0] == 0:
        return data
    coeff = amplitudes * transmit_apodization(geom, event, positions, alpha=tx_alpha)
    indx = coeff != 0
    if not np.any(indx):
        return data
    _pos = positions[indx]
    coeff = coeff[indx]
    s, q = event_coordinates(event, _pos[:,0], _pos[:,1])
    d_tx = tx_delay(s, _pos[:,2], event.angle, c)
    # Sample offsets needed to cover the pulse around each arrival
    nhalf = int(np.ceil(pulse.half_duration*fs)) + 1
    offsets = np.arange(-nhalf, nhalf+1)
    r_n = element_positions(geom, event.receive)
    for n in range(r_n.size):
        r_rx = np.hypot(_pos[:,2], q - r_n[n])
        arrival = d_tx + r_rx/c
        k = np.floor((arrival - t0)*fs).astype(int)[:,None] + offsets[None,:]
        valid = (k >= 0) & (k < nsamples)
        if not np.any(valid):
            continue
        t = t0 + k/fs - arrival[:,None]
        w = (coeff/r_rx)[:,None] * pulse(t)
        data[n] = np.bincount(k[valid], weights=w[valid], minlength=nsamples)
    return data


def simulate_rf(geom, phantom, schedule, pulse, t0=None, nsamples=None, tx_alpha=0.5, cores=1,
                verbose=0):
    """
    Synthesize RF channel data.

    For each event :math:`e` and receive channel :math:`n`, the sample at
    time :math:`t_k = t_0 + k/f_s` is

    .. math::

        {\\rm RF}_{e,n}(t_k) = \\sum_s \\frac{a_s w_{e,s}}{r_{n,s}}
            p(t_k - d_{\\rm Tx}(s,\\theta_e) - d_{\\rm Rx}(s,n))

    where :math:`a_s` is the scatterer amplitude, :math:`w_{e,s}` is the
    transmit apodization (see :func:`transmit_apodization`),
    :math:`r_{n,s}` is the distance to the receiving strip, and :math:`p` is
    the pulse.  Row transmissions are received on the columns and vice
    versa.

    Each event is an independent task, and the scatterer contributions
    are accumulated in a fixed order, so the result does not depend on the
    number of processes.

    Args:
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        phantom (:class:`~rcafmas.data.phantom.Phantom`):
            Scatterers to image.
        schedule (:class:`~rcafmas.models.geometry.TransmitSchedule`):
            Transmit schedule.
        pulse (:class:`PulseModel`):
            Transmit pulse.
        t0 (:obj:`float`, optional):
            Time of the first sample.  If None, set to cover the earliest
            echo (see ``nsamples``).
        nsamples (:obj:`int`, optional):
            Number of samples.  If None, set to cover the latest echo.  For
            an empty phantom, the record is one pulse long.
        tx_alpha (:obj:`float`, optional):
            Tukey parameter of the transmit apodization.
        cores (:obj:`int`, optional):
            Number of processes.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :class:`~rcafmas.data.rfdata.RfDataSet`: The channel data.

    Raises:
        ValueError:
            Raised if the schedule is empty.
    """
    if schedule is None or len(schedule) == 0:
        raise ValueError('Transmit schedule is empty.')
    make_pulse(pulse, geom.sampling_frequency)

    if t0 is None or nsamples is None:
        if phantom.nscatterers == 0:
            _t0, _nsamp = 0., pulse.sample_times(geom.sampling_frequency).size
        else:
            tmin, tmax = _delay_range(geom, schedule, phantom.positions)
            _t0 = max(0., tmin - pulse.half_duration)
            _nsamp = int(np.ceil((tmax + pulse.half_duration - _t0)*geom.sampling_frequency)) + 1
        t0 = _t0 if t0 is None else t0
        nsamples = _nsamp if nsamples is None else nsamples
    if nsamples < 1:
        raise ValueError('Number of samples must be positive.')

    nrx = [geom.element_count(e.receive) for e in schedule]
    nchan = max(nrx)
    t = time.perf_counter()
    func = partial(_simulate_event, geom=geom, positions=phantom.positions,
                   amplitudes=phantom.amplitudes, pulse=pulse, t0=t0, nsamples=nsamples,
                   nchan=nchan, tx_alpha=tx_alpha)
    samples = np.stack(parallel_map(func, schedule.events, cores=cores, progress=verbose > 0,
                                    desc='Synthesizing'))
    if verbose > 0:
        print(f'Synthesized {len(schedule)} events for {phantom.nscatterers} scatterers in '
              f'{time.perf_counter()-t:.1f} s')
    return RfDataSet(samples, t0, geom.sampling_frequency, schedule.events, nchannels=nrx)


def add_noise(rf, snr_db, seed=None, rng=None):
    """
    Add white Gaussian noise to RF data.

    The noise variance is set by the mean power of the input signal,
    :math:`\\sigma^2 = P / 10^{{\\rm SNR}/10}`.  Only valid channels are
    affected.

    Args:
        rf (:class:`~rcafmas.data.rfdata.RfDataSet`):
            RF data.
        snr_db (:obj:`float`):
            Target signal-to-noise ratio in dB.
        seed (:obj:`int`, optional):
            Base seed; the noise is drawn from the ``'noise'`` substream.
            Ignored if ``rng`` is provided.
        rng (`numpy.random.Generator`_, optional):
            Random number generator to use directly.

    Returns:
        :class:`~rcafmas.data.rfdata.RfDataSet`: A new dataset with the
        noise added.

    Raises:
        ValueError:
            Raised if the input data have no signal.
    """
    power = rf.signal_power()
    if not power > 0:
        raise ValueError('Cannot add noise at a fixed SNR to data with no signal.')
    _rng = substream(seed, 'noise') if rng is None else rng
    sigma = np.sqrt(power / 10**(snr_db/10))
    samples = rf.samples.copy()
    for i in range(rf.nevents):
        samples[i,:rf.nchannels[i]] += _rng.normal(scale=sigma,
                                                    size=(rf.nchannels[i], rf.nsamples))
    return RfDataSet(samples, rf.t0, rf.sampling_frequency, rf.events, nchannels=rf.nchannels)

