"""
Row-column delay-and-sum beamforming.

Each plane-wave transmission is beamformed into its own complex volume.
The two-way delay to a voxel is the sum of the plane-wave transmit delay,
computed in the steering plane of the transmitting elements, and the
receive delay, computed from the shortest distance between the voxel and
the receiving (orthogonal) strip element.

.. include:: ../include/links.rst
"""
import time
from functools import partial

from IPython import embed

import numpy as np

from .geometry import TransmitEvent, VoxelGrid, element_positions, tukey_window
from .sigproc import sample_trace
from ..util.parallel import parallel_map

#: Number of voxels processed by each beamforming task.  This is fixed so
#: that the work split does not depend on the number of processes.
VOXEL_CHUNK = 32768


def tx_delay(s, z, angle, c):
    r"""
    Plane-wave transmit delay.

    .. math::

        d_{\rm Tx} = (z \cos\theta + s \sin\theta) / c

    Args:
        s (:obj:`float`, `numpy.ndarray`_):
            In-plane coordinate in meters: :math:`x` for row transmissions,
            :math:`y` for column transmissions.
        z (:obj:`float`, `numpy.ndarray`_):
            Depth in meters.
        angle (:obj:`float`):
            Steering angle in radians.
        c (:obj:`float`):
            Sound speed in m/s.

    Returns:
        :obj:`float`, `numpy.ndarray`_: Delay in seconds.
    """
    return (z*np.cos(angle) + s*np.sin(angle))/c


def rx_delay(q, z, r_n, c):
    r"""
    Receive delay to a strip element.

    .. math::

        d_{\rm Rx} = \sqrt{z^2 + (q - r_n)^2} / c

    Args:
        q (:obj:`float`, `numpy.ndarray`_):
            Cross-plane coordinate in meters: :math:`y` when the columns
            receive (row transmissions), :math:`x` when the rows receive.
        z (:obj:`float`, `numpy.ndarray`_):
            Depth in meters.
        r_n (:obj:`float`, `numpy.ndarray`_):
            Position of the receiving element in meters.
        c (:obj:`float`):
            Sound speed in m/s.

    Returns:
        :obj:`float`, `numpy.ndarray`_: Delay in seconds.
    """
    return np.hypot(z, q - r_n)/c


def event_coordinates(event, x, y):
    """
    Return the coordinates used by the transmit and receive delays.

    Args:
        event (:class:`~rcafmas.models.geometry.TransmitEvent`):
            Transmit event.
        x, y (:obj:`float`, `numpy.ndarray`_):
            Cartesian coordinates.

    Returns:
        :obj:`tuple`: The in-plane coordinate used for the transmit delay
        and the cross-plane coordinate used for the receive delay.
    """
    return (x, y) if event.orientation == 'row' else (y, x)


def total_delay(event, position, n, geom):
    """
    Two-way delay from firing to reception of a voxel echo.

    Args:
        event (:class:`~rcafmas.models.geometry.TransmitEvent`):
            Transmit event.
        position (array-like):
            Voxel position, :math:`(x,y,z)`, in meters.
        n (:obj:`int`):
            Index of the receiving element.
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.

    Returns:
        :obj:`float`: Delay in seconds.
    """
    x, y, z = position
    r_n = element_positions(geom, event.receive)
    if n < 0 or n >= r_n.size:
        raise IndexError(f'Receive element {n} is out of range.')
    s, q = event_coordinates(event, x, y)
    return tx_delay(s, z, event.angle, geom.sound_speed) \
                + rx_delay(q, z, r_n[n], geom.sound_speed)


class PerTxVolume:
    """
    Complex volume beamformed from a single transmission.

    Args:
        values (`numpy.ndarray`_):
            Complex voxel values with shape matching ``grid.dims``.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        event (:class:`~rcafmas.models.geometry.TransmitEvent`):
            The transmission.
    """
    def __init__(self, values, grid, event):
        if values.shape != grid.dims:
            raise ValueError(f'Volume shape {values.shape} does not match grid {grid.dims}.')
        self.values = values
        self.grid = grid
        self.event = event

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.event}>'


def _das_chunk(task, traces=None, t0=None, fs=None, fc=None, event=None, grid=None,
               r_n=None, apod=None, c=None):
    """
    Beamform one contiguous chunk of voxels for a single event.

    ``task`` is the (start, stop) range of flattened voxel indices.
    """
    start, stop = task
    x, y, z = grid.coordinates(start, stop)
    s, q = event_coordinates(event, x, y)
    d_tx = tx_delay(s, z, event.angle, c)
    result = np.zeros(stop-start, dtype=complex)
    for n in range(r_n.size):
        if apod[n] == 0:
            continue
        d_rx = rx_delay(q, z, r_n[n], c)
        result += apod[n] * sample_trace(traces[n], t0, fs, d_tx + d_rx) \
                    * np.exp(2j*np.pi*fc*d_rx)
    return result * np.exp(2j*np.pi*fc*d_tx)


def _check_event(iq, event, geom, rx_apod):
    """
    Validate the beamforming input for one event and return its index and
    receive apodization.
    """
    if isinstance(event, TransmitEvent):
        try:
            indx = iq.events.index(event)
        except ValueError as e:
            raise ValueError(f'{event} is not in the dataset.') from e
    else:
        indx = int(event)
        if indx < 0 or indx >= iq.nevents:
            raise IndexError(f'Event {indx} is out of range.')
    _event = iq.events[indx]
    nrx = geom.element_count(_event.receive)
    if iq.nchannels[indx] != nrx:
        raise ValueError(f'Dataset has {iq.nchannels[indx]} channels for {_event}; '
                         f'geometry expects {nrx}.')
    _apod = tukey_window(nrx, 0.5) if rx_apod is None \
                else np.atleast_1d(np.asarray(rx_apod, dtype=float))
    if _apod.size != nrx:
        raise ValueError(f'Receive apodization must have {nrx} weights, not {_apod.size}.')
    return indx, _apod


def _chunks(grid, chunk_size):
    return [(i, min(i+chunk_size, grid.size)) for i in range(0, grid.size, chunk_size)]


def das_volume(iq, event, grid, geom, rx_apod=None, cores=1, chunk_size=VOXEL_CHUNK):
    r"""
    Beamform the volume for a single transmission.

    For each voxel :math:`R`,

    .. math::

        V(R) = \sum_n w_n\ s_n(d_n(R))\ e^{i 2\pi f_c d_n(R)},

    where :math:`s_n` is the baseband trace of receive channel :math:`n`,
    :math:`d_n` is the :func:`total_delay`, and the complex exponential
    restores the carrier phase removed by the demodulation.

    Args:
        iq (:class:`~rcafmas.data.rfdata.IqDataSet`):
            Baseband channel data.
        event (:obj:`int`, :class:`~rcafmas.models.geometry.TransmitEvent`):
            The event to beamform, either its index in ``iq`` or the event
            object itself.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        rx_apod (array-like, optional):
            Receive apodization weights.  If None, use a Tukey window with
            :math:`\alpha = 0.5`.
        cores (:obj:`int`, optional):
            Number of processes.
        chunk_size (:obj:`int`, optional):
            Number of voxels per task.

    Returns:
        :class:`PerTxVolume`: The complex volume.

    Raises:
        ValueError:
            Raised if the dataset carrier frequency does not match the
            geometry, or if the apodization or channel count does not match
            the receiving aperture.
    """
    if not isinstance(grid, VoxelGrid):
        raise TypeError('Must provide a VoxelGrid.')
    if iq.center_frequency != geom.center_frequency:
        raise ValueError(f'Demodulation frequency ({iq.center_frequency/1e6} MHz) does not '
                         f'match the probe center frequency ({geom.center_frequency/1e6} MHz).')
    indx, apod = _check_event(iq, event, geom, rx_apod)
    _event = iq.events[indx]
    func = partial(_das_chunk, traces=iq.event_data(indx), t0=iq.t0,
                   fs=iq.sampling_frequency, fc=iq.center_frequency, event=_event, grid=grid,
                   r_n=element_positions(geom, _event.receive), apod=apod,
                   c=geom.sound_speed)
    values = np.concatenate(parallel_map(func, _chunks(grid, chunk_size), cores=cores))
    return PerTxVolume(values.reshape(grid.dims), grid, _event)


def das_volumes(iq, grid, geom, rx_alpha=0.5, cores=1, chunk_size=VOXEL_CHUNK, verbose=0):
    """
    Beamform the volumes for all transmissions in a dataset.

    The work is split into tasks of ``chunk_size`` voxels for each event;
    all tasks are distributed to the worker pool at once.

    Args:
        iq (:class:`~rcafmas.data.rfdata.IqDataSet`):
            Baseband channel data.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        rx_alpha (:obj:`float`, optional):
            Tukey parameter of the receive apodization.
        cores (:obj:`int`, optional):
            Number of processes.
        chunk_size (:obj:`int`, optional):
            Number of voxels per task.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :obj:`list`: One :class:`PerTxVolume` per event, in event order.
    """
    if iq.center_frequency != geom.center_frequency:
        raise ValueError(f'Demodulation frequency ({iq.center_frequency/1e6} MHz) does not '
                         f'match the probe center frequency ({geom.center_frequency/1e6} MHz).')
    t = time.perf_counter()
    chunks = _chunks(grid, chunk_size)
    tasks = []
    for i in range(iq.nevents):
        nrx = geom.element_count(iq.events[i].receive)
        _, apod = _check_event(iq, i, geom, tukey_window(nrx, rx_alpha))
        func = partial(_das_chunk, traces=iq.event_data(i), t0=iq.t0,
                       fs=iq.sampling_frequency, fc=iq.center_frequency, event=iq.events[i],
                       grid=grid, r_n=element_positions(geom, iq.events[i].receive),
                       apod=apod, c=geom.sound_speed)
        tasks += [(func, chunk) for chunk in chunks]
    results = parallel_map(_run_task, tasks, cores=cores, progress=verbose > 0,
                           desc='Beamforming')
    nchunk = len(chunks)
    volumes = [PerTxVolume(np.concatenate(results[i*nchunk:(i+1)*nchunk]).reshape(grid.dims),
                           grid, iq.events[i]) for i in range(iq.nevents)]
    if verbose > 0:
        print(f'Beamformed {iq.nevents} volumes of {grid.size} voxels in '
              f'{time.perf_counter()-t:.1f} s')
    return volumes


def _run_task(task):
    func, chunk = task
    return func(chunk)


def split_by_orientation(volumes):
    """
    Separate per-transmission volumes into row and column transmissions.

    Returns:
        :obj:`tuple`: Lists with the row and column volumes, each in their
        original order.
    """
    return [v for v in volumes if v.event.orientation == 'row'], \
                [v for v in volumes if v.event.orientation == 'column']

