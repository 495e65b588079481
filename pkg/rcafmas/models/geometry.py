"""
Row-column array geometry, transmit schedules, apodization windows, and the
reconstruction voxel grid.

Coordinate conventions:

    - :math:`z` is depth and is positive into the medium.
    - Row elements are strips arrayed along :math:`x` (each strip is
      elongated along :math:`y`); column elements are strips arrayed along
      :math:`y` (elongated along :math:`x`).
    - A row transmission (``'row'``) fires the rows, steers in the
      :math:`x-z` plane, and is received on the columns.  A column
      transmission (``'column'``) fires the columns, steers in the
      :math:`y-z` plane, and is received on the rows.
    - The aperture is centered on :math:`(x,y) = (0,0)`.

.. include:: ../include/links.rst
"""

from IPython import embed

import numpy as np
from scipy.signal import windows

#: Valid transmit orientations
orientations = ['row', 'column']


def _check_orientation(orientation):
    if orientation not in orientations:
        raise ValueError(f'Orientation must be one of {orientations}, not {orientation}.')


class ProbeGeometry:
    r"""
    Container for the row-column array layout and the acquisition parameters.

    Args:
        num_rows (:obj:`int`):
            Number of row elements, :math:`M`.
        num_cols (:obj:`int`):
            Number of column elements, :math:`N`.
        pitch (:obj:`float`):
            Element pitch in meters.
        center_frequency (:obj:`float`):
            Transmit center frequency, :math:`f_c`, in Hz.
        bandwidth (:obj:`float`):
            The -6 dB bandwidth of the transmit pulse in Hz.
        sampling_frequency (:obj:`float`):
            RF sampling frequency, :math:`f_s`, in Hz.
        sound_speed (:obj:`float`, optional):
            Assumed speed of sound in m/s.
        element_length (:obj:`float`, optional):
            Length of each elongated element in meters.  The element
            footprint must cover the full aperture, so this must be the
            number of orthogonal elements times the pitch.  If None, it is
            set accordingly.  Only a single length can be provided for
            square arrays.

    Raises:
        ValueError:
            Raised if any of the parameters are invalid.
    """
    def __init__(self, num_rows=128, num_cols=128, pitch=0.2e-3, center_frequency=5e6,
                 bandwidth=6e6, sampling_frequency=40e6, sound_speed=1540., element_length=None):

        if int(num_rows) != num_rows or num_rows < 1:
            raise ValueError(f'Number of rows must be a positive integer, not {num_rows}.')
        if int(num_cols) != num_cols or num_cols < 1:
            raise ValueError(f'Number of columns must be a positive integer, not {num_cols}.')
        if pitch <= 0:
            raise ValueError('Element pitch must be positive.')
        if center_frequency <= 0 or bandwidth <= 0:
            raise ValueError('Center frequency and bandwidth must be positive.')
        if sound_speed <= 0:
            raise ValueError('Sound speed must be positive.')
        if sampling_frequency <= 2*(center_frequency + bandwidth/2):
            raise ValueError(f'Sampling frequency ({sampling_frequency/1e6:.2f} MHz) must be '
                             f'larger than {2*(center_frequency + bandwidth/2)/1e6:.2f} MHz.')

        self.num_rows = int(num_rows)
        self.num_cols = int(num_cols)
        self.pitch = float(pitch)
        self.center_frequency = float(center_frequency)
        self.bandwidth = float(bandwidth)
        self.sampling_frequency = float(sampling_frequency)
        self.sound_speed = float(sound_speed)

        if element_length is not None:
            if self.num_rows != self.num_cols:
                raise ValueError('Can only specify a single element length for a square array.')
            if not np.isclose(element_length, self.num_rows*self.pitch, rtol=1e-9, atol=0.):
                raise ValueError('Element length must match the aperture size: '
                                 f'{self.num_rows*self.pitch*1e3:.3f} mm.')

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.num_rows}x{self.num_cols}, ' \
               f'pitch={self.pitch*1e3:.3f} mm, fc={self.center_frequency/1e6:.2f} MHz>'

    @property
    def element_length(self):
        """
        Length of the row elements; identical to the length of the column
        elements for square arrays.
        """
        return self.element_count('column')*self.pitch

    @property
    def wavelength(self):
        """Wavelength at the center frequency in meters."""
        return self.sound_speed / self.center_frequency

    def element_count(self, orientation):
        """
        Number of elements with the provided orientation.
        """
        _check_orientation(orientation)
        return self.num_rows if orientation == 'row' else self.num_cols

    def aperture(self, orientation):
        """
        Full width of the aperture spanned by the elements with the provided
        orientation.
        """
        return self.element_count(orientation)*self.pitch

    def strip_length(self, orientation):
        """
        Length of each strip with the provided orientation; i.e., the
        aperture of the orthogonal elements.
        """
        return self.aperture(receive_orientation(orientation))

    def to_dict(self):
        return dict(num_rows=self.num_rows, num_cols=self.num_cols, pitch=self.pitch,
                    center_frequency=self.center_frequency, bandwidth=self.bandwidth,
                    sampling_frequency=self.sampling_frequency, sound_speed=self.sound_speed)


def receive_orientation(orientation):
    """
    Return the orientation of the elements that receive a transmission with
    the provided orientation.
    """
    _check_orientation(orientation)
    return 'column' if orientation == 'row' else 'row'


class TransmitEvent:
    r"""
    A single plane-wave firing.

    Args:
        orientation (:obj:`str`):
            Transmitting elements; must be ``'row'`` or ``'column'``.
        angle (:obj:`float`):
            Steering angle, :math:`\theta`, in radians.  Row transmissions
            steer in the :math:`x-z` plane; column transmissions in the
            :math:`y-z` plane.
        index (:obj:`int`, optional):
            Firing order in the schedule.
    """
    def __init__(self, orientation, angle, index=0):
        _check_orientation(orientation)
        if not abs(angle) < np.pi/2:
            raise ValueError('Steering angle must be within (-90, 90) degrees.')
        self.orientation = orientation
        self.angle = float(angle)
        self.index = int(index)

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.index} {self.orientation} ' \
               f'{np.degrees(self.angle):.3f} deg>'

    def __eq__(self, other):
        return isinstance(other, TransmitEvent) and self.orientation == other.orientation \
                    and self.angle == other.angle and self.index == other.index

    @property
    def receive(self):
        """Orientation of the receiving elements."""
        return receive_orientation(self.orientation)


class TransmitSchedule:
    """
    Ordered set of plane-wave transmissions: all row events followed by all
    column events, with identical angle sets for both orientations.

    Use :func:`make_schedule` to construct.

    Args:
        n_per_orientation (:obj:`int`):
            Number of angles used for each orientation.
        angle_range (:obj:`float`):
            Full angular span in radians.
        events (:obj:`list`):
            The :class:`TransmitEvent` objects in firing order.
    """
    def __init__(self, n_per_orientation, angle_range, events):
        self.n_per_orientation = n_per_orientation
        self.angle_range = angle_range
        self.events = list(events)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    @property
    def ntx(self):
        """Total number of transmissions."""
        return len(self.events)

    @property
    def row_events(self):
        return [e for e in self.events if e.orientation == 'row']

    @property
    def column_events(self):
        return [e for e in self.events if e.orientation == 'column']

    @property
    def angles(self):
        """Angles for each orientation in radians."""
        return np.array([e.angle for e in self.row_events])


def element_position(geom, orientation, n):
    r"""
    Position of the ``n``-th row (along :math:`x`) or column (along :math:`y`).

    The aperture is centered, so that :math:`r(n) = (n - (N-1)/2)\,p`.

    Args:
        geom (:class:`ProbeGeometry`):
            Probe geometry.
        orientation (:obj:`str`):
            Element orientation, ``'row'`` or ``'column'``.
        n (:obj:`int`):
            0-indexed element number.

    Returns:
        :obj:`float`: Element position in meters.

    Raises:
        IndexError:
            Raised if ``n`` is out of range.
    """
    count = geom.element_count(orientation)
    if n < 0 or n >= count:
        raise IndexError(f'Element {n} is out of range for {count} {orientation} elements.')
    return (n - (count-1)/2) * geom.pitch


def element_positions(geom, orientation):
    """
    Return the positions of all elements with the provided orientation.

    See :func:`element_position`.

    Returns:
        `numpy.ndarray`_: Vector with the element positions in meters.
    """
    count = geom.element_count(orientation)
    return (np.arange(count, dtype=float) - (count-1)/2) * geom.pitch


def tukey_window(count, alpha):
    """
    Sampled Tukey (tapered-cosine) window.

    This is a thin wrapper of `scipy.signal.windows.tukey`_ that enforces the
    parameter range.  ``alpha=0`` is a rectangular window and ``alpha=1`` is
    a Hann window.

    Args:
        count (:obj:`int`):
            Number of samples; must be at least 2.
        alpha (:obj:`float`):
            Fraction of the window inside the cosine taper.

    Returns:
        `numpy.ndarray`_: Window weights.
    """
    if alpha < 0 or alpha > 1:
        raise ValueError(f'Tukey alpha must be in [0,1], not {alpha}.')
    if count < 2:
        raise ValueError('Tukey window must have at least 2 samples.')
    return windows.tukey(count, alpha=alpha, sym=True)


def make_schedule(n_per_orientation, angle_range):
    """
    Construct the transmit schedule.

    Angles are evenly spaced over the full span, ``[-angle_range/2,
    angle_range/2]``, endpoints included.  A single angle is placed at 0.
    The same angles are used for the rows and the columns; all row events
    are fired first.

    Args:
        n_per_orientation (:obj:`int`):
            Number of angles for each orientation.
        angle_range (:obj:`float`):
            Full angular span in radians.

    Returns:
        :class:`TransmitSchedule`: The schedule with ``2*n_per_orientation``
        events.
    """
    if int(n_per_orientation) != n_per_orientation or n_per_orientation < 1:
        raise ValueError('Must have at least one angle per orientation.')
    if angle_range < 0:
        raise ValueError('Angle range cannot be negative.')
    if angle_range/2 >= np.pi/2:
        raise ValueError('Angle range must be less than 180 degrees.')
    n = int(n_per_orientation)
    angles = np.zeros(1, dtype=float) if n == 1 \
                else np.linspace(-angle_range/2, angle_range/2, n)
    # Force exact symmetry about 0
    angles = (angles - angles[::-1])/2
    events = [TransmitEvent(o, a, index=i*n + j)
                for i, o in enumerate(orientations) for j, a in enumerate(angles)]
    return TransmitSchedule(n, angle_range, events)


class VoxelGrid:
    r"""
    Regular 3D reconstruction grid.

    Volumes defined on the grid are stored with shape ``(nx, ny, nz)``, such
    that ``values[i,j,k]`` is the voxel at :math:`(x_i, y_j, z_k)`.

    Args:
        origin (array-like):
            Coordinates of the first voxel, :math:`(x_0, y_0, z_0)`, in
            meters.
        spacing (array-like):
            Voxel spacing along each axis in meters.
        dims (array-like):
            Number of voxels along each axis.

    Raises:
        ValueError:
            Raised if the spacing is not positive, the dimensions are not
            positive integers, or any voxel is at :math:`z \leq 0`.
    """
    def __init__(self, origin, spacing, dims):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        _dims = np.asarray(dims)
        if self.origin.shape != (3,) or self.spacing.shape != (3,) or _dims.shape != (3,):
            raise ValueError('Origin, spacing, and dimensions must all have 3 elements.')
        if np.any(self.spacing <= 0):
            raise ValueError('Voxel spacing must be positive along all axes.')
        if np.any(_dims.astype(int) != _dims) or np.any(_dims < 1):
            raise ValueError('Grid dimensions must be positive integers.')
        self.dims = tuple(int(d) for d in _dims)
        if self.origin[2] <= 0:
            raise ValueError('All voxels must be at positive depth.')

    @classmethod
    def centered(cls, center, spacing, dims):
        """
        Construct a grid such that voxel ``dims//2`` is exactly at
        ``center``.
        """
        _spacing = np.asarray(spacing, dtype=float)
        _dims = np.asarray(dims, dtype=int)
        return cls(np.asarray(center, dtype=float) - (_dims//2)*_spacing, _spacing, _dims)

    def __repr__(self):
        return f'<{self.__class__.__name__}: dims={self.dims}, ' \
               f'spacing={tuple(np.round(self.spacing*1e3, 4))} mm>'

    def __eq__(self, other):
        return isinstance(other, VoxelGrid) and self.dims == other.dims \
                and np.array_equal(self.origin, other.origin) \
                and np.array_equal(self.spacing, other.spacing)

    @property
    def shape(self):
        return self.dims

    @property
    def size(self):
        """Total number of voxels."""
        return int(np.prod(self.dims))

    @property
    def extent(self):
        """Coordinates of the last voxel along each axis."""
        return self.origin + (np.asarray(self.dims) - 1)*self.spacing

    def axis(self, i):
        """
        Return the coordinates along axis ``i`` (0, 1, 2 for x, y, z).
        """
        return self.origin[i] + np.arange(self.dims[i], dtype=float)*self.spacing[i]

    def coordinates(self, start=0, stop=None):
        """
        Return the coordinates of a contiguous range of voxels.

        Voxels are ordered by their flattened (C-order) index in an array
        with shape :attr:`dims`.

        Args:
            start (:obj:`int`, optional):
                First flattened voxel index.
            stop (:obj:`int`, optional):
                One past the last flattened voxel index.  If None, use all
                voxels.

        Returns:
            :obj:`tuple`: Three vectors with the x, y, and z coordinates.
        """
        _stop = self.size if stop is None else stop
        i, j, k = np.unravel_index(np.arange(start, _stop), self.dims)
        return self.origin[0] + i*self.spacing[0], self.origin[1] + j*self.spacing[1], \
                    self.origin[2] + k*self.spacing[2]

    def position(self, index):
        """
        Return the coordinates of the voxel with 3D index ``index``.
        """
        return self.origin + np.asarray(index, dtype=float)*self.spacing

    def nearest_index(self, position):
        """
        Return the 3D index of the voxel nearest the provided position.

        Raises:
            ValueError:
                Raised if the position is off the grid.
        """
        indx = np.round((np.asarray(position, dtype=float) - self.origin)/self.spacing).astype(int)
        if np.any(indx < 0) or np.any(indx >= np.asarray(self.dims)):
            raise ValueError(f'Position {position} is off the grid.')
        return tuple(indx)

    def to_dict(self):
        return dict(origin=self.origin.tolist(), spacing=self.spacing.tolist(),
                    dims=list(self.dims))

