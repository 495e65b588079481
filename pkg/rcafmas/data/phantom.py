"""
Point-scatterer phantoms.

Two phantoms are provided: a set of unit point targets along the probe axis
(used to measure the point-spread function) and a speckle phantom with
pairs of highly scattering and anechoic tubes (used to measure contrast).

.. include:: ../include/links.rst
"""

from IPython import embed

import numpy as np

from ..metrics import RoiBox

#: Roles of labeled phantom regions
region_roles = ['high', 'anechoic', 'background']


class Scatterer:
    """
    A single point scatterer.

    Args:
        position (array-like):
            Cartesian position in meters.
        amplitude (:obj:`float`, optional):
            Scattering amplitude (reflectivity).
    """
    def __init__(self, position, amplitude=1.):
        self.position = np.asarray(position, dtype=float)
        if self.position.shape != (3,):
            raise ValueError('Scatterer position must have 3 coordinates.')
        if self.position[2] <= 0:
            raise ValueError('Scatterers must be at positive depth.')
        self.amplitude = float(amplitude)

    def __repr__(self):
        return f'<{self.__class__.__name__}: {tuple(np.round(self.position*1e3, 3))} mm, ' \
               f'a={self.amplitude:.3f}>'


class Region:
    """
    A labeled region of a phantom.

    Only two shapes are supported: tubes (``'tube'``) running along the
    :math:`y` axis, and axis-aligned boxes (``'box'``).

    Args:
        shape (:obj:`str`):
            Region shape: ``'tube'`` or ``'box'``.
        center (array-like):
            Region center in meters.  For tubes, only the :math:`x` and
            :math:`z` coordinates are relevant.
        size (:obj:`float`, array-like):
            For tubes, the radius; for boxes, the half-extents along each
            axis.
        role (:obj:`str`):
            Region role; see :attr:`region_roles`.
    """
    def __init__(self, shape, center, size, role):
        if shape not in ['tube', 'box']:
            raise ValueError(f'Unknown region shape: {shape}')
        if role not in region_roles:
            raise ValueError(f'Unknown region role: {role}')
        self.shape = shape
        self.center = np.asarray(center, dtype=float)
        self.size = float(size) if shape == 'tube' else np.asarray(size, dtype=float)
        self.role = role

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.role} {self.shape} at ' \
               f'{tuple(np.round(self.center*1e3, 3))} mm>'

    def contains(self, positions):
        """
        Determine which of a set of positions are inside the region.

        Args:
            positions (`numpy.ndarray`_):
                Array with shape :math:`(N,3)`.

        Returns:
            `numpy.ndarray`_: Boolean vector that is True for positions
            inside the region (including its boundary).
        """
        _pos = np.atleast_2d(positions)
        if self.shape == 'tube':
            return (_pos[:,0] - self.center[0])**2 + (_pos[:,2] - self.center[2])**2 \
                        <= self.size**2
        return np.all(np.absolute(_pos - self.center[None,:]) <= self.size[None,:], axis=1)


class Phantom:
    """
    A collection of point scatterers and labeled regions.

    Scatterers are stored as vectors for efficiency; use :attr:`scatterers`
    to get the list of :class:`Scatterer` objects.

    Args:
        positions (`numpy.ndarray`_, optional):
            Scatterer positions with shape :math:`(N,3)` in meters.  If
            None, the phantom is empty.
        amplitudes (`numpy.ndarray`_, optional):
            Scatterer amplitudes.  If None, all are set to 1.
        regions (:obj:`list`, optional):
            The :class:`Region` objects of the phantom.

    Raises:
        ValueError:
            Raised if any scatterer is at non-positive depth or inside an
            anechoic region.
    """
    def __init__(self, positions=None, amplitudes=None, regions=None):
        self.positions = np.zeros((0,3), dtype=float) if positions is None \
                            else np.atleast_2d(np.asarray(positions, dtype=float))
        if self.positions.shape[1] != 3:
            raise ValueError('Scatterer positions must have shape (N,3).')
        self.amplitudes = np.ones(self.nscatterers, dtype=float) if amplitudes is None \
                            else np.atleast_1d(np.asarray(amplitudes, dtype=float))
        if self.amplitudes.shape != (self.nscatterers,):
            raise ValueError('Must provide one amplitude per scatterer.')
        if np.any(self.positions[:,2] <= 0):
            raise ValueError('All scatterers must be at positive depth.')
        self.regions = [] if regions is None else list(regions)
        for r in self.regions:
            if r.role == 'anechoic' and np.any(r.contains(self.positions)):
                raise ValueError(f'Scatterers found inside anechoic region {r}.')

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.nscatterers} scatterers, ' \
               f'{len(self.regions)} regions>'

    @property
    def nscatterers(self):
        return self.positions.shape[0]

    @property
    def scatterers(self):
        return [Scatterer(p, a) for p, a in zip(self.positions, self.amplitudes)]

    @classmethod
    def from_scatterers(cls, scatterers, regions=None):
        """
        Construct a phantom from a list of :class:`Scatterer` objects.
        """
        if len(scatterers) == 0:
            return cls(regions=regions)
        return cls(positions=np.array([s.position for s in scatterers]),
                   amplitudes=np.array([s.amplitude for s in scatterers]), regions=regions)

    def mirrored(self, axis=0):
        """
        Return a copy with the scatterer coordinates reflected about 0 along
        the provided lateral axis (0 for :math:`x`, 1 for :math:`y`).
        """
        if axis not in [0, 1]:
            raise ValueError('Can only mirror along x (0) or y (1).')
        positions = self.positions.copy()
        positions[:,axis] *= -1
        regions = []
        for r in self.regions:
            center = r.center.copy()
            center[axis] *= -1
            regions += [Region(r.shape, center, r.size, r.role)]
        return Phantom(positions=positions, amplitudes=self.amplitudes.copy(), regions=regions)

    def scaled(self, scale):
        """
        Return a copy with all scatterer amplitudes multiplied by ``scale``.
        """
        return Phantom(positions=self.positions.copy(), amplitudes=self.amplitudes*scale,
                       regions=self.regions)

    def __add__(self, other):
        return Phantom(positions=np.vstack((self.positions, other.positions)),
                       amplitudes=np.append(self.amplitudes, other.amplitudes),
                       regions=self.regions + other.regions)

    def regions_with_role(self, role):
        return [r for r in self.regions if r.role == role]


def make_point_phantom(depths):
    """
    Construct a phantom with one unit scatterer on the probe axis at each
    provided depth.

    Args:
        depths (array-like):
            Scatterer depths in meters.  Can be empty.

    Returns:
        :class:`Phantom`: Phantom with one scatterer per depth at
        :math:`(0,0,z)`.
    """
    _depths = np.atleast_1d(np.asarray(depths, dtype=float))
    if _depths.size == 0:
        return Phantom()
    return Phantom(positions=np.column_stack((np.zeros(_depths.size), np.zeros(_depths.size),
                                              _depths)))


def resolution_cell(geom, depth):
    r"""
    Volume of the imaging resolution cell at a given depth.

    The lateral size along both :math:`x` and :math:`y` is approximated by
    the diffraction limit, :math:`\lambda z / D`, where :math:`D` is the
    aperture size; the axial size is :math:`c/(2 B)`, where :math:`B` is the
    pulse bandwidth.

    Args:
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry.
        depth (:obj:`float`):
            Reference depth in meters.

    Returns:
        :obj:`float`: Cell volume in cubic meters.
    """
    if depth <= 0:
        raise ValueError('Reference depth must be positive.')
    dx = geom.wavelength * depth / geom.aperture('row')
    dy = geom.wavelength * depth / geom.aperture('column')
    dz = geom.sound_speed / 2 / geom.bandwidth
    return dx*dy*dz


class CystSpec:
    """
    Layout of the tube phantom.

    At each depth, a highly scattering tube is placed at :math:`x =
    -\\mathrm{offset}` and an anechoic tube at :math:`x = +\\mathrm{offset}`.
    All tubes run along :math:`y`.  Background scatterers fill a box that
    covers all tubes with a margin.

    Args:
        radius (:obj:`float`, optional):
            Tube radius in meters.
        depths (array-like, optional):
            Tube depths in meters.
        offset (:obj:`float`, optional):
            Lateral offset of each tube from :math:`x=0` in meters.
        high_scale (:obj:`float`, optional):
            Amplitude multiplier for scatterers inside the highly
            scattering tubes.
        density (:obj:`float`, optional):
            Number of scatterers per resolution cell; must be at least 5
            for fully developed speckle.
        margin (:obj:`float`, optional):
            Distance in meters between the outermost tube edges and the
            edge of the background box along :math:`x` and :math:`z`.
        half_width_y (:obj:`float`, optional):
            Half-width of the background box along the tube axis in
            meters.
        roi_half_y (:obj:`float`, optional):
            Half-extent of the contrast regions along the tube axis in
            meters.
    """
    def __init__(self, radius=3e-3, depths=(15e-3, 35e-3, 55e-3, 75e-3), offset=5e-3,
                 high_scale=10., density=10., margin=2e-3, half_width_y=1.5e-3,
                 roi_half_y=0.5e-3):
        self.radius = float(radius)
        self.depths = np.sort(np.atleast_1d(np.asarray(depths, dtype=float)))
        self.offset = float(offset)
        self.high_scale = float(high_scale)
        self.density = float(density)
        self.margin = float(margin)
        self.half_width_y = float(half_width_y)
        self.roi_half_y = float(roi_half_y)

        if self.radius <= 0:
            raise ValueError('Tube radius must be positive.')
        if self.depths.size == 0:
            raise ValueError('Must provide at least one tube depth.')
        if self.high_scale <= 1:
            raise ValueError('High-scatter amplitude multiplier must be larger than 1.')
        if self.density < 5:
            raise ValueError(f'Scatterer density ({self.density}) is below 5 per resolution cell; '
                             'speckle would not be fully developed.')
        if self.margin < 0 or self.half_width_y <= 0 or self.roi_half_y <= 0:
            raise ValueError('Phantom margins and widths must be positive.')
        if self.roi_half_y > self.half_width_y:
            raise ValueError('Contrast regions cannot extend beyond the background box.')
        if self.depths[0] - self.radius - self.margin <= 0:
            raise ValueError('Shallowest tube is too close to the probe surface.')
        if self.tissue_half_x() <= 0:
            raise ValueError('Tubes are too close to fit a tissue region between them.')

    @property
    def field_half_x(self):
        return self.offset + self.radius + self.margin

    @property
    def zlim(self):
        """Depth range of the background box."""
        return np.array([self.depths[0] - self.radius - self.margin,
                         self.depths[-1] + self.radius + self.margin])

    @property
    def field_volume(self):
        """Volume of the background box in cubic meters."""
        return 2*self.field_half_x * 2*self.half_width_y * np.diff(self.zlim)[0]

    def tissue_half_x(self):
        """
        Lateral half-extent of the tissue region placed between the tubes.
        """
        return min(self.radius/np.sqrt(2), (self.offset - self.radius) - 0.25e-3)

    def tubes(self):
        """
        Return the list of tube :class:`Region` objects.

        Raises:
            ValueError:
                Raised if any two tubes overlap.
        """
        tubes = []
        for z in self.depths:
            tubes += [Region('tube', [-self.offset, 0., z], self.radius, 'high'),
                      Region('tube', [self.offset, 0., z], self.radius, 'anechoic')]
        for i in range(len(tubes)):
            for j in range(i+1, len(tubes)):
                d = np.sqrt((tubes[i].center[0]-tubes[j].center[0])**2
                            + (tubes[i].center[2]-tubes[j].center[2])**2)
                if d < tubes[i].size + tubes[j].size:
                    raise ValueError(f'Tubes {tubes[i]} and {tubes[j]} overlap.')
        return tubes

    def background(self):
        """
        Return the background box :class:`Region`.
        """
        return Region('box', [0., 0., np.mean(self.zlim)],
                      [self.field_half_x, self.half_width_y, np.diff(self.zlim)[0]/2],
                      'background')


def make_cyst_phantom(geom, spec=None, rng=None):
    """
    Construct the tube phantom.

    Background scatterers are uniformly distributed within the background
    box, with normally distributed amplitudes.  Scatterers that fall inside
    an anechoic tube are rejected and redrawn, such that the total number
    of scatterers is the requested density times the number of resolution
    cells in the background box.  Scatterers inside a highly scattering
    tube have their amplitude multiplied by ``spec.high_scale``.

    Args:
        geom (:class:`~rcafmas.models.geometry.ProbeGeometry`):
            Probe geometry, used to define the resolution cell.
        spec (:class:`CystSpec`, optional):
            Phantom layout.  If None, use the defaults.
        rng (`numpy.random.Generator`_, optional):
            Random number generator.  If None, a new unseeded generator is
            used.

    Returns:
        :class:`Phantom`: The phantom with the tube and background regions.
    """
    _spec = CystSpec() if spec is None else spec
    _rng = np.random.default_rng() if rng is None else rng

    tubes = _spec.tubes()
    background = _spec.background()
    cell = resolution_cell(geom, np.mean(_spec.depths))
    nscat = int(np.round(_spec.density * _spec.field_volume / cell))

    lo = background.center - background.size
    hi = background.center + background.size
    anechoic = [t for t in tubes if t.role == 'anechoic']
    positions = np.zeros((0,3), dtype=float)
    while positions.shape[0] < nscat:
        ndraw = int(1.2*(nscat - positions.shape[0])) + 1
        p = _rng.uniform(lo, hi, size=(ndraw,3))
        keep = np.logical_not(np.any([t.contains(p) for t in anechoic], axis=0))
        positions = np.vstack((positions, p[keep]))
    positions = positions[:nscat]

    amplitudes = _rng.normal(size=nscat)
    for t in tubes:
        if t.role == 'high':
            amplitudes[t.contains(positions)] *= _spec.high_scale

    return Phantom(positions=positions, amplitudes=amplitudes, regions=tubes + [background])


def cyst_rois(spec, depth):
    """
    Construct the contrast regions at one tube depth.

    Four regions are returned, keyed by their role:

        - ``'tissue1'``: square inscribed in the highly scattering tube,
        - ``'tissue2'``: tissue region between the two tubes,
        - ``'tissue'``: same as ``'tissue2'``, used for the tissue-to-noise
          ratio,
        - ``'noise'``: square inscribed in the anechoic tube.

    Args:
        spec (:class:`CystSpec`):
            Phantom layout.
        depth (:obj:`float`):
            One of the tube depths in meters.

    Returns:
        :obj:`dict`: Dictionary with the :class:`~rcafmas.metrics.RoiBox`
        objects.
    """
    if not np.any(np.isclose(spec.depths, depth, rtol=0., atol=1e-9)):
        raise ValueError(f'No tubes at depth {depth*1e3:.2f} mm.')
    h = spec.radius/np.sqrt(2)
    hy = min(h, spec.roi_half_y)
    tissue = [spec.tissue_half_x(), hy, h]
    return {'tissue1': RoiBox([-spec.offset, 0., depth], [h, hy, h], 'tissue1'),
            'tissue2': RoiBox([0., 0., depth], tissue, 'tissue2'),
            'tissue': RoiBox([0., 0., depth], tissue, 'tissue'),
            'noise': RoiBox([spec.offset, 0., depth], [h, hy, h], 'noise')}

