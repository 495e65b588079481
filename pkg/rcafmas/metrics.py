"""
Image-quality metrics for point-spread functions and contrast phantoms.

.. include:: include/links.rst
"""
import warnings

from IPython import embed

import numpy as np

from .models.util import lin_interp, to_db

#: Value reported for the peak-to-side-lobe ratio when no side lobe is found
PMSLR_CAP = 120.

#: Roles of contrast regions
roi_roles = ['tissue1', 'tissue2', 'tissue', 'noise']


def find_peak(env):
    """
    Find the brightest voxel.

    Ties are broken by taking the voxel with the lowest flattened
    (C-order) index.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.

    Returns:
        :obj:`tuple`: The 3D voxel index and the voxel position in meters.

    Raises:
        ValueError:
            Raised if the volume is identically zero.
    """
    if not np.amax(env.values) > 0:
        raise ValueError('Cannot find the peak of a volume that is identically zero.')
    indx = np.unravel_index(np.argmax(env.values), env.values.shape)
    return tuple(int(i) for i in indx), env.grid.position(indx)


def profile(env, axis, index=None):
    """
    Extract the line of voxels along one axis through a voxel.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.
        axis (:obj:`int`):
            Axis of the line (0, 1, 2 for x, y, z).
        index (:obj:`tuple`, optional):
            3D index of a voxel on the line.  If None, use the peak.

    Returns:
        :obj:`tuple`: The coordinates along the axis and the volume
        values.
    """
    _index = find_peak(env)[0] if index is None else tuple(index)
    slc = list(_index)
    slc[axis] = slice(None)
    return env.grid.axis(axis), env.values[tuple(slc)]


def _half_max_crossing(x, y, peak, half, step):
    i = peak
    while 0 <= i + step < y.size:
        if y[i+step] < half:
            return lin_interp(half, y[i+step], x[i+step], y[i], x[i])
        i += step
    return None


def fwhm(env, axis, index=None):
    """
    Full width at half maximum along one axis through the peak.

    The half-maximum crossings on each side of the peak are found by
    linear interpolation between the bracketing voxels.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.
        axis (:obj:`int`):
            Axis (0, 1, 2 for x, y, z).
        index (:obj:`tuple`, optional):
            3D index of the peak.  If None, found using :func:`find_peak`.

    Returns:
        :obj:`float`: The full width in meters.

    Raises:
        ValueError:
            Raised if the profile does not fall below half maximum on both
            sides of the peak within the grid.
    """
    _index = find_peak(env)[0] if index is None else tuple(index)
    x, y = profile(env, axis, index=_index)
    p = _index[axis]
    half = y[p]/2
    lo = _half_max_crossing(x, y, p, half, -1)
    hi = _half_max_crossing(x, y, p, half, 1)
    if lo is None or hi is None:
        raise ValueError(f'Half maximum not crossed on both sides of the peak along axis {axis}.')
    return hi - lo


class PeakRegion:
    """
    Ellipsoidal region around the main lobe of a point-spread function.

    Args:
        center (array-like):
            Ellipsoid center in meters.
        semi_axes (array-like):
            Semi-axes of the ellipsoid in meters.
    """
    def __init__(self, center, semi_axes):
        self.center = np.asarray(center, dtype=float)
        self.semi_axes = np.asarray(semi_axes, dtype=float)
        if self.center.shape != (3,) or self.semi_axes.shape != (3,):
            raise ValueError('Region center and semi-axes must have 3 elements.')
        if np.any(self.semi_axes <= 0):
            raise ValueError('Region semi-axes must be positive.')

    def __repr__(self):
        return f'<{self.__class__.__name__}: center={tuple(np.round(self.center*1e3, 3))} mm, ' \
               f'semi_axes={tuple(np.round(self.semi_axes*1e3, 3))} mm>'

    @classmethod
    def from_envelope(cls, env):
        """
        Define the region using the peak and the per-axis FWHM of a
        volume.
        """
        index, center = find_peak(env)
        return cls(center, [fwhm(env, i, index=index) for i in range(3)])

    def mask(self, grid, scale=1.):
        """
        Return a boolean volume that is True inside the (scaled) region.

        Args:
            grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
                Voxel grid.
            scale (:obj:`float`, optional):
                Factor applied to the semi-axes.

        Returns:
            `numpy.ndarray`_: Boolean array with shape ``grid.dims``.
        """
        x, y, z = np.meshgrid(*[grid.axis(i) for i in range(3)], indexing='ij')
        a = scale*self.semi_axes
        return ((x-self.center[0])/a[0])**2 + ((y-self.center[1])/a[1])**2 \
                    + ((z-self.center[2])/a[2])**2 <= 1


def pir(env, region, intensity=True):
    r"""
    Peak-intensity ratio: the fraction of the total intensity inside the
    main lobe.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.
        region (:class:`PeakRegion`):
            Main-lobe region.
        intensity (:obj:`bool`, optional):
            Sum the square of the envelope.  If False, sum the envelope
            itself.

    Returns:
        :obj:`float`: The ratio, :math:`\in [0,1]`.
    """
    values = env.values**2 if intensity else env.values
    total = np.sum(values)
    if not total > 0:
        raise ValueError('Total intensity is zero.')
    return float(np.sum(values[region.mask(env.grid)])/total)


def max_sidelobe(env, region):
    """
    Amplitude of the brightest voxel outside the side-lobe exclusion zone
    relative to the peak.

    The exclusion zone is the main-lobe region with its semi-axes doubled.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.
        region (:class:`PeakRegion`):
            Main-lobe region.

    Returns:
        :obj:`float`: The linear side-lobe level.
    """
    peak = np.amax(env.values)
    if not peak > 0:
        raise ValueError('Cannot measure side lobes of a volume that is identically zero.')
    exterior = np.logical_not(region.mask(env.grid, scale=2.))
    if not np.any(exterior):
        raise ValueError('Side-lobe exclusion zone covers the full grid.')
    return float(np.amax(env.values[exterior])/peak)


def pmslr(env, region):
    """
    Peak-to-maximum-side-lobe ratio in dB.

    See :func:`max_sidelobe`.  If the volume is identically zero outside
    the exclusion zone, :attr:`PMSLR_CAP` is returned.
    """
    level = max_sidelobe(env, region)
    return PMSLR_CAP if level == 0 else float(-to_db(level))


class RoiBox:
    """
    Axis-aligned box used to measure mean image intensity.

    Args:
        center (array-like):
            Box center in meters.
        half_extents (array-like):
            Half-size of the box along each axis in meters.
        role (:obj:`str`):
            Region role; see :attr:`roi_roles`.
    """
    def __init__(self, center, half_extents, role):
        self.center = np.asarray(center, dtype=float)
        self.half_extents = np.asarray(half_extents, dtype=float)
        if self.center.shape != (3,) or self.half_extents.shape != (3,):
            raise ValueError('ROI center and half-extents must have 3 elements.')
        if np.any(self.half_extents < 0):
            raise ValueError('ROI half-extents cannot be negative.')
        if role not in roi_roles:
            raise ValueError(f'Unknown ROI role {role}; options are {roi_roles}.')
        self.role = role

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.role} at ' \
               f'{tuple(np.round(self.center*1e3, 3))} mm>'

    @property
    def lower(self):
        return self.center - self.half_extents

    @property
    def upper(self):
        return self.center + self.half_extents

    def overlaps(self, other):
        return bool(np.all(self.lower < other.upper) and np.all(other.lower < self.upper))

    def mask(self, grid):
        """
        Return a boolean volume that is True for voxels inside the box.

        Raises:
            ValueError:
                Raised if the box extends beyond the grid or contains no
                voxels.
        """
        tol = grid.spacing/2
        if np.any(self.lower < grid.origin - tol) or np.any(self.upper > grid.extent + tol):
            raise ValueError(f'{self} extends beyond the voxel grid.')
        sel = [np.absolute(grid.axis(i) - self.center[i]) <= self.half_extents[i] + 1e-12
                for i in range(3)]
        mask = sel[0][:,None,None] & sel[1][None,:,None] & sel[2][None,None,:]
        if not np.any(mask):
            raise ValueError(f'{self} contains no voxels.')
        return mask

    def split(self, grid, splits):
        """
        Split the box into sub-boxes along :math:`x`.

        The :math:`x` columns of voxels in the box are divided as evenly as
        possible using `numpy.array_split`_.

        Returns:
            :obj:`list`: Boolean masks for each sub-box.

        Raises:
            ValueError:
                Raised if the box has fewer :math:`x` columns than
                ``splits``.
        """
        if splits < 1:
            raise ValueError('Number of splits must be positive.')
        mask = self.mask(grid)
        columns = np.where(np.any(mask, axis=(1,2)))[0]
        if columns.size < splits:
            raise ValueError(f'{self} spans only {columns.size} voxels along x; cannot split '
                             f'into {splits} sub-regions.')
        masks = []
        for cols in np.array_split(columns, splits):
            m = np.zeros_like(mask)
            m[cols] = mask[cols]
            masks += [m]
        return masks


def _mean_ratio_db(env, roi_a, roi_b):
    if roi_a.overlaps(roi_b):
        raise ValueError(f'{roi_a} and {roi_b} overlap.')
    if not np.isclose(roi_a.center[2], roi_b.center[2]):
        warnings.warn(f'{roi_a} and {roi_b} are not at the same depth.')
    mu_a = np.mean(env.values[roi_a.mask(env.grid)])
    mu_b = np.mean(env.values[roi_b.mask(env.grid)])
    if not mu_b > 0:
        raise ValueError(f'Mean envelope in {roi_b} is zero.')
    return float(to_db(mu_a/mu_b))


def tcr(env, roi_t1, roi_t2):
    """
    Tissue contrast ratio: :math:`20\\log_{10}(\\mu_1/\\mu_2)` for the mean
    envelope inside a highly scattering region and a tissue region at the
    same depth.
    """
    return _mean_ratio_db(env, roi_t1, roi_t2)


def tnr(env, roi_tissue, roi_noise):
    """
    Tissue-to-noise ratio: :math:`20\\log_{10}(\\mu_T/\\mu_N)` for the mean
    envelope inside a tissue region and an anechoic region.
    """
    return _mean_ratio_db(env, roi_tissue, roi_noise)


def _mean_stderr(values):
    values = np.asarray(values, dtype=float)
    if values.size == 1:
        return float(values[0]), 0.
    return float(np.mean(values)), float(np.std(values, ddof=1)/np.sqrt(values.size))


def subregion_stats(env, roi, splits=4):
    """
    Mean envelope of a region, measured separately in lateral sub-regions.

    Args:
        env (:class:`~rcafmas.models.compound.EnvelopeVolume`):
            Envelope volume.
        roi (:class:`RoiBox`):
            Region.
        splits (:obj:`int`, optional):
            Number of sub-regions along :math:`x`.

    Returns:
        :obj:`tuple`: The mean of the sub-region means and its standard
        error.
    """
    return _mean_stderr([np.mean(env.values[m]) for m in roi.split(env.grid, splits)])


def subregion_ratio_db(env, roi_a, roi_b, splits=4):
    """
    Ratio of region means in dB, measured separately in lateral
    sub-regions.

    Both regions are split into ``splits`` sub-regions along :math:`x`;
    the ratio is computed for each pair of sub-regions.

    Returns:
        :obj:`tuple`: The mean ratio in dB and its standard error.
    """
    if roi_a.overlaps(roi_b):
        raise ValueError(f'{roi_a} and {roi_b} overlap.')
    ratios = []
    for ma, mb in zip(roi_a.split(env.grid, splits), roi_b.split(env.grid, splits)):
        mu_b = np.mean(env.values[mb])
        if not mu_b > 0:
            raise ValueError(f'Mean envelope in a sub-region of {roi_b} is zero.')
        ratios += [to_db(np.mean(env.values[ma])/mu_b)]
    return _mean_stderr(ratios)


class MetricsReport:
    """
    Image-quality metrics for one compounding method and configuration.

    Metrics that do not apply to an experiment are set to ``numpy.nan``.

    Args:
        method (:obj:`str`):
            Compounding method.
        n_angles (:obj:`int`):
            Total number of transmissions.
        range_deg (:obj:`float`):
            Full angle range in degrees.
        depth (:obj:`float`):
            Depth of the target in meters.
        fwhm (array-like, optional):
            FWHM along x, y, and z in meters.
        pir (:obj:`float`, optional):
            Peak-intensity ratio.
        pmslr_db (:obj:`float`, optional):
            Peak-to-maximum-side-lobe ratio in dB.
        tcr_db (:obj:`float`, optional):
            Tissue contrast ratio in dB.
        tnr_db (:obj:`float`, optional):
            Tissue-to-noise ratio in dB.
        pair_count (:obj:`int`, optional):
            Number of volume pairs combined.
        runtime (:obj:`float`, optional):
            Compounding runtime in seconds.
    """
    #: Table columns produced by :func:`to_row`
    columns = ['method', 'n_angles', 'range_deg', 'depth_mm', 'fwhm_x_mm', 'fwhm_y_mm',
               'fwhm_z_mm', 'pir', 'pmslr_db', 'tcr_db', 'tnr_db', 'pair_count', 'runtime_s']

    def __init__(self, method, n_angles, range_deg, depth, fwhm=None, pir=np.nan,
                 pmslr_db=np.nan, tcr_db=np.nan, tnr_db=np.nan, pair_count=0, runtime=np.nan):
        self.method = method
        self.n_angles = int(n_angles)
        self.range_deg = float(range_deg)
        self.depth = float(depth)
        _fwhm = np.full(3, np.nan) if fwhm is None else np.asarray(fwhm, dtype=float)
        if np.any(_fwhm <= 0):
            raise ValueError('FWHM must be positive.')
        self.fwhm_x, self.fwhm_y, self.fwhm_z = _fwhm
        if pir < 0 or pir > 1:
            raise ValueError(f'PIR must be in [0,1], not {pir}.')
        self.pir = float(pir)
        self.pmslr_db = float(pmslr_db)
        self.tcr_db = float(tcr_db)
        self.tnr_db = float(tnr_db)
        self.pair_count = int(pair_count)
        self.runtime = np.nan if runtime is None else float(runtime)

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.method}, {self.n_angles} angles, ' \
               f'{self.range_deg} deg>'

    def to_row(self):
        """
        Return the report as a list ordered as :attr:`columns`, with
        lengths in millimeters.
        """
        return [self.method, self.n_angles, self.range_deg, self.depth*1e3, self.fwhm_x*1e3,
                self.fwhm_y*1e3, self.fwhm_z*1e3, self.pir, self.pmslr_db, self.tcr_db,
                self.tnr_db, self.pair_count, self.runtime]


def psf_report(envelopes, n_angles, range_deg, depth, region=None):
    """
    Measure the point-spread-function metrics for a set of compounded
    volumes.

    The same main-lobe region is used for all volumes.  If not provided,
    it is defined by the DAS volume, or the first volume if DAS is not
    included.

    Args:
        envelopes (:obj:`list`):
            The :class:`~rcafmas.models.compound.EnvelopeVolume` objects.
        n_angles (:obj:`int`):
            Total number of transmissions.
        range_deg (:obj:`float`):
            Full angle range in degrees.
        depth (:obj:`float`):
            Depth of the point target in meters.
        region (:class:`PeakRegion`, optional):
            Main-lobe region.

    Returns:
        :obj:`tuple`: The list of :class:`MetricsReport` objects, one per
        volume, and the region used.
    """
    if len(envelopes) == 0:
        raise ValueError('No volumes provided.')
    if region is None:
        ref = [e for e in envelopes if e.method == 'DAS']
        region = PeakRegion.from_envelope(ref[0] if len(ref) > 0 else envelopes[0])
    reports = []
    for env in envelopes:
        index = find_peak(env)[0]
        reports += [MetricsReport(env.method, n_angles, range_deg, depth,
                                  fwhm=[fwhm(env, i, index=index) for i in range(3)],
                                  pir=pir(env, region), pmslr_db=pmslr(env, region),
                                  pair_count=env.npairs, runtime=env.runtime)]
    return reports, region

