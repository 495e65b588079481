"""
Compounding of per-transmission volumes.

Three methods are provided:

    - ``'DAS'``: coherent compounding; the envelope of the sum of all
      volumes.
    - ``'FMAS'``: frame multiply and sum; every pair of volumes is combined
      by their signed geometric mean, and the sum over all pairs is
      envelope detected.
    - ``'RCFMAS'``: frame multiply and sum restricted to pairs with one
      row transmission and one column transmission.

All sums are performed in a fixed order, so the output is reproducible.

.. include:: ../include/links.rst
"""
import time

from IPython import embed

import numpy as np

from .util import to_db

#: Supported compounding methods
methods = ['DAS', 'FMAS', 'RCFMAS']

#: Supported signed-square-root modes
modes = ['complex', 'real']


def parse_method(method):
    """
    Return the standard name of a compounding method.

    Matching is case-insensitive and ignores hyphens and underscores, such
    that ``'rc-fmas'`` is interpreted as ``'RCFMAS'``.
    """
    _method = str(method).upper().replace('-', '').replace('_', '')
    if _method not in methods:
        raise ValueError(f'Unknown compounding method {method}; options are {methods}.')
    return _method


class EnvelopeVolume:
    """
    Envelope-detected (non-negative) volume.

    Args:
        values (`numpy.ndarray`_):
            Voxel amplitudes with shape matching ``grid.dims``.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        method (:obj:`str`):
            Compounding method that produced the volume.
        npairs (:obj:`int`, optional):
            Number of volume pairs combined.  0 for coherent compounding.
        runtime (:obj:`float`, optional):
            Wall-clock compounding time in seconds.
    """
    def __init__(self, values, grid, method, npairs=0, runtime=None):
        if values.shape != grid.dims:
            raise ValueError(f'Volume shape {values.shape} does not match grid {grid.dims}.')
        if np.iscomplexobj(values) or np.any(values < 0):
            raise ValueError('Envelope volumes must be real and non-negative.')
        self.values = values
        self.grid = grid
        self.method = parse_method(method)
        self.npairs = int(npairs)
        self.runtime = runtime

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.method}, dims={self.grid.dims}>'

    def scaled(self, scale):
        if scale < 0:
            raise ValueError('Envelope scale factor must be non-negative.')
        return EnvelopeVolume(self.values*scale, self.grid, self.method, npairs=self.npairs,
                              runtime=self.runtime)


def pair_count_fmas(n_tx):
    """
    Number of distinct pairs of ``n_tx`` volumes.
    """
    if n_tx < 2:
        raise ValueError('Need at least two transmissions to form a pair.')
    return n_tx*(n_tx-1)//2


def pair_count_rcfmas(n_row_tx, n_col_tx):
    """
    Number of row-column pairs.
    """
    if n_row_tx < 1 or n_col_tx < 1:
        raise ValueError('Need at least one row and one column transmission.')
    return n_row_tx*n_col_tx


def signed_sqrt_pair(v_i, v_j, mode='complex'):
    r"""
    Signed geometric mean of two voxel values.

    In ``'real'`` mode, the real parts of the inputs are used and the result
    is :math:`{\rm sign}(v_i v_j) \sqrt{|v_i v_j|}`.  In ``'complex'`` mode,
    with :math:`z = v_i v_j`, the result is :math:`\sqrt{|z|}\, e^{i
    \arg(z)/2}`, where :math:`\arg(z) \in (-\pi, \pi]`.

    Args:
        v_i, v_j (:obj:`complex`, `numpy.ndarray`_):
            Voxel values.
        mode (:obj:`str`, optional):
            ``'complex'`` or ``'real'``.

    Returns:
        :obj:`float`, :obj:`complex`, `numpy.ndarray`_: The signed
        geometric mean.
    """
    if mode == 'real':
        prod = np.real(v_i)*np.real(v_j)
        return np.sign(prod)*np.sqrt(np.absolute(prod))
    if mode != 'complex':
        raise ValueError(f'Unknown mode {mode}; options are {modes}.')
    prod = np.multiply(v_i, v_j, dtype=complex)
    ang = np.angle(prod)
    # Principal branch excludes -pi
    ang = np.where(ang == -np.pi, np.pi, ang)
    return np.sqrt(np.absolute(prod))*np.exp(0.5j*ang)


def _check_grids(volumes):
    grid = volumes[0].grid
    for v in volumes[1:]:
        if v.grid != grid:
            raise ValueError('All volumes must be defined on the same grid.')
    return grid


def _sum_pairs(pairs, mode, shape):
    acc = np.zeros(shape, dtype=float if mode == 'real' else complex)
    npairs = 0
    for v_i, v_j in pairs:
        acc += signed_sqrt_pair(v_i.values, v_j.values, mode=mode)
        npairs += 1
    return np.absolute(acc), npairs


def fmas(volumes, mode='complex'):
    """
    Frame multiply and sum over all pairs of volumes.

    Pairs are summed in lexicographic order, :math:`(i,j)` with :math:`i <
    j`.

    Args:
        volumes (:obj:`list`):
            The :class:`~rcafmas.models.beamform.PerTxVolume` objects.
        mode (:obj:`str`, optional):
            Signed-square-root mode; see :func:`signed_sqrt_pair`.

    Returns:
        :class:`EnvelopeVolume`: The compounded envelope.
    """
    if len(volumes) < 2:
        raise ValueError('FMAS requires at least two volumes.')
    grid = _check_grids(volumes)
    t = time.perf_counter()
    pairs = ((volumes[i], volumes[j]) for i in range(len(volumes))
                for j in range(i+1, len(volumes)))
    values, npairs = _sum_pairs(pairs, mode, grid.dims)
    return EnvelopeVolume(values, grid, 'FMAS', npairs=npairs, runtime=time.perf_counter()-t)


def rc_fmas(row_volumes, col_volumes, mode='complex'):
    """
    Frame multiply and sum over all row-column pairs of volumes.

    No row-row or column-column products are included.  Pairs are summed
    with the row index in the outer loop.

    Args:
        row_volumes (:obj:`list`):
            Volumes from the row transmissions.
        col_volumes (:obj:`list`):
            Volumes from the column transmissions.
        mode (:obj:`str`, optional):
            Signed-square-root mode; see :func:`signed_sqrt_pair`.

    Returns:
        :class:`EnvelopeVolume`: The compounded envelope.
    """
    if len(row_volumes) == 0 or len(col_volumes) == 0:
        raise ValueError('RC-FMAS requires at least one row and one column volume.')
    grid = _check_grids(list(row_volumes) + list(col_volumes))
    t = time.perf_counter()
    pairs = ((r, c) for r in row_volumes for c in col_volumes)
    values, npairs = _sum_pairs(pairs, mode, grid.dims)
    return EnvelopeVolume(values, grid, 'RCFMAS', npairs=npairs, runtime=time.perf_counter()-t)


def coherent_compound(volumes):
    """
    Coherent compounding: the envelope of the sum of all volumes.

    Args:
        volumes (:obj:`list`):
            The :class:`~rcafmas.models.beamform.PerTxVolume` objects.

    Returns:
        :class:`EnvelopeVolume`: The compounded envelope.
    """
    if len(volumes) == 0:
        raise ValueError('Need at least one volume to compound.')
    grid = _check_grids(volumes)
    t = time.perf_counter()
    acc = np.zeros(grid.dims, dtype=complex)
    for v in volumes:
        acc += v.values
    return EnvelopeVolume(np.absolute(acc), grid, 'DAS', runtime=time.perf_counter()-t)


def compound(volumes, method, mode='complex'):
    """
    Compound per-transmission volumes using the named method.

    Args:
        volumes (:obj:`list`):
            All :class:`~rcafmas.models.beamform.PerTxVolume` objects.
            For ``'RCFMAS'``, they are split by the transmit orientation of
            each volume.
        method (:obj:`str`):
            Compounding method; see :func:`parse_method`.
        mode (:obj:`str`, optional):
            Signed-square-root mode used by the multiply-and-sum methods.

    Returns:
        :class:`EnvelopeVolume`: The compounded envelope.
    """
    _method = parse_method(method)
    if _method == 'DAS':
        return coherent_compound(volumes)
    if _method == 'FMAS':
        return fmas(volumes, mode=mode)
    return rc_fmas([v for v in volumes if v.event.orientation == 'row'],
                   [v for v in volumes if v.event.orientation == 'column'], mode=mode)


def log_compress(env, dynamic_range_db=60.):
    """
    Log-compress an envelope volume.

    Args:
        env (:class:`EnvelopeVolume`):
            Envelope volume.
        dynamic_range_db (:obj:`float`, optional):
            Dynamic range in dB; all values are floored at
            ``-dynamic_range_db``.

    Returns:
        `numpy.ndarray`_: Volume in dB relative to its maximum.

    Raises:
        ValueError:
            Raised if the volume is identically zero.
    """
    if dynamic_range_db <= 0:
        raise ValueError('Dynamic range must be positive.')
    vmax = np.amax(env.values)
    if not vmax > 0:
        raise ValueError('Cannot log-compress a volume that is identically zero.')
    return to_db(env.values/vmax, floor=-dynamic_range_db)

