"""
Export of reconstructed volumes, slices, profiles, and result tables.

.. include:: include/links.rst
"""
import os

from IPython import embed

import numpy as np

from astropy.table import Table

from .models.geometry import VoxelGrid
from .models.compound import EnvelopeVolume, log_compress
from .metrics import find_peak
from .util import fileio

#: Slice planes and the axis held fixed in each
slice_planes = {'xy': 2, 'xz': 1, 'yz': 0}


def export_volume(volume, oroot, grid=None, method=None, config_hash=None, units='linear',
                  overwrite=False):
    """
    Write a volume to a raw data file and a metadata sidecar.

    The data are written to ``oroot + '.raw'`` as little-endian 32-bit
    floats with :math:`x` varying fastest; the sidecar is written to
    ``oroot + '.ini'``.

    Args:
        volume (:class:`~rcafmas.models.compound.EnvelopeVolume`, `numpy.ndarray`_):
            The volume to write.  If an array is provided, ``grid`` must
            also be provided.
        oroot (:obj:`str`):
            Root of the output file names.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`, optional):
            Voxel grid; ignored if ``volume`` is an
            :class:`~rcafmas.models.compound.EnvelopeVolume`.
        method (:obj:`str`, optional):
            Compounding method; taken from ``volume`` if not provided.
        config_hash (:obj:`str`, optional):
            Hash of the configuration that produced the volume.
        units (:obj:`str`, optional):
            Units of the values (e.g., ``'linear'`` or ``'dB'``).
        overwrite (:obj:`bool`, optional):
            Overwrite existing files.

    Returns:
        :obj:`tuple`: The names of the raw and sidecar files.
    """
    if isinstance(volume, EnvelopeVolume):
        values, _grid = volume.values, volume.grid
        _method = volume.method if method is None else method
    else:
        if grid is None:
            raise ValueError('Must provide the voxel grid for an array.')
        values, _grid, _method = volume, grid, method
    if values.shape != _grid.dims:
        raise ValueError('Volume shape does not match the grid.')
    rawfile, metafile = f'{oroot}.raw', f'{oroot}.ini'
    meta = {'volume': {'dims': ', '.join([str(d) for d in _grid.dims]),
                       'spacing_m': ', '.join([f'{s:.10g}' for s in _grid.spacing]),
                       'origin_m': ', '.join([f'{o:.10g}' for o in _grid.origin]),
                       'dtype': 'float32', 'byteorder': 'little', 'order': 'x-fastest',
                       'units': units, 'method': 'none' if _method is None else _method,
                       'config_hash': 'none' if config_hash is None else config_hash,
                       'rawfile': os.path.basename(rawfile)},
            'versions': fileio.version_info()}
    fileio.write_raw(values, rawfile, overwrite=overwrite)
    fileio.write_sidecar(meta, metafile, overwrite=overwrite)
    return rawfile, metafile


def read_volume(oroot):
    """
    Read a volume written by :func:`export_volume`.

    Args:
        oroot (:obj:`str`):
            Root of the file names.

    Returns:
        :obj:`tuple`: The 32-bit volume, its
        :class:`~rcafmas.models.geometry.VoxelGrid`, and the metadata
        dictionary.
    """
    meta = fileio.read_sidecar(f'{oroot}.ini')['volume']
    dims = tuple(int(d) for d in meta['dims'].split(','))
    grid = VoxelGrid([float(o) for o in meta['origin_m'].split(',')],
                     [float(s) for s in meta['spacing_m'].split(',')], dims)
    return fileio.read_raw(f'{oroot}.raw', dims), grid, meta


def slice_image(db_volume, grid, plane, position, dynamic_range_db):
    """
    Extract a slice from a log-compressed volume and map it to 8-bit
    gray levels.

    The range ``[-dynamic_range_db, 0]`` dB is mapped linearly to
    ``[0, 255]``.  Image rows run along the second coordinate of the plane
    (i.e., :math:`y` for ``'xy'`` and :math:`z` for ``'xz'`` and
    ``'yz'``).

    Args:
        db_volume (`numpy.ndarray`_):
            Volume in dB.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        plane (:obj:`str`):
            Slice plane: ``'xy'``, ``'xz'``, or ``'yz'``.
        position (:obj:`float`):
            Coordinate of the slice along the fixed axis in meters.  The
            nearest voxel plane is used.
        dynamic_range_db (:obj:`float`):
            Dynamic range in dB.

    Returns:
        `numpy.ndarray`_: The 8-bit image.

    Raises:
        ValueError:
            Raised if the plane is unknown or the position is off the
            grid.
    """
    if plane not in slice_planes:
        raise ValueError(f'Unknown slice plane {plane}; options are {list(slice_planes)}.')
    axis = slice_planes[plane]
    indx = int(np.round((position - grid.origin[axis])/grid.spacing[axis]))
    if indx < 0 or indx >= grid.dims[axis]:
        raise ValueError(f'Slice position {position*1e3:.3f} mm is off the grid.')
    image = np.take(db_volume, indx, axis=axis).T
    pix = np.round((np.clip(image, -dynamic_range_db, 0.) + dynamic_range_db)
                   / dynamic_range_db * 255)
    return pix.astype(np.uint8)


def export_slice(db_volume, grid, plane, position, ofile, dynamic_range_db=60.,
                 overwrite=False):
    """
    Write a slice of a log-compressed volume as a portable graymap.

    See :func:`slice_image` for the argument descriptions.
    """
    image = slice_image(db_volume, grid, plane, position, dynamic_range_db)
    fileio.write_pgm(image, ofile, overwrite=overwrite)
    return image


def export_profile(db_volume, grid, axis, ofile, index=None, overwrite=False):
    """
    Write a 1D profile through a log-compressed volume to a CSV file.

    The file has two columns: ``position_mm`` and ``amplitude_db``.

    Args:
        db_volume (`numpy.ndarray`_):
            Volume in dB.
        grid (:class:`~rcafmas.models.geometry.VoxelGrid`):
            Voxel grid.
        axis (:obj:`int`):
            Axis of the profile (0, 1, 2 for x, y, z).
        ofile (:obj:`str`):
            Output file name.
        index (:obj:`tuple`, optional):
            3D index of a voxel on the profile line.  If None, use the
            brightest voxel.
        overwrite (:obj:`bool`, optional):
            Overwrite any existing file.

    Returns:
        `astropy.table.Table`_: The written table.
    """
    if index is None:
        index = np.unravel_index(np.argmax(db_volume), db_volume.shape)
    slc = list(index)
    slc[axis] = slice(None)
    tbl = Table([grid.axis(axis)*1e3, db_volume[tuple(slc)]],
                names=['position_mm', 'amplitude_db'])
    write_table(tbl, ofile, overwrite=overwrite)
    return tbl


def write_table(rows, ofile, names=None, overwrite=False):
    """
    Write a table to a CSV file.

    Args:
        rows (:obj:`list`, `astropy.table.Table`_):
            Table rows; each is a list ordered as ``names``.  Can also be a
            pre-built table.
        ofile (:obj:`str`):
            Output file name.
        names (:obj:`list`, optional):
            Column names.  Required if ``rows`` is a list.
        overwrite (:obj:`bool`, optional):
            Overwrite any existing file.

    Returns:
        `astropy.table.Table`_: The written table.
    """
    if isinstance(rows, Table):
        tbl = rows
    else:
        if names is None:
            raise ValueError('Must provide column names.')
        tbl = Table(rows=rows, names=names) if len(rows) > 0 else Table(names=names)
    odir = os.path.dirname(ofile)
    if odir != '' and not os.path.isdir(odir):
        raise NotADirectoryError(f'Output directory {odir} does not exist.')
    tbl.write(ofile, format='ascii.csv', overwrite=overwrite)
    return tbl


def export_envelopes(envelopes, odir, config_hash=None, dynamic_range_db=60., prefix='',
                     overwrite=False):
    """
    Write the standard output set for a list of envelope volumes.

    For each volume, this writes the linear raw volume and sidecar, the
    three orthogonal slices through the peak as graymap images, and the
    lateral (x) and axial (z) profiles through the peak.

    Args:
        envelopes (:obj:`list`):
            The :class:`~rcafmas.models.compound.EnvelopeVolume` objects.
        odir (:obj:`str`):
            Output directory; must exist.
        config_hash (:obj:`str`, optional):
            Configuration hash written to the sidecar files.
        dynamic_range_db (:obj:`float`, optional):
            Dynamic range of the images.
        prefix (:obj:`str`, optional):
            Prefix for all file names.
        overwrite (:obj:`bool`, optional):
            Overwrite existing files.

    Returns:
        :obj:`list`: Names of all written files.
    """
    if not os.path.isdir(odir):
        raise NotADirectoryError(f'{odir} does not exist.')
    files = []
    for env in envelopes:
        root = os.path.join(odir, f'{prefix}{env.method.lower()}')
        files += list(export_volume(env, root, config_hash=config_hash, overwrite=overwrite))
        db = log_compress(env, dynamic_range_db=dynamic_range_db)
        index, position = find_peak(env)
        for plane, axis in slice_planes.items():
            ofile = f'{root}_{plane}.pgm'
            export_slice(db, env.grid, plane, position[axis], ofile,
                         dynamic_range_db=dynamic_range_db, overwrite=overwrite)
            files += [ofile]
        for axis, name in zip([0, 2], ['lateral', 'axial']):
            ofile = f'{root}_{name}_profile.csv'
            export_profile(db, env.grid, axis, ofile, index=index, overwrite=overwrite)
            files += [ofile]
    return files

