"""
Low-level file I/O: raw volumes, key-value sidecars, and graymap images.

.. include:: ../include/links.rst
"""
import sys
import os
from configparser import ConfigParser

from IPython import embed

import numpy
import scipy
import astropy
import PIL
from PIL import Image, UnidentifiedImageError

from .. import __version__


def version_info():
    """
    Return the versions of python and the main packages used.
    """
    return {'python': '.'.join([str(v) for v in sys.version_info[:3]]),
            'numpy': numpy.__version__, 'scipy': scipy.__version__,
            'astropy': astropy.__version__, 'pillow': PIL.__version__,
            'rcafmas': __version__}


def _check_output(ofile, overwrite):
    if os.path.isfile(ofile) and not overwrite:
        raise FileExistsError(f'{ofile} exists!  Set overwrite=True to overwrite it.')
    odir = os.path.dirname(ofile)
    if odir != '' and not os.path.isdir(odir):
        raise NotADirectoryError(f'Output directory {odir} does not exist.')


def write_raw(values, ofile, overwrite=False):
    """
    Write an array as raw little-endian 32-bit floats.

    The first axis varies fastest in the file (Fortran order); i.e., for a
    volume with shape ``(nx, ny, nz)``, :math:`x` is the fastest axis.

    Args:
        values (`numpy.ndarray`_):
            Array to write.
        ofile (:obj:`str`):
            Output file name.
        overwrite (:obj:`bool`, optional):
            Overwrite any existing file.
    """
    _check_output(ofile, overwrite)
    numpy.asarray(values, dtype='<f4').ravel(order='F').tofile(ofile)


def read_raw(ifile, shape):
    """
    Read a raw volume written by :func:`write_raw`.

    Args:
        ifile (:obj:`str`):
            Input file name.
        shape (:obj:`tuple`):
            Shape of the array.

    Returns:
        `numpy.ndarray`_: The array with 32-bit float type.
    """
    if not os.path.isfile(ifile):
        raise FileNotFoundError(f'{ifile} does not exist.')
    data = numpy.fromfile(ifile, dtype='<f4')
    if data.size != numpy.prod(shape):
        raise ValueError(f'{ifile} has {data.size} values; expected {numpy.prod(shape)}.')
    return data.reshape(shape, order='F')


def write_sidecar(meta, ofile, overwrite=False):
    """
    Write metadata to a human-readable ini file.

    Args:
        meta (:obj:`dict`):
            Dictionary of sections, each a dictionary of key-value pairs.
            All values are converted to strings.
        ofile (:obj:`str`):
            Output file name.
        overwrite (:obj:`bool`, optional):
            Overwrite any existing file.
    """
    _check_output(ofile, overwrite)
    cnfg = ConfigParser()
    for section, values in meta.items():
        cnfg[section] = {k: str(v) for k, v in values.items()}
    with open(ofile, 'w') as f:
        cnfg.write(f)


def read_sidecar(ifile):
    """
    Read a metadata file written by :func:`write_sidecar`.

    Returns:
        :obj:`dict`: Dictionary of sections with the key-value pairs as
        strings.
    """
    if not os.path.isfile(ifile):
        raise FileNotFoundError(f'Could not find ini file: {ifile}')
    cnfg = ConfigParser()
    cnfg.read(ifile)
    return {s: dict(cnfg[s]) for s in cnfg.sections()}


def write_pgm(image, ofile, overwrite=False):
    """
    Write an 8-bit grayscale image in binary portable-graymap format.

    Args:
        image (`numpy.ndarray`_):
            2D array with values in [0,255]; the first axis is the image
            row (top to bottom).
        ofile (:obj:`str`):
            Output file name.
        overwrite (:obj:`bool`, optional):
            Overwrite any existing file.
    """
    if image.ndim != 2:
        raise ValueError('Graymap images must be 2D.')
    _check_output(ofile, overwrite)
    # Pillow maps a 2D uint8 array to mode 'L', which PPM writes as P5
    Image.fromarray(numpy.clip(image, 0, 255).astype(numpy.uint8)).save(ofile, format='PPM')


def read_pgm(ifile):
    """
    Read an 8-bit portable-graymap image, e.g. one written by
    :func:`write_pgm`.

    Returns:
        `numpy.ndarray`_: The 8-bit image.
    """
    if not os.path.isfile(ifile):
        raise FileNotFoundError(f'{ifile} does not exist.')
    try:
        img = Image.open(ifile)
    except UnidentifiedImageError as e:
        raise ValueError(f'{ifile} is not an image file.') from e
    with img:
        if img.format != 'PPM' or img.mode != 'L':
            raise ValueError(f'{ifile} is not an 8-bit graymap.')
        return numpy.asarray(img, dtype=numpy.uint8)
