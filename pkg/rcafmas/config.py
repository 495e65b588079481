"""
Experiment configuration.

Configurations are read from and written to ini files.  Quantities in the
files use practical units (mm, MHz, degrees, dB); the attributes of
:class:`ExperimentConfig` are always in SI units.  An example file::

    [probe]
    num_rows = 32
    num_cols = 32
    pitch_mm = 0.2
    center_frequency_mhz = 5
    bandwidth_mhz = 6
    sampling_frequency_mhz = 40
    sound_speed = 1540

    [schedule]
    angles = 10
    range_deg = 10

    [phantom]
    type = point
    depths_mm = 50

    [grid]
    center_mm = 0, 0, 50
    spacing_mm = 0.4, 0.4, 0.1
    dims = 48, 48, 48

See the packaged defaults in ``rcafmas/data/config`` for all options.

.. include:: include/links.rst
"""
import os
import copy
import json
import hashlib
from configparser import ConfigParser

from IPython import embed

import numpy as np

from . import __version__
from .models.geometry import ProbeGeometry, VoxelGrid, make_schedule
from .models.compound import parse_method, modes
from .models.sigproc import design_lowpass
from .data.phantom import CystSpec, cyst_rois, make_point_phantom, make_cyst_phantom
from .data.synth import PulseModel

#: Directory with the packaged configuration files
config_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', 'config')

#: Supported phantoms
phantom_types = ['point', 'cyst']


def _floats(value):
    return [float(v) for v in value.replace(',', ' ').split()]


def _ints(value):
    return [int(v) for v in value.replace(',', ' ').split()]


def _fmt(values, scale=1.):
    return ', '.join([f'{v*scale:.10g}' for v in np.atleast_1d(values)])


class ExperimentConfig:
    """
    Parameters of a simulation and reconstruction experiment.

    All arguments are optional and default to the desk-scale point-target
    experiment.  Lengths are in meters, frequencies in Hz, and angles in
    radians.

    Args:
        num_rows, num_cols (:obj:`int`):
            Number of row and column elements.
        pitch (:obj:`float`):
            Element pitch.
        center_frequency (:obj:`float`):
            Transmit center frequency.
        bandwidth (:obj:`float`):
            Pulse bandwidth (-6 dB).
        sampling_frequency (:obj:`float`):
            RF sampling frequency.
        sound_speed (:obj:`float`):
            Sound speed in m/s.
        n_angles (:obj:`int`):
            Total number of transmissions; half are row and half are
            column transmissions.
        angle_range (:obj:`float`):
            Full span of steering angles.
        phantom (:obj:`str`):
            Phantom type: ``'point'`` or ``'cyst'``.
        depths (array-like):
            Depths of the point targets or the tubes.
        cyst (:obj:`dict`):
            Additional keyword arguments for
            :class:`~rcafmas.data.phantom.CystSpec`.
        grid_center, grid_spacing, grid_dims (array-like):
            Voxel grid definition; see
            :func:`~rcafmas.models.geometry.VoxelGrid.centered`.
        snr_db (:obj:`float`):
            Signal-to-noise ratio of the added noise.  If None, no noise is
            added.
        tx_alpha, rx_alpha (:obj:`float`):
            Tukey parameters of the transmit and receive apodization.
        decimation (:obj:`int`):
            Decimation factor of the baseband data.
        cutoff (:obj:`float`):
            Low-pass cutoff frequency.  If None, half the bandwidth.
        transition (:obj:`float`):
            Transition width of the low-pass filter.
        mode (:obj:`str`):
            Signed-square-root mode for the multiply-and-sum methods.
        dynamic_range_db (:obj:`float`):
            Dynamic range of log-compressed outputs.
        methods (:obj:`list`):
            Compounding methods.
        seed (:obj:`int`):
            Base random seed.
        cores (:obj:`int`):
            Number of processes.
        splits (:obj:`int`):
            Number of lateral sub-regions used for the contrast error
            estimates.
        output_dir (:obj:`str`):
            Output directory.
        full (:obj:`bool`):
            Flag that this is a full-scale configuration.
    """
    def __init__(self, num_rows=32, num_cols=32, pitch=0.2e-3, center_frequency=5e6,
                 bandwidth=6e6, sampling_frequency=40e6, sound_speed=1540., n_angles=10,
                 angle_range=np.radians(10.), phantom='point', depths=(50e-3,), cyst=None,
                 grid_center=(0., 0., 50e-3), grid_spacing=(0.4e-3, 0.4e-3, 0.1e-3),
                 grid_dims=(48, 48, 48), snr_db=20., tx_alpha=0.5, rx_alpha=0.5, decimation=2,
                 cutoff=None, transition=1e6, mode='complex', dynamic_range_db=60.,
                 methods=('DAS', 'FMAS', 'RCFMAS'), seed=1, cores=1, splits=4,
                 output_dir='rcafmas_output', full=False):
        self.num_rows = num_rows
        self.num_cols = num_cols
        self.pitch = pitch
        self.center_frequency = center_frequency
        self.bandwidth = bandwidth
        self.sampling_frequency = sampling_frequency
        self.sound_speed = sound_speed
        self.n_angles = n_angles
        self.angle_range = angle_range
        self.phantom = phantom
        self.depths = list(np.atleast_1d(depths).astype(float))
        self.cyst = {} if cyst is None else dict(cyst)
        self.grid_center = list(np.asarray(grid_center, dtype=float))
        self.grid_spacing = list(np.asarray(grid_spacing, dtype=float))
        self.grid_dims = [int(d) for d in grid_dims]
        self.snr_db = snr_db
        self.tx_alpha = tx_alpha
        self.rx_alpha = rx_alpha
        self.decimation = decimation
        self.cutoff = cutoff
        self.transition = transition
        self.mode = mode
        self.dynamic_range_db = dynamic_range_db
        self.methods = [parse_method(m) for m in methods]
        self.seed = seed
        self.cores = cores
        self.splits = splits
        self.output_dir = output_dir
        self.full = full

    def __repr__(self):
        return f'<{self.__class__.__name__}: {self.phantom}, {self.n_angles} angles, ' \
               f'{np.degrees(self.angle_range):.1f} deg, methods={self.methods}>'

    @classmethod
    def default(cls, name):
        """
        Read one of the packaged configurations.

        Args:
            name (:obj:`str`):
                Configuration name; e.g., ``'psf'`` or ``'cyst'``.
        """
        return cls.from_ini_file(os.path.join(config_dir, f'{name}.ini'))

    @classmethod
    def from_ini_file(cls, f):
        """
        Construct the configuration from an ini file.

        Any missing option takes its default value.

        Args:
            f (:obj:`str`):
                File name.

        Returns:
            :class:`ExperimentConfig`: The configuration.

        Raises:
            FileNotFoundError:
                Raised if the file does not exist.
        """
        if not os.path.isfile(f):
            raise FileNotFoundError(f'Could not find ini file: {f}')
        cnfg = ConfigParser()
        cnfg.read(f)

        kwargs = {}
        if cnfg.has_section('probe'):
            p = cnfg['probe']
            for key in ['num_rows', 'num_cols']:
                if key in p:
                    kwargs[key] = p.getint(key)
            if 'pitch_mm' in p:
                kwargs['pitch'] = p.getfloat('pitch_mm')*1e-3
            for key in ['center_frequency', 'bandwidth', 'sampling_frequency']:
                if f'{key}_mhz' in p:
                    kwargs[key] = p.getfloat(f'{key}_mhz')*1e6
            if 'sound_speed' in p:
                kwargs['sound_speed'] = p.getfloat('sound_speed')
        if cnfg.has_section('schedule'):
            p = cnfg['schedule']
            if 'angles' in p:
                kwargs['n_angles'] = p.getint('angles')
            if 'range_deg' in p:
                kwargs['angle_range'] = np.radians(p.getfloat('range_deg'))
        if cnfg.has_section('phantom'):
            p = cnfg['phantom']
            if 'type' in p:
                kwargs['phantom'] = p['type'].strip().lower()
            if 'depths_mm' in p:
                kwargs['depths'] = np.array(_floats(p['depths_mm']))*1e-3
            cyst = {}
            for key in ['radius', 'offset', 'margin', 'half_width_y', 'roi_half_y']:
                if f'{key}_mm' in p:
                    cyst[key] = p.getfloat(f'{key}_mm')*1e-3
            for key in ['high_scale', 'density']:
                if key in p:
                    cyst[key] = p.getfloat(key)
            kwargs['cyst'] = cyst
        if cnfg.has_section('grid'):
            p = cnfg['grid']
            if 'center_mm' in p:
                kwargs['grid_center'] = np.array(_floats(p['center_mm']))*1e-3
            if 'spacing_mm' in p:
                kwargs['grid_spacing'] = np.array(_floats(p['spacing_mm']))*1e-3
            if 'dims' in p:
                kwargs['grid_dims'] = _ints(p['dims'])
        if cnfg.has_section('acquisition'):
            p = cnfg['acquisition']
            if 'snr_db' in p:
                kwargs['snr_db'] = None if p['snr_db'].strip().lower() == 'none' \
                                        else p.getfloat('snr_db')
            if 'tx_alpha' in p:
                kwargs['tx_alpha'] = p.getfloat('tx_alpha')
        if cnfg.has_section('processing'):
            p = cnfg['processing']
            for key in ['rx_alpha', 'dynamic_range_db']:
                if key in p:
                    kwargs[key] = p.getfloat(key)
            if 'decimation' in p:
                kwargs['decimation'] = p.getint('decimation')
            if 'cutoff_mhz' in p:
                kwargs['cutoff'] = None if p['cutoff_mhz'].strip().lower() == 'none' \
                                        else p.getfloat('cutoff_mhz')*1e6
            if 'transition_mhz' in p:
                kwargs['transition'] = p.getfloat('transition_mhz')*1e6
            if 'mode' in p:
                kwargs['mode'] = p['mode'].strip().lower()
        if cnfg.has_section('run'):
            p = cnfg['run']
            if 'methods' in p:
                kwargs['methods'] = p['methods'].replace(',', ' ').split()
            if 'seed' in p:
                kwargs['seed'] = p.getint('seed')
            for key in ['cores', 'splits']:
                if key in p:
                    kwargs[key] = p.getint(key)
            if 'output_dir' in p:
                kwargs['output_dir'] = p['output_dir'].strip()
            if 'full' in p:
                kwargs['full'] = p.getboolean('full')
        return cls(**kwargs)

    def to_config_parser(self):
        """
        Return a :obj:`configparser.ConfigParser` with the configuration in
        the ini-file units.
        """
        cnfg = ConfigParser()
        cnfg['probe'] = {'num_rows': str(self.num_rows), 'num_cols': str(self.num_cols),
                         'pitch_mm': _fmt(self.pitch, 1e3),
                         'center_frequency_mhz': _fmt(self.center_frequency, 1e-6),
                         'bandwidth_mhz': _fmt(self.bandwidth, 1e-6),
                         'sampling_frequency_mhz': _fmt(self.sampling_frequency, 1e-6),
                         'sound_speed': _fmt(self.sound_speed)}
        cnfg['schedule'] = {'angles': str(self.n_angles),
                            'range_deg': _fmt(np.degrees(self.angle_range))}
        phantom = {'type': self.phantom, 'depths_mm': _fmt(self.depths, 1e3)}
        for key, value in self.cyst.items():
            phantom[key if key in ['high_scale', 'density'] else f'{key}_mm'] \
                    = _fmt(value, 1. if key in ['high_scale', 'density'] else 1e3)
        cnfg['phantom'] = phantom
        cnfg['grid'] = {'center_mm': _fmt(self.grid_center, 1e3),
                        'spacing_mm': _fmt(self.grid_spacing, 1e3),
                        'dims': ', '.join([str(d) for d in self.grid_dims])}
        cnfg['acquisition'] = {'snr_db': 'none' if self.snr_db is None else _fmt(self.snr_db),
                               'tx_alpha': _fmt(self.tx_alpha)}
        cnfg['processing'] = {'rx_alpha': _fmt(self.rx_alpha),
                              'decimation': str(self.decimation),
                              'cutoff_mhz': 'none' if self.cutoff is None
                                                else _fmt(self.cutoff, 1e-6),
                              'transition_mhz': _fmt(self.transition, 1e-6),
                              'mode': self.mode,
                              'dynamic_range_db': _fmt(self.dynamic_range_db)}
        cnfg['run'] = {'methods': ', '.join(self.methods), 'seed': str(self.seed),
                       'cores': str(self.cores), 'splits': str(self.splits),
                       'output_dir': self.output_dir, 'full': str(self.full)}
        return cnfg

    def to_ini_file(self, ofile, overwrite=False):
        """
        Write the configuration to an ini file.

        Args:
            ofile (:obj:`str`):
                Output file name.
            overwrite (:obj:`bool`, optional):
                Overwrite any existing file.
        """
        if os.path.isfile(ofile) and not overwrite:
            raise FileExistsError(f'{ofile} exists!  Set overwrite=True to overwrite it.')
        with open(ofile, 'w') as f:
            self.to_config_parser().write(f)

    def to_dict(self):
        """
        Return a dictionary with all configuration parameters, in SI units.
        """
        d = {}
        for key, value in vars(self).items():
            if isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, np.generic):
                value = value.item()
            elif isinstance(value, list):
                value = [v.item() if isinstance(v, np.generic) else v for v in value]
            d[key] = value
        return d

    def config_hash(self):
        """
        Return a SHA-256 hash of the canonical serialization of the
        configuration.

        The number of cores and the output directory do not change the
        results and are excluded.
        """
        d = self.to_dict()
        for key in ['cores', 'output_dir']:
            d.pop(key)
        d['version'] = __version__
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode('utf-8')).hexdigest()

    def copy(self, **kwargs):
        """
        Return a copy of the configuration with any provided attributes
        replaced.
        """
        new = copy.deepcopy(self)
        for key, value in kwargs.items():
            if not hasattr(new, key):
                raise KeyError(f'{key} is not a configuration parameter.')
            setattr(new, key, value)
        if 'methods' in kwargs:
            new.methods = [parse_method(m) for m in new.methods]
        return new

    def full_scale(self):
        """
        Return the full-scale version of the configuration: a 128+128
        element probe and a grid with (0.2, 0.2, 0.1) mm spacing covering
        at least the same volume.
        """
        spacing = np.array([0.2e-3, 0.2e-3, 0.1e-3])
        extent = np.asarray(self.grid_dims)*np.asarray(self.grid_spacing)
        dims = np.maximum(np.round(extent/spacing).astype(int), self.grid_dims)
        return self.copy(num_rows=128, num_cols=128, grid_spacing=list(spacing),
                         grid_dims=[int(d) for d in dims], full=True)

    # Derived objects
    def probe(self):
        """Return the :class:`~rcafmas.models.geometry.ProbeGeometry`."""
        return ProbeGeometry(num_rows=self.num_rows, num_cols=self.num_cols, pitch=self.pitch,
                             center_frequency=self.center_frequency, bandwidth=self.bandwidth,
                             sampling_frequency=self.sampling_frequency,
                             sound_speed=self.sound_speed)

    def schedule(self):
        """Return the :class:`~rcafmas.models.geometry.TransmitSchedule`."""
        return make_schedule(self.n_angles//2, self.angle_range)

    def grid(self):
        """Return the :class:`~rcafmas.models.geometry.VoxelGrid`."""
        return VoxelGrid.centered(self.grid_center, self.grid_spacing, self.grid_dims)

    def pulse(self):
        """Return the :class:`~rcafmas.data.synth.PulseModel`."""
        return PulseModel(self.center_frequency, self.bandwidth)

    def lowpass_cutoff(self):
        return self.bandwidth/2 if self.cutoff is None else self.cutoff

    def cyst_spec(self):
        """Return the :class:`~rcafmas.data.phantom.CystSpec`."""
        return CystSpec(depths=self.depths, **self.cyst)

    def make_phantom(self, rng=None):
        """
        Construct the phantom.

        Args:
            rng (`numpy.random.Generator`_, optional):
                Generator used for random phantoms.
        """
        if self.phantom == 'point':
            return make_point_phantom(self.depths)
        return make_cyst_phantom(self.probe(), spec=self.cyst_spec(), rng=rng)

    def validate(self):
        """
        Check that the configuration satisfies the preconditions of every
        processing step.

        Returns:
            :obj:`tuple`: The probe geometry and voxel grid.

        Raises:
            ValueError:
                Raised if any parameter is invalid.
        """
        geom = self.probe()
        if int(self.n_angles) != self.n_angles or self.n_angles < 2 or self.n_angles % 2 != 0:
            raise ValueError('Number of angles must be an even integer of at least 2; the same '
                             f'number is used for rows and columns, not {self.n_angles}.')
        self.schedule()
        grid = self.grid()
        if self.phantom not in phantom_types:
            raise ValueError(f'Unknown phantom {self.phantom}; options are {phantom_types}.')
        if len(self.depths) == 0:
            raise ValueError('Must provide at least one depth.')
        if np.any(np.asarray(self.depths) <= 0):
            raise ValueError('All depths must be positive.')
        if self.phantom == 'cyst':
            spec = self.cyst_spec()
            spec.tubes()
            if self.splits < 1:
                raise ValueError('Number of sub-regions must be positive.')
            # Every contrast region must lie in the grid with enough columns to split
            for depth in spec.depths:
                for roi in cyst_rois(spec, depth).values():
                    roi.split(grid, self.splits)
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ValueError('SNR must be finite.')
        for alpha in [self.tx_alpha, self.rx_alpha]:
            if alpha < 0 or alpha > 1:
                raise ValueError('Tukey parameters must be in [0,1].')
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise ValueError('Decimation factor must be a positive integer.')
        cutoff = self.lowpass_cutoff()
        if cutoff > self.sampling_frequency/2/self.decimation:
            raise ValueError(f'Low-pass cutoff ({cutoff/1e6:.3f} MHz) exceeds the Nyquist '
                             'frequency of the decimated data '
                             f'({self.sampling_frequency/2/self.decimation/1e6:.3f} MHz).')
        design_lowpass(cutoff, self.sampling_frequency, self.transition)
        if self.mode not in modes:
            raise ValueError(f'Unknown mode {self.mode}; options are {modes}.')
        if self.dynamic_range_db <= 0:
            raise ValueError('Dynamic range must be positive.')
        if len(self.methods) == 0:
            raise ValueError('Must select at least one compounding method.')
        if len(set(self.methods)) != len(self.methods):
            raise ValueError('Compounding methods must be unique.')
        if self.cores < 1:
            raise ValueError('Number of cores must be positive.')
        if self.splits < 1:
            raise ValueError('Number of sub-regions must be positive.')
        return geom, grid

