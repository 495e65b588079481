"""
Experiment pipelines: synthesis, baseband conversion, per-transmission
beamforming, compounding, and image-quality measurements.

.. include:: include/links.rst
"""
import os
import time
import itertools

from IPython import embed

import numpy as np

from astropy.table import Table

from .data.synth import simulate_rf, add_noise, acquisition_window
from .data.phantom import cyst_rois
from .models.sigproc import iq_demodulate, design_lowpass
from .models.beamform import das_volumes
from .models.compound import compound, pair_count_fmas, pair_count_rcfmas
from .metrics import MetricsReport, psf_report, tcr, tnr, subregion_ratio_db
from .util.parallel import parallel_map, substream
from . import output


class ExperimentResult:
    """
    Products of a single experiment.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            The configuration used.
        envelopes (:obj:`list`):
            One :class:`~rcafmas.models.compound.EnvelopeVolume` per
            requested method, in the requested order.
        reports (:obj:`list`):
            The :class:`~rcafmas.metrics.MetricsReport` objects.
        timings (:obj:`dict`):
            Wall-clock time of each processing step in seconds.
        volumes (:obj:`list`, optional):
            The per-transmission volumes, if kept.
        region (:class:`~rcafmas.metrics.PeakRegion`, optional):
            The main-lobe region used for the point-target metrics.
    """
    def __init__(self, config, envelopes, reports, timings, volumes=None, region=None):
        self.config = config
        self.envelopes = envelopes
        self.reports = reports
        self.timings = timings
        self.volumes = volumes
        self.region = region

    def __repr__(self):
        return f'<{self.__class__.__name__}: {[e.method for e in self.envelopes]}>'

    @property
    def pair_counts(self):
        return {e.method: e.npairs for e in self.envelopes}

    def envelope(self, method):
        """
        Return the envelope volume for a method.
        """
        for e in self.envelopes:
            if e.method == method:
                return e
        raise KeyError(f'No volume for method {method}.')

    def report(self, method, depth=None):
        """
        Return the first metrics report for a method and (optionally) a
        depth.
        """
        for r in self.reports:
            if r.method == method and (depth is None or np.isclose(r.depth, depth)):
                return r
        raise KeyError(f'No report for method {method}.')

    def table(self):
        """
        Return the metrics reports as an `astropy.table.Table`_.
        """
        return Table(rows=[r.to_row() for r in self.reports], names=MetricsReport.columns)

    def write(self, odir, overwrite=False):
        """
        Write all products to a directory.

        Writes the configuration (``config.ini``), the metrics table
        (``metrics.csv``), and the volume products of each method (see
        :func:`~rcafmas.output.export_envelopes`).

        Returns:
            :obj:`list`: Names of all written files.
        """
        if not os.path.isdir(odir):
            raise NotADirectoryError(f'{odir} does not exist.')
        cfile = os.path.join(odir, 'config.ini')
        self.config.to_ini_file(cfile, overwrite=overwrite)
        mfile = os.path.join(odir, 'metrics.csv')
        output.write_table(self.table(), mfile, overwrite=overwrite)
        return [cfile, mfile] + output.export_envelopes(self.envelopes, odir,
                                    config_hash=self.config.config_hash(),
                                    dynamic_range_db=self.config.dynamic_range_db,
                                    overwrite=overwrite)


def simulate_channels(config, phantom=None, verbose=0):
    """
    Synthesize the (noisy) RF channel data for an experiment.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            Experiment configuration.
        phantom (:class:`~rcafmas.data.phantom.Phantom`, optional):
            Phantom to image.  If None, built from the configuration using
            the ``'phantom'`` random substream.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :class:`~rcafmas.data.rfdata.RfDataSet`: The channel data.
    """
    geom = config.probe()
    _phantom = config.make_phantom(rng=substream(config.seed, 'phantom')) \
                    if phantom is None else phantom
    taps = design_lowpass(config.lowpass_cutoff(), config.sampling_frequency, config.transition)
    margin = (taps.size//2 + 1)/config.sampling_frequency
    t0, nsamples = acquisition_window(geom, config.grid(), config.schedule(), config.pulse(),
                                      margin=margin)
    rf = simulate_rf(geom, _phantom, config.schedule(), config.pulse(), t0=t0,
                     nsamples=nsamples, tx_alpha=config.tx_alpha, cores=config.cores,
                     verbose=verbose)
    if config.snr_db is None:
        return rf
    return add_noise(rf, config.snr_db, rng=substream(config.seed, 'noise'))


def _point_reports(config, envelopes):
    reports, region = psf_report(envelopes, config.n_angles, np.degrees(config.angle_range),
                                 config.depths[0])
    return reports, region


def _cyst_reports(config, envelopes):
    spec = config.cyst_spec()
    reports = []
    for env in envelopes:
        for depth in spec.depths:
            rois = cyst_rois(spec, depth)
            reports += [MetricsReport(env.method, config.n_angles,
                                      np.degrees(config.angle_range), depth,
                                      tcr_db=tcr(env, rois['tissue1'], rois['tissue2']),
                                      tnr_db=tnr(env, rois['tissue'], rois['noise']),
                                      pair_count=env.npairs, runtime=env.runtime)]
    return reports


def run_experiment(config, phantom=None, rf_scale=None, keep_volumes=False, verbose=0):
    """
    Run a full experiment.

    The steps are: synthesize the RF data (with noise), convert to
    baseband, beamform one volume per transmission, compound the volumes
    with each requested method, and measure the image quality.  For a
    point phantom, the point-spread-function metrics are measured; for a
    cyst phantom, the contrast metrics at each tube depth.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            Experiment configuration; validated before any computation.
        phantom (:class:`~rcafmas.data.phantom.Phantom`, optional):
            Phantom to use instead of the one defined by the configuration.
        rf_scale (:obj:`float`, optional):
            Factor applied to the RF data before baseband conversion.
        keep_volumes (:obj:`bool`, optional):
            Keep the per-transmission volumes in the result.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :class:`ExperimentResult`: The experiment products.
    """
    geom, grid = config.validate()
    timings = {}

    t = time.perf_counter()
    rf = simulate_channels(config, phantom=phantom, verbose=verbose)
    if rf_scale is not None:
        rf = rf.scaled(rf_scale)
    timings['synthesis'] = time.perf_counter() - t

    t = time.perf_counter()
    iq = iq_demodulate(rf, config.center_frequency, config.lowpass_cutoff(),
                       decimation=config.decimation, width=config.transition)
    timings['demodulation'] = time.perf_counter() - t

    t = time.perf_counter()
    volumes = das_volumes(iq, grid, geom, rx_alpha=config.rx_alpha, cores=config.cores,
                          verbose=verbose)
    timings['beamforming'] = time.perf_counter() - t

    envelopes = []
    for method in config.methods:
        envelopes += [compound(volumes, method, mode=config.mode)]
        timings[method] = envelopes[-1].runtime
        if verbose > 0:
            print(f'{method}: {envelopes[-1].npairs} pairs, {envelopes[-1].runtime:.2f} s')

    region = None
    if config.phantom == 'point':
        reports, region = _point_reports(config, envelopes)
    else:
        reports = _cyst_reports(config, envelopes)

    return ExperimentResult(config, envelopes, reports, timings,
                            volumes=volumes if keep_volumes else None, region=region)


def _run_cell(config):
    return run_experiment(config).reports


class SweepResult:
    """
    Results of an acquisition-scheme sweep.

    Args:
        angle_counts (:obj:`list`):
            Total numbers of transmissions.
        ranges (:obj:`list`):
            Full angle spans in radians.
        methods (:obj:`list`):
            Compounding methods.
        reports (:obj:`list`):
            The :class:`~rcafmas.metrics.MetricsReport` objects for every
            cell and method.
    """
    def __init__(self, angle_counts, ranges, methods, reports):
        self.angle_counts = list(angle_counts)
        self.ranges = list(ranges)
        self.methods = list(methods)
        self.reports = list(reports)
        if len(self.reports) != len(self.angle_counts)*len(self.ranges)*len(self.methods):
            raise ValueError('Sweep is missing cells.')

    def __repr__(self):
        return f'<{self.__class__.__name__}: {len(self.angle_counts)}x{len(self.ranges)} ' \
               f'cells, methods={self.methods}>'

    def table(self):
        """
        Return the sweep as an `astropy.table.Table`_, one row per cell and
        method.
        """
        return Table(rows=[r.to_row() for r in self.reports], names=MetricsReport.columns)

    def grid(self, metric, method):
        """
        Return one metric as a 2D array.

        Args:
            metric (:obj:`str`):
                A :class:`~rcafmas.metrics.MetricsReport` attribute; e.g.,
                ``'pir'`` or ``'pmslr_db'``.
            method (:obj:`str`):
                Compounding method.

        Returns:
            `numpy.ndarray`_: Array with shape ``(len(angle_counts),
            len(ranges))``.
        """
        values = np.full((len(self.angle_counts), len(self.ranges)), np.nan)
        range_deg = np.degrees(self.ranges)
        for r in self.reports:
            if r.method != method:
                continue
            i = self.angle_counts.index(r.n_angles)
            j = int(np.argmin(np.absolute(range_deg - r.range_deg)))
            values[i,j] = getattr(r, metric)
        return values


def run_sweep(config, angle_counts, ranges, verbose=0):
    """
    Evaluate the point-target metrics over a grid of acquisition schemes.

    Every combination of the number of transmissions and the angle span is
    run as an independent experiment.  Cells are distributed over
    ``config.cores`` processes, each running a single-process experiment.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            Base configuration; must use a point phantom.
        angle_counts (array-like):
            Total numbers of transmissions (even).
        ranges (array-like):
            Full angle spans in radians.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :class:`SweepResult`: The sweep results.
    """
    if len(angle_counts) == 0 or len(ranges) == 0:
        raise ValueError('Sweep axes cannot be empty.')
    if config.phantom != 'point':
        raise ValueError('Acquisition sweeps require a point phantom.')
    cells = [config.copy(n_angles=int(n), angle_range=float(r), cores=1)
                for n, r in itertools.product(angle_counts, ranges)]
    for c in cells:
        c.validate()
    t = time.perf_counter()
    reports = parallel_map(_run_cell, cells, cores=config.cores, progress=verbose > 0,
                           desc='Sweep')
    if verbose > 0:
        print(f'Finished {len(cells)} sweep cells in {time.perf_counter()-t:.1f} s')
    return SweepResult(angle_counts, ranges, config.methods, list(itertools.chain(*reports)))


def sweep_pair_counts(angle_counts):
    """
    Return the expected FMAS and RC-FMAS pair counts for a set of
    transmission counts.

    Returns:
        :obj:`dict`: Dictionary keyed by the number of transmissions with
        the (FMAS, RCFMAS) pair counts.
    """
    return {int(n): (pair_count_fmas(int(n)), pair_count_rcfmas(int(n)//2, int(n)//2))
                for n in angle_counts}


def psf_depth_grid(config, depth):
    """
    Return a copy of a point-target configuration with a single target at
    the provided depth and the grid centered on it.
    """
    center = list(config.grid_center)
    center[2] = depth
    return config.copy(depths=[depth], grid_center=center)


def run_psf_depth_study(config, depths=None, verbose=0):
    """
    Measure the point-target metrics for targets at a range of depths.

    Each depth is an independent experiment with the grid re-centered on
    the target.  Depths are distributed over ``config.cores`` processes.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            Base point-target configuration.
        depths (array-like, optional):
            Target depths in meters.  If None, 5 depths (100 for a
            full-scale configuration) evenly spaced from 10 to 100 mm.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :obj:`tuple`: The list of all :class:`~rcafmas.metrics.MetricsReport`
        objects and a summary `astropy.table.Table`_ with the mean and
        standard error of each metric per method.
    """
    if config.phantom != 'point':
        raise ValueError('PSF depth study requires a point phantom.')
    _depths = np.linspace(10e-3, 100e-3, 100 if config.full else 5) if depths is None \
                    else np.atleast_1d(depths)
    cells = [psf_depth_grid(config, d).copy(cores=1) for d in _depths]
    for c in cells:
        c.validate()
    reports = list(itertools.chain(*parallel_map(_run_cell, cells, cores=config.cores,
                                                 progress=verbose > 0, desc='Depths')))
    rows = []
    for method in config.methods:
        _reports = [r for r in reports if r.method == method]
        for metric in ['fwhm_x', 'fwhm_y', 'fwhm_z', 'pir', 'pmslr_db']:
            values = np.array([getattr(r, metric) for r in _reports])
            scale = 1e3 if metric.startswith('fwhm') else 1.
            stderr = 0. if values.size == 1 else np.std(values, ddof=1)/np.sqrt(values.size)
            rows += [[method, metric + ('_mm' if scale != 1 else ''), np.mean(values)*scale,
                      stderr*scale, values.size]]
    summary = Table(rows=rows, names=['method', 'metric', 'mean', 'stderr', 'ndepths'])
    return reports, summary


def run_depth_study(config, verbose=0):
    """
    Measure the tissue contrast and tissue-to-noise ratios at every tube
    depth of the cyst phantom.

    Each ratio is computed separately in ``config.splits`` lateral
    sub-regions and reported as the mean and its standard error.

    Args:
        config (:class:`~rcafmas.config.ExperimentConfig`):
            Cyst-phantom configuration.
        verbose (:obj:`int`, optional):
            Verbosity level.

    Returns:
        :obj:`tuple`: The :class:`ExperimentResult` and an
        `astropy.table.Table`_ with one TCR and one TNR row per depth and
        method.
    """
    if config.phantom != 'cyst':
        raise ValueError('Contrast depth study requires a cyst phantom.')
    result = run_experiment(config, verbose=verbose)
    spec = config.cyst_spec()
    rows = []
    for depth in spec.depths:
        rois = cyst_rois(spec, depth)
        for env in result.envelopes:
            v, e = subregion_ratio_db(env, rois['tissue1'], rois['tissue2'],
                                      splits=config.splits)
            rows += [[depth*1e3, env.method, 'TCR', v, e]]
            v, e = subregion_ratio_db(env, rois['tissue'], rois['noise'], splits=config.splits)
            rows += [[depth*1e3, env.method, 'TNR', v, e]]
    return result, Table(rows=rows, names=['depth_mm', 'method', 'metric', 'value_db',
                                           'stderr_db'])

