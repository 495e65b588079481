"""
Command-line interface for the row-column array simulation and
reconstruction experiments.

Subcommands:

    - ``psf``: image a point target and measure the PSF metrics,
    - ``cyst``: image the tube phantom and measure the contrast metrics,
    - ``sweep``: PSF metrics over a grid of acquisition schemes,
    - ``depth-study``: contrast metrics with error bars at each tube depth,
    - ``psf-depth``: PSF metrics for point targets at a range of depths.
"""
import os
import sys
import argparse

from IPython import embed

import numpy as np

from ..config import ExperimentConfig
from ..experiment import run_experiment, run_sweep, run_depth_study, run_psf_depth_study
from ..experiment import sweep_pair_counts
from ..metrics import MetricsReport
from ..output import write_table

#: Packaged configuration used by each subcommand
default_configs = {'psf': 'psf', 'cyst': 'cyst', 'sweep': 'psf', 'depth-study': 'cyst',
                   'psf-depth': 'psf'}


def parse_range(text, cast=float):
    """
    Parse a range or list of values.

    Ranges are given as ``start:stop:step`` and include ``stop`` if it is
    on the step grid; lists are comma-separated.

    Args:
        text (:obj:`str`):
            Text to parse.
        cast (callable, optional):
            Type of each value.

    Returns:
        :obj:`list`: The values.
    """
    if ':' in text:
        try:
            start, stop, step = [float(v) for v in text.split(':')]
        except ValueError as e:
            raise ValueError(f'Ranges must have the form start:stop:step, not {text}.') from e
        if step <= 0 or stop < start:
            raise ValueError(f'Invalid range: {text}.')
        return [cast(v) for v in np.arange(start, stop + step/2, step)]
    return [cast(float(v)) for v in text.split(',')]


def parse_args(options=None):

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-c', '--config', default=None, type=str,
                        help='Configuration (ini) file.  If not provided, the packaged default '
                             'for the subcommand is used.')
    common.add_argument('--angles', default=None, type=str,
                        help='Total number of transmissions (half rows, half columns).  For the '
                             'sweep, a range (start:stop:step) or comma-separated list.')
    common.add_argument('--range-deg', default=None, type=str,
                        help='Full span of the steering angles in degrees.  For the sweep, a '
                             'range (start:stop:step) or comma-separated list.')
    common.add_argument('--method', default=None, action='append',
                        help='Compounding method (DAS, FMAS, or RCFMAS).  Can be repeated.')
    common.add_argument('--seed', default=None, type=int, help='Base random seed.')
    common.add_argument('--out', default=None, type=str,
                        help='Output directory.  If not provided, set by the configuration.')
    common.add_argument('--cores', default=None, type=int, help='Number of processes.')
    common.add_argument('--full', default=False, action='store_true',
                        help='Use the full-scale (128+128 element, fine grid) configuration.')
    common.add_argument('--plot', default=False, action='store_true',
                        help='Write QA plots.')
    common.add_argument('--overwrite', default=False, action='store_true',
                        help='Overwrite existing output files.')
    common.add_argument('--verbose', default=0, type=int,
                        help='Verbosity level.  0=quiet; 1=status and progress; 2=full output.')

    parser = argparse.ArgumentParser(formatter_class=argparse.ArgumentDefaultsHelpFormatter,
                                     description='Row-column array plane-wave imaging '
                                                 'experiments')
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('psf', parents=[common], help='Point-target experiment')
    subparsers.add_parser('cyst', parents=[common], help='Tube-phantom experiment')
    subparsers.add_parser('sweep', parents=[common], help='Acquisition-scheme sweep')
    subparsers.add_parser('depth-study', parents=[common],
                          help='Contrast metrics versus depth')
    p = subparsers.add_parser('psf-depth', parents=[common],
                              help='Point-target metrics versus depth')
    p.add_argument('--depths-mm', default=None, type=str,
                   help='Target depths in mm as a range (start:stop:step) or comma-separated '
                        'list.  If not provided, evenly spaced from 10 to 100 mm.')

    return parser.parse_args() if options is None else parser.parse_args(options)


def build_config(args):
    """
    Construct and validate the configuration for a subcommand.

    Returns:
        :obj:`tuple`: The configuration and, for the sweep, the lists of
        transmission counts and angle spans (in radians).
    """
    config = ExperimentConfig.default(default_configs[args.command]) if args.config is None \
                else ExperimentConfig.from_ini_file(args.config)
    if args.full:
        config = config.full_scale()

    kwargs = {}
    if args.method is not None:
        kwargs['methods'] = args.method
    if args.seed is not None:
        kwargs['seed'] = args.seed
    if args.cores is not None:
        kwargs['cores'] = args.cores
    if args.out is not None:
        kwargs['output_dir'] = args.out

    angle_counts = ranges = None
    if args.command == 'sweep':
        angle_counts = [config.n_angles] if args.angles is None \
                            else parse_range(args.angles, cast=int)
        ranges = [config.angle_range] if args.range_deg is None \
                            else list(np.radians(parse_range(args.range_deg)))
    else:
        if args.angles is not None:
            kwargs['n_angles'] = int(args.angles)
        if args.range_deg is not None:
            kwargs['angle_range'] = float(np.radians(float(args.range_deg)))
    config = config.copy(**kwargs)
    config.validate()
    if angle_counts is not None:
        for n in angle_counts:
            for r in ranges:
                config.copy(n_angles=n, angle_range=r).validate()
    return config, angle_counts, ranges


def main(args):

    config, angle_counts, ranges = build_config(args)
    if args.command == 'psf-depth':
        depths = None if args.depths_mm is None \
                    else np.array(parse_range(args.depths_mm))*1e-3
        if depths is not None and np.any(depths <= 0):
            raise ValueError('Target depths must be positive.')

    # All input is checked; create the output directory
    odir = config.output_dir
    if not os.path.isdir(odir):
        os.makedirs(odir)
    if args.verbose > 0:
        print(f'Writing output to {odir}')

    if args.command in ['psf', 'cyst']:
        result = run_experiment(config, verbose=args.verbose)
        result.write(odir, overwrite=args.overwrite)
        if args.verbose > 0:
            result.table().pprint(max_width=-1)
        if args.plot:
            from ..plotting import psf_slices_plot
            psf_slices_plot(result.envelopes, dynamic_range_db=config.dynamic_range_db,
                            ofile=os.path.join(odir, f'{args.command}_slices.png'))
        return

    if args.command == 'sweep':
        sweep = run_sweep(config, angle_counts, ranges, verbose=args.verbose)
        expected = sweep_pair_counts(angle_counts)
        for r in sweep.reports:
            if r.method in ['FMAS', 'RCFMAS'] \
                    and r.pair_count != expected[r.n_angles][r.method == 'RCFMAS']:
                raise ValueError(f'Unexpected pair count for {r}.')
        write_table(sweep.table(), os.path.join(odir, 'sweep.csv'), overwrite=args.overwrite)
        config.to_ini_file(os.path.join(odir, 'config.ini'), overwrite=args.overwrite)
        if args.plot:
            from ..plotting import sweep_plot
            sweep_plot(sweep, ofile=os.path.join(odir, 'sweep.png'))
        return

    if args.command == 'depth-study':
        result, table = run_depth_study(config, verbose=args.verbose)
        result.write(odir, overwrite=args.overwrite)
        write_table(table, os.path.join(odir, 'depth_study.csv'), overwrite=args.overwrite)
        if args.verbose > 0:
            table.pprint(max_lines=-1, max_width=-1)
        if args.plot:
            from ..plotting import depth_study_plot
            depth_study_plot(table, ofile=os.path.join(odir, 'depth_study.png'))
        return

    reports, summary = run_psf_depth_study(config, depths=depths, verbose=args.verbose)
    write_table([r.to_row() for r in reports], os.path.join(odir, 'psf_depth.csv'),
                names=MetricsReport.columns, overwrite=args.overwrite)
    write_table(summary, os.path.join(odir, 'psf_depth_summary.csv'), overwrite=args.overwrite)
    config.to_ini_file(os.path.join(odir, 'config.ini'), overwrite=args.overwrite)
    if args.verbose > 0:
        summary.pprint(max_lines=-1, max_width=-1)


def run(options=None):
    """
    Parse the command-line arguments and run the requested subcommand.

    Errors are reported to stderr.

    Returns:
        :obj:`int`: Exit status; 0 on success and 1 on failure.
    """
    args = parse_args(options)
    try:
        main(args)
    except (ValueError, TypeError, IndexError, KeyError, OSError) as e:
        print(f'ERROR: {e}', file=sys.stderr)
        return 1
    return 0

