
from IPython import embed

import os

import numpy
import pytest

from astropy.table import Table

from rcafmas.scripts import rcafmas

from rcafmas.tests.util import desk_psf_config


def _tiny_config(tmp_path):
    ofile = str(tmp_path / 'tiny.ini')
    desk_psf_config(grid_dims=[16, 16, 20], methods=['DAS', 'RCFMAS']).to_ini_file(ofile)
    return ofile


def test_parse_range():
    assert rcafmas.parse_range('6:30:4', cast=int) == [6, 10, 14, 18, 22, 26, 30], \
            'Range should include the end point'
    assert numpy.allclose(rcafmas.parse_range('0:10:2.5'), [0., 2.5, 5., 7.5, 10.]), \
            'Bad float range'
    assert rcafmas.parse_range('5, 10') == [5., 10.], 'Bad list'
    assert rcafmas.parse_range('4') == [4.], 'Bad single value'
    with pytest.raises(ValueError):
        rcafmas.parse_range('1:2')
    with pytest.raises(ValueError):
        rcafmas.parse_range('5:1:1')
    with pytest.raises(ValueError):
        rcafmas.parse_range('1:5:0')


def test_parse_args():
    args = rcafmas.parse_args(['psf'])
    assert args.command == 'psf', 'Bad subcommand'
    assert args.config is None and args.method is None, 'Bad defaults'
    args = rcafmas.parse_args(['psf-depth', '--depths-mm', '10:30:10', '--method', 'DAS',
                               '--method', 'rc-fmas', '--cores', '2'])
    assert args.method == ['DAS', 'rc-fmas'], 'Methods should accumulate'
    assert args.depths_mm == '10:30:10', 'Bad depths'
    assert args.cores == 2, 'Bad cores'
    with pytest.raises(SystemExit):
        rcafmas.parse_args([])


def test_build_config(tmp_path):
    args = rcafmas.parse_args(['sweep', '--angles', '6:10:4', '--range-deg', '5,10',
                               '--method', 'fmas'])
    config, angle_counts, ranges = rcafmas.build_config(args)
    assert angle_counts == [6, 10], 'Bad angle counts'
    assert numpy.allclose(ranges, numpy.radians([5., 10.])), 'Ranges should be in radians'
    assert config.methods == ['FMAS'], 'Method override not applied'
    assert config.output_dir == 'rcafmas_psf', 'Sweep should use the point-target defaults'

    args = rcafmas.parse_args(['cyst', '--full', '--angles', '12', '--seed', '3'])
    config, angle_counts, _ = rcafmas.build_config(args)
    assert angle_counts is None, 'Only the sweep has angle lists'
    assert config.num_rows == 128 and config.full, 'Full-scale configuration not used'
    assert config.n_angles == 12 and config.seed == 3, 'Overrides not applied'

    with pytest.raises(ValueError):
        rcafmas.build_config(rcafmas.parse_args(['sweep', '--angles', '5,6']))


def test_errors(tmp_path):
    odir = str(tmp_path / 'out')
    assert rcafmas.run(['psf', '-c', str(tmp_path / 'missing.ini'), '--out', odir]) == 1, \
            'Missing configuration should fail'
    assert rcafmas.run(['psf', '--angles', '5', '--out', odir]) == 1, \
            'Odd number of transmissions should fail'
    ifile = _tiny_config(tmp_path)
    assert rcafmas.run(['psf-depth', '-c', ifile, '--depths-mm=-5,10', '--out', odir]) == 1, \
            'Negative depths should fail'
    assert not os.path.isdir(odir), 'Output directory created for invalid input'


def test_psf(tmp_path):
    ifile = _tiny_config(tmp_path)
    odir = str(tmp_path / 'psf')
    assert rcafmas.run(['psf', '-c', ifile, '--out', odir]) == 0, 'Run failed'
    tbl = Table.read(os.path.join(odir, 'metrics.csv'), format='ascii.csv')
    assert list(tbl['method']) == ['DAS', 'RCFMAS'], 'Bad metrics file'
    assert os.path.isfile(os.path.join(odir, 'das.raw')), 'Volume not written'
    assert os.path.isfile(os.path.join(odir, 'config.ini')), 'Configuration not written'

    # Existing files are only replaced on request
    assert rcafmas.run(['psf', '-c', ifile, '--out', odir]) == 1, 'Should not overwrite'
    assert rcafmas.run(['psf', '-c', ifile, '--out', odir, '--overwrite']) == 0, \
            'Overwrite failed'


def test_sweep(tmp_path):
    odir = str(tmp_path / 'sweep')
    assert rcafmas.run(['sweep', '-c', _tiny_config(tmp_path), '--angles', '6',
                        '--range-deg', '5,10', '--out', odir]) == 0, 'Run failed'
    tbl = Table.read(os.path.join(odir, 'sweep.csv'), format='ascii.csv')
    assert len(tbl) == 4, 'Should be one row per cell and method'
    assert numpy.all(tbl['pair_count'][tbl['method'] == 'RCFMAS'] == 9), 'Bad pair counts'


def test_psf_depth(tmp_path):
    odir = str(tmp_path / 'depth')
    assert rcafmas.run(['psf-depth', '-c', _tiny_config(tmp_path), '--depths-mm', '12,18',
                        '--out', odir]) == 0, 'Run failed'
    tbl = Table.read(os.path.join(odir, 'psf_depth.csv'), format='ascii.csv')
    assert len(tbl) == 4, 'Should be one row per depth and method'
    assert numpy.allclose(numpy.unique(tbl['depth_mm']), [12., 18.]), 'Wrong depths'
    summary = Table.read(os.path.join(odir, 'psf_depth_summary.csv'), format='ascii.csv')
    assert len(summary) == 10, 'Should be five metrics per method'

