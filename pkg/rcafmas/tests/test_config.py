
from IPython import embed

import numpy
import pytest

from rcafmas.config import ExperimentConfig

from rcafmas.tests.util import config_file, desk_psf_config, small_cyst_config


def test_default():
    cfg = ExperimentConfig.default('psf')
    assert cfg.num_rows == 32 and cfg.num_cols == 32, 'Bad probe size'
    assert cfg.n_angles == 10, 'Bad number of angles'
    assert numpy.isclose(cfg.angle_range, numpy.radians(10.)), 'Bad angle range'
    assert numpy.allclose(cfg.depths, [50e-3]), 'Bad target depth'
    assert cfg.grid_dims == [48, 48, 48], 'Bad grid'
    assert cfg.methods == ['DAS', 'FMAS', 'RCFMAS'], 'Bad methods'
    assert cfg.output_dir == 'rcafmas_psf', 'Bad output directory'
    geom, grid = cfg.validate()
    assert geom.element_count('row') == 32, 'Bad geometry'
    assert grid.dims == (48, 48, 48), 'Bad grid'
    assert cfg.schedule().ntx == 10, 'Schedule should have one event per angle'

    cfg = ExperimentConfig.default('cyst')
    assert cfg.phantom == 'cyst', 'Bad phantom'
    spec = cfg.cyst_spec()
    assert numpy.allclose(spec.depths, [15e-3, 35e-3, 55e-3, 75e-3]), 'Bad tube depths'
    assert numpy.isclose(spec.radius, 3e-3), 'Bad tube radius'
    cfg.validate()

    with pytest.raises(FileNotFoundError):
        ExperimentConfig.default('wire')


def test_defaults(tmp_path):
    # Missing options take their default values
    ofile = tmp_path / 'partial.ini'
    ofile.write_text('[schedule]\nangles = 4\n\n[acquisition]\nsnr_db = none\n')
    cfg = ExperimentConfig.from_ini_file(str(ofile))
    assert cfg.n_angles == 4, 'Option not read'
    assert cfg.snr_db is None, 'SNR should be disabled'
    assert cfg.num_rows == ExperimentConfig().num_rows, 'Missing option should take the default'
    assert cfg.lowpass_cutoff() == cfg.bandwidth/2, 'Default cutoff should be half the bandwidth'


def test_round_trip(tmp_path):
    cfg = ExperimentConfig.from_ini_file(config_file('cyst'))
    ofile = str(tmp_path / 'cyst.ini')
    cfg.to_ini_file(ofile)
    new = ExperimentConfig.from_ini_file(ofile)
    assert new.config_hash() == cfg.config_hash(), 'Configuration changed on output'
    assert new.cyst == cfg.cyst, 'Tube layout changed on output'

    with pytest.raises(FileExistsError):
        cfg.to_ini_file(ofile)
    cfg.to_ini_file(ofile, overwrite=True)


def test_hash():
    cfg = ExperimentConfig()
    h = cfg.config_hash()
    assert len(h) == 64, 'Should be a SHA-256 hex digest'
    assert cfg.copy(cores=4, output_dir='elsewhere').config_hash() == h, \
            'Cores and output directory should not change the hash'
    assert cfg.copy(seed=2).config_hash() != h, 'Seed should change the hash'
    assert cfg.copy(n_angles=12).config_hash() != h, 'Angles should change the hash'


def test_copy():
    cfg = ExperimentConfig()
    new = cfg.copy(methods=['rc-fmas', 'das'], depths=[20e-3])
    assert new.methods == ['RCFMAS', 'DAS'], 'Methods should be standardized'
    assert cfg.methods == ['DAS', 'FMAS', 'RCFMAS'], 'Copy should not change the original'
    assert new.depths == [20e-3], 'Attribute not replaced'
    with pytest.raises(KeyError):
        cfg.copy(angles=4)


def test_full_scale():
    cfg = ExperimentConfig.default('psf').full_scale()
    assert cfg.full, 'Should be flagged as full scale'
    assert cfg.num_rows == 128 and cfg.num_cols == 128, 'Bad full-scale probe'
    assert numpy.allclose(cfg.grid_spacing, [0.2e-3, 0.2e-3, 0.1e-3]), 'Bad full-scale spacing'
    assert cfg.grid_dims == [96, 96, 48], 'Full-scale grid should cover the same volume'


def test_validate():
    cfg = ExperimentConfig()
    for kwargs in [dict(n_angles=5), dict(n_angles=0), dict(decimation=8), dict(mode='imag'),
                   dict(phantom='wire'), dict(methods=['DAS', 'das']), dict(cores=0),
                   dict(depths=[]), dict(depths=[-1e-3]), dict(tx_alpha=1.5),
                   dict(snr_db=numpy.inf), dict(splits=0), dict(dynamic_range_db=0.),
                   dict(sampling_frequency=15e6), dict(grid_spacing=[0., 1e-4, 1e-4])]:
        with pytest.raises(ValueError):
            cfg.copy(**kwargs).validate()

    # Overlapping tubes
    with pytest.raises(ValueError):
        cfg.copy(phantom='cyst', depths=[15e-3, 17e-3]).validate()



def test_validate_cyst_regions():
    cfg = small_cyst_config()
    cfg.validate()
    # Anechoic region falls off the edge of a narrower grid
    with pytest.raises(ValueError):
        cfg.copy(grid_dims=[31, 5, 25]).validate()
    # Regions above and below a shifted grid
    with pytest.raises(ValueError):
        cfg.copy(grid_center=[0., 0., 16e-3]).validate()
    # Too few voxel columns to split the regions
    with pytest.raises(ValueError):
        cfg.copy(splits=40).validate()
    # Contrast regions are not used for point targets
    desk_psf_config(grid_dims=[8, 8, 8]).validate()
