"""
Testing utilities
"""

import os

import numpy
import pytest

from rcafmas.config import ExperimentConfig

def data_file(filename=None):
    root = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')
    return root if filename is None else os.path.join(root, filename)

def config_file(name):
    return os.path.join(data_file(), 'config', f'{name}.ini')

# Point-target configuration small enough to run in a few seconds
def desk_psf_config(**kwargs):
    cfg = ExperimentConfig(num_rows=32, num_cols=32, n_angles=6, angle_range=numpy.radians(10.),
                           phantom='point', depths=[15e-3], grid_center=[0., 0., 15e-3],
                           grid_spacing=[0.2e-3, 0.2e-3, 0.05e-3], grid_dims=[32, 32, 40],
                           snr_db=20., seed=1, cores=1)
    return cfg.copy(**kwargs) if len(kwargs) > 0 else cfg

def sweep_psf_config(**kwargs):
    return desk_psf_config(grid_spacing=[0.3e-3, 0.3e-3, 0.05e-3], grid_dims=[16, 16, 24],
                           **kwargs)

# Single-depth tube phantom with a low scatterer density
def small_cyst_config(**kwargs):
    cyst = dict(radius=1.5e-3, offset=2.5e-3, margin=0.5e-3, half_width_y=0.5e-3,
                roi_half_y=0.3e-3, density=5.)
    cfg = ExperimentConfig(num_rows=32, num_cols=32, n_angles=6, angle_range=numpy.radians(10.),
                           phantom='cyst', depths=[15e-3], cyst=cyst,
                           grid_center=[0., 0., 15e-3], grid_spacing=[0.2e-3, 0.2e-3, 0.1e-3],
                           grid_dims=[39, 5, 25], snr_db=20., seed=3, cores=1)
    return cfg.copy(**kwargs) if len(kwargs) > 0 else cfg

try:
    import matplotlib
except:
    matplotlib = None

requires_matplotlib = pytest.mark.skipif(matplotlib is None, reason='matplotlib is not installed')

