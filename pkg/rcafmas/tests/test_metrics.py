
from IPython import embed

import numpy
import pytest

from rcafmas import metrics
from rcafmas.models.compound import EnvelopeVolume
from rcafmas.models.geometry import VoxelGrid


def _grid():
    return VoxelGrid.centered([0., 0., 10e-3], [0.1e-3, 0.1e-3, 0.1e-3], [41, 41, 41])


def _gaussian(grid, sigma, method='DAS', center=(0., 0., 10e-3)):
    x, y, z = [c.reshape(grid.dims) for c in grid.coordinates()]
    _sigma = numpy.atleast_1d(sigma)*numpy.ones(3)
    values = numpy.exp(-0.5*(((x-center[0])/_sigma[0])**2 + ((y-center[1])/_sigma[1])**2
                             + ((z-center[2])/_sigma[2])**2))
    return EnvelopeVolume(values, grid, method)


def test_peak():
    grid = _grid()
    env = _gaussian(grid, 0.3e-3, center=(0.2e-3, -0.3e-3, 10.5e-3))
    index, position = metrics.find_peak(env)
    assert index == (22, 17, 25), 'Wrong peak voxel'
    assert numpy.allclose(position, [0.2e-3, -0.3e-3, 10.5e-3]), 'Wrong peak position'

    # Ties go to the first voxel
    flat = EnvelopeVolume(numpy.ones(grid.dims), grid, 'DAS')
    assert metrics.find_peak(flat)[0] == (0, 0, 0), 'Ties should go to the first voxel'
    with pytest.raises(ValueError):
        metrics.find_peak(flat.scaled(0.))


def test_fwhm():
    grid = _grid()
    sigma = numpy.array([0.4e-3, 0.3e-3, 0.2e-3])
    env = _gaussian(grid, sigma)
    expected = 2*numpy.sqrt(2*numpy.log(2))*sigma
    for i in range(3):
        assert numpy.isclose(metrics.fwhm(env, i), expected[i], rtol=0.02), \
                f'Bad FWHM along axis {i}'

    # A single bright voxel has a width of one voxel
    values = numpy.zeros(grid.dims)
    values[20,20,20] = 1.
    env = EnvelopeVolume(values, grid, 'DAS')
    assert numpy.isclose(metrics.fwhm(env, 0), grid.spacing[0]), 'Bad single-voxel width'

    # Profile never falls below half maximum
    with pytest.raises(ValueError):
        metrics.fwhm(EnvelopeVolume(numpy.ones(grid.dims), grid, 'DAS'), 2)


def test_pir():
    grid = _grid()
    env = _gaussian(grid, 0.3e-3)
    region = metrics.PeakRegion.from_envelope(env)
    value = metrics.pir(env, region)
    assert 0.9 < value <= 1., 'Most of the intensity should be in the main lobe'
    assert metrics.pir(env, region, intensity=False) < value, \
            'Envelope sums should be less concentrated than intensity sums'

    # Adding off-peak energy lowers the ratio
    values = env.values.copy()
    values[2,2,2] = 0.5
    lower = metrics.pir(EnvelopeVolume(values, grid, 'DAS'), region)
    assert lower < value, 'Side lobes should lower the PIR'

    # Invariant to scale
    assert numpy.isclose(metrics.pir(env.scaled(7.), region), value, rtol=1e-12), \
            'PIR should be scale invariant'

    with pytest.raises(ValueError):
        metrics.PeakRegion([0., 0., 1e-2], [1e-3, 0., 1e-3])


def test_pmslr():
    grid = _grid()
    env = _gaussian(grid, 0.3e-3)
    region = metrics.PeakRegion.from_envelope(env)
    values = env.values.copy()
    values[38,20,20] = 0.01
    env = EnvelopeVolume(values, grid, 'DAS')
    assert numpy.isclose(metrics.max_sidelobe(env, region), 0.01), 'Wrong side-lobe level'
    assert numpy.isclose(metrics.pmslr(env, region), 40.), 'Wrong PMSLR'
    assert numpy.isclose(metrics.pmslr(env.scaled(0.1), region), 40.), \
            'PMSLR should be scale invariant'

    # Nothing outside the exclusion zone
    values = numpy.zeros(grid.dims)
    values[20,20,20] = 1.
    env = EnvelopeVolume(values, grid, 'DAS')
    region = metrics.PeakRegion.from_envelope(env)
    assert metrics.pmslr(env, region) == metrics.PMSLR_CAP, 'Should return the cap'

    # Exclusion zone covers everything
    with pytest.raises(ValueError):
        metrics.max_sidelobe(env, metrics.PeakRegion([0., 0., 10e-3], [1e-2, 1e-2, 1e-2]))


def test_roi():
    grid = _grid()
    a = metrics.RoiBox([-1e-3, 0., 10e-3], [0.5e-3, 0.5e-3, 0.5e-3], 'tissue1')
    b = metrics.RoiBox([1e-3, 0., 10e-3], [0.5e-3, 0.5e-3, 0.5e-3], 'tissue2')
    assert not a.overlaps(b), 'Boxes should not overlap'
    assert a.overlaps(metrics.RoiBox([-0.6e-3, 0., 10e-3], [0.2e-3]*3, 'noise')), \
            'Boxes should overlap'
    assert numpy.sum(a.mask(grid)) == 11**3, 'Wrong number of voxels'

    masks = a.split(grid, 4)
    assert len(masks) == 4, 'Wrong number of sub-regions'
    assert numpy.array_equal(numpy.sum(masks, axis=0).astype(bool), a.mask(grid)), \
            'Sub-regions should tile the box'
    assert numpy.all(numpy.sum(masks, axis=0) <= 1), 'Sub-regions should not overlap'

    with pytest.raises(ValueError):
        a.split(grid, 12)
    with pytest.raises(ValueError):
        metrics.RoiBox([0., 0., 10e-3], [3e-3, 0.5e-3, 0.5e-3], 'tissue').mask(grid)
    with pytest.raises(ValueError):
        metrics.RoiBox([0., 0., 10e-3], [1e-3, 1e-3, 1e-3], 'cyst')


def test_contrast():
    grid = _grid()
    a = metrics.RoiBox([-1e-3, 0., 10e-3], [0.5e-3, 0.5e-3, 0.5e-3], 'tissue1')
    b = metrics.RoiBox([1e-3, 0., 10e-3], [0.5e-3, 0.5e-3, 0.5e-3], 'tissue2')
    values = numpy.ones(grid.dims)
    values[a.mask(grid)] = 2.
    env = EnvelopeVolume(values, grid, 'FMAS')
    assert numpy.isclose(metrics.tcr(env, a, b), 20*numpy.log10(2)), 'Wrong TCR'
    assert numpy.isclose(metrics.tnr(env, b, a), -20*numpy.log10(2)), 'Wrong TNR'

    mean, err = metrics.subregion_stats(env, a, splits=4)
    assert numpy.isclose(mean, 2.) and numpy.isclose(err, 0.), 'Wrong sub-region stats'
    value, err = metrics.subregion_ratio_db(env, a, b, splits=4)
    assert numpy.isclose(value, 20*numpy.log10(2)), 'Wrong sub-region ratio'
    assert numpy.isclose(err, 0., atol=1e-12), 'Constant regions should have no scatter'

    with pytest.raises(ValueError):
        metrics.tcr(env, a, metrics.RoiBox([-0.8e-3, 0., 10e-3], [0.5e-3]*3, 'tissue2'))
    empty = values.copy()
    empty[b.mask(grid)] = 0.
    with pytest.raises(ValueError):
        metrics.tnr(EnvelopeVolume(empty, grid, 'FMAS'), a, b)
    with pytest.warns(UserWarning):
        metrics.tcr(env, a, metrics.RoiBox([1e-3, 0., 11e-3], [0.5e-3]*3, 'tissue2'))


def test_report():
    report = metrics.MetricsReport('DAS', 10, 20., 50e-3, fwhm=[1e-3, 1e-3, 0.5e-3], pir=0.5,
                                   pmslr_db=30., pair_count=0)
    row = report.to_row()
    assert len(row) == len(metrics.MetricsReport.columns), 'Row does not match the columns'
    assert numpy.allclose(row[3:5], [50., 1.]), 'Lengths should be in mm'
    assert numpy.isnan(report.tcr_db), 'Unset metrics should be NaN'

    with pytest.raises(ValueError):
        metrics.MetricsReport('DAS', 10, 20., 50e-3, pir=1.5)
    with pytest.raises(ValueError):
        metrics.MetricsReport('DAS', 10, 20., 50e-3, fwhm=[1e-3, -1e-3, 1e-3])


def test_psf_report():
    grid = _grid()
    das = _gaussian(grid, 0.4e-3, method='DAS')
    fmas = _gaussian(grid, 0.25e-3, method='FMAS')
    reports, region = metrics.psf_report([fmas, das], 10, 20., 10e-3)
    assert numpy.allclose(region.semi_axes, 2*numpy.sqrt(2*numpy.log(2))*0.4e-3, rtol=0.02), \
            'Region should be defined by the DAS volume'
    assert [r.method for r in reports] == ['FMAS', 'DAS'], 'Reports out of order'
    assert reports[0].pir > reports[1].pir, 'Narrower main lobe should have a larger PIR'
    assert reports[0].fwhm_x < reports[1].fwhm_x, 'Narrower main lobe should have a smaller FWHM'

    # Provided regions are used directly
    _, _region = metrics.psf_report([fmas], 10, 20., 10e-3, region=region)
    assert _region is region, 'Provided region not used'
    with pytest.raises(ValueError):
        metrics.psf_report([], 10, 20., 10e-3)

