"""
Module for testing the geometry module.
"""

from IPython import embed

import numpy
import pytest

from rcafmas.models import geometry


def test_element_position():
    geom = geometry.ProbeGeometry(num_rows=128, num_cols=128, pitch=0.2e-3)
    assert numpy.isclose(geometry.element_position(geom, 'row', 0), -12.7e-3, rtol=0., atol=1e-12), \
            'First element in wrong position'
    assert numpy.isclose(geometry.element_position(geom, 'column', 127), 12.7e-3, rtol=0.,
                         atol=1e-12), 'Last element in wrong position'

    geom = geometry.ProbeGeometry(num_rows=3, num_cols=3, pitch=1e-3)
    assert geometry.element_position(geom, 'row', 1) == 0., 'Center element should be at 0'

    with pytest.raises(IndexError):
        geometry.element_position(geom, 'row', 3)
    with pytest.raises(ValueError):
        geometry.element_position(geom, 'diagonal', 0)


def test_element_positions():
    geom = geometry.ProbeGeometry(num_rows=16, num_cols=8, pitch=0.3e-3)
    r = geometry.element_positions(geom, 'row')
    assert r.size == 16, 'Wrong number of rows'
    assert numpy.allclose(r, -r[::-1]), 'Aperture should be centered'
    assert numpy.allclose(r, [geometry.element_position(geom, 'row', n) for n in range(16)]), \
            'Vector and scalar positions differ'
    assert geometry.element_positions(geom, 'column').size == 8, 'Wrong number of columns'


def test_probe():
    geom = geometry.ProbeGeometry()
    assert geom.element_count('row') == 128, 'Bad default'
    assert numpy.isclose(geom.element_length, 128*0.2e-3), 'Bad element length'
    assert numpy.isclose(geom.wavelength, 1540/5e6), 'Bad wavelength'
    assert geometry.receive_orientation('row') == 'column', 'Rows are received by columns'

    geom = geometry.ProbeGeometry(num_rows=32, num_cols=64)
    assert numpy.isclose(geom.strip_length('row'), 64*0.2e-3), \
            'Rows should span the column aperture'

    # Undersampled
    with pytest.raises(ValueError):
        geometry.ProbeGeometry(sampling_frequency=15e6)
    # Element length does not span the aperture
    with pytest.raises(ValueError):
        geometry.ProbeGeometry(element_length=10e-3)
    with pytest.raises(ValueError):
        geometry.ProbeGeometry(num_rows=0)


def test_tukey_window():
    assert numpy.array_equal(geometry.tukey_window(8, 0.), numpy.ones(8)), \
            'alpha=0 should be rectangular'
    assert numpy.allclose(geometry.tukey_window(8, 1.), numpy.hanning(8)), \
            'alpha=1 should be a Hann window'
    w = geometry.tukey_window(9, 0.5)
    assert numpy.allclose(w, w[::-1]), 'Window should be symmetric'
    assert w[4] == 1., 'Center should be 1'
    assert numpy.isclose(w[0], 0.) and numpy.isclose(w[8], 0.), 'Endpoints should be 0'

    with pytest.raises(ValueError):
        geometry.tukey_window(8, 1.5)
    with pytest.raises(ValueError):
        geometry.tukey_window(8, -0.1)


def test_schedule():
    schedule = geometry.make_schedule(5, numpy.radians(10.))
    assert schedule.ntx == 10, 'Wrong number of events'
    assert numpy.allclose(numpy.degrees(schedule.angles), [-5, -2.5, 0, 2.5, 5]), 'Wrong angles'
    assert numpy.array_equal([e.angle for e in schedule.row_events],
                             [e.angle for e in schedule.column_events]), \
            'Rows and columns should use the same angles'
    assert [e.orientation for e in schedule] == ['row']*5 + ['column']*5, \
            'Rows should be fired first'
    assert [e.index for e in schedule] == list(range(10)), 'Bad event indices'
    assert numpy.array_equal(schedule.angles, -schedule.angles[::-1]), \
            'Angles should be exactly symmetric'

    schedule = geometry.make_schedule(1, numpy.radians(30.))
    assert schedule.ntx == 2, 'Wrong number of events'
    assert all([e.angle == 0 for e in schedule]), 'Single angle should be 0'

    with pytest.raises(ValueError):
        geometry.make_schedule(0, 0.1)
    with pytest.raises(ValueError):
        geometry.make_schedule(5, numpy.pi)


def test_event():
    e = geometry.TransmitEvent('column', 0.1, index=3)
    assert e.receive == 'row', 'Columns are received by rows'
    assert e == geometry.TransmitEvent('column', 0.1, index=3), 'Equality failed'
    assert e != geometry.TransmitEvent('row', 0.1, index=3), 'Orientation should matter'
    with pytest.raises(ValueError):
        geometry.TransmitEvent('row', numpy.pi/2)


def test_grid():
    center = [0., 1e-3, 20e-3]
    spacing = [0.2e-3, 0.3e-3, 0.1e-3]
    grid = geometry.VoxelGrid.centered(center, spacing, [5, 6, 7])
    assert grid.size == 5*6*7, 'Bad size'
    assert numpy.allclose(grid.position([2, 3, 3]), center), 'Center voxel in wrong place'
    assert grid.nearest_index(center) == (2, 3, 3), 'Bad nearest index'

    x, y, z = grid.coordinates()
    assert numpy.allclose(x.reshape(grid.dims)[:,0,0], grid.axis(0)), 'Bad x ordering'
    assert numpy.allclose(z.reshape(grid.dims)[0,0,:], grid.axis(2)), 'Bad z ordering'
    xs, ys, zs = grid.coordinates(10, 20)
    assert numpy.array_equal(xs, x[10:20]) and numpy.array_equal(zs, z[10:20]), \
            'Partial coordinates do not match'
    assert numpy.allclose(grid.extent, grid.position(numpy.asarray(grid.dims)-1)), 'Bad extent'

    with pytest.raises(ValueError):
        grid.nearest_index([0., 0., 1.])
    with pytest.raises(ValueError):
        geometry.VoxelGrid([0., 0., -1e-3], spacing, [2, 2, 2])
    with pytest.raises(ValueError):
        geometry.VoxelGrid([0., 0., 1e-3], [0.1e-3, 0., 0.1e-3], [2, 2, 2])

