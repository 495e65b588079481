"""
Tests for the channel-data synthesis and phantoms.
"""

from IPython import embed

import numpy
import pytest

from scipy import signal

from rcafmas.models.geometry import ProbeGeometry, TransmitEvent, TransmitSchedule
from rcafmas.models.geometry import VoxelGrid, make_schedule
from rcafmas.data import synth
from rcafmas.data import phantom as ph
from rcafmas.data.rfdata import RfDataSet
from rcafmas.config import ExperimentConfig


def test_pulse():
    model = synth.PulseModel(5e6, 6e6)
    p = synth.make_pulse(model, 40e6)
    assert p.size % 2 == 1, 'Pulse should have a central sample'

    spec = numpy.absolute(numpy.fft.rfft(p, n=4096))
    freq = numpy.fft.rfftfreq(4096, d=1/40e6)
    assert abs(freq[numpy.argmax(spec)] - 5e6) < 5e4, 'Spectral peak is not at 5 MHz'

    env = numpy.absolute(signal.hilbert(p))
    assert abs(numpy.argmax(env) - p.size//2) <= 1, 'Envelope peak is not at the center'
    assert numpy.isclose(p[p.size//2], 1.), 'Peak should be 1 and zero-phase'

    p2 = synth.make_pulse(synth.PulseModel(5e6, 6e6, amplitude=2.5), 40e6)
    assert numpy.allclose(p2, 2.5*p), 'Pulse should scale with amplitude'

    with pytest.raises(ValueError):
        synth.make_pulse(model, 15e6)


def test_pulse_duration():
    model = synth.PulseModel(5e6, 6e6)
    t = numpy.linspace(-3*model.duration, 3*model.duration, 20001)
    energy = model(t)**2
    inside = numpy.absolute(t) <= model.half_duration
    assert numpy.sum(energy[inside])/numpy.sum(energy) > 0.99, \
            'Pulse duration should enclose 99% of the energy'


def test_empty_phantom():
    geom = ProbeGeometry(num_rows=8, num_cols=8)
    schedule = make_schedule(2, numpy.radians(10.))
    rf = synth.simulate_rf(geom, ph.Phantom(), schedule, synth.PulseModel(5e6, 6e6))
    assert rf.nevents == 4, 'Wrong number of events'
    assert numpy.all(rf.samples == 0), 'Empty phantom should give no signal'

    with pytest.raises(ValueError):
        synth.simulate_rf(geom, ph.Phantom(), TransmitSchedule(1, 0., []),
                          synth.PulseModel(5e6, 6e6))


def test_superposition():
    geom = ProbeGeometry(num_rows=16, num_cols=16)
    schedule = make_schedule(3, numpy.radians(10.))
    pulse = synth.PulseModel(5e6, 6e6)
    a = ph.Phantom(positions=[[0.3e-3, -0.2e-3, 10e-3]])
    b = ph.Phantom(positions=[[-0.5e-3, 0.4e-3, 11e-3]], amplitudes=[-0.7])
    kw = dict(t0=10e-6, nsamples=800)
    rf_a = synth.simulate_rf(geom, a, schedule, pulse, **kw)
    rf_b = synth.simulate_rf(geom, b, schedule, pulse, **kw)
    rf_ab = synth.simulate_rf(geom, a + b, schedule, pulse, **kw)
    assert numpy.allclose(rf_ab.samples, (rf_a + rf_b).samples, rtol=1e-12, atol=1e-10), \
            'Synthesis should be a superposition'

    rf_s = synth.simulate_rf(geom, (a + b).scaled(2.5), schedule, pulse, **kw)
    assert numpy.allclose(rf_s.samples, 2.5*rf_ab.samples, rtol=1e-12, atol=1e-10), \
            'Synthesis should be linear in the amplitudes'


def test_echo_time():
    # Odd element count puts an element on the axis
    geom = ProbeGeometry(num_rows=33, num_cols=33)
    schedule = make_schedule(1, 0.)
    z = 50e-3
    rf = synth.simulate_rf(geom, ph.make_point_phantom([z]), schedule, synth.PulseModel(5e6, 6e6))
    env = numpy.absolute(signal.hilbert(rf.samples[0,16]))
    t_peak = rf.time()[numpy.argmax(env)]
    assert abs(t_peak - 64.935e-6) <= 1/geom.sampling_frequency, 'Echo at wrong time'


def test_row_column_symmetry():
    geom = ProbeGeometry(num_rows=16, num_cols=16)
    schedule = make_schedule(1, 0.)
    rf = synth.simulate_rf(geom, ph.make_point_phantom([12e-3]), schedule,
                           synth.PulseModel(5e6, 6e6))
    assert numpy.allclose(rf.samples[0], rf.samples[1], rtol=0., atol=1e-12), \
            'On-axis row and column data should be identical'


def test_mirror_symmetry():
    geom = ProbeGeometry(num_rows=16, num_cols=12)
    pulse = synth.PulseModel(5e6, 6e6)
    theta = numpy.radians(4.)
    phi = numpy.radians(2.)
    p = ph.Phantom(positions=[[1.37e-3, 0.61e-3, 17.3e-3], [-0.52e-3, -0.23e-3, 16.1e-3]],
                   amplitudes=[1., -0.4])
    sched = TransmitSchedule(1, 0., [TransmitEvent('row', theta),
                                     TransmitEvent('column', phi, index=1)])
    msched = TransmitSchedule(1, 0., [TransmitEvent('row', -theta),
                                      TransmitEvent('column', phi, index=1)])
    kw = dict(t0=15e-6, nsamples=1200)
    rf = synth.simulate_rf(geom, p, sched, pulse, **kw)
    mrf = synth.simulate_rf(geom, p.mirrored(0), msched, pulse, **kw)
    scale = numpy.amax(numpy.absolute(rf.samples))
    # Row events are received by the columns, which do not see the x flip
    assert numpy.allclose(mrf.samples[0], rf.samples[0], rtol=1e-9, atol=1e-9*scale), \
            'Mirrored row event should be unchanged'
    # Column events are received by the rows, which are reversed
    n = rf.nchannels[1]
    assert numpy.allclose(mrf.samples[1,:n], rf.samples[1,:n][::-1], rtol=1e-9,
                          atol=1e-9*scale), 'Mirrored column event should reverse the channels'


def test_channel_padding():
    geom = ProbeGeometry(num_rows=8, num_cols=12)
    schedule = make_schedule(1, 0.)
    rf = synth.simulate_rf(geom, ph.make_point_phantom([10e-3]), schedule,
                           synth.PulseModel(5e6, 6e6))
    assert rf.samples.shape[1] == 12, 'Channel axis should fit the larger aperture'
    assert numpy.array_equal(rf.nchannels, [12, 8]), 'Rows are received by 12 columns'
    assert numpy.all(rf.samples[1,8:] == 0), 'Padded channels should be empty'


def test_acquisition_window():
    geom = ProbeGeometry(num_rows=16, num_cols=16)
    schedule = make_schedule(3, numpy.radians(10.))
    pulse = synth.PulseModel(5e6, 6e6)
    grid = VoxelGrid.centered([0., 0., 20e-3], [0.2e-3, 0.2e-3, 0.1e-3], [9, 9, 11])
    t0, nsamp = synth.acquisition_window(geom, grid, schedule, pulse)
    p = ph.make_point_phantom([20e-3])
    full = synth.simulate_rf(geom, p, schedule, pulse, t0=0.,
                              nsamples=int(t0*geom.sampling_frequency) + nsamp + 200)
    windowed = synth.simulate_rf(geom, p, schedule, pulse, t0=t0, nsamples=nsamp)
    assert numpy.isclose(numpy.sum(windowed.samples**2), numpy.sum(full.samples**2),
                         rtol=1e-4), 'Window should capture the full echo'


def test_transmit_apodization():
    geom = ProbeGeometry(num_rows=32, num_cols=32)
    event = TransmitEvent('row', 0.)
    pos = numpy.array([[0., 0., 10e-3], [0., 5e-3, 10e-3], [4e-3, 0., 10e-3]])
    w = synth.transmit_apodization(geom, event, pos)
    assert numpy.isclose(w[0], 1., atol=0.02), 'Center should have nearly unit weight'
    assert 0 < w[1] < 0.01, 'Beyond the strip ends should have little weight'
    assert 0 < w[2] < 0.1, 'Outside the aperture should have little weight'

    # Steering moves the insonified region
    event = TransmitEvent('row', numpy.radians(10.))
    w = synth.transmit_apodization(geom, event, numpy.array([[1.76e-3, 0., 10e-3]]))
    assert numpy.isclose(w[0], 1., atol=0.02), 'Ray through the aperture center should be lit'

    with pytest.raises(ValueError):
        synth.transmit_apodization(geom, event, numpy.array([[0., 0., 0.]]))


def test_transmit_apodization_deep_target():
    # The packaged point-target setup: the steered waves leave the small
    # aperture's geometric shadow before reaching the target, but the
    # diffracted edges still insonify it.
    config = ExperimentConfig.default('psf')
    geom = config.probe()
    target = numpy.array([[0., 0., config.depths[0]]])
    schedule = config.schedule()
    w = numpy.array([synth.transmit_apodization(geom, e, target, alpha=config.tx_alpha)[0]
                     for e in schedule])
    assert numpy.all(w > 0.05), 'Every event should reach the target'
    rows = w[:schedule.ntx//2]
    assert numpy.allclose(rows, w[schedule.ntx//2:]), 'Rows and columns should match'
    assert numpy.allclose(rows, rows[::-1]), 'Weights should be symmetric in angle'
    assert numpy.argmax(rows) == rows.size//2, 'Unsteered wave should be strongest'


def test_noise():
    rng = numpy.random.default_rng(5)
    events = [TransmitEvent('row', 0.), TransmitEvent('column', 0., index=1)]
    t = numpy.arange(16384)/40e6
    samples = numpy.tile(numpy.sin(2*numpy.pi*5e6*t), (2,32,1))*rng.uniform(0.5, 1.5, (2,32,1))
    rf = RfDataSet(samples, 0., 40e6, events)
    noisy = synth.add_noise(rf, 20., seed=11)
    noise = noisy.samples - rf.samples
    snr = 10*numpy.log10(rf.signal_power()/numpy.mean(noise**2))
    assert abs(snr - 20) < 0.5, 'Noise level does not match the SNR'

    again = synth.add_noise(rf, 20., seed=11)
    assert numpy.array_equal(again.samples, noisy.samples), 'Noise should be deterministic'
    other = synth.add_noise(rf, 20., seed=12)
    assert not numpy.array_equal(other.samples, noisy.samples), 'Seed should matter'

    with pytest.raises(ValueError):
        synth.add_noise(rf.scaled(0.), 20., seed=1)


def test_point_phantom():
    p = ph.make_point_phantom([50e-3])
    assert p.nscatterers == 1, 'Should have a single scatterer'
    assert numpy.array_equal(p.positions[0], [0., 0., 0.05]), 'Wrong position'
    assert ph.make_point_phantom([]).nscatterers == 0, 'Should be empty'
    p = ph.make_point_phantom(numpy.linspace(10e-3, 100e-3, 100))
    assert p.nscatterers == 100, 'Wrong number of scatterers'
    assert p.scatterers[-1].amplitude == 1., 'Targets should have unit amplitude'

    with pytest.raises(ValueError):
        ph.make_point_phantom([-1e-3])


def test_cyst_phantom():
    geom = ProbeGeometry(num_rows=32, num_cols=32)
    spec = ph.CystSpec(radius=2e-3, depths=[15e-3], offset=3e-3, density=10., margin=1e-3,
                       half_width_y=1e-3, roi_half_y=0.5e-3)
    p = ph.make_cyst_phantom(geom, spec=spec, rng=numpy.random.default_rng(1))

    cell = ph.resolution_cell(geom, 15e-3)
    assert p.nscatterers == int(numpy.round(spec.density*spec.field_volume/cell)), \
            'Wrong number of scatterers'
    for r in p.regions_with_role('anechoic'):
        assert not numpy.any(r.contains(p.positions)), 'Anechoic region has scatterers'

    high = numpy.any([r.contains(p.positions) for r in p.regions_with_role('high')], axis=0)
    ratio = numpy.mean(numpy.absolute(p.amplitudes[high])) \
                / numpy.mean(numpy.absolute(p.amplitudes[numpy.logical_not(high)]))
    assert abs(ratio/spec.high_scale - 1) < 0.1, 'High-scatter amplitude ratio is wrong'

    bg = p.regions_with_role('background')[0]
    assert numpy.all(bg.contains(p.positions)), 'Scatterers outside the background box'

    # Same generator state gives the same phantom
    p2 = ph.make_cyst_phantom(geom, spec=spec, rng=numpy.random.default_rng(1))
    assert numpy.array_equal(p.positions, p2.positions), 'Phantom should be reproducible'

    # Anechoic regions must stay empty
    with pytest.raises(ValueError):
        ph.Phantom(positions=[[3e-3, 0., 15e-3]], regions=spec.tubes())


def test_cyst_spec():
    # Speckle must be fully developed
    with pytest.raises(ValueError):
        ph.CystSpec(density=4.9)
    assert ph.CystSpec(density=5.).density == 5., 'The lower density limit should be allowed'
    with pytest.raises(ValueError):
        ph.CystSpec(depths=[15e-3, 17e-3]).tubes()
    with pytest.raises(ValueError):
        ph.CystSpec(radius=3e-3, offset=3.1e-3)

    spec = ph.CystSpec()
    rois = ph.cyst_rois(spec, 35e-3)
    assert sorted(rois.keys()) == ['noise', 'tissue', 'tissue1', 'tissue2'], 'Wrong ROIs'
    assert not rois['tissue1'].overlaps(rois['tissue2']), 'TCR regions should be disjoint'
    assert not rois['tissue'].overlaps(rois['noise']), 'TNR regions should be disjoint'
    tubes = spec.tubes()
    corner = rois['tissue1'].center + 0.99*(rois['tissue1'].lower - rois['tissue1'].center)
    # Tubes are ordered by depth, high-scatter first
    assert tubes[2].contains(corner[None,:])[0], 'Region should be inside the tube'
    with pytest.raises(ValueError):
        ph.cyst_rois(spec, 20e-3)

