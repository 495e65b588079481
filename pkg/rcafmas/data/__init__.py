
from .rfdata import RfDataSet, IqDataSet
from .phantom import Scatterer, Phantom, Region, CystSpec
from .phantom import make_point_phantom, make_cyst_phantom, resolution_cell
from .synth import PulseModel, make_pulse, simulate_rf, add_noise, acquisition_window
