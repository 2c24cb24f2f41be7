"""Decoherence of topological qubits built from moving Majorana zero modes."""

from .analysis import (anti_unruh_scan, backflow_region_scan, classify_slope, detect_backflow,
                       detect_overtaking)
from .dynamics import (ReducedState, evolve, late_time_limit, transition_prob_first,
                       transition_prob_full, transition_rate)
from .frames import FrameMap, circular_tau_shift, tau2_separation, tau2_two_accels
from .influence import (CosineSwitch, Gaussian, InfluenceSeries, Unity, influence_bruteforce,
                        influence_const_accel_closed, influence_e, influence_m,
                        influence_static_exact, influence_thermal)
from .quadrature import TimeGrid, exp_integral_e1
from .spectra import Spectrum, thermal_factor, unruh_temperature
from .worldline import (Circular, ConstAccel, Constant, ConstVelocity, Cosine, DomainError,
                        GenericLinear, Rectangular, Static)

__version__ = "0.1.0"
