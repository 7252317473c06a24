"""Sobol' points, nested uniform scrambling and digital-net diagnostics."""

from .direction_numbers import (DirectionEntry, DirectionTable, default_table,
                                generating_matrix, parse_direction_file)
from .estimators import (ConvergenceTable, SlopeReport, Variant, estimate, fit_slope,
                         run_convergence)
from .integrands import Integrand, g0, g1, g2, get_integrand, map_to_ranges, wing_weight
from .nets import (IntervalSpec, NetVerdict, StrictT, count_in_interval, enumerate_shapes,
                   is_tmd_net, strict_t)
from .scramble import ScrambleConfig, ScrambleKey, scramble_block, scramble_point
from .sobol import (DigitalPoint, PointMatrix, SequenceConfig, block, point, sobol,
                    van_der_corput)

__version__ = "0.1.0"
