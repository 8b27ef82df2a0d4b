"""Phase-domain oscillator Ising machine simulator for max-cut."""

__version__ = "0.1.0"

from .graph import (ProblemGraph, EdgeListError, parse_edge_list, serialize_edge_list,
                    named_graph, random_graph, permute, to_coupling, quantize_weights)
from .readout import (SpinAssignment, OrderParameter, order_parameter, binarize, ternarize,
                      phase_detector_emulation, wrap_phase)
from .objective import (CutSolution, OracleSizeError, ising_energy, cut_value, total_weight,
                        brute_force_maxcut)
from .dynamics import (Schedule, Waveform, SimConfig, OscillatorState, Trajectory, phase_rhs,
                       step_rk4, step_euler_maruyama, integrate, random_initial_phases,
                       natural_frequencies, lyapunov_value)
from .harness import (ProtocolRun, SuccessStats, run_protocol, run_batch, run_trials,
                      sweep_coupling, shil_ablation, isomorph_battery, annealed_config)

__all__ = [name for name in dir() if not name.startswith("_")]
