"""Full-car active suspension simulator for a parallel active link suspension.

Three suspension configurations (passive, PID feedback, fitted feedforward
plus PID) can be driven through step steer, steady cornering, brake in a
turn, straight acceleration and braking, fishhook and sinusoidal steering.
"""

from .compensation import (CompensationCoefficients, LoadTransferIncrement, force_to_torque,
                           poly_fit_increment, steady_state_ax_increment,
                           steady_state_ay_increment, steady_state_increment, torque_to_force)
from .controllers import (CONTROLLER_NAMES, FeedforwardPidController, Measurement,
                          PassiveController, PidController, actuator_track, feedforward_torques,
                          make_controller, pid_reference_torques)
from .fitting import (CalibrationAborted, CalibrationSample, IllConditioned, calibrate,
                      default_coefficients, fit_coefficients)
from .maneuvers import (FISHHOOK_MES, MANEUVERS, SINUSOID_FREQUENCIES, BrakeInTurn, Fishhook,
                        FishhookInitial, LongitudinalAccelBrake, SinusoidSteer, SteadyCornering,
                        Stage1NotConverged, StepSteer)
from .metrics import (RunReport, Telemetry, WindowMismatch, detect_rollover,
                      detect_two_wheel_lift, rms_ratio, rms_ratio_report, run_report,
                      settling_time)
from .params import (Config, ConfigError, PidGains, VehicleParams, load_config, save_config)
from .simulation import fishhook_delta_ini, rolled_over, run_fishhook, simulate
from .vehicle import (CornerForces, DriverCommand, NumericalDivergence, Plant, VehicleState,
                      compute_lateral_tire_force, compute_tire_vertical_force, step_dynamics)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
