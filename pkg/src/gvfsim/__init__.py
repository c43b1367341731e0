"""Non-singular guiding vector fields for cooperative moving path following.

Library layout:

- `linalg`: generalized cross products and finite-difference oracles
- `paths`: parametric paths, level-set errors, extended gradients
- `frames`: moving targets and frame transformations
- `field`: the single-agent guidance field and Lyapunov diagnostics
- `coop`: communication graphs, consensus, swarm Lyapunov monitor
- `sim`: scenarios, the fixed-step runner, run metrics
- `gridsample`: field portraits on spatial grids
- `config`: YAML scenario documents (see `configs/` for bundled examples)
- `cli`: the `gvfsim` command-line entry point
"""
from .bench import benchmark_scenario
from .check import CheckResult, run_property_checks
from .config import (
    load_bundled,
    parse_config,
    parse_config_file,
    scenario_to_dict,
    serialize_config,
)
from .coop import CommGraph, FormationPattern, combined_field, composite_lyapunov, consensus_term, gain_gate
from .csvio import write_field_csv, write_trajectory_csv
from .errors import (
    ConfigError,
    DivergenceError,
    EulerSingularityError,
    GainValidityError,
    GvfSimError,
    SingularJacobianError,
)
from .field import FieldOutput, GainSet, extended_field, lyapunov_gradient, lyapunov_rate_report, lyapunov_value, mpf_field, planar_mpf_field
from .frames import (
    AircraftTarget,
    FrameTransform,
    StaticTransform,
    TimeProfile,
    UnicycleTarget,
    se2_transform,
    se3_euler_transform,
    step_aircraft,
    step_unicycle,
    verify_transform,
)
from .gridsample import FieldSampleGrid, FieldSampleResult, sample_field
from .linalg import generalized_cross, skew2
from .paths import (
    ParametricPath,
    builtin_ellipse,
    builtin_lissajous,
    extend,
    level_set_errors,
    project,
    trig_path,
    wedge_closed_form,
)
from .sim import RunMetrics, Scenario, TrajectoryRecord, metrics, rk4_step, run, swarm_derivative

__version__ = "0.1.0"
