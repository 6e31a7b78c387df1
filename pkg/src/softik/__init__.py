"""Inverse-kinematics stack for a three-chamber soft pneumatic actuator.

Constant-curvature kinematics, the hyperelastic pressure map with calibration,
a from-scratch back-propagation network learning tip -> pressures, a synthetic
measurement platform, and the figure-8 trajectory experiment.
"""

from .actuation import (
    CalibrationFit,
    ChamberPressures,
    analytical_ik,
    calibrate,
    forward_model,
    length_to_pressure,
    load_calibration_csv,
    pressure_to_length,
)
from .bpnet import (
    MapeResult,
    NetworkConfig,
    NetworkWeights,
    PressureNet,
    Standardizer,
    SweepResult,
    SweepRow,
    TrainingHistory,
    batch_mse,
    candidate_hidden_sizes,
    forward_pass,
    gradients,
    hidden_sweep,
    init_weights,
    loss,
    mac_count,
    mape,
    predict_pressures,
    r_squared,
    sigmoid,
    train,
)
from .config import RunConfig
from .datagen import (
    DEFAULT_LEVELS,
    DEFAULT_TRAIN_P1_LEVELS,
    Dataset,
    NoiseModel,
    Provenance,
    load_dataset,
    pressure_grid,
    save_dataset,
    simulate_platform,
    simulate_tip,
    split_dataset,
)
from .errors import (
    BracketFailure,
    ConfigError,
    ConstantTargets,
    DegenerateFeature,
    DegenerateFit,
    DegenerateGeometry,
    DivergedLoss,
    InfiniteRadius,
    InsufficientData,
    NoEligibleComponents,
    NonPositiveLength,
    NonPositiveZ,
    SoftikError,
    UnknownLevel,
    Unreachable,
)
from .geometry import DEFAULT_GEOMETRY, ActuatorGeometry
from .kinematics import (
    CHAMBER_AZIMUTHS,
    STRAIGHT_EPS,
    ArcParameters,
    ChamberLengths,
    TipPosition,
    arc_to_chamber_lengths,
    arc_to_tip,
    bending_radius,
    chamber_lengths_to_arc,
    tip_to_arc,
)
from .trajectory import (
    PressureSchedule,
    ReportRow,
    TrajectoryReport,
    Waypoint,
    evaluate,
    lemniscate_waypoints,
    load_report_rows,
    load_schedule_csv,
    plan,
    summarize_rows,
    write_report_csv,
    write_report_svg,
    write_schedule_csv,
    write_summary_json,
)

__version__ = "0.1.0"
