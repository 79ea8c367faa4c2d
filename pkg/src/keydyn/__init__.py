"""Deterministic keystroke-dynamics simulation and verification pipeline.

Simulates free-text typing sessions for a population of agents, extracts
sliding-window timing features, and evaluates how well sessions can be
told apart: distribution tests per feature, one-class inlier rates, and
random-forest pairwise verdicts.
"""

from .config import ExperimentConfig
from .dataset import (
    SESSION_HEADER,
    SchemaError,
    SessionData,
    generate_grid,
    load_manifest,
    manifest_sessions,
    read_session,
    write_session,
)
from .features import (
    FEATURE_NAMES,
    FEATURE_TAGS,
    FeatureWindow,
    Keystroke,
    PairingError,
    extract_windows,
    features_to_matrix,
    load_grid_features,
    pair_events,
    read_features,
    write_features,
)
from .keyboard import (
    BACKSPACE,
    KEYBOARD_KINDS,
    SPACE,
    KeyboardGeometry,
    KeyboardModel,
    UnknownKeyError,
    default_geometry,
    key_distance,
    keyboard_model,
)
from .ocsvm import ConvergenceError, OneClassSVM, median_heuristic_gamma
from .preprocessing import PrincipalComponents, ZScoreScaler
from .profiles import (
    DEFAULT_PROFILE_RANGES,
    AgentProfile,
    ProfileRanges,
    agent_label,
    instantiate_profiles,
    parse_agent_label,
)
from .seeding import derive_seed
from .simulator import (
    COMMON_DIGRAPHS,
    DEFAULT_SIM_CONFIG,
    KeystrokeEvent,
    PersonalMatrix,
    SimConfig,
    SimState,
    build_personal_matrix,
    dwell_time,
    flight_time,
    matrix_rng,
    simulate_session,
    update_fatigue,
)
from .stats import (
    CrossKeyboardKs,
    KsMatrix,
    KsResult,
    compare_sessions_ks,
    cross_keyboard_ks,
    ks_matrix,
    ks_two_sample,
    write_cross_keyboard_csv,
    write_ks_matrix_csv,
    write_ks_matrix_json,
)
from .text import FrequencyTable, english_frequencies, sample_character
from .verify import (
    DEFAULT_FOREST_PARAMS,
    OCSVM_PAIRINGS,
    OCSVM_TRANSFORM_MODES,
    RF_CSV_HEADER,
    ForestParams,
    OcsvmMatrix,
    RfCell,
    RfCrossKeyboard,
    RfMatrix,
    RfVerdict,
    check_forest_structure,
    inlier_rate,
    ocsvm_matrix,
    rf_compare,
    rf_cross_keyboard,
    rf_matrix,
    train_forest,
    write_importances_csv,
    write_ocsvm_csv,
    write_ocsvm_json,
    write_rf_cross_keyboard_csv,
    write_rf_matrix_csv,
    write_rf_matrix_json,
)

__version__ = "0.1.0"

__all__ = [
    "AgentProfile",
    "BACKSPACE",
    "COMMON_DIGRAPHS",
    "ConvergenceError",
    "DEFAULT_FOREST_PARAMS",
    "OCSVM_PAIRINGS",
    "OCSVM_TRANSFORM_MODES",
    "RF_CSV_HEADER",
    "DEFAULT_PROFILE_RANGES",
    "DEFAULT_SIM_CONFIG",
    "ExperimentConfig",
    "FEATURE_NAMES",
    "FEATURE_TAGS",
    "FeatureWindow",
    "ForestParams",
    "FrequencyTable",
    "KEYBOARD_KINDS",
    "KeyboardGeometry",
    "KeyboardModel",
    "Keystroke",
    "KeystrokeEvent",
    "CrossKeyboardKs",
    "KsMatrix",
    "KsResult",
    "OcsvmMatrix",
    "OneClassSVM",
    "PairingError",
    "PersonalMatrix",
    "PrincipalComponents",
    "ProfileRanges",
    "RfCell",
    "RfCrossKeyboard",
    "RfMatrix",
    "RfVerdict",
    "SESSION_HEADER",
    "SPACE",
    "SchemaError",
    "SessionData",
    "SimConfig",
    "SimState",
    "UnknownKeyError",
    "ZScoreScaler",
    "agent_label",
    "build_personal_matrix",
    "check_forest_structure",
    "compare_sessions_ks",
    "cross_keyboard_ks",
    "default_geometry",
    "derive_seed",
    "dwell_time",
    "english_frequencies",
    "extract_windows",
    "features_to_matrix",
    "flight_time",
    "generate_grid",
    "inlier_rate",
    "instantiate_profiles",
    "key_distance",
    "keyboard_model",
    "ks_matrix",
    "ks_two_sample",
    "write_cross_keyboard_csv",
    "write_ks_matrix_csv",
    "write_ks_matrix_json",
    "load_grid_features",
    "load_manifest",
    "manifest_sessions",
    "matrix_rng",
    "median_heuristic_gamma",
    "ocsvm_matrix",
    "pair_events",
    "parse_agent_label",
    "read_features",
    "read_session",
    "rf_compare",
    "rf_cross_keyboard",
    "rf_matrix",
    "sample_character",
    "simulate_session",
    "train_forest",
    "write_importances_csv",
    "write_ocsvm_csv",
    "write_ocsvm_json",
    "write_rf_cross_keyboard_csv",
    "write_rf_matrix_csv",
    "write_rf_matrix_json",
    "update_fatigue",
    "write_features",
    "write_session",
]
