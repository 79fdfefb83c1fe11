//! Seeded experiments, figure drivers and artifact output.

pub mod check;
mod config;
mod diagnostics;
mod experiment;
mod figures;
mod predict;

pub use config::{
    ExperimentConfig, HistogramConfig, KernelConfig, KernelKind, LawConfig, SmoothScale, StieltjesConfig,
    DEFAULT_BINS, DEFAULT_GRID_POINTS, DEFAULT_MC_SAMPLES, DEFAULT_ZETA_ATOMS,
};
pub use diagnostics::{diagnostics_reductions, xi_bound, DiagnosticsOptions, DiagnosticsOutput, DiagnosticsRow, SizeSummary, Verdict};
pub use experiment::{
    histogram_csv, law_csv, run_experiment, run_experiment_with_kernel, simulate_trials, to_json, trapezoid_mass,
    ComparisonReport, ExperimentOutput, LawFailure, LawFailureKind, SolverStats, SpectrumSummary, W2Pair,
    HISTOGRAM_FILE, LAW_FILE, REPORT_FILE, TIMING_FILE,
};
pub use figures::{
    figure1, figure2, finite_n_centering, semicircle_experiment, CenteringDiagnostic, Figure1Output, Figure1Panel,
    Figure2Output, Figure2Panel, FigureOptions, SemicircleOptions, SemicircleOutput, FIGURE1_BETAS, FIGURE2_TAUS,
};
pub use predict::{select_prediction, LawParams, Prediction, PredictionBasis};
