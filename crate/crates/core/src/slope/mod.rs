//! λ-subeigenvectors and the piecewise-affine models built from them.

mod model;
mod report;
mod solve;
mod vector;

pub use model::{
    build_constant_slope_model, evaluate_model, summability, ConstantSlopeModel, SlopeMode, SummabilityOptions,
};
pub use report::{analyze_slope, limit_cylinder_scan, lipschitz_report, LimitCylinderWarning, LipschitzReport, SlopeAnalysis};
pub use solve::{
    characteristic_polynomial, example1_eigenvector, exact_perron_root, exact_perron_vector, perron_vector,
    to_rational, vj_subeigenvector, VjOptions, VjSubEigenvector,
};
pub use vector::{check_subeigenvector, ResidualReport, RowClass, RowResidual, SubEigenvector, Summability};
