//! Parametric charts, moving frames, connectors and surface calculus.
//!
//! Orientation is fixed by `ν = e_u × e_v`. The curvature tensor is `∇ₛν`,
//! so a sphere of radius `R` has principal curvatures `1/R`.

pub mod calculus;
pub mod chart;
pub mod compat;
pub mod frame;

pub use calculus::{
    fd_derivative, fd_partials, scalar_integrability_residual, surface_curl, surface_divergence,
    surface_gradient_scalar, surface_gradient_tensor, surface_gradient_vector, surface_laplacian,
    vector_integrability_residual, FdStep, FdValue, FrameAxis, FrameGradient, Gradient, Normal,
    Pullback, TensorField, Uniform,
};
pub use chart::{
    sample, shape, tangent_eigen, Chart, ChartKind, ChartSample, Domain, Profile, Surface, Tangent,
    TangentEigen, UMBILIC_REL,
};
pub use compat::{
    codazzi_principal_residuals, codazzi_residuals, codazzi_residuals_fd, connector_gaussian_curvature,
    full_frame_compatibility, gauss_residual, gauss_residual_fd, gaussian_curvature,
    metric_gaussian_curvature, tangential_det,
};
pub use frame::{
    connectors, frame_data, regular_point, transform_connectors, ConnectorSet, Field, Frame, FrameData,
    FrameSpec, ScalarField, VectorField,
};
