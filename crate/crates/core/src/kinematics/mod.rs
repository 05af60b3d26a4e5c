//! Deformations of a chart and their local kinematics: polar decomposition,
//! invariant rotation gradient, energy densities and image-surface data.

pub mod deformation;
pub mod energy;
pub mod image;
pub mod polar;
pub mod rotation;

pub use deformation::{
    max_mean_curvature, rotation_matrix, BaseMap, Deformation, ImageSurface, Provenance, SpatialMap,
};
pub use polar::{
    cauchy_green, deformation_gradient, deformation_sample, gradient_at, polar_in_basis, rotation_about,
    sample_at, surface_polar, DeformationSample, MIN_STRETCH, STRETCH_ISOTROPY_REL,
};
pub use rotation::{
    a_vectors, contents, quaternion_of, reconstruct, rodrigues_split, rotation_field_gradient,
    rotation_gradient, rotation_gradient_fd, rotation_gradient_fd_of, rotation_of, Contents,
    PolarRotation, RotationGradient, RODRIGUES_TOL,
};
pub use image::{
    image_connectors, image_gaussian_curvature, integrability_residuals, kinematics_at, kinematics_with,
    PointKinematics,
};
pub use energy::{energy_densities, energy_forms, point_contents, EnergyDensities, FORM_TOL};
