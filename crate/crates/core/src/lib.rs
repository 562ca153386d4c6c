pub mod base_bimodules;
pub mod curved_modules;
pub mod exact_linalg;
pub mod gallery;
pub mod nonhomogeneous;
pub mod quadratic;
pub mod resolutions;
