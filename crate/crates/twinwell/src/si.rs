//! SI constants (CODATA 2018) for the dimensional code paths.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Planck constant, J s.
pub const H_PLANCK: f64 = 6.62607015e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.99792458e8;
/// Vacuum permittivity, F/m.
pub const EPSILON0: f64 = 8.8541878128e-12;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602176634e-19;
/// Cesium-133 atomic mass, kg.
pub const CS_MASS: f64 = 2.2069469e-25;
