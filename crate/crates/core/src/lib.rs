//! Phase space of a charged test particle on a Lorentzian spacetime, modelled
//! as the first jet space of the spacetime fibred over the coordinate time.
//!
//! The crate builds the structure forms of that phase space (the clock form
//! τ̂, the two-form Ω, the bivector Λ, the Reeb field γ), integrates the
//! equation of motion, detects infinitesimal symmetries and assembles the
//! special phase functions, their Hamiltonian lifts and brackets, and the
//! momentum map of a symmetry algebra.
//!
//! Index conventions used throughout:
//!
//! * phase coordinates are `(x⁰, x¹, x², x³, x¹₀, x²₀, x³₀)`; the velocity
//!   block occupies indices 4..7 of every 7-vector and 7×7 matrix;
//! * a 2-form is stored as the antisymmetric matrix `M[a][b] = ω(∂_a, ∂_b)`
//!   and its contraction with a vector is `(i_Y ω)_b = Y^a M[a][b]`;
//! * a bivector is stored as `L[a][b]` and lowers a covector as
//!   `Λ♯(α)^b = α_a L[a][b]`;
//! * [`Christoffel`](fields::Christoffel) holds the standard symbols
//!   `½ g^{λρ}(∂_μ g_ρν + ∂_ν g_ρμ − ∂_ρ g_μν)`.

pub mod catalog;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod forms;
pub mod momentum;
pub mod motion;
pub mod ode;
pub mod phase;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec4 = nalgebra::Vector4<f64>;
pub type Vec7 = nalgebra::SVector<f64, 7>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat4 = nalgebra::Matrix4<f64>;
pub type Mat7 = nalgebra::SMatrix<f64, 7, 7>;
pub type Mat3x4 = nalgebra::SMatrix<f64, 3, 4>;
