//! Dissipative transverse-field Ising chains in the vectorized
//! (doubled Hilbert space) picture.
//!
//! Everything numerical is generic over the scalar type `T: Real`; the
//! `*64` aliases below fix `T = f64`, which is what the eigensolver-backed
//! pieces require.

pub mod criticality;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod mcm;
pub mod meanfield;
pub mod operator;
pub mod params;
pub mod scalar;
pub mod spectral;
pub mod superket;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{
    apply_adjoint_liouvillian, apply_frame_transform, apply_liouvillian, dense_liouvillian,
    DenseSuperoperator, FrameDirection, Liouvillian,
};
pub use params::{Boundary, Frame, LiouvilleParams};
pub use scalar::{Real, C};
pub use superket::Superket;

pub type Complex64 = num_complex::Complex<f64>;
pub type Superket64 = Superket<f64>;
pub type Superket32 = Superket<f32>;
pub type LiouvilleParams64 = LiouvilleParams<f64>;
pub type LiouvilleParams32 = LiouvilleParams<f32>;
pub type Liouvillian64 = Liouvillian<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
