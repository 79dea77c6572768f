//! Numerical machinery for the modular behaviour of the infinite product
//! `(x;q)_inf = (1 - x)(1 - xq)(1 - xq^2)...`.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! - [`special`]: branch-aware elementary and classical functions (principal
//!   logarithm, dilogarithm, log-Gamma, Bernoulli numbers, the kernels `B(t)`
//!   and `(cot(t/2) - 2/t)/t`).
//! - [`qseries`]: q-Pochhammer products, Euler's series, a log-product oracle,
//!   Lambert series, Dedekind eta and the Jacobi triple product.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature along complex segments, rays
//!   to infinity, principal values at `t = 1` and detoured half-lines.
//! - [`modular`]: the Stirling remainder `G`, the Laplace-type ray integrals
//!   `P_-`/`P_+`, the Stieltjes term `M`, the factor `K(q, x)`, the modular
//!   right-hand side for `(x;q)_inf` and the divergent `B`-integral expansion.
//!
//! Conventions: `q = exp(2 pi i tau)`, `x = exp(2 pi i xi)`,
//! `q* = exp(-2 pi i / tau)` and `x* = exp(2 pi i xi / tau)`. Wherever `log q`
//! appears it means `2 pi i tau`, never the principal logarithm of `q`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub(crate) mod cmath;
mod error;
pub mod modular;
pub mod qseries;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use modular::{
    asymptotic_b_series, asymptotic_remainder, b_integral, choose_ray, g_star, g_term, k_factor,
    m_stieltjes, mp_log_product, p_contour_real, p_minus, p_plus, p_ray, stokes_sum, xqmain_rhs,
    AsymptoticSeries, Branch, RayChoice, SectorPoint,
};
pub use qseries::{
    dedekind_eta, euler_series, jacobi_theta, lambert_series, log_pochhammer_oracle,
    pochhammer_inf, pochhammer_n, ModularPoint, SeriesTruncation,
};
pub use quad::{
    contour_ell, integrate_ray, integrate_ray_from, integrate_segment, pv_integral_unit, Estimate,
    PathSpec, QuadratureSettings, Side,
};
pub use special::{bernoulli, cot_kernel, li2, log_gamma, principal_log, stieltjes_b, BranchedLog};
