//! Special functions and the numeric constants built from them.

mod constants;
mod expint;
mod gamma;
mod zeta;

pub use constants::{c1, constant_a, constant_a_with_cutoff, constants, meissel_mertens, minimize_c1, ConstantsTable};
pub use expint::exp_integral_e1;
pub use gamma::{digamma, log_gamma};
pub(crate) use gamma::{digamma_unchecked, log_gamma_unchecked};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_scaled, prime_zeta, riemann_zeta, zeta_minus_one};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// pi^2 / 6.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Even Bernoulli numbers B_2 .. B_18.
pub(crate) const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

fn domain_err(func: &'static str, arg: f64, domain: &'static str) -> crate::Error {
    crate::Error::Domain { func, arg, domain }
}
