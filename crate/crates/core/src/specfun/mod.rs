//! Real-argument special functions: complete elliptic integrals, Jacobi theta
//! functions with real nome, cd/dc, Airy functions, arg Γ on vertical lines and ζ′(−1).

mod airy;
mod elliptic;
mod gamma;
mod theta;

pub use airy::{airy_ai, airy_ai_prime, airy_pair, AIRY_MAX_X, AIRY_MIN_X};
pub use elliptic::{agm, ellip_e, ellip_expansion_near_one, ellip_k, EllipticQuad};
pub use gamma::{arg_gamma, tw_constant, zeta_prime_minus_one, GammaLine};
pub use theta::{
    cd_normalised, jacobi_cd, jacobi_dc, nome_from_modulus, theta, theta_series, ThetaNome,
};
