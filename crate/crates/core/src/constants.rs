//! Physical constants (CODATA 2018, SI).
//!
//! Every formula in the crate reads its constants from here so that the
//! numbers behind a report can be identified by a single hash.

use sha2::{Digest, Sha256};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// 4πε₀, F/m.
pub const FOUR_PI_EPS0: f64 = 4.0 * std::f64::consts::PI * EPSILON_0;

/// The constants table as `(symbol, value)` pairs, in a fixed order.
pub fn table() -> [(&'static str, f64); 3] {
    [("hbar", HBAR), ("c", C), ("epsilon_0", EPSILON_0)]
}

/// SHA-256 of the constants table, hex encoded (first 16 characters).
pub fn table_hash() -> String {
    let mut hasher = Sha256::new();
    for (name, value) in table() {
        hasher.update(name.as_bytes());
        hasher.update(b"=");
        hasher.update(value.to_bits().to_le_bytes());
        hasher.update(b";");
    }
    let digest = hex::encode(hasher.finalize());
    digest[..16].to_string()
}
