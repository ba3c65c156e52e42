//! Physical constants and the energy/frequency conversions used throughout.
//!
//! Internal conventions: energies in meV, coupling matrix elements in GHz
//! (ordinary frequency, so the energy is `h·λ`), rates in MHz (10⁶ s⁻¹),
//! stress in GPa, temperature in K.

/// Reduced Planck constant in meV·s.
pub const HBAR_MEV_S: f64 = 6.582_119_569e-13;
/// Planck constant expressed as meV per GHz.
pub const H_MEV_PER_GHZ: f64 = 4.135_667_696e-3;
/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 8.617_333_262e-2;

pub const HBAR_SI: f64 = 1.054_571_817e-34;
pub const EPS0_SI: f64 = 8.854_187_812_8e-12;
pub const C_SI: f64 = 299_792_458.0;
pub const E_CHARGE_SI: f64 = 1.602_176_634e-19;

pub fn ghz_to_mev(ghz: f64) -> f64 {
    ghz * H_MEV_PER_GHZ
}

pub fn mev_to_ghz(mev: f64) -> f64 {
    mev / H_MEV_PER_GHZ
}

pub fn kt_mev(temperature: f64) -> f64 {
    KB_MEV_PER_K * temperature
}

/// Golden-rule rate `prefactor · π · E² · ρ / ħ` in MHz, for a coupling given in
/// GHz and a density of final states in 1/meV. `prefactor·π` is the familiar
/// 2π (single channel) or 4π (two degenerate channels).
pub fn golden_rule_mhz(prefactor: f64, coupling_ghz: f64, density_per_mev: f64) -> f64 {
    let e = ghz_to_mev(coupling_ghz);
    prefactor * std::f64::consts::PI * e * e * density_per_mev / HBAR_MEV_S * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn room_temperature_kt() {
        assert!((kt_mev(300.0) - 25.852).abs() < 1e-3);
    }

    #[test]
    fn ghz_roundtrip() {
        assert!((mev_to_ghz(ghz_to_mev(21.06)) - 21.06).abs() < 1e-12);
    }

    #[test]
    fn golden_rule_scales_quadratically() {
        let a = golden_rule_mhz(2.0, 3.0, 1e-3);
        let b = golden_rule_mhz(2.0, 6.0, 1e-3);
        assert!((b / a - 4.0).abs() < 1e-12);
    }
}
