//! Transition rates of the optical cycle, in MHz.

use crate::couplings::NvStressState;
use crate::error::{Error, Result};
use crate::spectral::{bose_occupation, ConvolvedFamily, SpectralFunction};
use crate::units::{
    ghz_to_mev, golden_rule_mhz, kt_mev, C_SI, EPS0_SI, E_CHARGE_SI, HBAR_MEV_S, HBAR_SI,
};
use crate::vibronic::{Irrep, VibronicSpectrum};

/// e-phonon coupling of the ³E sublevels for the second-order upper ISC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononCouplingParams {
    /// MHz/meV³, 2π included.
    pub eta: f64,
    /// Acoustic cutoff Ω in meV.
    pub omega_cut: f64,
    /// Trapezoid step in meV.
    pub step: f64,
}

impl Default for PhononCouplingParams {
    fn default() -> Self {
        PhononCouplingParams {
            eta: 2.0 * std::f64::consts::PI * 44.0,
            omega_cut: 80.0,
            step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Symmetric,
    Broken,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Symmetric => "symmetric",
            Regime::Broken => "broken",
        }
    }
}

/// Symmetric when Π⊥(³E) is below `threshold_ghz`.
pub fn regime(state: &NvStressState, threshold_ghz: f64) -> Regime {
    if state.pi_3e.to_ghz().perp() >= threshold_ghz {
        Regime::Broken
    } else {
        Regime::Symmetric
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpperRates {
    pub gamma_a1: f64,
    pub gamma_e12: f64,
    pub gamma_ave: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_z: f64,
    /// A detuning fell outside the tabulated F.
    pub out_of_support: bool,
}

/// ∫₀^Ω ω{[n(ω)+1]F(Δ−ω) + n(ω)F(Δ+ω)}dω in meV (trapezoid). The ω → 0
/// limit of ω·n(ω) is k_BT.
pub fn e12_integral(
    f: &SpectralFunction,
    delta_mev: f64,
    params: &PhononCouplingParams,
    temperature: f64,
) -> Result<(f64, bool)> {
    let steps = (params.omega_cut / params.step).round() as usize;
    if steps == 0 {
        return Err(Error::Domain {
            field: "omega_cut",
            value: params.omega_cut,
            reason: "must exceed the integration step",
        });
    }
    let h = params.omega_cut / steps as f64;
    let mut total = 0.0;
    let mut outside = false;
    for k in 0..=steps {
        let w = k as f64 * h;
        let (wn, wn1) = if k == 0 {
            (kt_mev(temperature), kt_mev(temperature))
        } else {
            let n = bose_occupation(w, temperature)?;
            (w * n, w * (n + 1.0))
        };
        let lo = f.sample(delta_mev - w);
        let hi = f.sample(delta_mev + w);
        outside |= !lo.in_support || !hi.in_support;
        let term = wn1 * lo.value + wn * hi.value;
        total += if k == 0 || k == steps {
            0.5 * term
        } else {
            term
        };
    }
    Ok((total * h, outside))
}

pub fn upper_symmetric(
    state: &NvStressState,
    f: &SpectralFunction,
    params: &PhononCouplingParams,
) -> Result<UpperRates> {
    f.check_temperature(state.temperature)?;
    let g = &state.gaps;
    let delta = 0.5 * (g.delta_x + g.delta_y) * 1e3;
    let lambda = 0.5 * (state.soc.lambda_perp_x + state.soc.lambda_perp_y);
    let fd = f.sample(delta);
    let gamma_a1 = golden_rule_mhz(4.0, lambda, fd.value);
    let (integral, outside) = e12_integral(f, delta, params, state.temperature)?;
    let e = ghz_to_mev(lambda);
    let gamma_e12 = 8.0 * e * e * params.eta * integral;
    Ok(UpperRates {
        gamma_a1,
        gamma_e12,
        gamma_ave: 0.25 * (gamma_a1 + 2.0 * gamma_e12),
        out_of_support: !fd.in_support || outside,
        ..UpperRates::default()
    })
}

/// First-order channels only: |+⟩ through the lower ³E branch (y), |−⟩ and
/// |0⟩ through the upper branch (x).
pub fn upper_breaking(state: &NvStressState, f: &SpectralFunction) -> Result<UpperRates> {
    f.check_temperature(state.temperature)?;
    let g = &state.gaps;
    let s = &state.soc;
    let fx = f.evaluate(g.delta_x);
    let fy = f.evaluate(g.delta_y);
    Ok(UpperRates {
        gamma_plus: golden_rule_mhz(2.0, s.lambda_perp_y, fy.value),
        gamma_minus: golden_rule_mhz(2.0, s.lambda_perp_x, fx.value),
        gamma_z: golden_rule_mhz(2.0, s.lambda_prime, fx.value),
        out_of_support: !fx.in_support || !fy.in_support,
        ..UpperRates::default()
    })
}

/// Lower-ISC contributions of one vibronic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerStateRates {
    pub energy: f64,
    pub irrep: Irrep,
    pub weight: f64,
    pub gamma_z: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LowerRates {
    /// Boltzmann-averaged totals.
    pub gamma_z: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub per_state: Vec<LowerStateRates>,
}

impl LowerRates {
    pub fn gamma_perp(&self) -> f64 {
        self.gamma_plus + self.gamma_minus
    }

    fn finish(per_state: Vec<LowerStateRates>) -> Self {
        let sum = |k: fn(&LowerStateRates) -> f64| per_state.iter().map(|s| s.weight * k(s)).sum();
        LowerRates {
            gamma_z: sum(|s| s.gamma_z),
            gamma_plus: sum(|s| s.gamma_plus),
            gamma_minus: sum(|s| s.gamma_minus),
            per_state,
        }
    }
}

/// Settings shared by both lower-ISC routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSettings {
    /// Vibronic states above `cutoff_kt`·k_BT are dropped from the average.
    pub cutoff_kt: f64,
    /// Relative sign between 2dλz and (f/√2)λz′ (−1: destructive).
    pub sign_conv: f64,
}

impl Default for LowerSettings {
    fn default() -> Self {
        LowerSettings {
            cutoff_kt: 5.0,
            sign_conv: -1.0,
        }
    }
}

fn weights(spectrum: &VibronicSpectrum, temperature: f64, cutoff_kt: f64) -> Result<Vec<f64>> {
    spectrum.boltzmann_weights(temperature, cutoff_kt)
}

/// Labelled-coefficient route, valid when the singlet problem is symmetric.
pub fn lower_symmetric(
    state: &NvStressState,
    spectrum: &VibronicSpectrum,
    family: &ConvolvedFamily,
    settings: &LowerSettings,
) -> Result<LowerRates> {
    let w = weights(spectrum, state.temperature, settings.cutoff_kt)?;
    let sigma = 0.5 * (state.gaps.sigma_x + state.gaps.sigma_y) * 1e3;
    let lz = state.soc.lambda_z.abs();
    let ll = 0.5 * (state.soc.lambda_perp_l_x + state.soc.lambda_perp_l_y).abs();
    let mut per_state = Vec::new();
    for (st, &wt) in spectrum.states.iter().zip(&w) {
        if wt == 0.0 {
            continue;
        }
        let at = sigma + st.energy;
        let sum = |terms: &[crate::vibronic::Term], scale: f64| -> f64 {
            terms
                .iter()
                .map(|t| scale * t.value * t.value * family.value(t.shell, at))
                .sum()
        };
        let (z, own, other) = match st.irrep {
            Irrep::Ex | Irrep::Ey => {
                let k = spectrum.extract_coefficients(st)?;
                let z = golden_rule_mhz(8.0, lz, sum(&k.d, 1.0));
                let own = golden_rule_mhz(2.0, ll, sum(&k.c, 1.0) + sum(&k.f, 0.5));
                let other = golden_rule_mhz(2.0, ll, sum(&k.f, 0.5));
                (z, own, other)
            }
            Irrep::A1 => {
                let k = spectrum.extract_coefficients(st)?;
                let z = golden_rule_mhz(8.0, lz, sum(&k.c, 1.0));
                let pm = golden_rule_mhz(2.0, ll, sum(&k.d, 0.5));
                (z, pm, pm)
            }
            Irrep::A2 => {
                let k = spectrum.extract_a2(st)?;
                let pm = golden_rule_mhz(2.0, ll, sum(&k.h, 0.5));
                (0.0, pm, pm)
            }
        };
        // Ẽx feeds |−⟩ through its own channel, Ẽy feeds |+⟩.
        let (minus, plus) = if st.irrep == Irrep::Ey {
            (other, own)
        } else {
            (own, other)
        };
        per_state.push(LowerStateRates {
            energy: st.energy,
            irrep: st.irrep,
            weight: wt,
            gamma_z: z,
            gamma_plus: plus,
            gamma_minus: minus,
        });
    }
    Ok(LowerRates::finish(per_state))
}

/// Sign κ of Σ dᵢfᵢ for the lowest σv-even E-type state, from projections.
fn interference_phase(spectrum: &VibronicSpectrum) -> f64 {
    let Some(st) = spectrum.states.iter().find(|s| s.irrep == Irrep::Ex) else {
        return 1.0;
    };
    let s: f64 = spectrum
        .projections(st)
        .iter()
        .filter(|p| p.irrep == Irrep::Ex)
        .map(|p| p.a1 * p.ex)
        .sum();
    if s < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// General projection route: valid with split ¹E branches and λz′ ≠ 0.
pub fn lower_breaking(
    state: &NvStressState,
    spectrum: &VibronicSpectrum,
    family: &ConvolvedFamily,
    settings: &LowerSettings,
) -> Result<LowerRates> {
    let w = weights(spectrum, state.temperature, settings.cutoff_kt)?;
    let sigma = state.gaps.sigma_x * 1e3;
    let soc = &state.soc;
    let (lz, lzp) = (soc.lambda_z.abs(), soc.lambda_z_prime.abs());
    let s = settings.sign_conv * interference_phase(spectrum);
    let mut per_state = Vec::new();
    for (st, &wt) in spectrum.states.iter().zip(&w) {
        if wt == 0.0 {
            continue;
        }
        let at = sigma + st.energy;
        let (mut z, mut minus, mut plus) = (0.0, 0.0, 0.0);
        for p in spectrum.projections(st) {
            let sn = family.value(p.shell, at);
            if sn == 0.0 {
                continue;
            }
            let amp = 2.0 * lz * p.a1 + s * lzp * p.ex;
            z += amp * amp * sn;
            minus += p.ex * p.ex * sn;
            plus += p.ey * p.ey * sn;
        }
        per_state.push(LowerStateRates {
            energy: st.energy,
            irrep: st.irrep,
            weight: wt,
            gamma_z: golden_rule_mhz(2.0, 1.0, z),
            gamma_plus: golden_rule_mhz(2.0, soc.lambda_perp_l_y, plus),
            gamma_minus: golden_rule_mhz(2.0, soc.lambda_perp_l_x, minus),
        });
    }
    Ok(LowerRates::finish(per_state))
}

/// Transition dipole (e·Å) giving 81.7 MHz at 1.945 eV with n_D = 2.4.
pub const DEFAULT_DIPOLE_EA: f64 = 1.103_934_533_490_955_8;
pub const DIAMOND_INDEX: f64 = 2.4;

/// Spontaneous emission rate n_D E³|μ|²/(3πε₀ħ⁴c³) in MHz.
pub fn radiative(e_zpl_ev: f64, mu_ea: f64, n_d: f64) -> Result<f64> {
    for (field, v) in [("e_zpl", e_zpl_ev), ("mu", mu_ea), ("n_d", n_d)] {
        if !(v > 0.0) {
            return Err(Error::Domain {
                field,
                value: v,
                reason: "must be positive",
            });
        }
    }
    let e = e_zpl_ev * E_CHARGE_SI;
    let mu = mu_ea * E_CHARGE_SI * 1e-10;
    let rate = n_d * e.powi(3) * mu * mu
        / (3.0 * std::f64::consts::PI * EPS0_SI * HBAR_SI.powi(4) * C_SI.powi(3));
    Ok(rate * 1e-6)
}

/// (w_lower, w_upper) for two branches split by 2Π⊥ (Π⊥ in meV).
pub fn branch_weights(pi_perp_mev: f64, temperature: f64) -> Result<(f64, f64)> {
    if !(temperature > 0.0) {
        return Err(Error::Domain {
            field: "temperature",
            value: temperature,
            reason: "must be positive",
        });
    }
    let r = (-2.0 * pi_perp_mev.abs() / kt_mev(temperature)).exp();
    Ok((1.0 / (1.0 + r), r / (1.0 + r)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    /// Seconds; +∞ when nothing drives the polarization.
    pub tau0: f64,
    pub tau: f64,
}

/// Rough relaxation time of the ground-spin polarization under split ³E.
pub fn relaxation_timescale(
    upper: &UpperRates,
    lower: &LowerRates,
    gamma_rad_x: f64,
    gamma_exc: f64,
    pi_x_mev: f64,
    temperature: f64,
) -> Relaxation {
    let ratio = |z: f64, m: f64| if m > 0.0 { z / m } else { f64::INFINITY };
    let r_low = ratio(lower.gamma_z, lower.gamma_minus);
    let r_up = ratio(upper.gamma_z, upper.gamma_minus);
    let dominant = lower.gamma_z.max(lower.gamma_minus).max(lower.gamma_plus);
    let rds = gamma_exc.min(dominant);
    let isc = upper.gamma_minus + upper.gamma_z;
    let branching = isc / (2.0 * gamma_rad_x + isc);
    let diff = (r_low - r_up).abs();
    let drive = rds * diff * branching;
    let tau0 = if drive.is_finite() && drive > 0.0 {
        1e-6 / drive
    } else {
        f64::INFINITY
    };
    Relaxation {
        tau0,
        tau: tau0 * (pi_x_mev.abs() / kt_mev(temperature)).exp(),
    }
}

/// The ħ used by the golden-rule helpers, re-exported for oracles.
pub const HBAR: f64 = HBAR_MEV_S;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::{Ambient, CouplingConstants, GapTables, SocSusceptibilities};
    use crate::frames::{Frame, StressTensor};
    use crate::spectral::{convolve_family, HuangRhys, SpectralKind};
    use crate::vibronic::{linear_coupling, solve, PjtParams};
    use proptest::prelude::*;

    fn constants(lambda_perp: f64) -> CouplingConstants {
        let mut ambient = Ambient::experimental();
        ambient.lambda_perp0 = lambda_perp;
        CouplingConstants {
            tables: GapTables::default(),
            soc: SocSusceptibilities::default(),
            ambient,
        }
    }

    fn flat_f(value: f64) -> SpectralFunction {
        SpectralFunction::from_fn(SpectralKind::FUpper, 1.0, 0.0, 1000.0, 300.0, |_| value).unwrap()
    }

    fn ambient_state(lambda_perp: f64) -> NvStressState {
        constants(lambda_perp)
            .evaluate(&StressTensor::zero(Frame::Local), 300.0)
            .unwrap()
    }

    #[test]
    fn golden_rule_oracle() {
        // Γ_A1 = 4π(hλ)²F/ħ written out by hand.
        let f = flat_f(6.0e-4);
        let r =
            upper_symmetric(&ambient_state(6.74), &f, &PhononCouplingParams::default()).unwrap();
        let e = 6.74 * 4.135_667_696e-3;
        let want = 4.0 * std::f64::consts::PI * e * e * 6.0e-4 / 6.582_119_569e-13 / 1e6;
        assert!((r.gamma_a1 - want).abs() < 1e-12 * want);
        assert!((r.gamma_ave - 0.25 * (r.gamma_a1 + 2.0 * r.gamma_e12)).abs() < 1e-15);
        assert!(!r.out_of_support);
    }

    #[test]
    fn flat_f_e12_matches_closed_form() {
        // For constant F the integrand is F·ω·coth(ω/2kT); integrate it
        // independently with Simpson's rule on a fine grid.
        let f = flat_f(1.0);
        let p = PhononCouplingParams::default();
        let (got, _) = e12_integral(&f, 400.0, &p, 300.0).unwrap();
        let kt = kt_mev(300.0);
        let g = |w: f64| {
            if w == 0.0 {
                2.0 * kt
            } else {
                w / (w / (2.0 * kt)).tanh()
            }
        };
        let n = 8000;
        let h = 80.0 / n as f64;
        let simpson: f64 = (0..=n)
            .map(|k| {
                let c = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * g(k as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        assert!((got - simpson).abs() < 1e-3 * simpson);
    }

    #[test]
    fn zero_temperature_keeps_emission_only() {
        let f = SpectralFunction::from_fn(SpectralKind::FUpper, 1.0, 0.0, 1000.0, 0.0, |e| {
            1e-3 * (-(e - 300.0).powi(2) / 5000.0).exp()
        })
        .unwrap();
        let p = PhononCouplingParams::default();
        let (got, _) = e12_integral(&f, 400.0, &p, 0.0).unwrap();
        let n = 1600;
        let h = 80.0 / n as f64;
        let emission: f64 = (0..=n)
            .map(|k| {
                let w = k as f64 * h;
                let c = if k == 0 || k == n { 0.5 } else { 1.0 };
                c * w * f.sample(400.0 - w).value
            })
            .sum::<f64>()
            * h;
        assert!((got - emission).abs() < 1e-3 * emission);
    }

    #[test]
    fn lambda_zero_gives_zero() {
        let st = ambient_state(0.0);
        let f = flat_f(1e-3);
        let r = upper_symmetric(&st, &f, &PhononCouplingParams::default()).unwrap();
        assert_eq!((r.gamma_a1, r.gamma_e12, r.gamma_ave), (0.0, 0.0, 0.0));
        let b = upper_breaking(&st, &f).unwrap();
        assert_eq!((b.gamma_plus, b.gamma_minus, b.gamma_z), (0.0, 0.0, 0.0));
    }

    #[test]
    fn breaking_zero_stress_limits() {
        let st = ambient_state(6.74);
        let f = flat_f(6e-4);
        let b = upper_breaking(&st, &f).unwrap();
        assert_eq!(b.gamma_z, 0.0);
        let s = upper_symmetric(&st, &f, &PhononCouplingParams::default()).unwrap();
        assert!((b.gamma_plus + b.gamma_minus - s.gamma_a1).abs() < 1e-12 * s.gamma_a1);
    }

    #[test]
    fn out_of_support_is_flagged() {
        let f = SpectralFunction::from_fn(SpectralKind::FUpper, 1.0, 500.0, 900.0, 300.0, |_| 1e-3)
            .unwrap();
        let r =
            upper_symmetric(&ambient_state(6.74), &f, &PhononCouplingParams::default()).unwrap();
        assert!(r.out_of_support);
        assert_eq!(r.gamma_a1, 0.0);
    }

    #[test]
    fn temperature_mismatch_rejected() {
        let mut st = ambient_state(6.74);
        st.temperature = 77.0;
        assert!(upper_breaking(&st, &flat_f(1e-3)).is_err());
    }

    #[test]
    fn radiative_values() {
        let r = radiative(1.945, DEFAULT_DIPOLE_EA, DIAMOND_INDEX).unwrap();
        assert!((r - 81.7).abs() < 1e-6);
        let r2 = radiative(1.945, 2.0 * DEFAULT_DIPOLE_EA, DIAMOND_INDEX).unwrap();
        assert!((r2 / r - 4.0).abs() < 1e-12);
        assert!((r - 82.9).abs() < 3.1 + 0.1);
        assert!(radiative(0.0, 1.0, 2.4).is_err());
    }

    #[test]
    fn branch_weight_cases() {
        assert_eq!(branch_weights(0.0, 300.0).unwrap(), (0.5, 0.5));
        let kt = kt_mev(300.0);
        let (lo, up) = branch_weights(0.5 * kt, 300.0).unwrap();
        assert!((up / lo - (-1.0f64).exp()).abs() < 1e-14);
        let (_, up) = branch_weights(400.0, 300.0).unwrap();
        assert!(up < 1e-13);
    }

    #[test]
    fn relaxation_cases() {
        let upper = UpperRates {
            gamma_minus: 4.0,
            gamma_z: 0.4,
            ..UpperRates::default()
        };
        let lower = LowerRates {
            gamma_z: 0.5,
            gamma_minus: 5.0,
            gamma_plus: 0.1,
            per_state: vec![],
        };
        let r = relaxation_timescale(&upper, &lower, 80.0, 0.1, 0.0, 300.0);
        assert!(r.tau0.is_infinite() && r.tau.is_infinite());
        let lower = LowerRates {
            gamma_z: 2.0,
            ..lower
        };
        let r = relaxation_timescale(&upper, &lower, 80.0, 0.1, 0.0, 300.0);
        assert_eq!(r.tau, r.tau0);
        let want = 1e-6 / (0.1 * 0.3 * (4.4 / 164.4));
        assert!((r.tau0 - want).abs() < 1e-12 * want);
        let kt = kt_mev(300.0);
        let r10 = relaxation_timescale(&upper, &lower, 80.0, 0.1, 10.0 * kt, 300.0);
        assert!((r10.tau / r.tau - 10f64.exp()).abs() < 1e-9 * 10f64.exp());
    }

    fn test_spectrum(split: f64) -> (VibronicSpectrum, ConvolvedFamily) {
        let p = PjtParams {
            energies: [-split, split, 150.0],
            omega_e: 70.0,
            g: linear_coupling(30.0, 40.0),
            n_max: 10,
        };
        let hr = HuangRhys {
            s: 1.0,
            omega: 70.0,
            sigma: 12.0,
            origin: 0.0,
            k_max: 12,
        };
        let se = hr
            .generate(SpectralKind::SE, 1.0, 0.0, 400.0, 300.0)
            .unwrap();
        (solve(&p).unwrap(), convolve_family(&se, 12).unwrap())
    }

    #[test]
    fn lower_routes_agree_without_lambda_z_prime() {
        let (spec, fam) = test_spectrum(0.0);
        let st = ambient_state(6.74);
        let set = LowerSettings::default();
        let a = lower_symmetric(&st, &spec, &fam, &set).unwrap();
        let b = lower_breaking(&st, &spec, &fam, &set).unwrap();
        for (x, y) in [
            (a.gamma_z, b.gamma_z),
            (a.gamma_plus, b.gamma_plus),
            (a.gamma_minus, b.gamma_minus),
        ] {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()), "{x} {y}");
        }
        assert!(a.gamma_z > 0.0 && a.gamma_perp() > 0.0);
        for s in &a.per_state {
            if s.irrep == Irrep::A1 || s.irrep == Irrep::A2 {
                assert!((s.gamma_plus - s.gamma_minus).abs() < 1e-12 * s.gamma_plus.max(1e-300));
            }
        }
    }

    #[test]
    fn no_pjt_means_no_gamma_z_from_e_states() {
        let p = PjtParams {
            energies: [0.0, 0.0, 150.0],
            omega_e: 70.0,
            g: linear_coupling(30.0, 0.0),
            n_max: 8,
        };
        let spec = solve(&p).unwrap();
        let (_, fam) = test_spectrum(0.0);
        let r =
            lower_symmetric(&ambient_state(6.74), &spec, &fam, &LowerSettings::default()).unwrap();
        for s in r.per_state.iter().filter(|s| s.irrep.is_e()) {
            assert_eq!(s.gamma_z, 0.0);
        }
    }

    #[test]
    fn interference_sign_controls_gamma_z() {
        let (spec, fam) = test_spectrum(5.0);
        let mut st = ambient_state(6.74);
        st.soc.lambda_z_prime = 3.0;
        let destructive = lower_breaking(&st, &spec, &fam, &LowerSettings::default()).unwrap();
        let constructive = lower_breaking(
            &st,
            &spec,
            &fam,
            &LowerSettings {
                sign_conv: 1.0,
                ..LowerSettings::default()
            },
        )
        .unwrap();
        assert!(destructive.per_state[0].gamma_z < constructive.per_state[0].gamma_z);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn upper_rates_scale_quadratically(l in 0.5..40.0f64, s in 0.1..5.0f64) {
            let f = flat_f(7e-4);
            let p = PhononCouplingParams::default();
            let a = upper_symmetric(&ambient_state(l), &f, &p).unwrap();
            let b = upper_symmetric(&ambient_state(l * s), &f, &p).unwrap();
            prop_assert!((b.gamma_ave - s * s * a.gamma_ave).abs() < 1e-12 * b.gamma_ave);
            prop_assert!(a.gamma_a1 >= 0.0 && a.gamma_e12 >= 0.0);
        }

        #[test]
        fn lower_rates_nonnegative(lzp in -10.0..10.0f64, split in 0.0..40.0f64) {
            let (spec, fam) = test_spectrum(split);
            let mut st = ambient_state(6.74);
            st.soc.lambda_z_prime = lzp;
            let r = lower_breaking(&st, &spec, &fam, &LowerSettings::default()).unwrap();
            prop_assert!(r.gamma_z >= 0.0 && r.gamma_plus >= 0.0 && r.gamma_minus >= 0.0);
        }
    }
}
