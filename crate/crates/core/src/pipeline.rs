//! Per-stress-point evaluation: couplings, vibronic spectrum, rates and the
//! optical cycle.

use crate::couplings::{CouplingConstants, NvStressState};
use crate::cycle::{self, BranchMode, ContrastResult, CycleRates, Drive, Protocol, Trajectory};
use crate::error::Result;
use crate::frames::{to_local, Frame, NvOrientation, StressTensor};
use crate::presets::{self, PjtModel, Preset};
use crate::rates::{
    self, LowerRates, LowerSettings, PhononCouplingParams, Regime, Relaxation, UpperRates,
};
use crate::spectral::{convolve_family, ConvolvedFamily, SpectralFunction};
use crate::vibronic::{self, linear_coupling, PjtParams, VibronicSpectrum, A1, EX, EY};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSettings {
    pub phonon: PhononCouplingParams,
    pub lower: LowerSettings,
    /// Π⊥(³E) in GHz at and above which the broken-symmetry formulas apply.
    pub regime_threshold_ghz: f64,
    pub dipole_ea: f64,
    pub n_d: f64,
}

impl Default for RateSettings {
    fn default() -> Self {
        RateSettings {
            phonon: PhononCouplingParams::default(),
            lower: LowerSettings::default(),
            regime_threshold_ghz: 1.0,
            dipole_ea: rates::DEFAULT_DIPOLE_EA,
            n_d: rates::DIAMOND_INDEX,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub constants: CouplingConstants,
    pub orientation: NvOrientation,
    pub temperature: f64,
    pub pjt: PjtModel,
    pub f_upper: SpectralFunction,
    pub family: ConvolvedFamily,
    pub rates: RateSettings,
    pub drive: Drive,
    pub protocol: Protocol,
    pub mode: BranchMode,
}

/// Highest S_E convolution order kept beyond the PJT truncation.
fn family_order(pjt: &PjtModel) -> i64 {
    pjt.n_max as i64
}

impl Model {
    pub fn new(
        constants: CouplingConstants,
        pjt: PjtModel,
        f_upper: SpectralFunction,
        s_e: &SpectralFunction,
        temperature: f64,
    ) -> Result<Self> {
        f_upper.check_temperature(temperature)?;
        s_e.check_temperature(temperature)?;
        Ok(Model {
            constants,
            orientation: NvOrientation::Z111,
            temperature,
            pjt,
            family: convolve_family(s_e, family_order(&pjt))?,
            f_upper,
            rates: RateSettings::default(),
            drive: Drive::default(),
            protocol: Protocol::default(),
            mode: BranchMode::Folded,
        })
    }

    /// Bundled data at 300 K with the given parameter preset.
    pub fn preset(preset: Preset) -> Result<Self> {
        let h = presets::SPECTRAL_STEP;
        let f = presets::bundled_f_upper(h)?;
        let s = presets::default_s_e(h, 300.0)?;
        Model::new(preset.constants(), PjtModel::default(), f, &s, 300.0)
    }

    pub fn set_s_e(&mut self, s_e: &SpectralFunction) -> Result<()> {
        s_e.check_temperature(self.temperature)?;
        self.family = convolve_family(s_e, family_order(&self.pjt))?;
        Ok(())
    }

    pub fn set_pjt(&mut self, pjt: PjtModel) -> Result<()> {
        if family_order(&pjt) > self.family.n_max() as i64 {
            return Err(crate::error::Error::Domain {
                field: "n_max",
                value: pjt.n_max as f64,
                reason: "exceeds the convolved S_E family; call set_s_e afterwards",
            });
        }
        self.pjt = pjt;
        Ok(())
    }

    pub fn state(&self, stress: &StressTensor) -> Result<NvStressState> {
        let local = match stress.frame() {
            Frame::Local => *stress,
            Frame::Crystal => to_local(stress, self.orientation)?,
        };
        self.constants.evaluate(&local, self.temperature)
    }

    /// Singlet PJT problem at this stress point: ¹Ex is the lower ¹E branch,
    /// ¹A1 sits Λ above the ¹E centre.
    pub fn pjt_params(&self, state: &NvStressState) -> PjtParams {
        let split = state.pi_1e.perp();
        let mut energies = [0.0; 3];
        energies[EX] = -split;
        energies[EY] = split;
        energies[A1] = state.gaps.lambda * 1e3;
        PjtParams {
            energies,
            omega_e: self.pjt.omega_e,
            g: linear_coupling(self.pjt.f_jt, self.pjt.g_pjt),
            n_max: self.pjt.n_max,
        }
    }

    pub fn vibronic(&self, state: &NvStressState) -> Result<VibronicSpectrum> {
        vibronic::solve(&self.pjt_params(state))
    }

    pub fn rates(&self, stress: &StressTensor) -> Result<PointRates> {
        let state = self.state(stress)?;
        let regime = rates::regime(&state, self.rates.regime_threshold_ghz);
        let sym = rates::upper_symmetric(&state, &self.f_upper, &self.rates.phonon)?;
        let brk = rates::upper_breaking(&state, &self.f_upper)?;
        let upper = UpperRates {
            gamma_plus: brk.gamma_plus,
            gamma_minus: brk.gamma_minus,
            gamma_z: brk.gamma_z,
            out_of_support: sym.out_of_support || brk.out_of_support,
            ..sym
        };
        let spectrum = self.vibronic(&state)?;
        let lower = match regime {
            Regime::Symmetric if spectrum.params.is_symmetric() => {
                rates::lower_symmetric(&state, &spectrum, &self.family, &self.rates.lower)?
            }
            _ => rates::lower_breaking(&state, &spectrum, &self.family, &self.rates.lower)?,
        };
        let rad_x = rates::radiative(state.gaps.zpl_x, self.rates.dipole_ea, self.rates.n_d)?;
        let rad_y = rates::radiative(state.gaps.zpl_y, self.rates.dipole_ea, self.rates.n_d)?;
        let pi_perp = state.pi_3e.perp();
        let (w_lower, w_upper) = rates::branch_weights(pi_perp, state.temperature)?;
        let relaxation = rates::relaxation_timescale(
            &upper,
            &lower,
            rad_x,
            self.drive.gamma_exc,
            pi_perp,
            state.temperature,
        );
        let lower_isc = [lower.gamma_z, lower.gamma_plus, lower.gamma_minus];
        let cycle = match regime {
            Regime::Symmetric => {
                let rad = rates::radiative(
                    0.5 * (state.gaps.zpl_x + state.gaps.zpl_y),
                    self.rates.dipole_ea,
                    self.rates.n_d,
                )?;
                let g = upper.gamma_ave;
                CycleRates::symmetric(rad, [0.0, g, g], lower_isc, state.temperature)
            }
            Regime::Broken => CycleRates {
                rad_x,
                rad_y,
                isc_x: [upper.gamma_z, 0.0, upper.gamma_minus],
                isc_y: [0.0, upper.gamma_plus, 0.0],
                lower: lower_isc,
                w_upper,
                pi_perp_mev: pi_perp,
                temperature: state.temperature,
            },
        };
        Ok(PointRates {
            state,
            regime,
            upper,
            lower,
            rad_x,
            rad_y,
            weights: (w_lower, w_upper),
            relaxation,
            cycle,
        })
    }

    pub fn contrast(&self, rates: &PointRates) -> Result<ContrastResult> {
        cycle::contrast(
            &rates.cycle,
            &self.drive,
            self.mode,
            &self.protocol,
            Some(rates.relaxation.tau),
        )
    }

    pub fn evaluate(&self, stress: &StressTensor) -> Result<PointResult> {
        let rates = self.rates(stress)?;
        let contrast = self.contrast(&rates)?;
        Ok(PointResult {
            rates,
            contrast,
            trace: None,
        })
    }

    /// As [`Model::evaluate`], keeping every `stride`-th population vector of
    /// the initialisation window.
    pub fn evaluate_traced(&self, stress: &StressTensor, stride: usize) -> Result<PointResult> {
        let rates = self.rates(stress)?;
        let (contrast, trace) = cycle::contrast_traced(
            &rates.cycle,
            &self.drive,
            self.mode,
            &self.protocol,
            Some(rates.relaxation.tau),
            stride,
        )?;
        Ok(PointResult {
            rates,
            contrast,
            trace,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PointRates {
    pub state: NvStressState,
    pub regime: Regime,
    /// Symmetric (A1/E12/ave) and first-order broken (±, z) channels.
    pub upper: UpperRates,
    pub lower: LowerRates,
    pub rad_x: f64,
    pub rad_y: f64,
    /// (lower, upper) ³E branch weights.
    pub weights: (f64, f64),
    pub relaxation: Relaxation,
    pub cycle: CycleRates,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub rates: PointRates,
    pub contrast: ContrastResult,
    pub trace: Option<Trajectory>,
}
