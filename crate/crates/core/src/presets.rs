//! Named parameter sets and bundled data.

use crate::couplings::{Ambient, CouplingConstants, GapTables, SocSusceptibilities};
use crate::error::{Error, Result};
use crate::spectral::{HuangRhys, SpectralFunction, SpectralKind};

/// Ambient λ⊥ˡ (GHz) fitted to the ambient lower-ISC rates.
pub const LAMBDA_PERP_L0: f64 = 0.6095;

/// File name of the bundled F, also looked up in the data directory.
pub const F_UPPER_FILE: &str = "f_upper_300K.dat";

/// Bundled upper-ISC overlap F at 300 K.
pub const F_UPPER_300K: &str = include_str!("../data/f_upper_300K.dat");

/// Grid spacing used for bundled spectral data, meV.
pub const SPECTRAL_STEP: f64 = 0.5;

/// Upper edge of the generated S_E grid, meV.
pub const S_E_MAX: f64 = 1500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    /// Cluster-computed couplings (λz = 14.86, λ⊥ = 6.74 GHz).
    #[default]
    Calibrated,
    /// Measured couplings (λz = 17.53, λ⊥ = 21.06 GHz).
    Experimental,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Calibrated => "calibrated",
            Preset::Experimental => "experimental",
        }
    }

    pub fn ambient(self) -> Ambient {
        match self {
            Preset::Calibrated => Ambient {
                lambda_z0: 14.86,
                lambda_perp0: 6.74,
                ..Ambient::experimental()
            },
            Preset::Experimental => Ambient::experimental(),
        }
    }

    pub fn constants(self) -> CouplingConstants {
        CouplingConstants {
            tables: GapTables::default(),
            soc: SocSusceptibilities::default(),
            ambient: self.ambient(),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "calibrated" => Ok(Preset::Calibrated),
            "experimental" => Ok(Preset::Experimental),
            other => Err(Error::Config(format!(
                "unknown preset {other:?} (expected \"calibrated\" or \"experimental\")"
            ))),
        }
    }
}

/// Effective singlet PJT couplings (meV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PjtModel {
    pub omega_e: f64,
    pub f_jt: f64,
    pub g_pjt: f64,
    pub n_max: usize,
}

impl Default for PjtModel {
    fn default() -> Self {
        PjtModel {
            omega_e: 70.0,
            f_jt: 110.0,
            g_pjt: 28.0,
            n_max: 16,
        }
    }
}

/// Default generator for the ¹E → ³A2 phonon spectral density S_E.
pub fn default_s_e_generator() -> HuangRhys {
    HuangRhys {
        s: 0.5,
        omega: 100.0,
        sigma: 15.0,
        origin: 100.0,
        k_max: 12,
    }
}

pub fn bundled_f_upper(h: f64) -> Result<SpectralFunction> {
    SpectralFunction::parse(F_UPPER_300K, SpectralKind::FUpper, h)
}

pub fn default_s_e(h: f64, temperature: f64) -> Result<SpectralFunction> {
    default_s_e_generator().generate(SpectralKind::SE, h, 0.0, S_E_MAX, temperature)
}
