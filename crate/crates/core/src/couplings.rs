//! Stress-dependent scalars: Π components, per-branch gaps, SOC matrix elements.
//!
//! Branch labels. The singlet ¹E branch `x` is the lower one, `Σx < Σy`. For
//! ³E the branch `x` is the one that carries the |m_s = 0⟩ and |m_s = −⟩ ISC
//! channels, and it is the upper orbital branch: `Δx − Δy = 2Π⊥(³E)`. With this
//! assignment the |0⟩/|−⟩ channels are Boltzmann-suppressed under large
//! splitting while |+⟩ keeps a fast channel through the lower branch, which is
//! what produces the long-lived |−⟩ polarization at high load.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, StressTensor};
use crate::units::{ghz_to_mev, mev_to_ghz};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyUnit {
    GHz,
    MeV,
}

impl EnergyUnit {
    fn to_mev(self, v: f64) -> f64 {
        match self {
            EnergyUnit::GHz => ghz_to_mev(v),
            EnergyUnit::MeV => v,
        }
    }

    fn to_ghz(self, v: f64) -> f64 {
        match self {
            EnergyUnit::GHz => v,
            EnergyUnit::MeV => mev_to_ghz(v),
        }
    }
}

/// Linear stress susceptibilities {α1, β1, α2, β2} of one orbital manifold,
/// with optional second-order terms on the A1 shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityQuad {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// Coefficient of (σxx+σyy)² in Πz.
    pub a1q: f64,
    /// Coefficient of σzz² in Πz.
    pub b1q: f64,
    pub unit: EnergyUnit,
}

impl SusceptibilityQuad {
    pub const fn new(a1: f64, b1: f64, a2: f64, b2: f64, unit: EnergyUnit) -> Self {
        SusceptibilityQuad {
            a1,
            b1,
            a2,
            b2,
            a1q: 0.0,
            b1q: 0.0,
            unit,
        }
    }
}

/// ³E, Davies & Hamer uniaxial-stress fit (GHz/GPa).
pub const DAVIES_3E: SusceptibilityQuad =
    SusceptibilityQuad::new(1295.0, -1523.0, -645.0, -89.0, EnergyUnit::GHz);
/// ³E, computed (meV/GPa).
pub const CAS_3E: SusceptibilityQuad =
    SusceptibilityQuad::new(7.63, -5.47, -5.18, -0.442, EnergyUnit::MeV);
/// ¹E, computed (meV/GPa).
pub const CAS_1E: SusceptibilityQuad =
    SusceptibilityQuad::new(1.70, -0.98, -2.54, -3.59, EnergyUnit::MeV);
/// ¹A1, computed (meV/GPa); an A1 level has no splitting terms.
pub const CAS_1A1: SusceptibilityQuad =
    SusceptibilityQuad::new(2.695, -2.259, 0.0, 0.0, EnergyUnit::MeV);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiTriple {
    pub z: f64,
    pub x: f64,
    pub y: f64,
    pub unit: EnergyUnit,
}

impl PiTriple {
    pub fn perp(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn to_mev(&self) -> PiTriple {
        let u = self.unit;
        PiTriple {
            z: u.to_mev(self.z),
            x: u.to_mev(self.x),
            y: u.to_mev(self.y),
            unit: EnergyUnit::MeV,
        }
    }

    pub fn to_ghz(&self) -> PiTriple {
        let u = self.unit;
        PiTriple {
            z: u.to_ghz(self.z),
            x: u.to_ghz(self.x),
            y: u.to_ghz(self.y),
            unit: EnergyUnit::GHz,
        }
    }
}

pub fn eval_pi(quad: &SusceptibilityQuad, stress: &StressTensor) -> Result<PiTriple> {
    stress.expect_frame(Frame::Local)?;
    let s = stress;
    let a = s.xx() + s.yy();
    Ok(PiTriple {
        z: quad.a1 * a + quad.b1 * s.zz() + quad.a1q * a * a + quad.b1q * s.zz() * s.zz(),
        x: quad.a2 * (s.yy() - s.xx()) + quad.b2 * (2.0 * s.xz()),
        y: quad.a2 * (2.0 * s.xy()) + quad.b2 * (2.0 * s.yz()),
        unit: quad.unit,
    })
}

/// θ = atan2(Πy, Πx), the rotation of the orbital branches.
pub fn mixing_angle(pi: &PiTriple) -> Result<f64> {
    if pi.perp() == 0.0 {
        return Err(Error::DegenerateBranches);
    }
    Ok(pi.y.atan2(pi.x))
}

/// SOC stress susceptibilities in GHz/GPa. `chi_l`/`chi_lp` give the
/// symmetric response of the lower-ISC λ⊥ˡ. No value is published; the
/// defaults keep the χ2′/χ2 ratio and are scaled to the pressure of the
/// lower-ISC extrema. χ4/χ4′ default to the χ5 pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocSusceptibilities {
    pub chi1: f64,
    pub chi1p: f64,
    pub chi2: f64,
    pub chi2p: f64,
    pub chi3: f64,
    pub chi3p: f64,
    pub chi4: f64,
    pub chi4p: f64,
    pub chi5: f64,
    pub chi5p: f64,
    pub chi6: f64,
    pub chi6p: f64,
    pub chi_l: f64,
    pub chi_lp: f64,
}

impl Default for SocSusceptibilities {
    fn default() -> Self {
        SocSusceptibilities {
            chi1: 0.045,
            chi1p: -0.0086,
            chi2: 0.059,
            chi2p: 0.0010,
            chi3: -0.0494,
            chi3p: -0.049,
            chi4: -0.0577,
            chi4p: -0.030,
            chi5: -0.0577,
            chi5p: -0.030,
            chi6: -0.149,
            chi6p: -0.0485,
            chi_l: 0.025,
            chi_lp: 0.025 * 0.0010 / 0.059,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapTables {
    pub e3: SusceptibilityQuad,
    pub e1: SusceptibilityQuad,
    pub a1: SusceptibilityQuad,
}

impl Default for GapTables {
    fn default() -> Self {
        GapTables {
            e3: CAS_3E,
            e1: CAS_1E,
            a1: CAS_1A1,
        }
    }
}

/// Zero-stress reference values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ambient {
    /// ³E ↔ ¹A1 gap, eV.
    pub delta0: f64,
    /// ¹E ↔ ³A2 gap, eV.
    pub sigma0: f64,
    /// ¹A1 ↔ ¹E gap, eV.
    pub lambda0: f64,
    /// ³E zero-phonon line, eV.
    pub zpl0: f64,
    /// GHz.
    pub lambda_z0: f64,
    /// GHz.
    pub lambda_perp0: f64,
    /// GHz.
    pub lambda_perp_l0: f64,
}

impl Ambient {
    /// Measured couplings (λz, λ⊥) with the calibrated λ⊥ˡ.
    pub fn experimental() -> Self {
        Ambient {
            delta0: 0.40,
            sigma0: 0.40,
            lambda0: 1.190,
            zpl0: 1.945,
            lambda_z0: 17.53,
            lambda_perp0: 21.06,
            lambda_perp_l0: crate::presets::LAMBDA_PERP_L0,
        }
    }
}

/// Per-branch gaps in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaps {
    pub delta_x: f64,
    pub delta_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub lambda: f64,
    pub zpl_x: f64,
    pub zpl_y: f64,
}

pub fn eval_gaps(tables: &GapTables, stress: &StressTensor, ambient: &Ambient) -> Result<Gaps> {
    let e3 = eval_pi(&tables.e3, stress)?.to_mev();
    let e1 = eval_pi(&tables.e1, stress)?.to_mev();
    let a1 = eval_pi(&tables.a1, stress)?.to_mev();
    let ev = 1e-3;
    let delta = ambient.delta0 + (e3.z - a1.z) * ev;
    let sigma = ambient.sigma0 + e1.z * ev;
    let zpl = ambient.zpl0 + e3.z * ev;
    Ok(Gaps {
        delta_x: delta + e3.perp() * ev,
        delta_y: delta - e3.perp() * ev,
        sigma_x: sigma - e1.perp() * ev,
        sigma_y: sigma + e1.perp() * ev,
        // Keeps Δ + Λ + Σ locked to the ³E line as the levels move.
        lambda: ambient.lambda0 + (a1.z - e1.z) * ev,
        zpl_x: zpl + e3.perp() * ev,
        zpl_y: zpl - e3.perp() * ev,
    })
}

/// SOC matrix elements in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocSet {
    pub lambda_z: f64,
    pub lambda_perp_x: f64,
    pub lambda_perp_y: f64,
    pub lambda_perp_l_x: f64,
    pub lambda_perp_l_y: f64,
    pub lambda_prime: f64,
    pub lambda_z_prime: f64,
}

/// Only the x-like stress components (σyy−σxx, σxz+σzx) enter the
/// symmetry-breaking SOC terms.
pub fn eval_soc(
    chi: &SocSusceptibilities,
    stress: &StressTensor,
    ambient: &Ambient,
) -> Result<SocSet> {
    stress.expect_frame(Frame::Local)?;
    let s = stress;
    let a = s.xx() + s.yy();
    let d = s.yy() - s.xx();
    let q = 2.0 * s.xz();
    let perp = ambient.lambda_perp0 + chi.chi2 * a + chi.chi2p * s.zz();
    let split = chi.chi5 * d + chi.chi5p * q;
    let perp_l = ambient.lambda_perp_l0 + chi.chi_l * a + chi.chi_lp * s.zz();
    let split_l = chi.chi4 * d + chi.chi4p * q;
    Ok(SocSet {
        lambda_z: ambient.lambda_z0 + chi.chi1 * a + chi.chi1p * s.zz(),
        lambda_perp_x: perp - split,
        lambda_perp_y: perp + split,
        lambda_perp_l_x: perp_l - split_l,
        lambda_perp_l_y: perp_l + split_l,
        lambda_prime: chi.chi3 * d + chi.chi3p * q,
        lambda_z_prime: chi.chi6 * d + chi.chi6p * q,
    })
}

/// Everything the rate model needs to know about one stress point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NvStressState {
    pub stress: StressTensor,
    pub gaps: Gaps,
    pub soc: SocSet,
    pub pi_3e: PiTriple,
    pub pi_1e: PiTriple,
    pub pi_1a1: PiTriple,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub tables: GapTables,
    pub soc: SocSusceptibilities,
    pub ambient: Ambient,
}

impl CouplingConstants {
    pub fn evaluate(&self, stress: &StressTensor, temperature: f64) -> Result<NvStressState> {
        Ok(NvStressState {
            stress: *stress,
            gaps: eval_gaps(&self.tables, stress, &self.ambient)?,
            soc: eval_soc(&self.soc, stress, &self.ambient)?,
            pi_3e: eval_pi(&self.tables.e3, stress)?.to_mev(),
            pi_1e: eval_pi(&self.tables.e1, stress)?.to_mev(),
            pi_1a1: eval_pi(&self.tables.a1, stress)?.to_mev(),
            temperature,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{to_local, NvOrientation};
    use proptest::prelude::*;

    fn local(c: [f64; 6]) -> StressTensor {
        StressTensor::new(c, Frame::Local)
    }

    fn local_100() -> StressTensor {
        let s = StressTensor::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], Frame::Crystal);
        to_local(&s, NvOrientation::Z111).unwrap()
    }

    fn ambient() -> Ambient {
        Ambient::experimental()
    }

    #[test]
    fn davies_slopes() {
        let h = eval_pi(&DAVIES_3E, &StressTensor::hydrostatic(1.0, Frame::Local)).unwrap();
        assert_eq!(h.z, 1067.0);
        assert_eq!(h.perp(), 0.0);
        let u = eval_pi(&DAVIES_3E, &local([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(u.z, -1523.0);
        assert_eq!(u.perp(), 0.0);
    }

    #[test]
    fn davies_100_components() {
        let p = eval_pi(&DAVIES_3E, &local_100()).unwrap();
        // Hand arithmetic with the rounded local tensor.
        let px = -645.0 * (1.0 / 3.0) + -89.0 * -0.4714;
        let py = -645.0 * -0.5774 + -89.0 * 0.8165;
        assert!((p.x - px).abs() < 0.05 && (p.x + 173.0).abs() < 0.05);
        assert!((p.y - py).abs() < 0.05 && (p.y - 299.7).abs() < 0.05);
        let theta = mixing_angle(&p).unwrap();
        assert!((theta - 2.095).abs() < 1e-3);
    }

    #[test]
    fn mixing_angle_cases() {
        let p = |x, y| PiTriple {
            z: 0.0,
            x,
            y,
            unit: EnergyUnit::GHz,
        };
        assert!((mixing_angle(&p(-2.0, 0.0)).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((mixing_angle(&p(0.0, 3.0)).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(
            mixing_angle(&p(0.0, 0.0)),
            Err(Error::DegenerateBranches)
        ));
    }

    #[test]
    fn zero_stress_gaps_and_soc() {
        let z = StressTensor::zero(Frame::Local);
        let g = eval_gaps(&GapTables::default(), &z, &ambient()).unwrap();
        assert_eq!((g.delta_x, g.delta_y), (0.40, 0.40));
        assert_eq!((g.sigma_x, g.sigma_y), (0.40, 0.40));
        assert_eq!(g.lambda, 1.190);
        let s = eval_soc(&SocSusceptibilities::default(), &z, &ambient()).unwrap();
        assert_eq!(s.lambda_prime, 0.0);
        assert_eq!(s.lambda_z_prime, 0.0);
        assert_eq!(s.lambda_perp_x, 21.06);
        assert_eq!(s.lambda_perp_y, 21.06);
        assert_eq!(s.lambda_z, 17.53);
    }

    #[test]
    fn hydrostatic_3e_slope() {
        let p = eval_pi(&CAS_3E, &StressTensor::hydrostatic(1.0, Frame::Local)).unwrap();
        assert!((p.z - 9.79).abs() < 1e-12);
        let u = eval_pi(&CAS_3E, &local([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(u.z, -5.47);
    }

    #[test]
    fn gap_tracks_zpl() {
        let s = local_100().scaled(30.0);
        let g = eval_gaps(&GapTables::default(), &s, &ambient()).unwrap();
        let a = ambient();
        let centre = |x: f64, y: f64| 0.5 * (x + y);
        let lhs = centre(g.delta_x, g.delta_y) + g.lambda + centre(g.sigma_x, g.sigma_y);
        let rhs = a.delta0 + a.lambda0 + a.sigma0 + centre(g.zpl_x, g.zpl_y) - a.zpl0;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn soc_100_lambda_z_prime() {
        let s = eval_soc(&SocSusceptibilities::default(), &local_100(), &ambient()).unwrap();
        let hand = -0.149 * (1.0 / 3.0) + -0.0485 * -0.4714;
        assert!((s.lambda_z_prime - hand).abs() < 1e-5);
        assert!((s.lambda_z_prime + 0.0268).abs() < 1e-4);
    }

    #[test]
    fn preserving_stress_keeps_branches() {
        let s = local([3.0, 3.0, -2.0, 0.0, 0.0, 0.0]);
        let soc = eval_soc(&SocSusceptibilities::default(), &s, &ambient()).unwrap();
        assert_eq!(soc.lambda_perp_x, soc.lambda_perp_y);
        assert_eq!(soc.lambda_perp_l_x, soc.lambda_perp_l_y);
        let g = eval_gaps(&GapTables::default(), &s, &ambient()).unwrap();
        assert_eq!(g.delta_x, g.delta_y);
    }

    #[test]
    fn frame_checked() {
        let s = StressTensor::zero(Frame::Crystal);
        assert!(eval_pi(&CAS_3E, &s).is_err());
        assert!(eval_soc(&SocSusceptibilities::default(), &s, &ambient()).is_err());
    }

    fn tensor() -> impl Strategy<Value = [f64; 6]> {
        proptest::array::uniform6(-20.0..20.0f64)
    }

    proptest! {
        #[test]
        fn eval_pi_is_linear(a in tensor(), b in tensor(), p in -3.0..3.0f64, q in -3.0..3.0f64) {
            let sa = local(a);
            let sb = local(b);
            let mix = sa.scaled(p).try_add(&sb.scaled(q)).unwrap();
            for quad in [DAVIES_3E, CAS_3E, CAS_1E, CAS_1A1] {
                let l = eval_pi(&quad, &mix).unwrap();
                let ra = eval_pi(&quad, &sa).unwrap();
                let rb = eval_pi(&quad, &sb).unwrap();
                let tol = 1e-12 * 2000.0 * 200.0;
                prop_assert!((l.z - (p * ra.z + q * rb.z)).abs() < tol);
                prop_assert!((l.x - (p * ra.x + q * rb.x)).abs() < tol);
                prop_assert!((l.y - (p * ra.y + q * rb.y)).abs() < tol);
            }
        }

        #[test]
        fn preserving_tensor_has_no_splitting(m in -50.0..50.0f64, z in -50.0..50.0f64) {
            let s = local([m, m, z, 0.0, 0.0, 0.0]);
            for quad in [DAVIES_3E, CAS_3E, CAS_1E, CAS_1A1] {
                prop_assert!(eval_pi(&quad, &s).unwrap().perp() < 1e-12);
            }
        }

        #[test]
        fn branch_gaps_split_by_two_pi_perp(c in tensor()) {
            let s = local(c);
            let g = eval_gaps(&GapTables::default(), &s, &ambient()).unwrap();
            let e3 = eval_pi(&CAS_3E, &s).unwrap().perp() * 1e-3;
            let e1 = eval_pi(&CAS_1E, &s).unwrap().perp() * 1e-3;
            prop_assert!((g.delta_x - g.delta_y - 2.0 * e3).abs() < 1e-12);
            prop_assert!((g.sigma_y - g.sigma_x - 2.0 * e1).abs() < 1e-12);
            prop_assert!(g.delta_x >= g.delta_y && g.sigma_x <= g.sigma_y);
        }
    }
}
