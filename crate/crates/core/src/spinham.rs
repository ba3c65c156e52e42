//! Spin-1 algebra and the stress-coupled spin-spin Hamiltonians.
//!
//! Basis order is |+1⟩, |0⟩, |−1⟩. All energies are in GHz.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::couplings::{eval_pi, EnergyUnit, PiTriple, SusceptibilityQuad};
use crate::error::{Error, Result};
use crate::frames::StressTensor;

pub type CMat3 = Matrix3<Complex64>;
pub type CVec3 = Vector3<Complex64>;

const TWO_PI_MHZ: f64 = 2.0 * std::f64::consts::PI * 1e-3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: CMat3,
    pub sy: CMat3,
    pub sz: CMat3,
}

impl Default for SpinOperators {
    fn default() -> Self {
        Self::new()
    }
}

impl SpinOperators {
    pub fn new() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::i();
        let z = c(0.0);
        let sx = CMat3::new(z, c(r), z, c(r), z, c(r), z, c(r), z);
        let sy = CMat3::new(z, -i * r, z, i * r, z, -i * r, z, i * r, z);
        let sz = CMat3::new(c(1.0), z, z, z, z, z, z, z, c(-1.0));
        SpinOperators { sx, sy, sz }
    }

    pub fn sz2(&self) -> CMat3 {
        self.sz * self.sz
    }

    /// Sy² − Sx².
    pub fn e_x(&self) -> CMat3 {
        self.sy * self.sy - self.sx * self.sx
    }

    /// SxSy + SySx.
    pub fn e_y(&self) -> CMat3 {
        self.sx * self.sy + self.sy * self.sx
    }

    /// SxSz + SzSx.
    pub fn xz(&self) -> CMat3 {
        self.sx * self.sz + self.sz * self.sx
    }

    /// SySz + SzSy.
    pub fn yz(&self) -> CMat3 {
        self.sy * self.sz + self.sz * self.sy
    }
}

/// |±⟩ = (|+1⟩ ± e^{iφ}|−1⟩)/√2.
pub fn plus_minus(phi: f64) -> (CVec3, CVec3) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e = Complex64::from_polar(r, phi);
    (CVec3::new(c(r), c(0.0), e), CVec3::new(c(r), c(0.0), -e))
}

pub fn zero_ket() -> CVec3 {
    CVec3::new(c(0.0), c(1.0), c(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSscParams {
    pub d_gs: f64,
    pub quad1: SusceptibilityQuad,
    pub quad2: SusceptibilityQuad,
}

impl Default for GroundSscParams {
    fn default() -> Self {
        let k = TWO_PI_MHZ;
        GroundSscParams {
            d_gs: 2.87,
            quad1: SusceptibilityQuad::new(8.6 * k, -2.5 * k, 1.95 * k, 4.50 * k, EnergyUnit::GHz),
            quad2: SusceptibilityQuad::new(0.0, 0.0, 1.95 * k, 4.50 * k, EnergyUnit::GHz),
        }
    }
}

impl GroundSscParams {
    pub fn validate(&self) -> Result<()> {
        if self.d_gs.is_nan() || self.d_gs <= 0.0 {
            return Err(Error::Domain {
                field: "d_gs",
                value: self.d_gs,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

fn pis(quad: &SusceptibilityQuad, stress: &StressTensor) -> Result<PiTriple> {
    Ok(eval_pi(quad, stress)?.to_ghz())
}

pub fn ground_hamiltonian(p: &GroundSscParams, stress: &StressTensor) -> Result<CMat3> {
    p.validate()?;
    let s = SpinOperators::new();
    let p1 = pis(&p.quad1, stress)?;
    let p2 = pis(&p.quad2, stress)?;
    Ok(s.sz2() * c(p.d_gs + p1.z)
        + s.e_x() * c(p1.x)
        + s.e_y() * c(p1.y)
        + s.xz() * c(p2.x)
        + s.yz() * c(p2.y))
}

/// Perturbative and exact |0⟩–|−⟩ admixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixing {
    pub formula: f64,
    /// ⟨−|ψ⟩ for the eigenvector ψ dominated by |0⟩, phased so ⟨0|ψ⟩ > 0.
    pub exact: Complex64,
}

fn zero_like_overlap(h: &CMat3, minus: &CVec3) -> Complex64 {
    let eig = SymmetricEigen::new(*h);
    let zero = zero_ket();
    let (k, _) = (0..3)
        .map(|k| (k, eig.eigenvectors.column(k).dotc(&zero).norm()))
        .fold(
            (0, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let v = eig.eigenvectors.column(k).into_owned();
    let a = zero.dotc(&v);
    let phase = a.conj() / a.norm();
    minus.dotc(&v) * phase
}

pub fn ground_beta0(p: &GroundSscParams, stress: &StressTensor) -> Result<Mixing> {
    let p1 = pis(&p.quad1, stress)?;
    let p2 = pis(&p.quad2, stress)?;
    let den = p.d_gs + p1.z + p1.x;
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateLevel("ground_beta0"));
    }
    let h = ground_hamiltonian(p, stress)?;
    let phi = if p1.perp() > 0.0 {
        p1.y.atan2(p1.x)
    } else {
        0.0
    };
    let (_, minus) = plus_minus(phi);
    Ok(Mixing {
        formula: -p2.x / den,
        exact: zero_like_overlap(&h, &minus),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    X,
    Y,
}

impl Branch {
    /// Eigenvalue of Pz on the branch.
    pub fn pz(self) -> f64 {
        match self {
            Branch::X => 1.0,
            Branch::Y => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitedSscParams {
    pub d_par: f64,
    pub d_perp: f64,
    pub d_perp_p: f64,
    pub quad1: SusceptibilityQuad,
    pub quad2: SusceptibilityQuad,
    pub quad3: SusceptibilityQuad,
}

const ZERO_QUAD: SusceptibilityQuad = SusceptibilityQuad::new(0.0, 0.0, 0.0, 0.0, EnergyUnit::GHz);

impl ExcitedSscParams {
    /// Room-temperature effective values.
    pub fn effective() -> Self {
        ExcitedSscParams {
            d_par: 1.42,
            d_perp: 1.55 / 2.0,
            d_perp_p: 0.0,
            quad1: ZERO_QUAD,
            quad2: ZERO_QUAD,
            quad3: ZERO_QUAD,
        }
    }

    /// Computed ambient values.
    pub fn computed() -> Self {
        ExcitedSscParams {
            d_par: 3.09,
            d_perp: 2.18,
            ..Self::effective()
        }
    }
}

impl Default for ExcitedSscParams {
    fn default() -> Self {
        Self::effective()
    }
}

/// Per-branch spin Hamiltonian with Pz → ±1; terms carrying Px are dropped
/// because they couple the split orbital branches.
pub fn excited_hamiltonian(
    p: &ExcitedSscParams,
    stress: &StressTensor,
    branch: Branch,
) -> Result<CMat3> {
    let s = SpinOperators::new();
    let (p1, p2, p3) = (
        pis(&p.quad1, stress)?,
        pis(&p.quad2, stress)?,
        pis(&p.quad3, stress)?,
    );
    let pz = branch.pz();
    let sz2 = s.sz2();
    Ok((sz2 - CMat3::identity() * c(2.0 / 3.0)) * c(p.d_par + p1.z)
        + s.e_x() * c(pz * (p.d_perp + p2.z) + p1.x)
        + s.xz() * c(pz * (p.d_perp_p + p3.z) + p2.x)
        + s.e_y() * c(p1.y)
        + s.yz() * c(p2.y)
        + sz2 * c(pz * p3.x))
}

/// (β1, β2) for branches x and y, with the exact overlaps alongside.
/// The closed form fixes magnitudes; its overall sign on the y branch
/// follows the printed expression rather than the eigenvector phase.
pub fn excited_beta12(p: &ExcitedSscParams, stress: &StressTensor) -> Result<(Mixing, Mixing)> {
    let (p1, p2, p3) = (
        pis(&p.quad1, stress)?,
        pis(&p.quad2, stress)?,
        pis(&p.quad3, stress)?,
    );
    let (_, minus) = plus_minus(0.0);
    let mut out = [Mixing {
        formula: 0.0,
        exact: c(0.0),
    }; 2];
    for (k, (sgn, branch)) in [(1.0, Branch::X), (-1.0, Branch::Y)]
        .into_iter()
        .enumerate()
    {
        let num = p.d_perp_p + p3.z - sgn * p2.x;
        let den = p.d_par + p1.z + sgn * p3.x + sgn * (p.d_perp + p2.z + sgn * p1.x);
        if den.abs() < 1e-12 {
            return Err(Error::DegenerateLevel("excited_beta12"));
        }
        let h = excited_hamiltonian(p, stress, branch)?;
        out[k] = Mixing {
            formula: -num / den,
            exact: zero_like_overlap(&h, &minus),
        };
    }
    Ok((out[0], out[1]))
}

/// Real eigenvalues in ascending order.
pub fn eigenvalues(h: &CMat3) -> [f64; 3] {
    let mut e: Vec<f64> = SymmetricEigen::new(*h)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    [e[0], e[1], e[2]]
}

pub fn hermiticity_error(h: &CMat3) -> f64 {
    (h - h.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
