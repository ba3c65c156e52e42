//! Stress tensors in the crystal and NV-local frames.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Cubic crystal axes X, Y, Z.
    Crystal,
    /// NV axes x, y, z with z along the N–V bond.
    Local,
}

/// Symmetric stress tensor in GPa, stored as (xx, yy, zz, xy, xz, yz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressTensor {
    c: [f64; 6],
    frame: Frame,
}

impl StressTensor {
    pub fn new(components: [f64; 6], frame: Frame) -> Self {
        StressTensor {
            c: components,
            frame,
        }
    }

    pub fn zero(frame: Frame) -> Self {
        Self::new([0.0; 6], frame)
    }

    pub fn hydrostatic(pressure: f64, frame: Frame) -> Self {
        Self::new([pressure, pressure, pressure, 0.0, 0.0, 0.0], frame)
    }

    /// Uniaxial stress `magnitude · d dᵀ` along the (normalized) direction `d`.
    pub fn uniaxial(direction: Vector3<f64>, magnitude: f64, frame: Frame) -> Self {
        let d = direction.normalize();
        Self::from_matrix(&(d * d.transpose() * magnitude), frame)
    }

    pub fn from_matrix(m: &Matrix3<f64>, frame: Frame) -> Self {
        let sym = |i: usize, j: usize| 0.5 * (m[(i, j)] + m[(j, i)]);
        Self::new(
            [
                m[(0, 0)],
                m[(1, 1)],
                m[(2, 2)],
                sym(0, 1),
                sym(0, 2),
                sym(1, 2),
            ],
            frame,
        )
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [xx, yy, zz, xy, xz, yz] = self.c;
        Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz)
    }

    pub fn components(&self) -> [f64; 6] {
        self.c
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn xx(&self) -> f64 {
        self.c[0]
    }
    pub fn yy(&self) -> f64 {
        self.c[1]
    }
    pub fn zz(&self) -> f64 {
        self.c[2]
    }
    pub fn xy(&self) -> f64 {
        self.c[3]
    }
    pub fn xz(&self) -> f64 {
        self.c[4]
    }
    pub fn yz(&self) -> f64 {
        self.c[5]
    }

    pub fn trace(&self) -> f64 {
        self.c[0] + self.c[1] + self.c[2]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.c.map(|v| v * s), self.frame)
    }

    pub fn try_add(&self, other: &StressTensor) -> Result<Self> {
        other.expect_frame(self.frame)?;
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(other.c) {
            *a += b;
        }
        Ok(Self::new(c, self.frame))
    }

    pub fn expect_frame(&self, expected: Frame) -> Result<()> {
        if self.frame == expected {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected,
                found: self.frame,
            })
        }
    }

    pub fn max_abs_diff(&self, other: &StressTensor) -> f64 {
        self.c
            .iter()
            .zip(other.c)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One of the ⟨111⟩ bond directions an NV axis can take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NvOrientation {
    signs: [i8; 3],
}

impl NvOrientation {
    pub const Z111: NvOrientation = NvOrientation { signs: [1, 1, 1] };

    pub fn from_signs(signs: [i8; 3]) -> Result<Self> {
        if signs.iter().all(|s| *s == 1 || *s == -1) {
            Ok(NvOrientation { signs })
        } else {
            Err(Error::InvalidOrientation(format!(
                "{signs:?} is not a <111> direction"
            )))
        }
    }

    /// Accepts a unit vector; every entry must be ±1/√3 to 1e-12.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidOrientation(format!(
                "vector norm {} is not 1",
                v.norm()
            )));
        }
        let mut signs = [0i8; 3];
        for (s, x) in signs.iter_mut().zip(v.iter()) {
            if (x.abs() - 1.0 / 3f64.sqrt()).abs() > 1e-12 {
                return Err(Error::InvalidOrientation(format!(
                    "{v:?} is not a <111> bond direction"
                )));
            }
            *s = if *x > 0.0 { 1 } else { -1 };
        }
        Ok(NvOrientation { signs })
    }

    pub fn axis(&self) -> Vector3<f64> {
        Vector3::new(
            self.signs[0] as f64,
            self.signs[1] as f64,
            self.signs[2] as f64,
        ) / 3f64.sqrt()
    }

    pub fn signs(&self) -> [i8; 3] {
        self.signs
    }
}

impl std::str::FromStr for NvOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = parse_direction(s).map_err(Error::InvalidOrientation)?;
        let mut signs = [0i8; 3];
        for (k, v) in d.iter().enumerate() {
            if v.abs() != 1 {
                return Err(Error::InvalidOrientation(format!(
                    "{s:?} is not a <111> direction"
                )));
            }
            signs[k] = *v as i8;
        }
        Ok(NvOrientation { signs })
    }
}

impl std::fmt::Display for NvOrientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in self.signs {
            write!(f, "{}", if s < 0 { "-1" } else { "1" })?;
        }
        Ok(())
    }
}

/// Parses a Miller-style direction such as `111`, `-1-11`, `[0 0 1]` or `1,-1,0`
/// into integer components. Single digits only.
pub fn parse_direction(s: &str) -> std::result::Result<[i32; 3], String> {
    let mut out = Vec::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '-' => neg = true,
            '0'..='9' => {
                let v = ch.to_digit(10).unwrap() as i32;
                out.push(if neg { -v } else { v });
                neg = false;
            }
            '[' | ']' | '<' | '>' | ',' | ' ' | '_' => {}
            _ => return Err(format!("unexpected character {ch:?} in direction {s:?}")),
        }
    }
    if out.len() != 3 || out.iter().all(|v| *v == 0) {
        return Err(format!("{s:?} is not a three-component direction"));
    }
    Ok([out[0], out[1], out[2]])
}

pub fn direction_vector(s: &str) -> std::result::Result<Vector3<f64>, String> {
    let d = parse_direction(s)?;
    Ok(Vector3::new(d[0] as f64, d[1] as f64, d[2] as f64).normalize())
}

/// Crystal-to-local rotation for the [111]-oriented NV. Local x lies along the
/// in-plane projection of the [1̄1̄1] bond (equivalently of crystal Z).
pub fn r111() -> Matrix3<f64> {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    Matrix3::new(
        -1.0 / s6,
        -1.0 / s6,
        (2.0f64 / 3.0).sqrt(),
        1.0 / s2,
        -1.0 / s2,
        0.0,
        1.0 / s3,
        1.0 / s3,
        1.0 / s3,
    )
}

/// Rotation taking crystal coordinates to the NV-local frame, third row along
/// the NV axis.
///
/// Bond directions with an even number of minus signs are brought onto [111]
/// by a twofold rotation about a cube axis, which is `diag(signs)`. The other
/// four are the inverted axes; for those the x and z rows of the partner
/// orientation are flipped, which keeps det R = +1.
pub fn rotation_matrix(orientation: NvOrientation) -> Matrix3<f64> {
    let s = orientation.signs;
    let minus = s.iter().filter(|v| **v < 0).count();
    if minus % 2 == 0 {
        r111() * Matrix3::from_diagonal(&Vector3::new(s[0] as f64, s[1] as f64, s[2] as f64))
    } else {
        let partner = Vector3::new(-s[0] as f64, -s[1] as f64, -s[2] as f64);
        Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, -1.0))
            * r111()
            * Matrix3::from_diagonal(&partner)
    }
}

pub fn to_local(stress: &StressTensor, orientation: NvOrientation) -> Result<StressTensor> {
    stress.expect_frame(Frame::Crystal)?;
    let r = rotation_matrix(orientation);
    Ok(StressTensor::from_matrix(
        &(r * stress.to_matrix() * r.transpose()),
        Frame::Local,
    ))
}

pub fn to_crystal(stress: &StressTensor, orientation: NvOrientation) -> Result<StressTensor> {
    stress.expect_frame(Frame::Local)?;
    let r = rotation_matrix(orientation);
    Ok(StressTensor::from_matrix(
        &(r.transpose() * stress.to_matrix() * r),
        Frame::Crystal,
    ))
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Domain {
            field: "alpha",
            value: alpha,
            reason: "hydrostaticity must lie in [0, 1]",
        })
    }
}

/// `α·σ_hyd + (1−α)·σ_[111]`, both with loading `magnitude` along the load axis.
pub fn compose_stress(alpha: f64, magnitude: f64) -> Result<StressTensor> {
    compose_mixture(alpha, magnitude, Vector3::new(1.0, 1.0, 1.0))
}

/// Hydrostatic/uniaxial mixture with an arbitrary crystal load axis.
pub fn compose_mixture(alpha: f64, magnitude: f64, axis: Vector3<f64>) -> Result<StressTensor> {
    check_alpha(alpha)?;
    let hyd = StressTensor::hydrostatic(magnitude, Frame::Crystal).to_matrix();
    let uni = StressTensor::uniaxial(axis, magnitude, Frame::Crystal).to_matrix();
    Ok(StressTensor::from_matrix(
        &(hyd * alpha + uni * (1.0 - alpha)),
        Frame::Crystal,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressDecomposition {
    pub preserving: StressTensor,
    pub breaking: StressTensor,
}

/// Splits a local tensor into its C3v-invariant part and the remainder.
pub fn decompose_symmetry(stress: &StressTensor) -> Result<StressDecomposition> {
    stress.expect_frame(Frame::Local)?;
    let mean = 0.5 * (stress.xx() + stress.yy());
    let preserving = StressTensor::new([mean, mean, stress.zz(), 0.0, 0.0, 0.0], Frame::Local);
    let [xx, yy, _, xy, xz, yz] = stress.components();
    let breaking = StressTensor::new([xx - mean, yy - mean, 0.0, xy, xz, yz], Frame::Local);
    Ok(StressDecomposition {
        preserving,
        breaking,
    })
}
