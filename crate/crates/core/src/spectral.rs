//! Tabulated spectral densities and their self-convolutions.
//!
//! Every curve lives on a grid of integer multiples of the spacing `h`
//! (meV), so convolution is an index sum and S⁽⁰⁾ is a single bin of
//! height 1/h at zero. Areas are bin sums `h·Σ f`, which the discrete
//! convolution preserves exactly; for curves that vanish at both ends this
//! equals the trapezoid rule.

use std::path::Path;

use crate::error::{Error, Result};
use crate::units::kt_mev;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    FUpper,
    SE,
}

impl SpectralKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectralKind::FUpper => "F_upper",
            SpectralKind::SE => "S_E",
        }
    }
}

/// Tolerance for treating a sample position as sitting on a grid node.
const NODE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    /// Grid index of the first sample; its energy is `offset·h`.
    pub offset: i64,
    pub h: f64,
    pub values: Vec<f64>,
    pub kind: SpectralKind,
    pub temperature: f64,
}

/// Result of evaluating a tabulated curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub in_support: bool,
}

impl SpectralFunction {
    /// Tabulate `f` on the grid nodes covering `[lo, hi]` meV.
    pub fn from_fn(
        kind: SpectralKind,
        h: f64,
        lo: f64,
        hi: f64,
        temperature: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        check_spacing(h)?;
        let first = (lo / h - NODE_TOL).ceil() as i64;
        let last = (hi / h + NODE_TOL).floor() as i64;
        if last < first {
            return Err(Error::Spectral(format!("empty range [{lo}, {hi}] meV")));
        }
        let values = (first..=last).map(|k| f(k as f64 * h)).collect();
        let out = SpectralFunction {
            offset: first,
            h,
            values,
            kind,
            temperature,
        };
        out.check_values()?;
        Ok(out)
    }

    /// Resample scattered two-column data (meV, 1/meV) onto the grid.
    pub fn from_samples(
        kind: SpectralKind,
        h: f64,
        temperature: f64,
        energy: &[f64],
        density: &[f64],
    ) -> Result<Self> {
        if energy.is_empty() {
            return Err(Error::Spectral("no data rows".into()));
        }
        if energy.len() != density.len() {
            return Err(Error::Spectral("column lengths differ".into()));
        }
        if let Some(w) = energy.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Spectral(format!(
                "energy grid not strictly increasing at row {}",
                w + 2
            )));
        }
        if let Some(i) = density.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::Spectral(format!(
                "negative or non-finite density {} at row {}",
                density[i],
                i + 1
            )));
        }
        let lo = energy[0];
        let hi = *energy.last().unwrap();
        let mut out = Self::from_fn(kind, h, lo, hi, temperature, |e| {
            interpolate(energy, density, e)
        })?;
        if kind == SpectralKind::SE {
            out.pad_zeros();
            out.normalize()?;
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>, kind: SpectralKind, h: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, kind, h)
            .map_err(|e| Error::Spectral(format!("{}: {}", path.display(), e)))
    }

    /// Two whitespace-separated columns; `#` starts a comment. A comment of
    /// the form `# temperature_K = 300` tags the dataset temperature.
    pub fn parse(text: &str, kind: SpectralKind, h: f64) -> Result<Self> {
        let mut energy = Vec::new();
        let mut density = Vec::new();
        let mut temperature = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    if key.trim() == "temperature_K" {
                        let t = value.trim().parse::<f64>().map_err(|_| {
                            Error::Spectral(format!("line {}: bad temperature", n + 1))
                        })?;
                        temperature = Some(t);
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace().map(str::parse::<f64>);
            match (cols.next(), cols.next(), cols.next()) {
                (Some(Ok(e)), Some(Ok(v)), None) => {
                    energy.push(e);
                    density.push(v);
                }
                _ => {
                    return Err(Error::Spectral(format!(
                        "line {}: expected two numeric columns",
                        n + 1
                    )))
                }
            }
        }
        let temperature = temperature
            .ok_or_else(|| Error::Spectral("missing '# temperature_K = …' tag".into()))?;
        Self::from_samples(kind, h, temperature, &energy, &density)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# kind = {}\n# temperature_K = {}\n# energy_meV density_per_meV\n",
            self.kind.name(),
            self.temperature
        );
        for (k, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{:.6} {:.9e}\n", self.energy(k), v));
        }
        s
    }

    fn check_values(&self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Spectral(format!("negative or non-finite value {v}")));
        }
        Ok(())
    }

    fn pad_zeros(&mut self) {
        if self.values.first() != Some(&0.0) {
            self.values.insert(0, 0.0);
            self.offset -= 1;
        }
        if self.values.last() != Some(&0.0) {
            self.values.push(0.0);
        }
    }

    pub fn energy(&self, k: usize) -> f64 {
        (self.offset + k as i64) as f64 * self.h
    }

    pub fn integral(&self) -> f64 {
        self.h * self.values.iter().sum::<f64>()
    }

    pub fn first_moment(&self) -> f64 {
        self.h
            * self
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| self.energy(k) * v)
                .sum::<f64>()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let a = self.integral();
        if !(a > 0.0) {
            return Err(Error::Spectral(
                "cannot normalize a curve with zero area".into(),
            ));
        }
        self.values.iter_mut().for_each(|v| *v /= a);
        Ok(())
    }

    /// Linear interpolation at `energy_mev`; zero with `in_support = false`
    /// outside the tabulated range.
    pub fn sample(&self, energy_mev: f64) -> Sample {
        sample_grid(self.offset, self.h, &self.values, energy_mev)
    }

    /// Evaluate at a detuning given in eV.
    pub fn evaluate(&self, delta_ev: f64) -> Sample {
        self.sample(delta_ev * 1e3)
    }

    pub fn check_temperature(&self, run: f64) -> Result<()> {
        if (self.temperature - run).abs() > 1e-9 {
            return Err(Error::TemperatureMismatch {
                dataset: self.temperature,
                run,
            });
        }
        Ok(())
    }
}

fn check_spacing(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain {
            field: "grid spacing",
            value: h,
            reason: "must be positive",
        });
    }
    Ok(())
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    match x.partition_point(|&v| v <= at) {
        0 => y[0],
        i if i == x.len() => y[x.len() - 1],
        i => {
            let t = (at - x[i - 1]) / (x[i] - x[i - 1]);
            y[i - 1] + t * (y[i] - y[i - 1])
        }
    }
}

fn sample_grid(offset: i64, h: f64, values: &[f64], energy_mev: f64) -> Sample {
    let u = energy_mev / h - offset as f64;
    let last = values.len() as f64 - 1.0;
    if !(u >= -NODE_TOL && u <= last + NODE_TOL) {
        return Sample {
            value: 0.0,
            in_support: false,
        };
    }
    let u = u.clamp(0.0, last);
    let k = u.floor() as usize;
    let t = u - k as f64;
    let value = if k + 1 >= values.len() || t < NODE_TOL {
        values[k]
    } else if t > 1.0 - NODE_TOL {
        values[k + 1]
    } else {
        values[k] + t * (values[k + 1] - values[k])
    };
    Sample {
        value,
        in_support: true,
    }
}

/// n(ω) = 1/(exp(ħω/kT) − 1).
pub fn bose_occupation(omega_mev: f64, temperature: f64) -> Result<f64> {
    if !(omega_mev > 0.0) {
        return Err(Error::Domain {
            field: "omega",
            value: omega_mev,
            reason: "phonon energy must be positive",
        });
    }
    if temperature < 0.0 {
        return Err(Error::Domain {
            field: "temperature",
            value: temperature,
            reason: "must be non-negative",
        });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega_mev / kt_mev(temperature)).exp_m1())
}

/// Discrete convolution on a common grid: `(a*b)[k] = h·Σ a[j]·b[k−j]`.
pub fn convolve(a: &[f64], b: &[f64], h: f64) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out.iter_mut().for_each(|v| *v *= h);
    out
}

/// S⁽⁰⁾ … S⁽ⁿᵐᵃˣ⁾ on the grid of the parent curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolvedFamily {
    pub h: f64,
    pub offsets: Vec<i64>,
    pub members: Vec<Vec<f64>>,
}

impl ConvolvedFamily {
    pub fn n_max(&self) -> usize {
        self.members.len() - 1
    }

    pub fn sample(&self, n: usize, energy_mev: f64) -> Sample {
        match self.members.get(n) {
            Some(m) => sample_grid(self.offsets[n], self.h, m, energy_mev),
            None => Sample {
                value: 0.0,
                in_support: false,
            },
        }
    }

    /// Value of S⁽ⁿ⁾ at `energy_mev`, zero outside the support.
    pub fn value(&self, n: usize, energy_mev: f64) -> f64 {
        self.sample(n, energy_mev).value
    }

    pub fn integral(&self, n: usize) -> f64 {
        self.h * self.members[n].iter().sum::<f64>()
    }

    pub fn first_moment(&self, n: usize) -> f64 {
        let o = self.offsets[n];
        self.h
            * self.members[n]
                .iter()
                .enumerate()
                .map(|(k, v)| (o + k as i64) as f64 * self.h * v)
                .sum::<f64>()
    }
}

pub fn convolve_family(s: &SpectralFunction, n_max: i64) -> Result<ConvolvedFamily> {
    if n_max < 0 {
        return Err(Error::Domain {
            field: "n_max",
            value: n_max as f64,
            reason: "must be non-negative",
        });
    }
    let mut offsets = vec![0];
    let mut members = vec![vec![1.0 / s.h]];
    for n in 1..=n_max as usize {
        let next = convolve(&members[n - 1], &s.values, s.h);
        offsets.push(offsets[n - 1] + s.offset);
        members.push(next);
    }
    Ok(ConvolvedFamily {
        h: s.h,
        offsets,
        members,
    })
}

/// Single-mode Huang–Rhys lineshape: Poisson-weighted comb at k·ħω,
/// each tooth broadened by a unit-area Gaussian of width `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuangRhys {
    pub s: f64,
    pub omega: f64,
    pub sigma: f64,
    /// Energy of the zero-phonon tooth (meV).
    pub origin: f64,
    pub k_max: usize,
}

impl HuangRhys {
    pub fn density(&self, e: f64) -> f64 {
        let norm = 1.0 / (self.sigma * (2.0 * std::f64::consts::PI).sqrt());
        let mut w = (-self.s).exp();
        let mut total = 0.0;
        for k in 0..=self.k_max {
            if k > 0 {
                w *= self.s / k as f64;
            }
            let x = (e - self.origin - k as f64 * self.omega) / self.sigma;
            total += w * norm * (-0.5 * x * x).exp();
        }
        total
    }

    pub fn generate(
        &self,
        kind: SpectralKind,
        h: f64,
        lo: f64,
        hi: f64,
        temperature: f64,
    ) -> Result<SpectralFunction> {
        if !(self.s >= 0.0 && self.omega > 0.0 && self.sigma > 0.0) {
            return Err(Error::Spectral(
                "Huang-Rhys parameters need S ≥ 0, ω > 0, σ > 0".into(),
            ));
        }
        let mut f = SpectralFunction::from_fn(kind, h, lo, hi, temperature, |e| self.density(e))?;
        if kind == SpectralKind::SE {
            f.pad_zeros();
            f.normalize()?;
        }
        Ok(f)
    }
}
