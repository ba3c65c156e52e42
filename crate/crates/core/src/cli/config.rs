//! Run configuration: a TOML file with the sections `[stress]`,
//! `[susceptibilities]`, `[pjt]`, `[spectral]`, `[rates]`, `[cycle]` and
//! `[output]`. Every key is optional. Unknown keys are errors.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Deserialize;

use super::units::{EnergyEv, EnergyGhz, EnergyMev, Pressure, Rate, SocSlope, Time};
use crate::couplings::{CouplingConstants, EnergyUnit, SusceptibilityQuad};
use crate::cycle::{BranchMode, Drive, Protocol};
use crate::error::{Error, Result};
use crate::frames::{
    check_alpha, compose_mixture, direction_vector, Frame, NvOrientation, StressTensor,
};
use crate::pipeline::{Model, RateSettings};
use crate::presets::{self, PjtModel, Preset};
use crate::spectral::{HuangRhys, SpectralFunction, SpectralKind};

/// Environment variable naming the default data directory.
pub const DATA_ENV: &str = "NV_CYCLE_DATA";

pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_ENV).map(PathBuf::from)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    stress: RawStress,
    susceptibilities: RawSusceptibilities,
    pjt: RawPjt,
    spectral: RawSpectral,
    rates: RawRates,
    cycle: RawCycle,
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawStress {
    alpha: Option<f64>,
    axis: Option<String>,
    orientation: Option<String>,
    loading: Option<Vec<Pressure>>,
    /// `[start, stop, step]`, inclusive of `stop`.
    loading_range: Option<[Pressure; 3]>,
    /// Stress per unit loading `[xx, yy, zz, xy, xz, yz]`; replaces the mixture.
    tensor: Option<[f64; 6]>,
    frame: Option<String>,
    strain: Option<Vec<f64>>,
    strain_table: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuad {
    a1: f64,
    b1: f64,
    #[serde(default)]
    a2: f64,
    #[serde(default)]
    b2: f64,
    #[serde(default)]
    a1q: f64,
    #[serde(default)]
    b1q: f64,
    unit: String,
}

impl RawQuad {
    fn resolve(&self) -> Result<SusceptibilityQuad> {
        let unit = match self.unit.as_str() {
            "meV/GPa" => EnergyUnit::MeV,
            "GHz/GPa" => EnergyUnit::GHz,
            other => {
                return Err(Error::Config(format!(
                    "unit mismatch: susceptibility unit {other:?} (expected \"meV/GPa\" or \"GHz/GPa\")"
                )))
            }
        };
        Ok(SusceptibilityQuad {
            a1: self.a1,
            b1: self.b1,
            a2: self.a2,
            b2: self.b2,
            a1q: self.a1q,
            b1q: self.b1q,
            unit,
        })
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSusceptibilities {
    preset: Option<String>,
    file: Option<String>,
    e3: Option<RawQuad>,
    e1: Option<RawQuad>,
    a1: Option<RawQuad>,
    chi1: Option<SocSlope>,
    chi1p: Option<SocSlope>,
    chi2: Option<SocSlope>,
    chi2p: Option<SocSlope>,
    chi3: Option<SocSlope>,
    chi3p: Option<SocSlope>,
    chi4: Option<SocSlope>,
    chi4p: Option<SocSlope>,
    chi5: Option<SocSlope>,
    chi5p: Option<SocSlope>,
    chi6: Option<SocSlope>,
    chi6p: Option<SocSlope>,
    chi_l: Option<SocSlope>,
    chi_lp: Option<SocSlope>,
    delta0: Option<EnergyEv>,
    sigma0: Option<EnergyEv>,
    lambda0: Option<EnergyEv>,
    zpl0: Option<EnergyEv>,
    lambda_z0: Option<EnergyGhz>,
    lambda_perp0: Option<EnergyGhz>,
    lambda_perp_l0: Option<EnergyGhz>,
}

impl RawSusceptibilities {
    /// Keys set here win over those of `base`.
    fn over(self, base: RawSusceptibilities) -> RawSusceptibilities {
        macro_rules! pick {
            ($($f:ident),*) => {
                RawSusceptibilities { $($f: self.$f.or(base.$f)),* }
            };
        }
        pick!(
            preset,
            file,
            e3,
            e1,
            a1,
            chi1,
            chi1p,
            chi2,
            chi2p,
            chi3,
            chi3p,
            chi4,
            chi4p,
            chi5,
            chi5p,
            chi6,
            chi6p,
            chi_l,
            chi_lp,
            delta0,
            sigma0,
            lambda0,
            zpl0,
            lambda_z0,
            lambda_perp0,
            lambda_perp_l0
        )
    }

    fn resolve(&self) -> Result<CouplingConstants> {
        let preset: Preset = self.preset.as_deref().unwrap_or("calibrated").parse()?;
        let mut c = preset.constants();
        for (slot, raw) in [
            (&mut c.tables.e3, &self.e3),
            (&mut c.tables.e1, &self.e1),
            (&mut c.tables.a1, &self.a1),
        ] {
            if let Some(q) = raw {
                *slot = q.resolve()?;
            }
        }
        let s = &mut c.soc;
        for (slot, raw) in [
            (&mut s.chi1, self.chi1),
            (&mut s.chi1p, self.chi1p),
            (&mut s.chi2, self.chi2),
            (&mut s.chi2p, self.chi2p),
            (&mut s.chi3, self.chi3),
            (&mut s.chi3p, self.chi3p),
            (&mut s.chi4, self.chi4),
            (&mut s.chi4p, self.chi4p),
            (&mut s.chi5, self.chi5),
            (&mut s.chi5p, self.chi5p),
            (&mut s.chi6, self.chi6),
            (&mut s.chi6p, self.chi6p),
            (&mut s.chi_l, self.chi_l),
            (&mut s.chi_lp, self.chi_lp),
        ] {
            if let Some(q) = raw {
                *slot = q.value;
            }
        }
        let a = &mut c.ambient;
        for (slot, raw) in [
            (&mut a.delta0, self.delta0),
            (&mut a.sigma0, self.sigma0),
            (&mut a.lambda0, self.lambda0),
            (&mut a.zpl0, self.zpl0),
        ] {
            if let Some(q) = raw {
                *slot = q.value;
            }
        }
        for (slot, raw) in [
            (&mut a.lambda_z0, self.lambda_z0),
            (&mut a.lambda_perp0, self.lambda_perp0),
            (&mut a.lambda_perp_l0, self.lambda_perp_l0),
        ] {
            if let Some(q) = raw {
                *slot = q.value;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPjt {
    omega_e: Option<EnergyMev>,
    f_jt: Option<EnergyMev>,
    g_pjt: Option<EnergyMev>,
    n_max: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawHuangRhys {
    s: Option<f64>,
    omega: Option<EnergyMev>,
    sigma: Option<EnergyMev>,
    origin: Option<EnergyMev>,
    k_max: Option<usize>,
    e_max: Option<EnergyMev>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSpectral {
    f_upper: Option<String>,
    s_e: Option<String>,
    step: Option<EnergyMev>,
    huang_rhys: RawHuangRhys,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawRates {
    temperature: Option<f64>,
    /// MHz/meV³.
    eta: Option<f64>,
    omega_cut: Option<EnergyMev>,
    sign_conv: Option<f64>,
    regime_threshold: Option<EnergyGhz>,
    cutoff_kt: Option<f64>,
    /// Transition dipole in e·Å.
    dipole: Option<f64>,
    refractive_index: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawCycle {
    gamma_exc: Option<Rate>,
    gamma_mw: Option<Rate>,
    mw_target: Option<String>,
    init_time: Option<Time>,
    read_time: Option<Time>,
    dt: Option<Time>,
    /// 1/ms.
    steady_tol: Option<f64>,
    branch_mode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    dir: Option<String>,
    populations: Option<bool>,
    population_stride: Option<usize>,
    parallel: Option<bool>,
}

/// How each loading value becomes a crystal- or local-frame tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loading {
    /// `α·hydrostatic + (1−α)·uniaxial(axis)` in the crystal frame.
    Mixture { alpha: f64, axis: Vector3<f64> },
    /// A fixed tensor scaled by the loading value.
    Tensor(StressTensor),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressSettings {
    pub loading: Loading,
    pub orientation: NvOrientation,
    /// GPa.
    pub points: Vec<f64>,
}

impl StressSettings {
    pub fn tensor_at(&self, value: f64) -> Result<StressTensor> {
        match self.loading {
            Loading::Mixture { alpha, axis } => compose_mixture(alpha, value, axis),
            Loading::Tensor(t) => Ok(t.scaled(value)),
        }
    }

    /// Hydrostatic fraction, or NaN for an explicit tensor.
    pub fn alpha(&self) -> f64 {
        match self.loading {
            Loading::Mixture { alpha, .. } => alpha,
            Loading::Tensor(_) => f64::NAN,
        }
    }

    pub fn set_alpha(&mut self, alpha: f64) -> Result<()> {
        check_alpha(alpha)?;
        let axis = match self.loading {
            Loading::Mixture { axis, .. } => axis,
            Loading::Tensor(_) => Vector3::new(0.0, 0.0, 1.0),
        };
        self.loading = Loading::Mixture { alpha, axis };
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSettings {
    pub f_upper: Option<PathBuf>,
    pub s_e: Option<PathBuf>,
    pub step: f64,
    pub huang_rhys: HuangRhys,
    pub e_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub populations: bool,
    /// Integration steps between rows of `populations_<P>.csv`.
    pub population_stride: usize,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub stress: StressSettings,
    pub constants: CouplingConstants,
    pub pjt: PjtModel,
    pub spectral: SpectralSettings,
    pub temperature: f64,
    pub rates: RateSettings,
    pub drive: Drive,
    pub protocol: Protocol,
    pub mode: BranchMode,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::parse("", Path::new(".")).expect("the empty config is valid")
    }
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
}

/// Looks for `name` relative to `base`, then in `$NV_CYCLE_DATA`.
pub fn resolve_path(name: &str, base: &Path) -> Result<PathBuf> {
    let p = Path::new(name);
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    let local = base.join(p);
    if local.exists() {
        return Ok(local);
    }
    if let Some(d) = data_dir() {
        let alt = d.join(p);
        if alt.exists() {
            return Ok(alt);
        }
    }
    Err(Error::io(
        local,
        std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
    ))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Two-column `strain stress_GPa` table, linearly interpolated.
pub fn strain_to_stress(table: &str, strains: &[f64]) -> Result<Vec<f64>> {
    let mut rows = Vec::new();
    for (k, line) in table.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("strain table line {}: not numeric", k + 1)))?;
        if cols.len() != 2 {
            return Err(Error::Config(format!(
                "strain table line {}: expected two columns",
                k + 1
            )));
        }
        rows.push((cols[0], cols[1]));
    }
    if rows.len() < 2 || rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Config(
            "strain table needs at least two rows with increasing strain".into(),
        ));
    }
    strains
        .iter()
        .map(|&e| {
            let k = rows.partition_point(|r| r.0 <= e);
            if e < rows[0].0 || e > rows[rows.len() - 1].0 {
                return Err(Error::Domain {
                    field: "strain",
                    value: e,
                    reason: "outside the strain-to-stress table",
                });
            }
            let k = k.clamp(1, rows.len() - 1);
            let (a, b) = (rows[k - 1], rows[k]);
            Ok(a.1 + (b.1 - a.1) * (e - a.0) / (b.0 - a.0))
        })
        .collect()
}

/// `[start, stop, step]` with `stop` included when it lies on the grid.
pub fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::Domain {
            field: "loading_range",
            value: step,
            reason: "need step > 0 and stop ≥ start",
        });
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::parse_named(&text, base, &path.display().to_string())
    }

    /// Relative data paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        RunConfig::parse_named(text, base, "config")
    }

    fn parse_named(text: &str, base: &Path, origin: &str) -> Result<Self> {
        let raw: RawConfig = parse_toml(text, origin)?;
        let stress = resolve_stress(&raw.stress, base)?;

        let mut susc = raw.susceptibilities;
        if let Some(file) = susc.file.clone() {
            let path = resolve_path(&file, base)?;
            let inner: RawSusceptibilities =
                parse_toml(&read(&path)?, &path.display().to_string())?;
            if inner.file.is_some() {
                return Err(Error::Config(format!(
                    "{}: nested susceptibility files are not supported",
                    path.display()
                )));
            }
            susc = susc.over(inner);
        }
        let constants = susc.resolve()?;

        let d = PjtModel::default();
        let pjt = PjtModel {
            omega_e: raw.pjt.omega_e.map_or(d.omega_e, |q| q.value),
            f_jt: raw.pjt.f_jt.map_or(d.f_jt, |q| q.value),
            g_pjt: raw.pjt.g_pjt.map_or(d.g_pjt, |q| q.value),
            n_max: raw.pjt.n_max.unwrap_or(d.n_max),
        };

        let hr = &raw.spectral.huang_rhys;
        let g = presets::default_s_e_generator();
        let omega = hr.omega.map_or(g.omega, |q| q.value);
        let spectral = SpectralSettings {
            f_upper: raw
                .spectral
                .f_upper
                .as_deref()
                .map(|p| resolve_path(p, base))
                .transpose()?,
            s_e: raw
                .spectral
                .s_e
                .as_deref()
                .map(|p| resolve_path(p, base))
                .transpose()?,
            step: raw
                .spectral
                .step
                .map_or(presets::SPECTRAL_STEP, |q| q.value),
            huang_rhys: HuangRhys {
                s: hr.s.unwrap_or(g.s),
                omega,
                sigma: hr.sigma.map_or(g.sigma, |q| q.value),
                origin: hr.origin.map_or(omega, |q| q.value),
                k_max: hr.k_max.unwrap_or(g.k_max),
            },
            e_max: hr.e_max.map_or(presets::S_E_MAX, |q| q.value),
        };
        if !(spectral.step > 0.0) {
            return Err(Error::Domain {
                field: "step",
                value: spectral.step,
                reason: "spectral grid spacing must be positive",
            });
        }

        let r = &raw.rates;
        let mut rates = RateSettings::default();
        if let Some(v) = r.eta {
            rates.phonon.eta = v;
        }
        if let Some(q) = r.omega_cut {
            rates.phonon.omega_cut = q.value;
        }
        if let Some(v) = r.sign_conv {
            if v != 1.0 && v != -1.0 {
                return Err(Error::Domain {
                    field: "sign_conv",
                    value: v,
                    reason: "must be +1 or -1",
                });
            }
            rates.lower.sign_conv = v;
        }
        if let Some(q) = r.regime_threshold {
            rates.regime_threshold_ghz = q.value;
        }
        if let Some(v) = r.cutoff_kt {
            rates.lower.cutoff_kt = v;
        }
        if let Some(v) = r.dipole {
            rates.dipole_ea = v;
        }
        if let Some(v) = r.refractive_index {
            rates.n_d = v;
        }
        let temperature = r.temperature.unwrap_or(300.0);
        if !(temperature > 0.0) {
            return Err(Error::Domain {
                field: "temperature",
                value: temperature,
                reason: "must be positive",
            });
        }

        let c = &raw.cycle;
        let dd = Drive::default();
        let drive = Drive {
            gamma_exc: c.gamma_exc.map_or(dd.gamma_exc, |q| q.value),
            gamma_mw: c.gamma_mw.map_or(dd.gamma_mw, |q| q.value),
            mw_target: c
                .mw_target
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or_default(),
        };
        let dp = Protocol::default();
        let protocol = Protocol {
            init_time: c.init_time.map_or(dp.init_time, |q| q.value),
            read_time: c.read_time.map_or(dp.read_time, |q| q.value),
            dt: c.dt.map_or(dp.dt, |q| q.value),
            steady_tol: c.steady_tol.unwrap_or(dp.steady_tol),
        };
        let mode = c
            .branch_mode
            .as_deref()
            .map(str::parse)
            .transpose()?
            .unwrap_or_default();

        let o = &raw.output;
        let output = OutputSettings {
            dir: o
                .dir
                .as_deref()
                .map_or_else(|| PathBuf::from("nv-cycle-out"), PathBuf::from),
            populations: o.populations.unwrap_or(true),
            population_stride: o.population_stride.unwrap_or(1000).max(1),
            parallel: o.parallel.unwrap_or(true),
        };

        Ok(RunConfig {
            stress,
            constants,
            pjt,
            spectral,
            temperature,
            rates,
            drive,
            protocol,
            mode,
            output,
        })
    }

    pub fn f_upper(&self) -> Result<SpectralFunction> {
        let h = self.spectral.step;
        match &self.spectral.f_upper {
            Some(p) => SpectralFunction::load(p, SpectralKind::FUpper, h),
            None => match data_dir().map(|d| d.join(presets::F_UPPER_FILE)) {
                Some(p) if p.exists() => SpectralFunction::load(p, SpectralKind::FUpper, h),
                _ => presets::bundled_f_upper(h),
            },
        }
    }

    pub fn s_e(&self) -> Result<SpectralFunction> {
        let h = self.spectral.step;
        match &self.spectral.s_e {
            Some(p) => {
                let mut s = SpectralFunction::load(p, SpectralKind::SE, h)?;
                s.normalize()?;
                Ok(s)
            }
            None => self.spectral.huang_rhys.generate(
                SpectralKind::SE,
                h,
                0.0,
                self.spectral.e_max,
                self.temperature,
            ),
        }
    }

    pub fn model(&self) -> Result<Model> {
        let mut m = Model::new(
            self.constants,
            self.pjt,
            self.f_upper()?,
            &self.s_e()?,
            self.temperature,
        )?;
        m.orientation = self.stress.orientation;
        m.rates = self.rates;
        m.drive = self.drive;
        m.protocol = self.protocol;
        m.mode = self.mode;
        Ok(m)
    }
}

fn resolve_stress(raw: &RawStress, base: &Path) -> Result<StressSettings> {
    let orientation: NvOrientation = raw.orientation.as_deref().unwrap_or("111").parse()?;
    let loading = match raw.tensor {
        Some(c) => {
            if raw.alpha.is_some() || raw.axis.is_some() {
                return Err(Error::Config(
                    "[stress] tensor excludes alpha and axis".into(),
                ));
            }
            let frame = match raw.frame.as_deref().unwrap_or("crystal") {
                "crystal" => Frame::Crystal,
                "local" => Frame::Local,
                other => {
                    return Err(Error::Config(format!(
                        "[stress] frame {other:?} (expected \"crystal\" or \"local\")"
                    )))
                }
            };
            Loading::Tensor(StressTensor::new(c, frame))
        }
        None => {
            if raw.frame.is_some() {
                return Err(Error::Config(
                    "[stress] frame only applies to tensor".into(),
                ));
            }
            let alpha = raw.alpha.unwrap_or(DEFAULT_ALPHA);
            check_alpha(alpha)?;
            let axis = direction_vector(raw.axis.as_deref().unwrap_or(DEFAULT_AXIS))
                .map_err(Error::Config)?;
            Loading::Mixture { alpha, axis }
        }
    };
    let sources = [
        raw.loading.is_some(),
        raw.loading_range.is_some(),
        raw.strain.is_some(),
    ];
    if sources.iter().filter(|b| **b).count() > 1 {
        return Err(Error::Config(
            "[stress] give only one of loading, loading_range and strain".into(),
        ));
    }
    let points = if let Some(v) = &raw.loading {
        v.iter().map(|q| q.value).collect()
    } else if let Some([a, b, s]) = raw.loading_range {
        range(a.value, b.value, s.value)?
    } else if let Some(strain) = &raw.strain {
        let table = raw.strain_table.as_deref().ok_or_else(|| {
            Error::Config("[stress] strain needs strain_table (strain → GPa)".into())
        })?;
        strain_to_stress(&read(&resolve_path(table, base)?)?, strain)?
    } else {
        vec![0.0]
    };
    if points.is_empty() {
        return Err(Error::Config("[stress] no loading points".into()));
    }
    Ok(StressSettings {
        loading,
        orientation,
        points,
    })
}

/// The 57 % hydrostatic / 43 % [001] mixture of the (111)-cut anvil data.
pub const DEFAULT_ALPHA: f64 = 0.57;
pub const DEFAULT_AXIS: &str = "001";
