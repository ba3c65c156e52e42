//! Rate-equation model of the optical cycle.
//!
//! The generator `G` acts on a population column vector, `dn/dt = G·n`, with
//! `G[to][from]` holding the rate of the `from → to` transition in MHz.
//! Contrast is reported as `C = 1 − I_MW/I`: the usual ODMR dip is positive
//! and an inverted (brighter under microwaves) line is negative.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Seven-state layout.
pub const G0: usize = 0;
pub const GP: usize = 1;
pub const GM: usize = 2;
pub const E0: usize = 3;
pub const EP: usize = 4;
pub const EM: usize = 5;
pub const SHELF: usize = 6;

pub const STATE_LABELS: [&str; 7] = ["g0", "g+", "g-", "e0", "e+", "e-", "shelf"];

/// Inter-branch hopping Γ↓ of the explicit ten-state mode, MHz (1 THz).
pub const BRANCH_HOP_MHZ: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwTarget {
    /// g0 ↔ g−, the left ODMR line.
    #[default]
    Minus,
    /// g0 ↔ g+, the right ODMR line.
    Plus,
}

impl MwTarget {
    pub fn ground_index(self) -> usize {
        match self {
            MwTarget::Minus => GM,
            MwTarget::Plus => GP,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MwTarget::Minus => "minus",
            MwTarget::Plus => "plus",
        }
    }
}

impl std::str::FromStr for MwTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minus" | "-" | "left" | "g-" => Ok(MwTarget::Minus),
            "plus" | "+" | "right" | "g+" => Ok(MwTarget::Plus),
            other => Err(Error::Config(format!(
                "unknown mw_target {other:?} (expected \"minus\" or \"plus\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchMode {
    /// ³E branches folded into Boltzmann-weighted effective rates.
    #[default]
    Folded,
    /// Both branches kept explicitly with fast hopping between them.
    Explicit,
}

impl std::str::FromStr for BranchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "7" | "7-state" | "folded" => Ok(BranchMode::Folded),
            "10" | "10-state" | "explicit" => Ok(BranchMode::Explicit),
            other => Err(Error::Config(format!(
                "unknown branch mode {other:?} (expected \"7-state\" or \"10-state\")"
            ))),
        }
    }
}

/// Per-branch component rates in MHz. Spin arrays are ordered `[0, +, −]`.
/// The x branch is the upper ³E branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRates {
    pub rad_x: f64,
    pub rad_y: f64,
    pub isc_x: [f64; 3],
    pub isc_y: [f64; 3],
    /// Shelf → ground spin.
    pub lower: [f64; 3],
    /// Thermal occupation of the upper (x) branch.
    pub w_upper: f64,
    /// Π⊥(³E) in meV; used only by the explicit branch mode.
    pub pi_perp_mev: f64,
    pub temperature: f64,
}

impl CycleRates {
    /// Both branches identical, as in the symmetric regime.
    pub fn symmetric(rad: f64, isc: [f64; 3], lower: [f64; 3], temperature: f64) -> Self {
        CycleRates {
            rad_x: rad,
            rad_y: rad,
            isc_x: isc,
            isc_y: isc,
            lower,
            w_upper: 0.5,
            pi_perp_mev: 0.0,
            temperature,
        }
    }

    fn validate(&self) -> Result<()> {
        let named = [
            ("rad_x", self.rad_x),
            ("rad_y", self.rad_y),
            ("isc_x[0]", self.isc_x[0]),
            ("isc_x[+]", self.isc_x[1]),
            ("isc_x[-]", self.isc_x[2]),
            ("isc_y[0]", self.isc_y[0]),
            ("isc_y[+]", self.isc_y[1]),
            ("isc_y[-]", self.isc_y[2]),
            ("lower[0]", self.lower[0]),
            ("lower[+]", self.lower[1]),
            ("lower[-]", self.lower[2]),
        ];
        for (name, value) in named {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeRate {
                    name: name.to_string(),
                    value,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.w_upper) {
            return Err(Error::Domain {
                field: "w_upper",
                value: self.w_upper,
                reason: "branch weight must lie in [0, 1]",
            });
        }
        Ok(())
    }

    /// Effective radiative rate of each excited spin.
    pub fn rad_eff(&self) -> f64 {
        self.w_upper * self.rad_x + (1.0 - self.w_upper) * self.rad_y
    }

    pub fn isc_eff(&self) -> [f64; 3] {
        let w = self.w_upper;
        std::array::from_fn(|s| w * self.isc_x[s] + (1.0 - w) * self.isc_y[s])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub gamma_exc: f64,
    pub gamma_mw: f64,
    pub mw_target: MwTarget,
}

impl Default for Drive {
    fn default() -> Self {
        Drive {
            gamma_exc: 0.1,
            gamma_mw: 1.0,
            mw_target: MwTarget::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleModel {
    pub labels: Vec<String>,
    /// Generator in MHz, columns are source states.
    pub generator: DMatrix<f64>,
    /// Emission rate of each state (zero outside the excited manifold).
    pub emission: DVector<f64>,
    pub mode: BranchMode,
}

fn add(g: &mut DMatrix<f64>, from: usize, to: usize, rate: f64) {
    if rate != 0.0 {
        g[(to, from)] += rate;
        g[(from, from)] -= rate;
    }
}

pub fn assemble(rates: &CycleRates, drive: &Drive, mode: BranchMode) -> Result<CycleModel> {
    rates.validate()?;
    for (field, v) in [("gamma_exc", drive.gamma_exc), ("gamma_mw", drive.gamma_mw)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::NegativeRate {
                name: field.to_string(),
                value: v,
            });
        }
    }
    let model = match mode {
        BranchMode::Folded => assemble_folded(rates, drive),
        BranchMode::Explicit => assemble_explicit(rates, drive)?,
    };
    Ok(model)
}

fn assemble_folded(r: &CycleRates, d: &Drive) -> CycleModel {
    let mut g = DMatrix::zeros(7, 7);
    let rad = r.rad_eff();
    let isc = r.isc_eff();
    let mut emission = DVector::zeros(7);
    for s in 0..3 {
        add(&mut g, s, s + 3, d.gamma_exc);
        add(&mut g, s + 3, s, rad);
        add(&mut g, s + 3, SHELF, isc[s]);
        add(&mut g, SHELF, s, r.lower[s]);
        emission[s + 3] = rad;
    }
    let t = d.mw_target.ground_index();
    add(&mut g, G0, t, d.gamma_mw);
    add(&mut g, t, G0, d.gamma_mw);
    CycleModel {
        labels: STATE_LABELS.iter().map(|s| s.to_string()).collect(),
        generator: g,
        emission,
        mode: BranchMode::Folded,
    }
}

/// Layout: g0 g+ g− | ex0 ex+ ex− | ey0 ey+ ey− | shelf.
fn assemble_explicit(r: &CycleRates, d: &Drive) -> Result<CycleModel> {
    if !(r.temperature > 0.0) {
        return Err(Error::Domain {
            field: "temperature",
            value: r.temperature,
            reason: "must be positive",
        });
    }
    let shelf = 9;
    let mut g = DMatrix::zeros(10, 10);
    let mut emission = DVector::zeros(10);
    let down = BRANCH_HOP_MHZ;
    let up = down * (-2.0 * r.pi_perp_mev.abs() / crate::units::kt_mev(r.temperature)).exp();
    let w = r.w_upper;
    for s in 0..3 {
        let (ex, ey) = (3 + s, 6 + s);
        add(&mut g, s, ex, d.gamma_exc * w);
        add(&mut g, s, ey, d.gamma_exc * (1.0 - w));
        add(&mut g, ex, s, r.rad_x);
        add(&mut g, ey, s, r.rad_y);
        add(&mut g, ex, shelf, r.isc_x[s]);
        add(&mut g, ey, shelf, r.isc_y[s]);
        add(&mut g, ex, ey, down);
        add(&mut g, ey, ex, up);
        add(&mut g, shelf, s, r.lower[s]);
        emission[ex] = r.rad_x;
        emission[ey] = r.rad_y;
    }
    let t = d.mw_target.ground_index();
    add(&mut g, G0, t, d.gamma_mw);
    add(&mut g, t, G0, d.gamma_mw);
    let labels = [
        "g0", "g+", "g-", "ex0", "ex+", "ex-", "ey0", "ey+", "ey-", "shelf",
    ];
    Ok(CycleModel {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        generator: g,
        emission,
        mode: BranchMode::Explicit,
    })
}

impl CycleModel {
    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn max_rate(&self) -> f64 {
        self.generator
            .diagonal()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Ground-spin populations `[g0, g+, g−]` of a state vector.
    pub fn ground(&self, n: &DVector<f64>) -> [f64; 3] {
        [n[G0], n[GP], n[GM]]
    }

    pub fn intensity(&self, n: &DVector<f64>) -> f64 {
        self.emission.dot(n)
    }

    /// Equal ground-spin populations, the thermal state at room temperature.
    pub fn thermal(&self) -> DVector<f64> {
        let mut n = DVector::zeros(self.dim());
        for i in [G0, GP, GM] {
            n[i] = 1.0 / 3.0;
        }
        n
    }

    /// |dn/dt|∞ in 1/ms.
    pub fn residual(&self, n: &DVector<f64>) -> f64 {
        (&self.generator * n).amax() * 1e3
    }

    pub fn with_mw(&self, rates: &CycleRates, drive: &Drive) -> Result<CycleModel> {
        assemble(rates, drive, self.mode)
    }
}

/// exp(A) by scaling and squaring with a Taylor core.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// One-step propagator exp(G·dt), with each column renormalised to sum 1
/// and clipped at zero so probability is conserved to rounding.
pub fn propagator(model: &CycleModel, dt: f64) -> DMatrix<f64> {
    let mut p = expm(&(&model.generator * (dt * 1e6)));
    for mut col in p.column_iter_mut() {
        col.apply(|v| *v = v.max(0.0));
        let s = col.sum();
        col /= s;
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Seconds.
    pub times: Vec<f64>,
    pub populations: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &DVector<f64> {
        self.populations
            .last()
            .expect("trajectory holds the initial state")
    }
}

fn check_initial(n0: &DVector<f64>, dim: usize) -> Result<()> {
    if n0.len() != dim {
        return Err(Error::Domain {
            field: "n0",
            value: n0.len() as f64,
            reason: "length must match the model dimension",
        });
    }
    if n0.iter().any(|&v| v < 0.0) || (n0.sum() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain {
            field: "n0",
            value: n0.sum(),
            reason: "populations must be nonnegative and sum to 1",
        });
    }
    Ok(())
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Domain {
            field: "dt",
            value: dt,
            reason: "time step and end time must be positive",
        });
    }
    Ok((t_end / dt).round() as usize)
}

/// Drives the exact stepper, calling `visit(step, n)` after every step, and
/// returns the final state. Fails if conservation drifts beyond 1e-9.
pub fn propagate(
    model: &CycleModel,
    n0: &DVector<f64>,
    t_end: f64,
    dt: f64,
    mut visit: impl FnMut(usize, &DVector<f64>),
) -> Result<DVector<f64>> {
    check_initial(n0, model.dim())?;
    let steps = step_count(t_end, dt)?;
    let p = propagator(model, dt);
    let mut n = n0.clone();
    let mut next = DVector::zeros(n.len());
    for k in 1..=steps {
        p.mul_to(&n, &mut next);
        std::mem::swap(&mut n, &mut next);
        let drift = (n.sum() - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::Domain {
                field: "population sum",
                value: n.sum(),
                reason: "probability conservation violated",
            });
        }
        visit(k, &n);
    }
    Ok(n)
}

/// Records every `stride`-th step (and the last).
pub fn integrate(
    model: &CycleModel,
    n0: &DVector<f64>,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    let stride = stride.max(1);
    let steps = step_count(t_end, dt)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        populations: vec![n0.clone()],
    };
    propagate(model, n0, t_end, dt, |k, n| {
        if k % stride == 0 || k == steps {
            traj.times.push(k as f64 * dt);
            traj.populations.push(n.clone());
        }
    })?;
    Ok(traj)
}

/// Explicit Euler, kept as an independent oracle for the exact stepper.
pub fn integrate_euler(
    model: &CycleModel,
    n0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<DVector<f64>> {
    check_initial(n0, model.dim())?;
    let steps = step_count(t_end, dt)?;
    let product = model.max_rate() * 1e6 * dt;
    if product >= 0.1 {
        return Err(Error::StabilityGuard {
            product,
            suggested: 0.1 / (model.max_rate() * 1e6),
        });
    }
    let a = DMatrix::identity(model.dim(), model.dim()) + &model.generator * (dt * 1e6);
    let mut n = n0.clone();
    for _ in 0..steps {
        n = &a * n;
    }
    Ok(n)
}

/// Normalised null vector of the generator.
pub fn steady_state(model: &CycleModel) -> Result<DVector<f64>> {
    let g = &model.generator;
    let dim = g.nrows();
    let svd = g.clone().svd(false, false);
    let scale = svd.singular_values.max().max(1e-300);
    let null = svd
        .singular_values
        .iter()
        .filter(|&&s| s <= 1e-12 * scale * dim as f64)
        .count();
    if null > 1 {
        return Err(Error::Structural(null));
    }
    let mut a = g.clone();
    a.row_mut(0).fill(1.0);
    let mut b = DVector::zeros(dim);
    b[0] = 1.0;
    let mut n = a.lu().solve(&b).ok_or(Error::Structural(dim))?;
    n.apply(|v| {
        if *v < 0.0 && *v >= -1e-12 {
            *v = 0.0;
        }
    });
    Ok(n)
}

/// Ground-spin distribution `[g0, g+, g−]` at the end of a trajectory.
pub fn polarization(traj: &Trajectory) -> [f64; 3] {
    let n = traj.last();
    let g = [n[G0], n[GP], n[GM]];
    let s: f64 = g.iter().sum();
    if s > 0.0 {
        g.map(|v| v / s)
    } else {
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    /// Seconds.
    pub init_time: f64,
    pub read_time: f64,
    pub dt: f64,
    /// Bound on |dn/dt|∞ (1/ms) at the end of the read window.
    pub steady_tol: f64,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            init_time: 10e-3,
            read_time: 1e-3,
            dt: 10e-9,
            steady_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastResult {
    pub intensity: f64,
    pub intensity_mw: f64,
    pub contrast: f64,
    /// Ground-spin distribution after initialisation.
    pub polarization: [f64; 3],
    /// Ground-spin distribution at the end of the MW-on read.
    pub polarization_mw: [f64; 3],
    pub steady_reached: bool,
    pub metastable: bool,
    /// Full populations after initialisation.
    pub populations: DVector<f64>,
}

fn read_average(
    model: &CycleModel,
    n0: &DVector<f64>,
    p: &Protocol,
) -> Result<(f64, DVector<f64>)> {
    let steps = step_count(p.read_time, p.dt)?;
    let first = model.intensity(n0);
    let mut sum = 0.5 * first;
    let mut last = first;
    let end = propagate(model, n0, p.read_time, p.dt, |_, n| {
        last = model.intensity(n);
        sum += last;
    })?;
    if steps == 0 {
        return Ok((first, end));
    }
    sum -= 0.5 * last;
    Ok((sum / steps as f64, end))
}

fn ground_fraction(n: &DVector<f64>) -> [f64; 3] {
    let g = [n[G0], n[GP], n[GM]];
    let s: f64 = g.iter().sum();
    if s > 0.0 {
        g.map(|v| v / s)
    } else {
        g
    }
}

/// Initialise MW-off from the thermal state, then read MW-off and MW-on.
/// `tau` is the relaxation time in seconds, when known.
pub fn contrast(
    rates: &CycleRates,
    drive: &Drive,
    mode: BranchMode,
    protocol: &Protocol,
    tau: Option<f64>,
) -> Result<ContrastResult> {
    contrast_traced(rates, drive, mode, protocol, tau, 0).map(|(c, _)| c)
}

/// As [`contrast`], also recording every `stride`-th step of the
/// initialisation window (`stride = 0` records nothing).
pub fn contrast_traced(
    rates: &CycleRates,
    drive: &Drive,
    mode: BranchMode,
    protocol: &Protocol,
    tau: Option<f64>,
    stride: usize,
) -> Result<(ContrastResult, Option<Trajectory>)> {
    if !(protocol.init_time > 0.0 && protocol.read_time > 0.0) {
        return Err(Error::Domain {
            field: "protocol",
            value: protocol.init_time.min(protocol.read_time),
            reason: "init_time and read_time must be positive",
        });
    }
    let off = assemble(
        rates,
        &Drive {
            gamma_mw: 0.0,
            ..*drive
        },
        mode,
    )?;
    let on = assemble(rates, drive, mode)?;
    let n0 = off.thermal();
    let (init, trace) = if stride > 0 {
        let traj = integrate(&off, &n0, protocol.init_time, protocol.dt, stride)?;
        (traj.last().clone(), Some(traj))
    } else {
        (
            propagate(&off, &n0, protocol.init_time, protocol.dt, |_, _| {})?,
            None,
        )
    };
    let (i_off, end_off) = read_average(&off, &init, protocol)?;
    let (i_on, end_on) = read_average(&on, &init, protocol)?;
    let steady =
        off.residual(&end_off) < protocol.steady_tol && on.residual(&end_on) < protocol.steady_tol;
    let result = ContrastResult {
        intensity: i_off,
        intensity_mw: i_on,
        contrast: 1.0 - i_on / i_off,
        polarization: ground_fraction(&init),
        polarization_mw: ground_fraction(&end_on),
        steady_reached: steady,
        metastable: tau.is_some_and(|t| t > protocol.init_time),
        populations: init,
    };
    Ok((result, trace))
}
