//! Pseudo-Jahn–Teller problem of the singlet manifold {¹Ex, ¹Ey, ¹A1} coupled
//! to a doubly degenerate e mode, solved in a truncated two-mode Fock basis.
//!
//! The Hamiltonian commutes with the reflection σv (y → −y) whenever the
//! ¹E splitting is along x, which is always the case here: the splitting is
//! applied in the rotated branch frame. `solve` therefore diagonalizes the
//! σv-even and σv-odd blocks separately. Even states are the x partners of
//! E and the A1 states; odd states are the y partners and the A2 states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::units::kt_mev;

pub const EX: usize = 0;
pub const EY: usize = 1;
pub const A1: usize = 2;

const C3_COS: f64 = -0.5;
const C3_SIN: f64 = 0.866_025_403_784_438_6;

/// Electronic × two-mode Fock product basis, `n_x + n_y ≤ n_max`.
///
/// Ordering: electronic index major, then n_x, then n_y.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    n_max: usize,
    phonons: Vec<(usize, usize)>,
}

impl FockBasis {
    pub fn new(n_max: usize) -> Self {
        let mut phonons = Vec::new();
        for nx in 0..=n_max {
            for ny in 0..=(n_max - nx) {
                phonons.push((nx, ny));
            }
        }
        FockBasis { n_max, phonons }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_phonon(&self) -> usize {
        self.phonons.len()
    }

    pub fn dim(&self) -> usize {
        3 * self.phonons.len()
    }

    pub fn phonon(&self, p: usize) -> (usize, usize) {
        self.phonons[p]
    }

    pub fn phonon_index(&self, nx: usize, ny: usize) -> usize {
        // Rows nx' < nx hold (n_max − nx' + 1) states each.
        nx * (self.n_max + 1) - nx * (nx.saturating_sub(1)) / 2 + ny
    }

    pub fn index(&self, elec: usize, p: usize) -> usize {
        elec * self.phonons.len() + p
    }

    /// Phonon indices of shell `n` ordered by ascending n_x.
    pub fn shell(&self, n: usize) -> Vec<usize> {
        (0..=n).map(|nx| self.phonon_index(nx, n - nx)).collect()
    }

    /// σv eigenvalue of a basis state.
    pub fn parity(&self, i: usize) -> f64 {
        let p = self.phonons.len();
        let (elec, ph) = (i / p, i % p);
        let e = if elec == EY { -1.0 } else { 1.0 };
        if self.phonons[ph].1 % 2 == 1 {
            -e
        } else {
            e
        }
    }
}

/// g[i][j][k]: coupling of electronic |i⟩⟨j| to Q_k (k = x, y), meV.
pub type Coupling = [[[f64; 2]; 3]; 3];

/// E⊗e Jahn–Teller term of strength `f_jt` inside ¹E plus the ¹E–¹A1
/// pseudo-Jahn–Teller term of strength `g_pjt`; both are C3v-invariant.
pub fn linear_coupling(f_jt: f64, g_pjt: f64) -> Coupling {
    let mut g = [[[0.0; 2]; 3]; 3];
    g[EX][EX][0] = f_jt;
    g[EY][EY][0] = -f_jt;
    g[EX][EY][1] = -f_jt;
    g[EY][EX][1] = -f_jt;
    g[A1][EX][0] = g_pjt;
    g[EX][A1][0] = g_pjt;
    g[A1][EY][1] = g_pjt;
    g[EY][A1][1] = g_pjt;
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct PjtParams {
    /// Electronic energies of ¹Ex, ¹Ey, ¹A1 in meV.
    pub energies: [f64; 3],
    /// Effective e-mode energy in meV.
    pub omega_e: f64,
    pub g: Coupling,
    pub n_max: usize,
}

impl PjtParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_e > 0.0) {
            return Err(Error::Domain {
                field: "omega_e",
                value: self.omega_e,
                reason: "must be positive",
            });
        }
        if self.n_max < 4 {
            return Err(Error::Domain {
                field: "n_max",
                value: self.n_max as f64,
                reason: "must be at least 4",
            });
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..2 {
                    if self.g[i][j][k] != self.g[j][i][k] {
                        return Err(Error::InvalidCoupling(format!(
                            "g[{i}][{j}][{k}] = {} but g[{j}][{i}][{k}] = {}",
                            self.g[i][j][k], self.g[j][i][k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when the electronic part is C3v-invariant.
    pub fn is_symmetric(&self) -> bool {
        self.energies[EX] == self.energies[EY]
    }
}

pub fn build_hamiltonian(params: &PjtParams) -> Result<(FockBasis, DMatrix<f64>)> {
    params.validate()?;
    let basis = FockBasis::new(params.n_max);
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for e in 0..3 {
        for p in 0..basis.n_phonon() {
            let (nx, ny) = basis.phonon(p);
            let i = basis.index(e, p);
            h[(i, i)] = params.energies[e] + params.omega_e * (nx + ny + 1) as f64;
        }
    }
    for p in 0..basis.n_phonon() {
        let (nx, ny) = basis.phonon(p);
        // b_k† raises mode k: ⟨n+1|b†|n⟩ = √(n+1).
        let raised = [
            (nx + ny < basis.n_max())
                .then(|| (basis.phonon_index(nx + 1, ny), ((nx + 1) as f64).sqrt())),
            (nx + ny < basis.n_max())
                .then(|| (basis.phonon_index(nx, ny + 1), ((ny + 1) as f64).sqrt())),
        ];
        for (k, up) in raised.iter().enumerate() {
            let Some((q, amp)) = *up else { continue };
            for a in 0..3 {
                for b in 0..3 {
                    let g = params.g[a][b][k];
                    if g == 0.0 {
                        continue;
                    }
                    let (i, j) = (basis.index(a, q), basis.index(b, p));
                    h[(i, j)] += g * amp;
                    h[(j, i)] += g * amp;
                }
            }
        }
    }
    Ok((basis, h))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Rotation of shell `n` under b_x† → c·b_x† + s·b_y†, b_y† → −s·b_x† + c·b_y†,
/// in the shell-local order (n_x ascending).
fn shell_rotation(n: usize, c: f64, s: f64) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(n + 1, n + 1);
    for nx in 0..=n {
        let ny = n - nx;
        let norm = (factorial(nx) * factorial(ny)).sqrt();
        for i in 0..=nx {
            for j in 0..=ny {
                let amp = binomial(nx, i)
                    * c.powi(i as i32)
                    * s.powi((nx - i) as i32)
                    * binomial(ny, j)
                    * (-s).powi(j as i32)
                    * c.powi((ny - j) as i32);
                let m = i + j;
                r[(m, nx)] += amp * (factorial(m) * factorial(n - m)).sqrt() / norm;
            }
        }
    }
    r
}

/// The six C3v elements as (electronic E-matrix, character-sign, builder).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupElement {
    E,
    C3,
    C3Sq,
    Sigma,
    SigmaC3,
    SigmaC3Sq,
}

impl GroupElement {
    pub const ALL: [GroupElement; 6] = [
        GroupElement::E,
        GroupElement::C3,
        GroupElement::C3Sq,
        GroupElement::Sigma,
        GroupElement::SigmaC3,
        GroupElement::SigmaC3Sq,
    ];

    fn rotations(self) -> usize {
        match self {
            GroupElement::E | GroupElement::Sigma => 0,
            GroupElement::C3 | GroupElement::SigmaC3 => 1,
            GroupElement::C3Sq | GroupElement::SigmaC3Sq => 2,
        }
    }

    fn reflects(self) -> bool {
        matches!(
            self,
            GroupElement::Sigma | GroupElement::SigmaC3 | GroupElement::SigmaC3Sq
        )
    }

    /// Two-dimensional E representation: σ^r · R^k.
    pub fn e_matrix(self) -> [[f64; 2]; 2] {
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        for _ in 0..self.rotations() {
            m = [
                [
                    C3_COS * m[0][0] - C3_SIN * m[1][0],
                    C3_COS * m[0][1] - C3_SIN * m[1][1],
                ],
                [
                    C3_SIN * m[0][0] + C3_COS * m[1][0],
                    C3_SIN * m[0][1] + C3_COS * m[1][1],
                ],
            ];
        }
        if self.reflects() {
            m[1][0] = -m[1][0];
            m[1][1] = -m[1][1];
        }
        m
    }

    /// Character in A2.
    pub fn a2_character(self) -> f64 {
        if self.reflects() {
            -1.0
        } else {
            1.0
        }
    }
}

/// Group action on the phonon space and the full product space.
#[derive(Debug, Clone)]
pub struct SymmetryOps {
    basis: FockBasis,
    /// Per-shell C3 rotation (shell-local order).
    c3: Vec<DMatrix<f64>>,
}

impl SymmetryOps {
    pub fn new(basis: &FockBasis) -> Self {
        let c3 = (0..=basis.n_max())
            .map(|n| shell_rotation(n, C3_COS, C3_SIN))
            .collect();
        SymmetryOps {
            basis: basis.clone(),
            c3,
        }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// Apply C3 to a vector on the phonon space.
    fn c3_phonon(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for n in 0..=self.basis.n_max() {
            let idx = self.basis.shell(n);
            let r = &self.c3[n];
            for (col, &pc) in idx.iter().enumerate() {
                let x = v[pc];
                if x == 0.0 {
                    continue;
                }
                for (row, &pr) in idx.iter().enumerate() {
                    out[pr] += r[(row, col)] * x;
                }
            }
        }
        out
    }

    fn sigma_phonon(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(p, x)| {
                if self.basis.phonon(p).1 % 2 == 1 {
                    -x
                } else {
                    *x
                }
            })
            .collect()
    }

    /// Apply a group element to a phonon-space vector.
    pub fn apply_phonon(&self, g: GroupElement, v: &[f64]) -> Vec<f64> {
        let mut w = v.to_vec();
        for _ in 0..g.rotations() {
            w = self.c3_phonon(&w);
        }
        if g.reflects() {
            w = self.sigma_phonon(&w);
        }
        w
    }

    /// Apply a group element to a product-space vector.
    pub fn apply(&self, g: GroupElement, v: &DVector<f64>) -> DVector<f64> {
        let p = self.basis.n_phonon();
        let blocks: Vec<Vec<f64>> = (0..3)
            .map(|e| self.apply_phonon(g, &v.as_slice()[e * p..(e + 1) * p]))
            .collect();
        let d = g.e_matrix();
        let mut out = DVector::zeros(3 * p);
        for q in 0..p {
            out[EX * p + q] = d[0][0] * blocks[EX][q] + d[0][1] * blocks[EY][q];
            out[EY * p + q] = d[1][0] * blocks[EX][q] + d[1][1] * blocks[EY][q];
            out[A1 * p + q] = blocks[A1][q];
        }
        out
    }

    /// Dense matrix of a group element on the product space.
    pub fn matrix(&self, g: GroupElement) -> DMatrix<f64> {
        let n = self.basis.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            m.set_column(j, &self.apply(g, &e));
        }
        m
    }
}

/// Dense U(C3) and U(σv) on the product space.
pub fn symmetry_operators(basis: &FockBasis) -> (DMatrix<f64>, DMatrix<f64>) {
    let ops = SymmetryOps::new(basis);
    (
        ops.matrix(GroupElement::C3),
        ops.matrix(GroupElement::Sigma),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Irrep {
    A1,
    A2,
    Ex,
    Ey,
}

impl Irrep {
    pub fn name(self) -> &'static str {
        match self {
            Irrep::A1 => "A1",
            Irrep::A2 => "A2",
            Irrep::Ex => "Ex",
            Irrep::Ey => "Ey",
        }
    }

    pub fn is_e(self) -> bool {
        matches!(self, Irrep::Ex | Irrep::Ey)
    }
}

/// One symmetry-adapted phonon function χ_i(Γ) living in shell `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhononFunction {
    pub irrep: Irrep,
    pub shell: usize,
    /// Position among functions of the same irrep (Ex/Ey partners share it).
    pub index: usize,
    /// Amplitudes on the phonon space.
    pub amps: Vec<f64>,
}

/// Symmetry-adapted phonon functions, shell by shell, obtained by applying
/// projectors to Fock states in canonical order and orthonormalizing.
pub fn phonon_functions(ops: &SymmetryOps) -> Vec<PhononFunction> {
    let basis = ops.basis();
    let np = basis.n_phonon();
    let mut out = Vec::new();
    let mut counters = [0usize; 3];
    for n in 0..=basis.n_max() {
        let shell = basis.shell(n);
        let unit = |p: usize| {
            let mut v = vec![0.0; np];
            v[p] = 1.0;
            v
        };
        let images = |p: usize| -> Vec<(GroupElement, Vec<f64>)> {
            GroupElement::ALL
                .iter()
                .map(|&g| (g, ops.apply_phonon(g, &unit(p))))
                .collect()
        };
        let mut sets: [Vec<Vec<f64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut ey_partners = Vec::new();
        for &p in &shell {
            let imgs = images(p);
            let combine = |weight: &dyn Fn(GroupElement) -> f64| {
                let mut v = vec![0.0; np];
                for (g, img) in &imgs {
                    let w = weight(*g);
                    if w != 0.0 {
                        v.iter_mut().zip(img).for_each(|(a, b)| *a += w * b);
                    }
                }
                v
            };
            let cands = [
                combine(&|_| 1.0 / 6.0),
                combine(&|g| g.a2_character() / 6.0),
                combine(&|g| g.e_matrix()[0][0] / 3.0),
            ];
            for (k, cand) in cands.into_iter().enumerate() {
                if let Some(v) = orthonormalize(cand, &sets[k]) {
                    if k == 2 {
                        // Transfer operator P_yx carries the x partner to y.
                        let mut y = vec![0.0; np];
                        for g in GroupElement::ALL {
                            let w = g.e_matrix()[1][0] / 3.0;
                            if w != 0.0 {
                                let img = ops.apply_phonon(g, &v);
                                y.iter_mut().zip(&img).for_each(|(a, b)| *a += w * b);
                            }
                        }
                        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
                        y.iter_mut().for_each(|a| *a /= norm);
                        ey_partners.push(y);
                    }
                    sets[k].push(v);
                }
            }
        }
        for (k, irrep) in [Irrep::A1, Irrep::A2, Irrep::Ex].into_iter().enumerate() {
            for v in std::mem::take(&mut sets[k]) {
                out.push(PhononFunction {
                    irrep,
                    shell: n,
                    index: counters[k],
                    amps: v,
                });
                counters[k] += 1;
            }
        }
        let first_ey = counters[2] - ey_partners.len();
        for (j, v) in ey_partners.into_iter().enumerate() {
            out.push(PhononFunction {
                irrep: Irrep::Ey,
                shell: n,
                index: first_ey + j,
                amps: v,
            });
        }
    }
    out
}

fn orthonormalize(mut v: Vec<f64>, against: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..2 {
        for u in against {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return None;
    }
    v.iter_mut().for_each(|a| *a /= norm);
    Some(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibronicState {
    /// Energy above the lowest vibronic state, meV.
    pub energy: f64,
    /// Absolute eigenvalue, meV.
    pub eigenvalue: f64,
    pub irrep: Irrep,
    /// Character weight backing the label (1 for a clean state).
    pub purity: f64,
    pub vector: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct VibronicSpectrum {
    pub params: PjtParams,
    pub basis: FockBasis,
    pub states: Vec<VibronicState>,
    pub phonons: Vec<PhononFunction>,
    ops: SymmetryOps,
}

/// Projector purity below which a state in a symmetric problem is rejected.
pub const CLEAN_LABEL: f64 = 0.99;

/// Symmetric eigendecomposition, eigenvalues ascending.
///
/// nalgebra 0.33's `SymmetricEigen` can return eigenvectors paired with the
/// wrong eigenvalues on these sparse ladder matrices, so faer does the work.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Eigensolver(n))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let vals = (0..n).map(|k| s[k]).collect();
    Ok((vals, DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

fn block_eigen(h: &DMatrix<f64>, idx: &[usize]) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let n = idx.len();
    let sub = DMatrix::from_fn(n, n, |i, j| h[(idx[i], idx[j])]);
    let (vals, vecs) = sym_eigen(&sub)?;
    let full = h.nrows();
    let vecs = (0..n)
        .map(|k| {
            let mut v = DVector::zeros(full);
            for (i, &g) in idx.iter().enumerate() {
                v[g] = vecs[(i, k)];
            }
            v
        })
        .collect();
    Ok((vals, vecs))
}

/// Inside each degenerate eigenspace, rotate to eigenvectors of the class
/// operator (C3 + C3²)/2 so accidental A/E degeneracies come out unmixed.
fn split_degenerate(
    vals: &[f64],
    mut vecs: Vec<DVector<f64>>,
    ops: &SymmetryOps,
) -> Result<Vec<DVector<f64>>> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && vals[order[end]] - vals[order[start]] < 1e-8 {
            end += 1;
        }
        if end - start > 1 {
            let group: Vec<usize> = order[start..end].to_vec();
            let images: Vec<DVector<f64>> = group
                .iter()
                .map(|&k| {
                    let a = ops.apply(GroupElement::C3, &vecs[k]);
                    let b = ops.apply(GroupElement::C3Sq, &vecs[k]);
                    (a + b) * 0.5
                })
                .collect();
            let m = DMatrix::from_fn(group.len(), group.len(), |i, j| {
                vecs[group[i]].dot(&images[j])
            });
            let m = (&m + m.transpose()) * 0.5;
            let (_, rot) = sym_eigen(&m)?;
            let old: Vec<DVector<f64>> = group.iter().map(|&k| vecs[k].clone()).collect();
            for (col, &k) in group.iter().enumerate() {
                let mut v = DVector::zeros(old[0].len());
                for (row, o) in old.iter().enumerate() {
                    v += o * rot[(row, col)];
                }
                vecs[k] = v;
            }
        }
        start = end;
    }
    Ok(vecs)
}

/// Fix the overall sign so the largest-magnitude amplitude is positive.
fn canonical_sign(v: &mut DVector<f64>) {
    let k = v.iamax();
    if v[k] < 0.0 {
        v.neg_mut();
    }
}

pub fn solve(params: &PjtParams) -> Result<VibronicSpectrum> {
    let (basis, h) = build_hamiltonian(params)?;
    let ops = SymmetryOps::new(&basis);
    let (even, odd): (Vec<usize>, Vec<usize>) =
        (0..basis.dim()).partition(|&i| basis.parity(i) > 0.0);
    let mut raw = Vec::with_capacity(basis.dim());
    for (idx, parity) in [(&even, 1.0), (&odd, -1.0)] {
        let (vals, vecs) = block_eigen(&h, idx)?;
        let vecs = split_degenerate(&vals, vecs, &ops)?;
        for (e, mut v) in vals.into_iter().zip(vecs) {
            canonical_sign(&mut v);
            let u = v.dot(&ops.apply(GroupElement::C3, &v));
            let a_weight = (1.0 + 2.0 * u) / 3.0;
            let e_weight = 1.0 - a_weight;
            let (irrep, purity) = match (parity > 0.0, a_weight >= e_weight) {
                (true, true) => (Irrep::A1, a_weight),
                (false, true) => (Irrep::A2, a_weight),
                (true, false) => (Irrep::Ex, e_weight),
                (false, false) => (Irrep::Ey, e_weight),
            };
            raw.push((e, irrep, purity, v));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let e0 = raw[0].0;
    let symmetric = params.is_symmetric();
    let mut states = Vec::with_capacity(raw.len());
    for (k, (e, irrep, purity, vector)) in raw.into_iter().enumerate() {
        if symmetric && purity < CLEAN_LABEL {
            return Err(Error::TruncationTooSmall {
                index: k,
                weight: purity,
            });
        }
        states.push(VibronicState {
            energy: e - e0,
            eigenvalue: e,
            irrep,
            purity,
            vector,
        });
    }
    if symmetric {
        align_partners(&mut states, &ops);
    }
    let phonons = phonon_functions(&ops);
    Ok(VibronicSpectrum {
        params: params.clone(),
        basis,
        states,
        phonons,
        ops,
    })
}

/// Give each Ey state the sign of P_yx applied to its degenerate Ex partner.
fn align_partners(states: &mut [VibronicState], ops: &SymmetryOps) {
    let xs: Vec<usize> = (0..states.len())
        .filter(|&k| states[k].irrep == Irrep::Ex)
        .collect();
    for k in 0..states.len() {
        if states[k].irrep != Irrep::Ey {
            continue;
        }
        let Some(&x) = xs
            .iter()
            .filter(|&&x| (states[x].eigenvalue - states[k].eigenvalue).abs() < 1e-7)
            .min_by(|&&a, &&b| {
                let da = (states[a].eigenvalue - states[k].eigenvalue).abs();
                let db = (states[b].eigenvalue - states[k].eigenvalue).abs();
                da.total_cmp(&db)
            })
        else {
            continue;
        };
        let mut partner = DVector::zeros(states[x].vector.len());
        for g in GroupElement::ALL {
            let w = g.e_matrix()[1][0] / 3.0;
            if w != 0.0 {
                partner += ops.apply(g, &states[x].vector) * w;
            }
        }
        if partner.dot(&states[k].vector) < 0.0 {
            states[k].vector.neg_mut();
        }
    }
}

/// One coefficient attached to a phonon function of shell `shell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub shell: usize,
    pub value: f64,
}

/// Coefficients in the symmetry-adapted expansion of a vibronic state.
/// For Ẽ states: c (¹E⊗χ(A1)), d (¹A1⊗χ(E)), f (¹E⊗χ(E), E-coupled) and
/// g (¹E⊗χ(A2)). For Ã1 states only c′ and d′ are populated, stored in `c`
/// and `d`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coefficients {
    pub c: Vec<Term>,
    pub d: Vec<Term>,
    pub f: Vec<Term>,
    pub g: Vec<Term>,
}

impl Coefficients {
    pub fn norm_sq(&self) -> f64 {
        [&self.c, &self.d, &self.f, &self.g]
            .iter()
            .flat_map(|v| v.iter())
            .map(|t| t.value * t.value)
            .sum()
    }
}

/// Expansion of an Ã2 state: ¹A1⊗χ(A2) (`a`) and the antisymmetric
/// ¹E⊗χ(E) combination (ExχEy − EyχEx)/√2 (`h`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct A2Coefficients {
    pub a: Vec<Term>,
    pub h: Vec<Term>,
}

/// Overlaps of a state with ¹A1, ¹Ex, ¹Ey times one phonon function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub shell: usize,
    pub irrep: Irrep,
    pub a1: f64,
    pub ex: f64,
    pub ey: f64,
}

impl VibronicSpectrum {
    pub fn ops(&self) -> &SymmetryOps {
        &self.ops
    }

    fn overlap(&self, v: &DVector<f64>, elec: usize, chi: &PhononFunction) -> f64 {
        let p = self.basis.n_phonon();
        chi.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(q, a)| a * v[elec * p + q])
            .sum()
    }

    fn partner(&self, chi: &PhononFunction, irrep: Irrep) -> &PhononFunction {
        self.phonons
            .iter()
            .find(|o| o.irrep == irrep && o.index == chi.index)
            .expect("every E phonon function has a partner")
    }

    /// ⟨elec, χ_i|ψ⟩ for every A1- and E-type phonon function.
    pub fn projections(&self, state: &VibronicState) -> Vec<Projection> {
        self.phonons
            .iter()
            .filter(|chi| chi.irrep != Irrep::A2)
            .map(|chi| Projection {
                shell: chi.shell,
                irrep: chi.irrep,
                a1: self.overlap(&state.vector, A1, chi),
                ex: self.overlap(&state.vector, EX, chi),
                ey: self.overlap(&state.vector, EY, chi),
            })
            .collect()
    }

    pub fn extract_coefficients(&self, state: &VibronicState) -> Result<Coefficients> {
        let v = &state.vector;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = Coefficients::default();
        for chi in &self.phonons {
            let t = |value: f64| Term {
                shell: chi.shell,
                value,
            };
            match (state.irrep, chi.irrep) {
                (Irrep::Ex, Irrep::A1) => out.c.push(t(self.overlap(v, EX, chi))),
                (Irrep::Ey, Irrep::A1) => out.c.push(t(self.overlap(v, EY, chi))),
                (Irrep::Ex, Irrep::A2) => out.g.push(t(-self.overlap(v, EY, chi))),
                (Irrep::Ey, Irrep::A2) => out.g.push(t(self.overlap(v, EX, chi))),
                (Irrep::Ex, Irrep::Ex) => {
                    let y = self.partner(chi, Irrep::Ey);
                    out.d.push(t(self.overlap(v, A1, chi)));
                    out.f
                        .push(t(r * (self.overlap(v, EX, chi) - self.overlap(v, EY, y))));
                }
                (Irrep::Ey, Irrep::Ex) => {
                    let y = self.partner(chi, Irrep::Ey);
                    out.d.push(t(self.overlap(v, A1, y)));
                    out.f
                        .push(t(-r * (self.overlap(v, EX, y) + self.overlap(v, EY, chi))));
                }
                (Irrep::A1, Irrep::A1) => out.c.push(t(self.overlap(v, A1, chi))),
                (Irrep::A1, Irrep::Ex) => {
                    let y = self.partner(chi, Irrep::Ey);
                    out.d
                        .push(t(r * (self.overlap(v, EX, chi) + self.overlap(v, EY, y))));
                }
                (Irrep::A2, _) => {
                    return Err(Error::IrrepMismatch(
                        "c/d/f/g coefficients are defined for Ex, Ey and A1 states; use extract_a2"
                            .into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn extract_a2(&self, state: &VibronicState) -> Result<A2Coefficients> {
        if state.irrep != Irrep::A2 {
            return Err(Error::IrrepMismatch(format!(
                "extract_a2 called on an {} state",
                state.irrep.name()
            )));
        }
        let v = &state.vector;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = A2Coefficients::default();
        for chi in &self.phonons {
            let t = |value: f64| Term {
                shell: chi.shell,
                value,
            };
            match chi.irrep {
                Irrep::A2 => out.a.push(t(self.overlap(v, A1, chi))),
                Irrep::Ex => {
                    let y = self.partner(chi, Irrep::Ey);
                    out.h
                        .push(t(r * (self.overlap(v, EX, y) - self.overlap(v, EY, chi))));
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// Rebuild the state vector from extracted coefficients.
    pub fn reconstruct(&self, state: &VibronicState) -> Result<DVector<f64>> {
        let p = self.basis.n_phonon();
        let mut v = DVector::zeros(self.basis.dim());
        let mut add = |elec: usize, chi: &PhononFunction, w: f64| {
            for (q, a) in chi.amps.iter().enumerate() {
                v[elec * p + q] += w * a;
            }
        };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let by = |irrep: Irrep| self.phonons.iter().filter(move |c| c.irrep == irrep);
        match state.irrep {
            Irrep::A2 => {
                let k = self.extract_a2(state)?;
                for (chi, t) in by(Irrep::A2).zip(&k.a) {
                    add(A1, chi, t.value);
                }
                for (chi, t) in by(Irrep::Ex).zip(&k.h) {
                    let y = self.partner(chi, Irrep::Ey);
                    add(EX, y, r * t.value);
                    add(EY, chi, -r * t.value);
                }
            }
            irrep => {
                let k = self.extract_coefficients(state)?;
                let (own, other) = if irrep == Irrep::Ey {
                    (EY, EX)
                } else {
                    (EX, EY)
                };
                for (chi, t) in by(Irrep::A1).zip(&k.c) {
                    add(if irrep == Irrep::A1 { A1 } else { own }, chi, t.value);
                }
                for (chi, t) in by(Irrep::A2).zip(&k.g) {
                    let sign = if irrep == Irrep::Ex { -1.0 } else { 1.0 };
                    add(other, chi, sign * t.value);
                }
                for (chi, t) in by(Irrep::Ex).zip(&k.d) {
                    let y = self.partner(chi, Irrep::Ey);
                    match irrep {
                        Irrep::Ex => add(A1, chi, t.value),
                        Irrep::Ey => add(A1, y, t.value),
                        _ => {
                            add(EX, chi, r * t.value);
                            add(EY, y, r * t.value);
                        }
                    }
                }
                for (chi, t) in by(Irrep::Ex).zip(&k.f) {
                    let y = self.partner(chi, Irrep::Ey);
                    if irrep == Irrep::Ex {
                        add(EX, chi, r * t.value);
                        add(EY, y, -r * t.value);
                    } else {
                        add(EX, y, -r * t.value);
                        add(EY, chi, -r * t.value);
                    }
                }
            }
        }
        Ok(v)
    }

    /// Boltzmann weights over states with ε ≤ `cutoff_kt`·k_BT.
    pub fn boltzmann_weights(&self, temperature: f64, cutoff_kt: f64) -> Result<Vec<f64>> {
        let energies: Vec<f64> = self.states.iter().map(|s| s.energy).collect();
        boltzmann_weights(&energies, temperature, cutoff_kt)
    }
}

/// Normalized weights `exp(−ε/kT)` over levels with ε ≤ `cutoff_kt`·kT.
/// At T = 0 the weight is shared among the exactly degenerate ground level.
pub fn boltzmann_weights(energies: &[f64], temperature: f64, cutoff_kt: f64) -> Result<Vec<f64>> {
    if !(temperature >= 0.0) {
        return Err(Error::Domain {
            field: "temperature",
            value: temperature,
            reason: "must be non-negative",
        });
    }
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = if temperature == 0.0 {
        energies
            .iter()
            .map(|&e| if e - e0 < 1e-9 { 1.0 } else { 0.0 })
            .collect()
    } else {
        let kt = kt_mev(temperature);
        energies
            .iter()
            .map(|&e| {
                let x = (e - e0) / kt;
                if x <= cutoff_kt {
                    (-x).exp()
                } else {
                    0.0
                }
            })
            .collect()
    };
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}
