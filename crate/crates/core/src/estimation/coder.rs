//! The down-sampled box-quantizer coder-estimator.
//!
//! Time is split into epochs of `τ` steps. In scaled coordinates
//! `X'(t) = ρ^{−t}X(t)` the decoder keeps a box known to contain
//! `X'(kτ)`. At the start of epoch `k` the encoder reconstructs the state
//! from the last `n` outputs, quantizes the (inflated) box into `∏kᵢ`
//! uniform cells and sends the cell index as one zero-error codeword, one
//! symbol per step. When the codeword has arrived the decoder moves the
//! box to the image of that cell under `(A/ρ)^τ`.

use nalgebra::DMatrix;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use super::exact::{decimal, to_f64, QMat};
use super::exponent::{unstable_exponent, RATE_TOL};
use super::plant::PlantModel;
use super::EstimationError;
use crate::capacity::{max_codebook, Codebook};
use crate::channel::Channel;
use crate::graph::SearchOptions;
use crate::measures::Bits;

/// An uncertainty box: `|x − center| ≤ half` componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyBox {
    pub center: Vec<BigRational>,
    pub half: Vec<BigRational>,
}

impl UncertaintyBox {
    pub fn contains(&self, x: &[BigRational]) -> bool {
        x.iter().zip(&self.center).zip(&self.half).all(|((x, c), h)| (x - c).abs() <= *h)
    }

    pub fn max_half(&self) -> BigRational {
        self.half.iter().cloned().max().unwrap_or_else(BigRational::zero)
    }
}

#[derive(Debug, Clone)]
pub struct CoderEstimator {
    tau: usize,
    rho: f64,
    codebook: Codebook,
    cells: Vec<usize>,
    noise_bound: f64,
    n: usize,
    p: usize,
    rho_q: BigRational,
    l: BigRational,
    a: QMat,
    g: QMat,
    /// `(A/ρ)^τ`.
    m: QMat,
    m_abs: QMat,
    /// Maps the stacked outputs `Y(t−n+1..t)` to `X(t)`.
    recon: QMat,
    /// Componentwise reconstruction error bound.
    e_rec: Vec<BigRational>,
    /// Process noise accumulated over `r` steps, for `r = 0..=τ`.
    b_r: Vec<Vec<BigRational>>,
    contraction: f64,
}

fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].abs();
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn product(cells: &[usize]) -> Option<usize> {
    cells.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k))
}

fn ones(n: usize) -> Vec<BigRational> {
    vec![BigRational::one(); n]
}

fn divide_cells(m_abs: &QMat, cells: &[usize]) -> DMatrix<f64> {
    let mut p = m_abs.to_f64();
    for (j, &k) in cells.iter().enumerate() {
        for i in 0..p.nrows() {
            p[(i, j)] /= k as f64;
        }
    }
    p
}

/// Builds the coder for the smallest `τ ≤ τ_max` whose maximum codebook
/// satisfies `log2|F| > τ·H_ρ`, with cells allocated so that the box map
/// contracts.
pub fn build_coder_estimator(
    plant: &PlantModel,
    channel: &Channel,
    rho: f64,
    tau_max: usize,
    opts: SearchOptions,
) -> Result<CoderEstimator, EstimationError> {
    let h = unstable_exponent(plant.eigenvalues(), rho)?;
    check_rho(plant, rho)?;
    let moduli = plant.axis_moduli()?;
    for tau in 1..=tau_max {
        let codebook = max_codebook(channel, tau, opts)?;
        let size = codebook.len();
        if Bits::from_count(size).0 - tau as f64 * h.0 <= RATE_TOL {
            continue;
        }
        let m_abs = scaled_power(plant, rho, tau).abs();
        if let Some(cells) = allocate_cells(&moduli, rho, tau, size, &m_abs) {
            return CoderEstimator::assemble(plant, rho, codebook, cells);
        }
    }
    Err(EstimationError::Infeasible { tau_max, h_rho: h.0 })
}

fn check_rho(plant: &PlantModel, rho: f64) -> Result<(), EstimationError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(EstimationError::InvalidRho(rho));
    }
    let radius = plant.spectral_radius();
    if (rho - radius).abs() <= RATE_TOL * radius.max(1.0) {
        return Err(EstimationError::RhoAtSpectralRadius(rho));
    }
    if plant.c() > 0.0 && rho != 1.0 {
        return Err(EstimationError::NoiseRequiresUnitRho(rho));
    }
    Ok(())
}

fn scaled_power(plant: &PlantModel, rho: f64, tau: usize) -> QMat {
    let inv = decimal(rho).recip();
    plant.a_exact().scale(&inv).pow(tau)
}

/// `kᵢ = ⌊|λᵢ/ρ|^τ⌋ + 1`, then extra cells until the box map contracts,
/// then any spare codewords go to the axis with the largest `|λᵢ/ρ|^τ/kᵢ`.
fn allocate_cells(moduli: &[f64], rho: f64, tau: usize, budget: usize, m_abs: &QMat) -> Option<Vec<usize>> {
    let growth: Vec<f64> = moduli.iter().map(|m| (m / rho).powi(tau as i32)).collect();
    let mut cells: Vec<usize> = growth.iter().map(|g| g.floor() as usize + 1).collect();
    if product(&cells)? > budget {
        return None;
    }
    loop {
        let p = divide_cells(m_abs, &cells);
        if spectral_radius(&p) < 1.0 - RATE_TOL {
            break;
        }
        let axis = (0..cells.len())
            .max_by(|&i, &j| p.row(i).sum().total_cmp(&p.row(j).sum()).then(j.cmp(&i)))
            .expect("nonempty");
        cells[axis] += 1;
        if product(&cells)? > budget {
            return None;
        }
    }
    loop {
        let best = (0..cells.len())
            .filter(|&i| growth[i] >= 1.0)
            .filter(|&i| {
                let mut trial = cells.clone();
                trial[i] += 1;
                product(&trial).is_some_and(|p| p <= budget)
            })
            .max_by(|&i, &j| (growth[i] / cells[i] as f64).total_cmp(&(growth[j] / cells[j] as f64)).then(j.cmp(&i)));
        match best {
            Some(i) => cells[i] += 1,
            None => break,
        }
    }
    Some(cells)
}

impl CoderEstimator {
    /// A coder with caller-chosen block length and cell counts, using the
    /// first `∏kᵢ` words of the maximum codebook. No rate or contraction
    /// condition is imposed, so this can build deliberately undersized
    /// coders.
    pub fn with_cells(
        plant: &PlantModel,
        channel: &Channel,
        rho: f64,
        tau: usize,
        cells: Vec<usize>,
        opts: SearchOptions,
    ) -> Result<CoderEstimator, EstimationError> {
        check_rho(plant, rho)?;
        plant.jordan_blocks()?;
        if tau == 0 {
            return Err(EstimationError::InvalidTau);
        }
        if cells.len() != plant.dim() || cells.contains(&0) {
            return Err(EstimationError::Shape(format!("need {} positive cell counts", plant.dim())));
        }
        let codebook = max_codebook(channel, tau, opts)?;
        let needed = product(&cells).unwrap_or(usize::MAX);
        if needed > codebook.len() {
            return Err(EstimationError::CodebookTooSmall { needed, available: codebook.len() });
        }
        CoderEstimator::assemble(plant, rho, codebook, cells)
    }

    fn assemble(plant: &PlantModel, rho: f64, codebook: Codebook, cells: Vec<usize>) -> Result<Self, EstimationError> {
        let tau = codebook.tau;
        let n = plant.dim();
        let p = plant.outputs();
        let a = plant.a_exact();
        let g = plant.g_exact();
        let c = plant.c_exact();
        let m = scaled_power(plant, rho, tau);
        let m_abs = m.abs();

        let obs = plant.observability_matrix();
        let obs_t = obs.transpose();
        let gram_inv = obs_t
            .mul(&obs)
            .inverse()
            .ok_or_else(|| EstimationError::Internal("observability Gram matrix is singular".into()))?;
        let recon = a.pow(n - 1).mul(&gram_inv).mul(&obs_t);

        // Reconstruction error as a linear map of the window's noise
        // V(s..s+n−2) and W(s..s+n−1), s = t−n+1.
        let mut blocks = Vec::with_capacity(n);
        for i in 0..n.saturating_sub(1) {
            let mut phi = QMat::zeros(n * p, n);
            for j in (i + 1)..n {
                let gij = g.mul(&a.pow(j - 1 - i));
                for r in 0..p {
                    for col in 0..n {
                        phi.set(j * p + r, col, gij.get(r, col).clone());
                    }
                }
            }
            let direct = a.pow(n - 2 - i).scale(&-BigRational::one());
            blocks.push(recon.mul(&phi).add(&direct));
        }
        blocks.push(recon.clone());
        let e_rec: Vec<BigRational> = QMat::hstack(&blocks).row_abs_sums().into_iter().map(|s| s * &c).collect();

        let mut b_r = vec![vec![BigRational::zero(); n]];
        for r in 1..=tau {
            let prev = &b_r[r - 1];
            let step = a.pow(r - 1).abs().mul_vec(&ones(n));
            b_r.push(prev.iter().zip(step).map(|(x, s)| x + s * &c).collect());
        }
        let contraction = spectral_radius(&divide_cells(&m_abs, &cells));

        Ok(CoderEstimator {
            tau,
            rho,
            codebook,
            cells,
            noise_bound: plant.c(),
            n,
            p,
            rho_q: decimal(rho),
            l: plant.l_exact(),
            a,
            g,
            m,
            m_abs,
            recon,
            e_rec,
            b_r,
            contraction,
        })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_exact(&self) -> &BigRational {
        &self.rho_q
    }

    /// The full maximum codebook `F`.
    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// `log2|F|`.
    pub fn rate_bits(&self) -> Bits {
        Bits::from_count(self.codebook.len())
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Number of codewords in use, `∏kᵢ`.
    pub fn words_used(&self) -> usize {
        product(&self.cells).expect("checked at construction")
    }

    pub fn noise_bound(&self) -> f64 {
        self.noise_bound
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn outputs(&self) -> usize {
        self.p
    }

    pub(crate) fn a(&self) -> &QMat {
        &self.a
    }

    pub(crate) fn g(&self) -> &QMat {
        &self.g
    }

    pub(crate) fn recon(&self) -> &QMat {
        &self.recon
    }

    /// Spectral radius of the box map `h ↦ |(A/ρ)^τ| diag(1/k) h`.
    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    pub fn reconstruction_error(&self) -> &[BigRational] {
        &self.e_rec
    }

    /// Whether epoch `k` carries information: the encoder needs `n` outputs.
    pub fn is_informative(&self, epoch: usize) -> bool {
        epoch * self.tau + 1 >= self.n
    }

    pub fn initial_box(&self) -> UncertaintyBox {
        UncertaintyBox { center: vec![BigRational::zero(); self.n], half: vec![self.l.clone(); self.n] }
    }

    /// Cell indices of `x` (a reconstructed scaled state) in the inflated box.
    pub fn quantize(&self, live: &UncertaintyBox, x: &[BigRational]) -> Vec<usize> {
        (0..self.n)
            .map(|i| {
                let h = &live.half[i] + &self.e_rec[i];
                let k = self.cells[i];
                if h.is_zero() || k == 1 {
                    return 0;
                }
                let lo = &live.center[i] - &h;
                let width = &h * BigRational::from_integer(BigInt::from(2)) / BigRational::from_integer(k.into());
                let idx = ((&x[i] - lo) / width).floor().to_integer();
                idx.clamp(BigInt::zero(), BigInt::from(k - 1)).to_usize().expect("small index")
            })
            .collect()
    }

    /// The box around cell `idx`, widened by the reconstruction error.
    pub fn cell_box(&self, live: &UncertaintyBox, idx: &[usize]) -> UncertaintyBox {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut center = Vec::with_capacity(self.n);
        let mut half = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let h = &live.half[i] + &self.e_rec[i];
            let k = BigRational::from_integer(self.cells[i].into());
            let width = &h * &two / &k;
            let lo = &live.center[i] - &h;
            let mid = BigRational::from_integer(BigInt::from(2 * idx[i] + 1)) / &two;
            center.push(lo + &width * mid);
            half.push(&width / &two + &self.e_rec[i]);
        }
        UncertaintyBox { center, half }
    }

    /// Propagates a box containing `X'(kτ)` to one containing `X'((k+1)τ)`.
    pub fn propagate(&self, b: &UncertaintyBox) -> UncertaintyBox {
        let center = self.m.mul_vec(&b.center);
        let half = self.m_abs.mul_vec(&b.half).into_iter().zip(&self.b_r[self.tau]).map(|(x, v)| x + v).collect();
        UncertaintyBox { center, half }
    }

    /// The box for epoch `k+1` given the box for epoch `k` and, in an
    /// informative epoch, the decoded cell.
    pub fn next_box(&self, live: &UncertaintyBox, cell: Option<&[usize]>) -> UncertaintyBox {
        match cell {
            Some(idx) => self.propagate(&self.cell_box(live, idx)),
            None => self.propagate(live),
        }
    }

    /// Mixed-radix cell number, the index into the codebook.
    pub fn cell_number(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.cells).rev().fold(0, |acc, (&i, &k)| acc * k + i)
    }

    pub fn cell_indices(&self, mut number: usize) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&k| {
                let (q, r) = number.div_rem(&k);
                number = q;
                r
            })
            .collect()
    }

    /// Half-widths of the live boxes for epochs `0..epochs`. They do not
    /// depend on the state, so this is the exact worst case over the ball.
    pub fn box_schedule(&self, epochs: usize) -> Vec<Vec<BigRational>> {
        let mut live = self.initial_box();
        let mut out = Vec::with_capacity(epochs);
        for k in 0..epochs {
            out.push(live.half.clone());
            let cell = self.is_informative(k).then(|| vec![0; self.n]);
            live = self.next_box(&live, cell.as_deref());
        }
        out
    }

    /// Componentwise bound on the scaled error `ρ^{−t}|E(t)|` at offset `r`
    /// into an epoch whose live box has half-widths `half`.
    pub fn offset_bound(&self, half: &[BigRational], r: usize) -> Vec<BigRational> {
        let inv = self.rho_q.recip();
        let mr = self.a.scale(&inv).pow(r).abs();
        mr.mul_vec(half).into_iter().zip(&self.b_r[r]).map(|(x, v)| x + v).collect()
    }

    /// `sup ρ^{−t}‖E(t)‖∞` over the initial ball, all channel behaviours
    /// and all admissible noise, for `t = 0..=t_end`.
    pub fn error_envelope(&self, t_end: usize) -> Vec<BigRational> {
        let schedule = self.box_schedule(t_end / self.tau + 1);
        (0..=t_end)
            .map(|t| {
                let b = self.offset_bound(&schedule[t / self.tau], t % self.tau);
                b.into_iter().max().unwrap_or_else(BigRational::zero)
            })
            .collect()
    }

    /// Fixed point of the informative box recursion, if it contracts.
    pub fn box_fixed_point(&self) -> Option<Vec<BigRational>> {
        if self.contraction >= 1.0 {
            return None;
        }
        // h ↦ |M|((h+e)/k + e) + b_τ  =  P h + q
        let n = self.n;
        let mut p = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p.set(i, j, self.m_abs.get(i, j) / BigRational::from_integer(self.cells[j].into()));
            }
        }
        let shifted: Vec<BigRational> = (0..n)
            .map(|i| &self.e_rec[i] / BigRational::from_integer(self.cells[i].into()) + &self.e_rec[i])
            .collect();
        let q: Vec<BigRational> =
            self.m_abs.mul_vec(&shifted).into_iter().zip(&self.b_r[self.tau]).map(|(x, v)| x + v).collect();
        let system = QMat::identity(n).add(&p.scale(&-BigRational::one()));
        Some(system.inverse()?.mul_vec(&q))
    }

    /// `max_r ‖|(A/ρ)^r| h* + b_r‖∞` at the box fixed point `h*`: the
    /// asymptotic error bound.
    pub fn fixed_point_error_bound(&self) -> Option<f64> {
        let h = self.box_fixed_point()?;
        (0..self.tau).map(|r| to_f64(&self.offset_bound(&h, r).into_iter().max().expect("n ≥ 1"))).reduce(f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pentagon_coder() {
        let plant = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        let coder = build_coder_estimator(&plant, &Channel::pentagon(), 0.95, 4, SearchOptions::default()).unwrap();
        assert_eq!(coder.tau(), 2);
        assert_eq!(coder.codebook().len(), 5);
        assert_eq!(coder.cells(), &[5]);
        assert!((coder.contraction() - (2.0f64 / 0.95).powi(2) / 5.0).abs() < 1e-12);
        let schedule = coder.box_schedule(3);
        assert_eq!(schedule[0], vec![q(1, 1)]);
        assert_eq!(schedule[1], vec![q(1600, 1805)]);
    }

    #[test]
    fn binary_coder() {
        let plant = PlantModel::scalar(1.5, 1.0, 0.0).unwrap();
        let coder = build_coder_estimator(&plant, &Channel::noiseless(2), 1.0, 4, SearchOptions::default()).unwrap();
        assert_eq!((coder.tau(), coder.codebook().len(), coder.cells()), (1, 2, &[2usize][..]));
        let env = coder.error_envelope(4);
        assert_eq!(env, (0..5).map(|t| q(3i64.pow(t), 4i64.pow(t))).collect::<Vec<_>>());
    }

    #[test]
    fn zero_capacity_channel_is_infeasible() {
        let plant = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        let bsc = Channel::complete_confusion(2);
        let err = build_coder_estimator(&plant, &bsc, 1.0, 3, SearchOptions::default()).unwrap_err();
        assert!(matches!(err, EstimationError::Infeasible { tau_max: 3, .. }));
    }

    #[test]
    fn rejects_structure_and_rho() {
        let general = PlantModel::new(vec![vec![1.0, 2.0], vec![3.0, 0.0]], vec![vec![1.0, 0.0]], None, None, 1.0, 0.0).unwrap();
        let err = build_coder_estimator(&general, &Channel::noiseless(4), 1.0, 2, SearchOptions::default()).unwrap_err();
        assert!(matches!(err, EstimationError::UnsupportedStructure(_)));
        let plant = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        let err = build_coder_estimator(&plant, &Channel::noiseless(4), 2.0, 2, SearchOptions::default()).unwrap_err();
        assert!(matches!(err, EstimationError::RhoAtSpectralRadius(_)));
        let noisy = PlantModel::scalar(2.0, 1.0, 0.1).unwrap();
        let err = build_coder_estimator(&noisy, &Channel::noiseless(4), 0.9, 2, SearchOptions::default()).unwrap_err();
        assert!(matches!(err, EstimationError::NoiseRequiresUnitRho(_)));
    }

    #[test]
    fn mixed_radix_round_trip() {
        let plant = PlantModel::diagonal(&[2.0, 1.5], 1.0, 0.0).unwrap();
        let coder = build_coder_estimator(&plant, &Channel::noiseless(8), 1.0, 2, SearchOptions::default()).unwrap();
        assert_eq!(coder.tau(), 1);
        assert_eq!(coder.cells(), &[4, 2]);
        for m in 0..coder.words_used() {
            assert_eq!(coder.cell_number(&coder.cell_indices(m)), m);
        }
    }

    #[test]
    fn jordan_block_needs_extra_cells() {
        let a = vec![vec![1.5, 1.0], vec![0.0, 1.5]];
        let g = vec![vec![1.0, 0.0]];
        let plant = PlantModel::new(a, g, None, Some(vec![2]), 1.0, 0.0).unwrap();
        let coder = build_coder_estimator(&plant, &Channel::noiseless(16), 1.0, 3, SearchOptions::default()).unwrap();
        assert!(coder.contraction() < 1.0);
        assert!(coder.words_used() <= coder.codebook().len());
        assert!(!coder.is_informative(0));
    }

    #[test]
    fn noisy_fixed_point() {
        let plant = PlantModel::scalar(2.0, 1.0, 0.01).unwrap();
        let coder = build_coder_estimator(&plant, &Channel::pentagon(), 1.0, 4, SearchOptions::default()).unwrap();
        assert_eq!(coder.tau(), 2);
        assert_eq!(coder.reconstruction_error(), &[q(1, 100)]);
        // h = (4/5)(h + e) + 4e + 3c with e = c = 1/100
        let h = coder.box_fixed_point().unwrap();
        assert_eq!(h, vec![q(39, 100)]);
    }
}
