//! Linear time-invariant plants.

use nalgebra::{Complex, DMatrix};
use num::complex::Complex64;
use num::{BigRational, Signed, Zero};

use super::exact::{decimal, QMat};
use super::EstimationError;

/// Residual tolerance for eigenvalue checks, relative to `max(1, ‖A‖)`.
const EIGEN_TOL: f64 = 1e-8;

/// One real-Jordan block of `A`, occupying `size` consecutive coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum JordanBlock {
    /// `λI + N` with ones on the superdiagonal.
    Real { lambda: f64, size: usize },
    /// `[[a, -b], [b, a]]`, eigenvalues `a ± bi`.
    Rotation { re: f64, im: f64 },
}

impl JordanBlock {
    pub fn size(&self) -> usize {
        match self {
            JordanBlock::Real { size, .. } => *size,
            JordanBlock::Rotation { .. } => 2,
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            JordanBlock::Real { lambda, .. } => lambda.abs(),
            JordanBlock::Rotation { re, im } => re.hypot(*im),
        }
    }
}

/// `X(t+1) = A X(t) + V(t)`, `Y(t) = G X(t) + W(t)`, with `‖X(0)‖∞ ≤ l` and
/// `‖V(t)‖∞, ‖W(t)‖∞ ≤ c`.
///
/// Float entries are read as the decimals they print as, so `0.95` is
/// exactly `19/20` in all exact computations.
#[derive(Debug, Clone)]
pub struct PlantModel {
    a: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    eigenvalues: Vec<Complex64>,
    blocks: Option<Vec<usize>>,
    l: f64,
    c: f64,
}

fn shape_ok(m: &[Vec<f64>], rows: Option<usize>, cols: usize) -> bool {
    rows.is_none_or(|r| m.len() == r) && m.iter().all(|row| row.len() == cols && row.iter().all(|x| x.is_finite()))
}

fn is_upper_triangular(a: &[Vec<f64>]) -> bool {
    a.iter().enumerate().all(|(i, row)| row[..i].iter().all(|x| *x == 0.0))
}

fn is_lower_triangular(a: &[Vec<f64>]) -> bool {
    a.iter().enumerate().all(|(i, row)| row[i + 1..].iter().all(|x| *x == 0.0))
}

fn to_dmatrix(a: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), a.first().map_or(0, |r| r.len()), |i, j| a[i][j])
}

fn smallest_singular_value(a: &DMatrix<f64>, lambda: Complex64) -> f64 {
    let n = a.nrows();
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let base = Complex::new(a[(i, j)], 0.0);
        if i == j {
            base - Complex::new(lambda.re, lambda.im)
        } else {
            base
        }
    });
    shifted.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

impl PlantModel {
    /// Validates shapes, radii, eigenvalues and observability of `(G, A)`.
    ///
    /// `blocks` lists real-Jordan block sizes along the diagonal of `A`;
    /// without it the coder requires `A` diagonal. Missing eigenvalues are
    /// read off a triangular or block-structured `A`, else computed
    /// numerically.
    pub fn new(
        a: Vec<Vec<f64>>,
        g: Vec<Vec<f64>>,
        eigenvalues: Option<Vec<Complex64>>,
        blocks: Option<Vec<usize>>,
        l: f64,
        c: f64,
    ) -> Result<Self, EstimationError> {
        let n = a.len();
        if n == 0 || !shape_ok(&a, Some(n), n) {
            return Err(EstimationError::Shape("A must be a nonempty square matrix of finite numbers".into()));
        }
        if g.is_empty() || !shape_ok(&g, None, n) {
            return Err(EstimationError::Shape(format!("G must have {n} finite columns per row")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(EstimationError::InvalidRadius(l));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(EstimationError::InvalidNoiseBound(c));
        }
        if let Some(sizes) = &blocks {
            if sizes.contains(&0) || sizes.iter().sum::<usize>() != n {
                return Err(EstimationError::UnsupportedStructure(format!(
                    "block sizes {sizes:?} do not partition dimension {n}"
                )));
            }
        }
        let mut plant = PlantModel { a, g, eigenvalues: Vec::new(), blocks, l, c };
        plant.eigenvalues = match eigenvalues {
            Some(eigs) => {
                plant.check_eigenvalues(&eigs)?;
                eigs
            }
            None => plant.derive_eigenvalues()?,
        };
        let rank = plant.observability_matrix().rank();
        if rank < n {
            return Err(EstimationError::Unobservable { rank, n });
        }
        Ok(plant)
    }

    /// `X(t+1) = λX(t)`, `Y = X`.
    pub fn scalar(lambda: f64, l: f64, c: f64) -> Result<Self, EstimationError> {
        PlantModel::new(vec![vec![lambda]], vec![vec![1.0]], None, None, l, c)
    }

    /// Diagonal `A` with full-state measurement.
    pub fn diagonal(lambdas: &[f64], l: f64, c: f64) -> Result<Self, EstimationError> {
        let n = lambdas.len();
        let a = (0..n).map(|i| (0..n).map(|j| if i == j { lambdas[i] } else { 0.0 }).collect()).collect();
        let g = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        PlantModel::new(a, g, None, None, l, c)
    }

    /// The same plant with a different noise bound.
    pub fn with_noise(&self, c: f64) -> Result<Self, EstimationError> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(EstimationError::InvalidNoiseBound(c));
        }
        Ok(PlantModel { c, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn outputs(&self) -> usize {
        self.g.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn g(&self) -> &[Vec<f64>] {
        &self.g
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn block_sizes(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn a_exact(&self) -> QMat {
        QMat::from_f64(&self.a)
    }

    pub fn g_exact(&self) -> QMat {
        QMat::from_f64(&self.g)
    }

    pub fn l_exact(&self) -> BigRational {
        decimal(self.l)
    }

    pub fn c_exact(&self) -> BigRational {
        decimal(self.c)
    }

    /// `[G; GA; …; GA^{n−1}]` over exact rationals.
    pub fn observability_matrix(&self) -> QMat {
        let a = self.a_exact();
        let mut block = self.g_exact();
        let mut parts = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            let next = block.mul(&a);
            parts.push(block);
            block = next;
        }
        QMat::vstack(&parts)
    }

    fn a_norm_scale(&self) -> f64 {
        let norm = self.a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        norm.max(1.0)
    }

    fn check_eigenvalues(&self, eigs: &[Complex64]) -> Result<(), EstimationError> {
        if eigs.len() != self.dim() {
            return Err(EstimationError::EigenvalueMismatch(format!(
                "{} eigenvalues supplied for a {}-dimensional plant",
                eigs.len(),
                self.dim()
            )));
        }
        let a = to_dmatrix(&self.a);
        let tol = EIGEN_TOL * self.a_norm_scale();
        for z in eigs {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(EstimationError::EigenvalueMismatch(format!("non-finite eigenvalue {z}")));
            }
            let s = smallest_singular_value(&a, *z);
            if s > tol {
                return Err(EstimationError::EigenvalueMismatch(format!(
                    "{z} is not an eigenvalue of A (smallest singular value of A - zI is {s:e})"
                )));
            }
        }
        Ok(())
    }

    fn derive_eigenvalues(&self) -> Result<Vec<Complex64>, EstimationError> {
        if is_upper_triangular(&self.a) || is_lower_triangular(&self.a) {
            return Ok((0..self.dim()).map(|i| Complex64::new(self.a[i][i], 0.0)).collect());
        }
        if self.blocks.is_some() {
            let blocks = self.jordan_blocks()?;
            let mut eigs = Vec::with_capacity(self.dim());
            for b in blocks {
                match b {
                    JordanBlock::Real { lambda, size } => eigs.extend(std::iter::repeat_n(Complex64::new(lambda, 0.0), size)),
                    JordanBlock::Rotation { re, im } => {
                        eigs.push(Complex64::new(re, im));
                        eigs.push(Complex64::new(re, -im));
                    }
                }
            }
            return Ok(eigs);
        }
        let computed: Vec<Complex64> =
            to_dmatrix(&self.a).complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect();
        self.check_eigenvalues(&computed)?;
        Ok(computed)
    }

    /// The real-Jordan blocks of `A`: the declared block structure, or
    /// `1×1` blocks when `A` is diagonal.
    pub fn jordan_blocks(&self) -> Result<Vec<JordanBlock>, EstimationError> {
        let n = self.dim();
        let sizes = self.blocks.clone().unwrap_or_else(|| vec![1; n]);
        let mut owner = vec![0; n];
        let mut start = 0;
        for (b, &s) in sizes.iter().enumerate() {
            owner[start..start + s].fill(b);
            start += s;
        }
        for i in 0..n {
            for j in 0..n {
                if owner[i] != owner[j] && self.a[i][j] != 0.0 {
                    return Err(EstimationError::UnsupportedStructure(format!(
                        "A[{i}][{j}] = {} lies outside the declared diagonal blocks",
                        self.a[i][j]
                    )));
                }
            }
        }
        let mut out = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in &sizes {
            let at = |i: usize, j: usize| self.a[start + i][start + j];
            let rotation = s == 2 && at(0, 0) == at(1, 1) && at(0, 1) == -at(1, 0) && at(1, 0) != 0.0;
            if rotation {
                out.push(JordanBlock::Rotation { re: at(0, 0), im: at(1, 0) });
            } else {
                let lambda = at(0, 0);
                for i in 0..s {
                    for j in 0..s {
                        let want = if i == j {
                            lambda
                        } else if j == i + 1 {
                            1.0
                        } else {
                            0.0
                        };
                        if at(i, j) != want {
                            return Err(EstimationError::UnsupportedStructure(format!(
                                "block at {start} of size {s} is neither λI+N nor a 2×2 rotation"
                            )));
                        }
                    }
                }
                out.push(JordanBlock::Real { lambda, size: s });
            }
            start += s;
        }
        Ok(out)
    }

    /// Per-coordinate eigenvalue moduli along the Jordan structure.
    pub fn axis_moduli(&self) -> Result<Vec<f64>, EstimationError> {
        Ok(self.jordan_blocks()?.iter().flat_map(|b| std::iter::repeat_n(b.modulus(), b.size())).collect())
    }

    /// Checks `‖x0‖∞ ≤ l` exactly.
    pub fn check_initial(&self, x0: &[BigRational]) -> Result<(), EstimationError> {
        if x0.len() != self.dim() {
            return Err(EstimationError::Shape(format!("x0 has {} entries, plant has {}", x0.len(), self.dim())));
        }
        let l = self.l_exact();
        let norm = x0.iter().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        if norm > l {
            return Err(EstimationError::OutsideBall { norm: super::exact::to_f64(&norm), l: self.l });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_plant() {
        let p = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        assert_eq!(p.eigenvalues(), &[Complex64::new(2.0, 0.0)]);
        assert_eq!(p.spectral_radius(), 2.0);
        assert_eq!(p.axis_moduli().unwrap(), vec![2.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(PlantModel::scalar(2.0, 0.0, 0.0), Err(EstimationError::InvalidRadius(_))));
        assert!(matches!(PlantModel::scalar(2.0, 1.0, -1.0), Err(EstimationError::InvalidNoiseBound(_))));
        let unobservable = PlantModel::new(vec![vec![2.0, 0.0], vec![0.0, 3.0]], vec![vec![1.0, 0.0]], None, None, 1.0, 0.0);
        assert!(matches!(unobservable, Err(EstimationError::Unobservable { rank: 1, n: 2 })));
        let wrong = PlantModel::new(vec![vec![2.0]], vec![vec![1.0]], Some(vec![Complex64::new(3.0, 0.0)]), None, 1.0, 0.0);
        assert!(matches!(wrong, Err(EstimationError::EigenvalueMismatch(_))));
    }

    #[test]
    fn single_output_observes_distinct_modes() {
        let p = PlantModel::new(vec![vec![2.0, 0.0], vec![0.0, 3.0]], vec![vec![1.0, 1.0]], None, None, 1.0, 0.0).unwrap();
        assert_eq!(p.observability_matrix().rank(), 2);
    }

    #[test]
    fn rotation_block() {
        let a = vec![vec![0.9, -1.2], vec![1.2, 0.9]];
        let p = PlantModel::new(a, vec![vec![1.0, 0.0]], None, Some(vec![2]), 1.0, 0.0).unwrap();
        assert_eq!(p.jordan_blocks().unwrap(), vec![JordanBlock::Rotation { re: 0.9, im: 1.2 }]);
        assert!((p.spectral_radius() - 1.5).abs() < 1e-12);
        assert!(p.eigenvalues().iter().any(|z| z.im < 0.0));
    }

    #[test]
    fn general_matrix_gets_numeric_eigenvalues() {
        let a = vec![vec![1.0, 2.0], vec![3.0, 0.0]];
        let p = PlantModel::new(a, vec![vec![1.0, 0.0]], None, None, 1.0, 0.0).unwrap();
        let mut moduli: Vec<f64> = p.eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!((moduli[0] - 2.0).abs() < 1e-9 && (moduli[1] - 3.0).abs() < 1e-9);
        assert!(matches!(p.jordan_blocks(), Err(EstimationError::UnsupportedStructure(_))));
    }

    #[test]
    fn jordan_block_structure() {
        let a = vec![vec![2.0, 1.0], vec![0.0, 2.0]];
        let p = PlantModel::new(a, vec![vec![1.0, 0.0]], None, Some(vec![2]), 1.0, 0.0).unwrap();
        assert_eq!(p.jordan_blocks().unwrap(), vec![JordanBlock::Real { lambda: 2.0, size: 2 }]);
        let bad = PlantModel::new(vec![vec![2.0, 5.0], vec![0.0, 2.0]], vec![vec![1.0, 0.0]], None, Some(vec![2]), 1.0, 0.0)
            .unwrap();
        assert!(bad.jordan_blocks().is_err());
    }

    #[test]
    fn initial_state_ball() {
        let p = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        assert!(p.check_initial(&[decimal(1.0)]).is_ok());
        assert!(matches!(p.check_initial(&[decimal(-1.01)]), Err(EstimationError::OutsideBall { .. })));
    }
}
