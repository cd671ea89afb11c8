//! Covariance algebra: Gaussian entropy, Schur conditioning, the Loewner
//! order and projection onto `{0 ≼ B ≼ cap}`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a covariance matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Slack used by [`loewner_leq`].
pub const LOEWNER_TOL: f64 = 1e-9;
/// Smallest `|det G|` accepted for a channel matrix.
pub const DET_TOL: f64 = 1e-12;

/// Relative threshold below which an eigenvalue is treated as zero when a
/// pseudo-inverse is formed.
const RANK_TOL: f64 = 1e-12;

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

pub(crate) fn eigen(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(symmetrize(m))
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    eigen(m).eigenvalues.min()
}

/// Rebuilds `V f(Λ) Vᵀ` from a symmetric eigendecomposition.
pub(crate) fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = eigen(m);
    let mapped = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    symmetrize(&(&e.eigenvectors * mapped * e.eigenvectors.transpose()))
}

/// Symmetric square root and its pseudo-inverse for a PSD matrix.
pub(crate) fn sqrt_and_pinv_sqrt(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let e = eigen(m);
    let scale = e.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let cut = RANK_TOL * scale;
    let root = e.eigenvalues.map(|l| if l > cut { l.sqrt() } else { 0.0 });
    let inv_root = e
        .eigenvalues
        .map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
    let v = &e.eigenvectors;
    (
        symmetrize(&(v * DMatrix::from_diagonal(&root) * v.transpose())),
        symmetrize(&(v * DMatrix::from_diagonal(&inv_root) * v.transpose())),
    )
}

/// Moore-Penrose pseudo-inverse of a PSD matrix.
pub(crate) fn pinv_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = eigen(m);
    let scale = e.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let cut = RANK_TOL * scale;
    spectral_map(m, |l| if l > cut { 1.0 / l } else { 0.0 })
}

/// `ln det m` for a positive definite `m`; `None` when the Cholesky
/// factorization fails.
pub(crate) fn log_det_pd(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let chol = symmetrize(m).cholesky()?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        acc += d.ln();
    }
    Some(2.0 * acc)
}

pub(crate) fn inverse_pd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    symmetrize(m).cholesky().map(|c| symmetrize(&c.inverse()))
}

/// A symmetric positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovRepr", into = "CovRepr")]
pub struct CovMatrix {
    m: DMatrix<f64>,
}

/// Wire form `{"dim": d, "data": [row-major entries]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovRepr {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl CovMatrix {
    pub fn new(dim: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: row_major.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, row_major))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite covariance entry".into()));
        }
        let asym = max_asymmetry(&m);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let m = symmetrize(&m);
        let min = min_eigenvalue(&m);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix already known to be PSD up to rounding; symmetrizes it.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            entries,
        )))
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(1, &[v])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn row_major(&self) -> Vec<f64> {
        self.m.transpose().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.m)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.dim() > 0 && self.min_eigenvalue() > PSD_TOL
    }

    /// `ln det`, or `-inf` when the matrix is singular.
    pub fn log_det(&self) -> f64 {
        log_det_pd(&self.m).unwrap_or(f64::NEG_INFINITY)
    }

    /// `T self Tᵀ` for an arbitrary conforming `T`.
    pub fn congruence(&self, t: &DMatrix<f64>) -> Result<CovMatrix> {
        if t.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.ncols(),
            });
        }
        Ok(Self::from_matrix_unchecked(t * &self.m * t.transpose()))
    }

    /// Principal submatrix on `axes`, in the given order.
    pub fn select(&self, axes: &[usize]) -> Result<CovMatrix> {
        for &a in axes {
            if a >= self.dim() {
                return Err(Error::AxisOutOfRange {
                    axis: a,
                    rank: self.dim(),
                });
            }
        }
        Ok(Self {
            m: self.m.select_rows(axes).select_columns(axes),
        })
    }
}

impl TryFrom<CovRepr> for CovMatrix {
    type Error = Error;

    fn try_from(r: CovRepr) -> Result<Self> {
        CovMatrix::new(r.dim, &r.data)
    }
}

impl From<CovMatrix> for CovRepr {
    fn from(c: CovMatrix) -> Self {
        CovRepr {
            dim: c.dim(),
            data: c.row_major(),
        }
    }
}

/// Block-diagonal assembly of square blocks.
pub fn block_diagonal(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Differential entropy `½ ln((2πe)^d det c)` in nats; `-inf` when `c` is
/// singular.
pub fn gaussian_entropy(c: &CovMatrix) -> f64 {
    let d = c.dim() as f64;
    let ld = c.log_det();
    if ld == f64::NEG_INFINITY {
        return ld;
    }
    0.5 * (d * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + ld)
}

fn check_disjoint(dim: usize, keep: &[usize], given: &[usize]) -> Result<()> {
    let mut seen = vec![false; dim];
    for &a in keep.iter().chain(given) {
        if a >= dim {
            return Err(Error::AxisOutOfRange { axis: a, rank: dim });
        }
        if seen[a] {
            return Err(Error::OverlappingAxes(a));
        }
        seen[a] = true;
    }
    Ok(())
}

/// Conditional covariance `Σ_kk − Σ_kg Σ_gg⁻¹ Σ_gk`. The given block must be
/// positive definite.
pub fn schur_conditional(joint: &CovMatrix, keep: &[usize], given: &[usize]) -> Result<CovMatrix> {
    check_disjoint(joint.dim(), keep, given)?;
    let s = joint.matrix();
    let kk = s.select_rows(keep).select_columns(keep);
    if given.is_empty() {
        return Ok(CovMatrix::from_matrix_unchecked(kk));
    }
    let gg = s.select_rows(given).select_columns(given);
    if min_eigenvalue(&gg) <= PSD_TOL {
        return Err(Error::SingularConditioning);
    }
    let inv = inverse_pd(&gg).ok_or(Error::SingularConditioning)?;
    let kg = s.select_rows(keep).select_columns(given);
    Ok(CovMatrix::from_matrix_unchecked(
        &kk - &kg * inv * kg.transpose(),
    ))
}

/// Gaussian conditioning on the range of the given block (pseudo-inverse
/// Schur complement). Agrees with [`schur_conditional`] when the given
/// block is nonsingular; a degenerate given variable carries no information
/// along its null directions.
pub(crate) fn schur_conditional_range(
    joint: &CovMatrix,
    keep: &[usize],
    given: &[usize],
) -> Result<CovMatrix> {
    check_disjoint(joint.dim(), keep, given)?;
    let s = joint.matrix();
    let kk = s.select_rows(keep).select_columns(keep);
    if given.is_empty() {
        return Ok(CovMatrix::from_matrix_unchecked(kk));
    }
    let gg = s.select_rows(given).select_columns(given);
    let kg = s.select_rows(keep).select_columns(given);
    Ok(CovMatrix::from_matrix_unchecked(
        &kk - &kg * pinv_psd(&gg) * kg.transpose(),
    ))
}

/// `a ≼ b`: the smallest eigenvalue of `b − a` is at least `−1e-9`.
pub fn loewner_leq(a: &CovMatrix, b: &CovMatrix) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(min_eigenvalue(&(b.matrix() - a.matrix())) >= -LOEWNER_TOL)
}

/// Maps a symmetric matrix into `{0 ≼ B ≼ cap}`.
///
/// Negative eigenvalues are clamped to zero; the result is then whitened by
/// `cap^{-1/2}` (pseudo-inverse on a singular cap), its spectrum clamped to
/// `[0, 1]`, and mapped back. Feasible inputs are returned unchanged up to
/// rounding.
pub fn psd_project(m: &DMatrix<f64>, cap: &CovMatrix) -> Result<CovMatrix> {
    if m.nrows() != cap.dim() || m.ncols() != cap.dim() {
        return Err(Error::DimensionMismatch {
            expected: cap.dim(),
            got: m.nrows(),
        });
    }
    let plus = spectral_map(m, |l| l.max(0.0));
    let (root, inv_root) = sqrt_and_pinv_sqrt(cap.matrix());
    let w = spectral_map(&(&inv_root * plus * &inv_root), |l| l.clamp(0.0, 1.0));
    Ok(CovMatrix::from_matrix_unchecked(&root * w * &root))
}

/// Two-user Gaussian vector broadcast channel `Y = GᵀX + N`, `Z = Y + Ñ`
/// with input constraint `E[XXᵀ] ≼ K′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct GaussianBCModel {
    g: DMatrix<f64>,
    k: CovMatrix,
    k_tilde: CovMatrix,
    k_prime: CovMatrix,
}

/// Wire form of [`GaussianBCModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    /// Row-major channel matrix; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_matrix: Option<Vec<f64>>,
    pub noise1: CovMatrix,
    pub noise2: CovMatrix,
    pub input_constraint: CovMatrix,
}

pub const MODEL_SCHEMA: &str = "fbregion.gvbc-model.v1";

impl GaussianBCModel {
    pub fn new(
        g: DMatrix<f64>,
        k: CovMatrix,
        k_tilde: CovMatrix,
        k_prime: CovMatrix,
    ) -> Result<Self> {
        let d = k.dim();
        for (dim, _) in [(g.nrows(), 0), (g.ncols(), 1), (k_tilde.dim(), 2), (k_prime.dim(), 3)] {
            if dim != d {
                return Err(Error::DimensionMismatch { expected: d, got: dim });
            }
        }
        if d == 0 {
            return Err(Error::InvalidParameter("model dimension must be positive".into()));
        }
        let det = g.determinant();
        if !(det.abs() > DET_TOL) {
            return Err(Error::SingularChannel(det.abs()));
        }
        for c in [&k, &k_tilde] {
            if !c.is_positive_definite() {
                return Err(Error::NotPositiveDefinite(c.min_eigenvalue()));
            }
        }
        Ok(Self {
            g,
            k,
            k_tilde,
            k_prime,
        })
    }

    /// Model with identity channel matrix.
    pub fn identity_channel(k: CovMatrix, k_tilde: CovMatrix, k_prime: CovMatrix) -> Result<Self> {
        let d = k.dim();
        Self::new(DMatrix::identity(d, d), k, k_tilde, k_prime)
    }

    pub fn scalar(k: f64, k_tilde: f64, k_prime: f64) -> Result<Self> {
        Self::identity_channel(
            CovMatrix::scalar(k)?,
            CovMatrix::scalar(k_tilde)?,
            CovMatrix::scalar(k_prime)?,
        )
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn channel_matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn noise1(&self) -> &CovMatrix {
        &self.k
    }

    pub fn noise2(&self) -> &CovMatrix {
        &self.k_tilde
    }

    pub fn input_constraint(&self) -> &CovMatrix {
        &self.k_prime
    }

    pub fn is_identity_channel(&self) -> bool {
        self.g == DMatrix::identity(self.dim(), self.dim())
    }
}

impl TryFrom<ModelRepr> for GaussianBCModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if let Some(s) = &r.schema {
            if s != MODEL_SCHEMA {
                return Err(Error::InvalidParameter(format!("unsupported schema {s:?}")));
            }
        }
        let d = r.dim;
        let g = match r.channel_matrix {
            Some(v) if v.len() == d * d => DMatrix::from_row_slice(d, d, &v),
            Some(v) => {
                return Err(Error::DimensionMismatch {
                    expected: d * d,
                    got: v.len(),
                })
            }
            None => DMatrix::identity(d, d),
        };
        if r.noise1.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.noise1.dim(),
            });
        }
        GaussianBCModel::new(g, r.noise1, r.noise2, r.input_constraint)
    }
}

impl From<GaussianBCModel> for ModelRepr {
    fn from(m: GaussianBCModel) -> Self {
        ModelRepr {
            schema: Some(MODEL_SCHEMA.to_string()),
            dim: m.dim(),
            channel_matrix: Some(m.g.transpose().iter().copied().collect()),
            noise1: m.k,
            noise2: m.k_tilde,
            input_constraint: m.k_prime,
        }
    }
}

/// Two-letter additive Gaussian channel with linear feedback:
/// `Y1 = X1 + N1`, `X2 = A·Y1 + W`, `Y2 = X2 + N2`, with `X1 ~ N(0, P1)`,
/// `W ~ N(0, Q)` and all sources independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFeedbackSystem {
    pub input_cov: CovMatrix,
    /// Row-major `d x d` feedback gain.
    pub gain: Vec<f64>,
    pub innovation_cov: CovMatrix,
    pub noise1: CovMatrix,
    pub noise2: CovMatrix,
}

impl LinearFeedbackSystem {
    pub fn new(
        input_cov: CovMatrix,
        gain: DMatrix<f64>,
        innovation_cov: CovMatrix,
        noise1: CovMatrix,
        noise2: CovMatrix,
    ) -> Result<Self> {
        let d = input_cov.dim();
        for dim in [
            gain.nrows(),
            gain.ncols(),
            innovation_cov.dim(),
            noise1.dim(),
            noise2.dim(),
        ] {
            if dim != d {
                return Err(Error::DimensionMismatch { expected: d, got: dim });
            }
        }
        Ok(Self {
            input_cov,
            gain: gain.transpose().iter().copied().collect(),
            innovation_cov,
            noise1,
            noise2,
        })
    }

    pub fn dim(&self) -> usize {
        self.input_cov.dim()
    }

    pub fn gain_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.gain)
    }

    /// Covariance of `(X1, X2, Y1, Y2)`, each block of size `d`.
    pub fn composite_cov(&self) -> CovMatrix {
        let d = self.dim();
        let a = self.gain_matrix();
        let i = DMatrix::<f64>::identity(d, d);
        let mut t = DMatrix::zeros(4 * d, 4 * d);
        // sources ordered (X1, N1, W, N2)
        let mut put = |r: usize, c: usize, m: &DMatrix<f64>| {
            t.view_mut((r * d, c * d), (d, d)).copy_from(m);
        };
        put(0, 0, &i);
        put(1, 0, &a);
        put(1, 1, &a);
        put(1, 2, &i);
        put(2, 0, &i);
        put(2, 1, &i);
        put(3, 0, &a);
        put(3, 1, &a);
        put(3, 2, &i);
        put(3, 3, &i);
        let sources = block_diagonal(&[
            self.input_cov.matrix(),
            self.noise1.matrix(),
            self.innovation_cov.matrix(),
            self.noise2.matrix(),
        ]);
        CovMatrix::from_matrix_unchecked(&t * sources * t.transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn random_psd(d: usize, entries: &[f64], ridge: f64) -> CovMatrix {
        let m = DMatrix::from_row_slice(d, d, &entries[..d * d]);
        CovMatrix::from_matrix(&m * m.transpose() + DMatrix::identity(d, d) * ridge).unwrap()
    }

    fn random_orthogonal(d: usize, entries: &[f64]) -> DMatrix<f64> {
        let m = DMatrix::from_row_slice(d, d, &entries[..d * d]) + DMatrix::identity(d, d) * 0.1;
        m.qr().q()
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(gaussian_entropy(&CovMatrix::identity(1)), 1.418939, epsilon = 1e-6);
        assert_abs_diff_eq!(gaussian_entropy(&CovMatrix::identity(2)), 2.837877, epsilon = 1e-6);
        let a = CovMatrix::new(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let b = CovMatrix::scalar(3.0).unwrap();
        let joint = CovMatrix::from_matrix(block_diagonal(&[a.matrix(), b.matrix()])).unwrap();
        assert_abs_diff_eq!(
            gaussian_entropy(&joint),
            gaussian_entropy(&a) + gaussian_entropy(&b),
            epsilon = 1e-12
        );
        let singular = CovMatrix::new(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(gaussian_entropy(&singular), f64::NEG_INFINITY);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            CovMatrix::new(2, &[1.0, 0.5, 0.4, 1.0]),
            Err(Error::NotSymmetric(_))
        ));
        assert!(matches!(
            CovMatrix::diagonal(&[1.0, -0.1]),
            Err(Error::NotPsd(_))
        ));
        let text = serde_json::to_string(&CovMatrix::new(2, &[2.0, 1.0, 1.0, 3.0]).unwrap()).unwrap();
        assert_eq!(text, r#"{"dim":2,"data":[2.0,1.0,1.0,3.0]}"#);
    }

    #[test]
    fn schur_examples() {
        let j = CovMatrix::from_matrix(block_diagonal(&[
            &DMatrix::from_row_slice(1, 1, &[2.0]),
            &DMatrix::from_row_slice(1, 1, &[5.0]),
        ]))
        .unwrap();
        assert_abs_diff_eq!(schur_conditional(&j, &[0], &[1]).unwrap().matrix()[(0, 0)], 2.0);
        let j = CovMatrix::new(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(schur_conditional(&j, &[0], &[1]).unwrap().matrix()[(0, 0)], 0.0);
        let j = CovMatrix::new(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(
            schur_conditional(&j, &[0], &[1]).unwrap().matrix()[(0, 0)],
            1.5,
            epsilon = 1e-15
        );
        let singular_given = CovMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            schur_conditional(&singular_given, &[0], &[1]),
            Err(Error::SingularConditioning)
        ));
        let range = schur_conditional_range(&singular_given, &[0], &[1]).unwrap();
        assert_abs_diff_eq!(range.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn loewner_examples() {
        let a = CovMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let b = CovMatrix::diagonal(&[1.0, 2.0]).unwrap();
        assert!(loewner_leq(&a, &a).unwrap());
        assert!(loewner_leq(&CovMatrix::zeros(2), &a).unwrap());
        assert!(!loewner_leq(&a, &b).unwrap());
        assert!(!loewner_leq(&b, &a).unwrap());
        assert!(loewner_leq(&a, &CovMatrix::identity(3)).is_err());
    }

    #[test]
    fn projection_examples() {
        let cap = CovMatrix::identity(2);
        let p = psd_project(&DMatrix::from_diagonal(&nalgebra::dvector![-1.0, 0.5]), &cap).unwrap();
        assert_abs_diff_eq!(p.matrix()[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix()[(1, 1)], 0.5, epsilon = 1e-15);

        let cap = CovMatrix::new(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let p = psd_project(&(cap.matrix() * 2.0), &cap).unwrap();
        assert!((p.matrix() - cap.matrix()).amax() < 1e-12);

        // rank-deficient cap
        let cap = CovMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let p = psd_project(&DMatrix::identity(2, 2), &cap).unwrap();
        assert!((p.matrix() - cap.matrix()).amax() < 1e-12);
    }

    #[test]
    fn feedback_system_layout() {
        let one = CovMatrix::scalar(1.0).unwrap();
        let sys = LinearFeedbackSystem::new(
            CovMatrix::scalar(2.0).unwrap(),
            DMatrix::from_element(1, 1, 0.5),
            one.clone(),
            one.clone(),
            one,
        )
        .unwrap();
        let s = sys.composite_cov();
        // Var(Y1) = 3, Var(X2) = 0.25 * 3 + 1, Cov(X2, Y1) = 1.5
        assert_abs_diff_eq!(s.matrix()[(2, 2)], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.matrix()[(1, 1)], 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(s.matrix()[(1, 2)], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.matrix()[(3, 3)], 2.75, epsilon = 1e-15);
    }

    #[test]
    fn model_validation() {
        let i = CovMatrix::identity(2);
        assert!(matches!(
            GaussianBCModel::new(DMatrix::zeros(2, 2), i.clone(), i.clone(), i.clone()),
            Err(Error::SingularChannel(_))
        ));
        assert!(matches!(
            GaussianBCModel::identity_channel(CovMatrix::diagonal(&[1.0, 0.0]).unwrap(), i.clone(), i.clone()),
            Err(Error::NotPositiveDefinite(_))
        ));
        let m = GaussianBCModel::identity_channel(i.clone(), i.clone(), i).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: GaussianBCModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn entropy_rotation_invariant(d in 1usize..4,
                                      a in prop::collection::vec(-1.0f64..1.0, 9),
                                      u in prop::collection::vec(-1.0f64..1.0, 9)) {
            let c = random_psd(d, &a, 0.1);
            let q = random_orthogonal(d, &u);
            let rotated = c.congruence(&q).unwrap();
            prop_assert!((gaussian_entropy(&c) - gaussian_entropy(&rotated)).abs() <= 1e-10);
        }

        #[test]
        fn conditioning_reduces_log_det(a in prop::collection::vec(-1.0f64..1.0, 16)) {
            let c = random_psd(4, &a, 0.05);
            let cond = schur_conditional(&c, &[0, 1], &[2, 3]).unwrap();
            let marg = c.select(&[0, 1]).unwrap();
            prop_assert!(cond.log_det() <= marg.log_det() + 1e-10);
        }

        #[test]
        fn loewner_is_partial_order(a in prop::collection::vec(-1.0f64..1.0, 4),
                                    b in prop::collection::vec(-1.0f64..1.0, 4),
                                    c in prop::collection::vec(-1.0f64..1.0, 4)) {
            let x = random_psd(2, &a, 0.0);
            let dy = random_psd(2, &b, 0.0);
            let dz = random_psd(2, &c, 0.0);
            let y = CovMatrix::from_matrix(x.matrix() + dy.matrix()).unwrap();
            let z = CovMatrix::from_matrix(y.matrix() + dz.matrix()).unwrap();
            prop_assert!(loewner_leq(&x, &x).unwrap());
            prop_assert!(loewner_leq(&x, &y).unwrap() && loewner_leq(&y, &z).unwrap());
            prop_assert!(loewner_leq(&x, &z).unwrap());
            if loewner_leq(&y, &x).unwrap() {
                prop_assert!((x.matrix() - y.matrix()).amax() <= 1e-8);
            }
        }

        #[test]
        fn projection_is_feasible_and_idempotent(a in prop::collection::vec(-2.0f64..2.0, 9),
                                                 c in prop::collection::vec(-1.0f64..1.0, 9)) {
            let cap = random_psd(3, &c, 0.01);
            let m = symmetrize(&DMatrix::from_row_slice(3, 3, &a));
            let p = psd_project(&m, &cap).unwrap();
            prop_assert!(loewner_leq(&CovMatrix::zeros(3), &p).unwrap());
            prop_assert!(loewner_leq(&p, &cap).unwrap());
            let again = psd_project(p.matrix(), &cap).unwrap();
            prop_assert!((again.matrix() - p.matrix()).amax() <= 1e-9);
        }
    }
}
