//! C ABI over the `fbregion` library.
//!
//! Every entry point returns an [`FbrStatus`]. Objects cross the boundary
//! as opaque handles that the caller releases with the matching `_free`
//! function. A failing call stores a message readable through
//! [`fbr_last_error`] on the calling thread. Panics are caught and reported
//! as [`FbrStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fbregion::dm::{bsc_closed_form, is_degraded, rpdbc_region, superposition_region, DmRatePoint, RpdbcModel};
use fbregion::envelope::{s_lambda, DegradedBC, EnvelopeGrid, SearchOptions};
use fbregion::gaussian::{CovMatrix, GaussianBCModel};
use fbregion::gvbc::{boundary_sweep_seeded, region_point};
use nalgebra::DMatrix;
use fbregion::prob::{DMChannel, FiniteDist, Unit};
use fbregion::suites::{run_suite, Suite, SuiteConfig};
use fbregion::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDistribution = 3,
    DimensionMismatch = 4,
    NotPsd = 5,
    Infeasible = 6,
    NotDegraded = 7,
    GridTooLarge = 8,
    NumericFailure = 9,
    /// The verification suite ran and at least one check failed.
    VerificationFailed = 10,
    Panic = 11,
}

/// Rate unit selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbrUnit {
    Nats = 0,
    Bits = 1,
}

impl From<FbrUnit> for Unit {
    fn from(u: FbrUnit) -> Unit {
        match u {
            FbrUnit::Nats => Unit::Nats,
            FbrUnit::Bits => Unit::Bits,
        }
    }
}

/// Gaussian vector broadcast model.
pub struct FbrGaussianModel(GaussianBCModel);

/// Physically degraded DM broadcast channel.
pub struct FbrDegradedBc(DegradedBC);

/// List of rate points. Gaussian rates are in nats, DM rates in bits.
pub struct FbrRegion(Vec<[f64; 3]>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FbrStatus {
    match e {
        Error::InvalidDistribution(_) => FbrStatus::InvalidDistribution,
        Error::DimensionMismatch { .. } | Error::AxisOutOfRange { .. } | Error::OverlappingAxes(_) => {
            FbrStatus::DimensionMismatch
        }
        Error::NotSymmetric(_) | Error::NotPsd(_) | Error::NotPositiveDefinite(_) => FbrStatus::NotPsd,
        Error::Infeasible(_) => FbrStatus::Infeasible,
        Error::NotDegraded { .. } => FbrStatus::NotDegraded,
        Error::GridTooLarge { .. } | Error::StateSpaceTooLarge { .. } => FbrStatus::GridTooLarge,
        Error::SingularConditioning | Error::SingularChannel(_) => FbrStatus::NumericFailure,
        _ => FbrStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FbrStatus>) -> FbrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FbrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FbrStatus::Panic
        }
    }
}

fn lift<T>(r: fbregion::Result<T>) -> Result<T, FbrStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null_check<T>(p: *const T, name: &str) -> Result<(), FbrStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(FbrStatus::NullPointer);
    }
    Ok(())
}

/// # Safety
/// `p` must point to `n` readable doubles when non-null.
unsafe fn slice<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], FbrStatus> {
    null_check(p, name)?;
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write<T>(out: *mut T, v: T, name: &str) -> Result<(), FbrStatus> {
    null_check(out, name)?;
    out.write(v);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fbr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length, or 0 when there
/// is none.
///
/// # Safety
/// `buf` must be writable for `len` bytes when `len > 0`.
#[no_mangle]
pub unsafe extern "C" fn fbr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Builds a Gaussian model from row-major `dim x dim` matrices. `g` may be
/// null for the identity channel.
///
/// # Safety
/// Non-null matrix pointers must reference `dim * dim` doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_gaussian_model_new(
    dim: usize,
    g: *const f64,
    k: *const f64,
    k_tilde: *const f64,
    k_prime: *const f64,
    out: *mut *mut FbrGaussianModel,
) -> FbrStatus {
    guard(|| {
        let n = dim * dim;
        let cov = |p: *const f64, name: &str| -> Result<CovMatrix, FbrStatus> {
            lift(CovMatrix::new(dim, slice(p, n, name)?))
        };
        let (k, kt, kp) = (cov(k, "k")?, cov(k_tilde, "k_tilde")?, cov(k_prime, "k_prime")?);
        let model = if g.is_null() {
            lift(GaussianBCModel::identity_channel(k, kt, kp))?
        } else {
            let gm = DMatrix::from_row_slice(dim, dim, slice(g, n, "g")?);
            lift(GaussianBCModel::new(gm, k, kt, kp))?
        };
        write(out, Box::into_raw(Box::new(FbrGaussianModel(model))), "out")
    })
}

/// Parses a Gaussian model from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_gaussian_model_from_json(json: *const c_char, out: *mut *mut FbrGaussianModel) -> FbrStatus {
    guard(|| {
        null_check(json, "json")?;
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(e.to_string());
            FbrStatus::InvalidArgument
        })?;
        let model: GaussianBCModel = lift(serde_json::from_str(text).map_err(Error::from))?;
        write(out, Box::into_raw(Box::new(FbrGaussianModel(model))), "out")
    })
}

/// # Safety
/// `model` must come from a constructor of this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fbr_gaussian_model_free(model: *mut FbrGaussianModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Rates `(R1, R2)` in nats of layer covariances `b1`, `b2` (row-major).
///
/// # Safety
/// `b1`, `b2` must reference `dim * dim` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_gvbc_region_point(
    model: *const FbrGaussianModel,
    b1: *const f64,
    b2: *const f64,
    r1: *mut f64,
    r2: *mut f64,
) -> FbrStatus {
    guard(|| {
        null_check(model, "model")?;
        let m = &(*model).0;
        let n = m.dim() * m.dim();
        let b1 = lift(CovMatrix::new(m.dim(), slice(b1, n, "b1")?))?;
        let b2 = lift(CovMatrix::new(m.dim(), slice(b2, n, "b2")?))?;
        let p = lift(region_point(m, &b1, &b2))?;
        write(r1, p.r1, "r1")?;
        write(r2, p.r2, "r2")
    })
}

/// Boundary points (nats) for the given slopes. `converged` (nullable)
/// receives 1 when every slope converged.
///
/// # Safety
/// `lambdas` must reference `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_gvbc_boundary_sweep(
    model: *const FbrGaussianModel,
    lambdas: *const f64,
    n: usize,
    seed: u64,
    converged: *mut i32,
    out: *mut *mut FbrRegion,
) -> FbrStatus {
    guard(|| {
        null_check(model, "model")?;
        let pts = lift(boundary_sweep_seeded(&(*model).0, slice(lambdas, n, "lambdas")?, seed))?;
        if !converged.is_null() {
            converged.write(i32::from(pts.iter().all(|p| p.converged)));
        }
        let rows = pts.iter().map(|p| [0.0, p.r1, p.r2]).collect();
        write(out, Box::into_raw(Box::new(FbrRegion(rows))), "out")
    })
}

/// Cascade `p1(y|x) p2(z|y)` from row-major stochastic matrices.
///
/// # Safety
/// `stage1` must reference `nx * ny` doubles and `stage2` `ny * nz`; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_degraded_bc_new(
    nx: usize,
    ny: usize,
    nz: usize,
    stage1: *const f64,
    stage2: *const f64,
    out: *mut *mut FbrDegradedBc,
) -> FbrStatus {
    guard(|| {
        let s1 = lift(DMChannel::new(nx, ny, slice(stage1, nx * ny, "stage1")?.to_vec()))?;
        let s2 = lift(DMChannel::new(ny, nz, slice(stage2, ny * nz, "stage2")?.to_vec()))?;
        let bc = lift(DegradedBC::new(s1, s2))?;
        write(out, Box::into_raw(Box::new(FbrDegradedBc(bc))), "out")
    })
}

/// Factorizes a joint channel `q(y,z|x)` (row-major `nx x (ny * nz)`,
/// column `y * nz + z`). Returns `NotDegraded` and writes the residual to
/// `violation` (nullable) when no factorization exists.
///
/// # Safety
/// `q` must reference `nx * ny * nz` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_degraded_bc_from_joint(
    nx: usize,
    ny: usize,
    nz: usize,
    q: *const f64,
    violation: *mut f64,
    out: *mut *mut FbrDegradedBc,
) -> FbrStatus {
    guard(|| {
        let ch = lift(DMChannel::new(nx, ny * nz, slice(q, nx * ny * nz, "q")?.to_vec()))?;
        match is_degraded(&ch, ny, nz) {
            Ok(bc) => write(out, Box::into_raw(Box::new(FbrDegradedBc(bc))), "out"),
            Err(e) => {
                if let (Error::NotDegraded { violation: v }, false) = (&e, violation.is_null()) {
                    violation.write(*v);
                }
                lift(Err(e))
            }
        }
    })
}

/// # Safety
/// `bc` must come from a constructor of this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fbr_degraded_bc_free(bc: *mut FbrDegradedBc) {
    if !bc.is_null() {
        drop(Box::from_raw(bc));
    }
}

/// `I(X;Y) − λ I(X;Z)` at input law `px`.
///
/// # Safety
/// `px` must reference `n` doubles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_s_lambda(
    bc: *const FbrDegradedBc,
    px: *const f64,
    n: usize,
    lambda: f64,
    unit: FbrUnit,
    value: *mut f64,
) -> FbrStatus {
    guard(|| {
        null_check(bc, "bc")?;
        let p = lift(FiniteDist::new(slice(px, n, "px")?.to_vec()))?;
        write(value, lift(s_lambda(&(*bc).0, &p, lambda, unit.into()))?, "value")
    })
}

/// Upper concave envelope at `px` on a resolution-`resolution` grid,
/// together with the grid's certified gap. Both values in nats.
///
/// # Safety
/// `px` must reference `n` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_envelope(
    bc: *const FbrDegradedBc,
    lambda: f64,
    px: *const f64,
    n: usize,
    resolution: usize,
    value: *mut f64,
    certified_gap: *mut f64,
) -> FbrStatus {
    guard(|| {
        null_check(bc, "bc")?;
        let p = lift(FiniteDist::new(slice(px, n, "px")?.to_vec()))?;
        let grid = lift(EnvelopeGrid::new(&(*bc).0, lambda, resolution))?;
        let e = lift(grid.estimate(&p, &SearchOptions::default()))?;
        write(value, e.value, "value")?;
        write(certified_gap, e.certified_gap, "certified_gap")
    })
}

/// Superposition boundary point (bits) of the BSC cascade at `alpha`.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_bsc_closed_form(p1: f64, p_end: f64, alpha: f64, r1: *mut f64, r2: *mut f64) -> FbrStatus {
    guard(|| {
        let (a, b) = lift(bsc_closed_form(p1, p_end, alpha))?;
        write(r1, a, "r1")?;
        write(r2, b, "r2")
    })
}

fn dm_rows(points: Vec<DmRatePoint>) -> FbrRegion {
    FbrRegion(
        points
            .into_iter()
            .map(|p| [p.r0.unwrap_or(0.0), p.r1, p.r2])
            .collect(),
    )
}

/// Superposition frontier (bits) on a resolution-`resolution` grid.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_superposition_region(
    bc: *const FbrDegradedBc,
    resolution: usize,
    out: *mut *mut FbrRegion,
) -> FbrStatus {
    guard(|| {
        null_check(bc, "bc")?;
        let pts = lift(superposition_region(&(*bc).0, resolution))?;
        write(out, Box::into_raw(Box::new(dm_rows(pts))), "out")
    })
}

/// Pareto set of `(R0, R1, R2)` (bits) for the product of `first`
/// (`X1 → Y1 → Z1`) and `second` (`X2 → Z2 → Y2`, stage 1 ending at `Z2`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_rpdbc_region(
    first: *const FbrDegradedBc,
    second: *const FbrDegradedBc,
    resolution: usize,
    out: *mut *mut FbrRegion,
) -> FbrStatus {
    guard(|| {
        null_check(first, "first")?;
        null_check(second, "second")?;
        let model = RpdbcModel::new((*first).0.clone(), (*second).0.clone());
        let pts = lift(rpdbc_region(&model, resolution))?;
        write(out, Box::into_raw(Box::new(dm_rows(pts))), "out")
    })
}

/// Number of points in `region` (0 for null).
///
/// # Safety
/// `region` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fbr_region_len(region: *const FbrRegion) -> usize {
    if region.is_null() {
        0
    } else {
        let r: &FbrRegion = &*region;
        r.0.len()
    }
}

/// Point `index` of `region`; `r0` is 0 for two-user regions.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbr_region_point(
    region: *const FbrRegion,
    index: usize,
    r0: *mut f64,
    r1: *mut f64,
    r2: *mut f64,
) -> FbrStatus {
    guard(|| {
        null_check(region, "region")?;
        let r: &FbrRegion = &*region;
        let Some(p) = r.0.get(index) else {
            set_error(format!("index {index} out of range"));
            return Err(FbrStatus::InvalidArgument);
        };
        write(r0, p[0], "r0")?;
        write(r1, p[1], "r1")?;
        write(r2, p[2], "r2")
    })
}

/// # Safety
/// `region` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fbr_region_free(region: *mut FbrRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Runs a verification suite by name. `samples = 0` selects the suite
/// default. `report_json` (nullable) receives the JSON report, released
/// with [`fbr_string_free`]. Returns `VerificationFailed` when any
/// non-diagnostic check fails.
///
/// # Safety
/// `suite` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fbr_verify(
    suite: *const c_char,
    seed: u64,
    samples: usize,
    report_json: *mut *mut c_char,
) -> FbrStatus {
    let mut failed = false;
    let status = guard(|| {
        null_check(suite, "suite")?;
        let name = CStr::from_ptr(suite).to_str().map_err(|e| {
            set_error(e.to_string());
            FbrStatus::InvalidArgument
        })?;
        let suite: Suite = lift(name.parse())?;
        let cfg = SuiteConfig {
            seed,
            samples: (samples > 0).then_some(samples),
            ..SuiteConfig::default()
        };
        let report = lift(run_suite(suite, &cfg))?;
        failed = !report.pass;
        if !report_json.is_null() {
            let text = lift(serde_json::to_string(&report).map_err(Error::from))?;
            report_json.write(CString::new(text).unwrap_or_default().into_raw());
        }
        Ok(())
    });
    if status == FbrStatus::Ok && failed {
        set_error("verification failed".into());
        return FbrStatus::VerificationFailed;
    }
    status
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fbr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
