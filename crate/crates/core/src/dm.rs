//! Capacity regions of degraded discrete memoryless broadcast channels: the
//! superposition region of a single degraded BC and the region of a product
//! of two reversely degraded components.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envelope::DegradedBC;
use crate::error::{Error, Result};
use crate::pareto::{pareto_2d, pareto_3d};
use crate::prob::{
    clamp_nonnegative, cmi_nats, entropy_nats, mi_nats, simplex_compositions, simplex_grid_count, DMChannel,
    FiniteDist, JointDist, DEFAULT_GRID_CAP,
};

/// Largest input alphabet for the superposition region.
pub const MAX_SUPERPOSITION_ALPHABET: usize = 4;
/// Largest input alphabet per reversely degraded component.
pub const MAX_RPDBC_ALPHABET: usize = 3;
/// Per-component grid cap; candidate pairs grow with its square.
pub const RPDBC_COMPONENT_CAP: u128 = 16_384;
/// Largest factorization residual accepted by [`is_degraded`].
pub const DEGRADED_TOL: f64 = 1e-9;

const LN2: f64 = std::f64::consts::LN_2;

/// A frontier point in bits with its achieving auxiliary joint(s) `p(u,x)`.
/// `r0` is present only for the reversely degraded product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmRatePoint {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r0: Option<f64>,
    pub r1: f64,
    pub r2: f64,
    pub joints: Vec<JointDist>,
}

/// Grid controls. `extra_aux` enlarges `|U|` past the stated cardinality
/// bound, which exposes any slack in that bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmOptions {
    pub resolution: Option<usize>,
    pub extra_aux: usize,
    pub cap: u128,
}

impl Default for DmOptions {
    fn default() -> Self {
        Self {
            resolution: None,
            extra_aux: 0,
            cap: DEFAULT_GRID_CAP,
        }
    }
}

fn h2(p: f64) -> f64 {
    entropy_nats(&[p, 1.0 - p]) / LN2
}

fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Superposition boundary point of the BSC cascade with `U ~ Bern(½)` and
/// `X = U ⊕ Bern(α)`, in bits.
pub fn bsc_closed_form(p1: f64, p_end: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&p1) || !(0.0..=0.5).contains(&p_end) || !(0.0..=0.5).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "crossovers and alpha must lie in [0, 1/2], got ({p1}, {p_end}, {alpha})"
        )));
    }
    if p1 > p_end {
        return Err(Error::InvalidParameter(format!(
            "stronger crossover {p1} exceeds end-to-end crossover {p_end}"
        )));
    }
    Ok((h2(star(alpha, p1)) - h2(p1), 1.0 - h2(star(alpha, p_end))))
}

/// `(I(X;Y|U), I(U;Z))` in bits for a joint over `[U, X]`.
pub fn superposition_rates(bc: &DegradedBC, joint: &JointDist) -> Result<(f64, f64)> {
    let full = extend_with_outputs(joint, bc)?;
    Ok((cmi_nats(&full, &[1], &[2], &[0])? / LN2, mi_nats(&full, &[0], &[3])? / LN2))
}

/// Joint over `[U, X, Y, Z]` from `p(u,x)` and the cascade.
fn extend_with_outputs(joint: &JointDist, bc: &DegradedBC) -> Result<JointDist> {
    let sizes = joint.axis_sizes();
    if sizes.len() != 2 || sizes[1] != bc.input_size() {
        return Err(Error::DimensionMismatch {
            expected: bc.input_size(),
            got: *sizes.get(1).unwrap_or(&0),
        });
    }
    let (nu, nx, ny, nz) = (sizes[0], sizes[1], bc.y_size(), bc.z_size());
    let mut mass = Vec::with_capacity(nu * nx * ny * nz);
    for u in 0..nu {
        for x in 0..nx {
            let p = joint.mass()[u * nx + x];
            for (y, &w) in bc.stage1().row(x).iter().enumerate() {
                mass.extend(bc.stage2().row(y).iter().map(|v| p * w * v));
            }
        }
    }
    JointDist::from_unnormalized(vec![nu, nx, ny, nz], mass)
}

/// Per-conditional quantities of one component, indexed by grid point.
struct Conditionals {
    dists: Vec<Vec<f64>>,
    /// Output law of the stronger receiver.
    strong_out: Vec<Vec<f64>>,
    /// Output law of the weaker receiver.
    weak_out: Vec<Vec<f64>>,
    /// `H(Y_s | X)` for the conditional input law.
    strong_noise: Vec<f64>,
    strong_h: Vec<f64>,
    weak_h: Vec<f64>,
}

impl Conditionals {
    fn new(bc: &DegradedBC, resolution: usize, cap: u128) -> Result<Self> {
        let nx = bc.input_size();
        let r = resolution as f64;
        let dists: Vec<Vec<f64>> = simplex_compositions(nx, resolution, cap)?
            .into_iter()
            .map(|k| k.into_iter().map(|ki| ki as f64 / r).collect())
            .collect();
        let row_h = |ch: &DMChannel| (0..nx).map(|x| entropy_nats(ch.row(x))).collect::<Vec<f64>>();
        let hs = row_h(bc.stage1());
        let strong_out: Vec<Vec<f64>> = dists.iter().map(|p| bc.stage1().output_mass(p)).collect();
        let weak_out: Vec<Vec<f64>> = dists.iter().map(|p| bc.end_to_end().output_mass(p)).collect();
        let dot = |p: &[f64], h: &[f64]| p.iter().zip(h).map(|(a, b)| a * b).sum::<f64>();
        Ok(Self {
            strong_noise: dists.iter().map(|p| dot(p, &hs)).collect(),
            strong_h: strong_out.iter().map(|q| entropy_nats(q)).collect(),
            weak_h: weak_out.iter().map(|q| entropy_nats(q)).collect(),
            dists,
            strong_out,
            weak_out,
        })
    }

    fn len(&self) -> usize {
        self.dists.len()
    }
}

/// Nondecreasing `k`-tuples over `0..m`, flattened.
fn multisets(m: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(pos: usize, start: u32, m: u32, cur: &mut Vec<u32>, out: &mut Vec<u32>) {
        if pos == cur.len() {
            out.extend_from_slice(cur);
            return;
        }
        for v in start..m {
            cur[pos] = v;
            rec(pos + 1, v, m, cur, out);
        }
    }
    rec(0, 0, m as u32, &mut cur, &mut out);
    out
}

fn multiset_count(m: usize, k: usize) -> u128 {
    // C(m + k - 1, k)
    simplex_grid_count(m, k)
}

/// Grid size over `p(u,x)`: weights of `U` times sorted conditionals.
fn aux_grid_count(nx: usize, nu: usize, resolution: usize) -> u128 {
    let m = simplex_grid_count(nx, resolution);
    if m > u32::MAX as u128 {
        return u128::MAX;
    }
    simplex_grid_count(nu, resolution).saturating_mul(multiset_count(m as usize, nu))
}

/// Grid over `p(u,x)` for one component. Conditionals are taken as sorted
/// tuples since relabelling `U` permutes the weights, which range over the
/// whole simplex grid.
struct AuxGrid {
    nu: usize,
    weights: Vec<Vec<f64>>,
    tuples: Vec<u32>,
    cond: Conditionals,
}

impl AuxGrid {
    fn new(bc: &DegradedBC, nu: usize, resolution: usize, cap: u128) -> Result<Self> {
        let count = aux_grid_count(bc.input_size(), nu, resolution);
        if count > cap {
            return Err(Error::GridTooLarge { count, cap });
        }
        let r = resolution as f64;
        let weights = simplex_compositions(nu, resolution, cap)?
            .into_iter()
            .map(|k| k.into_iter().map(|ki| ki as f64 / r).collect())
            .collect();
        let cond = Conditionals::new(bc, resolution, cap)?;
        let tuples = multisets(cond.len(), nu);
        Ok(Self {
            nu,
            weights,
            tuples,
            cond,
        })
    }

    fn n_tuples(&self) -> usize {
        self.tuples.len() / self.nu
    }

    fn tuple(&self, t: usize) -> &[u32] {
        &self.tuples[t * self.nu..(t + 1) * self.nu]
    }

    /// `[I(U;Ys), I(U;Yw), I(X;Ys), I(X;Ys|U)]` in bits.
    fn quantities(&self, w: usize, t: usize) -> [f64; 4] {
        let (pu, tuple, c) = (&self.weights[w], self.tuple(t), &self.cond);
        let mix = |outs: &[Vec<f64>]| {
            let mut acc = vec![0.0; outs[0].len()];
            for (&p, &ci) in pu.iter().zip(tuple) {
                if p > 0.0 {
                    for (a, b) in acc.iter_mut().zip(&outs[ci as usize]) {
                        *a += p * b;
                    }
                }
            }
            entropy_nats(&acc)
        };
        let avg = |v: &[f64]| pu.iter().zip(tuple).map(|(&p, &ci)| p * v[ci as usize]).sum::<f64>();
        let (hs, hw) = (mix(&c.strong_out), mix(&c.weak_out));
        let us = hs - avg(&c.strong_h);
        let uw = hw - avg(&c.weak_h);
        let xs = hs - avg(&c.strong_noise);
        let xsu = avg(&c.strong_h) - avg(&c.strong_noise);
        [us, uw, xs, xsu].map(|v| clamp_nonnegative(v).max(0.0) / LN2)
    }

    fn joint(&self, w: usize, t: usize) -> JointDist {
        let nx = self.cond.dists[0].len();
        let mut mass = Vec::with_capacity(self.nu * nx);
        for (&p, &ci) in self.weights[w].iter().zip(self.tuple(t)) {
            mass.extend(self.cond.dists[ci as usize].iter().map(|q| p * q));
        }
        JointDist::from_unnormalized(vec![self.nu, nx], mass).expect("grid joint is normalized")
    }
}

fn check_alphabets(bc: &DegradedBC, max: usize) -> Result<()> {
    let largest = bc.input_size().max(bc.y_size()).max(bc.z_size());
    if largest > max {
        return Err(Error::InvalidParameter(format!(
            "alphabets are limited to {max} symbols, got {largest}"
        )));
    }
    Ok(())
}

fn largest_fitting(target: usize, fits: impl Fn(usize) -> bool) -> Result<usize> {
    (1..=target)
        .rev()
        .find(|&r| fits(r))
        .ok_or_else(|| Error::InvalidParameter("no grid resolution fits the cap".into()))
}

/// `|U|` for the superposition region, `min(|X|,|Y|,|Z|) + 1`.
pub fn superposition_aux_size(bc: &DegradedBC) -> usize {
    bc.input_size().min(bc.y_size()).min(bc.z_size()) + 1
}

/// Default resolution: 24 for binary inputs, otherwise the largest value up
/// to 12 whose grid fits `cap`.
pub fn default_superposition_resolution(bc: &DegradedBC, extra_aux: usize, cap: u128) -> Result<usize> {
    let (nx, nu) = (bc.input_size(), superposition_aux_size(bc) + extra_aux);
    let target = if nx == 2 { 24 } else { 12 };
    largest_fitting(target, |r| aux_grid_count(nx, nu, r) <= cap)
}

/// Pareto frontier of `(I(X;Y|U), I(U;Z))` over the `p(u,x)` grid, in bits,
/// ascending in `R1`.
pub fn superposition_region(bc: &DegradedBC, resolution: usize) -> Result<Vec<DmRatePoint>> {
    superposition_region_with(
        bc,
        &DmOptions {
            resolution: Some(resolution),
            ..DmOptions::default()
        },
    )
}

pub fn superposition_region_with(bc: &DegradedBC, opts: &DmOptions) -> Result<Vec<DmRatePoint>> {
    check_alphabets(bc, MAX_SUPERPOSITION_ALPHABET)?;
    let nu = superposition_aux_size(bc) + opts.extra_aux;
    let resolution = match opts.resolution {
        Some(r) => r,
        None => default_superposition_resolution(bc, opts.extra_aux, opts.cap)?,
    };
    let grid = AuxGrid::new(bc, nu, resolution, opts.cap)?;
    let nt = grid.n_tuples();
    let survivors: Vec<(usize, usize, f64, f64)> = (0..grid.weights.len())
        .into_par_iter()
        .flat_map_iter(|w| {
            let pts: Vec<(f64, f64)> = (0..nt)
                .map(|t| {
                    let q = grid.quantities(w, t);
                    (q[3], q[1])
                })
                .collect();
            pareto_2d(&pts)
                .into_iter()
                .map(|t| (w, t, pts[t].0, pts[t].1))
                .collect::<Vec<_>>()
        })
        .collect();
    let pts: Vec<(f64, f64)> = survivors.iter().map(|s| (s.2, s.3)).collect();
    Ok(pareto_2d(&pts)
        .into_iter()
        .map(|i| {
            let (w, t, r1, r2) = survivors[i];
            DmRatePoint {
                r0: None,
                r1,
                r2,
                joints: vec![grid.joint(w, t)],
            }
        })
        .collect())
}

/// Product of a component degraded as `X1 → Y1 → Z1` and one degraded as
/// `X2 → Z2 → Y2`. The second component's `stage1` ends at `Z2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpdbcModel {
    pub component1: DegradedBC,
    pub component2: DegradedBC,
}

impl RpdbcModel {
    pub fn new(component1: DegradedBC, component2: DegradedBC) -> Self {
        Self {
            component1,
            component2,
        }
    }
}

/// Right-hand sides of the region's inequalities, in bits:
/// `[R0 (Y side), R0 (Z side), R0+R1, R0+R2, R0+R1+R2 (first), R0+R1+R2 (second)]`.
pub type RpdbcBounds = [f64; 6];

fn bounds_from(q1: &[f64; 4], q2: &[f64; 4]) -> RpdbcBounds {
    // q = [I(U;strong), I(U;weak), I(X;strong), I(X;strong|U)]
    [
        q1[0] + q2[1],
        q1[1] + q2[0],
        q1[2] + q2[1],
        q2[2] + q1[1],
        q1[2] + q2[1] + q2[3],
        q2[2] + q1[1] + q1[3],
    ]
}

/// Evaluates the region's bounds for `p(u1,x1) p(u2,x2)` by direct
/// enumeration of the two component joints.
pub fn rpdbc_bounds(model: &RpdbcModel, joint1: &JointDist, joint2: &JointDist) -> Result<RpdbcBounds> {
    let quantities = |bc: &DegradedBC, j: &JointDist| -> Result<[f64; 4]> {
        let full = extend_with_outputs(j, bc)?;
        Ok([
            mi_nats(&full, &[0], &[2])? / LN2,
            mi_nats(&full, &[0], &[3])? / LN2,
            mi_nats(&full, &[1], &[2])? / LN2,
            cmi_nats(&full, &[1], &[2], &[0])? / LN2,
        ])
    };
    Ok(bounds_from(
        &quantities(&model.component1, joint1)?,
        &quantities(&model.component2, joint2)?,
    ))
}

/// Whether `(r0, r1, r2)` satisfies every bound within `tol`.
pub fn rpdbc_contains(bounds: &RpdbcBounds, r0: f64, r1: f64, r2: f64, tol: f64) -> bool {
    let [a, b, c, d, e1, e2] = *bounds;
    r0 >= -tol
        && r1 >= -tol
        && r2 >= -tol
        && r0 <= a.min(b) + tol
        && r0 + r1 <= c + tol
        && r0 + r2 <= d + tol
        && r0 + r1 + r2 <= e1.min(e2) + tol
}

/// Maximal corners of the polytope cut out by `bounds`.
fn polytope_corners(bounds: &RpdbcBounds, out: &mut Vec<[f64; 3]>) {
    let [a, b, c, d, e1, e2] = *bounds;
    let e = e1.min(e2);
    let tmax = a.min(b).min(c).min(d).min(e).max(0.0);
    let mut push_slice = |t: f64| {
        let (ca, cb, ce) = ((c - t).max(0.0), (d - t).max(0.0), (e - t).max(0.0));
        if ce >= ca + cb {
            out.push([t, ca, cb]);
        } else {
            let r1 = ca.min(ce);
            out.push([t, r1, ce - r1]);
            let r2 = cb.min(ce);
            out.push([t, ce - r2, r2]);
        }
    };
    push_slice(0.0);
    // the sum-rate facet starts binding for t above c + d - e
    let knee = c + d - e;
    if knee > 0.0 && knee < tmax {
        push_slice(knee);
    }
    if tmax > 0.0 {
        push_slice(tmax);
    }
}

/// `|U_i| = min(|X_i|,|Y_i|,|Z_i|)` per component.
pub fn rpdbc_aux_size(bc: &DegradedBC) -> usize {
    bc.input_size().min(bc.y_size()).min(bc.z_size())
}

fn default_rpdbc_resolution(bc: &DegradedBC, nu: usize) -> Result<usize> {
    let nx = bc.input_size();
    let target = if nx == 2 { 24 } else { 12 };
    largest_fitting(target, |r| aux_grid_count(nx, nu, r) <= RPDBC_COMPONENT_CAP)
}

/// Component grid points that are not dominated in all four quantities.
fn component_frontier(grid: &AuxGrid) -> Vec<(usize, usize, [f64; 4])> {
    let nt = grid.n_tuples();
    let mut pts: Vec<(usize, usize, [f64; 4])> = (0..grid.weights.len())
        .into_par_iter()
        .flat_map_iter(|w| (0..nt).map(move |t| (w, t)).collect::<Vec<_>>())
        .map(|(w, t)| (w, t, grid.quantities(w, t)))
        .collect();
    pts.sort_by(|a, b| {
        let (sa, sb) = (a.2.iter().sum::<f64>(), b.2.iter().sum::<f64>());
        sb.total_cmp(&sa).then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut kept: Vec<(usize, usize, [f64; 4])> = Vec::new();
    for p in pts {
        // a dominating point has a sum at least as large, so it precedes p
        if !kept.iter().any(|k| k.2.iter().zip(&p.2).all(|(x, y)| x >= y)) {
            kept.push(p);
        }
    }
    kept
}

/// 3-D Pareto set of the corner points of the region, over independent
/// component joints on the grid. Ordered by descending `R0`, then `R1`.
pub fn rpdbc_region(model: &RpdbcModel, resolution: usize) -> Result<Vec<DmRatePoint>> {
    rpdbc_region_with(
        model,
        &DmOptions {
            resolution: Some(resolution),
            ..DmOptions::default()
        },
    )
}

pub fn rpdbc_region_with(model: &RpdbcModel, opts: &DmOptions) -> Result<Vec<DmRatePoint>> {
    let mut grids = Vec::with_capacity(2);
    for bc in [&model.component1, &model.component2] {
        check_alphabets(bc, MAX_RPDBC_ALPHABET)?;
        let nu = rpdbc_aux_size(bc) + opts.extra_aux;
        let r = match opts.resolution {
            Some(r) => r,
            None => default_rpdbc_resolution(bc, nu)?,
        };
        grids.push(AuxGrid::new(bc, nu, r, opts.cap)?);
    }
    let f1 = component_frontier(&grids[0]);
    let f2 = component_frontier(&grids[1]);
    let pairs = (f1.len() as u128) * (f2.len() as u128);
    if pairs > opts.cap {
        return Err(Error::GridTooLarge {
            count: pairs,
            cap: opts.cap,
        });
    }
    let survivors: Vec<([f64; 3], usize, usize)> = (0..f1.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut corners = Vec::new();
            let mut owner = Vec::new();
            for (j, p2) in f2.iter().enumerate() {
                let before = corners.len();
                polytope_corners(&bounds_from(&f1[i].2, &p2.2), &mut corners);
                owner.extend(std::iter::repeat_n(j, corners.len() - before));
            }
            pareto_3d(&corners)
                .into_iter()
                .map(|k| (corners[k], i, owner[k]))
                .collect::<Vec<_>>()
        })
        .collect();
    let pts: Vec<[f64; 3]> = survivors.iter().map(|s| s.0).collect();
    Ok(pareto_3d(&pts)
        .into_iter()
        .map(|k| {
            let ([r0, r1, r2], i, j) = survivors[k];
            DmRatePoint {
                r0: Some(r0),
                r1,
                r2,
                joints: vec![grids[0].joint(f1[i].0, f1[i].1), grids[1].joint(f2[j].0, f2[j].1)],
            }
        })
        .collect())
}

/// Splits a joint channel `q(y,z|x)` (output index `y * z_size + z`) into
/// `p1(y|x) p2(z|y)`, or refuses with the largest factorization residual.
pub fn is_degraded(q: &DMChannel, y_size: usize, z_size: usize) -> Result<DegradedBC> {
    if y_size * z_size != q.output_size() || y_size == 0 {
        return Err(Error::DimensionMismatch {
            expected: q.output_size(),
            got: y_size * z_size,
        });
    }
    let nx = q.input_size();
    let w = |x: usize, y: usize, z: usize| q.row(x)[y * z_size + z];
    let p1: Vec<f64> = (0..nx)
        .flat_map(|x| (0..y_size).map(move |y| (0..z_size).map(|z| w(x, y, z)).sum::<f64>()))
        .collect();
    // least-squares D(z|y) given p1; rows of D are stochastic by construction
    let mut d = vec![0.0; y_size * z_size];
    for y in 0..y_size {
        let norm: f64 = (0..nx).map(|x| p1[x * y_size + y].powi(2)).sum();
        for z in 0..z_size {
            d[y * z_size + z] = if norm > 0.0 {
                (0..nx).map(|x| w(x, y, z) * p1[x * y_size + y]).sum::<f64>() / norm
            } else {
                1.0 / z_size as f64
            };
        }
    }
    let mut violation: f64 = 0.0;
    for x in 0..nx {
        for y in 0..y_size {
            for z in 0..z_size {
                violation = violation.max((w(x, y, z) - p1[x * y_size + y] * d[y * z_size + z]).abs());
            }
        }
    }
    if violation > DEGRADED_TOL {
        return Err(Error::NotDegraded { violation });
    }
    DegradedBC::new(DMChannel::new(nx, y_size, p1)?, DMChannel::new(y_size, z_size, d)?)
}

/// Support function `max_i (w1 R1_i + w2 R2_i)` of a set of rate points.
pub fn support(points: &[(f64, f64)], w1: f64, w2: f64) -> f64 {
    points
        .iter()
        .map(|&(a, b)| w1 * a + w2 * b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Input law `p(x) = Σ_u p(u,x)` of a grid joint.
pub fn input_law(joint: &JointDist) -> Result<FiniteDist> {
    FiniteDist::new(joint.marginal(&[1])?.mass().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{simplex_grid, Unit};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits_h(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn bsc_closed_form_values() {
        let (r1, r2) = bsc_closed_form(0.1, 0.18, 0.25).unwrap();
        assert_abs_diff_eq!(r1, bits_h(0.3) - bits_h(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(r1, 0.412295, epsilon = 1e-6);
        assert_abs_diff_eq!(r2, 0.075181, epsilon = 1e-6);
        let (r1, r2) = bsc_closed_form(0.1, 0.18, 0.0).unwrap();
        assert_abs_diff_eq!(r1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2, 1.0 - bits_h(0.18), epsilon = 1e-12);
        let (r1, r2) = bsc_closed_form(0.1, 0.18, 0.5).unwrap();
        assert_abs_diff_eq!(r1, 1.0 - bits_h(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 0.0, epsilon = 1e-15);
        assert!(bsc_closed_form(0.2, 0.1, 0.25).is_err());
    }

    #[test]
    fn superposition_contains_corners_and_oracle() {
        let bc = DegradedBC::bsc_cascade(0.1, 0.1).unwrap();
        let front = superposition_region(&bc, 12).unwrap();
        let pts: Vec<(f64, f64)> = front.iter().map(|p| (p.r1, p.r2)).collect();
        let r1_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
        let r2_max = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        assert_abs_diff_eq!(r1_max, 1.0 - bits_h(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(r2_max, 1.0 - bits_h(0.18), epsilon = 1e-12);
        for w in pts.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
        }
        // α = 1/4 sits on the resolution-12 grid
        let (c1, c2) = bsc_closed_form(0.1, 0.18, 0.25).unwrap();
        assert!(pts.iter().any(|p| p.0 >= c1 - 1e-12 && p.1 >= c2 - 1e-12));
    }

    #[test]
    fn superposition_points_recompute() {
        let bc = DegradedBC::new(
            DMChannel::from_rows(&[vec![0.8, 0.1, 0.1], vec![0.2, 0.7, 0.1], vec![0.1, 0.2, 0.7]]).unwrap(),
            DMChannel::from_rows(&[vec![0.9, 0.1], vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap(),
        )
        .unwrap();
        let opts = DmOptions {
            resolution: Some(3),
            ..DmOptions::default()
        };
        let front = superposition_region_with(&bc, &opts).unwrap();
        assert!(!front.is_empty());
        for p in &front {
            let (r1, r2) = superposition_rates(&bc, &p.joints[0]).unwrap();
            assert_abs_diff_eq!(r1, p.r1, epsilon = 1e-10);
            assert_abs_diff_eq!(r2, p.r2, epsilon = 1e-10);
            assert!(p.r1 >= 0.0 && p.r2 >= 0.0);
        }
    }

    #[test]
    fn default_resolutions() {
        let bin = DegradedBC::bsc_cascade(0.1, 0.1).unwrap();
        assert_eq!(default_superposition_resolution(&bin, 0, DEFAULT_GRID_CAP).unwrap(), 24);
        let ter = DegradedBC::new(DMChannel::noiseless(3), DMChannel::noiseless(3)).unwrap();
        let r = default_superposition_resolution(&ter, 0, DEFAULT_GRID_CAP).unwrap();
        assert!(aux_grid_count(3, 4, r) <= DEFAULT_GRID_CAP);
        assert!(aux_grid_count(3, 4, r + 1) > DEFAULT_GRID_CAP);
    }

    #[test]
    fn grid_cap_is_enforced() {
        let bc = DegradedBC::bsc_cascade(0.1, 0.1).unwrap();
        let opts = DmOptions {
            resolution: Some(24),
            extra_aux: 0,
            cap: 1000,
        };
        assert!(matches!(
            superposition_region_with(&bc, &opts),
            Err(Error::GridTooLarge { .. })
        ));
    }

    fn noiseless_rpdbc() -> RpdbcModel {
        let c = DegradedBC::new(DMChannel::noiseless(2), DMChannel::noiseless(2)).unwrap();
        RpdbcModel::new(c.clone(), c)
    }

    #[test]
    fn noiseless_sum_rate_is_two_bits() {
        let front = rpdbc_region(&noiseless_rpdbc(), 4).unwrap();
        let best = front
            .iter()
            .map(|p| p.r0.unwrap() + p.r1 + p.r2)
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(best, 2.0, epsilon = 1e-12);
        let r0 = front.iter().map(|p| p.r0.unwrap()).fold(0.0, f64::max);
        assert_abs_diff_eq!(r0, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rpdbc_points_are_binding_and_nondominated() {
        let model = RpdbcModel::new(
            DegradedBC::bsc_cascade(0.1, 0.1).unwrap(),
            DegradedBC::bsc_cascade(0.05, 0.2).unwrap(),
        );
        let front = rpdbc_region(&model, 6).unwrap();
        for p in &front {
            let b = rpdbc_bounds(&model, &p.joints[0], &p.joints[1]).unwrap();
            let r0 = p.r0.unwrap();
            assert!(rpdbc_contains(&b, r0, p.r1, p.r2, 1e-10));
            let slack = [
                b[0].min(b[1]) - r0,
                b[2] - r0 - p.r1,
                b[3] - r0 - p.r2,
                b[4].min(b[5]) - r0 - p.r1 - p.r2,
            ];
            assert!(slack.iter().any(|s| s.abs() <= 1e-10), "{slack:?}");
        }
        for (i, p) in front.iter().enumerate() {
            for (j, q) in front.iter().enumerate() {
                let dom = q.r0 >= p.r0 && q.r1 >= p.r1 && q.r2 >= p.r2;
                assert!(i == j || !dom || (q.r0, q.r1, q.r2) != (p.r0, p.r1, p.r2) && !dom);
            }
        }
    }

    #[test]
    fn useless_second_component_collapses() {
        let c1 = DegradedBC::bsc_cascade(0.1, 0.1).unwrap();
        let dead = DegradedBC::new(DMChannel::constant(2, 2), DMChannel::noiseless(2)).unwrap();
        let front = rpdbc_region(&RpdbcModel::new(c1.clone(), dead), 16).unwrap();
        // with R0 = 0 the region is the component-1 superposition region
        // restricted to |U| = 2, whose boundary is the BSC α-sweep
        // α = k/16 lies on the grid
        for k in 0..=8 {
            let alpha = k as f64 / 16.0;
            let (c1r, c2r) = bsc_closed_form(0.1, 0.18, alpha).unwrap();
            let pts: Vec<(f64, f64)> = front.iter().map(|p| (p.r1, p.r2 + p.r0.unwrap())).collect();
            let gap = pts
                .iter()
                .map(|p| (p.0 - c1r).min(p.1 - c2r))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(gap >= -1e-9, "alpha {alpha}: {gap}");
            assert!(front.iter().all(|p| p.r1 <= 1.0 - bits_h(0.1) + 1e-12));
        }
    }

    #[test]
    fn cascade_is_recognized() {
        let bc = DegradedBC::new(
            DMChannel::from_rows(&[vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3]]).unwrap(),
            DMChannel::from_rows(&[vec![0.9, 0.1], vec![0.4, 0.6], vec![0.2, 0.8]]).unwrap(),
        )
        .unwrap();
        let back = is_degraded(&bc.joint_channel(), 3, 2).unwrap();
        for (a, b) in back.stage1().rows().iter().zip(bc.stage1().rows()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        for (a, b) in back.stage2().rows().iter().zip(bc.stage2().rows()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn direct_weak_output_is_refused() {
        // Z = X, Y = BSC(0.2)(X)
        let rows = vec![0.8, 0.0, 0.2, 0.0, 0.0, 0.2, 0.0, 0.8];
        let q = DMChannel::new(2, 4, rows).unwrap();
        assert!(matches!(is_degraded(&q, 2, 2), Err(Error::NotDegraded { .. })));
    }

    #[test]
    fn perturbed_cascade_residual_tracks_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bc = DegradedBC::new(
            DMChannel::from_rows(&[vec![0.7, 0.3], vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap(),
            DMChannel::from_rows(&[vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap(),
        )
        .unwrap();
        let mut rows = bc.joint_channel().rows().to_vec();
        for r in rows.chunks_mut(4) {
            for v in r.iter_mut() {
                *v += 1e-2 * (rng.random::<f64>() - 0.5);
            }
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|v| *v /= s);
        }
        let q = DMChannel::new(3, 4, rows).unwrap();
        match is_degraded(&q, 2, 2) {
            Err(Error::NotDegraded { violation }) => assert!(violation > 1e-4 && violation < 2e-2, "{violation}"),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn accepted_channels_obey_data_processing(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rand_rows = |n: usize, m: usize| {
                let rows: Vec<Vec<f64>> = (0..n).map(|_| {
                    let r: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
                    let t: f64 = r.iter().sum();
                    r.into_iter().map(|v| v / t).collect()
                }).collect();
                DMChannel::from_rows(&rows).unwrap()
            };
            let bc = DegradedBC::new(rand_rows(3, 3), rand_rows(3, 2)).unwrap();
            let back = is_degraded(&bc.joint_channel(), 3, 2).unwrap();
            for px in simplex_grid(3, 5).unwrap() {
                let iy = back.stage1().mutual_information_nats(px.mass());
                let iz = back.end_to_end().mutual_information_nats(px.mass());
                prop_assert!(iz <= iy + 1e-12);
            }
            let _ = Unit::Bits;
        }
    }
}
