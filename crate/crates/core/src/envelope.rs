//! `s_λ(p) = I(X;Y) − λ I(X;Z)` on the input simplex of a physically
//! degraded broadcast channel, and its upper concave envelope `S_λ`.
//!
//! The envelope is estimated two ways and the larger value is reported: the
//! upper hull of `s_λ` sampled on a simplex grid, and a multistart pattern
//! search over explicit auxiliary splits `p(v|x)` with `|V| ≤ |X| + 1`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::directed::directed_nats;
use crate::error::{Error, Result};
use crate::prob::{simplex_compositions, DMChannel, FiniteDist, JointDist, Unit, DEFAULT_GRID_CAP};

/// Smallest grid resolution accepted by [`envelope`].
pub const MIN_RESOLUTION: usize = 8;
/// Largest λ used by default sweeps.
pub const MAX_LAMBDA: f64 = 64.0;
/// Logits are confined to `[-LOGIT_BOUND, LOGIT_BOUND]` during the search.
const LOGIT_BOUND: f64 = 30.0;
const SEARCH_MIN_STEP: f64 = 1e-7;
const SEARCH_MAX_EVALS: usize = 40_000;

/// Broadcast channel with `q(y,z|x) = p1(y|x) p2(z|y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BcRepr", into = "BcRepr")]
pub struct DegradedBC {
    stage1: DMChannel,
    stage2: DMChannel,
    end_to_end: DMChannel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BcRepr {
    pub stage1: DMChannel,
    pub stage2: DMChannel,
}

impl DegradedBC {
    pub fn new(stage1: DMChannel, stage2: DMChannel) -> Result<Self> {
        let end_to_end = stage1.then(&stage2)?;
        Ok(Self {
            stage1,
            stage2,
            end_to_end,
        })
    }

    /// Cascade of two binary symmetric channels.
    pub fn bsc_cascade(p1: f64, p2: f64) -> Result<Self> {
        Self::new(DMChannel::bsc(p1)?, DMChannel::bsc(p2)?)
    }

    pub fn input_size(&self) -> usize {
        self.stage1.input_size()
    }

    pub fn y_size(&self) -> usize {
        self.stage1.output_size()
    }

    pub fn z_size(&self) -> usize {
        self.stage2.output_size()
    }

    pub fn stage1(&self) -> &DMChannel {
        &self.stage1
    }

    pub fn stage2(&self) -> &DMChannel {
        &self.stage2
    }

    /// `x -> z` marginal channel.
    pub fn end_to_end(&self) -> &DMChannel {
        &self.end_to_end
    }

    /// Joint channel `q(y,z|x)` with output index `y * |Z| + z`.
    pub fn joint_channel(&self) -> DMChannel {
        let (nx, ny, nz) = (self.input_size(), self.y_size(), self.z_size());
        let mut rows = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for (y, &p) in self.stage1.row(x).iter().enumerate() {
                rows.extend(self.stage2.row(y).iter().map(|q| p * q));
            }
        }
        DMChannel::new(nx, ny * nz, rows).expect("cascade rows are stochastic")
    }

    /// Two-letter product channel `q × q` (no feedback).
    pub fn product(&self, other: &DegradedBC) -> DegradedBC {
        DegradedBC::new(
            self.stage1.product(&other.stage1),
            self.stage2.product(&other.stage2),
        )
        .expect("product stages conform")
    }

    /// `s_λ` in nats for an input mass vector; `λ` is not validated.
    pub(crate) fn s_nats(&self, px: &[f64], lambda: f64) -> f64 {
        self.stage1.mutual_information_nats(px) - lambda * self.end_to_end.mutual_information_nats(px)
    }
}

impl TryFrom<BcRepr> for DegradedBC {
    type Error = Error;

    fn try_from(r: BcRepr) -> Result<Self> {
        DegradedBC::new(r.stage1, r.stage2)
    }
}

impl From<DegradedBC> for BcRepr {
    fn from(b: DegradedBC) -> Self {
        BcRepr {
            stage1: b.stage1,
            stage2: b.stage2,
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

fn check_input(bc: &DegradedBC, px: &FiniteDist) -> Result<()> {
    if px.support_size() != bc.input_size() {
        return Err(Error::DimensionMismatch {
            expected: bc.input_size(),
            got: px.support_size(),
        });
    }
    Ok(())
}

/// `I(X;Y) − λ I(X;Z)` under `px · q`.
pub fn s_lambda(bc: &DegradedBC, px: &FiniteDist, lambda: f64, unit: Unit) -> Result<f64> {
    check_lambda(lambda)?;
    check_input(bc, px)?;
    Ok(unit.from_nats(bc.s_nats(px.mass(), lambda)))
}

/// `I(X;Y|V) − λ I(X;Z|V)` for a joint `p(v,x)` (axes `[V, X]`).
pub fn s_lambda_conditional(bc: &DegradedBC, joint: &JointDist, lambda: f64, unit: Unit) -> Result<f64> {
    check_lambda(lambda)?;
    if joint.rank() != 2 || joint.axis_sizes()[1] != bc.input_size() {
        return Err(Error::InvalidDistribution(format!(
            "expected a [V, X] joint with |X| = {}, got axes {:?}",
            bc.input_size(),
            joint.axis_sizes()
        )));
    }
    let (pv, slices) = joint.condition_on_first();
    let total: f64 = pv
        .mass()
        .iter()
        .zip(&slices)
        .map(|(&w, px)| if w > 0.0 { w * bc.s_nats(px, lambda) } else { 0.0 })
        .sum();
    Ok(unit.from_nats(total))
}

/// Knobs of the auxiliary-split search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    /// `|V|`; `|X| + 1` when absent.
    pub v_size: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0x5eed_0fe1,
            v_size: None,
        }
    }
}

/// Seed of restart `index` under base seed `seed`.
pub(crate) fn restart_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Coordinate pattern search with step halving; maximizes `f`.
pub(crate) fn pattern_search(
    f: &mut impl FnMut(&[f64]) -> f64,
    mut x: Vec<f64>,
    step: f64,
    bound: f64,
) -> (Vec<f64>, f64) {
    let mut best = f(&x);
    let mut step = step;
    let mut evals = 1;
    while step >= SEARCH_MIN_STEP && evals < SEARCH_MAX_EVALS {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                let moved = (old + dir * step).clamp(-bound, bound);
                if moved == old {
                    continue;
                }
                x[i] = moved;
                let v = f(&x);
                evals += 1;
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best)
}

fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - m).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// Value of the split `p(v|x) = softmax(θ_x)` at marginal `q`:
/// `Σ_v p(v) s_λ(p(x|v))`.
fn split_value(bc: &DegradedBC, lambda: f64, q: &[f64], theta: &[f64], nv: usize, scratch: &mut SplitScratch) -> f64 {
    let nx = q.len();
    for x in 0..nx {
        softmax_into(&theta[x * nv..(x + 1) * nv], &mut scratch.pv_x[x * nv..(x + 1) * nv]);
    }
    let mut total = 0.0;
    for v in 0..nv {
        let mut pv = 0.0;
        for x in 0..nx {
            scratch.cond[x] = q[x] * scratch.pv_x[x * nv + v];
            pv += scratch.cond[x];
        }
        if pv <= 0.0 {
            continue;
        }
        scratch.cond.iter_mut().for_each(|c| *c /= pv);
        total += pv * bc.s_nats(&scratch.cond, lambda);
    }
    total
}

struct SplitScratch {
    pv_x: Vec<f64>,
    cond: Vec<f64>,
}

/// Best split found by the multistart search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    /// `Σ_v p(v) s_λ(p(x|v))` in nats.
    pub value: f64,
    /// `p(v)`.
    pub pv: Vec<f64>,
    /// Row `v` is `p(x|v)`.
    pub px_given_v: Vec<Vec<f64>>,
    /// Restart that produced the optimum.
    pub restart: usize,
}

/// Maximizes `Σ_v p(v) s_λ(p(x|v))` over splits of `q` into `|V|` parts.
/// The constant split (value `s_λ(q)`) is always a candidate, and ties go to
/// the lowest restart index.
pub fn search_split(bc: &DegradedBC, lambda: f64, q: &FiniteDist, opts: &SearchOptions) -> Result<SplitResult> {
    check_lambda(lambda)?;
    check_input(bc, q)?;
    let nx = bc.input_size();
    let nv = opts.v_size.unwrap_or(nx + 1).max(1);
    let qm = q.mass();
    let mut scratch = SplitScratch {
        pv_x: vec![0.0; nx * nv],
        cond: vec![0.0; nx],
    };
    let mut best_theta = vec![0.0; nx * nv];
    let mut best = bc.s_nats(qm, lambda);
    let mut best_restart = 0;
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, r));
        let theta0: Vec<f64> = (0..nx * nv).map(|_| rng.random_range(-4.0..4.0)).collect();
        let (theta, value) = pattern_search(
            &mut |t| split_value(bc, lambda, qm, t, nv, &mut scratch),
            theta0,
            1.0,
            LOGIT_BOUND,
        );
        if value > best {
            best = value;
            best_theta = theta;
            best_restart = r;
        }
    }
    // recover the split from the winning logits
    let mut pv_x = vec![0.0; nx * nv];
    for x in 0..nx {
        softmax_into(&best_theta[x * nv..(x + 1) * nv], &mut pv_x[x * nv..(x + 1) * nv]);
    }
    let mut pv = vec![0.0; nv];
    let mut px_given_v = vec![vec![0.0; nx]; nv];
    for v in 0..nv {
        for x in 0..nx {
            px_given_v[v][x] = qm[x] * pv_x[x * nv + v];
            pv[v] += px_given_v[v][x];
        }
        if pv[v] > 0.0 {
            px_given_v[v].iter_mut().for_each(|c| *c /= pv[v]);
        } else {
            px_given_v[v] = qm.to_vec();
        }
    }
    Ok(SplitResult {
        value: best,
        pv,
        px_given_v,
        restart: best_restart,
    })
}

/// `s_λ` on a simplex grid together with its upper concave hull.
#[derive(Debug, Clone)]
pub struct EnvelopeGrid {
    bc: DegradedBC,
    lambda: f64,
    resolution: usize,
    points: Vec<Vec<usize>>,
    s: Vec<f64>,
    /// Hull values at the grid points (binary inputs only).
    hull: Option<Vec<f64>>,
    /// Indices of the hull vertices, ascending in `p(x=0)` (binary inputs only).
    vertices: Vec<usize>,
    certified_gap: f64,
}

impl EnvelopeGrid {
    pub fn new(bc: &DegradedBC, lambda: f64, resolution: usize) -> Result<Self> {
        Self::with_cap(bc, lambda, resolution, DEFAULT_GRID_CAP)
    }

    pub fn with_cap(bc: &DegradedBC, lambda: f64, resolution: usize, cap: u128) -> Result<Self> {
        check_lambda(lambda)?;
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "resolution {resolution} below {MIN_RESOLUTION}"
            )));
        }
        let nx = bc.input_size();
        let points = simplex_compositions(nx, resolution, cap)?;
        let r = resolution as f64;
        let mut buf = vec![0.0; nx];
        let s: Vec<f64> = points
            .iter()
            .map(|k| {
                buf.iter_mut().zip(k).for_each(|(b, &ki)| *b = ki as f64 / r);
                bc.s_nats(&buf, lambda)
            })
            .collect();
        let mut grid = Self {
            bc: bc.clone(),
            lambda,
            resolution,
            points,
            s,
            hull: None,
            vertices: Vec::new(),
            certified_gap: 0.0,
        };
        if nx <= 2 {
            grid.build_binary_hull();
        } else {
            grid.certified_gap = grid.s_modulus();
        }
        Ok(grid)
    }

    fn abscissa(&self, i: usize) -> f64 {
        self.points[i][0] as f64 / self.resolution as f64
    }

    fn build_binary_hull(&mut self) {
        let n = self.points.len();
        let mut hull: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (self.abscissa(b) - self.abscissa(a)) * (self.s[i] - self.s[a])
                    - (self.s[b] - self.s[a]) * (self.abscissa(i) - self.abscissa(a));
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        self.vertices = hull;
        let values: Vec<f64> = (0..n).map(|i| self.hull_at_abscissa(self.abscissa(i))).collect();
        self.certified_gap = values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        self.hull = Some(values);
    }

    fn hull_at_abscissa(&self, t: f64) -> f64 {
        let v = &self.vertices;
        if v.len() == 1 {
            return self.s[v[0]];
        }
        let seg = v
            .windows(2)
            .position(|w| t <= self.abscissa(w[1]))
            .unwrap_or(v.len() - 2);
        let (a, b) = (v[seg], v[seg + 1]);
        let (ta, tb) = (self.abscissa(a), self.abscissa(b));
        let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        (1.0 - w) * self.s[a] + w * self.s[b]
    }

    /// Largest change of `s_λ` between grid neighbours (one unit moved
    /// between two coordinates).
    fn s_modulus(&self) -> f64 {
        use std::collections::HashMap;
        let index: HashMap<&[usize], usize> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        let mut worst: f64 = 0.0;
        let mut nb = vec![0usize; self.bc.input_size()];
        for (i, p) in self.points.iter().enumerate() {
            for a in 0..p.len() {
                if p[a] == 0 {
                    continue;
                }
                for b in 0..p.len() {
                    if a == b {
                        continue;
                    }
                    nb.copy_from_slice(p);
                    nb[a] -= 1;
                    nb[b] += 1;
                    if let Some(&j) = index.get(nb.as_slice()) {
                        worst = worst.max((self.s[i] - self.s[j]).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn bc(&self) -> &DegradedBC {
        &self.bc
    }

    /// Certified gap in nats.
    pub fn certified_gap(&self) -> f64 {
        self.certified_gap
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid point `i` as a mass vector.
    pub fn point(&self, i: usize) -> Vec<f64> {
        let r = self.resolution as f64;
        self.points[i].iter().map(|&k| k as f64 / r).collect()
    }

    /// `s_λ` at grid point `i`, nats.
    pub fn s_value(&self, i: usize) -> f64 {
        self.s[i]
    }

    /// Hull values at every grid point (binary inputs), nats.
    pub fn hull_values(&self) -> Option<&[f64]> {
        self.hull.as_deref()
    }

    /// Upper hull of the grid samples evaluated at `q`, nats.
    pub fn hull_value(&self, q: &FiniteDist) -> Result<f64> {
        check_input(&self.bc, q)?;
        if self.hull.is_some() {
            return Ok(self.hull_at_abscissa(q.mass()[0]));
        }
        self.lp_hull_value(q.mass())
    }

    fn lp_hull_value(&self, q: &[f64]) -> Result<f64> {
        let nx = q.len();
        let r = self.resolution as f64;
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self
            .s
            .iter()
            .map(|&s| problem.add_var(s, (0.0, f64::INFINITY)))
            .collect();
        for c in 0..nx - 1 {
            let terms: Vec<_> = vars
                .iter()
                .zip(&self.points)
                .filter(|(_, p)| p[c] > 0)
                .map(|(&v, p)| (v, p[c] as f64 / r))
                .collect();
            problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, q[c]);
        }
        let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
        problem.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
        let solution = problem
            .solve()
            .map_err(|e| Error::Infeasible(format!("hull program: {e}")))?;
        Ok(solution.objective())
    }

    /// Envelope estimate at `q`: the larger of the grid hull and the split
    /// search, never below `s_λ(q)`.
    pub fn estimate(&self, q: &FiniteDist, opts: &SearchOptions) -> Result<EnvelopeEstimate> {
        let hull = self.hull_value(q)?;
        let search = if self.hull.is_some() {
            self.refine_binary(q.mass()[0])
        } else {
            search_split(&self.bc, self.lambda, q, opts)?.value
        };
        let s = self.bc.s_nats(q.mass(), self.lambda);
        Ok(EnvelopeEstimate {
            lambda: self.lambda,
            resolution: self.resolution,
            query: q.mass().to_vec(),
            s_value: s,
            hull_value: hull,
            search_value: search,
            value: hull.max(search).max(s),
            certified_gap: self.certified_gap,
        })
    }

    /// Two-point split `u ≤ t ≤ v` of a binary query `p(x=0) = t`, started at
    /// the bracketing hull vertices and refined off the grid.
    fn refine_binary(&self, t: f64) -> f64 {
        let s_at = |u: f64| self.bc.s_nats(&[u, 1.0 - u], self.lambda);
        let v = &self.vertices;
        let seg = v
            .windows(2)
            .position(|w| t <= self.abscissa(w[1]))
            .unwrap_or(v.len().saturating_sub(2));
        if v.len() < 2 {
            return s_at(t);
        }
        let (ua, vb) = (self.abscissa(v[seg]).min(t), self.abscissa(v[seg + 1]).max(t));
        let chord = |x: &[f64]| {
            let (u, w) = (x[0], x[1]);
            if w - u <= f64::EPSILON {
                return s_at(t);
            }
            ((w - t) * s_at(u) + (t - u) * s_at(w)) / (w - u)
        };
        // pattern search in the box u ∈ [0, t], v ∈ [t, 1]
        let mut x = [ua, vb];
        let mut best = chord(&x);
        let mut step = 1.0 / self.resolution as f64;
        let mut evals = 1;
        while step >= 1e-12 && evals < SEARCH_MAX_EVALS {
            let mut improved = false;
            for i in 0..2 {
                let (lo, hi) = if i == 0 { (0.0, t) } else { (t, 1.0) };
                for dir in [1.0, -1.0] {
                    let old = x[i];
                    let moved = (old + dir * step).clamp(lo, hi);
                    if moved == old {
                        continue;
                    }
                    x[i] = moved;
                    let val = chord(&x);
                    evals += 1;
                    if val > best {
                        best = val;
                        improved = true;
                        break;
                    }
                    x[i] = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }

    /// Envelope value in nats at `q` with default search options.
    pub fn value(&self, q: &FiniteDist) -> Result<f64> {
        Ok(self.estimate(q, &SearchOptions::default())?.value)
    }

    /// Largest second difference `Ĥ_{i-1} − 2Ĥ_i + Ĥ_{i+1}` of the binary
    /// hull; nonpositive up to rounding for a concave hull.
    pub fn max_second_difference(&self) -> Option<f64> {
        self.hull.as_ref().map(|h| {
            h.windows(3)
                .map(|w| w[0] - 2.0 * w[1] + w[2])
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// CSV rows `p_0,..,p_{n-1},s_lambda,S_lambda` with a header line.
    pub fn to_csv(&self, unit: Unit) -> Result<String> {
        let nx = self.bc.input_size();
        let mut out = String::new();
        for c in 0..nx {
            out.push_str(&format!("p{c},"));
        }
        out.push_str("s_lambda,S_lambda\n");
        for i in 0..self.points.len() {
            let p = self.point(i);
            let hull = match &self.hull {
                Some(h) => h[i],
                None => self.lp_hull_value(&p)?,
            };
            for v in &p {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!(
                "{},{}\n",
                unit.from_nats(self.s[i]),
                unit.from_nats(hull)
            ));
        }
        Ok(out)
    }
}

/// Envelope estimate at a single query (all values in nats).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeEstimate {
    pub lambda: f64,
    pub resolution: usize,
    pub query: Vec<f64>,
    /// `s_λ(query)`.
    pub s_value: f64,
    /// Grid-hull interpolation.
    pub hull_value: f64,
    /// Best auxiliary split found.
    pub search_value: f64,
    /// `max(hull_value, search_value, s_value)`.
    pub value: f64,
    pub certified_gap: f64,
}

/// `S_λ` at `query` from a fresh grid at `resolution`.
pub fn envelope(bc: &DegradedBC, lambda: f64, query: &FiniteDist, resolution: usize) -> Result<EnvelopeEstimate> {
    EnvelopeGrid::new(bc, lambda, resolution)?.estimate(query, &SearchOptions::default())
}

/// `Σ_w p(w) S_λ(p_w)` in nats.
pub fn conditional_envelope(grid: &EnvelopeGrid, mixture: &[(f64, FiniteDist)]) -> Result<f64> {
    let weights: Vec<f64> = mixture.iter().map(|(w, _)| *w).collect();
    FiniteDist::new(weights)?;
    let mut total = 0.0;
    for (w, d) in mixture {
        if *w > 0.0 {
            total += w * grid.value(d)?;
        }
    }
    Ok(total)
}

/// Mixed input law `Σ_w p(w) p_w`.
pub fn mixture_mean(mixture: &[(f64, FiniteDist)]) -> Result<FiniteDist> {
    let n = mixture
        .first()
        .map(|(_, d)| d.support_size())
        .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?;
    let mut acc = vec![0.0; n];
    for (w, d) in mixture {
        if d.support_size() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.support_size(),
            });
        }
        acc.iter_mut().zip(d.mass()).for_each(|(a, p)| *a += w * p);
    }
    FiniteDist::from_weights(&acc)
}

/// One instance of the two-letter subadditivity check without feedback.
#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityRecord {
    pub lambda: f64,
    pub joint: Vec<f64>,
    /// Searched lower estimate of `S_λ^{q×q}(X1,X2)`, nats.
    pub lhs: f64,
    /// `S_λ(X1) + S_λ(X2)`, nats.
    pub rhs: f64,
    /// Combined certified gap of the two envelope terms.
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `S_λ^{q×q}(X1,X2) ≤ S_λ(X1) + S_λ(X2)` at each two-letter input
/// law (row-major `|X| x |X|`). The left side is searched over splits with
/// `|V| ≤ |X|² + 1`.
pub fn verify_subadditivity_nofb(
    grid: &EnvelopeGrid,
    joints: &[JointDist],
    opts: &SearchOptions,
) -> Result<Vec<SubadditivityRecord>> {
    let bc = grid.bc();
    let nx = bc.input_size();
    let product = bc.product(bc);
    joints
        .iter()
        .map(|j| {
            if j.axis_sizes() != [nx, nx] {
                return Err(Error::InvalidDistribution(format!(
                    "expected axes [{nx}, {nx}], got {:?}",
                    j.axis_sizes()
                )));
            }
            let flat = FiniteDist::new(j.mass().to_vec())?;
            let lhs = search_split(&product, grid.lambda(), &flat, opts)?.value;
            let m1 = FiniteDist::new(j.marginal(&[0])?.mass().to_vec())?;
            let m2 = FiniteDist::new(j.marginal(&[1])?.mass().to_vec())?;
            let rhs = grid.estimate(&m1, opts)?.value + grid.estimate(&m2, opts)?.value;
            let tolerance = 2.0 * grid.certified_gap();
            Ok(SubadditivityRecord {
                lambda: grid.lambda(),
                joint: j.mass().to_vec(),
                lhs,
                rhs,
                tolerance,
                pass: lhs <= rhs + tolerance + 1e-12,
            })
        })
        .collect()
}

/// Which past outputs the second-letter input may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// `X2` depends on `(V, X1, Y1, Z1)`.
    BothOutputs,
    /// `X2` depends on `(V, X1, Y1)` only.
    StrongOutputOnly,
}

/// A two-letter feedback law on a degraded BC: `p(v)`, `p(x1|v)` and the
/// encoder `p(x2 | v, x1, y1, z1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackJoint {
    pub pv: Vec<f64>,
    /// `|V| x |X|`, row-major.
    pub px1_given_v: Vec<f64>,
    /// `|V| |X| |Y| |Z| x |X|`, row-major over `(v, x1, y1, z1)`.
    pub encoder: Vec<f64>,
}

impl FeedbackJoint {
    pub fn v_size(&self) -> usize {
        self.pv.len()
    }

    /// True when the encoder never looks at `z1`.
    pub fn ignores_weak_output(&self, bc: &DegradedBC) -> bool {
        let (nx, nz) = (bc.input_size(), bc.z_size());
        self.encoder
            .chunks(nx * nz)
            .all(|block| block.chunks(nx).all(|row| row == &block[..nx]))
    }

    /// Joint law over `[V, X1, Y1, Z1, X2, Y2, Z2]`.
    pub fn joint(&self, bc: &DegradedBC) -> Result<JointDist> {
        let (nv, nx, ny, nz) = (self.v_size(), bc.input_size(), bc.y_size(), bc.z_size());
        if self.px1_given_v.len() != nv * nx || self.encoder.len() != nv * nx * ny * nz * nx {
            return Err(Error::DimensionMismatch {
                expected: nv * nx * ny * nz * nx,
                got: self.encoder.len(),
            });
        }
        FiniteDist::new(self.pv.clone())?;
        for row in self.px1_given_v.chunks(nx).chain(self.encoder.chunks(nx)) {
            FiniteDist::new(row.to_vec())?;
        }
        let letter: Vec<f64> = (0..nx)
            .flat_map(|x| {
                let s1 = bc.stage1().row(x);
                (0..ny).flat_map(move |y| bc.stage2().row(y).iter().map(move |q| s1[y] * q))
            })
            .collect();
        let yz = ny * nz;
        let mut mass = Vec::with_capacity(nv * nx * yz * nx * yz);
        for v in 0..nv {
            for x1 in 0..nx {
                let p_vx = self.pv[v] * self.px1_given_v[v * nx + x1];
                for a in 0..yz {
                    let p_a = p_vx * letter[x1 * yz + a];
                    let row = &self.encoder[((v * nx + x1) * yz + a) * nx..][..nx];
                    for (x2, &pe) in row.iter().enumerate() {
                        for b in 0..yz {
                            mass.push(p_a * pe * letter[x2 * yz + b]);
                        }
                    }
                }
            }
        }
        JointDist::from_unnormalized(vec![nv, nx, ny, nz, nx, ny, nz], mass)
    }
}

/// One instance of the two-letter check with feedback.
#[derive(Debug, Clone, Serialize)]
pub struct Prop2Record {
    pub lambda: f64,
    /// `I(X1,X2 → Y1,Y2 | V) − λ I(X1,X2 → Z1,Z2 | V)`, nats.
    pub lhs: f64,
    /// `S_λ(X1) + S_λ(X2)`, nats.
    pub rhs: f64,
    pub tolerance: f64,
    pub encoder_uses_weak_output: bool,
    pub pass: bool,
}

/// Directed two-letter `s⃗_λ(X1,X2 | V)` in nats for a 7-axis feedback joint.
pub fn directed_s_lambda(joint: &JointDist, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let to_y = directed_nats(joint, &[1, 4], &[2, 5], &[0])?;
    let to_z = directed_nats(joint, &[1, 4], &[3, 6], &[0])?;
    Ok(to_y - lambda * to_z)
}

/// Checks `s⃗_λ^{q×q}(X1,X2|V) ≤ S_λ(X1) + S_λ(X2)` on feedback joints.
pub fn verify_prop2(
    grid: &EnvelopeGrid,
    instances: &[FeedbackJoint],
    opts: &SearchOptions,
) -> Result<Vec<Prop2Record>> {
    let bc = grid.bc();
    instances
        .iter()
        .map(|inst| {
            let j = inst.joint(bc)?;
            let lhs = directed_s_lambda(&j, grid.lambda())?;
            let m1 = FiniteDist::new(j.marginal(&[1])?.mass().to_vec())?;
            let m2 = FiniteDist::new(j.marginal(&[4])?.mass().to_vec())?;
            let rhs = grid.estimate(&m1, opts)?.value + grid.estimate(&m2, opts)?.value;
            let tolerance = 2.0 * grid.certified_gap();
            Ok(Prop2Record {
                lambda: grid.lambda(),
                lhs,
                rhs,
                tolerance,
                encoder_uses_weak_output: !inst.ignores_weak_output(bc),
                pass: lhs <= rhs + tolerance + 1e-12,
            })
        })
        .collect()
}
