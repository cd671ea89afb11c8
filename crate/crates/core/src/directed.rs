//! Exact directed information on finite-horizon trajectory laws with
//! feedback, and its Gaussian counterpart for two-letter linear feedback.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_entropy, schur_conditional_range, CovMatrix, LinearFeedbackSystem,
};
use crate::prob::{clamp_nonnegative, cmi_nats, mi_nats, DMChannel, FiniteDist, JointDist, Unit};

/// Largest horizon accepted by [`build_trajectory`].
pub const MAX_HORIZON: usize = 4;
/// Default cap on trajectory cells `(|X||Y|)^N`.
pub const DEFAULT_STATE_CAP: u128 = 1 << 24;
/// Tolerance for the subadditivity gap of two-letter checks.
pub const PROP1_TOL: f64 = 1e-10;

/// Feedback encoder: at step `n` (0-based) the law of `X_{n+1}` given the
/// history `(x_1..x_n, y_1..y_n)`.
///
/// Step `n` is a row-major table with `|X|^n |Y|^n` rows of length `|X|`.
/// A history is indexed by `xs * |Y|^n + ys`, where `xs` and `ys` read the
/// past inputs and outputs as base-`|X|` and base-`|Y|` numbers, earliest
/// letter most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyRepr", into = "PolicyRepr")]
pub struct FeedbackPolicy {
    input_size: usize,
    output_size: usize,
    steps: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyRepr {
    pub input_size: usize,
    pub output_size: usize,
    pub steps: Vec<Vec<f64>>,
}

fn history_count(nx: usize, ny: usize, n: usize) -> usize {
    (nx * ny).pow(n as u32)
}

/// Decodes a history index into `(xs, ys)` with the earliest letter first.
fn decode_history(nx: usize, ny: usize, n: usize, h: usize, xs: &mut [usize], ys: &mut [usize]) {
    let ny_n = ny.pow(n as u32);
    let (mut xi, mut yi) = (h / ny_n, h % ny_n);
    for k in (0..n).rev() {
        xs[k] = xi % nx;
        xi /= nx;
        ys[k] = yi % ny;
        yi /= ny;
    }
}

impl FeedbackPolicy {
    pub fn new(input_size: usize, output_size: usize, mut steps: Vec<Vec<f64>>) -> Result<Self> {
        if input_size == 0 || output_size == 0 {
            return Err(Error::InvalidParameter("empty policy alphabet".into()));
        }
        if steps.is_empty() || steps.len() > MAX_HORIZON {
            return Err(Error::InvalidParameter(format!(
                "horizon {} outside 1..={MAX_HORIZON}",
                steps.len()
            )));
        }
        for (n, table) in steps.iter_mut().enumerate() {
            let rows = history_count(input_size, output_size, n);
            if table.len() != rows * input_size {
                return Err(Error::DimensionMismatch {
                    expected: rows * input_size,
                    got: table.len(),
                });
            }
            for row in table.chunks_mut(input_size) {
                FiniteDist::new(row.to_vec())?;
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= total);
            }
        }
        Ok(Self {
            input_size,
            output_size,
            steps,
        })
    }

    /// Builds a policy from a closure returning the input law for each
    /// `(step, past inputs, past outputs)`.
    pub fn from_fn(
        input_size: usize,
        output_size: usize,
        horizon: usize,
        mut f: impl FnMut(usize, &[usize], &[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let mut steps = Vec::with_capacity(horizon);
        let (mut xs, mut ys) = (vec![0; horizon], vec![0; horizon]);
        for n in 0..horizon {
            let rows = history_count(input_size, output_size, n);
            let mut table = Vec::with_capacity(rows * input_size);
            for h in 0..rows {
                decode_history(input_size, output_size, n, h, &mut xs, &mut ys);
                let row = f(n, &xs[..n], &ys[..n]);
                if row.len() != input_size {
                    return Err(Error::DimensionMismatch {
                        expected: input_size,
                        got: row.len(),
                    });
                }
                table.extend(row);
            }
            steps.push(table);
        }
        Self::new(input_size, output_size, steps)
    }

    /// Memoryless policy drawing every input from `laws[n]`.
    pub fn open_loop(laws: &[FiniteDist], output_size: usize) -> Result<Self> {
        let nx = laws.first().map_or(0, FiniteDist::support_size);
        Self::from_fn(nx, output_size, laws.len(), |n, _, _| laws[n].mass().to_vec())
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn step(&self, n: usize) -> &[f64] {
        &self.steps[n]
    }

    /// True when no row depends on the past outputs.
    pub fn ignores_feedback(&self) -> bool {
        let (nx, ny) = (self.input_size, self.output_size);
        self.steps.iter().enumerate().all(|(n, table)| {
            let ny_n = ny.pow(n as u32);
            table.chunks(nx).enumerate().all(|(h, row)| {
                let base = (h / ny_n) * ny_n;
                let reference = &table[base * nx..(base + 1) * nx];
                row.iter().zip(reference).all(|(a, b)| (a - b).abs() <= 1e-15)
            })
        })
    }
}

impl TryFrom<PolicyRepr> for FeedbackPolicy {
    type Error = Error;

    fn try_from(r: PolicyRepr) -> Result<Self> {
        FeedbackPolicy::new(r.input_size, r.output_size, r.steps)
    }
}

impl From<FeedbackPolicy> for PolicyRepr {
    fn from(p: FeedbackPolicy) -> Self {
        PolicyRepr {
            input_size: p.input_size,
            output_size: p.output_size,
            steps: p.steps,
        }
    }
}

/// Joint law of `(X_1..X_N, Y_1..Y_N)`; axis `n` is `X_{n+1}` and axis
/// `N + n` is `Y_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDist {
    horizon: usize,
    joint: JointDist,
}

impl TrajectoryDist {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn joint(&self) -> &JointDist {
        &self.joint
    }

    pub fn input_axes(&self) -> Vec<usize> {
        (0..self.horizon).collect()
    }

    pub fn output_axes(&self) -> Vec<usize> {
        (self.horizon..2 * self.horizon).collect()
    }
}

/// Exact trajectory law by forward recursion
/// `p(x^n, y^n) = p(x^{n-1}, y^{n-1}) pol(x_n | ·) ch(y_n | x_n)`.
pub fn build_trajectory(ch: &DMChannel, pol: &FeedbackPolicy, horizon: usize) -> Result<TrajectoryDist> {
    build_trajectory_capped(ch, pol, horizon, DEFAULT_STATE_CAP)
}

pub fn build_trajectory_capped(
    ch: &DMChannel,
    pol: &FeedbackPolicy,
    horizon: usize,
    cap: u128,
) -> Result<TrajectoryDist> {
    let (nx, ny) = (ch.input_size(), ch.output_size());
    if pol.input_size() != nx || pol.output_size() != ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            got: pol.input_size() * pol.output_size(),
        });
    }
    if horizon == 0 || horizon > pol.horizon() {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} outside 1..={}",
            pol.horizon()
        )));
    }
    let cells = ((nx * ny) as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if cells > cap {
        return Err(Error::StateSpaceTooLarge { cells, cap });
    }
    // mass indexed by xs * |Y|^n + ys, matching the policy's history index
    let mut mass = vec![1.0];
    for n in 0..horizon {
        let ny_n = ny.pow(n as u32);
        let table = pol.step(n);
        let mut next = vec![0.0; mass.len() * nx * ny];
        let ny_next = ny_n * ny;
        for (h, &p) in mass.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (xi, yi) = (h / ny_n, h % ny_n);
            for (x, &px) in table[h * nx..(h + 1) * nx].iter().enumerate() {
                let pxh = p * px;
                if pxh == 0.0 {
                    continue;
                }
                let base = (xi * nx + x) * ny_next + yi * ny;
                for (y, &py) in ch.row(x).iter().enumerate() {
                    next[base + y] += pxh * py;
                }
            }
        }
        mass = next;
    }
    let mut axes = vec![nx; horizon];
    axes.extend(std::iter::repeat_n(ny, horizon));
    Ok(TrajectoryDist {
        horizon,
        joint: JointDist::from_unnormalized(axes, mass)?,
    })
}

/// `Σ_n I(X^n; Y_n | Y^{n-1}, C)` in nats on an arbitrary joint, where
/// `inputs[n]` and `outputs[n]` are the axes of letter `n` and `given` is
/// extra conditioning common to every term.
pub(crate) fn directed_nats(
    j: &JointDist,
    inputs: &[usize],
    outputs: &[usize],
    given: &[usize],
) -> Result<f64> {
    if inputs.len() != outputs.len() || inputs.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            got: outputs.len(),
        });
    }
    let mut total = 0.0;
    for n in 0..inputs.len() {
        let mut cond: Vec<usize> = given.to_vec();
        cond.extend_from_slice(&outputs[..n]);
        total += cmi_nats(j, &inputs[..=n], &outputs[n..=n], &cond)?;
    }
    Ok(clamp_nonnegative(total))
}

/// Directed information `I(X^N → Y^N)` of a trajectory.
pub fn directed_information(t: &TrajectoryDist, unit: Unit) -> Result<f64> {
    directed_information_axes(t.joint(), &t.input_axes(), &t.output_axes(), unit)
}

/// Directed information between explicit per-letter input and output axes.
pub fn directed_information_axes(
    j: &JointDist,
    input_axes: &[usize],
    output_axes: &[usize],
    unit: Unit,
) -> Result<f64> {
    Ok(unit.from_nats(directed_nats(j, input_axes, output_axes, &[])?))
}

/// Directed information conditioned on extra axes `given` in every term.
pub fn conditional_directed_information(
    j: &JointDist,
    input_axes: &[usize],
    output_axes: &[usize],
    given: &[usize],
    unit: Unit,
) -> Result<f64> {
    Ok(unit.from_nats(directed_nats(j, input_axes, output_axes, given)?))
}

/// Block mutual information `I(X^N; Y^N)`.
pub fn block_mutual_information(t: &TrajectoryDist, unit: Unit) -> Result<f64> {
    Ok(unit.from_nats(mi_nats(t.joint(), &t.input_axes(), &t.output_axes())?))
}

/// Outcome of the two-letter subadditivity check for one policy.
#[derive(Debug, Clone, Serialize)]
pub struct Prop1Record {
    /// `I(X1,X2 → Y1,Y2)`.
    pub lhs: f64,
    /// `I(X1 → Y1)`.
    pub rhs_first: f64,
    /// `I(X2 → Y2)`.
    pub rhs_second: f64,
    /// `rhs_first + rhs_second − lhs`.
    pub gap: f64,
    /// `I(Y1;Y2)`; for a memoryless channel this equals the gap.
    pub output_dependence: f64,
    pub equality: bool,
    pub pass: bool,
}

/// Checks `I(X1,X2 → Y1,Y2) ≤ I(X1 → Y1) + I(X2 → Y2)` for each two-letter
/// policy over `ch`. Values are in `unit`.
pub fn verify_prop1(ch: &DMChannel, policies: &[FeedbackPolicy], unit: Unit) -> Result<Vec<Prop1Record>> {
    policies
        .iter()
        .map(|pol| prop1_record(ch, pol, unit))
        .collect()
}

pub(crate) fn prop1_record(ch: &DMChannel, pol: &FeedbackPolicy, unit: Unit) -> Result<Prop1Record> {
    let t = build_trajectory(ch, pol, 2)?;
    let j = t.joint();
    let lhs = directed_nats(j, &[0, 1], &[2, 3], &[])?;
    let first = mi_nats(j, &[0], &[2])?;
    let second = mi_nats(j, &[1], &[3])?;
    let dependence = mi_nats(j, &[2], &[3])?;
    let gap = first + second - lhs;
    Ok(Prop1Record {
        lhs: unit.from_nats(lhs),
        rhs_first: unit.from_nats(first),
        rhs_second: unit.from_nats(second),
        gap: unit.from_nats(gap),
        output_dependence: unit.from_nats(dependence),
        equality: gap.abs() <= PROP1_TOL,
        pass: gap >= -PROP1_TOL,
    })
}

/// Values of the feedback counterexample to mutual-information
/// subadditivity: BSC(p), `X1` uniform, `X2 = Z1`.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub crossover: f64,
    /// `I(X1,X2; Z1,Z2)`.
    pub joint_mi: f64,
    /// `I(X1;Z1) + I(X2;Z2)`.
    pub marginal_mi_sum: f64,
    /// `I(X1,X2 → Z1,Z2)`.
    pub directed: f64,
    /// `I(X1 → Z1) + I(X2 → Z2)`.
    pub directed_sum: f64,
    /// Joint MI strictly exceeds the marginal sum.
    pub mi_subadditivity_violated: bool,
    /// The directed inequality holds.
    pub directed_subadditivity_holds: bool,
}

pub fn verify_mi_counterexample(p: f64, unit: Unit) -> Result<CounterexampleReport> {
    let ch = DMChannel::bsc(p)?;
    let pol = FeedbackPolicy::from_fn(2, 2, 2, |n, _, ys| match n {
        0 => vec![0.5, 0.5],
        _ => FiniteDist::point(2, ys[0]).into_mass(),
    })?;
    let t = build_trajectory(&ch, &pol, 2)?;
    let j = t.joint();
    let joint_mi = mi_nats(j, &[0, 1], &[2, 3])?;
    let marginal = mi_nats(j, &[0], &[2])? + mi_nats(j, &[1], &[3])?;
    let directed = directed_nats(j, &[0, 1], &[2, 3], &[])?;
    // a single-letter directed term is the plain mutual information
    let directed_sum = marginal;
    Ok(CounterexampleReport {
        crossover: p,
        joint_mi: unit.from_nats(joint_mi),
        marginal_mi_sum: unit.from_nats(marginal),
        directed: unit.from_nats(directed),
        directed_sum: unit.from_nats(directed_sum),
        mi_subadditivity_violated: joint_mi > marginal + PROP1_TOL,
        directed_subadditivity_holds: directed <= directed_sum + PROP1_TOL,
    })
}

fn block(d: usize, b: usize) -> Vec<usize> {
    (b * d..(b + 1) * d).collect()
}

/// Conditional Gaussian entropy `h(keep | given)` on the range of the given
/// block.
fn conditional_entropy(cov: &CovMatrix, keep: &[usize], given: &[usize]) -> Result<f64> {
    let h = gaussian_entropy(&schur_conditional_range(cov, keep, given)?);
    if h == f64::NEG_INFINITY {
        return Err(Error::SingularConditioning);
    }
    Ok(h)
}

/// Two-letter Gaussian directed information from the covariance of
/// `(X1, X2, Y1, Y2)` with blocks of size `d`, in nats:
/// `h(Y1) + h(Y2|Y1) − h(Y1|X1) − h(Y2|X1,X2,Y1)`.
pub fn gaussian_directed_information_cov(cov: &CovMatrix, d: usize) -> Result<f64> {
    if cov.dim() != 4 * d || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: 4 * d,
            got: cov.dim(),
        });
    }
    let (x1, x2, y1, y2) = (block(d, 0), block(d, 1), block(d, 2), block(d, 3));
    let mut x1x2y1 = x1.clone();
    x1x2y1.extend(&x2);
    x1x2y1.extend(&y1);
    let value = conditional_entropy(cov, &y1, &[])? + conditional_entropy(cov, &y2, &y1)?
        - conditional_entropy(cov, &y1, &x1)?
        - conditional_entropy(cov, &y2, &x1x2y1)?;
    Ok(value.max(0.0))
}

/// Directed information `I(X1,X2 → Y1,Y2)` of a linear feedback system in
/// nats.
pub fn gaussian_directed_information(sys: &LinearFeedbackSystem) -> Result<f64> {
    gaussian_directed_information_cov(&sys.composite_cov(), sys.dim())
}

/// The two-letter rotation `R = (1/√2)[[I, I], [I, −I]]` applied to both the
/// input pair and the output pair.
pub fn rotation_matrix(d: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut r = DMatrix::zeros(4 * d, 4 * d);
    for half in 0..2 {
        let o = 2 * d * half;
        for i in 0..d {
            r[(o + i, o + i)] = s;
            r[(o + i, o + d + i)] = s;
            r[(o + d + i, o + i)] = s;
            r[(o + d + i, o + d + i)] = -s;
        }
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    /// `I(X1,X2 → Y1,Y2)` in nats.
    pub original: f64,
    /// `I(U1,U2 → V1,V2)` in nats.
    pub rotated: f64,
    /// `rotated − original`.
    pub difference: f64,
}

/// Compares the directed information of a linear feedback system with that
/// of its rotated letters. Both letters must share the noise covariance.
pub fn verify_rotation(sys: &LinearFeedbackSystem) -> Result<RotationReport> {
    let asym = (sys.noise1.matrix() - sys.noise2.matrix()).amax();
    if asym > 1e-12 {
        return Err(Error::Hypothesis(format!(
            "letters have different noise covariances (max entry difference {asym:e})"
        )));
    }
    let d = sys.dim();
    let cov = sys.composite_cov();
    let rotated = cov.congruence(&rotation_matrix(d))?;
    let original = gaussian_directed_information_cov(&cov, d)?;
    let rot = gaussian_directed_information_cov(&rotated, d)?;
    Ok(RotationReport {
        original,
        rotated: rot,
        difference: rot - original,
    })
}
