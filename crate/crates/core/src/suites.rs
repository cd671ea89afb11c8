//! Seeded verification suites. Every suite draws instance `i` from
//! [`instance_rng`]`(seed, i)` and evaluates instances in parallel, so its
//! report is identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directed::{
    block_mutual_information, build_trajectory, directed_information, prop1_record, verify_mi_counterexample,
    verify_rotation, PROP1_TOL,
};
use crate::envelope::{
    conditional_envelope, mixture_mean, verify_prop2, verify_subadditivity_nofb, EnvelopeGrid, FeedbackMode,
    SearchOptions,
};
use crate::error::{Error, Result};
use crate::gaussian::GaussianBCModel;
use crate::gvbc::{verify_gaussian_extremality, EXTREMALITY_TOL, QUANTIZATION_TOL};
use crate::prob::{entropy_nats, FiniteDist, Unit};
use crate::report::{Group, Record, Relation, SuiteReport};
use crate::sampling::{
    instance_rng, random_degraded_bc, random_dist, random_feedback_joint, random_joint, random_linear_system,
    random_open_loop_policy, random_policy, random_channel, random_simplex,
};

pub const MASSEY_TOL: f64 = 1e-12;
pub const ROTATION_TOL: f64 = 1e-9;
pub const COUNTEREXAMPLE_TOL: f64 = 1e-9;
pub const DEFAULT_ENVELOPE_RESOLUTION: usize = 256;
/// Restarts of the split search over the two-letter product channel.
pub const TWO_LETTER_RESTARTS: usize = 8;
/// `λ` used by instance `i` of the envelope suites is `SWEEP_LAMBDAS[i % 3]`.
pub const SWEEP_LAMBDAS: [f64; 3] = [1.0, 1.5, 3.0];
pub const EXTREMALITY_LAMBDAS: [f64; 3] = [1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Massey,
    Prop1,
    Prop2,
    Rotation,
    Subadditivity,
    Extremality,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Massey,
        Suite::Prop1,
        Suite::Prop2,
        Suite::Rotation,
        Suite::Subadditivity,
        Suite::Extremality,
        Suite::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Massey => "massey",
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Rotation => "rotation",
            Suite::Subadditivity => "subadditivity",
            Suite::Extremality => "extremality",
            Suite::Counterexample => "counterexample",
        }
    }

    /// Instances drawn when `samples` is not given.
    pub fn default_samples(self) -> usize {
        match self {
            Suite::Massey | Suite::Prop2 | Suite::Subadditivity => 500,
            Suite::Prop1 => 200,
            Suite::Rotation => 100,
            Suite::Extremality => 10_000,
            Suite::Counterexample => 1,
        }
    }

    /// Unit of the report when none is requested.
    pub fn default_unit(self) -> Unit {
        match self {
            Suite::Rotation | Suite::Extremality => Unit::Nats,
            _ => Unit::Bits,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

/// Run parameters. `samples` is the instance count, or the candidate
/// budget for the extremality suite. `tolerance` replaces the tolerance of
/// every non-diagnostic group.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: Option<usize>,
    pub unit: Option<Unit>,
    pub tolerance: Option<f64>,
    pub resolution: Option<usize>,
    /// Scalar model for the extremality suite.
    pub model: Option<GaussianBCModel>,
    /// Crossover of the counterexample suite.
    pub crossover: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: None,
            unit: None,
            tolerance: None,
            resolution: None,
            model: None,
            crossover: None,
        }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn n(&self, suite: Suite) -> usize {
        self.samples.unwrap_or(suite.default_samples())
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let unit = cfg.unit.unwrap_or(suite.default_unit());
    let groups = match suite {
        Suite::Massey => massey(cfg, unit)?,
        Suite::Prop1 => prop1(cfg, unit)?,
        Suite::Prop2 => prop2(cfg, unit)?,
        Suite::Rotation => rotation(cfg, unit)?,
        Suite::Subadditivity => subadditivity(cfg, unit)?,
        Suite::Extremality => extremality(cfg, unit)?,
        Suite::Counterexample => counterexample(cfg, unit)?,
    };
    Ok(SuiteReport::new(suite.name(), cfg.seed, unit, groups))
}

/// Evaluates `f` on instances `0..n` in parallel and splits the resulting
/// per-instance record lists into `k` columns.
fn columns<F>(n: usize, k: usize, f: F) -> Result<Vec<Vec<Record>>>
where
    F: Fn(usize) -> Result<Vec<Record>> + Sync + Send,
{
    let rows: Vec<Vec<Record>> = (0..n).into_par_iter().map(f).collect::<Result<_>>()?;
    let mut cols = vec![Vec::with_capacity(n); k];
    for row in rows {
        for (c, r) in row.into_iter().enumerate() {
            cols[c].push(r);
        }
    }
    Ok(cols)
}

fn massey(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let tol = cfg.tol(MASSEY_TOL);
    let mut cols = columns(cfg.n(Suite::Massey), 2, |i| {
        let mut rng = instance_rng(cfg.seed, i as u64);
        let (nx, ny, horizon) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(1..=3));
        let ch = random_channel(&mut rng, nx, ny);
        let label = format!("channel {nx}x{ny}, horizon {horizon}");
        let mut out = Vec::with_capacity(2);
        for pol in [
            random_policy(&mut rng, nx, ny, horizon),
            random_open_loop_policy(&mut rng, nx, ny, horizon),
        ] {
            let t = build_trajectory(&ch, &pol, horizon)?;
            let (di, mi) = (directed_information(&t, Unit::Nats)?, block_mutual_information(&t, Unit::Nats)?);
            let relation = if out.is_empty() { Relation::AtMost } else { Relation::Equal };
            out.push(Record::nats(i, label.clone(), relation, di, mi, tol, unit));
        }
        Ok(out)
    })?;
    let open = cols.pop().unwrap_or_default();
    let feedback = cols.pop().unwrap_or_default();
    Ok(vec![
        Group::new(
            "feedback",
            "directed information is at most the block mutual information",
            Relation::AtMost,
            false,
            feedback,
        ),
        Group::new(
            "no-feedback",
            "without feedback the two coincide",
            Relation::Equal,
            false,
            open,
        ),
    ])
}

fn prop1(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let tol = cfg.tol(PROP1_TOL);
    let mut cols = columns(cfg.n(Suite::Prop1), 2, |i| {
        let mut rng = instance_rng(cfg.seed, i as u64);
        let (nx, ny) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let ch = random_channel(&mut rng, nx, ny);
        let pol = random_policy(&mut rng, nx, ny, 2);
        let r = prop1_record(&ch, &pol, Unit::Nats)?;
        let label = format!("channel {nx}x{ny}, two-letter feedback policy");
        Ok(vec![
            Record::nats(i, label.clone(), Relation::AtMost, r.lhs, r.rhs_first + r.rhs_second, tol, unit),
            Record::nats(i, label, Relation::Equal, r.gap, r.output_dependence, tol, unit),
        ])
    })?;
    let identity = cols.pop().unwrap_or_default();
    let sub = cols.pop().unwrap_or_default();
    Ok(vec![
        Group::new(
            "subadditivity",
            "I(X1,X2 -> Y1,Y2) <= I(X1 -> Y1) + I(X2 -> Y2)",
            Relation::AtMost,
            false,
            sub,
        ),
        Group::new(
            "gap-identity",
            "the subadditivity gap equals I(Y1;Y2) on a memoryless channel",
            Relation::Equal,
            false,
            identity,
        ),
    ])
}

fn envelope_grid(cfg: &SuiteConfig, rng: &mut impl Rng, i: usize) -> Result<(EnvelopeGrid, SearchOptions)> {
    let bc = random_degraded_bc(rng, 2, 2, 2);
    let lambda = SWEEP_LAMBDAS[i % SWEEP_LAMBDAS.len()];
    let grid = EnvelopeGrid::new(&bc, lambda, cfg.resolution.unwrap_or(DEFAULT_ENVELOPE_RESOLUTION))?;
    let opts = SearchOptions {
        seed: rng.random(),
        ..SearchOptions::default()
    };
    Ok((grid, opts))
}

fn prop2(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let mut cols = columns(cfg.n(Suite::Prop2), 2, |i| {
        let mut rng = instance_rng(cfg.seed, i as u64);
        let (grid, opts) = envelope_grid(cfg, &mut rng, i)?;
        let both = random_feedback_joint(&mut rng, grid.bc(), 2, FeedbackMode::BothOutputs);
        let strong = random_feedback_joint(&mut rng, grid.bc(), 2, FeedbackMode::StrongOutputOnly);
        let recs = verify_prop2(&grid, &[both, strong], &opts)?;
        Ok(recs
            .iter()
            .zip(["feedback from both outputs", "feedback from the stronger output"])
            .map(|(r, what)| {
                let tol = cfg.tolerance.unwrap_or(r.tolerance + 1e-12);
                let label = format!("binary degraded BC, lambda {}, {what}", r.lambda);
                Record::nats(i, label, Relation::AtMost, r.lhs, r.rhs, tol, unit)
            })
            .collect())
    })?;
    let strong = cols.pop().unwrap_or_default();
    let both = cols.pop().unwrap_or_default();
    Ok(vec![
        Group::new(
            "both-outputs",
            "two-letter directed s_lambda with feedback of (Y1, Z1) is at most S(X1) + S(X2)",
            Relation::AtMost,
            false,
            both,
        ),
        Group::new(
            "strong-output-only",
            "same inequality when the encoder sees Y1 only",
            Relation::AtMost,
            true,
            strong,
        ),
    ])
}

fn rotation(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let tol = cfg.tol(ROTATION_TOL);
    let mut cols = columns(cfg.n(Suite::Rotation), 2, |i| {
        let mut rng = instance_rng(cfg.seed, i as u64);
        let d = 1 + i % 2;
        let mut out = Vec::with_capacity(2);
        for (gain, what) in [(1.0, "random feedback gain"), (0.0, "zero feedback gain")] {
            let sys = random_linear_system(&mut rng, d, gain);
            let r = verify_rotation(&sys)?;
            let label = format!("linear Gaussian system, d = {d}, {what}");
            out.push(Record::nats(i, label, Relation::Equal, r.original, r.rotated, tol, unit));
        }
        Ok(out)
    })?;
    let zero = cols.pop().unwrap_or_default();
    let feedback = cols.pop().unwrap_or_default();
    Ok(vec![
        Group::new(
            "feedback",
            "directed information is unchanged by rotating both letters",
            Relation::Equal,
            false,
            feedback,
        ),
        Group::new(
            "zero-gain",
            "same identity for letters without feedback",
            Relation::Equal,
            true,
            zero,
        ),
    ])
}

fn subadditivity(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let cols = columns(cfg.n(Suite::Subadditivity), 4, |i| {
        let mut rng = instance_rng(cfg.seed, i as u64);
        let (grid, opts) = envelope_grid(cfg, &mut rng, i)?;
        let gap = grid.certified_gap();
        let label = format!("binary degraded BC, lambda {}", grid.lambda());
        let s_env = |q: &FiniteDist| grid.estimate(q, &opts).map(|e| e.value);

        // dominance at the grid point where s comes closest to the hull
        let hull = grid.hull_values().expect("binary grid keeps its hull");
        let worst = (0..grid.len())
            .max_by(|&a, &b| {
                (grid.s_value(a) - hull[a])
                    .total_cmp(&(grid.s_value(b) - hull[b]))
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        let dominance = Record::nats(
            i,
            label.clone(),
            Relation::AtMost,
            grid.s_value(worst),
            hull[worst],
            cfg.tol(1e-12),
            unit,
        );

        let (a, b) = (rng.random_range(0..grid.len()), rng.random_range(0..grid.len()));
        let (pa, pb) = (grid.point(a), grid.point(b));
        let mid: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| 0.5 * (x + y)).collect();
        let chord = 0.5 * (s_env(&FiniteDist::new(pa)?)? + s_env(&FiniteDist::new(pb)?)?);
        let concavity = Record::nats(
            i,
            label.clone(),
            Relation::AtMost,
            chord,
            s_env(&FiniteDist::new(mid)?)?,
            cfg.tol(gap + 1e-12),
            unit,
        );

        let weights = random_simplex(&mut rng, 3);
        let mixture: Vec<(f64, FiniteDist)> = weights.into_iter().map(|w| (w, random_dist(&mut rng, 2))).collect();
        let jensen = Record::nats(
            i,
            label.clone(),
            Relation::AtMost,
            conditional_envelope(&grid, &mixture)?,
            s_env(&mixture_mean(&mixture)?)?,
            cfg.tol(gap + 1e-12),
            unit,
        );

        let joint = random_joint(&mut rng, &[2, 2]);
        let product_opts = SearchOptions {
            restarts: TWO_LETTER_RESTARTS,
            ..opts
        };
        let r = &verify_subadditivity_nofb(&grid, &[joint], &product_opts)?[0];
        let eq16 = Record::nats(
            i,
            label,
            Relation::AtMost,
            r.lhs,
            r.rhs,
            cfg.tol(r.tolerance + 1e-12),
            unit,
        );
        Ok(vec![dominance, concavity, jensen, eq16])
    })?;
    let names = [
        ("dominance", "the envelope dominates s_lambda on the grid"),
        ("concavity", "the envelope is midpoint concave"),
        ("jensen", "sum_w p(w) S(p_w) <= S(sum_w p(w) p_w)"),
        ("two-letter", "S over the product channel is at most S(X1) + S(X2)"),
    ];
    Ok(names
        .iter()
        .zip(cols)
        .map(|((name, claim), recs)| Group::new(name, claim, Relation::AtMost, false, recs))
        .collect())
}

fn extremality(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let model = match &cfg.model {
        Some(m) => m.clone(),
        None => GaussianBCModel::scalar(1.0, 1.5, 4.0)?,
    };
    let budget = cfg.n(Suite::Extremality);
    let reports = EXTREMALITY_LAMBDAS
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let seed = instance_rng(cfg.seed, k as u64).random();
            verify_gaussian_extremality(&model, lambda, budget, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let label = |r: &crate::gvbc::ExtremalityReport| format!("scalar model, lambda {}, {} candidates", r.lambda, r.candidates);
    let search = reports
        .iter()
        .enumerate()
        .map(|(k, r)| {
            Record::nats(
                k,
                label(r),
                Relation::AtMost,
                r.best_candidate,
                r.closed_form,
                cfg.tol(EXTREMALITY_TOL),
                unit,
            )
        })
        .collect();
    let at_dagger = reports
        .iter()
        .enumerate()
        .map(|(k, r)| {
            Record::nats(
                k,
                label(r),
                Relation::Equal,
                r.quantized_at_k_dagger,
                r.closed_form,
                cfg.tol(QUANTIZATION_TOL),
                unit,
            )
        })
        .collect();
    let at_prime = reports
        .iter()
        .enumerate()
        .map(|(k, r)| {
            Record::nats(
                k,
                label(r),
                Relation::Equal,
                r.quantized_at_k_prime,
                r.gaussian_at_k_prime,
                cfg.tol(QUANTIZATION_TOL),
                unit,
            )
        })
        .collect();
    Ok(vec![
        Group::new(
            "discrete-search",
            "no discrete (V, X) candidate beats the Gaussian value",
            Relation::AtMost,
            false,
            search,
        ),
        Group::new(
            "quantized-optimum",
            "a 65-atom quantized Gaussian at the optimal power attains the Gaussian value",
            Relation::Equal,
            false,
            at_dagger,
        ),
        Group::new(
            "quantized-full-power",
            "a 65-atom quantized Gaussian at full power attains the Gaussian objective",
            Relation::Equal,
            false,
            at_prime,
        ),
    ])
}

fn counterexample(cfg: &SuiteConfig, unit: Unit) -> Result<Vec<Group>> {
    let p = cfg.crossover.unwrap_or(0.4);
    let r = verify_mi_counterexample(p, Unit::Nats)?;
    let tol = cfg.tol(Unit::Bits.to_nats(COUNTEREXAMPLE_TOL));
    let ln2 = std::f64::consts::LN_2;
    let h = entropy_nats(&[p, 1.0 - p]);
    let label = |what: &str| format!("BSC({p}), X1 uniform, X2 = Z1: {what}");
    Ok(vec![
        Group::new(
            "mi-subadditivity-fails",
            "I(X1,X2;Z1,Z2) exceeds I(X1;Z1) + I(X2;Z2)",
            Relation::Exceeds,
            false,
            vec![Record::nats(
                0,
                label("joint vs marginal mutual information"),
                Relation::Exceeds,
                r.joint_mi,
                r.marginal_mi_sum,
                tol,
                unit,
            )],
        ),
        Group::new(
            "directed-subadditivity-holds",
            "I(X1,X2 -> Z1,Z2) <= I(X1 -> Z1) + I(X2 -> Z2)",
            Relation::AtMost,
            false,
            vec![Record::nats(
                0,
                label("directed vs per-letter directed information"),
                Relation::AtMost,
                r.directed,
                r.directed_sum,
                tol,
                unit,
            )],
        ),
        Group::new(
            "closed-form",
            "enumerated values equal 1 bit, 2(1 - H(p)) and 1 - H(p)",
            Relation::Equal,
            false,
            vec![
                Record::nats(0, label("joint mutual information"), Relation::Equal, r.joint_mi, ln2, tol, unit),
                Record::nats(
                    1,
                    label("sum of marginal mutual informations"),
                    Relation::Equal,
                    r.marginal_mi_sum,
                    2.0 * (ln2 - h),
                    tol,
                    unit,
                ),
                Record::nats(2, label("directed information"), Relation::Equal, r.directed, ln2 - h, tol, unit),
            ],
        ),
    ])
}
