//! Seeded random instances for the verification suites. Instance `i` under
//! seed `s` draws from its own ChaCha8 stream, so results do not depend on
//! evaluation order or worker count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::directed::FeedbackPolicy;
use crate::envelope::{DegradedBC, FeedbackJoint, FeedbackMode};
use crate::gaussian::{CovMatrix, LinearFeedbackSystem};
use crate::prob::{DMChannel, FiniteDist, JointDist};

/// Independent generator for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Flat Dirichlet(1) sample of length `n`.
pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

pub fn random_dist(rng: &mut impl Rng, n: usize) -> FiniteDist {
    FiniteDist::new(random_simplex(rng, n)).expect("normalized sample")
}

pub fn random_joint(rng: &mut impl Rng, axes: &[usize]) -> JointDist {
    let n = axes.iter().product();
    JointDist::new(axes.to_vec(), random_simplex(rng, n)).expect("normalized sample")
}

pub fn random_channel(rng: &mut impl Rng, input_size: usize, output_size: usize) -> DMChannel {
    let rows: Vec<f64> = (0..input_size)
        .flat_map(|_| random_simplex(rng, output_size))
        .collect();
    DMChannel::new(input_size, output_size, rows).expect("stochastic rows")
}

pub fn random_degraded_bc(rng: &mut impl Rng, x: usize, y: usize, z: usize) -> DegradedBC {
    DegradedBC::new(random_channel(rng, x, y), random_channel(rng, y, z)).expect("conforming stages")
}

/// Feedback policy whose step laws are independent Dirichlet rows.
pub fn random_policy(rng: &mut impl Rng, input_size: usize, output_size: usize, horizon: usize) -> FeedbackPolicy {
    FeedbackPolicy::from_fn(input_size, output_size, horizon, |_, _, _| random_simplex(rng, input_size))
        .expect("policy shape")
}

/// Policy whose input laws ignore every past output (inputs may still
/// depend on past inputs).
pub fn random_open_loop_policy(
    rng: &mut impl Rng,
    input_size: usize,
    output_size: usize,
    horizon: usize,
) -> FeedbackPolicy {
    let tables: Vec<Vec<Vec<f64>>> = (0..horizon)
        .map(|n| {
            (0..input_size.pow(n as u32))
                .map(|_| random_simplex(rng, input_size))
                .collect()
        })
        .collect();
    FeedbackPolicy::from_fn(input_size, output_size, horizon, |n, xs, _| {
        let idx = xs.iter().fold(0, |acc, &x| acc * input_size + x);
        tables[n][idx].clone()
    })
    .expect("policy shape")
}

/// Two-letter feedback law on `bc` with `|V| = v_size`. Rows of the encoder
/// are sparse-ish Dirichlet draws so that deterministic encoders are
/// represented.
pub fn random_feedback_joint(rng: &mut impl Rng, bc: &DegradedBC, v_size: usize, mode: FeedbackMode) -> FeedbackJoint {
    let (nx, ny, nz) = (bc.input_size(), bc.y_size(), bc.z_size());
    let pv = random_simplex(rng, v_size);
    let px1_given_v: Vec<f64> = (0..v_size).flat_map(|_| random_simplex(rng, nx)).collect();
    let mut encoder = Vec::with_capacity(v_size * nx * ny * nz * nx);
    for _ in 0..v_size * nx * ny {
        match mode {
            FeedbackMode::BothOutputs => {
                for _ in 0..nz {
                    encoder.extend(encoder_row(rng, nx));
                }
            }
            FeedbackMode::StrongOutputOnly => {
                let row = encoder_row(rng, nx);
                for _ in 0..nz {
                    encoder.extend_from_slice(&row);
                }
            }
        }
    }
    FeedbackJoint {
        pv,
        px1_given_v,
        encoder,
    }
}

fn encoder_row(rng: &mut impl Rng, nx: usize) -> Vec<f64> {
    if rng.random_bool(0.5) {
        FiniteDist::point(nx, rng.random_range(0..nx)).into_mass()
    } else {
        random_simplex(rng, nx)
    }
}

pub fn random_gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

/// Positive definite covariance `B Bᵀ + floor·I`.
pub fn random_cov(rng: &mut impl Rng, d: usize, floor: f64) -> CovMatrix {
    let b = random_gaussian_matrix(rng, d, d, 1.0);
    let m = &b * b.transpose() + DMatrix::identity(d, d) * floor;
    CovMatrix::from_matrix(m).expect("positive definite by construction")
}

/// Linear feedback system with equal noise covariance on both letters.
/// `gain_scale = 0` yields a system without feedback.
pub fn random_linear_system(rng: &mut impl Rng, d: usize, gain_scale: f64) -> LinearFeedbackSystem {
    let input = random_cov(rng, d, 0.1);
    let gain = random_gaussian_matrix(rng, d, d, gain_scale);
    let innovation = random_cov(rng, d, 0.1);
    let noise = random_cov(rng, d, 0.1);
    LinearFeedbackSystem::new(input, gain, innovation, noise.clone(), noise).expect("conforming blocks")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| instance_rng(9, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| instance_rng(9, 3).random()).collect();
        assert_eq!(a, b);
        let c: u64 = instance_rng(9, 4).random();
        assert_ne!(a[0], c);
    }

    #[test]
    fn samples_have_requested_shapes() {
        let mut rng = instance_rng(1, 0);
        let bc = random_degraded_bc(&mut rng, 2, 3, 2);
        let fj = random_feedback_joint(&mut rng, &bc, 2, FeedbackMode::StrongOutputOnly);
        assert!(fj.ignores_weak_output(&bc));
        assert_eq!(fj.joint(&bc).unwrap().rank(), 7);
        let pol = random_open_loop_policy(&mut rng, 2, 3, 3);
        assert!(pol.ignores_feedback());
        let sys = random_linear_system(&mut rng, 2, 0.0);
        assert_eq!(sys.gain, vec![0.0; 4]);
    }
}
