//! Finite-alphabet distributions, channels and the information measures built
//! on them.
//!
//! All measures are computed in nats; [`Unit`] converts at the boundary.
//! Dense row-major tensors are used throughout: every alphabet in this crate
//! is small (a handful of symbols per axis, at most a few axes).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Masses below this are treated as exact zeros inside `p log p`.
pub const ZERO_MASS: f64 = 1e-15;
/// Allowed deviation of a total mass from 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Information measures within this distance below zero are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Default cap on the number of simplex grid points.
pub const DEFAULT_GRID_CAP: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

impl Unit {
    /// Converts a value expressed in nats into this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Unit::Nats => nats,
            Unit::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            Unit::Nats => value,
            Unit::Bits => value * std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        })
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Unit::Nats),
            "bits" => Ok(Unit::Bits),
            other => Err(Error::InvalidParameter(format!("unknown unit {other:?}"))),
        }
    }
}

/// `-Σ p ln p` over a mass vector, skipping masses below [`ZERO_MASS`].
pub(crate) fn entropy_nats(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&p| p >= ZERO_MASS)
        .map(|&p| -p * p.ln())
        .sum()
}

pub(crate) fn clamp_nonnegative(v: f64) -> f64 {
    if v < 0.0 && v > -CLAMP_TOL {
        0.0
    } else {
        v
    }
}

fn check_mass(mass: &[f64]) -> Result<f64> {
    if mass.is_empty() {
        return Err(Error::InvalidDistribution("empty mass vector".into()));
    }
    let mut total = 0.0;
    for (i, &p) in mass.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}, expected a nonnegative finite mass"
            )));
        }
        total += p;
    }
    Ok(total)
}

fn validate_mass(mass: &[f64]) -> Result<()> {
    let total = check_mass(mass)?;
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "total mass {total} differs from 1"
        )));
    }
    Ok(())
}

/// Wire form shared by every tensor-like type: `{"axes":[...],"mass":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorRepr {
    pub axes: Vec<usize>,
    pub mass: Vec<f64>,
}

/// A probability mass function over `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct FiniteDist {
    mass: Vec<f64>,
}

impl FiniteDist {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        validate_mass(&mass)?;
        Ok(Self { mass })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total = check_mass(weights)?;
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(Self {
            mass: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs a nonempty alphabet");
        Self {
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(n: usize, at: usize) -> Self {
        assert!(at < n, "point mass outside the alphabet");
        let mut mass = vec![0.0; n];
        mass[at] = 1.0;
        Self { mass }
    }

    /// Bernoulli law on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    /// `t * self + (1 - t) * other`.
    pub fn mix(&self, other: &FiniteDist, t: f64) -> Result<FiniteDist> {
        if self.mass.len() != other.mass.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mass.len(),
                got: other.mass.len(),
            });
        }
        FiniteDist::from_weights(
            &self
                .mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect::<Vec<_>>(),
        )
    }
}

impl TryFrom<TensorRepr> for FiniteDist {
    type Error = Error;

    fn try_from(repr: TensorRepr) -> Result<Self> {
        if repr.axes.len() != 1 || repr.axes[0] != repr.mass.len() {
            return Err(Error::InvalidDistribution(format!(
                "expected axes [{}], got {:?}",
                repr.mass.len(),
                repr.axes
            )));
        }
        FiniteDist::new(repr.mass)
    }
}

impl From<FiniteDist> for TensorRepr {
    fn from(d: FiniteDist) -> Self {
        TensorRepr {
            axes: vec![d.mass.len()],
            mass: d.mass,
        }
    }
}

/// Entropy of a distribution in the requested unit.
pub fn entropy(d: &FiniteDist, unit: Unit) -> f64 {
    unit.from_nats(entropy_nats(&d.mass))
}

/// Joint probability mass over a tuple of finite alphabets, stored row-major
/// (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct JointDist {
    axes: Vec<usize>,
    mass: Vec<f64>,
}

impl JointDist {
    pub fn new(axes: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        Self::check_shape(&axes, mass.len())?;
        validate_mass(&mass)?;
        Ok(Self { axes, mass })
    }

    /// Builds a joint from nonnegative weights whose total is within `1e-9`
    /// of one, rescaling so the stored total is exact to rounding.
    pub(crate) fn from_unnormalized(axes: Vec<usize>, mut mass: Vec<f64>) -> Result<Self> {
        Self::check_shape(&axes, mass.len())?;
        let total = check_mass(&mass)?;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total} differs from 1"
            )));
        }
        mass.iter_mut().for_each(|p| *p /= total);
        Ok(Self { axes, mass })
    }

    fn check_shape(axes: &[usize], len: usize) -> Result<()> {
        if axes.is_empty() || axes.contains(&0) {
            return Err(Error::InvalidDistribution(format!(
                "axis sizes must be positive, got {axes:?}"
            )));
        }
        let cells: usize = axes.iter().product();
        if cells != len {
            return Err(Error::DimensionMismatch {
                expected: cells,
                got: len,
            });
        }
        Ok(())
    }

    /// Product law of independent factors, one axis per factor.
    pub fn product(factors: &[&FiniteDist]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDistribution("no factors".into()));
        }
        let mut mass = vec![1.0];
        let mut axes = Vec::with_capacity(factors.len());
        for f in factors {
            axes.push(f.support_size());
            mass = mass
                .iter()
                .flat_map(|a| f.mass().iter().map(move |b| a * b))
                .collect();
        }
        Self::from_unnormalized(axes, mass)
    }

    pub fn from_dist(d: &FiniteDist) -> Self {
        Self {
            axes: vec![d.support_size()],
            mass: d.mass().to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn axis_sizes(&self) -> &[usize] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1];
        }
        strides
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.rank()];
        for &a in axes {
            if a >= self.rank() {
                return Err(Error::AxisOutOfRange {
                    axis: a,
                    rank: self.rank(),
                });
            }
            if seen[a] {
                return Err(Error::OverlappingAxes(a));
            }
            seen[a] = true;
        }
        Ok(())
    }

    /// Marginal over `keep`, with the result's axes in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDist> {
        self.check_axes(keep)?;
        if keep.is_empty() {
            return Err(Error::InvalidDistribution("empty marginal".into()));
        }
        let axes: Vec<usize> = keep.iter().map(|&a| self.axes[a]).collect();
        let mass = self.marginal_mass(keep);
        Ok(JointDist { axes, mass })
    }

    fn marginal_mass(&self, keep: &[usize]) -> Vec<f64> {
        let out_len: usize = keep.iter().map(|&a| self.axes[a]).product();
        let mut out_strides = vec![0usize; self.rank()];
        let mut s = 1;
        for &a in keep.iter().rev() {
            out_strides[a] = s;
            s *= self.axes[a];
        }
        let mut out = vec![0.0; out_len];
        let mut idx = vec![0usize; self.rank()];
        let mut target = 0usize;
        for &p in &self.mass {
            out[target] += p;
            // odometer increment, last axis fastest
            for ax in (0..self.rank()).rev() {
                idx[ax] += 1;
                target += out_strides[ax];
                if idx[ax] < self.axes[ax] {
                    break;
                }
                target -= out_strides[ax] * idx[ax];
                idx[ax] = 0;
            }
        }
        out
    }

    /// Joint entropy of the listed axes in nats; zero for an empty list.
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64> {
        self.check_axes(axes)?;
        if axes.is_empty() {
            return Ok(0.0);
        }
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        Ok(entropy_nats(&self.marginal_mass(&sorted)))
    }

    /// Reorders axes so that new axis `i` is old axis `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<JointDist> {
        if order.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: order.len(),
            });
        }
        self.check_axes(order)?;
        let old_strides = self.strides();
        let axes: Vec<usize> = order.iter().map(|&a| self.axes[a]).collect();
        let mut mass = vec![0.0; self.mass.len()];
        let mut idx = vec![0usize; axes.len()];
        for slot in mass.iter_mut() {
            let src: usize = idx
                .iter()
                .zip(order)
                .map(|(&i, &a)| i * old_strides[a])
                .sum();
            *slot = self.mass[src];
            for ax in (0..axes.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < axes[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Ok(JointDist { axes, mass })
    }

    /// Splits one axis into several whose sizes multiply to the original
    /// (the first new axis is the most significant). Pure relabelling.
    pub fn split_axis(&self, axis: usize, sizes: &[usize]) -> Result<JointDist> {
        self.check_axes(&[axis])?;
        let product: usize = sizes.iter().product();
        if product != self.axes[axis] || sizes.contains(&0) {
            return Err(Error::DimensionMismatch {
                expected: self.axes[axis],
                got: product,
            });
        }
        let mut axes = self.axes[..axis].to_vec();
        axes.extend_from_slice(sizes);
        axes.extend_from_slice(&self.axes[axis + 1..]);
        Ok(JointDist {
            axes,
            mass: self.mass.clone(),
        })
    }

    /// Marginal of the first axis together with the conditional law of the
    /// remaining axes (flattened) given each value of the first axis. Slices
    /// with zero weight get a uniform placeholder.
    pub fn condition_on_first(&self) -> (FiniteDist, Vec<Vec<f64>>) {
        let n0 = self.axes[0];
        let inner = self.mass.len() / n0;
        let mut weights = Vec::with_capacity(n0);
        let mut slices = Vec::with_capacity(n0);
        for v in 0..n0 {
            let block = &self.mass[v * inner..(v + 1) * inner];
            let w: f64 = block.iter().sum();
            weights.push(w);
            if w > 0.0 {
                slices.push(block.iter().map(|p| p / w).collect());
            } else {
                slices.push(vec![1.0 / inner as f64; inner]);
            }
        }
        let total: f64 = weights.iter().sum();
        let marginal = FiniteDist {
            mass: weights.iter().map(|w| w / total).collect(),
        };
        (marginal, slices)
    }
}

impl TryFrom<TensorRepr> for JointDist {
    type Error = Error;

    fn try_from(repr: TensorRepr) -> Result<Self> {
        JointDist::new(repr.axes, repr.mass)
    }
}

impl From<JointDist> for TensorRepr {
    fn from(j: JointDist) -> Self {
        TensorRepr {
            axes: j.axes,
            mass: j.mass,
        }
    }
}

fn disjoint(sets: &[&[usize]]) -> Result<()> {
    let mut all: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    for w in all.windows(2) {
        if w[0] == w[1] {
            return Err(Error::OverlappingAxes(w[0]));
        }
    }
    Ok(())
}

fn concat(sets: &[&[usize]]) -> Vec<usize> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// `I(A;B) = H(A) + H(B) - H(A,B)` in nats, clamped at zero.
pub(crate) fn mi_nats(j: &JointDist, a: &[usize], b: &[usize]) -> Result<f64> {
    disjoint(&[a, b])?;
    let v = j.entropy_of(a)? + j.entropy_of(b)? - j.entropy_of(&concat(&[a, b]))?;
    Ok(clamp_nonnegative(v))
}

/// `I(A;B|C)` in nats, clamped at zero.
pub(crate) fn cmi_nats(j: &JointDist, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    disjoint(&[a, b, c])?;
    if c.is_empty() {
        return mi_nats(j, a, b);
    }
    let v = j.entropy_of(&concat(&[a, c]))? + j.entropy_of(&concat(&[b, c]))?
        - j.entropy_of(&concat(&[a, b, c]))?
        - j.entropy_of(c)?;
    Ok(clamp_nonnegative(v))
}

/// Mutual information between two disjoint groups of axes.
pub fn mutual_information(j: &JointDist, a: &[usize], b: &[usize], unit: Unit) -> Result<f64> {
    Ok(unit.from_nats(mi_nats(j, a, b)?))
}

/// Conditional mutual information `I(A;B|C)` between disjoint axis groups.
pub fn conditional_mi(
    j: &JointDist,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    unit: Unit,
) -> Result<f64> {
    Ok(unit.from_nats(cmi_nats(j, a, b, c)?))
}

/// A discrete memoryless channel `q(y|x)` stored as a row-major
/// `input_size x output_size` stochastic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct DMChannel {
    input_size: usize,
    output_size: usize,
    rows: Vec<f64>,
}

impl DMChannel {
    /// Validates each row as a distribution, then renormalizes rows exactly.
    pub fn new(input_size: usize, output_size: usize, mut rows: Vec<f64>) -> Result<Self> {
        if input_size == 0 || output_size == 0 {
            return Err(Error::InvalidDistribution("empty channel alphabet".into()));
        }
        if rows.len() != input_size * output_size {
            return Err(Error::DimensionMismatch {
                expected: input_size * output_size,
                got: rows.len(),
            });
        }
        for row in rows.chunks_mut(output_size) {
            validate_mass(row)?;
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self {
            input_size,
            output_size,
            rows,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let output_size = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != output_size) {
            return Err(Error::InvalidDistribution("ragged channel rows".into()));
        }
        Self::new(rows.len(), output_size, rows.concat())
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("crossover {p} outside [0,1]")));
        }
        Self::new(2, 2, vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn noiseless(n: usize) -> Self {
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1.0;
        }
        Self {
            input_size: n,
            output_size: n,
            rows,
        }
    }

    /// Every input maps to output symbol 0 of a size-`output_size` alphabet.
    pub fn constant(input_size: usize, output_size: usize) -> Self {
        let mut rows = vec![0.0; input_size * output_size];
        for x in 0..input_size {
            rows[x * output_size] = 1.0;
        }
        Self {
            input_size,
            output_size,
            rows,
        }
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    /// Cascade `x -> y -> z` of this channel followed by `next`.
    pub fn then(&self, next: &DMChannel) -> Result<DMChannel> {
        if self.output_size != next.input_size {
            return Err(Error::DimensionMismatch {
                expected: self.output_size,
                got: next.input_size,
            });
        }
        let mut rows = vec![0.0; self.input_size * next.output_size];
        for x in 0..self.input_size {
            for (y, &p) in self.row(x).iter().enumerate() {
                for (z, &q) in next.row(y).iter().enumerate() {
                    rows[x * next.output_size + z] += p * q;
                }
            }
        }
        DMChannel::new(self.input_size, next.output_size, rows)
    }

    /// Two-letter product channel; input `(x1, x2)` and output `(y1, y2)`
    /// are flattened with the first letter most significant.
    pub fn product(&self, other: &DMChannel) -> DMChannel {
        let (n1, n2) = (self.input_size, other.input_size);
        let (m1, m2) = (self.output_size, other.output_size);
        let mut rows = vec![0.0; n1 * n2 * m1 * m2];
        for x1 in 0..n1 {
            for x2 in 0..n2 {
                let base = (x1 * n2 + x2) * m1 * m2;
                for (y1, &p) in self.row(x1).iter().enumerate() {
                    for (y2, &q) in other.row(x2).iter().enumerate() {
                        rows[base + y1 * m2 + y2] = p * q;
                    }
                }
            }
        }
        DMChannel {
            input_size: n1 * n2,
            output_size: m1 * m2,
            rows,
        }
    }

    /// Output law induced by input law `px`.
    pub fn output_mass(&self, px: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_size];
        for (x, &p) in px.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (o, &q) in out.iter_mut().zip(self.row(x)) {
                *o += p * q;
            }
        }
        out
    }

    /// Joint law of `(X, Y)` for input law `px`.
    pub fn joint_with(&self, px: &FiniteDist) -> Result<JointDist> {
        if px.support_size() != self.input_size {
            return Err(Error::DimensionMismatch {
                expected: self.input_size,
                got: px.support_size(),
            });
        }
        let mass = px
            .mass()
            .iter()
            .enumerate()
            .flat_map(|(x, &p)| self.row(x).iter().map(move |q| p * q))
            .collect();
        JointDist::from_unnormalized(vec![self.input_size, self.output_size], mass)
    }

    /// `I(X;Y)` in nats for input law `px`.
    pub fn mutual_information_nats(&self, px: &[f64]) -> f64 {
        let out = self.output_mass(px);
        let cond: f64 = px
            .iter()
            .enumerate()
            .map(|(x, &p)| p * entropy_nats(self.row(x)))
            .sum();
        clamp_nonnegative(entropy_nats(&out) - cond).max(0.0)
    }
}

impl TryFrom<TensorRepr> for DMChannel {
    type Error = Error;

    fn try_from(repr: TensorRepr) -> Result<Self> {
        if repr.axes.len() != 2 {
            return Err(Error::InvalidDistribution(format!(
                "a channel needs axes [inputs, outputs], got {:?}",
                repr.axes
            )));
        }
        DMChannel::new(repr.axes[0], repr.axes[1], repr.mass)
    }
}

impl From<DMChannel> for TensorRepr {
    fn from(c: DMChannel) -> Self {
        TensorRepr {
            axes: vec![c.input_size, c.output_size],
            mass: c.rows,
        }
    }
}

/// Number of points in the resolution-`r` grid on the `(dim-1)`-simplex,
/// `C(r + dim - 1, dim - 1)`, saturating on overflow.
pub fn simplex_grid_count(dim: usize, resolution: usize) -> u128 {
    let (n, k) = ((resolution + dim - 1) as u128, (dim - 1) as u128);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Integer compositions `(k_1, .., k_dim)` of `resolution`, in lexicographic
/// order.
pub fn simplex_compositions(dim: usize, resolution: usize, cap: u128) -> Result<Vec<Vec<usize>>> {
    if dim == 0 || resolution == 0 {
        return Err(Error::InvalidParameter(
            "simplex grid needs dim >= 1 and resolution >= 1".into(),
        ));
    }
    let count = simplex_grid_count(dim, resolution);
    if count > cap {
        return Err(Error::GridTooLarge { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; dim];
    fn fill(pos: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for k in 0..=remaining {
            current[pos] = k;
            fill(pos + 1, remaining - k, current, out);
        }
    }
    fill(0, resolution, &mut current, &mut out);
    Ok(out)
}

/// All distributions `(k_1, .., k_dim) / resolution` on the simplex.
pub fn simplex_grid(dim: usize, resolution: usize) -> Result<Vec<FiniteDist>> {
    simplex_grid_capped(dim, resolution, DEFAULT_GRID_CAP)
}

pub fn simplex_grid_capped(dim: usize, resolution: usize, cap: u128) -> Result<Vec<FiniteDist>> {
    let r = resolution as f64;
    Ok(simplex_compositions(dim, resolution, cap)?
        .into_iter()
        .map(|k| FiniteDist {
            mass: k.into_iter().map(|ki| ki as f64 / r).collect(),
        })
        .collect())
}
