//! Unit vector systems: loading, Gram summaries, generators, and the
//! rigidity check.
//!
//! A [`UnitVectorSet`] is an `n x n` real matrix whose rows are unit
//! vectors. Two structural facts drive the rest of the crate: the average
//! of `|eps_1 v_1 + ... + eps_n v_n|^2` over all sign choices `eps_i = ±1`
//! equals `n` exactly, so some signed sum always reaches norm `sqrt(n)`;
//! and if *every* signed sum has squared norm exactly `n`, the set is
//! forced to be orthonormal ([`rigidity_check`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_squared};
use crate::sign_search::{gray_flip_sequence, EXHAUSTIVE_LIMIT};

/// Rows whose norm is farther than this from 1 are rejected by
/// [`UnitVectorSet::load`] instead of silently renormalized.
pub const LOAD_NORM_TOL: f64 = 1e-6;

/// Default off-diagonal threshold for declaring a Gram matrix orthonormal.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-9;

/// Squared-norm tolerance for the rigidity check: every signed sum must
/// have `| |v|^2 - n |` below this.
pub const RIGIDITY_TOL: f64 = 1e-9;

/// Largest dimension for which the plain all-assignments mean is computed.
const MEAN_IDENTITY_LIMIT: usize = 20;

/// An `n x n` system of unit row vectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitVectorSet {
    rows: Vec<Vec<f64>>,
}

impl UnitVectorSet {
    /// Validates a square matrix of finite entries whose rows are unit
    /// vectors up to [`LOAD_NORM_TOL`], renormalizing each row exactly.
    pub fn load(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            for (c, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: c });
                }
            }
            let row_norm = norm(row);
            if (row_norm - 1.0).abs() > LOAD_NORM_TOL {
                return Err(Error::RowNotUnit {
                    row: i,
                    norm: row_norm,
                    tol: LOAD_NORM_TOL,
                });
            }
            for x in row.iter_mut() {
                *x /= row_norm;
            }
        }
        Ok(Self { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Sum of `eps[i] * rows[i]`.
    pub(crate) fn signed_sum(&self, eps: &[i8]) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n];
        for (i, row) in self.rows.iter().enumerate() {
            let s = eps[i] as f64;
            for (wd, &rd) in w.iter_mut().zip(row) {
                *wd += s * rd;
            }
        }
        w
    }
}

/// Gram matrix of a set plus the orthonormality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct GramSummary {
    gram: Vec<Vec<f64>>,
    max_offdiag_abs: f64,
    orthonormal: bool,
}

impl GramSummary {
    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.gram[i][j]
    }

    pub fn max_offdiag_abs(&self) -> f64 {
        self.max_offdiag_abs
    }

    pub fn orthonormal(&self) -> bool {
        self.orthonormal
    }
}

/// Gram summary at the default orthonormality tolerance.
pub fn gram(set: &UnitVectorSet) -> GramSummary {
    gram_with_tolerance(set, DEFAULT_ORTHO_TOL)
}

/// Gram summary with an explicit off-diagonal tolerance. Entries are
/// computed once and mirrored, so the matrix is symmetric exactly.
pub fn gram_with_tolerance(set: &UnitVectorSet, ortho_tol: f64) -> GramSummary {
    let n = set.n();
    let mut g = vec![vec![0.0; n]; n];
    let mut max_offdiag = 0.0f64;
    for (i, row_i) in set.rows().iter().enumerate() {
        for (j, row_j) in set.rows().iter().enumerate().skip(i) {
            let value = dot(row_i, row_j);
            g[i][j] = value;
            g[j][i] = value;
            if i != j {
                max_offdiag = max_offdiag.max(value.abs());
            }
        }
    }
    GramSummary {
        gram: g,
        max_offdiag_abs: max_offdiag,
        orthonormal: max_offdiag <= ortho_tol,
    }
}

/// Families of unit vector sets for testing and random trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    /// The standard basis.
    Orthonormal,
    /// Rows drawn independently and uniformly on the unit sphere.
    RandomUniform,
    /// Standard basis plus Gaussian noise of the given scale, renormalized.
    PerturbedOrthonormal { noise: f64 },
    /// Rows drawn inside a spherical cap of the given angular radius
    /// (radians, in `(0, pi/2]`) around one random axis; pairwise inner
    /// products are then at least `cos(2 * angular_radius)`.
    Clustered { angular_radius: f64 },
}

/// Builds an `n x n` set from the chosen family, deterministically for a
/// fixed seed.
pub fn generate(generator: Generator, n: usize, seed: u64) -> Result<UnitVectorSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = match generator {
        Generator::Orthonormal => standard_basis(n),
        Generator::RandomUniform => (0..n).map(|_| sphere_point(n, &mut rng)).collect(),
        Generator::PerturbedOrthonormal { noise } => {
            if !noise.is_finite() || noise < 0.0 {
                return Err(Error::BadGeneratorParam {
                    name: "noise",
                    value: noise,
                    requirement: "finite and >= 0",
                });
            }
            let mut rows = standard_basis(n);
            for row in rows.iter_mut() {
                loop {
                    let mut candidate = row.clone();
                    for x in candidate.iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *x += noise * g;
                    }
                    let c_norm = norm(&candidate);
                    if c_norm > 1e-8 {
                        for x in candidate.iter_mut() {
                            *x /= c_norm;
                        }
                        *row = candidate;
                        break;
                    }
                }
            }
            rows
        }
        Generator::Clustered { angular_radius } => {
            if !angular_radius.is_finite()
                || angular_radius <= 0.0
                || angular_radius > std::f64::consts::FRAC_PI_2
            {
                return Err(Error::BadGeneratorParam {
                    name: "angular_radius",
                    value: angular_radius,
                    requirement: "in (0, pi/2]",
                });
            }
            let axis = sphere_point(n, &mut rng);
            (0..n)
                .map(|_| {
                    let theta = angular_radius * rng.random_range(0.0..1.0);
                    let perp = perpendicular_direction(&axis, &mut rng);
                    axis.iter()
                        .zip(&perp)
                        .map(|(&a, &p)| theta.cos() * a + theta.sin() * p)
                        .collect()
                })
                .collect()
        }
    };
    UnitVectorSet::load(rows)
}

fn standard_basis(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect()
}

/// Uniform point on the unit sphere via normalized Gaussians; resamples on
/// the (measure-zero) event of a near-zero draw.
pub(crate) fn sphere_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let v_norm = norm(&v);
        if v_norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= v_norm;
            }
            return v;
        }
    }
}

/// Unit vector orthogonal to `axis`, uniformly distributed in the
/// orthogonal complement.
fn perpendicular_direction(axis: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let g = sphere_point(axis.len(), rng);
        let along = dot(&g, axis);
        let mut p: Vec<f64> = g.iter().zip(axis).map(|(&gi, &ai)| gi - along * ai).collect();
        let p_norm = norm(&p);
        if p_norm > 1e-8 {
            for x in p.iter_mut() {
                *x /= p_norm;
            }
            return p;
        }
    }
}

/// Checks whether every signed sum of the rows has squared norm within
/// [`RIGIDITY_TOL`] of `n`. When that holds the set must be orthonormal,
/// which is asserted. Enumerates the `2^(n-1)` canonical sign patterns
/// (`eps_1 = +1`; negating all signs preserves the norm), so `n` is capped
/// at [`EXHAUSTIVE_LIMIT`].
pub fn rigidity_check(set: &UnitVectorSet) -> Result<bool> {
    let n = set.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
            what: "exhaustive sign enumeration",
        });
    }
    let nf = n as f64;
    let mut eps = vec![1i8; n];
    let mut w = set.signed_sum(&eps);
    if (norm_squared(&w) - nf).abs() > RIGIDITY_TOL {
        return Ok(false);
    }
    for flip in gray_flip_sequence(n) {
        let s = eps[flip] as f64;
        for (wd, &rd) in w.iter_mut().zip(set.row(flip)) {
            *wd -= 2.0 * s * rd;
        }
        eps[flip] = -eps[flip];
        if (norm_squared(&w) - nf).abs() > RIGIDITY_TOL {
            return Ok(false);
        }
    }
    let summary = gram(set);
    assert!(
        summary.orthonormal(),
        "all signed sums have squared norm n, yet max off-diagonal is {}",
        summary.max_offdiag_abs()
    );
    Ok(true)
}

/// Mean of `|sum eps_i v_i|^2` over all `2^n` sign assignments, by direct
/// enumeration (no shared state with the Gray-code machinery, so it can
/// serve as an independent oracle). Equals `n` exactly for unit rows.
pub fn mean_squared_sign_sum(set: &UnitVectorSet) -> Result<f64> {
    let n = set.n();
    if n > MEAN_IDENTITY_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: MEAN_IDENTITY_LIMIT,
            what: "all-assignments mean",
        });
    }
    let count = 1u64 << n;
    let mut total = 0.0;
    let mut eps = vec![1i8; n];
    for mask in 0..count {
        for (i, e) in eps.iter_mut().enumerate() {
            *e = if mask >> i & 1 == 1 { -1 } else { 1 };
        }
        total += norm_squared(&set.signed_sum(&eps));
    }
    Ok(total / count as f64)
}
