//! Sphere-constrained maximization of `|<x,v_1> ... <x,v_n>|` and witness
//! evaluation against the bound `n^(-n/2)`.
//!
//! The objective is handled in log domain, `F(x) = sum ln|<x, v_i>|`: at
//! n = 14 the bound is already ~1e-8, and the log form keeps the gradient
//! `g = sum v_i / <x, v_i>` well conditioned away from the zero set. `F`
//! is -inf where some inner product vanishes, so ascent never crosses a
//! sign change; multi-start over sign patterns covers the cells instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, normalize};
use crate::proof_check::sqrt_n_pow_n;
use crate::seeding::derive_seed;
use crate::sign_search::{
    longest_sum_exhaustive, longest_sum_local, LongestSumResult, EXHAUSTIVE_LIMIT,
};
use crate::vectors::{gram, sphere_point, UnitVectorSet};

/// Witness vectors must be unit within this before renormalization.
pub const WITNESS_NORM_TOL: f64 = 1e-6;

/// Inner products below this magnitude mark an iterate as degenerate: the
/// log objective and its gradient are unusable there.
pub const DEGENERATE_IP: f64 = 1e-14;

/// Relative slack in the pass verdict: passes iff
/// `product >= bound * (1 - PASS_SLACK)`.
pub const PASS_SLACK: f64 = 1e-9;

/// Relative tolerance for the equality case `sup = n^(-n/2)`.
pub const EQUALITY_REL_TOL: f64 = 1e-7;

/// The equality theorem is stated for dimensions up to 14.
const EQUALITY_LIMIT: usize = 14;

/// Smallest backtracking step before a line search gives up.
const MIN_STEP: f64 = 1e-18;

/// Attempts to perturb a degenerate iterate off the zero set.
const ESCAPE_ATTEMPTS: usize = 50;

/// Local-search restarts used for the witness start when n is beyond the
/// exhaustive limit.
const FALLBACK_RESTARTS: usize = 16;

/// Where a witness vector came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    LongestSum,
    Optimizer,
    Provided,
}

/// A candidate witness `x` and its product value against the bound
/// `n^(-n/2)`. `log_product` is `-inf` exactly when some inner product is
/// zero; otherwise `product = exp(log_product)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub x: Vec<f64>,
    #[serde(with = "neg_inf_as_null")]
    pub log_product: f64,
    pub product: f64,
    pub bound: f64,
    pub passes: bool,
    pub source: WitnessSource,
}

/// JSON has no literal for -inf, so the zero-product sentinel is encoded
/// as null and restored on parse, keeping round-trips exact.
mod neg_inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if value.is_finite() {
            ser.serialize_some(value)
        } else {
            ser.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NEG_INFINITY))
    }
}

/// The conjectured lower bound `n^(-n/2)` for the sup of the product.
pub fn product_bound(n: usize) -> f64 {
    1.0 / sqrt_n_pow_n(n)
}

/// Tuning knobs for [`maximize_product`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_init: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults scaled to the dimension: `8 + 2n` starts, 500 iterations,
    /// gradient tolerance 1e-10, initial step 0.1.
    pub fn for_dimension(n: usize, seed: u64) -> Self {
        Self {
            starts: 8 + 2 * n,
            max_iters: 500,
            grad_tol: 1e-10,
            step_init: 0.1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::BadConfig("starts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::BadConfig("max_iters must be at least 1"));
        }
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::BadConfig("grad_tol must be positive and finite"));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return Err(Error::BadConfig("step_init must be positive and finite"));
        }
        Ok(())
    }
}

fn inner_products(set: &UnitVectorSet, x: &[f64]) -> Vec<f64> {
    set.rows().iter().map(|row| dot(row, x)).collect()
}

fn min_abs_ip(set: &UnitVectorSet, x: &[f64]) -> f64 {
    inner_products(set, x)
        .iter()
        .fold(f64::INFINITY, |m, ip| m.min(ip.abs()))
}

fn validate_point(set: &UnitVectorSet, x: &[f64]) -> Result<()> {
    if x.len() != set.n() {
        return Err(Error::DimensionMismatch {
            got: x.len(),
            expected: set.n(),
        });
    }
    for &value in x {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                name: "witness coordinate",
                value,
            });
        }
    }
    Ok(())
}

/// Log objective `F(x) = sum ln|<x, v_i>|`; `-inf` if any inner product is
/// exactly zero.
pub fn log_abs_product(set: &UnitVectorSet, x: &[f64]) -> Result<f64> {
    validate_point(set, x)?;
    Ok(log_abs_sum(set, x))
}

fn log_abs_sum(set: &UnitVectorSet, x: &[f64]) -> f64 {
    let ips = inner_products(set, x);
    if ips.contains(&0.0) {
        return f64::NEG_INFINITY;
    }
    ips.iter().map(|ip| ip.abs().ln()).sum()
}

/// Riemannian gradient of `F` at a unit point: the Euclidean gradient
/// `g = sum v_i / <x, v_i>` projected onto the tangent space,
/// `g - <g, x> x`. Errors at degenerate points, where `g` blows up.
pub fn tangent_gradient(set: &UnitVectorSet, x: &[f64]) -> Result<Vec<f64>> {
    validate_point(set, x)?;
    let x_norm = norm(x);
    if (x_norm - 1.0).abs() > WITNESS_NORM_TOL {
        return Err(Error::PointNotUnit {
            norm: x_norm,
            tol: WITNESS_NORM_TOL,
        });
    }
    let ips = inner_products(set, x);
    if let Some(index) = ips.iter().position(|ip| ip.abs() < DEGENERATE_IP) {
        return Err(Error::DegeneratePoint {
            index,
            min: DEGENERATE_IP,
        });
    }
    let n = set.n();
    let mut g = vec![0.0; n];
    for (row, ip) in set.rows().iter().zip(&ips) {
        for (gd, &rd) in g.iter_mut().zip(row) {
            *gd += rd / ip;
        }
    }
    let along = dot(&g, x);
    Ok(g.iter().zip(x).map(|(&gd, &xd)| gd - along * xd).collect())
}

/// Builds the report for an already-unit `x` (callers renormalize first).
fn report_for_unit_x(set: &UnitVectorSet, x: Vec<f64>, source: WitnessSource) -> WitnessReport {
    let log_product = log_abs_sum(set, &x);
    let product = if log_product == f64::NEG_INFINITY {
        0.0
    } else {
        log_product.exp()
    };
    let bound = product_bound(set.n());
    WitnessReport {
        x,
        log_product,
        product,
        bound,
        passes: product >= bound * (1.0 - PASS_SLACK),
        source,
    }
}

/// Evaluates a user-provided witness `x` (unit within
/// [`WITNESS_NORM_TOL`], then renormalized exactly).
pub fn witness_product(set: &UnitVectorSet, x: &[f64]) -> Result<WitnessReport> {
    validate_point(set, x)?;
    let mut x = x.to_vec();
    let x_norm = norm(&x);
    if (x_norm - 1.0).abs() > WITNESS_NORM_TOL {
        return Err(Error::PointNotUnit {
            norm: x_norm,
            tol: WITNESS_NORM_TOL,
        });
    }
    normalize(&mut x);
    Ok(report_for_unit_x(set, x, WitnessSource::Provided))
}

/// Which sign search backs [`witness_from_longest_sum`].
#[derive(Clone, Copy, Debug)]
pub enum SignSearchMethod {
    /// Exact search; requires `n <=` [`EXHAUSTIVE_LIMIT`].
    Exhaustive,
    /// Explicit opt-in to heuristic search for larger n.
    Local { seed: u64, restarts: usize },
}

/// Turns a longest-sum result into the witness report for `x = v/|v|`.
pub fn witness_from_result(
    set: &UnitVectorSet,
    result: &LongestSumResult,
) -> Result<WitnessReport> {
    validate_point(set, &result.v)?;
    let mut x = result.v.clone();
    normalize(&mut x);
    let report = report_for_unit_x(set, x, WitnessSource::LongestSum);
    if result.is_global && (2..=EQUALITY_LIMIT).contains(&set.n()) {
        debug_assert!(
            report.passes,
            "globally longest sum must clear the bound for n <= 14 (product {}, bound {})",
            report.product, report.bound
        );
    }
    Ok(report)
}

/// Runs the chosen sign search and reports on the witness `x = v/|v|`.
pub fn witness_from_longest_sum(
    set: &UnitVectorSet,
    method: SignSearchMethod,
) -> Result<WitnessReport> {
    let result = match method {
        SignSearchMethod::Exhaustive => longest_sum_exhaustive(set)?,
        SignSearchMethod::Local { seed, restarts } => longest_sum_local(set, seed, restarts)?,
    };
    witness_from_result(set, &result)
}

/// Counters from one [`maximize_product_with_stats`] run.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct OptimizerStats {
    pub starts: usize,
    pub degenerate_starts: usize,
    pub converged_starts: usize,
    pub total_iterations: usize,
}

/// Multi-start projected gradient ascent of `F` on the sphere. Starts are
/// (a) the longest-sum witness, (b) normalized random sign sums, and (c)
/// uniform random points, interleaved; each runs backtracking line search
/// with renormalization after every step. The witness value itself is
/// always a merge candidate, so the result never falls below it. The
/// returned product is attained, hence a certified lower bound for the
/// true supremum; no global-optimality claim is made.
pub fn maximize_product(set: &UnitVectorSet, config: &OptimizerConfig) -> Result<WitnessReport> {
    maximize_product_with_stats(set, config).map(|(report, _)| report)
}

/// [`maximize_product`] plus per-run counters.
pub fn maximize_product_with_stats(
    set: &UnitVectorSet,
    config: &OptimizerConfig,
) -> Result<(WitnessReport, OptimizerStats)> {
    config.validate()?;
    let n = set.n();
    let witness = if n <= EXHAUSTIVE_LIMIT {
        longest_sum_exhaustive(set)?
    } else {
        longest_sum_local(set, derive_seed(config.seed, u64::MAX), FALLBACK_RESTARTS)?
    };
    let mut witness_x = witness.v.clone();
    normalize(&mut witness_x);

    let mut best: Option<(f64, Vec<f64>)> = None;
    consider(&mut best, log_abs_sum(set, &witness_x), witness_x.clone());
    let mut stats = OptimizerStats {
        starts: config.starts,
        ..OptimizerStats::default()
    };
    for idx in 0..config.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, idx as u64));
        let x0 = if idx == 0 {
            witness_x.clone()
        } else if idx % 2 == 1 {
            sign_sum_start(set, &mut rng)
        } else {
            sphere_point(n, &mut rng)
        };
        let outcome = ascend(set, x0, config, &mut rng);
        stats.total_iterations += outcome.iterations;
        if outcome.converged {
            stats.converged_starts += 1;
        }
        match outcome.result {
            Some((log_f, x)) => consider(&mut best, log_f, x),
            None => stats.degenerate_starts += 1,
        }
    }
    match best {
        Some((_, x)) => Ok((report_for_unit_x(set, x, WitnessSource::Optimizer), stats)),
        None => Err(Error::AllStartsDegenerate),
    }
}

/// Merge step: keeps the larger log value; exact ties go to the
/// lexicographically smaller canonical point (first coordinate made
/// nonnegative), making the result independent of start order.
fn consider(best: &mut Option<(f64, Vec<f64>)>, log_f: f64, mut x: Vec<f64>) {
    if !log_f.is_finite() {
        return;
    }
    if x[0] < 0.0 {
        for d in x.iter_mut() {
            *d = -*d;
        }
    }
    let replace = match best {
        None => true,
        Some((best_log, best_x)) => log_f > *best_log || (log_f == *best_log && x < *best_x),
    };
    if replace {
        *best = Some((log_f, x));
    }
}

/// Normalized signed row sum for a random sign assignment; falls back to a
/// uniform point if the sum keeps cancelling to nearly zero.
fn sign_sum_start(set: &UnitVectorSet, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = set.n();
    for _ in 0..ESCAPE_ATTEMPTS {
        let eps: Vec<i8> = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        let mut w = set.signed_sum(&eps);
        if norm(&w) > 1e-8 {
            normalize(&mut w);
            return w;
        }
    }
    sphere_point(n, rng)
}

/// Perturbs `x` until every inner product clears [`DEGENERATE_IP`];
/// returns false if the point cannot be moved off the zero set.
fn escape_degenerate(set: &UnitVectorSet, x: &mut [f64], rng: &mut ChaCha8Rng) -> bool {
    let mut scale = 1e-8;
    for _ in 0..ESCAPE_ATTEMPTS {
        if min_abs_ip(set, x) >= DEGENERATE_IP {
            return true;
        }
        for d in x.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *d += scale * g;
        }
        normalize(x);
        scale *= 4.0;
    }
    min_abs_ip(set, x) >= DEGENERATE_IP
}

/// One start: ascent until the tangent gradient is below tolerance, the
/// iteration budget runs out, or no backtracked step ascends. Candidate
/// steps that would land within [`DEGENERATE_IP`] of the zero set are
/// rejected, so accepted iterates always have a usable gradient.
struct AscentOutcome {
    result: Option<(f64, Vec<f64>)>,
    iterations: usize,
    converged: bool,
}

fn ascend(
    set: &UnitVectorSet,
    mut x: Vec<f64>,
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> AscentOutcome {
    let n = set.n();
    let mut outcome = AscentOutcome {
        result: None,
        iterations: 0,
        converged: false,
    };
    if !escape_degenerate(set, &mut x, rng) {
        return outcome;
    }
    let mut log_f = log_abs_sum(set, &x);
    for _ in 0..config.max_iters {
        let ips = inner_products(set, &x);
        let mut g = vec![0.0; n];
        for (row, ip) in set.rows().iter().zip(&ips) {
            for (gd, &rd) in g.iter_mut().zip(row) {
                *gd += rd / ip;
            }
        }
        let along = dot(&g, &x);
        let tangent: Vec<f64> = g.iter().zip(&x).map(|(&gd, &xd)| gd - along * xd).collect();
        if norm(&tangent) < config.grad_tol {
            outcome.converged = true;
            break;
        }
        outcome.iterations += 1;
        let mut alpha = config.step_init;
        let mut advanced = false;
        while alpha >= MIN_STEP {
            let mut cand: Vec<f64> = x
                .iter()
                .zip(&tangent)
                .map(|(&xd, &td)| xd + alpha * td)
                .collect();
            normalize(&mut cand);
            if min_abs_ip(set, &cand) >= DEGENERATE_IP {
                let cand_log = log_abs_sum(set, &cand);
                if cand_log > log_f {
                    x = cand;
                    log_f = cand_log;
                    advanced = true;
                    break;
                }
            }
            alpha /= 2.0;
        }
        if !advanced {
            break;
        }
    }
    outcome.result = Some((log_f, x));
    outcome
}

/// Tests the equality case: true iff the maximized product is within
/// [`EQUALITY_REL_TOL`] relative of `n^(-n/2)` AND the Gram matrix is
/// orthonormal. The equality theorem makes the two conditions co-occur,
/// which is asserted in debug builds.
pub fn equality_case_check(set: &UnitVectorSet, config: &OptimizerConfig) -> Result<bool> {
    let n = set.n();
    if n > EQUALITY_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EQUALITY_LIMIT,
            what: "the equality-case check",
        });
    }
    let report = maximize_product(set, config)?;
    let near_equality = (report.product - report.bound).abs() <= EQUALITY_REL_TOL * report.bound;
    let orthonormal = gram(set).orthonormal();
    debug_assert_eq!(
        near_equality, orthonormal,
        "near-equality (product {}, bound {}) and orthonormality must co-occur",
        report.product, report.bound
    );
    Ok(near_equality && orthonormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::{generate, Generator};

    fn sixty_degree_pair() -> UnitVectorSet {
        UnitVectorSet::load(vec![
            vec![1.0, 0.0],
            vec![0.5, 3.0f64.sqrt() / 2.0],
        ])
        .unwrap()
    }

    fn duplicated_pair() -> UnitVectorSet {
        UnitVectorSet::load(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn bound_matches_closed_form() {
        assert!(rel_close(product_bound(2), 0.5, 1e-15));
        assert!(rel_close(product_bound(4), 1.0 / 16.0, 1e-15));
        assert!(rel_close(product_bound(9), 9f64.powf(-4.5), 1e-14));
    }

    #[test]
    fn witness_product_at_the_diagonal_of_the_standard_basis() {
        let n = 5;
        let set = generate(Generator::Orthonormal, n, 0).unwrap();
        let x = vec![1.0 / (n as f64).sqrt(); n];
        let report = witness_product(&set, &x).unwrap();
        assert!(rel_close(report.product, product_bound(n), 1e-12));
        assert!(report.passes);
        assert_eq!(report.source, WitnessSource::Provided);
        assert!((norm(&report.x) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn witness_product_on_sixty_degree_bisector() {
        let set = sixty_degree_pair();
        let v = [1.5, 3.0f64.sqrt() / 2.0];
        let s = norm(&v);
        let x: Vec<f64> = v.iter().map(|&c| c / s).collect();
        let report = witness_product(&set, &x).unwrap();
        assert!(rel_close(report.product, 0.75, 1e-12));
        assert!(rel_close(report.bound, 0.5, 1e-15));
        assert!(report.passes);
    }

    #[test]
    fn witness_product_sentinel_on_the_zero_set() {
        let set = generate(Generator::Orthonormal, 3, 0).unwrap();
        let report = witness_product(&set, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(report.product, 0.0);
        assert_eq!(report.log_product, f64::NEG_INFINITY);
        assert!(!report.passes);
    }

    #[test]
    fn witness_product_validates_input() {
        let set = generate(Generator::Orthonormal, 3, 0).unwrap();
        assert!(matches!(
            witness_product(&set, &[1.0, 0.0]),
            Err(Error::DimensionMismatch { got: 2, expected: 3 })
        ));
        assert!(matches!(
            witness_product(&set, &[2.0, 0.0, 0.0]),
            Err(Error::PointNotUnit { .. })
        ));
        assert!(matches!(
            witness_product(&set, &[f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn longest_sum_witness_on_the_standard_basis() {
        let set = generate(Generator::Orthonormal, 5, 0).unwrap();
        let report = witness_from_longest_sum(&set, SignSearchMethod::Exhaustive).unwrap();
        assert!(rel_close(report.product, 5f64.powf(-2.5), 1e-12));
        assert!(report.passes);
        assert_eq!(report.source, WitnessSource::LongestSum);
    }

    #[test]
    fn longest_sum_witness_on_the_duplicated_pair() {
        let report =
            witness_from_longest_sum(&duplicated_pair(), SignSearchMethod::Exhaustive).unwrap();
        assert_eq!(report.x, vec![1.0, 0.0]);
        assert!(rel_close(report.product, 1.0, 1e-12));
    }

    #[test]
    fn longest_sum_witness_via_local_opt_in() {
        let set = generate(Generator::Orthonormal, 6, 0).unwrap();
        let method = SignSearchMethod::Local {
            seed: 1,
            restarts: 4,
        };
        let report = witness_from_longest_sum(&set, method).unwrap();
        assert!(report.passes);
    }

    #[test]
    fn maximize_on_the_standard_basis_reaches_the_bound() {
        let set = generate(Generator::Orthonormal, 6, 0).unwrap();
        let config = OptimizerConfig::for_dimension(6, 11);
        let report = maximize_product(&set, &config).unwrap();
        assert!(rel_close(report.product, 1.0 / 216.0, 1e-6));
        assert_eq!(report.source, WitnessSource::Optimizer);
        // Determinism: a rerun reproduces the report bit for bit.
        let again = maximize_product(&set, &config).unwrap();
        assert_eq!(report.product.to_bits(), again.product.to_bits());
        assert_eq!(report.x, again.x);
    }

    #[test]
    fn maximize_on_the_sixty_degree_pair() {
        let set = sixty_degree_pair();
        let config = OptimizerConfig::for_dimension(2, 3);
        let report = maximize_product(&set, &config).unwrap();
        assert!(
            (report.product - 0.75).abs() <= 1e-9,
            "product {}",
            report.product
        );
    }

    #[test]
    fn maximize_on_the_duplicated_pair_canonicalizes_x() {
        let set = duplicated_pair();
        let config = OptimizerConfig::for_dimension(2, 5);
        let report = maximize_product(&set, &config).unwrap();
        assert!(rel_close(report.product, 1.0, 1e-9));
        assert!(report.x[0] > 0.99, "canonical x {:?}", report.x);
    }

    #[test]
    fn maximize_never_falls_below_the_longest_sum_witness() {
        let set = generate(Generator::RandomUniform, 7, 77).unwrap();
        let witness = witness_from_longest_sum(&set, SignSearchMethod::Exhaustive).unwrap();
        let report = maximize_product(&set, &OptimizerConfig::for_dimension(7, 8)).unwrap();
        assert!(report.product >= witness.product * (1.0 - 1e-12));
    }

    #[test]
    fn maximize_validates_config() {
        let set = generate(Generator::Orthonormal, 3, 0).unwrap();
        let mut config = OptimizerConfig::for_dimension(3, 0);
        config.starts = 0;
        assert!(matches!(
            maximize_product(&set, &config),
            Err(Error::BadConfig(_))
        ));
        config = OptimizerConfig::for_dimension(3, 0);
        config.grad_tol = 0.0;
        assert!(matches!(
            maximize_product(&set, &config),
            Err(Error::BadConfig(_))
        ));
    }

    #[test]
    fn default_config_scales_with_dimension() {
        let config = OptimizerConfig::for_dimension(10, 4);
        assert_eq!(config.starts, 28);
        assert_eq!(config.max_iters, 500);
        assert_eq!(config.seed, 4);
    }

    #[test]
    fn equality_case_examples() {
        let ortho = generate(Generator::Orthonormal, 7, 0).unwrap();
        assert!(equality_case_check(&ortho, &OptimizerConfig::for_dimension(7, 2)).unwrap());

        let perturbed = generate(Generator::PerturbedOrthonormal { noise: 0.1 }, 5, 9).unwrap();
        assert!(!equality_case_check(&perturbed, &OptimizerConfig::for_dimension(5, 2)).unwrap());

        let clustered = generate(Generator::Clustered { angular_radius: 0.2 }, 4, 9).unwrap();
        assert!(!equality_case_check(&clustered, &OptimizerConfig::for_dimension(4, 2)).unwrap());
    }

    #[test]
    fn equality_case_respects_the_dimension_cap() {
        let set = generate(Generator::Orthonormal, 15, 0).unwrap();
        assert!(matches!(
            equality_case_check(&set, &OptimizerConfig::for_dimension(15, 0)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn tangent_gradient_matches_finite_differences() {
        let set = generate(Generator::RandomUniform, 5, 31).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let x = sphere_point(5, &mut rng);
        let analytic = tangent_gradient(&set, &x).unwrap();
        let h = 1e-6;
        for d in 0..5 {
            let eval = |t: f64| {
                let mut y = x.clone();
                y[d] += t;
                normalize(&mut y);
                log_abs_product(&set, &y).unwrap()
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            assert!(
                (fd - analytic[d]).abs() <= 1e-4 * analytic[d].abs().max(1.0),
                "coordinate {d}: fd {fd}, analytic {}",
                analytic[d]
            );
        }
    }

    #[test]
    fn tangent_gradient_rejects_degenerate_points() {
        let set = generate(Generator::Orthonormal, 3, 0).unwrap();
        assert!(matches!(
            tangent_gradient(&set, &[1.0, 0.0, 0.0]),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn reports_round_trip_through_json_bit_for_bit() {
        let set = generate(Generator::RandomUniform, 6, 13).unwrap();
        let report = witness_from_longest_sum(&set, SignSearchMethod::Exhaustive).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: WitnessReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report.product.to_bits(), back.product.to_bits());
        assert_eq!(report.log_product.to_bits(), back.log_product.to_bits());
        assert_eq!(report.bound.to_bits(), back.bound.to_bits());
        assert_eq!(report.passes, back.passes);
        assert_eq!(report.source, back.source);
        let bits = |v: &[f64]| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&report.x), bits(&back.x));

        // The zero-product sentinel survives as well (-inf encoded as null).
        let ortho = generate(Generator::Orthonormal, 3, 0).unwrap();
        let zero = witness_product(&ortho, &[1.0, 0.0, 0.0]).unwrap();
        let text = serde_json::to_string(&zero).unwrap();
        assert!(text.contains("null"));
        let back: WitnessReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.log_product, f64::NEG_INFINITY);
        assert_eq!(back.product.to_bits(), zero.product.to_bits());
    }
}
