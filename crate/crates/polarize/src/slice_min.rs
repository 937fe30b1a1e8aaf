//! Exact minimization of the coordinate product over cube slices.
//!
//! For a dimension `n >= 2` and a level `s` with `sqrt(n) <= s <= n`, the
//! feasible set is the slice
//!
//! ```text
//! Sigma_s = { a in [1/s, 1]^n : a_1 + ... + a_n = s },
//! ```
//!
//! and the object of interest is `mu(s)`, the minimum of the coordinate
//! product `f(a) = a_1 * ... * a_n` over `Sigma_s`. The minimum is attained
//! at a point with a rigid structure: some coordinates pinned at the lower
//! bound `1/s`, some at the upper bound `1`, and at most one strictly in
//! between. How many coordinates sit at the lower bound is controlled by the
//! pin threshold ([`pin_threshold`]), and the resulting closed form is
//! evaluated by [`closed_form_minimum`]. [`minimum_by_search`] recomputes
//! the minimum by brute enumeration of structured candidates plus randomized
//! local descent, and exists purely to cross-check the closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default per-coordinate feasibility tolerance for [`SlicePoint`].
pub const DEFAULT_COORD_TOL: f64 = 1e-12;

/// Half-width of the band around integer values of `s(n-s)/(s-1)` inside
/// which the pin threshold is resolved by the defining scan instead of the
/// floor formula (the floor is unstable exactly at branch boundaries).
pub const BREAKPOINT_TOL: f64 = 1e-9;

/// Products with any factor below this threshold are accumulated in log
/// space; with `n <= 14` the structured minima reach scales like `14^-14`,
/// far from underflow, but external callers may pass harsher points.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1e-3;

/// Slack accepted when the problem level is validated: levels within this
/// distance outside `[sqrt(n), n]` are clamped onto the interval, so that
/// levels produced by floating-point norms of extremal configurations (for
/// example a sign-sum norm that lands at `n + 1e-16`) stay usable.
const LEVEL_SLACK: f64 = 1e-9;

/// Number of random descent starts run by [`minimum_by_search`] on top of
/// the structured-candidate enumeration.
const SEARCH_STARTS: usize = 100;

/// Pair-transfer descent halves its step until it drops below this.
const DESCENT_MIN_STEP: f64 = 1e-12;

/// A validated cube-slice minimization instance: dimension `n >= 2` and
/// level `s` in `[sqrt(n), n]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubeSliceProblem {
    n: usize,
    s: f64,
}

impl CubeSliceProblem {
    /// Validates and builds a problem. Levels within `1e-9` outside the
    /// feasible interval are clamped onto it; anything further out is
    /// rejected.
    pub fn new(n: usize, s: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if !s.is_finite() {
            return Err(Error::NonFinite { name: "s", value: s });
        }
        let lo = (n as f64).sqrt();
        let hi = n as f64;
        if s < lo - LEVEL_SLACK || s > hi + LEVEL_SLACK {
            return Err(Error::LevelOutOfRange { n, s, lo, hi });
        }
        Ok(Self {
            n,
            s: s.clamp(lo, hi),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Lower box bound `1/s` of the slice.
    pub fn lower_bound(&self) -> f64 {
        1.0 / self.s
    }
}

/// A point of the slice `Sigma_s`, validated against the box bounds and the
/// sum constraint at construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicePoint {
    problem: CubeSliceProblem,
    coords: Vec<f64>,
}

impl SlicePoint {
    /// Builds a point with the default tolerance: every coordinate within
    /// [`DEFAULT_COORD_TOL`] of `[1/s, 1]` and the sum within
    /// `n * DEFAULT_COORD_TOL` of `s`.
    pub fn new(problem: CubeSliceProblem, coords: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(problem, coords, DEFAULT_COORD_TOL)
    }

    /// Same as [`SlicePoint::new`] with an explicit tolerance.
    pub fn with_tolerance(
        problem: CubeSliceProblem,
        coords: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        if coords.len() != problem.n() {
            return Err(Error::WrongCoordinateCount {
                got: coords.len(),
                expected: problem.n(),
            });
        }
        let lo = problem.lower_bound();
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    name: "coordinate",
                    value,
                });
            }
            if value < lo - tol || value > 1.0 + tol {
                return Err(Error::CoordinateOutOfBox {
                    index,
                    value,
                    lo,
                    tol,
                });
            }
        }
        let sum: f64 = coords.iter().sum();
        let sum_tol = problem.n() as f64 * tol;
        if (sum - problem.s()).abs() > sum_tol {
            return Err(Error::SumMismatch {
                sum,
                s: problem.s(),
                tol: sum_tol,
            });
        }
        Ok(Self { problem, coords })
    }

    pub fn problem(&self) -> CubeSliceProblem {
        self.problem
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate product `f(a)`, computed in log space when any factor is
    /// small enough for the direct product to lose precision.
    pub fn product_value(&self) -> f64 {
        product_of(&self.coords)
    }
}

/// Product of a slice of nonnegative factors, switching to log-space
/// accumulation when any factor drops below [`LOG_DOMAIN_THRESHOLD`].
pub fn product_of(coords: &[f64]) -> f64 {
    if coords.iter().any(|&a| a < LOG_DOMAIN_THRESHOLD) {
        if coords.contains(&0.0) {
            return 0.0;
        }
        coords.iter().map(|&a| a.ln()).sum::<f64>().exp()
    } else {
        coords.iter().product()
    }
}

/// Closed-form description of the slice minimum.
#[derive(Clone, Debug, Serialize)]
pub struct MinimumCertificate {
    problem: CubeSliceProblem,
    pin_threshold: usize,
    residual_sum: f64,
    minimizer: SlicePoint,
    value: f64,
}

impl MinimumCertificate {
    pub fn problem(&self) -> CubeSliceProblem {
        self.problem
    }

    /// The pin threshold used for this level (see [`pin_threshold`]).
    pub fn pin_threshold(&self) -> usize {
        self.pin_threshold
    }

    /// Sum left for the non-pinned coordinates: `s - (k - 1)/s` where `k` is
    /// the pin threshold.
    pub fn residual_sum(&self) -> f64 {
        self.residual_sum
    }

    /// The structured minimizing point: `k - 1` coordinates at `1/s`,
    /// `n - k` at `1`, one free coordinate in between (all at `1/s` in the
    /// degenerate single-point case `k = n + 1`, which happens only at
    /// `s = sqrt(n)`).
    pub fn minimizer(&self) -> &SlicePoint {
        &self.minimizer
    }

    /// The minimum value `mu(s)`.
    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Smallest `k >= 1` such that pinning `k` coordinates at the lower bound
/// `1/s` leaves the remaining `n - k` coordinates unable to reach the level:
/// the least `k` with `n - k < s - k/s`. Ranges over `1..=n+1`; the
/// minimizer holds exactly `k - 1` coordinates at the lower bound.
///
/// Away from branch boundaries this is `floor(s(n-s)/(s-1)) + 1`; within
/// [`BREAKPOINT_TOL`] of an integer value of `s(n-s)/(s-1)` the defining
/// inequality is scanned directly, since the floor formula flips on
/// floating-point noise there.
pub fn pin_threshold(problem: CubeSliceProblem) -> usize {
    let n = problem.n() as f64;
    let s = problem.s();
    // s >= sqrt(2) > 1 on the whole domain, so the defining inequality
    // n - k < s - k/s rearranges to k > s(n - s)/(s - 1).
    let x = s * (n - s) / (s - 1.0);
    if (x - x.round()).abs() <= BREAKPOINT_TOL {
        pin_threshold_scan(problem)
    } else {
        x.floor() as usize + 1
    }
}

/// Ground-truth scan of the defining inequality; always terminates by
/// `k = n + 1` because `s - (n+1)/s > -1` for every feasible level.
fn pin_threshold_scan(problem: CubeSliceProblem) -> usize {
    let n = problem.n();
    let s = problem.s();
    for k in 1..=n {
        if ((n - k) as f64) < s - k as f64 / s {
            return k;
        }
    }
    n + 1
}

/// Minimum value for a given pin threshold:
/// `s^(1-k) * (s - (k-1)/s - n + k)`.
fn value_for_threshold(n: usize, s: f64, k: usize) -> f64 {
    let free = s - (k as f64 - 1.0) / s - (n as f64 - k as f64);
    s.powi(1 - k as i32) * free
}

/// The slice minimum `mu(s)` without the certificate; used by grid scans
/// that only need the value.
pub fn minimum_value(problem: CubeSliceProblem) -> f64 {
    value_for_threshold(problem.n(), problem.s(), pin_threshold(problem))
}

/// Evaluates the closed form for the slice minimum and materializes the
/// structured minimizer that attains it.
pub fn closed_form_minimum(problem: CubeSliceProblem) -> MinimumCertificate {
    let n = problem.n();
    let s = problem.s();
    let k = pin_threshold(problem);
    let lo = problem.lower_bound();
    let residual = s - (k as f64 - 1.0) * lo;
    let value = value_for_threshold(n, s, k);
    let coords = if k == n + 1 {
        // Single-point slice at s = sqrt(n): every coordinate at the lower
        // bound; the general layout below would need n + 1 slots.
        vec![lo; n]
    } else {
        let mut c = vec![lo; k - 1];
        c.push(residual - (n - k) as f64);
        c.extend(std::iter::repeat_n(1.0, n - k));
        c
    };
    let minimizer = SlicePoint::new(problem, coords)
        .expect("structured minimizer must be feasible for a validated problem");
    MinimumCertificate {
        problem,
        pin_threshold: k,
        residual_sum: residual,
        minimizer,
        value,
    }
}

/// Independent estimate of the slice minimum: enumerates every structured
/// candidate (`p` coordinates at `1/s`, `q` at `1`, `p + q = n - 1`, one
/// free coordinate carrying the rest of the sum) and additionally runs a
/// pair-transfer descent from [`SEARCH_STARTS`] random feasible points.
/// Deterministic for a fixed seed.
pub fn minimum_by_search(problem: CubeSliceProblem, seed: u64) -> Result<f64> {
    let n = problem.n();
    let s = problem.s();
    let lo = problem.lower_bound();

    let mut best: Option<f64> = None;
    for p in 0..n {
        let q = n - 1 - p;
        let free = s - p as f64 * lo - q as f64;
        if free < lo - DEFAULT_COORD_TOL || free > 1.0 + DEFAULT_COORD_TOL {
            continue;
        }
        let mut coords = vec![lo; p];
        coords.push(free.clamp(lo, 1.0));
        coords.extend(std::iter::repeat_n(1.0, q));
        let value = product_of(&coords);
        best = Some(best.map_or(value, |b: f64| b.min(value)));
    }
    let mut best = best.ok_or(Error::EmptySlice { n, s })?;

    // Randomized safety net: if the structured enumeration ever missed the
    // true minimum, descent from scattered starts would undercut it.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SEARCH_STARTS {
        let mut a = random_feasible_point(n, s, lo, &mut rng);
        descend(&mut a, lo);
        let value = product_of(&a);
        if value < best {
            best = value;
        }
    }
    Ok(best)
}

/// Uniform draw in the box followed by water-filling onto the sum
/// constraint: spread the deficit across coordinates that can still move,
/// clamping at the bounds, until the sum matches.
fn random_feasible_point(n: usize, s: f64, lo: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=1.0)).collect();
    for _ in 0..4 * n + 8 {
        let sum: f64 = a.iter().sum();
        let gap = s - sum;
        if gap.abs() <= 1e-13 * n as f64 {
            break;
        }
        let movable: Vec<usize> = (0..n)
            .filter(|&i| if gap > 0.0 { a[i] < 1.0 } else { a[i] > lo })
            .collect();
        if movable.is_empty() {
            break;
        }
        let delta = gap / movable.len() as f64;
        for i in movable {
            a[i] = (a[i] + delta).clamp(lo, 1.0);
        }
    }
    a
}

/// Local descent by coordinate-pair transfers. Moving `step` from `a_i` to
/// `a_j` keeps the sum fixed and lowers the product exactly when
/// `a_i - a_j < step` (the product changes by `step*(a_i - a_j) - step^2`),
/// so mass migrates from mid-range coordinates toward the bounds.
fn descend(a: &mut [f64], lo: f64) {
    let n = a.len();
    let mut step = 0.5 * (1.0 - lo);
    while step >= DESCENT_MIN_STEP {
        // A few sweeps per step level; the cap guards against pathological
        // ping-ponging between near-equal coordinates.
        for _ in 0..2 * n {
            let mut moved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || a[i] - step < lo || a[j] + step > 1.0 {
                        continue;
                    }
                    if a[i] - a[j] < step {
                        a[i] -= step;
                        a[j] += step;
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        step *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(n: usize, s: f64) -> CubeSliceProblem {
        CubeSliceProblem::new(n, s).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(a.abs())
    }

    #[test]
    fn problem_rejects_tiny_dimension() {
        assert!(matches!(
            CubeSliceProblem::new(1, 1.0),
            Err(Error::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn problem_rejects_level_outside_interval() {
        assert!(matches!(
            CubeSliceProblem::new(3, 5.0),
            Err(Error::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            CubeSliceProblem::new(3, 1.0),
            Err(Error::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            CubeSliceProblem::new(3, f64::NAN),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn problem_clamps_levels_within_slack() {
        let p = problem(4, 2.0 - 1e-10);
        assert_eq!(p.s(), 2.0);
        let p = problem(4, 4.0 + 1e-10);
        assert_eq!(p.s(), 4.0);
    }

    #[test]
    fn pin_threshold_at_top_level_is_one() {
        assert_eq!(pin_threshold(problem(5, 5.0)), 1);
    }

    #[test]
    fn pin_threshold_interior_example() {
        assert_eq!(pin_threshold(problem(9, 4.0)), 7);
    }

    #[test]
    fn pin_threshold_at_bottom_level_is_n_plus_one() {
        assert_eq!(pin_threshold(problem(4, 2.0)), 5);
    }

    #[test]
    fn minimum_at_top_level_is_all_ones() {
        let cert = closed_form_minimum(problem(6, 6.0));
        assert_eq!(cert.pin_threshold(), 1);
        assert!(rel_close(cert.value(), 1.0, 1e-14));
        for &c in cert.minimizer().coords() {
            assert!((c - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn minimum_interior_example_with_structure() {
        // n = 9, s = 4: six coordinates at 1/4, one at 1/2, two at 1, and
        // the product 1/8192.
        let cert = closed_form_minimum(problem(9, 4.0));
        assert_eq!(cert.pin_threshold(), 7);
        assert!(rel_close(cert.value(), 1.0 / 8192.0, 1e-14));
        let coords = cert.minimizer().coords();
        assert_eq!(coords.iter().filter(|&&c| (c - 0.25).abs() < 1e-12).count(), 6);
        assert_eq!(coords.iter().filter(|&&c| (c - 0.5).abs() < 1e-12).count(), 1);
        assert_eq!(coords.iter().filter(|&&c| (c - 1.0).abs() < 1e-12).count(), 2);
    }

    #[test]
    fn minimum_at_single_point_slice() {
        // n = 4, s = 2 = sqrt(4): the slice is the single point (1/2,...,1/2).
        let cert = closed_form_minimum(problem(4, 2.0));
        assert_eq!(cert.pin_threshold(), 5);
        assert!(rel_close(cert.value(), 1.0 / 16.0, 1e-14));
        for &c in cert.minimizer().coords() {
            assert!((c - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn minimum_at_branch_boundary_level() {
        // n = 7, s = 3 sits exactly on a branch boundary; the scan resolves
        // the threshold and the value is 1/729.
        let cert = closed_form_minimum(problem(7, 3.0));
        assert!(rel_close(cert.value(), 1.0 / 729.0, 1e-13));
    }

    #[test]
    fn certificate_value_matches_minimizer_product() {
        let mut s_values = Vec::new();
        for i in 1..40 {
            s_values.push(3.0 + i as f64 * 0.15);
        }
        for s in s_values {
            let cert = closed_form_minimum(problem(9, s));
            let prod = cert.minimizer().product_value();
            assert!(
                rel_close(cert.value(), prod, 1e-12),
                "s = {s}: closed form {} vs product {prod}",
                cert.value()
            );
        }
    }

    #[test]
    fn minimum_never_exceeds_centered_product() {
        // The centered point (s/n, ..., s/n) is feasible, so mu(s) <= (s/n)^n.
        for n in [2usize, 5, 9, 14] {
            let lo = (n as f64).sqrt();
            for i in 0..=20 {
                let s = lo + (n as f64 - lo) * i as f64 / 20.0;
                let p = problem(n, s);
                let centered = (s / n as f64).powi(n as i32);
                assert!(minimum_value(p) <= centered * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn slice_point_validates_box_and_sum() {
        let p = problem(3, 2.0);
        assert!(SlicePoint::new(p, vec![0.5, 0.5, 1.0]).is_ok());
        assert!(matches!(
            SlicePoint::new(p, vec![0.4, 0.6, 1.0]),
            Err(Error::CoordinateOutOfBox { index: 0, .. })
        ));
        assert!(matches!(
            SlicePoint::new(p, vec![0.5, 0.5, 0.5]),
            Err(Error::SumMismatch { .. })
        ));
        assert!(matches!(
            SlicePoint::new(p, vec![0.5, 1.5]),
            Err(Error::WrongCoordinateCount { .. })
        ));
    }

    #[test]
    fn slice_point_honors_custom_tolerance() {
        let p = problem(3, 2.0);
        let coords = vec![0.5 - 1e-8, 0.5, 1.0 + 1e-8];
        assert!(SlicePoint::new(p, coords.clone()).is_err());
        assert!(SlicePoint::with_tolerance(p, coords, 1e-6).is_ok());
    }

    #[test]
    fn product_switches_to_log_domain_for_tiny_factors() {
        let tiny = vec![1e-4; 6];
        let direct: f64 = tiny.iter().product();
        assert!(rel_close(product_of(&tiny), direct, 1e-12));
        assert_eq!(product_of(&[0.5, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn search_on_single_point_slice() {
        assert!(rel_close(
            minimum_by_search(problem(2, 2.0), 0).unwrap(),
            1.0,
            1e-12
        ));
        assert!(rel_close(
            minimum_by_search(problem(4, 2.0), 1).unwrap(),
            1.0 / 16.0,
            1e-12
        ));
    }

    #[test]
    fn search_matches_interior_example() {
        assert!(rel_close(
            minimum_by_search(problem(9, 4.0), 7).unwrap(),
            1.0 / 8192.0,
            1e-12
        ));
    }

    #[test]
    fn search_is_deterministic_for_fixed_seed() {
        let p = problem(6, 3.3);
        let a = minimum_by_search(p, 123).unwrap();
        let b = minimum_by_search(p, 123).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
