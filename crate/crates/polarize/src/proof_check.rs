//! Numerical verification of the derived artifacts behind the slice
//! minimum.
//!
//! The slice minimum `mu(s)` (see [`crate::slice_min`]) is piecewise smooth
//! in the level `s`: on each branch interval it agrees with an explicit
//! rational-power function, and the branch boundaries ("breakpoints") are
//! the roots `s_j` of `x^2 - (n-j)x - j`, with `sqrt(n) = s_n < s_{n-1} <
//! ... < s_0 = n` and `mu(s_j) = s_j^{-j}`. This module computes the
//! breakpoints, evaluates and shape-checks the branch functions, reproduces
//! the reference table of powers whose comparison `s_{n-1}^{n-1} <=
//! sqrt(n^n)` is the crux of the bound (true precisely for `n <= 14`), runs
//! the slope analysis that certifies the remaining inequalities, and scans
//! `mu` for its global minimum `n^{-n/2}` at `s = sqrt(n)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::slice_min::{minimum_value, CubeSliceProblem};

/// Relative tolerance at which `mu(s_j)` must reproduce `s_j^{-j}`.
pub const BREAKPOINT_VALUE_TOL: f64 = 1e-11;

/// Absolute slack accepted on branch-interval membership checks, covering
/// floating-point placement of the computed endpoints.
const INTERVAL_EDGE_TOL: f64 = 1e-9;

/// Minimum grid size for the quasi-concavity sign scan.
const MIN_SHAPE_GRID: usize = 100;

/// The breakpoint levels `s_0 > s_1 > ... > s_n` for one dimension.
#[derive(Clone, Debug, Serialize)]
pub struct BreakpointTable {
    n: usize,
    levels: Vec<f64>,
}

impl BreakpointTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `s_j`; panics if `j > n`.
    pub fn level(&self, j: usize) -> f64 {
        self.levels[j]
    }

    /// All levels, indexed by `j`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// The branch interval `[s_j, s_{j-1}]` for `1 <= j <= n`.
    pub fn branch_interval(&self, j: usize) -> Result<(f64, f64)> {
        if j < 1 || j > self.n {
            return Err(Error::BranchIndexOutOfRange { j, n: self.n });
        }
        Ok((self.levels[j], self.levels[j - 1]))
    }
}

/// Computes every breakpoint `s_j = ((n-j) + sqrt((n-j)^2 + 4j)) / 2`,
/// `j = 0..=n` — the positive root of `x^2 - (n-j)x - j`.
pub fn breakpoints(n: usize) -> Result<BreakpointTable> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let levels = (0..=n)
        .map(|j| {
            let d = (n - j) as f64;
            0.5 * (d + (d * d + 4.0 * j as f64).sqrt())
        })
        .collect();
    Ok(BreakpointTable { n, levels })
}

/// `sqrt(n^n)`, computed so that integer-valued results are exact: even `n`
/// uses the integer power `n^(n/2)` directly, odd `n` multiplies the exact
/// integer power `n^((n-1)/2)` by `sqrt(n)`.
pub fn sqrt_n_pow_n(n: usize) -> f64 {
    let nf = n as f64;
    if n.is_multiple_of(2) {
        nf.powi((n / 2) as i32)
    } else {
        nf.powi(((n - 1) / 2) as i32) * nf.sqrt()
    }
}

/// The slice minimum evaluated at the breakpoint `s_j`, asserted to equal
/// `s_j^{-j}` within [`BREAKPOINT_VALUE_TOL`].
pub fn minimum_at_breakpoint(n: usize, j: usize) -> Result<f64> {
    let table = breakpoints(n)?;
    if j < 1 || j > n {
        return Err(Error::BranchIndexOutOfRange { j, n });
    }
    let level = table.level(j);
    let problem = CubeSliceProblem::new(n, level)?;
    let value = minimum_value(problem);
    let expected = level.powi(-(j as i32));
    assert!(
        (value - expected).abs() <= BREAKPOINT_VALUE_TOL * expected,
        "minimum at breakpoint j = {j} (n = {n}): got {value}, expected {expected}"
    );
    Ok(value)
}

fn check_branch_point(table: &BreakpointTable, j: usize, x: f64) -> Result<()> {
    let (lo, hi) = table.branch_interval(j)?;
    if !x.is_finite() {
        return Err(Error::NonFinite { name: "x", value: x });
    }
    if x < lo - INTERVAL_EDGE_TOL || x > hi + INTERVAL_EDGE_TOL {
        return Err(Error::OutsideBranchInterval { x, lo, hi });
    }
    Ok(())
}

/// The branch function `M_j(x) = x^(2-j) + (j-n)x^(1-j) + (1-j)x^(-j)`,
/// which agrees with the slice minimum on the open interval `(s_j, s_{j-1})`.
/// For `j = 1` it degenerates to `x + 1 - n`.
pub fn branch_value(n: usize, j: usize, x: f64) -> Result<f64> {
    let table = breakpoints(n)?;
    check_branch_point(&table, j, x)?;
    let jf = j as f64;
    let nf = n as f64;
    Ok(x.powi(2 - j as i32) + (jf - nf) * x.powi(1 - j as i32) + (1.0 - jf) * x.powi(-(j as i32)))
}

/// Numerator of the branch derivative:
/// `q(x) = x^2 + (1-j)(x^2 + (j-n)x - j)`. The derivative itself is
/// `q(x) / x^(j+1)`, so `q` carries its sign.
fn branch_derivative_numerator(n: usize, j: usize, x: f64) -> f64 {
    let jf = j as f64;
    let nf = n as f64;
    x * x + (1.0 - jf) * (x * x + (jf - nf) * x - jf)
}

/// Derivative of the branch function, `M_j'(x) = q(x) / x^(j+1)`.
pub fn branch_derivative(n: usize, j: usize, x: f64) -> Result<f64> {
    let table = breakpoints(n)?;
    check_branch_point(&table, j, x)?;
    Ok(branch_derivative_numerator(n, j, x) / x.powi(j as i32 + 1))
}

/// Shape report for one branch: increasing throughout, or increasing then
/// decreasing with the turning point bracketed and bisected.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuasiConcavity {
    pub quasi_concave: bool,
    /// Interior turning point, present only when the derivative changes
    /// sign on the branch interval.
    pub critical_point: Option<f64>,
}

/// Sign-scans the branch derivative on a uniform grid over `[s_j, s_{j-1}]`
/// and checks the sign pattern is `(+)*` or `(+)*(-)*`. The scan runs on the
/// derivative's polynomial numerator, whose sign matches the derivative
/// while staying at sane magnitudes (the derivative itself is scaled down by
/// `x^(j+1)`, which reaches `1e17` for the largest branches).
pub fn quasiconcavity(n: usize, j: usize, grid: usize) -> Result<QuasiConcavity> {
    let table = breakpoints(n)?;
    let (lo, hi) = table.branch_interval(j)?;
    if grid < MIN_SHAPE_GRID {
        return Err(Error::GridTooCoarse {
            got: grid,
            min: MIN_SHAPE_GRID,
        });
    }

    let point = |t: usize| {
        if t == grid {
            hi
        } else {
            lo + (hi - lo) * t as f64 / grid as f64
        }
    };
    let values: Vec<f64> = (0..=grid)
        .map(|t| branch_derivative_numerator(n, j, point(t)))
        .collect();

    // Near-zero derivative values are legitimate only in isolation (the
    // numerator is a quadratic, so it can vanish only at isolated roots);
    // a plateau of them means the sign pattern cannot be trusted.
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = 1e-14 * scale;
    let zero_count = values.iter().filter(|v| v.abs() <= zero_tol).count();
    if zero_count > 4 {
        return Err(Error::IndeterminateSign { count: zero_count });
    }

    let signs: Vec<i8> = values
        .iter()
        .filter(|v| v.abs() > zero_tol)
        .map(|&v| if v > 0.0 { 1 } else { -1 })
        .collect();
    if signs.is_empty() || signs[0] < 0 {
        return Ok(QuasiConcavity {
            quasi_concave: false,
            critical_point: None,
        });
    }
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let rises = signs.windows(2).filter(|w| w[0] < w[1]).count();
    if changes > 1 || rises > 0 {
        return Ok(QuasiConcavity {
            quasi_concave: false,
            critical_point: None,
        });
    }
    if changes == 0 {
        return Ok(QuasiConcavity {
            quasi_concave: true,
            critical_point: None,
        });
    }

    // Exactly one + -> - transition: bracket it on the original grid and
    // bisect the numerator for the turning point.
    let first_neg = (0..=grid)
        .find(|&t| values[t] < -zero_tol)
        .expect("a sign change implies a negative grid value");
    let mut a = point(first_neg - 1);
    let mut b = point(first_neg);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if branch_derivative_numerator(n, j, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-13 * b.abs().max(1.0) {
            break;
        }
    }
    Ok(QuasiConcavity {
        quasi_concave: true,
        critical_point: Some(0.5 * (a + b)),
    })
}

/// One row of the reference table: the slope certificate `column2 =
/// ln(sqrt(n^n)) * ((x^2 - 2x + n) / (x (x-n)^2))` at `x = n^(n/(2(n-1)))`,
/// the power `s_{n-1}^{n-1}` of the last interior breakpoint, and
/// `sqrt(n^n)`. The comparison of the last two is the bound criterion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub column2: f64,
    pub s_nm1_pow: f64,
    pub sqrt_n_pow_n: f64,
    /// `s_{n-1}^{n-1} <= sqrt(n^n)` (up to 1e-12 relative slack).
    pub bound_holds: bool,
}

fn check_table_range(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionBelowAnalysisRange { n, min: 3 });
    }
    if n > 16 {
        return Err(Error::TooLarge {
            n,
            limit: 16,
            what: "reference table rows",
        });
    }
    Ok(())
}

/// Computes the reference-table row for one dimension (`3 <= n <= 16`).
pub fn table_row(n: usize) -> Result<TableRow> {
    check_table_range(n)?;
    let nf = n as f64;
    let x = left_endpoint(n);
    let column2 = half_log(n) * increasing_part(nf, x);
    let table = breakpoints(n)?;
    let s_nm1_pow = table.level(n - 1).powi(n as i32 - 1);
    let half_power = sqrt_n_pow_n(n);
    Ok(TableRow {
        n,
        column2,
        s_nm1_pow,
        sqrt_n_pow_n: half_power,
        bound_holds: s_nm1_pow <= half_power * (1.0 + 1e-12),
    })
}

/// `ln(sqrt(n^n)) = (n/2) ln n`.
fn half_log(n: usize) -> f64 {
    let nf = n as f64;
    0.5 * nf * nf.ln()
}

/// Left endpoint of the slope-analysis interval, `n^(n/(2(n-1)))`.
fn left_endpoint(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(nf / (2.0 * (nf - 1.0)))
}

/// Right endpoint of the slope-analysis interval,
/// `n^(n/(2(floor(n/2) + 1)))`.
fn right_endpoint(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(nf / (2.0 * (n / 2 + 1) as f64))
}

/// The increasing factor `(x^2 - 2x + n) / (x (x-n)^2)` of the slope bound.
fn increasing_part(nf: f64, x: f64) -> f64 {
    (x * x - 2.0 * x + nf) / (x * (x - nf) * (x - nf))
}

/// `phi(x) = (1-x)/(x^2 - nx) - ln(x)/ln(sqrt(n^n))`: nonnegativity of this
/// function on the slope interval is equivalent to the per-branch bound
/// `s_j^j <= sqrt(n^n)` holding with the right monotonicity.
pub fn phi(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    (1.0 - x) / (x * x - nf * x) - x.ln() / half_log(n)
}

/// Analytic derivative
/// `phi'(x) = (x^2 - 2x + n)/(x^2 (x-n)^2) - 1/(x ln(sqrt(n^n)))`.
pub fn phi_prime(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    (x * x - 2.0 * x + nf) / (x * x * (x - nf) * (x - nf)) - 1.0 / (x * half_log(n))
}

/// Slope analysis over the interval
/// `J_n = [n^(n/(2(n-1))), n^(n/(2(floor(n/2)+1)))]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhiAnalysis {
    /// `phi` at the left endpoint of `J_n`.
    pub phi_left: f64,
    /// Whether `phi' > 0` at every grid point of `J_n`.
    pub phi_prime_positive: bool,
    /// Minimum of `phi'` over the grid.
    pub phi_prime_min: f64,
    /// `4(n-1)(n-16)`, the discriminant controlling whether the slope
    /// factor can stop increasing; negative exactly for `2 <= n <= 15`.
    pub discriminant: f64,
}

/// Evaluates the slope analysis on a uniform grid of `grid + 1` points
/// (`3 <= n <= 16`; for `n = 3, 4` the interval degenerates to one point).
pub fn phi_analysis(n: usize, grid: usize) -> Result<PhiAnalysis> {
    check_table_range(n)?;
    if grid < 1 {
        return Err(Error::GridTooCoarse { got: grid, min: 1 });
    }
    let lo = left_endpoint(n);
    let hi = right_endpoint(n);
    let mut min_slope = f64::INFINITY;
    for t in 0..=grid {
        let x = if t == grid {
            hi
        } else {
            lo + (hi - lo) * t as f64 / grid as f64
        };
        min_slope = min_slope.min(phi_prime(n, x));
    }
    let nf = n as f64;
    Ok(PhiAnalysis {
        phi_left: phi(n, lo),
        phi_prime_positive: min_slope > 0.0,
        phi_prime_min: min_slope,
        discriminant: 4.0 * (nf - 1.0) * (nf - 16.0),
    })
}

/// Result of scanning the slice minimum over its whole domain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanReport {
    pub n: usize,
    /// Number of uniform grid steps over `[sqrt(n), n]` (the scan also
    /// visits every breakpoint).
    pub grid: usize,
    pub grid_step: f64,
    pub min_value: f64,
    /// Level attaining the minimum (first hit wins on exact ties).
    pub argmin: f64,
    /// `n^(-n/2)`, the value the global minimum must match.
    pub bound: f64,
    /// Every evaluated level strictly above `sqrt(n)` stayed strictly above
    /// the bound.
    pub strict_off_minimum: bool,
    /// `min_value >= bound * (1 - 1e-12)` and [`Self::strict_off_minimum`].
    pub bound_holds: bool,
}

/// Evaluates the slice minimum on a uniform grid over `[sqrt(n), n]` plus
/// all breakpoints and reports the global minimum against `n^(-n/2)`.
pub fn global_minimum_scan(n: usize, grid: usize) -> Result<ScanReport> {
    if grid < 2 {
        return Err(Error::GridTooCoarse { got: grid, min: 2 });
    }
    let table = breakpoints(n)?;
    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let step = (nf - sqrt_n) / grid as f64;
    let bound = 1.0 / sqrt_n_pow_n(n);

    let mut min_value = f64::INFINITY;
    let mut argmin = sqrt_n;
    let mut strict = true;
    let mut visit = |s: f64| {
        let value = minimum_value(CubeSliceProblem::new(n, s).expect("level inside domain"));
        if s > sqrt_n && value <= bound {
            strict = false;
        }
        if value < min_value {
            min_value = value;
            argmin = s;
        }
    };
    for t in 0..=grid {
        let s = if t == 0 {
            sqrt_n
        } else if t == grid {
            nf
        } else {
            sqrt_n + step * t as f64
        };
        visit(s);
    }
    for &s in table.levels() {
        visit(s);
    }

    Ok(ScanReport {
        n,
        grid,
        grid_step: step,
        min_value,
        argmin,
        bound,
        strict_off_minimum: strict,
        bound_holds: min_value >= bound * (1.0 - 1e-12) && strict,
    })
}

/// Per-breakpoint power comparison inside [`ProofCheckReport`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchBoundCheck {
    pub j: usize,
    pub level: f64,
    pub level_pow_j: f64,
    pub bound: f64,
    /// `s_j^j <= sqrt(n^n)` up to 1e-12 relative slack.
    pub bound_holds: bool,
    /// `s_j^j < sqrt(n^n)` by more than 1e-12 relative margin; expected for
    /// every `j < n` (at `j = n` the two sides coincide).
    pub strict: bool,
}

/// Aggregate verification report for one dimension.
#[derive(Clone, Debug, Serialize)]
pub struct ProofCheckReport {
    pub n: usize,
    pub per_j: Vec<BranchBoundCheck>,
    pub phi_at_left_endpoint: f64,
    pub phi_prime_min_on_grid: f64,
    pub table_column2: f64,
    pub discriminant: f64,
    /// Quasi-concavity flags for branches `j = 1..=n`.
    pub quasi_concave: Vec<bool>,
}

/// Runs every per-dimension check (`3 <= n <= 16`) with the same grid size
/// for the shape scans and the slope analysis (`grid >= 100`).
pub fn full_report(n: usize, grid: usize) -> Result<ProofCheckReport> {
    check_table_range(n)?;
    let table = breakpoints(n)?;
    let half_power = sqrt_n_pow_n(n);
    let per_j = (0..=n)
        .map(|j| {
            let level = table.level(j);
            let pow = level.powi(j as i32);
            BranchBoundCheck {
                j,
                level,
                level_pow_j: pow,
                bound: half_power,
                bound_holds: pow <= half_power * (1.0 + 1e-12),
                strict: pow < half_power * (1.0 - 1e-12),
            }
        })
        .collect();
    let quasi_concave = (1..=n)
        .map(|j| Ok(quasiconcavity(n, j, grid)?.quasi_concave))
        .collect::<Result<Vec<_>>>()?;
    let slope = phi_analysis(n, grid)?;
    let row = table_row(n)?;
    Ok(ProofCheckReport {
        n,
        per_j,
        phi_at_left_endpoint: slope.phi_left,
        phi_prime_min_on_grid: slope.phi_prime_min,
        table_column2: row.column2,
        discriminant: slope.discriminant,
        quasi_concave,
    })
}

pub mod reference {
    //! Built-in reference values reproduced by the verification suite.
    //!
    //! Values published to three decimal places are compared at `5e-3`
    //! relative tolerance; integer-valued entries are compared exactly
    //! after rounding.

    /// How strictly a reference entry can be compared.
    #[derive(Clone, Copy, Debug)]
    pub enum ReferenceValue {
        /// Integer-valued entry; the computed value must round to exactly
        /// this.
        Exact(f64),
        /// Entry published to three decimals; compared at `5e-3` relative.
        Printed(f64),
    }

    impl ReferenceValue {
        pub fn value(&self) -> f64 {
            match *self {
                ReferenceValue::Exact(v) | ReferenceValue::Printed(v) => v,
            }
        }

        /// Checks a computed value against this entry at its tolerance.
        pub fn matches(&self, computed: f64) -> bool {
            match *self {
                ReferenceValue::Exact(v) => computed.round() == v && relative_close(computed, v),
                ReferenceValue::Printed(v) => relative_close(computed, v),
            }
        }
    }

    fn relative_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 5e-3 * b.abs()
    }

    /// One reference row per dimension.
    #[derive(Clone, Copy, Debug)]
    pub struct ReferenceRow {
        pub n: usize,
        /// Slope certificate, published to three decimals.
        pub column2: f64,
        pub s_nm1_pow: ReferenceValue,
        pub sqrt_n_pow_n: ReferenceValue,
        pub bound_holds: bool,
    }

    use ReferenceValue::{Exact, Printed};

    /// The full reference table for `3 <= n <= 16`. The bound fails first
    /// at `n = 15`, where `s_14^14` overtakes `sqrt(15^15)`.
    pub const TABLE: [ReferenceRow; 14] = [
        ReferenceRow { n: 3, column2: 5.065, s_nm1_pow: Exact(4.0), sqrt_n_pow_n: Printed(5.196), bound_holds: true },
        ReferenceRow { n: 4, column2: 2.666, s_nm1_pow: Printed(12.211), sqrt_n_pow_n: Exact(16.0), bound_holds: true },
        ReferenceRow { n: 5, column2: 2.008, s_nm1_pow: Printed(43.053), sqrt_n_pow_n: Printed(55.901), bound_holds: true },
        ReferenceRow { n: 6, column2: 1.698, s_nm1_pow: Printed(169.442), sqrt_n_pow_n: Exact(216.0), bound_holds: true },
        ReferenceRow { n: 7, column2: 1.514, s_nm1_pow: Exact(729.0), sqrt_n_pow_n: Printed(907.492), bound_holds: true },
        ReferenceRow { n: 8, column2: 1.389, s_nm1_pow: Printed(3380.607), sqrt_n_pow_n: Exact(4096.0), bound_holds: true },
        ReferenceRow { n: 9, column2: 1.298, s_nm1_pow: Printed(16725.933), sqrt_n_pow_n: Exact(19683.0), bound_holds: true },
        ReferenceRow { n: 10, column2: 1.227, s_nm1_pow: Printed(87610.098), sqrt_n_pow_n: Exact(100000.0), bound_holds: true },
        ReferenceRow { n: 11, column2: 1.170, s_nm1_pow: Printed(482892.455), sqrt_n_pow_n: Printed(534145.739), bound_holds: true },
        ReferenceRow { n: 12, column2: 1.123, s_nm1_pow: Printed(2787117.027), sqrt_n_pow_n: Exact(2985984.0), bound_holds: true },
        ReferenceRow { n: 13, column2: 1.084, s_nm1_pow: Exact(16777216.0), sqrt_n_pow_n: Printed(17403307.350), bound_holds: true },
        ReferenceRow { n: 14, column2: 1.049, s_nm1_pow: Printed(104973424.100), sqrt_n_pow_n: Exact(105413504.0), bound_holds: true },
        ReferenceRow { n: 15, column2: 1.019, s_nm1_pow: Printed(680750436.468), sqrt_n_pow_n: Printed(661735513.918), bound_holds: false },
        ReferenceRow { n: 16, column2: 0.992, s_nm1_pow: Printed(4564290812.351), sqrt_n_pow_n: Exact(4294967296.0), bound_holds: false },
    ];
}
