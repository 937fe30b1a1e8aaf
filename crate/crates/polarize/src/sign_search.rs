//! Longest-sum sign optimization: `max` over signs `eps_i = ±1` of
//! `|eps_1 v_1 + ... + eps_n v_n|`.
//!
//! At any sign-local maximum, flipping `eps_k` cannot help, and since the
//! flip changes the squared norm by exactly `4 - 4 eps_k <v_k, v>`, every
//! aligned inner product satisfies `eps_k <v_k, v> >= 1`. That inequality
//! is what makes `v/|v|` a witness for the product bound, and what makes
//! the lambda map ([`lambda_map`]) land inside the slice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_squared};
use crate::seeding::derive_seed;
use crate::slice_min::{CubeSliceProblem, SlicePoint};
use crate::vectors::{gram, UnitVectorSet};

/// Largest dimension for which the `2^(n-1)` sign assignments are
/// enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Alignment tolerance promised on results: `eps_i <v_i, v> >= 1 - 1e-9`.
pub const ALIGNMENT_TOL: f64 = 1e-9;

/// Local search keeps flipping while some alignment is below this, leaving
/// a 10x margin under [`ALIGNMENT_TOL`] for recompute noise.
const FLIP_THRESHOLD: f64 = 1.0 - 1e-10;

/// Safety valve on flips per restart; ascent is strictly monotone, so this
/// is never reached in practice.
const FLIP_CAP: usize = 100_000;

/// A choice of signs, canonicalized so the first sign is `+1` (negating
/// every sign preserves the sum's norm).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignAssignment {
    eps: Vec<i8>,
}

impl SignAssignment {
    pub(crate) fn new(mut eps: Vec<i8>) -> Self {
        debug_assert!(eps.iter().all(|&e| e == 1 || e == -1));
        if eps.first() == Some(&-1) {
            for e in eps.iter_mut() {
                *e = -*e;
            }
        }
        Self { eps }
    }

    pub fn eps(&self) -> &[i8] {
        &self.eps
    }
}

/// How a longest sum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    LocalSearch,
}

/// Outcome of a longest-sum search. `is_global` is true only for the
/// exhaustive method; every result satisfies the alignment invariant
/// `eps_i <v_i, v> >= 1 -` [`ALIGNMENT_TOL`].
#[derive(Clone, Debug, Serialize)]
pub struct LongestSumResult {
    pub signs: SignAssignment,
    pub v: Vec<f64>,
    pub norm: f64,
    pub method: SearchMethod,
    pub is_global: bool,
}

/// Indices flipped by the binary-reflected Gray code walking all
/// `2^(n-1)` canonical sign assignments (first sign pinned to `+1`), so
/// the running sum can be updated in O(n) per visited assignment.
pub fn gray_flip_sequence(n: usize) -> impl Iterator<Item = usize> {
    assert!((1..=EXHAUSTIVE_LIMIT + 1).contains(&n), "n = {n} out of range");
    (1u64..1 << (n - 1)).map(|c| c.trailing_zeros() as usize + 1)
}

/// Prefers `+1` over `-1` position by position; used to break exact ties.
fn eps_less(a: &[i8], b: &[i8]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return *x > *y;
        }
    }
    false
}

fn build_result(
    set: &UnitVectorSet,
    signs: SignAssignment,
    method: SearchMethod,
    is_global: bool,
) -> LongestSumResult {
    let v = set.signed_sum(signs.eps());
    let v_norm = norm(&v);
    debug_assert!(signs.eps().iter().enumerate().all(|(i, &e)| {
        e as f64 * dot(set.row(i), &v) >= 1.0 - ALIGNMENT_TOL
    }));
    LongestSumResult {
        signs,
        v,
        norm: v_norm,
        method,
        is_global,
    }
}

/// Finds the globally longest sum by Gray-code enumeration of all
/// `2^(n-1)` canonical sign assignments, updating the running sum in O(n)
/// per flip. Exact ties go to the sign pattern with `+1` earliest.
pub fn longest_sum_exhaustive(set: &UnitVectorSet) -> Result<LongestSumResult> {
    let n = set.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
            what: "exhaustive sign enumeration",
        });
    }
    let mut eps = vec![1i8; n];
    let mut w = set.signed_sum(&eps);
    let mut best_eps = eps.clone();
    let mut best_sq = norm_squared(&w);
    for flip in gray_flip_sequence(n) {
        let s = eps[flip] as f64;
        for (wd, &rd) in w.iter_mut().zip(set.row(flip)) {
            *wd -= 2.0 * s * rd;
        }
        eps[flip] = -eps[flip];
        let sq = norm_squared(&w);
        if sq > best_sq || (sq == best_sq && eps_less(&eps, &best_eps)) {
            best_sq = sq;
            best_eps = eps.clone();
        }
    }
    // The winning sum is recomputed from scratch, shedding incremental drift.
    Ok(build_result(
        set,
        SignAssignment::new(best_eps),
        SearchMethod::Exhaustive,
        true,
    ))
}

/// Steepest-ascent sign flips from `restarts` random assignments. Flipping
/// `eps_k` changes `|v|^2` by `4 - 4 d_k` where `d_k = eps_k <v_k, v>`, so
/// the least-aligned index is flipped while its alignment is below 1;
/// alignments are maintained through the Gram matrix in O(n) per flip.
pub fn longest_sum_local(
    set: &UnitVectorSet,
    seed: u64,
    restarts: usize,
) -> Result<LongestSumResult> {
    if restarts == 0 {
        return Err(Error::NoRestarts);
    }
    let n = set.n();
    let g = gram(set);
    let g = g.gram();
    let mut best: Option<(f64, Vec<i8>)> = None;
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, restart as u64));
        let mut eps: Vec<i8> = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                let row_sum: f64 = (0..n).map(|j| eps[j] as f64 * g[i][j]).sum();
                eps[i] as f64 * row_sum
            })
            .collect();
        for _ in 0..FLIP_CAP {
            let mut k = 0;
            for i in 1..n {
                if d[i] < d[k] {
                    k = i;
                }
            }
            if d[k] >= FLIP_THRESHOLD {
                break;
            }
            let old = eps[k] as f64;
            eps[k] = -eps[k];
            for i in 0..n {
                if i != k {
                    d[i] -= 2.0 * eps[i] as f64 * old * g[i][k];
                }
            }
            d[k] = 2.0 * g[k][k] - d[k];
        }
        let sq = norm_squared(&set.signed_sum(&eps));
        let better = match &best {
            None => true,
            Some((best_sq, best_eps)) => {
                sq > *best_sq || (sq == *best_sq && eps_less(&eps, best_eps))
            }
        };
        if better {
            best = Some((sq, eps));
        }
    }
    let (_, eps) = best.expect("restarts >= 1");
    Ok(build_result(
        set,
        SignAssignment::new(eps),
        SearchMethod::LocalSearch,
        false,
    ))
}

/// The lambda map: sends a set with longest sum `v` of norm `s` to the
/// slice point `a_i = eps_i <v_i, v> / s` on `Sigma_s`. The coordinates
/// sum to `s` exactly, and maximality puts each inside `[1/s, 1]`; a
/// validation failure therefore signals a non-maximal input result.
pub fn lambda_map(set: &UnitVectorSet, result: &LongestSumResult) -> Result<SlicePoint> {
    let n = set.n();
    if result.v.len() != n {
        return Err(Error::DimensionMismatch {
            got: result.v.len(),
            expected: n,
        });
    }
    let wrap = |e: Error| Error::NonMaximalLongestSum { source: Box::new(e) };
    let problem = CubeSliceProblem::new(n, result.norm).map_err(wrap)?;
    let coords: Vec<f64> = (0..n)
        .map(|i| result.signs.eps()[i] as f64 * dot(set.row(i), &result.v) / result.norm)
        .collect();
    SlicePoint::new(problem, coords).map_err(wrap)
}
