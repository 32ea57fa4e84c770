//! Riccati-Padé method: Hankel determinants of the series coefficients,
//! root hunting in E, and sequence tracking across the determinant
//! dimension D.
//!
//! H_D^d is the determinant of the D×D matrix with entry (i,j) equal to
//! f_{i+j+d-1}. Its roots E^[D,d] form sequences that converge to
//! eigenvalues as D grows; on the half line one run captures the spectra
//! of both SUSY partners at once, interleaved.
//!
//! For an even potential f(x) is an odd function, every even-index
//! coefficient vanishes identically, and the Hankel matrix has
//! checkerboard support: H_D^d factors into two parity blocks, themselves
//! Hankel determinants of the reduced sequence g_m = f_{2m-1} (offsets d/2
//! and d/2+1 for even d; for odd d the determinant is identically zero at
//! odd D and a perfect square up to sign at even D). Root scans evaluate
//! such determinants block by block — the sign of a squared factor never
//! changes, so scanning the product would miss every root.
//!
//! Numeric evaluation at fixed E with grid + bisection is the production
//! path; exact rational determinants (fraction-free Bareiss) back it as an
//! oracle for small D, where the polynomial coefficients stay manageable.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::{ops::Pow, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::model::{ParitySector, PolynomialPotential, SpectrumLabel};
use crate::precision::PrecisionContext;
use crate::riccati::{series_coefficients, CoefficientSeries};

/// Roots are tracked from this dimension up; below it there are too few
/// roots to chain.
pub const D_START: usize = 3;

/// A sequence must be matched at this many ladder steps before it counts
/// as a genuine eigenvalue sequence rather than a transient spurious root.
pub const PERSISTENCE: usize = 5;

/// Consecutive ladder steps a tracked sequence may go unmatched before it
/// is dropped. Near convergence a block determinant can carry a root pair
/// tighter than any fixed scan resolution (the accurate root plus a slower
/// satellite); a short grace keeps the chain alive across such steps.
pub const MISS_GRACE: usize = 2;

/// Sign and natural log of |det|: Hankel determinants range over hundreds
/// of orders of magnitude, so the value itself is never materialized.
#[derive(Debug, Clone)]
pub struct SignedLogValue {
    sign: i8,
    log_magnitude: Float,
}

impl SignedLogValue {
    fn zero(prec: u32) -> Self {
        Self {
            sign: 0,
            log_magnitude: Float::with_val(prec, rug::float::Special::Nan),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// ln |det|; meaningless when the determinant is an exact zero.
    pub fn log_magnitude(&self) -> &Float {
        &self.log_magnitude
    }

    /// sign · exp(log) — only safe for small determinants (tests).
    pub fn to_float(&self, prec: u32) -> Float {
        if self.sign == 0 {
            return Float::with_val(prec, 0);
        }
        Float::with_val(prec, self.log_magnitude.clone().exp()) * self.sign
    }
}

/// One Hankel block to evaluate: either on the raw coefficients f or on
/// the reduced sequence g_m = f_{2m-1} of an even potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Probe {
    dim: usize,
    offset: usize,
    reduced: bool,
}

impl Probe {
    /// Raw coefficients required to evaluate this probe.
    fn f_count(&self) -> usize {
        if self.reduced {
            // largest g index is 2·dim + offset - 1, i.e. f_{2m-1}
            4 * self.dim + 2 * self.offset - 2
        } else {
            2 * self.dim + self.offset
        }
    }

    fn matrix(&self, series: &CoefficientSeries, prec: u32) -> Vec<Vec<Float>> {
        (1..=self.dim)
            .map(|i| {
                (1..=self.dim)
                    .map(|j| {
                        let idx = if self.reduced {
                            2 * (i + j + self.offset - 1) - 1
                        } else {
                            i + j + self.offset - 1
                        };
                        Float::with_val(prec, &series.values[idx])
                    })
                    .collect()
            })
            .collect()
    }

    fn evaluate(&self, series: &CoefficientSeries, ctx: &PrecisionContext) -> SignedLogValue {
        lu_signed_log(self.matrix(series, ctx.prec_bits()), ctx)
    }
}

/// How H_D^d decomposes for the series at hand.
enum EvalPlan {
    Dense(Probe),
    /// Product of block determinants times a fixed permutation sign.
    Blocks { probes: Vec<Probe>, sign: i8 },
    IdenticallyZero,
}

fn eval_plan(checkerboard: bool, dim: usize, offset: usize) -> EvalPlan {
    if !checkerboard {
        return EvalPlan::Dense(Probe {
            dim,
            offset,
            reduced: false,
        });
    }
    if offset % 2 == 0 {
        let mut probes = vec![Probe {
            dim: dim.div_ceil(2),
            offset: offset / 2,
            reduced: true,
        }];
        if dim / 2 > 0 {
            probes.push(Probe {
                dim: dim / 2,
                offset: offset / 2 + 1,
                reduced: true,
            });
        }
        EvalPlan::Blocks { probes, sign: 1 }
    } else if dim % 2 == 0 {
        let k = dim / 2;
        let m = Probe {
            dim: k,
            offset: (offset + 1) / 2,
            reduced: true,
        };
        // det = (-1)^k · det(M)²
        EvalPlan::Blocks {
            probes: vec![m, m],
            sign: if k % 2 == 0 { 1 } else { -1 },
        }
    } else {
        EvalPlan::IdenticallyZero
    }
}

/// Checkerboard support: every even-index coefficient is an exact zero.
/// The recursion produces those zeros exactly (in floating point too), so
/// this is a structural test, not a tolerance test.
fn series_checkerboard(series: &CoefficientSeries) -> bool {
    series.values.iter().step_by(2).all(|v| v.is_zero())
}

/// Structural version of the same test: only even powers in V.
fn potential_checkerboard(potential: &PolynomialPotential) -> bool {
    potential.coefficients().keys().all(|k| k % 2 == 0)
}

/// Hankel determinant H_D^d of a numeric coefficient series, by LU
/// decomposition with full pivoting (per block when the checkerboard
/// factorization applies). A pivot below 10^(-digits+5) of the matrix
/// scale is an exact zero.
pub fn hankel_determinant(
    series: &CoefficientSeries,
    dim: usize,
    offset: usize,
    ctx: &PrecisionContext,
) -> Result<SignedLogValue> {
    let need = 2 * dim + offset;
    if series.count() < need {
        return Err(Error::InsufficientCoefficients {
            have: series.count(),
            need,
        });
    }
    if dim == 0 {
        return Err(Error::InvalidInput("Hankel dimension must be positive".into()));
    }
    let prec = ctx.prec_bits();
    match eval_plan(series_checkerboard(series), dim, offset) {
        EvalPlan::Dense(probe) => Ok(probe.evaluate(series, ctx)),
        EvalPlan::Blocks { probes, sign } => {
            let mut total_sign = sign;
            let mut log = Float::with_val(prec, 0);
            for probe in probes {
                let part = probe.evaluate(series, ctx);
                if part.is_zero() {
                    return Ok(SignedLogValue::zero(prec));
                }
                total_sign *= part.sign();
                log += part.log_magnitude();
            }
            Ok(SignedLogValue {
                sign: total_sign,
                log_magnitude: log,
            })
        }
        EvalPlan::IdenticallyZero => Ok(SignedLogValue::zero(prec)),
    }
}

fn lu_signed_log(mut m: Vec<Vec<Float>>, ctx: &PrecisionContext) -> SignedLogValue {
    let prec = ctx.prec_bits();
    let n = m.len();

    let mut scale = Float::with_val(prec, 0);
    for row in &m {
        for v in row {
            let a = Float::with_val(prec, v.abs_ref());
            if a > scale {
                scale = a;
            }
        }
    }
    if scale.is_zero() {
        return SignedLogValue::zero(prec);
    }
    let zero_eps = Float::with_val(
        prec,
        &scale * &ctx.pow10(-(ctx.decimal_digits() as i32) + 5),
    );

    let mut sign = 1i8;
    let mut log_sum = Float::with_val(prec, 0);
    for k in 0..n {
        // full pivot: largest remaining |entry|
        let (mut pi, mut pj) = (k, k);
        let mut best = Float::with_val(prec, m[k][k].abs_ref());
        for i in k..n {
            for j in k..n {
                let a = Float::with_val(prec, m[i][j].abs_ref());
                if a > best {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= zero_eps {
            return SignedLogValue::zero(prec);
        }
        if pi != k {
            m.swap(k, pi);
            sign = -sign;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            sign = -sign;
        }
        let pivot = m[k][k].clone();
        if pivot < 0 {
            sign = -sign;
        }
        log_sum += Float::with_val(prec, pivot.abs_ref()).ln();
        for i in (k + 1)..n {
            let factor = Float::with_val(prec, &m[i][k] / &pivot);
            if factor.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let upd = Float::with_val(prec, &factor * &m[k][j]);
                m[i][j] -= upd;
            }
        }
    }
    SignedLogValue {
        sign,
        log_magnitude: log_sum,
    }
}

/// Exact H_D^d from rational coefficient values, by clearing denominators
/// and fraction-free Bareiss elimination over the integers.
pub fn hankel_determinant_exact(
    values: &[Rational],
    dim: usize,
    offset: usize,
) -> Result<Rational> {
    let need = 2 * dim + offset;
    if values.len() < need {
        return Err(Error::InsufficientCoefficients {
            have: values.len(),
            need,
        });
    }
    if dim == 0 {
        return Err(Error::InvalidInput("Hankel dimension must be positive".into()));
    }
    let mut lcm = Integer::from(1);
    for i in 1..=dim {
        for j in 1..=dim {
            lcm.lcm_mut(values[i + j + offset - 1].denom());
        }
    }
    let mut m: Vec<Vec<Integer>> = (1..=dim)
        .map(|i| {
            (1..=dim)
                .map(|j| {
                    let v = &values[i + j + offset - 1];
                    let scaled = Rational::from(v * &lcm);
                    debug_assert_eq!(*scaled.denom(), 1);
                    scaled.numer().clone()
                })
                .collect()
        })
        .collect();

    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..dim.saturating_sub(1) {
        if m[k][k] == 0 {
            match ((k + 1)..dim).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Rational::from(0)),
            }
        }
        for i in (k + 1)..dim {
            for j in (k + 1)..dim {
                let a = Integer::from(&m[k][k] * &m[i][j]);
                let b = Integer::from(&m[i][k] * &m[k][j]);
                let num = a - b;
                let (q, r) = num.div_rem(prev.clone());
                debug_assert_eq!(r, 0, "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = Integer::from(0);
        }
        prev = m[k][k].clone();
    }
    let det_scaled = Integer::from(&m[dim - 1][dim - 1] * sign);
    Ok(Rational::from((det_scaled, lcm.pow(dim as u32))))
}

/// Window and grid for the determinant root scan. The grid is rational so
/// that exact eigenvalues landing on grid points (the SUSY ground state at
/// E = 0) are hit exactly and detected as sign-0 determinants.
#[derive(Debug, Clone)]
pub struct RootSearch {
    pub window: (Rational, Rational),
    pub grid_step: Rational,
}

impl Default for RootSearch {
    fn default() -> Self {
        Self {
            window: (Rational::from(-1), Rational::from(40)),
            grid_step: Rational::from((1, 20)),
        }
    }
}

impl RootSearch {
    pub fn new(lo: Rational, hi: Rational, step: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput(format!(
                "window must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if step <= 0 {
            return Err(Error::InvalidInput("grid step must be positive".into()));
        }
        Ok(Self {
            window: (lo, hi),
            grid_step: step,
        })
    }

    fn grid(&self) -> Vec<Rational> {
        let mut points = Vec::new();
        let mut e = self.window.0.clone();
        while e <= self.window.1 {
            points.push(e.clone());
            e += &self.grid_step;
        }
        points
    }
}

/// Sign of one Hankel block at a rational energy.
fn probe_sign(
    potential: &PolynomialPotential,
    parity: ParitySector,
    probe: Probe,
    energy: &Rational,
    ctx: &PrecisionContext,
) -> i8 {
    let e = ctx.float_from_rational(energy);
    let series = series_coefficients(potential, parity, &e, probe.f_count(), ctx);
    probe.evaluate(&series, ctx).sign()
}

/// Bisect a sign change of one block down to the context root tolerance.
/// A sign-0 probe is an exact root and returns immediately.
fn bisect(
    potential: &PolynomialPotential,
    parity: ParitySector,
    probe: Probe,
    mut lo: Rational,
    mut hi: Rational,
    sign_lo: i8,
    ctx: &PrecisionContext,
) -> Float {
    let prec = ctx.prec_bits();
    let tol = ctx.root_tolerance();
    loop {
        let width = Float::with_val(prec, Rational::from(&hi - &lo));
        if width <= *tol {
            let mid = Rational::from(&lo + &hi) / 2u32;
            return ctx.float_from_rational(&mid);
        }
        let mid = Rational::from(&lo + &hi) / 2u32;
        let s = probe_sign(potential, parity, probe, &mid, ctx);
        if s == 0 {
            return ctx.float_from_rational(&mid);
        }
        if s == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Roots of one block on a fixed sign grid: exact zeros at grid points
/// plus bisected brackets between adjacent opposite-sign points.
fn roots_from_grid_signs(
    potential: &PolynomialPotential,
    parity: ParitySector,
    probe: Probe,
    grid: &[Rational],
    signs: &[i8],
    ctx: &PrecisionContext,
) -> Vec<Float> {
    enum Task {
        Exact(Rational),
        Bracket(Rational, Rational, i8),
    }
    let mut tasks = Vec::new();
    for (i, s) in signs.iter().enumerate() {
        if *s == 0 {
            tasks.push(Task::Exact(grid[i].clone()));
        }
        if i + 1 < signs.len() && *s != 0 && signs[i + 1] != 0 && *s != signs[i + 1] {
            tasks.push(Task::Bracket(grid[i].clone(), grid[i + 1].clone(), *s));
        }
    }
    tasks
        .into_par_iter()
        .map(|task| match task {
            Task::Exact(e) => ctx.float_from_rational(&e),
            Task::Bracket(lo, hi, sign_lo) => {
                bisect(potential, parity, probe, lo, hi, sign_lo, ctx)
            }
        })
        .collect()
}

/// The distinct block probes whose roots make up the roots of H_D^d.
fn sign_probes(checkerboard: bool, dim: usize, offset: usize) -> Vec<Probe> {
    match eval_plan(checkerboard, dim, offset) {
        EvalPlan::Dense(p) => vec![p],
        EvalPlan::Blocks { mut probes, .. } => {
            probes.dedup();
            probes
        }
        EvalPlan::IdenticallyZero => Vec::new(),
    }
}

/// Hunt for roots hiding near an expected location at resolutions the
/// global grid cannot see: rescan a shrinking window around `center` with
/// a geometrically finer step until a sign change (or exact zero) shows
/// up, or the step falls below the bisection tolerance.
fn local_rescue(
    potential: &PolynomialPotential,
    parity: ParitySector,
    probe: Probe,
    center: &Float,
    last_step: &Float,
    ctx: &PrecisionContext,
) -> Vec<Float> {
    let prec = ctx.prec_bits();
    let center_r = match center.to_rational() {
        Some(r) => r,
        None => return Vec::new(),
    };
    let floor = Float::with_val(prec, 1e-3);
    let width0 = Float::with_val(prec, last_step * &Float::with_val(prec, 10)).max(&floor);
    let mut width = match width0.to_rational() {
        Some(r) => r,
        None => return Vec::new(),
    };
    let min_step = ctx
        .root_tolerance()
        .to_rational()
        .expect("tolerance is finite");
    // Success means a root within the track's own continuation scale, not
    // just any root: early levels see distant satellites that the caller
    // already rejected.
    let near_enough = Float::with_val(prec, last_step * &Float::with_val(prec, 10))
        + Float::with_val(prec, ctx.root_tolerance() * &Float::with_val(prec, 4));
    let mut found: Vec<Float> = Vec::new();
    loop {
        let step = Rational::from(&width / 8u32);
        let grid: Vec<Rational> = (0..=16)
            .map(|i| Rational::from(&center_r - &width) + Rational::from(&step * i))
            .collect();
        let signs: Vec<i8> = grid
            .iter()
            .map(|e| probe_sign(potential, parity, probe, e, ctx))
            .collect();
        let roots = roots_from_grid_signs(potential, parity, probe, &grid, &signs, ctx);
        let done = roots
            .iter()
            .any(|r| Float::with_val(prec, r - center).abs() <= near_enough);
        found.extend(roots);
        if done || step < min_step {
            break;
        }
        width = step;
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let dup_eps = Float::with_val(prec, ctx.root_tolerance() * &Float::with_val(prec, 4));
    found.dedup_by(|a, b| Float::with_val(prec, &*a - &*b).abs() <= dup_eps);
    found
}

/// Sign changes of H_D^d over a grid, bisected to the root tolerance;
/// ascending. For factored determinants each block is scanned separately
/// (a squared block never changes sign). Even-multiplicity roots of a
/// single block strictly between grid points are still invisible to a
/// sign scan and may be missed. An identically-zero determinant (even
/// potential, odd d, odd D) carries no root information: empty.
pub fn find_roots(
    potential: &PolynomialPotential,
    parity: ParitySector,
    dim: usize,
    offset: usize,
    search: &RootSearch,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>> {
    let grid = search.grid();
    let mut roots: Vec<Float> = Vec::new();
    for probe in sign_probes(potential_checkerboard(potential), dim, offset) {
        let signs: Vec<i8> = grid
            .par_iter()
            .map(|e| probe_sign(potential, parity, probe, e, ctx))
            .collect();
        roots.extend(roots_from_grid_signs(
            potential, parity, probe, &grid, &signs, ctx,
        ));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// One root sequence E^[D,d] followed across Hankel dimensions.
#[derive(Debug, Clone)]
pub struct RootSequence {
    /// Hankel offset d of the run this sequence came from.
    pub offset: usize,
    /// Root per dimension D. For factored determinants a block of size k
    /// covers both dimensions it appears in, so values repeat pairwise.
    pub roots: BTreeMap<usize, Float>,
    /// The root at the largest D.
    pub converged: Float,
    /// Last step of the underlying dimension ladder.
    pub error_estimate: Float,
    /// Set by spectrum classification, if any.
    pub label: Option<SpectrumLabel>,
    /// Block probe of the final step, for precision verification.
    final_probe: Probe,
}

impl RootSequence {
    pub fn first_dim(&self) -> usize {
        *self.roots.keys().next().unwrap()
    }

    pub fn last_dim(&self) -> usize {
        *self.roots.keys().next_back().unwrap()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Whether the final step size met the given convergence bound.
    pub fn error_within(&self, bound: &Float) -> bool {
        self.error_estimate.is_finite() && self.error_estimate <= *bound
    }
}

/// One dimension ladder to track: a block probe family with the matching
/// H_D^d dimensions each block size covers.
struct Ladder {
    offset: usize,
    reduced: bool,
    /// (block dim, covered D values), block dim strictly increasing.
    steps: Vec<(usize, Vec<usize>)>,
}

fn ladders(checkerboard: bool, d_max: usize, offset: usize) -> Vec<Ladder> {
    if !checkerboard {
        return vec![Ladder {
            offset,
            reduced: false,
            steps: (D_START..=d_max).map(|d| (d, vec![d])).collect(),
        }];
    }
    let clip = |ds: Vec<usize>| -> Vec<usize> {
        ds.into_iter()
            .filter(|d| (D_START..=d_max).contains(d))
            .collect()
    };
    if offset % 2 == 0 {
        let a = Ladder {
            offset: offset / 2,
            reduced: true,
            steps: (2..=d_max.div_ceil(2))
                .map(|k| (k, clip(vec![2 * k - 1, 2 * k])))
                .collect(),
        };
        let b = Ladder {
            offset: offset / 2 + 1,
            reduced: true,
            steps: (1..=d_max / 2)
                .map(|k| (k, clip(vec![2 * k, 2 * k + 1])))
                .collect(),
        };
        vec![a, b]
    } else {
        vec![Ladder {
            offset: (offset + 1) / 2,
            reduced: true,
            steps: (2..=d_max / 2).map(|k| (k, vec![2 * k])).collect(),
        }]
    }
}

struct Track {
    values: Vec<Float>,
    step_indices: Vec<usize>,
    misses: usize,
    alive: bool,
}

impl Track {
    fn last_step_size(&self, grid_step: &Float, prec: u32) -> Float {
        if self.values.len() >= 2 {
            let a = &self.values[self.values.len() - 1];
            let b = &self.values[self.values.len() - 2];
            Float::with_val(prec, a - b).abs()
        } else {
            grid_step.clone()
        }
    }

    /// Continuation window: generous (10x the last move, floored at 1e-3)
    /// while the sequence is still moving, then narrowing with the step
    /// size so that slow satellite roots nearby cannot steal a match once
    /// the sequence has converged.
    fn window(&self, grid_step: &Float, prec: u32) -> Float {
        let err = self.last_step_size(grid_step, prec);
        let coarse = Float::with_val(prec, &err * &Float::with_val(prec, 10));
        let fine_cap = Float::with_val(prec, &err * &Float::with_val(prec, 30))
            .min(&Float::with_val(prec, 1e-3));
        coarse.max(&fine_cap)
    }

    /// A continuation closer than this is considered found; anything
    /// farther triggers a local rescue scan.
    fn rescue_threshold(&self, grid_step: &Float, ctx: &PrecisionContext, prec: u32) -> Float {
        let err = self.last_step_size(grid_step, prec);
        Float::with_val(prec, &err * &Float::with_val(prec, 10))
            + Float::with_val(prec, ctx.root_tolerance() * &Float::with_val(prec, 4))
    }

    fn last(&self) -> &Float {
        self.values.last().unwrap()
    }
}

/// Track root sequences for D = 3..=d_max at fixed offset d.
///
/// Roots at consecutive ladder steps are chained by nearest-neighbor
/// continuation within a window of max(10·|last step|, 10⁻³); a chain must
/// survive `PERSISTENCE` consecutive steps and still be alive at the top
/// of its ladder to be reported. Returned sequences are ascending in their
/// converged value.
pub fn track_sequences(
    potential: &PolynomialPotential,
    parity: ParitySector,
    d_max: usize,
    offset: usize,
    search: &RootSearch,
    ctx: &PrecisionContext,
) -> Result<Vec<RootSequence>> {
    if d_max < D_START {
        return Err(Error::InvalidInput(format!(
            "d_max must be at least {D_START}, got {d_max}"
        )));
    }
    let prec = ctx.prec_bits();
    let grid = search.grid();
    let ladder_list = ladders(potential_checkerboard(potential), d_max, offset);
    let probes_per_ladder: Vec<Vec<Probe>> = ladder_list
        .iter()
        .map(|l| {
            l.steps
                .iter()
                .map(|(k, _)| Probe {
                    dim: *k,
                    offset: l.offset,
                    reduced: l.reduced,
                })
                .collect()
        })
        .collect();
    let series_count = probes_per_ladder
        .iter()
        .flatten()
        .map(Probe::f_count)
        .max()
        .unwrap_or(2 * d_max + offset);

    // One series per grid point serves every ladder step.
    let signs_per_point: Vec<Vec<Vec<i8>>> = grid
        .par_iter()
        .map(|e| {
            let ef = ctx.float_from_rational(e);
            let series = series_coefficients(potential, parity, &ef, series_count, ctx);
            probes_per_ladder
                .iter()
                .map(|probes| {
                    probes
                        .iter()
                        .map(|p| p.evaluate(&series, ctx).sign())
                        .collect()
                })
                .collect()
        })
        .collect();

    let grid_step_f = ctx.float_from_rational(&search.grid_step);
    let mut sequences: Vec<RootSequence> = Vec::new();

    for (ladder_idx, ladder) in ladder_list.iter().enumerate() {
        let mut tracks: Vec<Track> = Vec::new();
        for (step_idx, (block_dim, _)) in ladder.steps.iter().enumerate() {
            let probe = probes_per_ladder[ladder_idx][step_idx];
            let signs: Vec<i8> = signs_per_point
                .iter()
                .map(|per_point| per_point[ladder_idx][step_idx])
                .collect();
            let _ = block_dim;
            let mut roots = roots_from_grid_signs(potential, parity, probe, &grid, &signs, ctx);

            // Rescue pass: roots paired tighter than the grid are invisible
            // to the global scan; hunt for them wherever a live track has
            // no continuation candidate inside its window.
            let rescue: Vec<Vec<Float>> = tracks
                .par_iter()
                .map(|track| {
                    if !track.alive {
                        return Vec::new();
                    }
                    let threshold = track.rescue_threshold(&grid_step_f, ctx, prec);
                    let covered = roots.iter().any(|r| {
                        Float::with_val(prec, track.last() - r).abs() <= threshold
                    });
                    if covered {
                        return Vec::new();
                    }
                    local_rescue(
                        potential,
                        parity,
                        probe,
                        track.last(),
                        &track.last_step_size(&grid_step_f, prec),
                        ctx,
                    )
                })
                .collect();
            let mut rescue_roots: Vec<Float> = rescue.into_iter().flatten().collect();
            rescue_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dup_eps = Float::with_val(prec, ctx.root_tolerance() * &Float::with_val(prec, 4));
            rescue_roots.dedup_by(|a, b| Float::with_val(prec, &*a - &*b).abs() <= dup_eps);
            rescue_roots.retain(|cand| {
                roots
                    .iter()
                    .all(|r| Float::with_val(prec, cand - r).abs() > dup_eps)
            });
            roots.extend(rescue_roots);
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

            let mut candidates: Vec<(usize, usize, Float)> = Vec::new();
            for (t, track) in tracks.iter().enumerate() {
                if !track.alive {
                    continue;
                }
                let window = track.window(&grid_step_f, prec);
                for (r, root) in roots.iter().enumerate() {
                    let dist = Float::with_val(prec, track.last() - root).abs();
                    if dist <= window {
                        candidates.push((t, r, dist));
                    }
                }
            }
            candidates.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
            let mut track_taken = vec![false; tracks.len()];
            let mut root_taken = vec![false; roots.len()];
            for (t, r, _) in candidates {
                if track_taken[t] || root_taken[r] {
                    continue;
                }
                track_taken[t] = true;
                root_taken[r] = true;
                tracks[t].values.push(roots[r].clone());
                tracks[t].step_indices.push(step_idx);
                tracks[t].misses = 0;
            }
            for (t, track) in tracks.iter_mut().enumerate() {
                if track.alive && !track_taken[t] {
                    track.misses += 1;
                    if track.misses > MISS_GRACE {
                        track.alive = false;
                    }
                }
            }
            for (r, root) in roots.into_iter().enumerate() {
                if !root_taken[r] {
                    tracks.push(Track {
                        values: vec![root],
                        step_indices: vec![step_idx],
                        misses: 0,
                        alive: true,
                    });
                }
            }
        }

        let steps_total = ladder.steps.len();
        if steps_total == 0 {
            continue;
        }
        let persistence = PERSISTENCE.min(steps_total);
        for track in tracks {
            let last_matched = *track.step_indices.last().unwrap();
            if !track.alive
                || track.values.len() < persistence
                || last_matched + MISS_GRACE < steps_total - 1
            {
                continue;
            }
            let error_estimate = if track.values.len() >= 2 {
                let a = &track.values[track.values.len() - 1];
                let b = &track.values[track.values.len() - 2];
                Float::with_val(prec, a - b).abs()
            } else {
                grid_step_f.clone()
            };
            let mut roots: BTreeMap<usize, Float> = BTreeMap::new();
            for (value, step_idx) in track.values.iter().zip(&track.step_indices) {
                for d in &ladder.steps[*step_idx].1 {
                    roots.insert(*d, value.clone());
                }
            }
            if roots.is_empty() {
                continue;
            }
            let converged = track.values.last().unwrap().clone();
            sequences.push(RootSequence {
                offset,
                roots,
                converged,
                error_estimate,
                label: None,
                final_probe: probes_per_ladder[ladder_idx][last_matched],
            });
        }
    }
    sequences.sort_by(|a, b| a.converged.partial_cmp(&b.converged).unwrap());
    Ok(sequences)
}

/// Collapse sequences that converged to the same eigenvalue (multiple
/// block families of a factored determinant), keeping the one with the
/// smallest error estimate. Sequences closer than the tracking-window
/// floor of 10⁻³ are considered the same eigenvalue.
pub fn dedupe_converged(sequences: &[RootSequence], ctx: &PrecisionContext) -> Vec<RootSequence> {
    let prec = ctx.prec_bits();
    let floor = Float::with_val(prec, 1e-3);
    let mut out: Vec<RootSequence> = Vec::new();
    for seq in sequences {
        match out.last_mut() {
            Some(prev)
                if Float::with_val(prec, &seq.converged - &prev.converged).abs() <= floor =>
            {
                if seq.error_estimate < prev.error_estimate {
                    *prev = seq.clone();
                }
            }
            _ => out.push(seq.clone()),
        }
    }
    out
}

/// Converged values recomputed at doubled precision; true when every
/// sequence agrees with its double-precision rerun in the first 25 digits.
/// Exact (sign-0) roots are exact at any precision and are skipped.
pub fn verify_converged_precision(
    potential: &PolynomialPotential,
    parity: ParitySector,
    sequences: &[RootSequence],
    ctx: &PrecisionContext,
) -> bool {
    let ctx2 = ctx.doubled();
    let prec2 = ctx2.prec_bits();
    let agree_tol = Float::with_val(prec2, 10).pow(-25);
    sequences.par_iter().all(|seq| {
        if seq.error_estimate.is_zero() {
            return true;
        }
        let margin = Float::with_val(prec2, &seq.error_estimate * &Float::with_val(prec2, 1000))
            .max(&Float::with_val(
                prec2,
                ctx.root_tolerance() * &Float::with_val(prec2, 1000),
            ));
        let center = seq.converged.to_rational().unwrap();
        let margin_r = margin.to_rational().unwrap();
        let lo = Rational::from(&center - &margin_r);
        let hi = Rational::from(&center + &margin_r);
        let probe = seq.final_probe;
        let sign_lo = probe_sign(potential, parity, probe, &lo, &ctx2);
        let sign_hi = probe_sign(potential, parity, probe, &hi, &ctx2);
        if sign_lo == 0 || sign_hi == 0 || sign_lo == sign_hi {
            // No clean bracket at doubled precision: treat as disagreement.
            return false;
        }
        let refined = bisect(potential, parity, probe, lo, hi, sign_lo, &ctx2);
        let scale = Float::with_val(prec2, seq.converged.abs_ref()).max(&Float::with_val(prec2, 1));
        let diff = Float::with_val(prec2, &refined - &seq.converged).abs();
        diff <= Float::with_val(prec2, &scale * &agree_tol)
    })
}
