//! Moments M(n) = ∫₀^∞ x^n exp(-2x³/3) dx of the squared basis weight.
//!
//! Closed form M(n) = (1/3)(3/2)^((n+1)/3) Γ((n+1)/3); only the seeds
//! Γ(1/3), Γ(2/3), Γ(1) = 1 are needed, every other entry follows from the
//! exact three-term recursion M(n+3) = ((n+1)/2) M(n).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rug::{ops::Pow, Float};

use crate::precision::PrecisionContext;

/// Extra binary precision used while building a table so that the values
/// handed out are correctly rounded at the working precision.
const TABLE_GUARD_BITS: u32 = 64;

/// Moments M(0..=n_max) at a fixed working precision, immutable once built.
#[derive(Debug, Clone)]
pub struct MomentTable {
    values: Vec<Float>,
    decimal_digits: u32,
}

impl MomentTable {
    pub fn value(&self, n: usize) -> &Float {
        &self.values[n]
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }
}

static CACHE: Lazy<Mutex<HashMap<(usize, u32), Arc<MomentTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Moment table for n = 0..=n_max; cached per (n_max, decimal_digits) and
/// bit-identical across recomputations.
pub fn moment_table(n_max: usize, ctx: &PrecisionContext) -> Arc<MomentTable> {
    let key = (n_max, ctx.decimal_digits());
    if let Some(hit) = CACHE.lock().unwrap().get(&key) {
        return Arc::clone(hit);
    }
    let table = Arc::new(build_table(n_max, ctx));
    CACHE
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&table));
    table
}

/// Single moment M(n) at working precision.
pub fn moment(n: usize, ctx: &PrecisionContext) -> Float {
    moment_table(n, ctx).value(n).clone()
}

fn build_table(n_max: usize, ctx: &PrecisionContext) -> MomentTable {
    let work = ctx.prec_bits() + TABLE_GUARD_BITS;
    let out = ctx.prec_bits();

    // Seeds M(0), M(1) from Γ(1/3), Γ(2/3); M(2) = 1/2 exactly.
    let three_halves = Float::with_val(work, 3) / 2u32;
    let mut seeds = Vec::with_capacity(3);
    for r in 1..=2u32 {
        let arg = Float::with_val(work, r) / 3u32;
        let gamma = arg.clone().gamma();
        let seed = Float::with_val(work, three_halves.clone().pow(&arg)) * gamma / 3u32;
        seeds.push(seed);
    }
    seeds.push(Float::with_val(work, 0.5));

    let mut values: Vec<Float> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let v = if n < 3 {
            seeds[n].clone()
        } else {
            // M(n) = ((n-2)/2) M(n-3), carried at guarded precision.
            let prev: &Float = &values_guard(&values, n - 3, &seeds);
            Float::with_val(work, prev * Float::with_val(work, (n - 2) as u32)) / 2u32
        };
        values.push(v);
    }
    let values = values
        .into_iter()
        .map(|v| Float::with_val(out, v))
        .collect();
    MomentTable {
        values,
        decimal_digits: ctx.decimal_digits(),
    }
}

// The recursion must chain on guarded values, not on already-rounded ones,
// so direct indexing into the under-construction vector is fine: entries are
// only rounded at the very end.
fn values_guard<'a>(values: &'a [Float], n: usize, seeds: &'a [Float]) -> &'a Float {
    if n < 3 {
        &seeds[n]
    } else {
        &values[n]
    }
}
