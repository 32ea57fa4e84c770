//! Partner-spectrum bookkeeping: classify RPM roots by Hamiltonian,
//! verify the degeneracy E_n⁻ = E_{n-1}⁺, and check the interleaving
//! E₀⁻ < E₀⁺ < E₂⁻ < E₂⁺ < … that a single half-line run produces.
//!
//! Classification leans on the variational upper bounds rather than
//! wavefunction node counting (wavefunctions are never constructed); the
//! interleaving order breaks the tie that partner degeneracy forces on
//! every root, since one Hankel determinant exhibits roots close to the
//! eigenvalues of both partners.

use rug::Float;

use crate::error::{Error, Result};
use crate::model::{HamiltonianKind, ParitySector, SpectrumLabel};
use crate::precision::PrecisionContext;
use crate::rayleigh_ritz::SpectrumTable;

/// Where a spectrum entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Rpm,
    Variational,
}

/// One labeled eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    pub value: Float,
    /// `None` when the root could not be matched to a variational bound.
    pub label: Option<SpectrumLabel>,
    pub source: SpectrumSource,
}

/// Classified RPM roots, ascending, with partner-pair residuals.
#[derive(Debug, Clone, Default)]
pub struct LabeledSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub residuals: Vec<Float>,
}

impl LabeledSpectrum {
    /// The eigenvalue labeled (kind, n), if present.
    pub fn find(&self, kind: HamiltonianKind, n: usize) -> Option<&Float> {
        self.entries.iter().find_map(|e| match &e.label {
            Some(l) if l.hamiltonian == kind && l.n == n => Some(&e.value),
            _ => None,
        })
    }
}

/// Interleaving label for position p of a parity-s run: positions
/// alternate H₋, H₊ with the state index n ≡ s (mod 2) advancing by 2
/// every other position.
fn interleave_label(position: usize, parity: ParitySector) -> SpectrumLabel {
    let kind = if position % 2 == 0 {
        HamiltonianKind::HMinus
    } else {
        HamiltonianKind::HPlus
    };
    SpectrumLabel::new(kind, 2 * (position / 2) + parity.s())
}

fn variational_value(table: &SpectrumTable, n: usize) -> Option<Float> {
    let (_, row) = table.best_row()?;
    row.get(n).cloned()
}

/// Whether the variational upper bound v for a candidate state is
/// consistent with the root r: v ≥ r (up to the root tolerance) and
/// v - r ≤ tol·(1 + r).
fn bound_matches(v: &Float, r: &Float, tol: &Float, ctx: &PrecisionContext) -> bool {
    let prec = ctx.prec_bits();
    let slack = ctx.root_tolerance();
    if Float::with_val(prec, v - r) < -Float::with_val(prec, slack) {
        return false;
    }
    let scale = Float::with_val(prec, 1) + Float::with_val(prec, r.abs_ref());
    let gap = Float::with_val(prec, v - r).abs();
    gap <= Float::with_val(prec, &scale * tol)
}

/// Label the converged roots of the even and odd runs against the merged
/// variational tables of the two partners.
///
/// A root is labeled (H, n) when that partner's variational value for n
/// lies above it within tol·(1+r); partner degeneracy makes both partners
/// match almost every root, and the interleaving order picks between
/// them. Roots matching nothing are kept unlabeled.
pub fn classify_roots(
    even_rpm: &[Float],
    odd_rpm: &[Float],
    var_minus: &SpectrumTable,
    var_plus: &SpectrumTable,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<LabeledSpectrum> {
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (parity, roots) in [
        (ParitySector::Even, even_rpm),
        (ParitySector::Odd, odd_rpm),
    ] {
        for (position, root) in roots.iter().enumerate() {
            let preferred = interleave_label(position, parity);
            let mut matches: Vec<SpectrumLabel> = Vec::new();
            for kind in [HamiltonianKind::HMinus, HamiltonianKind::HPlus] {
                let table = match kind {
                    HamiltonianKind::HMinus => var_minus,
                    _ => var_plus,
                };
                // Candidate state indices share the run parity.
                let position_rank = position / 2;
                for n in [
                    2 * position_rank + parity.s(),
                    2 * position_rank.saturating_sub(1) + parity.s(),
                    2 * (position_rank + 1) + parity.s(),
                ] {
                    if let Some(v) = variational_value(table, n) {
                        if bound_matches(&v, root, tol, ctx)
                            && !matches.iter().any(|m| m.hamiltonian == kind && m.n == n)
                        {
                            matches.push(SpectrumLabel::new(kind, n));
                        }
                    }
                }
            }
            let label = if matches.is_empty() {
                None
            } else if matches.len() == 1 {
                Some(matches[0])
            } else if matches.iter().any(|m| *m == preferred) {
                Some(preferred)
            } else {
                return Err(Error::AmbiguousClassification {
                    value: format!("{root}"),
                    detail: format!(
                        "{} candidates match and none agrees with the interleaving order",
                        matches.len()
                    ),
                });
            };
            entries.push(SpectrumEntry {
                value: root.clone(),
                label,
                source: SpectrumSource::Rpm,
            });
        }
    }
    entries.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(LabeledSpectrum {
        entries,
        residuals: Vec::new(),
    })
}

/// One partner pair E_n⁻ vs E_{n-1}⁺ and its residual.
#[derive(Debug, Clone)]
pub struct DegeneracyPair {
    pub n: usize,
    pub e_minus: Float,
    pub e_plus_shifted: Float,
    pub residual: Float,
}

/// Degeneracy residuals |E_n⁻ - E_{n-1}⁺| over all n ≥ 1 present.
#[derive(Debug, Clone, Default)]
pub struct DegeneracyReport {
    pub pairs: Vec<DegeneracyPair>,
    pub max_residual: Option<Float>,
}

/// Residuals |E_n⁻ - E_{n-1}⁺| for every n ≥ 1 with both labels present.
pub fn degeneracy_report(spectrum: &LabeledSpectrum, ctx: &PrecisionContext) -> DegeneracyReport {
    let prec = ctx.prec_bits();
    let mut pairs = Vec::new();
    let mut n = 1usize;
    loop {
        let minus = spectrum.find(HamiltonianKind::HMinus, n);
        let plus = spectrum.find(HamiltonianKind::HPlus, n - 1);
        match (minus, plus) {
            (Some(m), Some(p)) => {
                let residual = Float::with_val(prec, m - p).abs();
                pairs.push(DegeneracyPair {
                    n,
                    e_minus: m.clone(),
                    e_plus_shifted: p.clone(),
                    residual,
                });
            }
            _ => {
                // Stop at the first gap past the available spectrum.
                if spectrum
                    .entries
                    .iter()
                    .all(|e| e.label.map_or(true, |l| l.n < n))
                {
                    break;
                }
            }
        }
        n += 1;
        if n > spectrum.entries.len() + 2 {
            break;
        }
    }
    let max_residual = pairs
        .iter()
        .map(|p| p.residual.clone())
        .max_by(|a, b| a.partial_cmp(b).unwrap());
    DegeneracyReport {
        pairs,
        max_residual,
    }
}

/// b_k = |odd[k] - even[k+1]| ≤ tol·(1 + |odd[k]|): the odd-run list must
/// reproduce the even-run list shifted by one entry.
pub fn interleaving_check(
    even_list: &[Float],
    odd_list: &[Float],
    tol: &Float,
    ctx: &PrecisionContext,
) -> Vec<bool> {
    let prec = ctx.prec_bits();
    let count = odd_list.len().min(even_list.len().saturating_sub(1));
    (0..count)
        .map(|k| {
            let gap = Float::with_val(prec, &odd_list[k] - &even_list[k + 1]).abs();
            let scale =
                Float::with_val(prec, 1) + Float::with_val(prec, odd_list[k].abs_ref());
            gap <= Float::with_val(prec, &scale * tol)
        })
        .collect()
}
