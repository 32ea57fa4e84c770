//! Problem domain: confining polynomial potentials on the half line,
//! parity sectors, and the Riccati source term shared by both solvers.

use std::collections::BTreeMap;
use std::fmt;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Even/odd sector of a symmetric full-line problem, treated on x > 0.
///
/// Even states satisfy ψ(0) ≠ 0, ψ′(0) = 0; odd states ψ(0) = 0, ψ′(0) ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParitySector {
    Even,
    Odd,
}

impl ParitySector {
    /// The integer s ∈ {0, 1} entering the modified logarithmic derivative.
    pub fn s(self) -> usize {
        match self {
            ParitySector::Even => 0,
            ParitySector::Odd => 1,
        }
    }

    pub fn from_s(s: usize) -> Result<Self> {
        match s {
            0 => Ok(ParitySector::Even),
            1 => Ok(ParitySector::Odd),
            _ => Err(Error::InvalidInput(format!("parity s must be 0 or 1, got {s}"))),
        }
    }

    pub fn of_state(n: usize) -> Self {
        if n % 2 == 0 {
            ParitySector::Even
        } else {
            ParitySector::Odd
        }
    }
}

impl fmt::Display for ParitySector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParitySector::Even => write!(f, "even"),
            ParitySector::Odd => write!(f, "odd"),
        }
    }
}

/// Which named potential a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialLabel {
    SusyMinus,
    SusyPlus,
    Quartic,
    Custom,
}

impl fmt::Display for PotentialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialLabel::SusyMinus => write!(f, "susy-minus"),
            PotentialLabel::SusyPlus => write!(f, "susy-plus"),
            PotentialLabel::Quartic => write!(f, "quartic"),
            PotentialLabel::Custom => write!(f, "custom"),
        }
    }
}

/// Partner Hamiltonian a spectrum entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    HMinus,
    HPlus,
    Quartic,
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianKind::HMinus => write!(f, "H-"),
            HamiltonianKind::HPlus => write!(f, "H+"),
            HamiltonianKind::Quartic => write!(f, "quartic"),
        }
    }
}

/// Label (H, n) of an eigenvalue in full-line state counting; the ground
/// state is even and parities alternate with n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpectrumLabel {
    pub hamiltonian: HamiltonianKind,
    pub n: usize,
}

impl SpectrumLabel {
    pub fn new(hamiltonian: HamiltonianKind, n: usize) -> Self {
        Self { hamiltonian, n }
    }

    pub fn parity(&self) -> ParitySector {
        ParitySector::of_state(self.n)
    }
}

impl fmt::Display for SpectrumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.hamiltonian, self.n)
    }
}

/// V(x) = Σ c_k x^k on x > 0 with exact rational coefficients.
///
/// The highest power must have a positive coefficient so the potential
/// confines and a bound spectrum exists.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    coefficients: BTreeMap<u32, Rational>,
    label: PotentialLabel,
    coupling: Rational,
}

impl PolynomialPotential {
    /// x^4 - 2gx, the partner carrying the exact zero-energy ground state.
    pub fn susy_minus() -> Self {
        Self::susy_minus_with_coupling(Rational::from(1))
    }

    /// x^4 + 2gx.
    pub fn susy_plus() -> Self {
        Self::susy_plus_with_coupling(Rational::from(1))
    }

    /// x^4.
    pub fn quartic() -> Self {
        let mut c = BTreeMap::new();
        c.insert(4, Rational::from(1));
        Self {
            coefficients: c,
            label: PotentialLabel::Quartic,
            coupling: Rational::from(1),
        }
    }

    pub fn susy_minus_with_coupling(g: Rational) -> Self {
        let mut c = BTreeMap::new();
        c.insert(4, Rational::from(1));
        c.insert(1, Rational::from(-2) * &g);
        Self {
            coefficients: c,
            label: PotentialLabel::SusyMinus,
            coupling: g,
        }
    }

    pub fn susy_plus_with_coupling(g: Rational) -> Self {
        let mut c = BTreeMap::new();
        c.insert(4, Rational::from(1));
        c.insert(1, Rational::from(2) * &g);
        Self {
            coefficients: c,
            label: PotentialLabel::SusyPlus,
            coupling: g,
        }
    }

    /// Arbitrary confining polynomial potential.
    pub fn custom(coefficients: BTreeMap<u32, Rational>) -> Result<Self> {
        let coefficients: BTreeMap<u32, Rational> = coefficients
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .collect();
        match coefficients.iter().next_back() {
            Some((_, lead)) if *lead > 0 => {}
            _ => {
                return Err(Error::InvalidInput(
                    "potential must have a positive leading coefficient".into(),
                ))
            }
        }
        Ok(Self {
            coefficients,
            label: PotentialLabel::Custom,
            coupling: Rational::from(1),
        })
    }

    pub fn label(&self) -> PotentialLabel {
        self.label
    }

    pub fn coupling(&self) -> &Rational {
        &self.coupling
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, Rational> {
        &self.coefficients
    }

    pub fn coefficient(&self, power: u32) -> Rational {
        self.coefficients
            .get(&power)
            .cloned()
            .unwrap_or_else(|| Rational::from(0))
    }

    pub fn max_power(&self) -> u32 {
        self.coefficients.keys().next_back().copied().unwrap_or(0)
    }

    /// Taylor coefficients of E - V(x): index 0 is E - c_0, index k is -c_k.
    /// Exact; only index 0 depends on E.
    pub fn riccati_source_exact(&self, energy: &Rational) -> Vec<Rational> {
        let len = self.max_power() as usize + 1;
        let mut source = vec![Rational::from(0); len];
        source[0] = energy.clone();
        for (&k, c) in &self.coefficients {
            source[k as usize] -= c;
        }
        source
    }

    /// Same coefficients rounded once into working precision.
    pub fn riccati_source(&self, energy: &Float, ctx: &PrecisionContext) -> Vec<Float> {
        let len = self.max_power() as usize + 1;
        let mut source = vec![ctx.float(0); len];
        source[0] = Float::with_val(ctx.prec_bits(), energy);
        for (&k, c) in &self.coefficients {
            let c_f = ctx.float_from_rational(c);
            source[k as usize] -= c_f;
        }
        source
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn rat(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn named_potentials() {
        let minus = PolynomialPotential::susy_minus();
        assert_eq!(minus.coefficient(4), rat(1));
        assert_eq!(minus.coefficient(1), rat(-2));
        assert_eq!(minus.coefficient(0), rat(0));
        let plus = PolynomialPotential::susy_plus();
        assert_eq!(plus.coefficient(1), rat(2));
        assert_eq!(PolynomialPotential::quartic().coefficient(1), rat(0));
    }

    #[test]
    fn source_quartic_at_zero() {
        let src = PolynomialPotential::quartic().riccati_source_exact(&rat(0));
        assert_eq!(src, vec![rat(0), rat(0), rat(0), rat(0), rat(-1)]);
    }

    #[test]
    fn source_susy_minus_at_zero() {
        let src = PolynomialPotential::susy_minus().riccati_source_exact(&rat(0));
        assert_eq!(src, vec![rat(0), rat(2), rat(0), rat(0), rat(-1)]);
    }

    #[test]
    fn source_susy_plus_at_five() {
        let src = PolynomialPotential::susy_plus().riccati_source_exact(&rat(5));
        assert_eq!(src, vec![rat(5), rat(-2), rat(0), rat(0), rat(-1)]);
    }

    #[test]
    fn mirror_symmetry_of_sources() {
        // V+(-x) = V-(x): the linear entries are opposite, all others equal.
        let e = Rational::from((7, 3));
        let minus = PolynomialPotential::susy_minus().riccati_source_exact(&e);
        let plus = PolynomialPotential::susy_plus().riccati_source_exact(&e);
        assert_eq!(minus.len(), plus.len());
        for k in 0..minus.len() {
            if k == 1 {
                assert_eq!(minus[k], Rational::from(-&plus[k]));
            } else {
                assert_eq!(minus[k], plus[k]);
            }
        }
    }

    #[test]
    fn source_affine_in_energy() {
        let pot = PolynomialPotential::susy_plus();
        let a = pot.riccati_source_exact(&rat(0));
        let b = pot.riccati_source_exact(&rat(9));
        assert_eq!(Rational::from(&b[0] - &a[0]), rat(9));
        assert_eq!(a[1..], b[1..]);
    }

    #[test]
    fn numeric_source_matches_exact() {
        let ctx = ctx();
        let pot = PolynomialPotential::susy_minus();
        let e = Rational::from((5, 2));
        let exact = pot.riccati_source_exact(&e);
        let numeric = pot.riccati_source(&ctx.float_from_rational(&e), &ctx);
        for (x, r) in numeric.iter().zip(&exact) {
            assert_eq!(*x, ctx.float_from_rational(r));
        }
    }

    #[test]
    fn custom_needs_confining_lead() {
        let mut c = BTreeMap::new();
        c.insert(6, Rational::from(-1));
        assert!(PolynomialPotential::custom(c).is_err());
        let mut c2 = BTreeMap::new();
        c2.insert(2, Rational::from(1));
        assert!(PolynomialPotential::custom(c2).is_ok());
    }

    #[test]
    fn parity_and_labels() {
        assert_eq!(ParitySector::from_s(0).unwrap(), ParitySector::Even);
        assert_eq!(ParitySector::from_s(1).unwrap(), ParitySector::Odd);
        assert!(ParitySector::from_s(2).is_err());
        let lbl = SpectrumLabel::new(HamiltonianKind::HMinus, 3);
        assert_eq!(lbl.parity(), ParitySector::Odd);
        assert_eq!(lbl.to_string(), "H-[3]");
    }
}
