//! Taylor coefficients of the modified logarithmic derivative
//! f(x) = s/x - ψ′(x)/ψ(x).
//!
//! f satisfies f′ = f² - (2s/x)f + E - V(x) on x > 0, and with f₀ = 0 the
//! power-matching recursion is
//!
//!   (n + 1 + 2s) f_{n+1} = Σ_{k=0}^{n} f_k f_{n-k} + source[n]
//!
//! where source are the Taylor coefficients of E - V(x). Taking f₀ = 0 for
//! the odd sector removes the unbalanced 2f₀/x term and keeps the
//! denominator nonzero, so no special-casing is needed. Both a numeric mode
//! at fixed E and an exact mode (rational polynomials in E) are provided;
//! the exact mode is the oracle for the numeric path.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::model::{ParitySector, PolynomialPotential, PotentialLabel};
use crate::poly::RationalPolynomial;
use crate::precision::PrecisionContext;

/// Default cap on exact-mode series length: rational coefficients grow fast.
pub const DEFAULT_EXACT_CAP: usize = 80;

/// Numeric series f_0..f_{count-1} at a fixed energy.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    pub parity: ParitySector,
    pub label: PotentialLabel,
    pub energy: Float,
    pub values: Vec<Float>,
}

impl CoefficientSeries {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// Exact series: each coefficient a polynomial in E over the rationals.
#[derive(Debug, Clone)]
pub struct ExactCoefficientSeries {
    pub parity: ParitySector,
    pub label: PotentialLabel,
    pub polys: Vec<RationalPolynomial>,
}

impl ExactCoefficientSeries {
    pub fn count(&self) -> usize {
        self.polys.len()
    }

    /// Exact values f_j(E) at a rational energy.
    pub fn eval(&self, energy: &Rational) -> Vec<Rational> {
        self.polys.iter().map(|p| p.eval(energy)).collect()
    }
}

/// Numeric-mode coefficients by the power-matching recursion; f₁ = E/(1+2s).
pub fn series_coefficients(
    potential: &PolynomialPotential,
    parity: ParitySector,
    energy: &Float,
    count: usize,
    ctx: &PrecisionContext,
) -> CoefficientSeries {
    assert!(count >= 1, "series length must be positive");
    let prec = ctx.prec_bits();
    let source = potential.riccati_source(energy, ctx);
    let two_s = 2 * parity.s() as u32;

    let mut values: Vec<Float> = Vec::with_capacity(count);
    values.push(Float::with_val(prec, 0));
    for n in 0..count.saturating_sub(1) {
        let mut acc = Float::with_val(prec, 0);
        for k in 0..=n {
            acc += Float::with_val(prec, &values[k] * &values[n - k]);
        }
        if let Some(src) = source.get(n) {
            acc += src;
        }
        let denom = (n as u32) + 1 + two_s;
        values.push(acc / denom);
    }
    CoefficientSeries {
        parity,
        label: potential.label(),
        energy: Float::with_val(prec, energy),
        values,
    }
}

/// Exact-mode coefficients with the default length cap.
pub fn series_polynomials(
    potential: &PolynomialPotential,
    parity: ParitySector,
    count: usize,
) -> Result<ExactCoefficientSeries> {
    series_polynomials_with_cap(potential, parity, count, DEFAULT_EXACT_CAP)
}

/// Exact-mode coefficients; errors with `ResourceLimit` past `cap`.
pub fn series_polynomials_with_cap(
    potential: &PolynomialPotential,
    parity: ParitySector,
    count: usize,
    cap: usize,
) -> Result<ExactCoefficientSeries> {
    if count == 0 {
        return Err(Error::InvalidInput("series length must be positive".into()));
    }
    if count > cap {
        return Err(Error::ResourceLimit {
            requested: count,
            cap,
        });
    }
    // source[0] = E - c_0 as a polynomial in E; source[k] = -c_k constant.
    let source_consts = potential.riccati_source_exact(&Rational::from(0));
    let mut source: Vec<RationalPolynomial> = source_consts
        .iter()
        .map(|c| RationalPolynomial::constant(c.clone()))
        .collect();
    source[0] = source[0].add(&RationalPolynomial::identity());
    let two_s = 2 * parity.s();

    let mut polys: Vec<RationalPolynomial> = Vec::with_capacity(count);
    polys.push(RationalPolynomial::zero());
    for n in 0..count.saturating_sub(1) {
        let mut acc = RationalPolynomial::zero();
        for k in 0..=n {
            acc.add_assign(&polys[k].mul(&polys[n - k]));
        }
        if let Some(src) = source.get(n) {
            acc.add_assign(src);
        }
        let denom = Rational::from((n + 1 + two_s) as u32);
        polys.push(acc.scale(&denom.recip()));
    }
    Ok(ExactCoefficientSeries {
        parity,
        label: potential.label(),
        polys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn first_coefficient_is_energy_over_denominator() {
        let c = ctx();
        for pot in [
            PolynomialPotential::susy_minus(),
            PolynomialPotential::susy_plus(),
            PolynomialPotential::quartic(),
        ] {
            let e = c.float(2.75);
            let even = series_coefficients(&pot, ParitySector::Even, &e, 3, &c);
            assert_eq!(even.values[0], 0);
            assert_eq!(even.values[1], e);
            let odd = series_coefficients(&pot, ParitySector::Odd, &e, 3, &c);
            let third = Float::with_val(c.prec_bits(), &e / 3u32);
            assert_eq!(odd.values[1], third);
        }
    }

    #[test]
    fn exact_ground_state_series_is_x_squared() {
        // susy_minus at E = 0: ψ = exp(-x³/3) gives f(x) = x² exactly, so
        // every coefficient except f₂ = 1 vanishes, with no roundoff at all.
        let c = ctx();
        let pot = PolynomialPotential::susy_minus();
        let series = series_coefficients(&pot, ParitySector::Even, &c.float(0), 24, &c);
        for (j, v) in series.values.iter().enumerate() {
            if j == 2 {
                assert_eq!(*v, 1);
            } else {
                assert!(v.is_zero(), "f_{j} = {v:e} should be exactly zero");
            }
        }
    }

    #[test]
    fn exact_mode_first_polynomials() {
        let pot = PolynomialPotential::susy_plus();
        let s = series_polynomials(&pot, ParitySector::Even, 4).unwrap();
        assert!(s.polys[0].is_zero());
        // f₁(E) = E
        assert_eq!(s.polys[1], RationalPolynomial::identity());
        // f₂ = source[1]/2 = -c₁/2 = -1 for +2x
        assert_eq!(s.polys[2], RationalPolynomial::constant(rat(-1, 1)));

        let odd = series_polynomials(&pot, ParitySector::Odd, 3).unwrap();
        // s = 1: f₂ = source[1]/(2+2) = -2/4 = -1/2
        assert_eq!(odd.polys[2], RationalPolynomial::constant(rat(-1, 2)));
    }

    #[test]
    fn cross_mode_consistency() {
        // Numeric mode at rational E equals exact mode evaluated there,
        // within 5 ulp of working precision.
        let c = ctx();
        let count = 40;
        let tol = c.pow10(-(c.decimal_digits() as i32) + 2);
        for pot in [
            PolynomialPotential::susy_minus(),
            PolynomialPotential::susy_plus(),
            PolynomialPotential::quartic(),
        ] {
            for parity in [ParitySector::Even, ParitySector::Odd] {
                for e in [rat(0, 1), rat(5, 1), rat(-7, 3), rat(1061, 1000)] {
                    let exact = series_polynomials(&pot, parity, count).unwrap().eval(&e);
                    let numeric = series_coefficients(
                        &pot,
                        parity,
                        &c.float_from_rational(&e),
                        count,
                        &c,
                    );
                    for (j, (nv, ev)) in numeric.values.iter().zip(&exact).enumerate() {
                        let exact_f = c.float_from_rational(ev);
                        let diff = Float::with_val(c.prec_bits(), nv - &exact_f).abs();
                        let scale = exact_f.abs().max(&c.float(1));
                        assert!(
                            diff <= Float::with_val(c.prec_bits(), &scale * &tol),
                            "{} {parity} E={e} f_{j}: {diff:e}",
                            pot.label()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn recursion_residual_is_exact_in_exact_mode() {
        let pot = PolynomialPotential::susy_minus();
        let s = series_polynomials(&pot, ParitySector::Odd, 30).unwrap();
        let source_consts = pot.riccati_source_exact(&Rational::from(0));
        let mut source: Vec<RationalPolynomial> = source_consts
            .iter()
            .map(|c| RationalPolynomial::constant(c.clone()))
            .collect();
        source[0] = source[0].add(&RationalPolynomial::identity());
        for n in 0..29 {
            let mut rhs = RationalPolynomial::zero();
            for k in 0..=n {
                rhs.add_assign(&s.polys[k].mul(&s.polys[n - k]));
            }
            if let Some(src) = source.get(n) {
                rhs.add_assign(src);
            }
            let lhs = s.polys[n + 1].scale(&Rational::from((n + 3) as u32));
            assert_eq!(lhs, rhs, "recursion identity fails at n={n}");
        }
    }

    #[test]
    fn degree_growth_bound() {
        // deg f_j <= ceil(j/2) for the potentials in scope, j <= 60.
        for pot in [
            PolynomialPotential::susy_minus(),
            PolynomialPotential::susy_plus(),
            PolynomialPotential::quartic(),
        ] {
            for parity in [ParitySector::Even, ParitySector::Odd] {
                let s = series_polynomials(&pot, parity, 61).unwrap();
                for (j, p) in s.polys.iter().enumerate() {
                    if let Some(d) = p.degree() {
                        assert!(d <= j.div_ceil(2), "deg f_{j} = {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_mode_resource_cap() {
        let pot = PolynomialPotential::quartic();
        match series_polynomials(&pot, ParitySector::Even, 81) {
            Err(Error::ResourceLimit { requested, cap }) => {
                assert_eq!(requested, 81);
                assert_eq!(cap, 80);
            }
            other => panic!("expected ResourceLimit, got {other:?}"),
        }
        assert!(series_polynomials_with_cap(&pot, ParitySector::Even, 81, 100).is_ok());
    }
}
