//! Lower bound for a global coexact eigenvalue from a cover without triple
//! intersections:
//!
//! ```text
//! μ_{k+1} ≥ 1 / Σ_i [ 1/μ(U_i) + Σ_j (1/μ(U_i) + 1/μ(U_j)) (4 + 4 c_ρ/μ(U_ij) + 2 C_T^e) ]
//! ```
//!
//! where `j` runs over the overlaps incident to `i`, and the exponent `e` on
//! `C_T` is 2 (what the estimate chain actually produces) or 1 (the bound as
//! usually quoted). Evaluation is generic over the field, so rationals give
//! exact results.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::scalar::FieldScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("cover has no open sets")]
    Empty,
    #[error("{0} must be strictly positive")]
    NonPositiveEigenvalue(String),
    #[error("{0} must be non-negative")]
    Negative(&'static str),
    #[error("invalid overlap ({0}, {1})")]
    InvalidOverlap(usize, usize),
    #[error("overlap ({0}, {1}) listed twice")]
    DuplicateOverlap(usize, usize),
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenSet<T> {
    pub id: usize,
    pub mu: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlap<T> {
    pub pair: (usize, usize),
    pub mu: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CtExponent {
    One,
    #[default]
    Two,
}

impl CtExponent {
    pub fn from_int(e: u32) -> Option<Self> {
        match e {
            1 => Some(CtExponent::One),
            2 => Some(CtExponent::Two),
            _ => None,
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            CtExponent::One => 1,
            CtExponent::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSpec<T> {
    pub opens: Vec<OpenSet<T>>,
    pub overlaps: Vec<Overlap<T>>,
    /// `sup_i ‖∇ρ_i‖_∞` of the partition of unity.
    pub c_rho: T,
    /// Section norm `C_T`.
    pub c_t: T,
    /// `dim Im δ - dim E`.
    pub k_offset: usize,
    pub ct_exponent: CtExponent,
}

impl<T: FieldScalar> CoverSpec<T> {
    /// Two opens `U_1`, `U_2` with one overlap.
    pub fn two_open(mu1: T, mu2: T, mu12: T, c_rho: T, c_t: T, k_offset: usize, ct_exponent: CtExponent) -> Self {
        Self {
            opens: vec![OpenSet { id: 1, mu: mu1 }, OpenSet { id: 2, mu: mu2 }],
            overlaps: vec![Overlap { pair: (1, 2), mu: mu12 }],
            c_rho,
            c_t,
            k_offset,
            ct_exponent,
        }
    }

    fn validate(&self) -> Result<(), CoverError> {
        if self.opens.is_empty() {
            return Err(CoverError::Empty);
        }
        for o in &self.opens {
            if !(o.mu > T::zero()) {
                return Err(CoverError::NonPositiveEigenvalue(format!("mu(U_{})", o.id)));
            }
        }
        if self.c_rho < T::zero() {
            return Err(CoverError::Negative("c_rho"));
        }
        if self.c_t < T::zero() {
            return Err(CoverError::Negative("C_T"));
        }
        let ids: BTreeSet<usize> = self.opens.iter().map(|o| o.id).collect();
        let mut seen = BTreeSet::new();
        for ov in &self.overlaps {
            let (i, j) = ov.pair;
            if i == j || !ids.contains(&i) || !ids.contains(&j) {
                return Err(CoverError::InvalidOverlap(i, j));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(CoverError::DuplicateOverlap(i, j));
            }
            if !(ov.mu > T::zero()) {
                return Err(CoverError::NonPositiveEigenvalue(format!("mu(U_{i}{j})")));
            }
        }
        Ok(())
    }

    fn mu_of(&self, id: usize) -> T {
        self.opens.iter().find(|o| o.id == id).expect("validated id").mu.clone()
    }
}

/// Contribution of one open set to the denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenTerm<T> {
    pub id: usize,
    pub inverse_mu: T,
    /// `(other open, (1/μ_i + 1/μ_j)(4 + 4c_ρ/μ_ij + 2C_T^e))` per incident overlap.
    pub overlap_terms: Vec<(usize, T)>,
    pub total: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue<T> {
    pub bound: T,
    /// The bound applies to `μ_{rank}`, `rank = k_offset + 1`.
    pub rank: usize,
    pub terms: Vec<OpenTerm<T>>,
}

pub fn evaluate<T: FieldScalar>(cover: &CoverSpec<T>) -> Result<BoundValue<T>, CoverError> {
    cover.validate()?;
    let four = T::from_i64(4);
    let two = T::from_i64(2);
    let ct_power = match cover.ct_exponent {
        CtExponent::One => cover.c_t.clone(),
        CtExponent::Two => cover.c_t.clone() * cover.c_t.clone(),
    };
    let mut terms = Vec::with_capacity(cover.opens.len());
    let mut denominator = T::zero();
    for open in &cover.opens {
        let inv_i = T::one() / open.mu.clone();
        let mut total = inv_i.clone();
        let mut overlap_terms = Vec::new();
        for ov in &cover.overlaps {
            let other = match ov.pair {
                (a, b) if a == open.id => b,
                (a, b) if b == open.id => a,
                _ => continue,
            };
            let inv_j = T::one() / cover.mu_of(other);
            let factor = four.clone() + four.clone() * cover.c_rho.clone() / ov.mu.clone() + two.clone() * ct_power.clone();
            let term = (inv_i.clone() + inv_j) * factor;
            total = total + term.clone();
            overlap_terms.push((other, term));
        }
        denominator = denominator + total.clone();
        terms.push(OpenTerm { id: open.id, inverse_mu: inv_i, overlap_terms, total });
    }
    Ok(BoundValue { bound: T::one() / denominator, rank: cover.k_offset + 1, terms })
}

/// Which quantity a sensitivity sweep varies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parameter {
    OpenMu(usize),
    /// Overlap by open-id pair, in either order.
    OverlapMu(usize, usize),
    CRho,
    CT,
}

impl std::str::FromStr for Parameter {
    type Err = CoverError;

    /// `mu:<id>`, `mu:<i>,<j>`, `c_rho`, `c_t`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CoverError::UnknownParameter(s.to_string());
        match s {
            "c_rho" => Ok(Parameter::CRho),
            "c_t" | "C_T" => Ok(Parameter::CT),
            _ => {
                let rest = s.strip_prefix("mu:").ok_or_else(bad)?;
                let parts: Vec<&str> = rest.split(',').collect();
                let nums = parts.iter().map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
                match nums.as_slice() {
                    [i] => Ok(Parameter::OpenMu(*i)),
                    [i, j] => Ok(Parameter::OverlapMu(*i, *j)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep<T> {
    /// Multiply the base value by each factor.
    Scale(Vec<T>),
    /// Replace the value outright.
    Set(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRow<T> {
    pub value: T,
    pub bound: T,
}

pub fn sensitivity<T: FieldScalar>(
    cover: &CoverSpec<T>,
    parameter: &Parameter,
    sweep: &Sweep<T>,
) -> Result<Vec<SensitivityRow<T>>, CoverError> {
    let base = read_parameter(cover, parameter)?;
    let values: Vec<T> = match sweep {
        Sweep::Scale(f) => f.iter().map(|x| base.clone() * x.clone()).collect(),
        Sweep::Set(v) => v.clone(),
    };
    values
        .into_iter()
        .map(|value| {
            let mut c = cover.clone();
            write_parameter(&mut c, parameter, value.clone())?;
            Ok(SensitivityRow { bound: evaluate(&c)?.bound, value })
        })
        .collect()
}

fn read_parameter<T: FieldScalar>(cover: &CoverSpec<T>, p: &Parameter) -> Result<T, CoverError> {
    let mut c = cover.clone();
    let mut out = None;
    slot(&mut c, p, |v| out = Some(v.clone()))?;
    Ok(out.expect("slot visited"))
}

fn write_parameter<T: FieldScalar>(cover: &mut CoverSpec<T>, p: &Parameter, value: T) -> Result<(), CoverError> {
    slot(cover, p, |v| *v = value.clone())
}

fn slot<T: FieldScalar, F: FnMut(&mut T)>(cover: &mut CoverSpec<T>, p: &Parameter, mut f: F) -> Result<(), CoverError> {
    let unknown = || CoverError::UnknownParameter(format!("{p:?}"));
    match *p {
        Parameter::CRho => f(&mut cover.c_rho),
        Parameter::CT => f(&mut cover.c_t),
        Parameter::OpenMu(id) => f(&mut cover.opens.iter_mut().find(|o| o.id == id).ok_or_else(unknown)?.mu),
        Parameter::OverlapMu(i, j) => f(&mut cover
            .overlaps
            .iter_mut()
            .find(|o| o.pair == (i, j) || o.pair == (j, i))
            .ok_or_else(unknown)?
            .mu),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Q = Ratio<i64>;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn symmetric_reference_cover() {
        let c = CoverSpec::two_open(q(1), q(1), q(1), q(0), q(0), 0, CtExponent::Two);
        let b = evaluate(&c).unwrap();
        assert_eq!(b.bound, Q::new(1, 18));
        assert_eq!(b.rank, 1);
        assert!(b.terms.iter().all(|t| t.total == q(9)));
        let f = CoverSpec::two_open(1.0, 1.0, 1.0, 0.0, 0.0, 0, CtExponent::Two);
        assert_eq!(evaluate(&f).unwrap().bound, 1.0 / 18.0);
    }

    #[test]
    fn reference_with_gradient_and_section() {
        let c = CoverSpec::two_open(q(1), q(1), q(1), q(1), q(1), 0, CtExponent::One);
        let b = evaluate(&c).unwrap();
        assert_eq!(b.bound, Q::new(1, 42));
        assert!(b.terms.iter().all(|t| t.total == q(21)));
    }

    #[test]
    fn exponent_matters_only_off_zero_and_one() {
        for (ct, differs) in [(q(0), false), (q(1), false), (q(3), true)] {
            let one = evaluate(&CoverSpec::two_open(q(1), q(2), q(1), q(1), ct, 0, CtExponent::One)).unwrap();
            let two = evaluate(&CoverSpec::two_open(q(1), q(2), q(1), q(1), ct, 0, CtExponent::Two)).unwrap();
            assert_eq!(one.bound != two.bound, differs);
        }
    }

    #[test]
    fn invalid_covers() {
        let z = CoverSpec::two_open(1.0, 1.0, 0.0, 0.0, 0.0, 0, CtExponent::Two);
        assert!(matches!(evaluate(&z), Err(CoverError::NonPositiveEigenvalue(_))));
        let mut e = z.clone();
        e.opens.clear();
        e.overlaps.clear();
        assert_eq!(evaluate(&e), Err(CoverError::Empty));
        let mut d = CoverSpec::two_open(1.0, 1.0, 1.0, 0.0, 0.0, 0, CtExponent::Two);
        d.overlaps.push(Overlap { pair: (2, 1), mu: 1.0 });
        assert_eq!(evaluate(&d), Err(CoverError::DuplicateOverlap(2, 1)));
        let mut s = CoverSpec::two_open(1.0, 1.0, 1.0, 0.0, 0.0, 0, CtExponent::Two);
        s.overlaps[0].pair = (1, 1);
        assert_eq!(evaluate(&s), Err(CoverError::InvalidOverlap(1, 1)));
    }

    #[test]
    fn section_sweep_decreases() {
        let c = CoverSpec::two_open(q(1), q(1), q(1), q(0), q(0), 0, CtExponent::Two);
        let rows = sensitivity(&c, &Parameter::CT, &Sweep::Set(vec![q(0), q(1), q(10)])).unwrap();
        assert_eq!(rows[0].bound, Q::new(1, 18));
        assert!(rows.windows(2).all(|w| w[1].bound < w[0].bound));
    }

    #[test]
    fn homogeneity_without_gradient_or_section() {
        let c = CoverSpec::two_open(q(3), q(5), q(7), q(0), q(0), 0, CtExponent::Two);
        let base = evaluate(&c).unwrap().bound;
        let mut d = c.clone();
        for o in d.opens.iter_mut() {
            o.mu = o.mu * q(2);
        }
        d.overlaps[0].mu = d.overlaps[0].mu * q(2);
        assert_eq!(evaluate(&d).unwrap().bound, base * q(2));
    }

    #[test]
    fn large_thick_eigenvalue_limit() {
        // μ1 → ∞: U_1 contributes (1/μ2)·4, U_2 contributes 1/μ2 + (1/μ2)·4
        let c = CoverSpec::two_open(q(1), q(1), q(1), q(0), q(0), 0, CtExponent::Two);
        let rows = sensitivity(&c, &Parameter::OpenMu(1), &Sweep::Scale(vec![q(1_000_000_000)])).unwrap();
        let limit = 1.0 / 9.0;
        let got = *rows[0].bound.numer() as f64 / *rows[0].bound.denom() as f64;
        assert!((got - limit).abs() < 1e-8);
    }

    #[test]
    fn parameter_parsing() {
        assert_eq!("c_rho".parse::<Parameter>().unwrap(), Parameter::CRho);
        assert_eq!("mu:2".parse::<Parameter>().unwrap(), Parameter::OpenMu(2));
        assert_eq!("mu:1,2".parse::<Parameter>().unwrap(), Parameter::OverlapMu(1, 2));
        assert!("tau".parse::<Parameter>().is_err());
        let c = CoverSpec::two_open(1.0, 1.0, 1.0, 0.0, 0.0, 0, CtExponent::Two);
        assert!(sensitivity(&c, &Parameter::OpenMu(9), &Sweep::Set(vec![1.0])).is_err());
    }

    fn arb_cover() -> impl Strategy<Value = CoverSpec<f64>> {
        (0.01f64..10.0, 0.01f64..10.0, 0.01f64..10.0, 0.0f64..5.0, 0.0f64..5.0, prop::bool::ANY).prop_map(
            |(m1, m2, m12, cr, ct, e)| {
                CoverSpec::two_open(m1, m2, m12, cr, ct, 0, if e { CtExponent::Two } else { CtExponent::One })
            },
        )
    }

    proptest! {
        #[test]
        fn bound_positive_and_below_every_piece(c in arb_cover()) {
            let b = evaluate(&c).unwrap().bound;
            prop_assert!(b > 0.0);
            for o in &c.opens {
                prop_assert!(b <= o.mu);
            }
        }

        #[test]
        fn monotone_in_every_parameter(c in arb_cover(), f in 1.0f64..4.0) {
            let base = evaluate(&c).unwrap().bound;
            for p in [Parameter::OpenMu(1), Parameter::OpenMu(2), Parameter::OverlapMu(1, 2)] {
                let up = sensitivity(&c, &p, &Sweep::Scale(vec![f])).unwrap()[0].bound;
                prop_assert!(up >= base * (1.0 - 1e-12));
            }
            for p in [Parameter::CRho, Parameter::CT] {
                let v = read_parameter(&c, &p).unwrap() + f;
                let up = sensitivity(&c, &p, &Sweep::Set(vec![v])).unwrap()[0].bound;
                prop_assert!(up <= base * (1.0 + 1e-12));
            }
        }
    }
}
