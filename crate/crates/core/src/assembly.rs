//! Model manifolds (a thick part plus Margulis tubes), the two-open cover
//! `U_1 = thick part`, `U_2 = tubes`, and the bound pipelines built on it.

use rayon::prelude::*;

use crate::cohomology::{
    assemble_section, section_ct_bound_general, section_ct_bound_single, ColumnGrowth, GeneralSectionBound,
    IntegerMatrix, SectionData, SlopeMode,
};
use crate::covering_bound::{evaluate, CoverSpec, CtExponent, OpenSet, Overlap};
use crate::error::{Error, Result};
use crate::scalar::{FieldScalar, Real};
use crate::sturm_liouville::MeshSpec;
use crate::tube_model::{core_length_from_boundary_area, FillingSlope, Tube};
use crate::tube_spectrum::{collar_lambda1, tube_mu1, TubeSpectrum, WeightMode};

/// Scalars the pipeline runs in: real for the solver, a field for the cover bound.
pub trait PipelineScalar: Real + FieldScalar {}
impl<T: Real + FieldScalar> PipelineScalar for T {}

/// Constants describing the thick part. None of them is computed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThickPartSpec<T> {
    /// `μ(U_1)` for coexact 1-forms on the thick part (`c_1`).
    pub mu_thick: T,
    /// Replaces the computed collar eigenvalue `μ(U_12)` when set (`c_2`).
    pub lambda_overlap_floor: Option<T>,
    /// Uniform section norm cap in the bounded regime.
    pub c_prime: T,
    /// Prefactor of the tube column growth.
    pub c_double_prime: T,
    /// Prefactor of the general section bound.
    pub big_c: T,
    pub d_thick: T,
    pub r_a_infinity: T,
}

impl<T: Real> ThickPartSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let mut fields = vec![
            ("mu_thick", self.mu_thick),
            ("c_prime", self.c_prime),
            ("c_double_prime", self.c_double_prime),
            ("big_C", self.big_c),
            ("d_thick", self.d_thick),
            ("R_a_infinity", self.r_a_infinity),
        ];
        if let Some(v) = self.lambda_overlap_floor {
            fields.push(("lambda_overlap_floor", v));
        }
        for (name, v) in fields {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl<T: Real> Default for ThickPartSpec<T> {
    fn default() -> Self {
        Self {
            mu_thick: T::one(),
            lambda_overlap_floor: None,
            c_prime: T::one(),
            c_double_prime: T::one(),
            big_c: T::one(),
            d_thick: T::one(),
            r_a_infinity: T::one(),
        }
    }
}

/// Solver and bound settings shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions<T> {
    pub mesh: MeshSpec,
    pub weights: WeightMode,
    pub ct_exponent: CtExponent,
    /// `γ` in `‖B'_i‖ ≲ e^{γ R_i}`.
    pub growth_exponent: T,
}

impl<T: Real> Default for PipelineOptions<T> {
    fn default() -> Self {
        Self {
            mesh: MeshSpec::graded(1024).expect("valid default mesh"),
            weights: WeightMode::Geometric,
            ct_exponent: CtExponent::Two,
            growth_exponent: T::one(),
        }
    }
}

/// Pin individual cover quantities instead of computing them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverOverrides<T> {
    pub mu_tubes: Option<T>,
    pub c_rho: Option<T>,
    pub c_t: Option<T>,
}

impl<T> Default for CoverOverrides<T> {
    fn default() -> Self {
        Self { mu_tubes: None, c_rho: None, c_t: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelManifold<T> {
    pub thick: ThickPartSpec<T>,
    pub tubes: Vec<Tube<T>>,
    pub options: PipelineOptions<T>,
    pub overrides: CoverOverrides<T>,
}

impl<T: PipelineScalar> ModelManifold<T> {
    pub fn new(thick: ThickPartSpec<T>, tubes: Vec<Tube<T>>, options: PipelineOptions<T>) -> Result<Self> {
        thick.validate()?;
        if tubes.is_empty() {
            return Err(Error::InvalidInput("model manifold needs at least one tube".into()));
        }
        if !(options.growth_exponent > T::zero()) {
            return Err(Error::InvalidInput("growth exponent must be positive".into()));
        }
        Ok(Self { thick, tubes, options, overrides: CoverOverrides::default() })
    }

    /// `k` identical tubes of radius `R` sharing one slope; core length from the boundary area.
    pub fn uniform(
        thick: ThickPartSpec<T>,
        k: usize,
        radius: T,
        slope: FillingSlope,
        boundary_area: T,
        options: PipelineOptions<T>,
    ) -> Result<Self> {
        let l = core_length_from_boundary_area(radius, boundary_area)?;
        let tube = Tube::new(radius, l, slope)?;
        Self::new(thick, vec![tube; k], options)
    }

    pub fn with_overrides(mut self, overrides: CoverOverrides<T>) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn k(&self) -> usize {
        self.tubes.len()
    }

    pub fn max_radius(&self) -> T {
        self.tubes.iter().map(|t| t.radius()).fold(T::zero(), T::max)
    }

    /// Integer data of the overlap map: `A` has the first basis vector of each
    /// 2-dimensional block, tube `i` contributes `(a_i, b_i)` in block `i`.
    pub fn section_data(&self) -> Result<SectionData<i64, T>> {
        let k = self.k();
        let mut a = IntegerMatrix::zeros(2 * k, k);
        let mut cols = Vec::with_capacity(k);
        for (i, tube) in self.tubes.iter().enumerate() {
            a.set(2 * i, i, 1);
            let (p, q) = slope_pair(tube.slope());
            let mut c = vec![0i64; 2 * k];
            c[2 * i] = p;
            c[2 * i + 1] = q;
            cols.push(c);
        }
        let radii: Vec<T> = self.tubes.iter().map(|t| t.radius()).collect();
        Ok(assemble_section(a, cols, &radii)?)
    }
}

fn slope_pair(s: FillingSlope) -> (i64, i64) {
    match s {
        FillingSlope::Finite { p, q } => (p, q),
        FillingSlope::Infinity => (1, 0),
    }
}

/// `d = d_thick + max R`.
pub fn diameter_proxy<T: PipelineScalar>(m: &ModelManifold<T>) -> T {
    m.thick.d_thick + m.max_radius()
}

/// Coordinate of the thick-part boundary inside a tube of radius `R`.
pub fn overlap_coordinate<T: Real>(radius: T, thick: &ThickPartSpec<T>) -> T {
    (radius * T::lit(0.5)).min(thick.r_a_infinity)
}

fn ln_cosh<T: Real>(x: T) -> T {
    let a = x.abs();
    a + (-(a + a)).exp().ln_1p() - T::LN_2()
}

/// `‖dt‖²` on the whole tube over `‖dt‖²` on the collar `[R_a, R]`.
pub fn dt_norm_ratio<T: Real>(radius: T, r_a: T) -> Result<T> {
    if !(r_a >= T::zero() && r_a < radius) {
        return Err(Error::InvalidInput(format!("need 0 <= R_a < R, got R_a = {r_a}, R = {radius}")));
    }
    let full = ln_cosh(radius);
    Ok(full / (full - ln_cosh(r_a)))
}

/// Which section norm the cover uses.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionChoice<T> {
    /// Uniform cap `c'`; bound on `μ_{k+1}`.
    Bounded,
    /// `max(general bound, c')`; bound on `μ_1`.
    General,
    /// Caller-supplied value and rank offset.
    Fixed { c_t: T, k_offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverAudit<T> {
    pub tube_spectra: Vec<TubeSpectrum<T>>,
    /// Collar eigenvalue on `[R_a, R]` per tube.
    pub collar_lambdas: Vec<T>,
    pub r_a: Vec<T>,
    pub mu_tubes: T,
    pub mu_overlap: T,
    pub c_rho: T,
    pub min_collar_width: T,
}

/// Cover pieces that do not depend on the section norm.
pub fn cover_pieces<T: PipelineScalar>(m: &ModelManifold<T>) -> Result<CoverAudit<T>> {
    let opts = m.options;
    let per_tube = m
        .tubes
        .par_iter()
        .map(|tube| {
            let spec = tube_mu1(tube, opts.mesh, opts.weights)?;
            let r_a = overlap_coordinate(tube.radius(), &m.thick);
            let collar = match m.thick.lambda_overlap_floor {
                Some(_) => T::nan(),
                None => collar_lambda1(r_a, tube.radius(), opts.mesh, opts.weights)?,
            };
            Ok((spec, collar, r_a))
        })
        .collect::<Result<Vec<_>>>()?;
    let tube_spectra: Vec<_> = per_tube.iter().map(|x| x.0).collect();
    let collar_lambdas: Vec<_> = per_tube.iter().map(|x| x.1).collect();
    let r_a: Vec<_> = per_tube.iter().map(|x| x.2).collect();
    let mu_tubes = m.overrides.mu_tubes.unwrap_or_else(|| tube_spectra.iter().map(|s| s.mu1).fold(T::infinity(), T::min));
    let mu_overlap = m
        .thick
        .lambda_overlap_floor
        .unwrap_or_else(|| collar_lambdas.iter().copied().fold(T::infinity(), T::min));
    let min_collar_width =
        m.tubes.iter().zip(&r_a).map(|(t, &ra)| t.radius() - ra).fold(T::infinity(), T::min);
    // half-cosine ramp across the collar
    let c_rho = m.overrides.c_rho.unwrap_or_else(|| T::FRAC_PI_2() / min_collar_width);
    Ok(CoverAudit { tube_spectra, collar_lambdas, r_a, mu_tubes, mu_overlap, c_rho, min_collar_width })
}

/// Two opens and one overlap; `U_2` is the disjoint union of the tubes.
pub fn cover_from_pieces<T: PipelineScalar>(
    pieces: &CoverAudit<T>,
    mu_thick: T,
    c_t: T,
    k_offset: usize,
    ct_exponent: CtExponent,
) -> CoverSpec<T> {
    CoverSpec {
        opens: vec![OpenSet { id: 1, mu: mu_thick }, OpenSet { id: 2, mu: pieces.mu_tubes }],
        overlaps: vec![Overlap { pair: (1, 2), mu: pieces.mu_overlap }],
        c_rho: pieces.c_rho,
        c_t,
        k_offset,
        ct_exponent,
    }
}

/// Section norm actually used and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionAudit<T> {
    pub c_t: T,
    pub k_offset: usize,
    pub general: Option<GeneralSectionBound<T>>,
}

fn section_norm<T: PipelineScalar>(m: &ModelManifold<T>, choice: &SectionChoice<T>) -> Result<SectionAudit<T>> {
    if let Some(c_t) = m.overrides.c_t {
        let k_offset = match choice {
            SectionChoice::Bounded => m.k(),
            SectionChoice::Fixed { k_offset, .. } => *k_offset,
            SectionChoice::General => 0,
        };
        return Ok(SectionAudit { c_t, k_offset, general: None });
    }
    match choice {
        SectionChoice::Bounded => Ok(SectionAudit { c_t: m.thick.c_prime, k_offset: m.k(), general: None }),
        SectionChoice::Fixed { c_t, k_offset } => Ok(SectionAudit { c_t: *c_t, k_offset: *k_offset, general: None }),
        SectionChoice::General => {
            if m.tubes.iter().any(|t| slope_pair(t.slope()).1 == 0) {
                return Err(Error::InvalidInput("slope with b = 0 excluded from the first-eigenvalue bound".into()));
            }
            let section = m.section_data()?;
            let growth = ColumnGrowth { c_double_prime: m.thick.c_double_prime, exponent: m.options.growth_exponent };
            let g = section_ct_bound_general(&section, m.max_radius(), m.thick.big_c, growth)?;
            Ok(SectionAudit { c_t: g.value.max(m.thick.c_prime), k_offset: 0, general: Some(g) })
        }
    }
}

/// Cover for the requested section choice, with its audit.
pub fn assemble_cover<T: PipelineScalar>(
    m: &ModelManifold<T>,
    choice: &SectionChoice<T>,
) -> Result<(CoverSpec<T>, CoverAudit<T>, SectionAudit<T>)> {
    let pieces = cover_pieces(m)?;
    let section = section_norm(m, choice)?;
    let cover = cover_from_pieces(&pieces, m.thick.mu_thick, section.c_t, section.k_offset, m.options.ct_exponent);
    Ok((cover, pieces, section))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub k: usize,
    pub max_radius: T,
    pub d: T,
    pub mu1_lb: T,
    pub mu_k1_lb: T,
    pub cover_mu1: CoverSpec<T>,
    pub cover_mu_k1: CoverSpec<T>,
    pub pieces: CoverAudit<T>,
    pub section_mu1: SectionAudit<T>,
    pub section_mu_k1: SectionAudit<T>,
    pub ct_exponent: CtExponent,
    pub growth_exponent: T,
}

impl<T: PipelineScalar> BoundReport<T> {
    /// `μ_{k+1} d²`.
    pub fn mu_k1_normalized(&self) -> T {
        self.mu_k1_lb * self.d * self.d
    }

    /// `μ_1 d⁴ e^{2kd}`.
    pub fn mu1_normalized_d(&self) -> T {
        let d2 = self.d * self.d;
        self.mu1_lb * d2 * d2 * (T::lit(2.0 * self.k as f64) * self.d).exp()
    }

    /// `μ_1 R⁴ e^{2kR}`.
    pub fn mu1_normalized_r(&self) -> T {
        let r = self.max_radius;
        let r2 = r * r;
        self.mu1_lb * r2 * r2 * (T::lit(2.0 * self.k as f64) * r).exp()
    }
}

/// Lower bounds for `μ_{k+1}` (bounded section norm) and `μ_1` (general section norm).
pub fn theorem1_bounds<T: PipelineScalar>(m: &ModelManifold<T>) -> Result<BoundReport<T>> {
    let pieces = cover_pieces(m)?;
    let section_mu_k1 = section_norm(m, &SectionChoice::Bounded)?;
    let section_mu1 = section_norm(m, &SectionChoice::General)?;
    let e = m.options.ct_exponent;
    let cover_mu_k1 = cover_from_pieces(&pieces, m.thick.mu_thick, section_mu_k1.c_t, section_mu_k1.k_offset, e);
    let cover_mu1 = cover_from_pieces(&pieces, m.thick.mu_thick, section_mu1.c_t, section_mu1.k_offset, e);
    let mu_k1_lb = evaluate(&cover_mu_k1)?.bound;
    let mu1_lb = evaluate(&cover_mu1)?.bound;
    Ok(BoundReport {
        k: m.k(),
        max_radius: m.max_radius(),
        d: diameter_proxy(m),
        mu1_lb,
        mu_k1_lb,
        cover_mu1,
        cover_mu_k1,
        pieces,
        section_mu1,
        section_mu_k1,
        ct_exponent: e,
        growth_exponent: m.options.growth_exponent,
    })
}

/// Same model with every tube at radius `R`; rows in input order.
pub fn theorem1_sweep<T: PipelineScalar>(
    thick: ThickPartSpec<T>,
    k: usize,
    radii: &[T],
    slope: FillingSlope,
    boundary_area: T,
    options: PipelineOptions<T>,
) -> Result<Vec<BoundReport<T>>> {
    radii
        .par_iter()
        .map(|&r| theorem1_bounds(&ModelManifold::uniform(thick, k, r, slope, boundary_area, options)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Row<T> {
    pub i: u64,
    pub radius: T,
    pub d: T,
    /// `|b| ≥ R |a|` for the slope `(1, i)`.
    pub regime_ok: bool,
    pub c_t: T,
    pub mu1_lb: T,
    pub cover: CoverSpec<T>,
}

impl<T: PipelineScalar> Theorem2Row<T> {
    pub fn normalized(&self) -> T {
        self.mu1_lb * self.d * self.d
    }
}

/// Radius of the filled tube for slope `(1, i)`: `b ~ e^{γ R}` shifted by `r_offset`.
pub fn theorem2_radius<T: Real>(i: u64, r_offset: T, growth_exponent: T) -> T {
    r_offset + T::lit(i as f64).ln() / growth_exponent
}

/// Fillings `(1, i)` of one cusp; the template supplies the thick part, the
/// solver options and (through its first tube) the boundary torus area.
pub fn theorem2_sequence<T: PipelineScalar>(
    template: &ModelManifold<T>,
    indices: &[u64],
    r_offset: T,
) -> Result<Vec<Theorem2Row<T>>> {
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::InvalidInput("filling indices must be positive and non-empty".into()));
    }
    let area = template.tubes[0].boundary_area();
    indices
        .par_iter()
        .map(|&i| {
            let radius = theorem2_radius(i, r_offset, template.options.growth_exponent);
            if !(radius > T::zero()) {
                return Err(Error::InvalidInput(format!("i = {i} gives non-positive radius {radius}")));
            }
            let bi = i64::try_from(i).map_err(|_| Error::InvalidInput(format!("i = {i} too large")))?;
            let slope = FillingSlope::new(1, bi)?;
            let m = ModelManifold::uniform(template.thick, 1, radius, slope, area, template.options)?
                .with_overrides(template.overrides);
            let single = section_ct_bound_single(1, bi, radius, m.thick.c_prime, SlopeMode::FillingRegime)?;
            let (cover, _, section) = assemble_cover(&m, &SectionChoice::Fixed { c_t: single.value, k_offset: 0 })?;
            let mu1_lb = evaluate(&cover)?.bound;
            Ok(Theorem2Row {
                i,
                radius,
                d: diameter_proxy(&m),
                regime_ok: single.regime_ok == Some(true),
                c_t: section.c_t,
                mu1_lb,
                cover,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    /// `ln μ_{k+1}` against `ln d`; expect about −2.
    MuK1,
    /// `ln(μ_1 d⁴)` against `d`; expect about −2k.
    Mu1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual.
    pub residual: T,
}

/// Least-squares fit through `(d, bound)` pairs.
pub fn scaling_fit_points<T: Real>(points: &[(T, T)], target: FitTarget) -> Result<ScalingFit<T>> {
    if points.len() < 4 {
        return Err(Error::InvalidInput(format!("fit needs at least 4 points, got {}", points.len())));
    }
    let dmin = points.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let dmax = points.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    if !(dmin > T::zero()) || dmax / dmin < T::lit(4.0) {
        return Err(Error::InvalidInput(format!("fit needs d to span a factor of 4, got [{dmin}, {dmax}]")));
    }
    let xy: Vec<(T, T)> = points
        .iter()
        .map(|&(d, b)| match target {
            FitTarget::MuK1 => (d.ln(), b.ln()),
            FitTarget::Mu1 => (d, (b * d * d * d * d).ln()),
        })
        .collect();
    let n = T::lit(xy.len() as f64);
    let mx = xy.iter().map(|p| p.0).sum::<T>() / n;
    let my = xy.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<T>();
    Ok(ScalingFit { slope, intercept, residual: (ss / n).sqrt() })
}

pub fn scaling_fit<T: PipelineScalar>(reports: &[BoundReport<T>], target: FitTarget) -> Result<ScalingFit<T>> {
    let pts: Vec<(T, T)> = reports
        .iter()
        .map(|r| match target {
            FitTarget::MuK1 => (r.d, r.mu_k1_lb),
            FitTarget::Mu1 => (r.d, r.mu1_lb),
        })
        .collect();
    scaling_fit_points(&pts, target)
}
