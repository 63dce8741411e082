//! Blow-up charts and transforms, saturation, singularity classes, and the
//! Seidenberg resolution machinery.
//!
//! Chart conventions, used everywhere downstream: the blow-up of the origin
//! is covered by chart `T`, `(v1, v2) ↦ (v1, v1·v2)` (directions `[1:t]`),
//! and chart `S`, `(v1, v2) ↦ (v1·v2, v1)` (direction `[0:1]`). In both
//! presentations the exceptional divisor is `v1 = 0` and `v2` runs along it,
//! so every transform field looks the same to the classification code.
//!
//! Precision: transforms of truncated jets are certified per `v1`-slice (a
//! source certified to total degree `P` certifies every output monomial of
//! `v1`-degree ≤ `P`), which is what makes the later translation along the
//! divisor exact. Exact polynomial fields transform exactly.

pub mod dot;
pub mod resolve;

use crate::algebra::jet::{Jet2, Prec};
use crate::algebra::roots::ProjPoint;
use crate::algebra::tower::{FieldElement, Tower};
use crate::algebra::{bipoly, upoly::UniPoly};
use crate::error::{Error, Result};
use crate::germs::{Chart, Diffeo, DiffeoSource, LinearClass, VectorField};

pub use resolve::{
    contains_saddle_node, enumerate_separatrices, second_type, BranchKind, NodeId,
    ResolutionTree, ResolveOptions, SeparatrixDescriptor, Strength, TreeNode,
};

/// A point of the exceptional divisor in one of the two charts. Chart `S`
/// only ever hosts the origin (`[0:1]`); all other points live in chart `T`.
#[derive(Clone, Debug)]
pub struct DivisorPoint {
    pub chart: Chart,
    pub coordinate: FieldElement,
}

impl DivisorPoint {
    pub fn chart_t(t0: FieldElement) -> DivisorPoint {
        DivisorPoint {
            chart: Chart::T,
            coordinate: t0,
        }
    }

    pub fn chart_s_origin(tower: &Tower) -> DivisorPoint {
        DivisorPoint {
            chart: Chart::S,
            coordinate: FieldElement::zero(tower),
        }
    }

    pub fn from_projective(p: &ProjPoint) -> Result<DivisorPoint> {
        match p.chart_t_value()? {
            Some(t0) => Ok(DivisorPoint::chart_t(t0)),
            None => Ok(DivisorPoint::chart_s_origin(p.tower())),
        }
    }

    pub fn point(&self) -> Result<ProjPoint> {
        match self.chart {
            Chart::T => ProjPoint::from_chart_t(&self.coordinate),
            Chart::S => Ok(ProjPoint::chart_s_origin(self.coordinate.tower())),
        }
    }
}

/// Result of factoring `X = f · X̄` with `X̄` saturated.
#[derive(Clone, Debug)]
pub struct Saturation {
    /// The common factor (constant 1 when already saturated).
    pub factor: Jet2,
    pub saturated: VectorField,
    /// Whether the saturation is still singular.
    pub strictly_singular: bool,
}

/// Factor out the gcd of the components. Exact polynomial fields use the
/// bivariate gcd; truncations are only accepted when the lowest homogeneous
/// parts certify coprimality (then the factor is 1), because the gcd of a
/// truncation proves nothing about the series.
pub fn saturate(x: &VectorField) -> Result<Saturation> {
    let tower = x.tower().clone();
    let vars = x.vars();
    if x.is_zero() {
        return Err(Error::Internal("saturation of the zero field".into()));
    }
    let one = Jet2::constant(FieldElement::one(&tower), vars, Prec::EXACT);
    if x.is_exact() {
        let f = if x.comp1().is_zero() || x.comp2().is_zero() {
            let nz = if x.comp1().is_zero() {
                x.comp2()
            } else {
                x.comp1()
            };
            bipoly::normalize_jet(nz)?
        } else {
            bipoly::bi_gcd(x.comp1(), x.comp2())?
        };
        if f.is_constant_unit() {
            let strictly_singular = x.order()? >= 1;
            return Ok(Saturation {
                factor: one,
                saturated: x.clone(),
                strictly_singular,
            });
        }
        let c1 = if x.comp1().is_zero() {
            x.comp1().clone()
        } else {
            bipoly::bi_div_exact(x.comp1(), &f)?
        };
        let c2 = if x.comp2().is_zero() {
            x.comp2().clone()
        } else {
            bipoly::bi_div_exact(x.comp2(), &f)?
        };
        let saturated = VectorField::new(c1, c2)?;
        let strictly_singular = saturated.order()? >= 1;
        return Ok(Saturation {
            factor: f,
            saturated,
            strictly_singular,
        });
    }
    // Jet path: certify coprimality from the lowest homogeneous parts.
    if lowest_parts_coprime(x)? {
        let strictly_singular = x.order()? >= 1;
        return Ok(Saturation {
            factor: one,
            saturated: x.clone(),
            strictly_singular,
        });
    }
    Err(Error::InsufficientPrecision {
        needed: x.prec().effective_total().map(|t| t + 1).unwrap_or(0),
        have: x.prec().effective_total().unwrap_or(0),
    })
}

fn lowest_parts_coprime(x: &VectorField) -> Result<bool> {
    let lowest = |j: &Jet2| -> Result<Option<(u32, UniPoly)>> {
        if j.is_zero() {
            return Ok(None);
        }
        let o = j.order()?;
        let h = j.homogeneous_part(o)?;
        let (_, p) = crate::algebra::roots::dehomogenize(&h)?;
        let xval = o - p.degree().unwrap_or(0) as u32;
        Ok(Some((xval, p)))
    };
    let (Some((xa, pa)), Some((xb, pb))) = (lowest(x.comp1())?, lowest(x.comp2())?) else {
        return Ok(false);
    };
    if xa.min(xb) > 0 {
        return Ok(false);
    }
    Ok(pa.gcd(&pb)?.is_constant())
}

/// The polynomial `x B_ν - y A_ν` from the order-ν homogeneous parts;
/// identically zero exactly for dicritical fields.
pub fn direction_form_vf(x: &VectorField) -> Result<Jet2> {
    let ord = x.order()?;
    let a = x.comp1().homogeneous_part(ord)?;
    let b = x.comp2().homogeneous_part(ord)?;
    b.mul_monomial(1, 0).sub(&a.mul_monomial(0, 1))
}

pub fn is_dicritical(x: &VectorField) -> Result<bool> {
    Ok(direction_form_vf(x)?.is_zero())
}

/// Monomial substitution for a chart: chart `T` sends `x^i y^j` to
/// `v1^(i+j) v2^j`, chart `S` to `v1^(i+j) v2^i`. The certified region
/// becomes `v1`-graded: everything with `v1`-degree ≤ the source's effective
/// total degree is certified (slices in `v2` are finite by construction).
pub(crate) fn chart_substitute(j: &Jet2, chart: Chart, out_vars: (&str, &str)) -> Jet2 {
    let p = j.prec();
    let prec = if p.is_exact() {
        Prec::EXACT
    } else {
        let px = match chart {
            Chart::T => [p.total, p.x].into_iter().flatten().min(),
            Chart::S => [p.total, p.y].into_iter().flatten().min(),
        };
        let py = match chart {
            Chart::T => p.y,
            Chart::S => p.x,
        };
        Prec {
            total: None,
            x: px,
            y: py,
        }
    };
    let terms: Vec<_> = j
        .terms()
        .map(|(&(i, jj), c)| {
            let e = match chart {
                Chart::T => (i + jj, jj),
                Chart::S => (i + jj, i),
            };
            (e, c.clone())
        })
        .collect();
    Jet2::from_terms(j.tower(), out_vars, prec, terms)
}

/// Raw blow-up transform `X_q` of a vector field (`dπ · X_q = X`) in the
/// given chart, translated so the divisor point is at the origin. Not
/// saturated: the divisor power `v1^(ν-1)` (ν if dicritical) is still in.
/// Output coordinates are `(v1, v2)` with the divisor at `v1 = 0`.
pub fn blow_up_vf(x: &VectorField, p: &DivisorPoint) -> Result<VectorField> {
    let out_vars = match p.chart {
        Chart::T => ("x", "t"),
        Chart::S => ("y", "s"),
    };
    let a = chart_substitute(x.comp1(), p.chart, out_vars);
    let b = chart_substitute(x.comp2(), p.chart, out_vars);
    let (keep, other) = match p.chart {
        Chart::T => (a, b),
        Chart::S => (b, a),
    };
    let v2 = Jet2::var2(x.tower(), out_vars, Prec::EXACT);
    let comp2 = other.sub(&v2.mul(&keep)?)?.div_var1_power(1)?;
    let comp1 = keep;
    let t0 = &p.coordinate;
    if t0.is_zero() {
        return VectorField::new(comp1, comp2);
    }
    VectorField::new(comp1.translate_var2(t0)?, comp2.translate_var2(t0)?)
}

/// Divide the raw transform by the divisor power that saturation removes:
/// `ν - 1` for a non-dicritical source of order ν, `ν` for a dicritical one.
pub fn saturate_transform(
    raw: &VectorField,
    source_order: u32,
    source_dicritical: bool,
) -> Result<(u32, VectorField)> {
    let k = if source_dicritical {
        source_order
    } else {
        source_order - 1
    };
    if k == 0 {
        return Ok((0, raw.clone()));
    }
    Ok((
        k,
        VectorField::new(
            raw.comp1().div_var1_power(k)?,
            raw.comp2().div_var1_power(k)?,
        )?,
    ))
}

/// Blow-up transform of a diffeomorphism at a divisor point, certified to
/// total degree `target`. The source must be tangent to the identity, or
/// have a unipotent linear part with the chosen direction invariant (then
/// the transform is checked to be tangent to the identity).
pub fn blow_up_diffeo(f: &Diffeo, p: &DivisorPoint, target: u32) -> Result<Diffeo> {
    match f.linear_class()? {
        LinearClass::Identity => {}
        LinearClass::Unipotent => {
            let (va, vb) = match p.chart {
                Chart::T => (FieldElement::one(f.tower()), p.coordinate.clone()),
                Chart::S => {
                    if !p.coordinate.is_zero() {
                        return Err(Error::Internal("chart S only hosts the origin".into()));
                    }
                    (FieldElement::zero(f.tower()), FieldElement::one(f.tower()))
                }
            };
            let l11 = f.map1().coeff(1, 0)?;
            let l12 = f.map1().coeff(0, 1)?;
            let l21 = f.map2().coeff(1, 0)?;
            let l22 = f.map2().coeff(0, 1)?;
            let w1 = l11.mul(&va)?.add(&l12.mul(&vb)?)?;
            let w2 = l21.mul(&va)?.add(&l22.mul(&vb)?)?;
            let cross = w1.mul(&vb)?.sub(&w2.mul(&va)?)?;
            if !cross.is_zero() {
                return Err(Error::NotInvariantDirection);
            }
        }
        LinearClass::Other => return Err(Error::NotTangentToIdentity),
    }
    let out_vars = match p.chart {
        Chart::T => ("x", "t"),
        Chart::S => ("y", "s"),
    };
    // Work depth: v1-degrees to target+1 (one is lost to the chart factor);
    // v2-degrees to 2(target+1)+1, which bounds every slice of a tangent to
    // the identity transform.
    let pwork = target + 1;
    if let Some(t) = f.prec().total {
        if t < pwork {
            return Err(Error::InsufficientPrecision {
                needed: pwork,
                have: t,
            });
        }
    }
    let ft = f.map1().truncate(Prec::total(pwork));
    let gt = f.map2().truncate(Prec::total(pwork));
    let a = chart_substitute(&ft, p.chart, out_vars);
    let b = chart_substitute(&gt, p.chart, out_vars);
    let (keep, other) = match p.chart {
        Chart::T => (a, b),
        Chart::S => (b, a),
    };
    let boxp = Prec::boxed(pwork, 2 * pwork + 1);
    let unit = keep.div_var1_power(1)?.truncate(boxp);
    let ratio = other.div_var1_power(1)?.truncate(boxp);
    let m2 = ratio.mul(&unit.invert_unit()?)?;
    let m1 = keep.truncate(boxp);
    let t0 = &p.coordinate;
    let (m1, m2) = if t0.is_zero() {
        (m1, m2)
    } else {
        let m1t = m1.translate_var2(t0)?;
        let m2t = m2.translate_var2(t0)?;
        let c = Jet2::constant(t0.clone(), out_vars, m2t.prec());
        (m1t, m2t.sub(&c)?)
    };
    let final_prec = Prec::total(target);
    let m1 = m1.truncate(final_prec).assume_prec(final_prec);
    let m2 = m2.truncate(final_prec).assume_prec(final_prec);
    let out = Diffeo::from_parts(
        m1,
        m2,
        DiffeoSource::BlowUp {
            parent: Box::new(f.clone()),
            chart: p.chart,
            center: p.coordinate.clone(),
        },
    )?;
    if !out.is_tangent_to_identity()? {
        return Err(Error::NotInvariantDirection);
    }
    Ok(out)
}

/// Singularity class of a saturated vector field germ.
#[derive(Clone, Debug)]
pub enum SingularityClass {
    NonSingular,
    /// Reduced with two nonzero eigenvalues, ratio not a positive rational.
    ReducedNonDegenerate {
        eigenvalues: (FieldElement, FieldElement),
    },
    /// Reduced with exactly one zero eigenvalue.
    ReducedSaddleNode {
        eigenvalues: (FieldElement, FieldElement),
    },
    NotReduced,
}

impl SingularityClass {
    pub fn is_reduced(&self) -> bool {
        matches!(
            self,
            SingularityClass::ReducedNonDegenerate { .. }
                | SingularityClass::ReducedSaddleNode { .. }
        )
    }

    pub fn is_final(&self) -> bool {
        self.is_reduced() || matches!(self, SingularityClass::NonSingular)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SingularityClass::NonSingular => "NonSingular",
            SingularityClass::ReducedNonDegenerate { .. } => "ReducedNonDegenerate",
            SingularityClass::ReducedSaddleNode { .. } => "ReducedSaddleNode",
            SingularityClass::NotReduced => "NotReduced",
        }
    }
}

/// Exact eigenvalues of the linear part of a saturated field, adjoining a
/// square root of the discriminant only when the matrix is not triangular
/// and the discriminant has no rational square root. Returns the possibly
/// extended tower.
pub fn linear_eigenvalues(x: &VectorField) -> Result<(Tower, FieldElement, FieldElement)> {
    let tower = x.tower().clone();
    let m = x.linear_part()?;
    if m[0][1].is_zero() || m[1][0].is_zero() {
        return Ok((tower, m[0][0].clone(), m[1][1].clone()));
    }
    let tr = m[0][0].add(&m[1][1])?;
    let det = m[0][0].mul(&m[1][1])?.sub(&m[0][1].mul(&m[1][0])?)?;
    let four = FieldElement::from_integer(&tower, 4);
    let disc = tr.mul(&tr)?.sub(&four.mul(&det)?)?;
    let half = FieldElement::from_ratio(&tower, 1, 2);
    if disc.is_zero() {
        let l = tr.mul(&half)?;
        return Ok((tower, l.clone(), l));
    }
    if let Some(r) = disc.as_rational() {
        if let Some(sq) = rational_sqrt(r) {
            let s = FieldElement::from_rational(&tower, sq);
            let l1 = tr.add(&s)?.mul(&half)?;
            let l2 = tr.sub(&s)?.mul(&half)?;
            return Ok((tower, l1, l2));
        }
    }
    // adjoin a root of λ² - tr λ + det (squarefree since disc ≠ 0)
    let name = tower.fresh_name("e");
    let mp = [det.clone(), tr.neg(), FieldElement::one(&tower)];
    let ext = tower.adjoin_algebraic(&name, &mp)?;
    let l1 = FieldElement::generator(&ext, &name)?;
    let l2 = tr.migrate(&ext)?.sub(&l1)?;
    Ok((ext, l1, l2))
}

fn rational_sqrt(r: &num_rational::BigRational) -> Option<num_rational::BigRational> {
    use num_traits::Signed;
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(num_rational::BigRational::new(n, d))
    } else {
        None
    }
}

/// `true` when `ratio` is a positive rational (the non-reducedness test
/// λ₂/λ₁ ∈ Q_{>0}); canonical forms make the rationality test structural.
fn is_positive_rational(ratio: &FieldElement) -> bool {
    use num_traits::Signed;
    match ratio.as_rational() {
        Some(q) => q.is_positive(),
        None => false,
    }
}

/// Classify a saturated germ per the reduced / saddle-node / not reduced
/// trichotomy; non-singular saturations report `NonSingular`.
pub fn classify_singularity(x: &VectorField) -> Result<SingularityClass> {
    if x.is_zero() {
        return Err(Error::Internal("classification of the zero field".into()));
    }
    if x.order()? == 0 {
        return Ok(SingularityClass::NonSingular);
    }
    let (_tower, l1, l2) = linear_eigenvalues(x)?;
    match (l1.is_zero(), l2.is_zero()) {
        (true, true) => Ok(SingularityClass::NotReduced),
        (false, true) | (true, false) => Ok(SingularityClass::ReducedSaddleNode {
            eigenvalues: (l1, l2),
        }),
        (false, false) => {
            let ratio = l2.div(&l1)?;
            if is_positive_rational(&ratio) {
                Ok(SingularityClass::NotReduced)
            } else {
                Ok(SingularityClass::ReducedNonDegenerate {
                    eigenvalues: (l1, l2),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw() -> Tower {
        Tower::rationals()
    }

    fn xy(t: &Tower) -> (Jet2, Jet2) {
        (
            Jet2::var1(t, ("x", "y"), Prec::EXACT),
            Jet2::var2(t, ("x", "y"), Prec::EXACT),
        )
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_integer(&tw(), n)
    }

    #[test]
    fn saturate_with_common_factor() {
        // x^2 ∂x + xy ∂y = x (x ∂x + y ∂y)
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), x.mul(&y).unwrap()).unwrap();
        let s = saturate(&f).unwrap();
        assert_eq!(s.factor.to_string(), "x");
        assert_eq!(s.saturated.comp1().to_string(), "x");
        assert_eq!(s.saturated.comp2().to_string(), "y");
        assert!(s.strictly_singular);
        // x^2 y ∂x + x y^2 ∂y = xy (x ∂x + y ∂y)
        let f = VectorField::new(
            x.mul(&x).unwrap().mul(&y).unwrap(),
            x.mul(&y).unwrap().mul(&y).unwrap(),
        )
        .unwrap();
        let s = saturate(&f).unwrap();
        assert_eq!(s.factor.to_string(), "x*y");
        assert!(s.strictly_singular);
    }

    #[test]
    fn saturate_coprime() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let s = saturate(&f).unwrap();
        assert!(s.factor.is_constant_unit());
        assert!(s.strictly_singular);
    }

    #[test]
    fn dicritical_tests() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.clone()).unwrap();
        assert!(is_dicritical(&f).unwrap());
        let f2 = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        assert!(!is_dicritical(&f2).unwrap());
        // (x^2 + xy) ∂x + (xy + y^2) ∂y: P = 0
        let f3 = VectorField::new(
            x.mul(&x).unwrap().add(&x.mul(&y).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&y.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(is_dicritical(&f3).unwrap());
    }

    #[test]
    fn blow_up_linear_field() {
        // X = x ∂x + 2y ∂y at chart T, t = 0: transform x ∂x + t ∂t
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.scale(&fe(2)).unwrap()).unwrap();
        let raw = blow_up_vf(&f, &DivisorPoint::chart_t(FieldElement::zero(&t))).unwrap();
        assert_eq!(raw.comp1().to_string(), "x");
        assert_eq!(raw.comp2().to_string(), "t");
    }

    #[test]
    fn blow_up_quadratic_both_charts() {
        // X = x^2 ∂x + y^2 ∂y: chart T saturated: x ∂x + (t^2 - t) ∂t
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let raw = blow_up_vf(&f, &DivisorPoint::chart_t(FieldElement::zero(&t))).unwrap();
        let (pow, sat) = saturate_transform(&raw, 2, false).unwrap();
        assert_eq!(pow, 1);
        assert_eq!(sat.comp1().to_string(), "x");
        assert_eq!(sat.comp2().to_string(), "-t + t^2");
        // chart S saturated: y ∂y + (s^2 - s) ∂s, presented divisor-first
        let raw_s = blow_up_vf(&f, &DivisorPoint::chart_s_origin(&t)).unwrap();
        let (_, sat_s) = saturate_transform(&raw_s, 2, false).unwrap();
        assert_eq!(sat_s.comp1().to_string(), "y");
        assert_eq!(sat_s.comp2().to_string(), "-s + s^2");
    }

    #[test]
    fn blow_up_translated_point() {
        // X = x^2 ∂x + y^2 ∂y at t = 1
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let raw = blow_up_vf(&f, &DivisorPoint::chart_t(fe(1))).unwrap();
        let (_, sat) = saturate_transform(&raw, 2, false).unwrap();
        assert_eq!(sat.comp1().coeff(1, 0).unwrap().to_string(), "1");
        assert_eq!(sat.comp2().coeff(0, 1).unwrap().to_string(), "1");
        assert!(sat.comp2().coeff(0, 0).unwrap().is_zero());
    }

    #[test]
    fn classify_basic_cases() {
        let t = tw();
        let (x, y) = xy(&t);
        // x ∂x - y ∂y: reduced non-degenerate
        let f = VectorField::new(x.clone(), y.neg()).unwrap();
        assert!(matches!(
            classify_singularity(&f).unwrap(),
            SingularityClass::ReducedNonDegenerate { .. }
        ));
        // x^2 ∂x + y ∂y: saddle-node
        let f = VectorField::new(x.mul(&x).unwrap(), y.clone()).unwrap();
        assert!(matches!(
            classify_singularity(&f).unwrap(),
            SingularityClass::ReducedSaddleNode { .. }
        ));
        // x ∂x + 2y ∂y: ratio 2 ∈ Q>0: not reduced
        let f = VectorField::new(x.clone(), y.scale(&fe(2)).unwrap()).unwrap();
        assert!(matches!(
            classify_singularity(&f).unwrap(),
            SingularityClass::NotReduced
        ));
    }

    #[test]
    fn eigenvalues_may_extend_tower() {
        // linear part [[0, 1], [2, 0]]: eigenvalues ± sqrt 2
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(y.clone(), x.scale(&fe(2)).unwrap()).unwrap();
        let (tower, l1, l2) = linear_eigenvalues(&f).unwrap();
        assert_eq!(tower.level_count(), 1);
        assert!(l1.add(&l2).unwrap().is_zero());
        assert_eq!(l1.mul(&l1).unwrap().to_string(), "2");
        assert!(matches!(
            classify_singularity(&f).unwrap(),
            SingularityClass::ReducedNonDegenerate { .. }
        ));
    }

    #[test]
    fn blow_up_diffeo_simple() {
        // F = (x + x^2, y) at [1:0]: t-comp t/(1+x) = t - tx + tx^2 - ...
        let t = tw();
        let (x, y) = xy(&t);
        let f = Diffeo::from_exact(x.add(&x.mul(&x).unwrap()).unwrap(), y).unwrap();
        let fq = blow_up_diffeo(&f, &DivisorPoint::chart_t(FieldElement::zero(&t)), 4).unwrap();
        assert_eq!(fq.map1().coeff(2, 0).unwrap().to_string(), "1");
        assert_eq!(fq.map2().coeff(0, 1).unwrap().to_string(), "1");
        assert_eq!(fq.map2().coeff(1, 1).unwrap().to_string(), "-1");
        assert_eq!(fq.map2().coeff(2, 1).unwrap().to_string(), "1");
        // generator transform commutes with blow-up
        let lf = crate::germs::log(&f, 5).unwrap();
        let lf_up = blow_up_vf(&lf, &DivisorPoint::chart_t(FieldElement::zero(&t))).unwrap();
        let lfq = crate::germs::log(&fq, 4).unwrap();
        let d1 = lf_up
            .comp1()
            .truncate(Prec::total(4))
            .sub(&lfq.comp1().truncate(Prec::total(4)))
            .unwrap();
        let d2 = lf_up
            .comp2()
            .truncate(Prec::total(4))
            .sub(&lfq.comp2().truncate(Prec::total(4)))
            .unwrap();
        assert!(d1.is_zero(), "x-components differ: {d1}");
        assert!(d2.is_zero(), "t-components differ: {d2}");
    }

    #[test]
    fn blow_up_identity_is_identity() {
        let t = tw();
        let (x, y) = xy(&t);
        let f = Diffeo::from_exact(x, y).unwrap();
        let fq = blow_up_diffeo(&f, &DivisorPoint::chart_t(FieldElement::zero(&t)), 4).unwrap();
        assert!(fq.displacement().unwrap().is_zero());
    }
}
