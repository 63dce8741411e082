//! Camacho-Sad and residual indices, with the classical index identities as
//! exact validators.
//!
//! For a non-singular strict separatrix written as a coordinate axis, the
//! index is the residue at 0 of `B(x,0)/A(x,0)` where the saturation reads
//! `A ∂x + yB ∂y` with the separatrix at `y = 0`. Common factors cancel in
//! the ratio, so the residue can be computed on any multiple of the
//! saturation whose components still restrict nontrivially. The residual
//! index of a diffeomorphism is the index of its infinitesimal generator,
//! computed with an adaptive precision loop.

use crate::algebra::jet::Jet2;
use crate::algebra::residue::{laurent_residue, USeries};
use crate::algebra::roots::RootClass;
use crate::algebra::tower::{FieldElement, Tower};
use crate::blowup::{
    blow_up_vf, direction_form_vf, is_dicritical, saturate_transform, DivisorPoint,
};
use crate::error::{Error, Result};
use crate::germs::{log, Diffeo, VectorField};

/// Which coordinate axis plays the separatrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// The separatrix `v1 = 0` (the exceptional divisor in chart charts).
    Var1,
    /// The separatrix `v2 = 0` (the classical `S = (y)` normalization).
    Var2,
}

/// An index value with the location it was computed at.
#[derive(Clone, Debug)]
pub struct IndexValue {
    pub value: FieldElement,
    pub axis: Axis,
    pub description: String,
}

/// Divide both components by the axis variable as long as the non-axis
/// component restricts to zero on the axis, so that the ratio below is the
/// saturated one. Division failures mean the axis is not invariant.
fn reduce_along_axis(x: &VectorField, axis: Axis) -> Result<VectorField> {
    let mut cur = x.clone();
    for _ in 0..64 {
        let (a_restr, divisible) = match axis {
            Axis::Var2 => {
                let r = restrict_var2(cur.comp1())?;
                (r, true)
            }
            Axis::Var1 => (cur.comp2().restrict_var1_zero(), true),
        };
        let _ = divisible;
        if !a_restr.is_zero_poly() {
            return Ok(cur);
        }
        // the denominator component vanishes on the axis: a common axis
        // factor is still present; divide it out of both components
        cur = match axis {
            Axis::Var2 => VectorField::new(
                div_var2(cur.comp1())?,
                div_var2(cur.comp2())?,
            )?,
            Axis::Var1 => VectorField::new(
                cur.comp1().div_var1_power(1)?,
                cur.comp2().div_var1_power(1)?,
            )?,
        };
    }
    Err(Error::Internal("axis reduction did not terminate".into()))
}

fn restrict_var2(j: &Jet2) -> Result<USeries> {
    Ok(j.swap_vars().restrict_var1_zero())
}

fn div_var2(j: &Jet2) -> Result<Jet2> {
    Ok(j.swap_vars().div_var1_power(1)?.swap_vars())
}

/// Camacho-Sad index of `x` along a coordinate-axis separatrix. The axis
/// must be invariant for the saturation (`SeparatrixNotStrict` otherwise);
/// short truncations surface as `InsufficientPrecision` so the caller can
/// recompute the field with more terms.
pub fn cs_index(x: &VectorField, axis: Axis) -> Result<FieldElement> {
    let reduced = reduce_along_axis(x, axis)?;
    let (numer, denom) = match axis {
        Axis::Var2 => {
            // X = A ∂x + y B ∂y, CS = Res (comp2 / y)(x, 0) / comp1(x, 0)
            let b = match div_var2(reduced.comp2()) {
                Ok(b) => b,
                Err(_) => return Err(Error::SeparatrixNotStrict),
            };
            (restrict_var2(&b)?, restrict_var2(reduced.comp1())?)
        }
        Axis::Var1 => {
            let b = match reduced.comp1().div_var1_power(1) {
                Ok(b) => b,
                Err(_) => return Err(Error::SeparatrixNotStrict),
            };
            (
                b.restrict_var1_zero(),
                reduced.comp2().restrict_var1_zero(),
            )
        }
    };
    laurent_residue(&numer, &denom)
}

/// Residual index of a tangent to the identity diffeomorphism along an axis
/// separatrix: the Camacho-Sad index of its infinitesimal generator, with an
/// adaptive precision loop starting at `4(k+1)`.
pub fn residual_index(f: &Diffeo, axis: Axis) -> Result<FieldElement> {
    let k1 = f.tti_order()?;
    let mut n = 4 * k1;
    loop {
        let x = log(f, n)?;
        match cs_index(&x, axis) {
            Err(Error::InsufficientPrecision { .. }) if n < 512 => n *= 2,
            other => return other,
        }
    }
}

/// One divisor point of the first blow-up with its index data.
#[derive(Clone, Debug)]
pub struct DivisorIndexEntry {
    pub class: RootClass,
    /// Index at the representative point, over the class's tower.
    pub value: FieldElement,
    /// Sum of the index over the conjugate points, in the base tower.
    pub trace: FieldElement,
}

/// Camacho-Sad index of the transform of `x` at one divisor point (chart
/// value `Some(t0)` or `None` for `[0:1]`), along the exceptional divisor.
pub fn divisor_index_at(
    x: &VectorField,
    chart_value: &Option<FieldElement>,
    tower: &Tower,
) -> Result<FieldElement> {
    let nu = x.order()?;
    let xm = x.migrate(tower)?;
    let point = match chart_value {
        Some(t0) => DivisorPoint::chart_t(t0.clone()),
        None => DivisorPoint::chart_s_origin(tower),
    };
    let raw = blow_up_vf(&xm, &point)?;
    let (_, sat) = saturate_transform(&raw, nu, false)?;
    cs_index(&sat, Axis::Var1)
}

/// Trace of `value` over the conjugates of the class's defining factor,
/// using Newton power sums (no per-root extensions).
pub fn trace_over_class(value: &FieldElement, class: &RootClass) -> Result<FieldElement> {
    if class.conjugates <= 1 {
        return Ok(value.clone());
    }
    let q = class
        .factor
        .as_ref()
        .ok_or_else(|| Error::Internal("conjugate class without factor".into()))?;
    let name = class
        .tower
        .generator_names()
        .last()
        .ok_or_else(|| Error::Internal("class tower has no generator".into()))?
        .to_string();
    let coords = value.algebraic_coords(&name)?;
    let d = class.defining_degree;
    let ps = q.root_power_sums(d.saturating_sub(1).max(coords.len().saturating_sub(1)))?;
    let base = q.tower().clone();
    let mut acc = FieldElement::zero(&base);
    for (i, c) in coords.iter().enumerate() {
        // coordinates do not mention the generator; rebase them
        let c = rebase(c, &base)?;
        let t = if i == 0 {
            c.mul(&FieldElement::from_integer(&base, d as i64))?
        } else {
            c.mul(&ps[i - 1])?
        };
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// Re-express an element that does not mention the top generator in the
/// smaller tower.
fn rebase(v: &FieldElement, base: &Tower) -> Result<FieldElement> {
    v.migrate_down(base)
}

/// Sum of the Camacho-Sad indices of the transforms along the exceptional
/// divisor, over every strictly singular divisor point (Galois-conjugate
/// points summed per factor by traces). For non-dicritical fields this must
/// be exactly -1.
pub fn divisor_index_sum(x: &VectorField) -> Result<(Vec<DivisorIndexEntry>, FieldElement)> {
    if is_dicritical(x)? {
        return Err(Error::Dicritical);
    }
    let h = direction_form_vf(x)?;
    let classes = crate::algebra::roots::root_representatives(&h, "r")?;
    let tower = x.tower().clone();
    let mut entries = Vec::new();
    let mut sum = FieldElement::zero(&tower);
    for class in classes {
        let value = divisor_index_at(x, &class.chart_value, &class.tower)?;
        let trace = trace_over_class(&value, &class)?;
        sum = sum.add(&trace.migrate(&tower)?)?;
        entries.push(DivisorIndexEntry {
            class,
            value,
            trace,
        });
    }
    Ok((entries, sum))
}

/// Report of the four classical index identities, checked exactly.
#[derive(Clone, Debug)]
pub struct IndexPropertyReport {
    /// Property 3: divisor index sum over the first blow-up equals -1.
    pub divisor_sum: Option<(String, bool)>,
    /// Property 2: blow-up decrement along `v2 = 0` when it is invariant.
    pub blow_up_decrement: Option<(String, bool)>,
    /// Property 4: reduced product rule or saddle-node zero rule along the
    /// axes when both are invariant.
    pub reduced_rule: Option<(String, bool)>,
    pub all_hold: bool,
}

/// Validate the index identities available for this field. Violations are
/// implementation-bug detectors, reported as `PropertyViolation`.
pub fn validate_index_properties(x: &VectorField) -> Result<IndexPropertyReport> {
    let tower = x.tower().clone();
    let mut report = IndexPropertyReport {
        divisor_sum: None,
        blow_up_decrement: None,
        reduced_rule: None,
        all_hold: true,
    };
    // property 3
    if !is_dicritical(x)? {
        let (_, sum) = divisor_index_sum(x)?;
        let ok = sum
            .sub(&FieldElement::from_integer(&tower, -1))?
            .is_zero();
        report.all_hold &= ok;
        report.divisor_sum = Some((format!("sum = {sum}"), ok));
        if !ok {
            return Err(Error::PropertyViolation(format!(
                "divisor index sum {sum} != -1"
            )));
        }
    }
    // property 2 along v2 = 0, when invariant
    if let Ok(base) = cs_index(x, Axis::Var2) {
        let nu = x.order()?;
        let raw = blow_up_vf(x, &DivisorPoint::chart_t(FieldElement::zero(&tower)))?;
        let (_, sat) = saturate_transform(&raw, nu, is_dicritical(x)?)?;
        let up = cs_index(&sat, Axis::Var2)?;
        let ok = up
            .sub(&base.sub(&FieldElement::one(&tower))?)?
            .is_zero();
        report.all_hold &= ok;
        report.blow_up_decrement = Some((format!("CS = {base}, after = {up}"), ok));
        if !ok {
            return Err(Error::PropertyViolation(format!(
                "blow-up decrement failed: {base} -> {up}"
            )));
        }
    }
    // property 4 on reduced axis-adapted fields
    if let Ok(class) = crate::blowup::classify_singularity(x) {
        if class.is_reduced() {
            let i1 = cs_index(x, Axis::Var1);
            let i2 = cs_index(x, Axis::Var2);
            if let (Ok(i1), Ok(i2)) = (i1, i2) {
                use crate::blowup::SingularityClass;
                let (desc, ok) = match class {
                    SingularityClass::ReducedNonDegenerate { .. } => {
                        let p = i1.mul(&i2)?;
                        (format!("product = {p}"), p.is_one())
                    }
                    SingularityClass::ReducedSaddleNode { eigenvalues } => {
                        // strong separatrix carries index 0; the strong axis
                        // is the one tangent to the nonzero eigenvalue
                        let strong_axis_index =
                            if eigenvalues.0.is_zero() { &i1 } else { &i2 };
                        let _ = &eigenvalues;
                        (
                            format!("strong index = {strong_axis_index}"),
                            strong_axis_index.is_zero(),
                        )
                    }
                    _ => unreachable!(),
                };
                report.all_hold &= ok;
                report.reduced_rule = Some((desc.clone(), ok));
                if !ok {
                    return Err(Error::PropertyViolation(format!(
                        "reduced-leaf index rule failed: {desc}"
                    )));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::jet::{Jet2, Prec};

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
    fn linear_diagonal_index() {
        // X = x ∂x + λ y ∂y, S = (y): CS = λ (here λ = 5)
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.scale(&fe(5)).unwrap()).unwrap();
        let v = cs_index(&f, Axis::Var2).unwrap();
        assert_eq!(v.to_string(), "5");
        // the other axis: CS = 1/λ; product = 1 (property 4)
        let w = cs_index(&f, Axis::Var1).unwrap();
        assert_eq!(w.to_string(), "1/5");
    }

    #[test]
    fn saddle_node_strong_index_zero() {
        // x^2 ∂x + y ∂y: strong separatrix (x = 0), CS = 0
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.clone()).unwrap();
        let v = cs_index(&f, Axis::Var1).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn divisor_residues_of_quadratic() {
        // X = x ∂x + (t^2 - t) ∂t as a chart field: divisor indices -1 at
        // t = 0 and +1 at t = 1 (computed through the residue directly)
        let t = tw();
        let (x, tt) = (
            Jet2::var1(&t, ("x", "t"), Prec::EXACT),
            Jet2::var2(&t, ("x", "t"), Prec::EXACT),
        );
        let f = VectorField::new(
            x.clone(),
            tt.mul(&tt).unwrap().sub(&tt).unwrap(),
        )
        .unwrap();
        let v0 = cs_index(&f, Axis::Var1).unwrap();
        assert_eq!(v0.to_string(), "-1");
        // translate to t = 1
        let f1 = VectorField::new(
            f.comp1().translate_var2(&fe(1)).unwrap(),
            f.comp2().translate_var2(&fe(1)).unwrap(),
        )
        .unwrap();
        let v1 = cs_index(&f1, Axis::Var1).unwrap();
        assert_eq!(v1.to_string(), "1");
    }

    #[test]
    fn divisor_sum_is_minus_one() {
        // X = x^2 ∂x + y^2 ∂y: indices {-1, +1, -1}, sum -1
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let (entries, sum) = divisor_index_sum(&f).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(sum.to_string(), "-1");
        let mut values: Vec<String> = entries.iter().map(|e| e.trace.to_string()).collect();
        values.sort();
        assert_eq!(values, ["-1", "-1", "1"]);
    }

    #[test]
    fn divisor_sum_with_algebraic_points() {
        // X = x^2 ∂x + (y^2 + 2x^2) ∂y: P(1,t) = t^2 - t + 2? compute:
        // P = x(y^2 + 2x^2) - y x^2: P(1,t) = t^2 - t + 2, irrational roots
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(
            x.mul(&x).unwrap(),
            y.mul(&y).unwrap()
                .add(&x.mul(&x).unwrap().scale(&fe(2)).unwrap())
                .unwrap(),
        )
        .unwrap();
        let (entries, sum) = divisor_index_sum(&f).unwrap();
        assert_eq!(sum.to_string(), "-1");
        assert!(entries.iter().any(|e| e.class.conjugates == 2));
    }

    #[test]
    fn blow_up_decrement() {
        // X = x ∂x + 2 y ∂y: CS(X, y=0) = 2; after blow-up at [1:0]: 1
        let t = tw();
        let (x, y) = xy(&t);
        let f = VectorField::new(x.clone(), y.scale(&fe(2)).unwrap()).unwrap();
        let report = validate_index_properties(&f).unwrap();
        let (desc, ok) = report.blow_up_decrement.unwrap();
        assert!(ok, "{desc}");
        assert!(desc.contains("CS = 2"));
    }

    #[test]
    fn residual_index_of_blown_up_parabolic() {
        // F = (x + x^2, y), blow up at [1:0]: generator x^2∂x - xt∂t + ...,
        // residual index along the divisor = Res(-x/x^2) = -1
        let t = tw();
        let (x, y) = xy(&t);
        let f = crate::germs::Diffeo::from_exact(
            x.add(&x.mul(&x).unwrap()).unwrap(),
            y,
        )
        .unwrap();
        let fq = crate::blowup::blow_up_diffeo(
            &f,
            &DivisorPoint::chart_t(FieldElement::zero(&t)),
            8,
        )
        .unwrap();
        let idx = residual_index(&fq, Axis::Var1).unwrap();
        assert_eq!(idx.to_string(), "-1");
    }
}
