//! Germ calculus for plane vector fields and diffeomorphisms: orders, the
//! exp/log correspondence, characteristic directions, fixed curves.
//!
//! A tangent to the identity diffeomorphism `F(z) = z + F_{k+1}(z) + …` has a
//! unique infinitesimal generator: the formal vector field `X` of order ≥ 2
//! with `F = exp X`. `log` computes its jet order by order by solving
//! `exp(X) = F`; the lowest jet always equals the lowest jet of `F - id`.
//! Characteristic directions are the zeros of `x q_{k+1} - y p_{k+1}`.

use crate::algebra::bipoly;
use crate::algebra::jet::{Jet2, Prec};
use crate::algebra::roots::{self, ProjPoint, RootClass};
use crate::algebra::tower::{FieldElement, Tower};
use crate::error::{Error, Result};

/// Which affine chart of a blow-up a transform lives in. In chart `T` the
/// map `(x, t) ↦ (x, t·x)` covers directions `[1:t]`; in chart `S` the map
/// `(s, y) ↦ (s·y, y)` covers `[0:1]`. Transform coordinates are always
/// arranged so the exceptional divisor is the first variable's zero set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    T,
    S,
}

/// A formal vector field `A ∂/∂v1 + B ∂/∂v2` with shared certified precision.
#[derive(Clone, Debug)]
pub struct VectorField {
    comp1: Jet2,
    comp2: Jet2,
}

impl VectorField {
    pub fn new(comp1: Jet2, comp2: Jet2) -> Result<VectorField> {
        if comp1.vars() != comp2.vars() {
            return Err(Error::Internal("vector field with mixed variables".into()));
        }
        if !comp1.tower().compatible(comp2.tower()) {
            return Err(Error::TowerMismatch);
        }
        let prec = comp1.prec().meet(&comp2.prec());
        Ok(VectorField {
            comp1: comp1.truncate(prec),
            comp2: comp2.truncate(prec),
        })
    }

    pub fn comp1(&self) -> &Jet2 {
        &self.comp1
    }

    pub fn comp2(&self) -> &Jet2 {
        &self.comp2
    }

    pub fn tower(&self) -> &Tower {
        self.comp1.tower()
    }

    pub fn vars(&self) -> (&str, &str) {
        self.comp1.vars()
    }

    pub fn prec(&self) -> Prec {
        self.comp1.prec()
    }

    pub fn is_exact(&self) -> bool {
        self.comp1.is_exact() && self.comp2.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.comp1.is_zero() && self.comp2.is_zero()
    }

    /// Least total degree of a nonzero coefficient across both components.
    /// An exactly-zero component contributes nothing; a zero truncation caps
    /// what can be certified.
    pub fn order(&self) -> Result<u32> {
        let lowest = self
            .comp1
            .terms()
            .chain(self.comp2.terms())
            .map(|(&(i, j), _)| i + j)
            .min();
        let eff = self.prec().effective_total();
        match lowest {
            Some(o) => match eff {
                Some(t) if o > t + 1 => Err(Error::InsufficientPrecision {
                    needed: o.saturating_sub(1),
                    have: t,
                }),
                _ => Ok(o),
            },
            None => match eff {
                Some(t) => Err(Error::InsufficientPrecision {
                    needed: t + 1,
                    have: t,
                }),
                None => Err(Error::Internal("order of the zero field".into())),
            },
        }
    }

    pub fn truncate(&self, prec: Prec) -> VectorField {
        VectorField {
            comp1: self.comp1.truncate(prec),
            comp2: self.comp2.truncate(prec),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        VectorField::new(self.comp1.add(&other.comp1)?, self.comp2.add(&other.comp2)?)
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            comp1: self.comp1.neg(),
            comp2: self.comp2.neg(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Result<VectorField> {
        Ok(VectorField {
            comp1: self.comp1.scale(c)?,
            comp2: self.comp2.scale(c)?,
        })
    }

    pub fn migrate(&self, to: &Tower) -> Result<VectorField> {
        Ok(VectorField {
            comp1: self.comp1.migrate(to)?,
            comp2: self.comp2.migrate(to)?,
        })
    }

    /// Apply the field as a derivation: `X(g) = A ∂g/∂v1 + B ∂g/∂v2`.
    ///
    /// The mechanical precision rule would lose one degree per application,
    /// but a coefficient of degree `m` of `X(g)` only involves `g` up to
    /// degree `m - ord(X) + 1`, so for fields of order ≥ 1 the certified
    /// region is `min(prec(X), prec(g) + ord(X) - 1)`; that sharper region is
    /// restored after the raw computation.
    pub fn apply_derivation(&self, g: &Jet2) -> Result<Jet2> {
        let ord = self.order()?;
        let target = match (self.prec().total, g.prec().total) {
            (Some(px), Some(pg)) => Some(px.min(pg + ord.saturating_sub(1))),
            (Some(px), None) => Some(px),
            (None, Some(pg)) => Some(pg + ord.saturating_sub(1)),
            (None, None) => None,
        };
        // Widening the partials to the target is sound: their unknown
        // coefficients beyond prec(g) - 1 would only pair with component
        // monomials of degree < ord(X), and there are none.
        let widen = |d: Jet2| -> Jet2 {
            let mut p = d.prec();
            p.total = target;
            d.assume_prec(p)
        };
        let d1 = widen(g.partial(0)?);
        let d2 = widen(g.partial(1)?);
        self.comp1.mul(&d1)?.add(&self.comp2.mul(&d2)?)
    }

    /// The 2x2 matrix of the linear part, row i = component i.
    pub fn linear_part(&self) -> Result<[[FieldElement; 2]; 2]> {
        Ok([
            [self.comp1.coeff(1, 0)?, self.comp1.coeff(0, 1)?],
            [self.comp2.coeff(1, 0)?, self.comp2.coeff(0, 1)?],
        ])
    }

    /// Swap the roles of the two variables (components and exponents).
    pub fn swap_vars(&self) -> VectorField {
        VectorField {
            comp1: self.comp2.swap_vars(),
            comp2: self.comp1.swap_vars(),
        }
    }
}

/// Provenance of a diffeomorphism: exact polynomial input, a plain jet, or a
/// blow-up transform of a parent (kept so fixed curves stay computable).
#[derive(Clone, Debug)]
pub enum DiffeoSource {
    Exact,
    Jet,
    BlowUp {
        parent: Box<Diffeo>,
        chart: Chart,
        center: FieldElement,
    },
}

/// A diffeomorphism germ fixing the origin, stored as a pair of jets.
#[derive(Clone, Debug)]
pub struct Diffeo {
    map1: Jet2,
    map2: Jet2,
    source: DiffeoSource,
}

/// Linear-part classification at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearClass {
    Identity,
    Unipotent,
    Other,
}

impl Diffeo {
    pub fn from_exact(map1: Jet2, map2: Jet2) -> Result<Diffeo> {
        if !map1.is_exact() || !map2.is_exact() {
            return Err(Error::ExactInputRequired);
        }
        Diffeo::from_parts(map1, map2, DiffeoSource::Exact)
    }

    pub fn from_jets(map1: Jet2, map2: Jet2) -> Result<Diffeo> {
        Diffeo::from_parts(map1, map2, DiffeoSource::Jet)
    }

    pub fn from_parts(map1: Jet2, map2: Jet2, source: DiffeoSource) -> Result<Diffeo> {
        if map1.vars() != map2.vars() {
            return Err(Error::Internal("map with mixed variables".into()));
        }
        if map1.coeff(0, 0).map(|c| !c.is_zero()).unwrap_or(false)
            || map2.coeff(0, 0).map(|c| !c.is_zero()).unwrap_or(false)
        {
            return Err(Error::Internal("map does not fix the origin".into()));
        }
        Ok(Diffeo { map1, map2, source })
    }

    pub fn map1(&self) -> &Jet2 {
        &self.map1
    }

    pub fn map2(&self) -> &Jet2 {
        &self.map2
    }

    pub fn source(&self) -> &DiffeoSource {
        &self.source
    }

    pub fn tower(&self) -> &Tower {
        self.map1.tower()
    }

    pub fn vars(&self) -> (&str, &str) {
        self.map1.vars()
    }

    pub fn prec(&self) -> Prec {
        self.map1.prec().meet(&self.map2.prec())
    }

    pub fn is_exact_polynomial(&self) -> bool {
        matches!(self.source, DiffeoSource::Exact)
    }

    /// `F - id` as a pair of jets (the displacement).
    pub fn displacement(&self) -> Result<VectorField> {
        let prec = self.prec();
        let v1 = Jet2::var1(self.tower(), self.vars(), prec);
        let v2 = Jet2::var2(self.tower(), self.vars(), prec);
        VectorField::new(self.map1.sub(&v1)?, self.map2.sub(&v2)?)
    }

    pub fn linear_class(&self) -> Result<LinearClass> {
        let a = self.map1.coeff(1, 0)?;
        let b = self.map1.coeff(0, 1)?;
        let c = self.map2.coeff(1, 0)?;
        let d = self.map2.coeff(0, 1)?;
        let one = FieldElement::one(self.tower());
        let is_id =
            a.eq_elem(&one)? && b.is_zero() && c.is_zero() && d.eq_elem(&one)?;
        if is_id {
            return Ok(LinearClass::Identity);
        }
        // unipotent: trace 2, determinant 1
        let tr = a.add(&d)?;
        let det = a.mul(&d)?.sub(&b.mul(&c)?)?;
        if tr.eq_elem(&FieldElement::from_integer(self.tower(), 2))? && det.is_one() {
            Ok(LinearClass::Unipotent)
        } else {
            Ok(LinearClass::Other)
        }
    }

    pub fn is_tangent_to_identity(&self) -> Result<bool> {
        Ok(self.linear_class()? == LinearClass::Identity)
    }

    /// The tangency order `k + 1` (order of `F - id`) of a tangent to the
    /// identity map.
    pub fn tti_order(&self) -> Result<u32> {
        if !self.is_tangent_to_identity()? {
            return Err(Error::NotTangentToIdentity);
        }
        self.displacement()?.order()
    }

    /// Composition `self ∘ other` (both must fix the origin).
    pub fn compose(&self, other: &Diffeo) -> Result<Diffeo> {
        let m1 = self.map1.substitute(&other.map1, &other.map2)?;
        let m2 = self.map2.substitute(&other.map1, &other.map2)?;
        Diffeo::from_parts(m1, m2, DiffeoSource::Jet)
    }

    pub fn migrate(&self, to: &Tower) -> Result<Diffeo> {
        let source = match &self.source {
            DiffeoSource::BlowUp {
                parent,
                chart,
                center,
            } => DiffeoSource::BlowUp {
                parent: Box::new(parent.migrate(to)?),
                chart: *chart,
                center: center.migrate(to)?,
            },
            s => s.clone(),
        };
        Diffeo::from_parts(self.map1.migrate(to)?, self.map2.migrate(to)?, source)
    }
}

/// Time-1 map of a vector field of order ≥ 2, as a jet of total degree
/// `order`: `exp X = (Σ Xⁿ(x)/n!, Σ Xⁿ(y)/n!)`. The sum is finite on jets
/// because every application of `X` raises the order.
pub fn exp(x: &VectorField, order: u32) -> Result<Diffeo> {
    if x.is_zero() {
        let prec = Prec::total(order);
        let v1 = Jet2::var1(x.tower(), x.vars(), prec);
        let v2 = Jet2::var2(x.tower(), x.vars(), prec);
        return Diffeo::from_parts(v1, v2, DiffeoSource::Jet);
    }
    let ord = x.order()?;
    if ord < 2 {
        return Err(Error::Internal("exp requires order >= 2".into()));
    }
    if let Some(t) = x.prec().total {
        if t < order {
            return Err(Error::InsufficientPrecision {
                needed: order,
                have: t,
            });
        }
    }
    let xt = x.truncate(Prec::total(order));
    let prec = Prec::total(order);
    let mut out: Vec<Jet2> = Vec::with_capacity(2);
    for axis in 0..2 {
        let var = if axis == 0 {
            Jet2::var1(x.tower(), x.vars(), prec)
        } else {
            Jet2::var2(x.tower(), x.vars(), prec)
        };
        let mut acc = var.clone();
        let mut term = var;
        let mut n: i64 = 1;
        loop {
            term = xt
                .apply_derivation(&term)?
                .scale(&FieldElement::from_ratio(x.tower(), 1, n))?;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
            n += 1;
            if n as u32 > order + 2 {
                break;
            }
        }
        out.push(acc);
    }
    let m2 = out.pop().expect("two components");
    let m1 = out.pop().expect("two components");
    Diffeo::from_parts(m1, m2, DiffeoSource::Jet)
}

/// Infinitesimal generator of a tangent to the identity map: the unique
/// formal field `X` of order ≥ 2 with `exp X = F`, computed to total degree
/// `order` by solving degree by degree. The lowest jet equals the lowest jet
/// of `F - id`.
pub fn log(f: &Diffeo, order: u32) -> Result<VectorField> {
    if !f.is_tangent_to_identity()? {
        return Err(Error::NotTangentToIdentity);
    }
    let disp = f.displacement()?;
    if disp.is_zero() {
        let z = Jet2::zero(f.tower(), f.vars(), Prec::total(order));
        return VectorField::new(z.clone(), z);
    }
    if let Some(t) = f.prec().total {
        if t < order {
            return Err(Error::InsufficientPrecision {
                needed: order,
                have: t,
            });
        }
    }
    let k1 = disp.order()?;
    // Work with exact polynomial approximants; each step adds the degree-m
    // homogeneous correction F_m - [exp(X^(m-1))]_m.
    let mut x1 = disp.comp1().homogeneous_part(k1)?;
    let mut x2 = disp.comp2().homogeneous_part(k1)?;
    for m in (k1 + 1)..=order {
        let xm = VectorField::new(x1.clone(), x2.clone())?;
        let g = exp(&xm, m)?;
        let d1 = f.map1.truncate(Prec::total(m)).sub(&g.map1)?;
        let d2 = f.map2.truncate(Prec::total(m)).sub(&g.map2)?;
        if let Ok(o) = VectorField::new(d1.clone(), d2.clone())?.order() {
            if o < m {
                return Err(Error::Internal(format!(
                    "log solver discrepancy at degree {o} < {m}"
                )));
            }
        }
        x1 = x1.add(&d1.homogeneous_part(m)?)?;
        x2 = x2.add(&d2.homogeneous_part(m)?)?;
    }
    let prec = Prec::total(order);
    VectorField::new(x1.truncate(prec).assume_prec(prec), x2.truncate(prec).assume_prec(prec))
}

/// One characteristic direction of a map, with multiplicity, degeneracy flag
/// and the root-class bookkeeping (tower extension, conjugate count).
#[derive(Clone, Debug)]
pub struct CharDirection {
    pub class: RootClass,
    pub degenerate: bool,
}

/// The direction form `x q_{k+1}(x,y) - y p_{k+1}(x,y)` whose zeros are the
/// characteristic directions; errors with `DicriticalMap` when it vanishes.
pub fn direction_form(f: &Diffeo) -> Result<Jet2> {
    let k1 = f.tti_order()?;
    let disp = f.displacement()?;
    let p = disp.comp1().homogeneous_part(k1)?;
    let q = disp.comp2().homogeneous_part(k1)?;
    let h = q.mul_monomial(1, 0).sub(&p.mul_monomial(0, 1))?;
    if h.is_zero() {
        return Err(Error::DicriticalMap);
    }
    Ok(h)
}

/// Characteristic directions as one representative per squarefree factor,
/// with degeneracy decided by evaluating `F_{k+1}` at the representative.
pub fn characteristic_classes(f: &Diffeo) -> Result<Vec<CharDirection>> {
    let k1 = f.tti_order()?;
    let h = direction_form(f)?;
    let disp = f.displacement()?;
    let p = disp.comp1().homogeneous_part(k1)?;
    let q = disp.comp2().homogeneous_part(k1)?;
    let classes = roots::root_representatives(&h, "r")?;
    let mut out = Vec::with_capacity(classes.len());
    for class in classes {
        let pt = class.point()?;
        let pt = pt.migrate(&class.tower)?;
        let pe = eval_homogeneous(&p.migrate(&class.tower)?, pt.first(), pt.second())?;
        let qe = eval_homogeneous(&q.migrate(&class.tower)?, pt.first(), pt.second())?;
        out.push(CharDirection {
            degenerate: pe.is_zero() && qe.is_zero(),
            class,
        });
    }
    Ok(out)
}

/// Complete list of characteristic directions (all conjugate roots split),
/// sorted canonically; `(point, multiplicity, degenerate)` per the zeros of
/// the direction form.
pub fn characteristic_directions(
    f: &Diffeo,
) -> Result<(Tower, Vec<(ProjPoint, usize, bool)>)> {
    let k1 = f.tti_order()?;
    let h = direction_form(f)?;
    let (tower, pts) = roots::root_decompose(&h)?;
    let disp = f.displacement()?;
    let p = disp.comp1().homogeneous_part(k1)?.migrate(&tower)?;
    let q = disp.comp2().homogeneous_part(k1)?.migrate(&tower)?;
    let mut out = Vec::with_capacity(pts.len());
    for (pt, m) in pts {
        let pt = pt.migrate(&tower)?;
        let pe = eval_homogeneous(&p, pt.first(), pt.second())?;
        let qe = eval_homogeneous(&q, pt.first(), pt.second())?;
        out.push((pt, m, pe.is_zero() && qe.is_zero()));
    }
    Ok((tower, out))
}

/// Evaluate a (homogeneous) jet at a point of the coefficient field.
pub fn eval_homogeneous(h: &Jet2, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    let mut acc = FieldElement::zero(a.tower());
    for (&(i, j), c) in h.terms() {
        let c = c.migrate(a.tower())?;
        let term = c.mul(&a.pow(i)?)?.mul(&b.pow(j)?)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// The fixed locus of a diffeomorphism as an exact polynomial with the
/// tangent directions of its through-origin part.
#[derive(Clone, Debug)]
pub struct FixedLocus {
    /// Defining polynomial of the union of fixed curves (constant 1 when the
    /// fixed point is isolated as a curve germ).
    pub gcd: Jet2,
    /// True when some fixed curve passes through the origin.
    pub through_origin: bool,
    /// Tangent-cone directions of the through-origin part, with
    /// multiplicities; in the tower extension where they split.
    pub tangent_directions: Vec<(ProjPoint, usize)>,
    pub tower: Tower,
}

/// Fixed curves of `F`: the gcd of the components of `F - id` for exact
/// polynomial maps; for blow-up transforms, the strict transform of the
/// parent locus together with the exceptional divisor when it is pointwise
/// fixed. Demands exact provenance — the gcd of a truncation proves nothing.
pub fn fixed_curves(f: &Diffeo) -> Result<FixedLocus> {
    let g = fixed_locus_polynomial(f)?;
    locus_from_polynomial(f.tower(), g)
}

fn locus_from_polynomial(tower: &Tower, g: Jet2) -> Result<FixedLocus> {
    if g.is_zero() {
        return Err(Error::Internal("identity map has no isolated fixed locus".into()));
    }
    let through_origin = g.coeff(0, 0)?.is_zero();
    let mut tangent_directions = Vec::new();
    let mut out_tower = tower.clone();
    if through_origin {
        let cone = g.homogeneous_part(g.order()?)?;
        let (tw, dirs) = roots::root_decompose(&cone)?;
        out_tower = tw;
        tangent_directions = dirs;
    }
    Ok(FixedLocus {
        gcd: g,
        through_origin,
        tangent_directions,
        tower: out_tower,
    })
}

/// The defining polynomial of the fixed locus (exact).
pub fn fixed_locus_polynomial(f: &Diffeo) -> Result<Jet2> {
    match &f.source {
        DiffeoSource::Exact => {
            let disp = f.displacement()?;
            if disp.is_zero() {
                return Ok(Jet2::zero(f.tower(), f.vars(), Prec::EXACT));
            }
            // The fixed-point set is cut out by the reduced gcd.
            let g = if disp.comp1().is_zero() {
                disp.comp2().clone()
            } else if disp.comp2().is_zero() {
                disp.comp1().clone()
            } else {
                bipoly::bi_gcd(disp.comp1(), disp.comp2())?
            };
            bipoly::bi_squarefree_part(&g)
        }
        DiffeoSource::Jet => Err(Error::ExactInputRequired),
        DiffeoSource::BlowUp {
            parent,
            chart,
            center,
        } => {
            let parent_g = fixed_locus_polynomial(parent)?;
            let tower = f.tower();
            let vars = f.vars();
            // Strict transform of the parent locus through this chart point.
            let strict = if parent_g.is_constant_unit() {
                Jet2::constant(FieldElement::one(tower), vars, Prec::EXACT)
            } else {
                let m = parent_g.order()?;
                let v1 = Jet2::var1(tower, vars, Prec::EXACT);
                let v2 = Jet2::var2(tower, vars, Prec::EXACT);
                let (sx, sy) = match chart {
                    // (x, y) = (x, t x): chart coords (x, t)
                    Chart::T => (v1.clone(), v1.mul(&v2)?),
                    // (x, y) = (s y, y): chart coords arranged as (y, s)
                    Chart::S => (v1.mul(&v2)?, v1.clone()),
                };
                let pulled = parent_g.migrate(tower)?.substitute(&sx, &sy)?;
                let st = pulled.div_var1_power(m)?;
                st.translate_var2(center)?
            };
            // The exceptional divisor is a fixed curve iff it is pointwise
            // fixed: the induced map on v1 = 0 must be the identity.
            let on_divisor = f.map2.restrict_var1_zero();
            let ident = divisor_series_is_identity(&on_divisor, tower)?;
            if ident {
                let v1 = Jet2::var1(tower, vars, Prec::EXACT);
                bipoly::normalize_jet(&strict.mul(&v1)?)
            } else {
                bipoly::normalize_jet(&strict)
            }
        }
    }
}

fn divisor_series_is_identity(
    s: &crate::algebra::residue::USeries,
    tower: &Tower,
) -> Result<bool> {
    // identity means coefficient 1 at degree 1 and 0 elsewhere (up to the
    // certified degree, which the blow-up theory turns into an exact claim
    // for tangent-to-identity parents)
    let top = s.prec().unwrap_or(s.poly().degree().unwrap_or(0) as u32);
    for i in 0..=top {
        let c = s.poly().coeff(i as usize);
        let want_one = i == 1;
        if want_one && !c.is_one() {
            return Ok(false);
        }
        if !want_one && !c.is_zero() {
            return Ok(false);
        }
    }
    let _ = tower;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw() -> Tower {
        Tower::rationals()
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_integer(&tw(), n)
    }

    fn xy_exact(t: &Tower) -> (Jet2, Jet2) {
        (
            Jet2::var1(t, ("x", "y"), Prec::EXACT),
            Jet2::var2(t, ("x", "y"), Prec::EXACT),
        )
    }

    /// F = (x + x^2, y)
    fn f_parabolic(t: &Tower) -> Diffeo {
        let (x, y) = xy_exact(t);
        Diffeo::from_exact(x.add(&x.mul(&x).unwrap()).unwrap(), y).unwrap()
    }

    #[test]
    fn order_of_vector_field() {
        let t = tw();
        let (x, _) = xy_exact(&t);
        let vf = VectorField::new(x.mul(&x).unwrap(), Jet2::zero(&t, ("x", "y"), Prec::EXACT))
            .unwrap();
        assert_eq!(vf.order().unwrap(), 2);
    }

    #[test]
    fn order_of_displacement() {
        let t = tw();
        let f = f_parabolic(&t);
        assert_eq!(f.tti_order().unwrap(), 2);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let t = tw();
        let z = Jet2::zero(&t, ("x", "y"), Prec::EXACT);
        let vf = VectorField::new(z.clone(), z).unwrap();
        let f = exp(&vf, 5).unwrap();
        let d = f.displacement().unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn exp_x2_dx() {
        // X = x^2 ∂x, N = 3: flow of ẋ = x^2 is x/(1-x) = x + x^2 + x^3 + ...
        let t = tw();
        let (x, _) = xy_exact(&t);
        let vf = VectorField::new(
            x.mul(&x).unwrap(),
            Jet2::zero(&t, ("x", "y"), Prec::EXACT),
        )
        .unwrap();
        let f = exp(&vf, 3).unwrap();
        assert_eq!(f.map1().coeff(1, 0).unwrap().to_string(), "1");
        assert_eq!(f.map1().coeff(2, 0).unwrap().to_string(), "1");
        assert_eq!(f.map1().coeff(3, 0).unwrap().to_string(), "1");
        let d2 = f.map2().sub(&Jet2::var2(&t, ("x", "y"), Prec::total(3))).unwrap();
        assert!(d2.is_zero());
    }

    #[test]
    fn exp_xy_dx() {
        // X = x y ∂x, N = 3: flow is (x e^y, y) = (x + xy + xy^2/2, y)
        let t = tw();
        let (x, y) = xy_exact(&t);
        let vf = VectorField::new(x.mul(&y).unwrap(), Jet2::zero(&t, ("x", "y"), Prec::EXACT))
            .unwrap();
        let f = exp(&vf, 3).unwrap();
        assert_eq!(f.map1().coeff(1, 1).unwrap().to_string(), "1");
        assert_eq!(f.map1().coeff(1, 2).unwrap().to_string(), "1/2");
    }

    #[test]
    fn log_of_identity_is_zero() {
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(x, y).unwrap();
        let vf = log(&f, 6).unwrap();
        assert!(vf.is_zero());
    }

    #[test]
    fn log_of_x_plus_x2() {
        // log(x + x^2, y) = (x^2 - x^3 + 3/2 x^4 - ...) ∂x
        let t = tw();
        let f = f_parabolic(&t);
        let vf = log(&f, 4).unwrap();
        assert_eq!(vf.comp1().coeff(2, 0).unwrap().to_string(), "1");
        assert_eq!(vf.comp1().coeff(3, 0).unwrap().to_string(), "-1");
        assert_eq!(vf.comp1().coeff(4, 0).unwrap().to_string(), "3/2");
        assert!(vf.comp2().is_zero());
        // oracle: exp of the answer reproduces F to degree 4
        let back = exp(&vf, 4).unwrap();
        let d = back
            .map1()
            .sub(&f.map1().truncate(Prec::total(4)))
            .unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn lowest_jet_of_log_is_displacement() {
        // for (x + y^2 + ..., y + x^2): jet of order 2 of log equals F - id at order 2
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(
            x.add(&y.mul(&y).unwrap()).unwrap(),
            y.add(&x.mul(&x).unwrap()).unwrap(),
        )
        .unwrap();
        let vf = log(&f, 5).unwrap();
        let d = f.displacement().unwrap();
        let l1 = vf.comp1().homogeneous_part(2).unwrap();
        let l2 = d.comp1().homogeneous_part(2).unwrap();
        assert!(l1.sub(&l2).unwrap().is_zero());
    }

    #[test]
    fn characteristic_directions_of_hakim_example() {
        // F = (x + x^2, y + y^2): zeros of xy^2 - yx^2 = xy(y - x):
        // [1:0], [0:1], [1:1], all non-degenerate
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(
            x.add(&x.mul(&x).unwrap()).unwrap(),
            y.add(&y.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        let (_, dirs) = characteristic_directions(&f).unwrap();
        let texts: Vec<String> = dirs
            .iter()
            .map(|(p, m, d)| format!("{p}x{m}{}", if *d { "deg" } else { "" }))
            .collect();
        assert_eq!(texts, ["[0:1]x1", "[1:0]x1", "[1:1]x1"]);
    }

    #[test]
    fn degenerate_direction_flagged() {
        // F = (x, y + x^2): zeros of x^3: [0:1] x 3, degenerate
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(x.clone(), y.add(&x.mul(&x).unwrap()).unwrap()).unwrap();
        let (_, dirs) = characteristic_directions(&f).unwrap();
        assert_eq!(dirs.len(), 1);
        let (p, m, deg) = &dirs[0];
        assert_eq!(p.to_string(), "[0:1]");
        assert_eq!(*m, 3);
        assert!(deg);
    }

    #[test]
    fn dicritical_map_detected() {
        // F = exp of the radial-ish x(x∂x + y∂y)? Use F_{2} = (x^2, xy):
        // h = x·xy - y·x^2 = 0
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(
            x.add(&x.mul(&x).unwrap()).unwrap(),
            y.add(&x.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            characteristic_directions(&f),
            Err(Error::DicriticalMap)
        ));
    }

    #[test]
    fn fixed_curve_of_y_translation() {
        // F = (x + y^2, y + y^2): gcd = y, fixed curve y = 0 tangent to [1:0]
        let t = tw();
        let (x, y) = xy_exact(&t);
        let y2 = y.mul(&y).unwrap();
        let f = Diffeo::from_exact(x.add(&y2).unwrap(), y.add(&y2).unwrap()).unwrap();
        let locus = fixed_curves(&f).unwrap();
        assert_eq!(locus.gcd.to_string(), "y");
        assert!(locus.through_origin);
        assert_eq!(locus.tangent_directions.len(), 1);
        assert_eq!(locus.tangent_directions[0].0.to_string(), "[1:0]");
    }

    #[test]
    fn isolated_fixed_point_unit_gcd() {
        // F = (x + y + x^2, y - y^2) has gcd(F - id) a unit
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(
            x.add(&y).unwrap().add(&x.mul(&x).unwrap()).unwrap(),
            y.sub(&y.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        let locus = fixed_curves(&f).unwrap();
        assert!(!locus.through_origin);
        assert!(locus.gcd.is_constant_unit());
    }

    #[test]
    fn fixed_curve_x_equals_zero() {
        // F = (x(1+x), y(1+x)): F - id = (x^2, xy), gcd = x; F(0,y) = (0,y)
        let t = tw();
        let (x, y) = xy_exact(&t);
        let f = Diffeo::from_exact(
            x.add(&x.mul(&x).unwrap()).unwrap(),
            y.add(&x.mul(&y).unwrap()).unwrap(),
        )
        .unwrap();
        let locus = fixed_curves(&f).unwrap();
        assert_eq!(locus.gcd.to_string(), "x");
        assert_eq!(locus.tangent_directions[0].0.to_string(), "[0:1]");
    }

    #[test]
    fn exp_log_roundtrip_small() {
        let t = tw();
        let (x, y) = xy_exact(&t);
        // X = (x^2 - y^2)∂x + xy∂y
        let vf = VectorField::new(
            x.mul(&x).unwrap().sub(&y.mul(&y).unwrap()).unwrap(),
            x.mul(&y).unwrap(),
        )
        .unwrap();
        let n = 7;
        let f = exp(&vf, n).unwrap();
        let back = log(&f, n).unwrap();
        let d1 = back.comp1().sub(&vf.comp1().truncate(Prec::total(n))).unwrap();
        let d2 = back.comp2().sub(&vf.comp2().truncate(Prec::total(n))).unwrap();
        assert!(d1.is_zero() && d2.is_zero());
    }

    #[test]
    fn exp_homomorphism_on_double() {
        // exp(X) ∘ exp(X) = exp(2X) to degree N
        let t = tw();
        let (x, y) = xy_exact(&t);
        let vf = VectorField::new(x.mul(&y).unwrap(), y.mul(&y).unwrap()).unwrap();
        let n = 6;
        let f = exp(&vf, n).unwrap();
        let ff = f.compose(&f).unwrap();
        let g = exp(&vf.scale(&fe(2)).unwrap(), n).unwrap();
        assert!(ff.map1().sub(g.map1()).unwrap().is_zero());
        assert!(ff.map2().sub(g.map2()).unwrap().is_zero());
    }
}
