//! Projective points and complete root decomposition of homogeneous binary
//! forms over a tower, adjoining algebraic generators as needed.
//!
//! The dictionary used everywhere: a root `t0` of the dehomogenized form
//! `h(1, t)` is the projective direction `[1 : t0]`, the missing degree
//! (`x`-factor of `h`) is the direction `[0 : 1]`, and points normalize to
//! `[a : 1]` or `[1 : 0]`.

use std::fmt;

use crate::algebra::jet::Jet2;
use crate::algebra::tower::{FieldElement, Tower};
use crate::algebra::upoly::UniPoly;
use crate::error::{Error, Result};

/// A point of the projective line, stored normalized: `[a:1]` or `[1:0]`.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    a: FieldElement,
    b: FieldElement,
}

impl ProjPoint {
    /// Normalize a homogeneous pair; errors on `[0:0]`. Inverting the second
    /// coordinate can split a reducible algebraic level.
    pub fn from_homogeneous(a: FieldElement, b: FieldElement) -> Result<ProjPoint> {
        if b.is_zero() {
            if a.is_zero() {
                return Err(Error::Internal("projective point [0:0]".into()));
            }
            let tower = a.tower().clone();
            return Ok(ProjPoint {
                a: FieldElement::one(&tower),
                b: FieldElement::zero(&tower),
            });
        }
        let a = a.div(&b)?;
        let one = FieldElement::one(a.tower());
        Ok(ProjPoint { a, b: one })
    }

    /// The direction `[1 : t0]` seen in the chart `y = t x`.
    pub fn from_chart_t(t0: &FieldElement) -> Result<ProjPoint> {
        ProjPoint::from_homogeneous(FieldElement::one(t0.tower()), t0.clone())
    }

    /// The direction `[0 : 1]` (origin of the chart `x = s y`).
    pub fn chart_s_origin(tower: &Tower) -> ProjPoint {
        ProjPoint {
            a: FieldElement::zero(tower),
            b: FieldElement::one(tower),
        }
    }

    /// The point `[a : 1]`.
    pub fn affine(a: FieldElement) -> ProjPoint {
        let one = FieldElement::one(a.tower());
        ProjPoint { a, b: one }
    }

    pub fn first(&self) -> &FieldElement {
        &self.a
    }

    pub fn second(&self) -> &FieldElement {
        &self.b
    }

    /// Value of `t = b/a` in the chart `y = t x`; `None` for `[0:1]`.
    pub fn chart_t_value(&self) -> Result<Option<FieldElement>> {
        if self.a.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.b.div(&self.a)?))
    }

    /// Projective equality: `a1 b2 - a2 b1 = 0`.
    pub fn eq_point(&self, other: &ProjPoint) -> Result<bool> {
        let lhs = self.a.mul(&other.b)?;
        let rhs = other.a.mul(&self.b)?;
        Ok(lhs.sub(&rhs)?.is_zero())
    }

    pub fn migrate(&self, to: &Tower) -> Result<ProjPoint> {
        Ok(ProjPoint {
            a: self.a.migrate(to)?,
            b: self.b.migrate(to)?,
        })
    }

    pub fn tower(&self) -> &Tower {
        self.a.tower()
    }

    /// Canonical text `[a:b]` of the normalized form.
    pub fn canonical_text(&self) -> String {
        format!("[{}:{}]", self.a, self.b)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

/// One root-class of a binary form. `chart_value` is `Some(t0)` for the
/// direction `[1:t0]` (chart `y = t x`) and `None` for `[0:1]` (chart
/// `x = s y`, at `s = 0`). A class found by adjoining a generator stands for
/// `conjugates` actual roots sharing one analysis.
#[derive(Clone, Debug)]
pub struct RootClass {
    pub chart_value: Option<FieldElement>,
    pub multiplicity: usize,
    pub tower: Tower,
    pub conjugates: usize,
    pub defining_degree: usize,
    /// The monic squarefree factor of `h(1,t)` this class came from; `None`
    /// for `[0:1]`.
    pub factor: Option<UniPoly>,
}

impl RootClass {
    pub fn point(&self) -> Result<ProjPoint> {
        match &self.chart_value {
            Some(t0) => ProjPoint::from_chart_t(t0),
            None => Ok(ProjPoint::chart_s_origin(&self.tower)),
        }
    }
}

/// Dehomogenize a nonzero homogeneous exact jet `h(x, y)` of degree `d` into
/// `(d, p)` with `p(t) = h(1, t)`.
pub fn dehomogenize(h: &Jet2) -> Result<(usize, UniPoly)> {
    if h.is_zero() {
        return Err(Error::Internal("root decomposition of zero form".into()));
    }
    let d = h.order()?;
    let tower = h.tower().clone();
    let mut coeffs = vec![FieldElement::zero(&tower); d as usize + 1];
    for (&(i, j), c) in h.terms() {
        if i + j != d {
            return Err(Error::Internal("form is not homogeneous".into()));
        }
        coeffs[j as usize] = c.clone();
    }
    Ok((d as usize, UniPoly::from_coeffs(&tower, "t", coeffs)))
}

/// Rational roots of a polynomial whose coefficients all lie in the base
/// rationals, found with the rational-root theorem over a bounded divisor
/// search. Missing a root here is harmless: it only means a larger algebraic
/// extension later.
pub fn base_rational_roots(q: &UniPoly) -> Result<Vec<FieldElement>> {
    use num_bigint::BigInt;
    use num_traits::{Signed, ToPrimitive, Zero};
    let tower = q.tower().clone();
    let Some(deg) = q.degree() else {
        return Ok(vec![]);
    };
    if deg == 0 {
        return Ok(vec![]);
    }
    let mut rats = Vec::with_capacity(deg + 1);
    for c in q.coeffs() {
        match c.as_rational() {
            Some(r) => rats.push(r.clone()),
            None => return Ok(vec![]),
        }
    }
    // Clear denominators to integer coefficients.
    let mut lcm = BigInt::from(1);
    for r in &rats {
        lcm = num_integer::lcm(lcm, r.denom().clone());
    }
    let ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r * num_rational::BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    fn bounded_divisors(n: &BigInt) -> Vec<BigInt> {
        let n = n.abs();
        if n.is_zero() {
            return vec![];
        }
        let mut out = vec![BigInt::from(1), n.clone()];
        if let Some(small) = n.to_u64() {
            let mut d = 2u64;
            while d * d <= small && d < 100_000 {
                if small % d == 0 {
                    out.push(BigInt::from(d));
                    out.push(BigInt::from(small / d));
                }
                d += 1;
            }
        }
        out.sort();
        out.dedup();
        out
    }
    let mut cur = ints;
    let mut roots = Vec::new();
    'outer: loop {
        if cur.len() <= 1 {
            break;
        }
        let a0 = &cur[0];
        let an = cur.last().expect("nonzero");
        if a0.is_zero() {
            // root 0; divide by t
            roots.push(FieldElement::zero(&tower));
            cur.remove(0);
            continue;
        }
        for p in bounded_divisors(a0) {
            for qd in bounded_divisors(an) {
                for sign in [1i64, -1] {
                    let cand = num_rational::BigRational::new(&p * BigInt::from(sign), qd.clone());
                    // evaluate by Horner
                    let mut acc = num_rational::BigRational::zero();
                    for c in cur.iter().rev() {
                        acc = acc * &cand + num_rational::BigRational::from_integer(c.clone());
                    }
                    if acc.is_zero() {
                        roots.push(FieldElement::from_rational(&tower, cand.clone()));
                        // synthetic division by (t - cand)
                        let mut new_coeffs: Vec<num_rational::BigRational> =
                            vec![num_rational::BigRational::zero(); cur.len() - 1];
                        let mut carry = num_rational::BigRational::zero();
                        for i in (1..cur.len()).rev() {
                            carry = num_rational::BigRational::from_integer(cur[i].clone())
                                + &carry * &cand;
                            new_coeffs[i - 1] = carry.clone();
                        }
                        // re-clear denominators
                        let mut l = BigInt::from(1);
                        for r in &new_coeffs {
                            l = num_integer::lcm(l, r.denom().clone());
                        }
                        cur = new_coeffs
                            .iter()
                            .map(|r| {
                                (r * num_rational::BigRational::from_integer(l.clone()))
                                    .to_integer()
                            })
                            .collect();
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    Ok(roots)
}

/// Split a monic squarefree polynomial completely, extending the tower once
/// per remaining factor of degree ≥ 2. Returns the final tower and all roots
/// in it. Base-rational roots are split off first.
pub fn split_completely(q: &UniPoly, root_prefix: &str) -> Result<(Tower, Vec<FieldElement>)> {
    let mut tower = q.tower().clone();
    let mut cur = q.make_monic()?;
    let mut roots: Vec<FieldElement> = Vec::new();
    for r in base_rational_roots(&cur)? {
        let linear = UniPoly::from_coeffs(
            &tower,
            cur.var(),
            vec![r.neg(), FieldElement::one(&tower)],
        );
        cur = cur.div_exact(&linear)?;
        roots.push(r);
    }
    loop {
        match cur.degree() {
            None | Some(0) => break,
            Some(1) => {
                let r = cur.coeff(0).neg().div(&cur.coeff(1))?;
                roots.push(r);
                break;
            }
            Some(_) => {
                let name = tower.fresh_name(root_prefix);
                let ext = tower.adjoin_algebraic(&name, cur.coeffs())?;
                let alpha = FieldElement::generator(&ext, &name)?;
                roots = roots
                    .iter()
                    .map(|r| r.migrate(&ext))
                    .collect::<Result<Vec<_>>>()?;
                roots.push(alpha.clone());
                let cur_ext = cur.migrate(&ext)?;
                let linear = UniPoly::from_coeffs(
                    &ext,
                    cur.var(),
                    vec![alpha.neg(), FieldElement::one(&ext)],
                );
                cur = cur_ext.div_exact(&linear)?;
                tower = ext;
            }
        }
    }
    Ok((tower, roots))
}

/// Complete linear-factor decomposition of a nonzero homogeneous form over
/// the tower: every root is produced, adjoining generators for factors of
/// degree ≥ 2. All points are returned in one common extended tower, sorted
/// by canonical text.
pub fn root_decompose(h: &Jet2) -> Result<(Tower, Vec<(ProjPoint, usize)>)> {
    let (d, p) = dehomogenize(h)?;
    let mut tower = h.tower().clone();
    let mut out: Vec<(ProjPoint, usize)> = Vec::new();
    let deg_p = p.degree().unwrap_or(0);
    if deg_p < d {
        // h has an x^k factor: direction [0:1].
        out.push((ProjPoint::chart_s_origin(&tower), d - deg_p));
    }
    if p.is_zero() || p.is_constant() {
        return Ok((tower, out));
    }
    let val = p.valuation().unwrap_or(0);
    if val > 0 {
        // Root t = 0: direction [1:0].
        let zero = FieldElement::zero(&tower);
        out.push((ProjPoint::from_chart_t(&zero)?, val));
    }
    let shifted = UniPoly::from_coeffs(&tower, "t", p.coeffs()[val..].to_vec());
    for (q, e) in shifted.squarefree_decomposition()? {
        let (ext, roots) = split_completely(&q, "r")?;
        if ext.level_count() > tower.level_count() {
            for (pt, _) in out.iter_mut() {
                *pt = pt.migrate(&ext)?;
            }
            tower = ext;
        }
        for r in roots {
            out.push((ProjPoint::from_chart_t(&r.migrate(&tower)?)?, e));
        }
    }
    out.sort_by_key(|(pt, _)| pt.canonical_text());
    Ok((tower, out))
}

/// Root classes of an arbitrary univariate polynomial over the tower: one
/// representative per irreducible-for-now chunk, with base-rational roots
/// split off, extensions adjoined for the rest.
pub fn upoly_root_classes(p: &UniPoly, root_prefix: &str) -> Result<Vec<RootClass>> {
    let tower = p.tower().clone();
    let mut out: Vec<RootClass> = Vec::new();
    if p.is_zero() || p.is_constant() {
        return Ok(out);
    }
    let val = p.valuation().unwrap_or(0);
    if val > 0 {
        out.push(RootClass {
            chart_value: Some(FieldElement::zero(&tower)),
            multiplicity: val,
            tower: tower.clone(),
            conjugates: 1,
            defining_degree: 1,
            factor: Some(UniPoly::from_coeffs(
                &tower,
                p.var(),
                vec![FieldElement::zero(&tower), FieldElement::one(&tower)],
            )),
        });
    }
    let shifted = UniPoly::from_coeffs(&tower, p.var(), p.coeffs()[val..].to_vec());
    for (q, e) in shifted.squarefree_decomposition()? {
        let mut q = q.make_monic()?;
        for r in base_rational_roots(&q)? {
            let linear = UniPoly::from_coeffs(
                &tower,
                q.var(),
                vec![r.neg(), FieldElement::one(&tower)],
            );
            q = q.div_exact(&linear)?;
            out.push(RootClass {
                chart_value: Some(r),
                multiplicity: e,
                tower: tower.clone(),
                conjugates: 1,
                defining_degree: 1,
                factor: Some(linear),
            });
        }
        let Some(deg) = q.degree() else { continue };
        if deg == 0 {
            continue;
        }
        if deg == 1 {
            let r = q.coeff(0).neg().div(&q.coeff(1))?;
            out.push(RootClass {
                chart_value: Some(r),
                multiplicity: e,
                tower: tower.clone(),
                conjugates: 1,
                defining_degree: 1,
                factor: Some(q),
            });
        } else {
            let name = tower.fresh_name(root_prefix);
            let ext = tower.adjoin_algebraic(&name, q.coeffs())?;
            let alpha = FieldElement::generator(&ext, &name)?;
            out.push(RootClass {
                chart_value: Some(alpha),
                multiplicity: e,
                tower: ext,
                conjugates: deg,
                defining_degree: deg,
                factor: Some(q),
            });
        }
    }
    Ok(out)
}

/// One representative root per squarefree factor (D5 style): conjugate roots
/// share the analysis, so callers track `conjugates` instead of splitting the
/// factor completely.
pub fn root_representatives(h: &Jet2, root_prefix: &str) -> Result<Vec<RootClass>> {
    let (d, p) = dehomogenize(h)?;
    let tower = h.tower().clone();
    let mut out: Vec<RootClass> = Vec::new();
    let deg_p = p.degree().unwrap_or(0);
    if deg_p < d {
        out.push(RootClass {
            chart_value: None,
            multiplicity: d - deg_p,
            tower: tower.clone(),
            conjugates: 1,
            defining_degree: 1,
            factor: None,
        });
    }
    out.extend(upoly_root_classes(&p, root_prefix)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::jet::Prec;

    fn tw() -> Tower {
        Tower::rationals()
    }

    #[test]
    fn example_form_with_parameter() {
        // h = -2xt(x + ct) over Q(c): directions [0:1], [1:0], [-c:1]
        let t = tw().adjoin_transcendental("c").unwrap();
        let c = FieldElement::generator(&t, "c").unwrap();
        let x = Jet2::var1(&t, ("x", "t"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "t"), Prec::EXACT);
        let m2 = FieldElement::from_integer(&t, -2);
        let h = x
            .mul(&y)
            .unwrap()
            .mul(&x.add(&y.scale(&c).unwrap()).unwrap())
            .unwrap()
            .scale(&m2)
            .unwrap();
        let (tower, roots) = root_decompose(&h).unwrap();
        assert_eq!(tower.level_count(), 1, "no extension needed");
        let texts: Vec<String> = roots.iter().map(|(p, m)| format!("{p}x{m}")).collect();
        assert_eq!(texts, ["[-c:1]x1", "[0:1]x1", "[1:0]x1"]);
    }

    #[test]
    fn multiplicities() {
        // h = x^2 y: p(t) = t, degree drop 2 -> [0:1] x 2, root 0 -> [1:0] x 1
        let t = tw();
        let x = Jet2::var1(&t, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "y"), Prec::EXACT);
        let h = x.mul(&x).unwrap().mul(&y).unwrap();
        let (_, roots) = root_decompose(&h).unwrap();
        let texts: Vec<String> = roots.iter().map(|(p, m)| format!("{p}x{m}")).collect();
        assert_eq!(texts, ["[0:1]x2", "[1:0]x1"]);
    }

    #[test]
    fn extension_for_irreducible_factor() {
        // h = x^2 + y^2: adjoin i; the two roots [1:±i] = [∓i:1].
        let t = tw();
        let x = Jet2::var1(&t, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "y"), Prec::EXACT);
        let h = x.mul(&x).unwrap().add(&y.mul(&y).unwrap()).unwrap();
        let (tower, roots) = root_decompose(&h).unwrap();
        assert_eq!(tower.level_count(), 1);
        assert_eq!(roots.len(), 2);
        for (p, m) in &roots {
            assert_eq!(*m, 1);
            // normalized [a:1] with a = 1/t0 and t0^2 = -1, so a^2 = -1 too
            let a = p.first();
            let v = a.mul(a).unwrap().add(&FieldElement::one(&tower)).unwrap();
            assert!(v.is_zero());
        }
        assert!(!roots[0].0.eq_point(&roots[1].0).unwrap());
    }

    #[test]
    fn factors_multiply_back() {
        // (y - x)(y - 2x)(y + 3x): roots t = 1, 2, -3 as [1:t]
        let t = tw();
        let x = Jet2::var1(&t, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "y"), Prec::EXACT);
        let f1 = y.sub(&x).unwrap();
        let f2 = y
            .sub(&x.scale(&FieldElement::from_integer(&t, 2)).unwrap())
            .unwrap();
        let f3 = y
            .add(&x.scale(&FieldElement::from_integer(&t, 3)).unwrap())
            .unwrap();
        let h = f1.mul(&f2).unwrap().mul(&f3).unwrap();
        let (tower, roots) = root_decompose(&h).unwrap();
        assert_eq!(roots.len(), 3);
        let total: usize = roots.iter().map(|(_, m)| m).sum();
        assert_eq!(total, 3);
        let (_, p) = dehomogenize(&h).unwrap();
        for (pt, _) in &roots {
            // [a:1] corresponds to root t0 = 1/a of p
            let t0 = pt.chart_t_value().unwrap().unwrap();
            assert!(p
                .migrate(&tower)
                .unwrap()
                .eval(&t0.migrate(&tower).unwrap())
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn representatives_group_conjugates() {
        // h = x^3 + x y^2 ... wait use p(t) = (t^2+1)(t-1): conjugate pair + rational
        let t = tw();
        let x = Jet2::var1(&t, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "y"), Prec::EXACT);
        // h = (y^2 + x^2)(y - x): p(t) = (t^2+1)(t-1)
        let h = y
            .mul(&y)
            .unwrap()
            .add(&x.mul(&x).unwrap())
            .unwrap()
            .mul(&y.sub(&x).unwrap())
            .unwrap();
        let classes = root_representatives(&h, "r").unwrap();
        assert_eq!(classes.len(), 2);
        let conj: Vec<usize> = classes.iter().map(|c| c.conjugates).collect();
        assert!(conj.contains(&1) && conj.contains(&2));
    }
}
