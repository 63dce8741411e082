//! Exact bivariate polynomial gcd and division over a tower.
//!
//! Polynomials are handled as univariate in the second variable with
//! coefficients in `K[x]`; the gcd splits into a content part (univariate gcd
//! of the `K[x]` coefficients) and a primitive part computed by pseudo-
//! remainder Euclid with primitive-part reduction at every step.

use crate::algebra::jet::{Jet2, Prec};
use crate::algebra::tower::FieldElement;
use crate::algebra::upoly::UniPoly;
use crate::error::{Error, Result};

/// Rows are coefficients of ascending powers of the second variable; each row
/// is a polynomial in the first variable.
type Rows = Vec<UniPoly>;

fn trim(rows: &mut Rows) {
    while rows.last().is_some_and(UniPoly::is_zero) {
        rows.pop();
    }
}

fn rows_is_zero(rows: &Rows) -> bool {
    rows.is_empty()
}

fn content(rows: &Rows) -> Result<UniPoly> {
    let mut acc: Option<UniPoly> = None;
    for r in rows {
        if r.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => r.make_monic()?,
            Some(g) => g.gcd(r)?,
        });
    }
    acc.ok_or_else(|| Error::Internal("content of zero polynomial".into()))
}

fn divide_rows(rows: &Rows, d: &UniPoly) -> Result<Rows> {
    rows.iter()
        .map(|r| {
            if r.is_zero() {
                Ok(r.clone())
            } else {
                r.div_exact(d)
            }
        })
        .collect()
}

fn mul_rows_scalar(rows: &Rows, c: &UniPoly) -> Result<Rows> {
    rows.iter().map(|r| r.mul(c)).collect()
}

fn sub_rows(a: &Rows, b: &Rows) -> Result<Rows> {
    let tower = a
        .first()
        .or(b.first())
        .map(|p| p.tower().clone())
        .ok_or_else(|| Error::Internal("empty rows".into()))?;
    let var = a.first().or(b.first()).map(|p| p.var().to_string()).unwrap();
    let n = a.len().max(b.len());
    let zero = UniPoly::zero(&tower, &var);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        out.push(x.sub(y)?);
    }
    trim(&mut out);
    Ok(out)
}

/// Pseudo-remainder of `a` by `b` in `K[x][y]`: computes `lc(b)^(δ+1) a mod b`
/// without fractions.
fn pseudo_rem(a: &Rows, b: &Rows) -> Result<Rows> {
    let db = b.len() - 1;
    let lc_b = b.last().expect("nonzero").clone();
    let mut r = a.clone();
    trim(&mut r);
    while r.len() > db {
        let dr = r.len() - 1;
        let lc_r = r.last().expect("nonzero").clone();
        // r := lc_b * r - lc_r * y^(dr-db) * b
        let mut scaled = mul_rows_scalar(&r, &lc_b)?;
        let mut shift: Rows = Vec::with_capacity(dr - db + b.len());
        let tower = lc_b.tower().clone();
        for _ in 0..(dr - db) {
            shift.push(UniPoly::zero(&tower, lc_b.var()));
        }
        for bc in b {
            shift.push(bc.mul(&lc_r)?);
        }
        scaled = sub_rows(&scaled, &shift)?;
        // degree strictly drops
        if scaled.len() > dr {
            scaled.truncate(dr);
            trim(&mut scaled);
        }
        r = scaled;
        trim(&mut r);
    }
    Ok(r)
}

fn primitive_part(rows: &Rows) -> Result<Rows> {
    if rows_is_zero(rows) {
        return Ok(rows.clone());
    }
    let c = content(rows)?;
    if c.is_constant() {
        return Ok(rows.clone());
    }
    divide_rows(rows, &c)
}

/// Gcd of two exact bivariate polynomials given as jets, normalized so the
/// leading coefficient (in the second variable, then the first) is 1.
/// Returns an exact jet. A unit gcd is returned as the constant 1.
pub fn bi_gcd(f: &Jet2, g: &Jet2) -> Result<Jet2> {
    if !f.is_exact() || !g.is_exact() {
        return Err(Error::ExactInputRequired);
    }
    let tower = f.tower().clone();
    let vars = f.vars();
    let one = || {
        Ok(Jet2::constant(
            FieldElement::one(&tower),
            vars,
            Prec::EXACT,
        ))
    };
    if f.is_zero() && g.is_zero() {
        return Err(Error::Internal("gcd(0,0)".into()));
    }
    if f.is_zero() {
        return normalize_jet(g);
    }
    if g.is_zero() {
        return normalize_jet(f);
    }
    let fr = f.to_upoly_in_var2()?;
    let gr = g.to_upoly_in_var2()?;
    let cf = content(&fr)?;
    let cg = content(&gr)?;
    let c = cf.gcd(&cg)?;
    let mut a = primitive_part(&fr)?;
    let mut b = primitive_part(&gr)?;
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !rows_is_zero(&b) {
        if b.len() == 1 {
            // primitive univariate-in-x polynomial: gcd of primitives is 1
            a = vec![UniPoly::one(&tower, vars.0)];
            break;
        }
        let r = pseudo_rem(&a, &b)?;
        a = b;
        b = primitive_part(&r)?;
    }
    let prim_gcd = primitive_part(&a)?;
    // combine content and primitive parts
    let mut rows: Rows = Vec::new();
    for r in &prim_gcd {
        rows.push(r.mul(&c)?);
    }
    if rows_is_zero(&rows) {
        return one();
    }
    normalize_jet(&rows_to_jet(&rows, vars)?)
}

/// Exact division `f / g` in `K[x, y]`; errors if not exactly divisible.
pub fn bi_div_exact(f: &Jet2, g: &Jet2) -> Result<Jet2> {
    if !f.is_exact() || !g.is_exact() {
        return Err(Error::ExactInputRequired);
    }
    if g.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if f.is_zero() {
        return Ok(f.clone());
    }
    let vars = f.vars();
    let fr = f.to_upoly_in_var2()?;
    let gr = g.to_upoly_in_var2()?;
    let db = gr.len() - 1;
    let lc_g = gr.last().expect("nonzero");
    let tower = f.tower().clone();
    let mut rem = fr;
    trim(&mut rem);
    let mut quot: Rows = vec![UniPoly::zero(&tower, vars.0); rem.len().saturating_sub(db)];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let q = rem.last().expect("nonzero").div_exact(lc_g)?;
        quot[dr - db] = q.clone();
        let mut shift: Rows = Vec::with_capacity(dr - db + gr.len());
        for _ in 0..(dr - db) {
            shift.push(UniPoly::zero(&tower, vars.0));
        }
        for bc in &gr {
            shift.push(bc.mul(&q)?);
        }
        rem = sub_rows(&rem, &shift)?;
        trim(&mut rem);
        if rem.len() > dr {
            return Err(Error::Internal("bivariate division did not reduce".into()));
        }
    }
    if !rows_is_zero(&rem) {
        return Err(Error::Internal("inexact bivariate division".into()));
    }
    rows_to_jet(&quot, vars)
}

fn rows_to_jet(rows: &Rows, vars: (&str, &str)) -> Result<Jet2> {
    let tower = rows
        .iter()
        .find(|r| !r.is_zero())
        .map(|r| r.tower().clone())
        .ok_or_else(|| Error::Internal("rows_to_jet of zero".into()))?;
    let mut terms = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        for (i, c) in row.coeffs().iter().enumerate() {
            if !c.is_zero() {
                terms.push(((i as u32, j as u32), c.clone()));
            }
        }
    }
    Ok(Jet2::from_terms(&tower, vars, Prec::EXACT, terms))
}

/// Squarefree part of an exact bivariate polynomial:
/// `f / gcd(f, ∂f/∂x, ∂f/∂y)`, normalized.
pub fn bi_squarefree_part(f: &Jet2) -> Result<Jet2> {
    if !f.is_exact() {
        return Err(Error::ExactInputRequired);
    }
    if f.is_zero() || f.is_constant_unit() {
        return normalize_jet(f);
    }
    let fx = f.partial(0)?;
    let fy = f.partial(1)?;
    let mut d = bi_gcd(f, &fx)?;
    if !fy.is_zero() {
        d = bi_gcd(&d, &fy)?;
    }
    if d.is_constant_unit() {
        return normalize_jet(f);
    }
    normalize_jet(&bi_div_exact(f, &d)?)
}

/// Scale an exact jet so its lexicographically-leading coefficient (highest
/// var2 power, then highest var1 power) is 1.
pub fn normalize_jet(f: &Jet2) -> Result<Jet2> {
    if f.is_zero() {
        return Ok(f.clone());
    }
    let lead = f
        .terms()
        .map(|(&(i, j), _)| (j, i))
        .max()
        .expect("nonzero");
    let c = f.coeff(lead.1, lead.0)?;
    f.scale(&c.inv()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tower::Tower;

    fn xy(t: &Tower) -> (Jet2, Jet2) {
        (
            Jet2::var1(t, ("x", "y"), Prec::EXACT),
            Jet2::var2(t, ("x", "y"), Prec::EXACT),
        )
    }

    #[test]
    fn gcd_of_monomials() {
        let t = Tower::rationals();
        let (x, y) = xy(&t);
        // gcd(x^2 y, x y^2) = x y
        let f = x.mul(&x).unwrap().mul(&y).unwrap();
        let g = x.mul(&y).unwrap().mul(&y).unwrap();
        let d = bi_gcd(&f, &g).unwrap();
        assert_eq!(d.to_string(), "x*y");
    }

    #[test]
    fn gcd_with_common_factor() {
        let t = Tower::rationals();
        let (x, y) = xy(&t);
        // f = (x + y) * x, g = (x + y) * y
        let s = x.add(&y).unwrap();
        let f = s.mul(&x).unwrap();
        let g = s.mul(&y).unwrap();
        let d = bi_gcd(&f, &g).unwrap();
        assert_eq!(d.to_string(), "x + y");
        assert_eq!(bi_div_exact(&f, &d).unwrap().to_string(), "x");
    }

    #[test]
    fn coprime_gives_unit() {
        let t = Tower::rationals();
        let (x, y) = xy(&t);
        let f = x.mul(&x).unwrap();
        let g = y.mul(&y).unwrap();
        let d = bi_gcd(&f, &g).unwrap();
        assert_eq!(d.to_string(), "1");
    }

    #[test]
    fn division_roundtrip() {
        let t = Tower::rationals();
        let (x, y) = xy(&t);
        // f = (x^2 + y)(y^2 - x)
        let a = x.mul(&x).unwrap().add(&y).unwrap();
        let b = y.mul(&y).unwrap().sub(&x).unwrap();
        let f = a.mul(&b).unwrap();
        let q = bi_div_exact(&f, &a).unwrap();
        assert!(q.sub(&b).unwrap().is_zero());
    }
}
