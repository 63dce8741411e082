//! Dense univariate polynomials over a coefficient tower.
//!
//! Coefficients are stored in ascending degree order; the vector is empty for
//! the zero polynomial and its last entry is nonzero otherwise. Everything
//! returns `Result` because coefficient arithmetic can split an algebraic
//! level.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::tower::{FieldElement, Tower};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct UniPoly {
    tower: Tower,
    var: String,
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    // ---- Constructors ----

    pub fn zero(tower: &Tower, var: &str) -> UniPoly {
        UniPoly {
            tower: tower.clone(),
            var: var.to_string(),
            coeffs: vec![],
        }
    }

    pub fn one(tower: &Tower, var: &str) -> UniPoly {
        UniPoly::constant(FieldElement::one(tower), var)
    }

    pub fn constant(c: FieldElement, var: &str) -> UniPoly {
        let tower = c.tower().clone();
        let coeffs = if c.is_zero() { vec![] } else { vec![c] };
        UniPoly {
            tower,
            var: var.to_string(),
            coeffs,
        }
    }

    pub fn monomial(c: FieldElement, deg: usize, var: &str) -> UniPoly {
        let tower = c.tower().clone();
        if c.is_zero() {
            return UniPoly::zero(&tower, var);
        }
        let mut coeffs = vec![FieldElement::zero(&tower); deg + 1];
        coeffs[deg] = c;
        UniPoly {
            tower,
            var: var.to_string(),
            coeffs,
        }
    }

    pub fn from_coeffs(tower: &Tower, var: &str, coeffs: Vec<FieldElement>) -> UniPoly {
        let mut p = UniPoly {
            tower: tower.clone(),
            var: var.to_string(),
            coeffs,
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    // ---- Queries ----

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.tower))
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0 (`None` for the zero polynomial).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    // ---- Arithmetic ----

    pub fn add(&self, other: &UniPoly) -> Result<UniPoly> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i))?);
        }
        Ok(UniPoly::from_coeffs(&self.tower, &self.var, out))
    }

    pub fn sub(&self, other: &UniPoly) -> Result<UniPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            tower: self.tower.clone(),
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(FieldElement::neg).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(UniPoly::zero(&self.tower, &self.var));
        }
        let mut out = vec![FieldElement::zero(&self.tower); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(UniPoly::from_coeffs(&self.tower, &self.var, out))
    }

    pub fn scale(&self, c: &FieldElement) -> Result<UniPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.mul(c)?);
        }
        Ok(UniPoly::from_coeffs(&self.tower, &self.var, out))
    }

    /// Division with remainder: `self = q * divisor + r`, deg r < deg divisor.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let db = divisor.coeffs.len() - 1;
        let lc_inv = divisor.leading_coeff().expect("nonzero").inv()?;
        let mut rem = self.coeffs.clone();
        let trim = |v: &mut Vec<FieldElement>| {
            while v.last().is_some_and(FieldElement::is_zero) {
                v.pop();
            }
        };
        trim(&mut rem);
        if rem.len() <= db {
            return Ok((
                UniPoly::zero(&self.tower, &self.var),
                UniPoly::from_coeffs(&self.tower, &self.var, rem),
            ));
        }
        let mut quot = vec![FieldElement::zero(&self.tower); rem.len() - db];
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = rem.last().expect("nonzero").mul(&lc_inv)?;
            if !c.is_zero() {
                quot[dr - db] = c.clone();
                for (i, bc) in divisor.coeffs.iter().enumerate() {
                    rem[dr - db + i] = rem[dr - db + i].sub(&c.mul(bc)?)?;
                }
            }
            rem.pop();
            trim(&mut rem);
        }
        Ok((
            UniPoly::from_coeffs(&self.tower, &self.var, quot),
            UniPoly::from_coeffs(&self.tower, &self.var, rem),
        ))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn make_monic(&self) -> Result<UniPoly> {
        match self.leading_coeff() {
            None => Ok(self.clone()),
            Some(lc) if lc.is_one() => Ok(self.clone()),
            Some(lc) => self.scale(&lc.inv()?),
        }
    }

    /// Monic gcd (Euclidean algorithm over the tower).
    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Result<UniPoly> {
        if self.coeffs.len() <= 1 {
            return Ok(UniPoly::zero(&self.tower, &self.var));
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let k = FieldElement::from_integer(&self.tower, i as i64);
            out.push(c.mul(&k)?);
        }
        Ok(UniPoly::from_coeffs(&self.tower, &self.var, out))
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut acc = FieldElement::zero(&self.tower);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    /// `p(x + a)` by Horner-style re-expansion.
    pub fn translate(&self, a: &FieldElement) -> Result<UniPoly> {
        // Write p = sum c_i x^i and rebuild with x -> x + a.
        let x_plus_a = UniPoly::from_coeffs(
            &self.tower,
            &self.var,
            vec![a.clone(), FieldElement::one(&self.tower)],
        );
        let mut acc = UniPoly::zero(&self.tower, &self.var);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x_plus_a)?;
            acc = acc.add(&UniPoly::constant(c.clone(), &self.var))?;
        }
        Ok(acc)
    }

    /// Squarefree part: `p / gcd(p, p')`, made monic.
    pub fn squarefree_part(&self) -> Result<UniPoly> {
        let d = self.derivative()?;
        let g = self.gcd(&d)?;
        if g.is_constant() {
            return self.make_monic();
        }
        self.div_exact(&g)?.make_monic()
    }

    /// Squarefree decomposition (Yun): returns `[(q_1, 1), (q_2, 2), ...]`
    /// with `self = lc * prod q_i^i` and the `q_i` monic, squarefree, pairwise
    /// coprime (constant factors omitted).
    pub fn squarefree_decomposition(&self) -> Result<Vec<(UniPoly, usize)>> {
        if self.is_zero() || self.is_constant() {
            return Ok(vec![]);
        }
        let p = self.make_monic()?;
        let dp = p.derivative()?;
        let mut out = Vec::new();
        let g = p.gcd(&dp)?;
        let mut w = p.div_exact(&g)?; // product of distinct factors
        let mut y = dp.div_exact(&g)?;
        let mut i = 1usize;
        loop {
            let z = y.sub(&w.derivative()?)?;
            if z.is_zero() {
                if !w.is_constant() {
                    out.push((w.make_monic()?, i));
                }
                break;
            }
            let f = w.gcd(&z)?;
            if !f.is_constant() {
                out.push((f.clone(), i));
            }
            w = w.div_exact(&f)?;
            y = z.div_exact(&f)?;
            i += 1;
        }
        Ok(out)
    }

    /// Power sums p_1..p_n of the roots (with multiplicity) via Newton's
    /// identities; `self` must be monic of degree d, and n ≤ any value.
    pub fn root_power_sums(&self, n: usize) -> Result<Vec<FieldElement>> {
        let d = self.degree().ok_or(Error::DivisionByZero)?;
        // e_i = (-1)^i * coeff(d - i) for monic p.
        let mut e = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let c = self.coeff(d - i);
            e.push(if i % 2 == 1 { c.neg() } else { c });
        }
        let mut p: Vec<FieldElement> = Vec::with_capacity(n);
        for k in 1..=n {
            // p_k = e_1 p_{k-1} - e_2 p_{k-2} + ... + (-1)^{k-1} k e_k
            let mut acc = FieldElement::zero(&self.tower);
            for i in 1..k.min(d + 1) {
                let term = e[i].mul(&p[k - i - 1])?;
                acc = if i % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
            }
            if k <= d {
                let ke = e[k].mul(&FieldElement::from_integer(&self.tower, k as i64))?;
                acc = if k % 2 == 1 { acc.add(&ke)? } else { acc.sub(&ke)? };
            }
            p.push(acc);
        }
        Ok(p)
    }

    pub fn migrate(&self, to: &Tower) -> Result<UniPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.migrate(to))
            .collect::<Result<Vec<_>>>()?;
        Ok(UniPoly::from_coeffs(to, &self.var, coeffs))
    }

    pub fn from_integer_coeffs(tower: &Tower, var: &str, coeffs: &[i64]) -> UniPoly {
        let v = coeffs
            .iter()
            .map(|&c| {
                FieldElement::from_rational(tower, BigRational::from_integer(BigInt::from(c)))
            })
            .collect();
        UniPoly::from_coeffs(tower, var, v)
    }
}

/// Render one `coeff * var^i` term; returns (is_negative, magnitude text).
pub(crate) fn fmt_term(c: &FieldElement, pow_text: &str) -> (bool, String) {
    let cs = c.to_string();
    let (neg, mag) = match cs.strip_prefix('-') {
        // Only strip a leading minus when it negates the whole coefficient.
        Some(m) if !cs.contains(" + ") && !cs.contains(" - ") => (true, m.to_string()),
        _ => (false, cs),
    };
    let mag = if pow_text.is_empty() {
        mag
    } else if mag.contains(' ') {
        format!("({mag})")
    } else {
        mag
    };
    let text = if pow_text.is_empty() {
        mag
    } else if mag == "1" {
        pow_text.to_string()
    } else {
        format!("{mag}*{pow_text}")
    };
    (neg, text)
}

pub(crate) fn join_terms(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, text)) in terms.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else if *neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(text);
    }
    out
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let pow = match i {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{i}", self.var),
            };
            terms.push(fmt_term(c, &pow));
        }
        write!(f, "{}", join_terms(&terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tower {
        Tower::rationals()
    }

    fn p(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_integer_coeffs(&t(), "x", coeffs)
    }

    #[test]
    fn gcd_basics() {
        // gcd(x^2, x^3) = x^2
        let g = p(&[0, 0, 1]).gcd(&p(&[0, 0, 0, 1])).unwrap();
        assert_eq!(g.to_string(), "x^2");
        // gcd(x^2-1, x-1) = x-1
        let g = p(&[-1, 0, 1]).gcd(&p(&[-1, 1])).unwrap();
        assert_eq!(g.to_string(), "x - 1");
        // gcd(x^3+x^2, x^2+2x+1) = x+1
        let g = p(&[0, 0, 1, 1]).gcd(&p(&[1, 2, 1])).unwrap();
        assert_eq!(g.to_string(), "x + 1");
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = p(&[3, -2, 0, 7, 1]);
        let b = p(&[1, 4, 2]);
        let (q, r) = a.div_rem(&b).unwrap();
        let back = q.mul(&b).unwrap().add(&r).unwrap();
        assert!(back.sub(&a).unwrap().is_zero());
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn squarefree_decomposition_yun() {
        // x * (x+1)^2 * (x-2)^3
        let f = p(&[0, 1])
            .mul(&p(&[1, 1]).mul(&p(&[1, 1])).unwrap())
            .unwrap()
            .mul(
                &p(&[-2, 1])
                    .mul(&p(&[-2, 1]))
                    .unwrap()
                    .mul(&p(&[-2, 1]))
                    .unwrap(),
            )
            .unwrap();
        let dec = f.squarefree_decomposition().unwrap();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0].0.to_string(), "x");
        assert_eq!(dec[0].1, 1);
        assert_eq!(dec[1].0.to_string(), "x + 1");
        assert_eq!(dec[1].1, 2);
        assert_eq!(dec[2].0.to_string(), "x - 2");
        assert_eq!(dec[2].1, 3);
    }

    #[test]
    fn translate_and_eval() {
        let f = p(&[1, 0, 1]); // x^2 + 1
        let g = f.translate(&FieldElement::from_integer(&t(), 3)).unwrap();
        // (x+3)^2 + 1 = x^2 + 6x + 10
        assert_eq!(g.to_string(), "x^2 + 6*x + 10");
        let v = f.eval(&FieldElement::from_integer(&t(), 2)).unwrap();
        assert_eq!(v.to_string(), "5");
    }

    #[test]
    fn power_sums() {
        // roots 1, 2: p1 = 3, p2 = 5, p3 = 9
        let f = p(&[2, -3, 1]);
        let ps = f.root_power_sums(3).unwrap();
        let s: Vec<String> = ps.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["3", "5", "9"]);
    }
}
