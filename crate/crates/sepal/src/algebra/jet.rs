//! Bivariate truncated power series with certified precision regions.
//!
//! A [`Jet2`] stores a sparse exponent map together with a [`Prec`] that
//! records which coefficients are certified correct: a monomial `x^i y^j` is
//! certified when `i + j ≤ total`, `i ≤ x` and `j ≤ y` (each bound optional;
//! all three absent means the jet is an exact polynomial). Reading a
//! coefficient outside the certified region is an error, never a silent zero,
//! and every operation propagates the region conservatively. The chart
//! transforms in the blow-up machinery rely on the per-axis bounds: a
//! substitution `y ↦ t·x` certifies whole slices of fixed `x`-degree rather
//! than a total-degree triangle.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::residue::USeries;
use crate::algebra::tower::{FieldElement, Tower};
use crate::algebra::upoly::{fmt_term, join_terms, UniPoly};
use crate::error::{Error, Result};

/// Certified-coefficient region. `None` bounds are unbounded; the fully
/// unbounded value marks an exact polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prec {
    pub total: Option<u32>,
    pub x: Option<u32>,
    pub y: Option<u32>,
}

impl Prec {
    pub const EXACT: Prec = Prec {
        total: None,
        x: None,
        y: None,
    };

    pub fn total(n: u32) -> Prec {
        Prec {
            total: Some(n),
            x: None,
            y: None,
        }
    }

    pub fn boxed(px: u32, py: u32) -> Prec {
        Prec {
            total: None,
            x: Some(px),
            y: Some(py),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.total.is_none() && self.x.is_none() && self.y.is_none()
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        self.total.is_none_or(|t| i + j <= t)
            && self.x.is_none_or(|px| i <= px)
            && self.y.is_none_or(|py| j <= py)
    }

    /// Largest `d` such that every monomial of total degree ≤ `d` is in the
    /// region (`None` = all degrees).
    pub fn effective_total(&self) -> Option<u32> {
        [self.total, self.x, self.y]
            .into_iter()
            .flatten()
            .min()
    }

    /// Intersection of certified regions.
    pub fn meet(&self, other: &Prec) -> Prec {
        fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
            match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(a.min(b)),
            }
        }
        Prec {
            total: min_opt(self.total, other.total),
            x: min_opt(self.x, other.x),
            y: min_opt(self.y, other.y),
        }
    }

    fn map_bounds(&self, ft: impl Fn(u32) -> Option<u32>, fx: impl Fn(u32) -> Option<u32>, fy: impl Fn(u32) -> Option<u32>) -> Prec {
        Prec {
            total: self.total.and_then(ft),
            x: self.x.and_then(fx),
            y: self.y.and_then(fy),
        }
    }
}

/// A bivariate jet: sparse coefficients plus certified region.
#[derive(Clone, Debug)]
pub struct Jet2 {
    tower: Tower,
    vars: (String, String),
    coeffs: BTreeMap<(u32, u32), FieldElement>,
    prec: Prec,
}

impl Jet2 {
    // ---- Constructors ----

    pub fn zero(tower: &Tower, vars: (&str, &str), prec: Prec) -> Jet2 {
        Jet2 {
            tower: tower.clone(),
            vars: (vars.0.to_string(), vars.1.to_string()),
            coeffs: BTreeMap::new(),
            prec,
        }
    }

    pub fn constant(c: FieldElement, vars: (&str, &str), prec: Prec) -> Jet2 {
        let mut j = Jet2::zero(c.tower(), vars, prec);
        if !c.is_zero() {
            j.coeffs.insert((0, 0), c);
        }
        j.clean();
        j
    }

    pub fn monomial(c: FieldElement, exps: (u32, u32), vars: (&str, &str), prec: Prec) -> Jet2 {
        let mut j = Jet2::zero(c.tower(), vars, prec);
        if !c.is_zero() {
            j.coeffs.insert(exps, c);
        }
        j.clean();
        j
    }

    pub fn var1(tower: &Tower, vars: (&str, &str), prec: Prec) -> Jet2 {
        Jet2::monomial(FieldElement::one(tower), (1, 0), vars, prec)
    }

    pub fn var2(tower: &Tower, vars: (&str, &str), prec: Prec) -> Jet2 {
        Jet2::monomial(FieldElement::one(tower), (0, 1), vars, prec)
    }

    pub fn from_terms(
        tower: &Tower,
        vars: (&str, &str),
        prec: Prec,
        terms: impl IntoIterator<Item = ((u32, u32), FieldElement)>,
    ) -> Jet2 {
        let mut j = Jet2::zero(tower, vars, prec);
        for (e, c) in terms {
            if !c.is_zero() {
                j.coeffs.insert(e, c);
            }
        }
        j.clean();
        j
    }

    /// Embed a univariate polynomial, `axis` 0 for var1 and 1 for var2.
    pub fn from_upoly(p: &UniPoly, axis: usize, vars: (&str, &str), prec: Prec) -> Jet2 {
        let mut j = Jet2::zero(p.tower(), vars, prec);
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let e = if axis == 0 { (i as u32, 0) } else { (0, i as u32) };
                j.coeffs.insert(e, c.clone());
            }
        }
        j.clean();
        j
    }

    /// Drop stored monomials outside the certified region.
    fn clean(&mut self) {
        let prec = self.prec;
        self.coeffs.retain(|&(i, j), c| prec.contains(i, j) && !c.is_zero());
    }

    // ---- Queries ----

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn vars(&self) -> (&str, &str) {
        (&self.vars.0, &self.vars.1)
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &FieldElement)> {
        self.coeffs.iter()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Certified coefficient read; beyond-precision queries are an error.
    pub fn coeff(&self, i: u32, j: u32) -> Result<FieldElement> {
        if !self.prec.contains(i, j) {
            return Err(Error::InsufficientPrecision {
                needed: i + j,
                have: self.prec.total.unwrap_or(0),
            });
        }
        Ok(self
            .coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.tower)))
    }

    /// Least total degree of a nonzero coefficient. All-zero truncations
    /// cannot certify an order, and neither can a minimum that sits beyond a
    /// hole in the certified region.
    pub fn order(&self) -> Result<u32> {
        let eff = self.prec.effective_total();
        match self.coeffs.keys().map(|&(i, j)| i + j).min() {
            Some(o) => {
                // every monomial of total degree < o must be certified zero
                match eff {
                    Some(t) if o > t + 1 => Err(Error::InsufficientPrecision {
                        needed: o.saturating_sub(1),
                        have: t,
                    }),
                    _ => Ok(o),
                }
            }
            None => match eff {
                Some(t) => Err(Error::InsufficientPrecision {
                    needed: t + 1,
                    have: t,
                }),
                None => Err(Error::Internal("order of the zero polynomial".into())),
            },
        }
    }

    /// The degree-`d` homogeneous part, as an exact jet. Errors when part of
    /// that degree is uncertified.
    pub fn homogeneous_part(&self, d: u32) -> Result<Jet2> {
        for i in 0..=d {
            if !self.prec.contains(i, d - i) {
                return Err(Error::InsufficientPrecision {
                    needed: d,
                    have: self.prec.total.unwrap_or(0),
                });
            }
        }
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), Prec::EXACT);
        for (&(i, j), c) in &self.coeffs {
            if i + j == d {
                out.coeffs.insert((i, j), c.clone());
            }
        }
        Ok(out)
    }

    fn vars_pair(&self) -> (&str, &str) {
        (&self.vars.0, &self.vars.1)
    }

    // ---- Ring operations ----

    pub fn add(&self, other: &Jet2) -> Result<Jet2> {
        let prec = self.prec.meet(&other.prec);
        let mut out = self.clone();
        out.prec = prec;
        for (&e, c) in &other.coeffs {
            match out.coeffs.get(&e) {
                Some(prev) => {
                    let s = prev.add(c)?;
                    if s.is_zero() {
                        out.coeffs.remove(&e);
                    } else {
                        out.coeffs.insert(e, s);
                    }
                }
                None => {
                    out.coeffs.insert(e, c.clone());
                }
            }
        }
        out.clean();
        Ok(out)
    }

    pub fn neg(&self) -> Jet2 {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Jet2) -> Result<Jet2> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Jet2) -> Result<Jet2> {
        let prec = self.prec.meet(&other.prec);
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), prec);
        for (&(i1, j1), c1) in &self.coeffs {
            for (&(i2, j2), c2) in &other.coeffs {
                let e = (i1 + i2, j1 + j2);
                if !prec.contains(e.0, e.1) {
                    continue;
                }
                let t = c1.mul(c2)?;
                match out.coeffs.get(&e) {
                    Some(prev) => {
                        let s = prev.add(&t)?;
                        if s.is_zero() {
                            out.coeffs.remove(&e);
                        } else {
                            out.coeffs.insert(e, s);
                        }
                    }
                    None => {
                        if !t.is_zero() {
                            out.coeffs.insert(e, t);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Jet2> {
        if c.is_zero() {
            return Ok(Jet2::zero(&self.tower, self.vars_pair(), self.prec));
        }
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.mul(c)?;
        }
        out.clean();
        Ok(out)
    }

    /// Multiply by the monomial `x^i y^j` (exact shift; the certified region
    /// shifts with it).
    pub fn mul_monomial(&self, i: u32, j: u32) -> Jet2 {
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), Prec {
            total: self.prec.total.map(|t| t + i + j),
            x: self.prec.x.map(|px| px + i),
            y: self.prec.y.map(|py| py + j),
        });
        for (&(a, b), c) in &self.coeffs {
            out.coeffs.insert((a + i, b + j), c.clone());
        }
        out
    }

    pub fn partial(&self, axis: usize) -> Result<Jet2> {
        let prec = match axis {
            0 => self.prec.map_bounds(|t| t.checked_sub(1), |x| x.checked_sub(1), Some),
            _ => self.prec.map_bounds(|t| t.checked_sub(1), Some, |y| y.checked_sub(1)),
        };
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), prec);
        for (&(i, j), c) in &self.coeffs {
            let (e, k) = if axis == 0 {
                if i == 0 {
                    continue;
                }
                ((i - 1, j), i)
            } else {
                if j == 0 {
                    continue;
                }
                ((i, j - 1), j)
            };
            let v = c.mul(&FieldElement::from_integer(&self.tower, k as i64))?;
            out.coeffs.insert(e, v);
        }
        out.clean();
        Ok(out)
    }

    /// Truncate to a smaller certified region.
    pub fn truncate(&self, prec: Prec) -> Jet2 {
        let mut out = self.clone();
        out.prec = self.prec.meet(&prec);
        out.clean();
        out
    }

    /// Widen the certified region by fiat. Only call when an argument outside
    /// the mechanical tracking guarantees the claimed coefficients (the
    /// derivation and chart transforms do this with order-based reasoning).
    pub fn assume_prec(&self, prec: Prec) -> Jet2 {
        let mut out = self.clone();
        out.prec = prec;
        out.clean();
        out
    }

    /// An exact nonzero constant.
    pub fn is_constant_unit(&self) -> bool {
        self.is_exact()
            && self.coeffs.len() == 1
            && self.coeffs.contains_key(&(0, 0))
    }

    /// Substitute jets for the variables: `self(g, h)`. Both substituted jets
    /// must have zero constant term; substituting order-≥1 jets preserves the
    /// certified region (meet of all three).
    pub fn substitute(&self, g: &Jet2, h: &Jet2) -> Result<Jet2> {
        if g.coeffs.contains_key(&(0, 0)) || h.coeffs.contains_key(&(0, 0)) {
            return Err(Error::Internal(
                "substitution requires zero constant term".into(),
            ));
        }
        let prec = self.prec.meet(&g.prec).meet(&h.prec);
        let vars = g.vars_pair();
        let mut out = Jet2::zero(&self.tower, vars, prec);
        // Cache powers of g and h as needed.
        let mut g_pows: Vec<Jet2> = vec![Jet2::constant(
            FieldElement::one(&self.tower),
            vars,
            prec,
        )];
        let mut h_pows: Vec<Jet2> = vec![g_pows[0].clone()];
        for (&(i, j), c) in &self.coeffs {
            while g_pows.len() <= i as usize {
                let next = g_pows.last().expect("nonempty").mul(g)?;
                g_pows.push(next);
            }
            while h_pows.len() <= j as usize {
                let next = h_pows.last().expect("nonempty").mul(h)?;
                h_pows.push(next);
            }
            let term = g_pows[i as usize].mul(&h_pows[j as usize])?.scale(c)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Inverse of a unit (nonzero constant term). Exact jets must be
    /// truncated first: the inverse of a polynomial is not a polynomial.
    pub fn invert_unit(&self) -> Result<Jet2> {
        let c0 = self
            .coeffs
            .get(&(0, 0))
            .cloned()
            .ok_or_else(|| Error::Internal("invert_unit of a non-unit".into()))?;
        if self.prec.is_exact() {
            return Err(Error::Internal(
                "invert_unit needs a truncated jet; truncate first".into(),
            ));
        }
        let c0_inv = c0.inv()?;
        // self = c0 (1 + w); inverse = c0^{-1} sum (-w)^n.
        let mut w = self.scale(&c0_inv)?;
        w.coeffs.remove(&(0, 0));
        let neg_w = w.neg();
        let one = Jet2::constant(FieldElement::one(&self.tower), self.vars_pair(), self.prec);
        let mut acc = one.clone();
        let mut pow = one;
        loop {
            pow = pow.mul(&neg_w)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow)?;
        }
        acc.scale(&c0_inv)
    }

    /// Exact division by `x^k` (var1). Every stored monomial must have
    /// var1-degree ≥ k; the certified region shifts down accordingly.
    pub fn div_var1_power(&self, k: u32) -> Result<Jet2> {
        let prec = Prec {
            total: self.prec.total.map(|t| t.saturating_sub(k)),
            x: self.prec.x.map(|px| px.saturating_sub(k)),
            y: self.prec.y,
        };
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), prec);
        for (&(i, j), c) in &self.coeffs {
            if i < k {
                return Err(Error::Internal(format!(
                    "jet not divisible by {}^{k}",
                    self.vars.0
                )));
            }
            out.coeffs.insert((i - k, j), c.clone());
        }
        out.clean();
        Ok(out)
    }

    /// Exact division by an exact polynomial jet that is known to divide the
    /// underlying series. Works degree by degree against the divisor's lowest
    /// homogeneous part; only pure-total (or exact) precision is supported.
    pub fn div_exact(&self, divisor: &Jet2) -> Result<Jet2> {
        if !divisor.is_exact() {
            return Err(Error::ExactInputRequired);
        }
        if self.prec.x.is_some() || self.prec.y.is_some() {
            return Err(Error::Internal(
                "div_exact supports only total-degree precision".into(),
            ));
        }
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let o = divisor.order()?;
        let lowest = divisor.homogeneous_part(o)?;
        let out_prec = match self.prec.total {
            Some(t) => Prec::total(t.saturating_sub(o)),
            None => Prec::EXACT,
        };
        let max_deg = match out_prec.total {
            Some(t) => t,
            None => {
                // Exact / exact: degrees are bounded by the numerator.
                let dmax = self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0);
                dmax.saturating_sub(o)
            }
        };
        let mut quot = Jet2::zero(&self.tower, self.vars_pair(), out_prec);
        for m in 0..=max_deg {
            // f_o * q_m = self_{m+o} - sum_{i>o} f_i q_{m+o-i}
            let mut rhs = self.homogeneous_part(m + o)?;
            for (&(a, b), fc) in &divisor.coeffs {
                let d = a + b;
                if d <= o || d > m + o {
                    continue;
                }
                let qd = m + o - d;
                for (&(i, j), qc) in quot.coeffs.clone().iter() {
                    if i + j == qd {
                        let t = fc.mul(qc)?;
                        let mono =
                            Jet2::monomial(t, (a + i, b + j), self.vars_pair(), Prec::EXACT);
                        rhs = rhs.sub(&mono)?;
                    }
                }
            }
            let qm = homogeneous_div(&rhs, &lowest, m)?;
            quot = quot.add(&qm)?;
        }
        if out_prec.is_exact() {
            // Verify exactness for the polynomial/polynomial case.
            let back = quot.mul(divisor)?;
            if !back.sub(self)?.is_zero() {
                return Err(Error::Internal("inexact jet division".into()));
            }
        }
        Ok(quot)
    }

    /// Translate the second variable: `y ↦ y + t0`, exactly, slice by slice
    /// in the first variable. The caller must guarantee each var1-slice of
    /// the underlying series within the certified region is the complete
    /// polynomial stored here (true for blow-up transforms, whose slices have
    /// bounded var2-degree). The precision region is preserved except that
    /// per-slice completeness is what makes this sound.
    pub fn translate_var2(&self, t0: &FieldElement) -> Result<Jet2> {
        if t0.is_zero() {
            return Ok(self.clone());
        }
        // Group by var1 exponent, translate each univariate slice.
        let mut slices: BTreeMap<u32, Vec<(u32, FieldElement)>> = BTreeMap::new();
        for (&(i, j), c) in &self.coeffs {
            slices.entry(i).or_default().push((j, c.clone()));
        }
        let mut out = Jet2::zero(&self.tower, self.vars_pair(), self.prec);
        for (i, terms) in slices {
            let deg = terms.iter().map(|&(j, _)| j).max().unwrap_or(0) as usize;
            let mut coeffs = vec![FieldElement::zero(&self.tower); deg + 1];
            for (j, c) in terms {
                coeffs[j as usize] = c;
            }
            let p = UniPoly::from_coeffs(&self.tower, &self.vars.1, coeffs);
            let q = p.translate(t0)?;
            for (j, c) in q.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.coeffs.insert((i, j as u32), c.clone());
                }
            }
        }
        out.clean();
        Ok(out)
    }

    /// Swap the two variables.
    pub fn swap_vars(&self) -> Jet2 {
        let mut out = Jet2::zero(
            &self.tower,
            (&self.vars.1, &self.vars.0),
            Prec {
                total: self.prec.total,
                x: self.prec.y,
                y: self.prec.x,
            },
        );
        for (&(i, j), c) in &self.coeffs {
            out.coeffs.insert((j, i), c.clone());
        }
        out
    }

    /// Restriction to `var1 = 0`, as a univariate series in var2 with the
    /// certified degree bound carried over.
    pub fn restrict_var1_zero(&self) -> USeries {
        let prec = match (self.prec.total, self.prec.y) {
            (None, None) => None,
            (Some(t), None) => Some(t),
            (None, Some(py)) => Some(py),
            (Some(t), Some(py)) => Some(t.min(py)),
        };
        let deg = self
            .coeffs
            .keys()
            .filter(|&&(i, _)| i == 0)
            .map(|&(_, j)| j)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![FieldElement::zero(&self.tower); deg as usize + 1];
        for (&(i, j), c) in &self.coeffs {
            if i == 0 {
                coeffs[j as usize] = c.clone();
            }
        }
        USeries::new(
            UniPoly::from_coeffs(&self.tower, &self.vars.1, coeffs),
            prec,
        )
    }

    /// Convert an exact jet into a univariate polynomial in var2 whose
    /// coefficients are polynomials in var1 (ascending var2 degree).
    pub fn to_upoly_in_var2(&self) -> Result<Vec<UniPoly>> {
        if !self.is_exact() {
            return Err(Error::ExactInputRequired);
        }
        let deg_y = self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0);
        let mut out: Vec<Vec<FieldElement>> = vec![vec![]; deg_y as usize + 1];
        for (&(i, j), c) in &self.coeffs {
            let row = &mut out[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, FieldElement::zero(&self.tower));
            }
            row[i as usize] = c.clone();
        }
        Ok(out
            .into_iter()
            .map(|coeffs| UniPoly::from_coeffs(&self.tower, &self.vars.0, coeffs))
            .collect())
    }

    pub fn migrate(&self, to: &Tower) -> Result<Jet2> {
        let mut out = Jet2::zero(to, self.vars_pair(), self.prec);
        for (&e, c) in &self.coeffs {
            let v = c.migrate(to)?;
            if !v.is_zero() {
                out.coeffs.insert(e, v);
            }
        }
        Ok(out)
    }

    pub fn with_vars(&self, vars: (&str, &str)) -> Jet2 {
        let mut out = self.clone();
        out.vars = (vars.0.to_string(), vars.1.to_string());
        out
    }

    /// Numeric evaluation with generator bindings.
    pub fn eval_complex(
        &self,
        z: (num_complex::Complex64, num_complex::Complex64),
        bind: &dyn Fn(&str) -> Option<num_complex::Complex64>,
    ) -> Result<num_complex::Complex64> {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (&(i, j), c) in &self.coeffs {
            let cv = c.eval_complex(bind)?;
            acc += cv * z.0.powu(i) * z.1.powu(j);
        }
        Ok(acc)
    }
}

/// Divide the homogeneous jet `a` (degree `m + deg b`) exactly by the
/// homogeneous jet `b`, returning a homogeneous jet of degree `m`.
fn homogeneous_div(a: &Jet2, b: &Jet2, m: u32) -> Result<Jet2> {
    if a.is_zero() {
        return Ok(Jet2::zero(a.tower(), a.vars_pair(), Prec::EXACT));
    }
    // Dehomogenize against var1: A = x^(d - deg_t) * t-poly with t = y/x.
    let tower = a.tower().clone();
    let to_upoly = |h: &Jet2| -> (usize, UniPoly) {
        let deg = h.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0);
        let mut coeffs = vec![FieldElement::zero(&tower); deg as usize + 1];
        for (&(_, j), c) in &h.coeffs {
            coeffs[j as usize] = c.clone();
        }
        (deg as usize, UniPoly::from_coeffs(&tower, "t", coeffs))
    };
    let (da, ua) = to_upoly(a);
    let (db, ub) = to_upoly(b);
    debug_assert_eq!(da, db + m as usize);
    let uq = ua.div_exact(&ub)?;
    let mut out = Jet2::zero(&tower, a.vars_pair(), Prec::EXACT);
    for (j, c) in uq.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.coeffs.insert((m - j as u32, j as u32), c.clone());
        }
    }
    Ok(out)
}

impl fmt::Display for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&(u32, u32)> = self.coeffs.keys().collect();
        // Ascending total degree, then descending var1 exponent.
        keys.sort_by_key(|&&(i, j)| (i + j, j));
        let mut terms = Vec::new();
        for &&(i, j) in &keys {
            let c = &self.coeffs[&(i, j)];
            let pow = {
                let px = match i {
                    0 => String::new(),
                    1 => self.vars.0.clone(),
                    _ => format!("{}^{i}", self.vars.0),
                };
                let py = match j {
                    0 => String::new(),
                    1 => self.vars.1.clone(),
                    _ => format!("{}^{j}", self.vars.1),
                };
                match (px.is_empty(), py.is_empty()) {
                    (true, true) => String::new(),
                    (false, true) => px,
                    (true, false) => py,
                    (false, false) => format!("{px}*{py}"),
                }
            };
            terms.push(fmt_term(c, &pow));
        }
        write!(f, "{}", join_terms(&terms))?;
        match self.prec.total {
            Some(t) => write!(f, " + O(deg {})", t + 1),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tower {
        Tower::rationals()
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_integer(&t(), n)
    }

    #[test]
    fn invert_unit_geometric() {
        // (1+x)^-1 to total degree 3 = 1 - x + x^2 - x^3
        let tw = t();
        let one = Jet2::constant(FieldElement::one(&tw), ("x", "y"), Prec::total(3));
        let x = Jet2::var1(&tw, ("x", "y"), Prec::total(3));
        let u = one.add(&x).unwrap();
        let inv = u.invert_unit().unwrap();
        assert_eq!(inv.to_string(), "1 - x + x^2 - x^3 + O(deg 4)");
        assert!(u.mul(&inv).unwrap().sub(&one).unwrap().is_zero());
    }

    #[test]
    fn substitution_y_to_tx() {
        // y - y^2 with y -> t*x gives t*x - t^2*x^2
        let tw = t();
        let p = Prec::total(4);
        let y = Jet2::var2(&tw, ("x", "y"), p);
        let f = y.sub(&y.mul(&y).unwrap()).unwrap();
        let gx = Jet2::var1(&tw, ("x", "t"), p);
        let tx = gx.mul(&Jet2::var2(&tw, ("x", "t"), p)).unwrap();
        let sub = f.substitute(&gx, &tx).unwrap();
        // substitute(x -> x, y -> t x): but f has no x, so result is t*x - t^2 x^2
        assert_eq!(sub.to_string(), "x*t - x^2*t^2 + O(deg 5)");
    }

    #[test]
    fn beyond_precision_is_error() {
        let tw = t();
        let x = Jet2::var1(&tw, ("x", "y"), Prec::total(2));
        assert!(x.coeff(1, 0).is_ok());
        assert!(x.coeff(3, 0).is_err());
        assert!(x.coeff(1, 1).is_ok());
    }

    #[test]
    fn exact_division_by_polynomial() {
        // (x^2 + x y) / x = x + y, via the homogeneous solver on a truncation
        let tw = t();
        let p = Prec::total(5);
        let x = Jet2::var1(&tw, ("x", "y"), p);
        let y = Jet2::var2(&tw, ("x", "y"), p);
        let num = x.mul(&x).unwrap().add(&x.mul(&y).unwrap()).unwrap();
        let den = Jet2::var1(&tw, ("x", "y"), Prec::EXACT);
        let q = num.div_exact(&den).unwrap();
        assert_eq!(q.to_string(), "x + y + O(deg 5)");
        // Divide by x + y as well: (x^2 + xy) / (x + y) = x
        let den2 = Jet2::var1(&tw, ("x", "y"), Prec::EXACT)
            .add(&Jet2::var2(&tw, ("x", "y"), Prec::EXACT))
            .unwrap();
        let q2 = num.div_exact(&den2).unwrap();
        assert_eq!(q2.coeff(1, 0).unwrap().to_string(), "1");
        assert!(q2.coeff(0, 1).unwrap().is_zero());
    }

    #[test]
    fn translate_slices() {
        // x*y^2, translate y -> y+1: x*(y+1)^2 = x*y^2 + 2*x*y + x
        let tw = t();
        let x = Jet2::var1(&tw, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&tw, ("x", "y"), Prec::EXACT);
        let f = x.mul(&y.mul(&y).unwrap()).unwrap();
        let g = f.translate_var2(&fe(1)).unwrap();
        assert_eq!(g.coeff(1, 0).unwrap().to_string(), "1");
        assert_eq!(g.coeff(1, 1).unwrap().to_string(), "2");
        assert_eq!(g.coeff(1, 2).unwrap().to_string(), "1");
    }

    #[test]
    fn mul_respects_min_prec() {
        let tw = t();
        let a = Jet2::var1(&tw, ("x", "y"), Prec::total(5));
        let b = Jet2::var1(&tw, ("x", "y"), Prec::total(3));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.prec().total, Some(3));
    }
}
