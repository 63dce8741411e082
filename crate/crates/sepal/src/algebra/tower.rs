//! Coefficient tower Q ⊂ Q(t₁,…) ⊂ …[α]/(m(α)) with exact arithmetic.
//!
//! A [`Tower`] is an immutable stack of levels over the rationals. Each level
//! adjoins either a transcendental generator (elements become rational
//! functions in it) or an algebraic generator with a monic squarefree
//! defining polynomial (elements become polynomials of bounded degree in it).
//!
//! Defining polynomials only have to be squarefree, not irreducible. When an
//! inversion hits a zero divisor the level splits into two branch towers
//! (dynamic evaluation in the D5 style) and the computation is re-run per
//! branch; a wrong answer is never produced. Elements built before a split
//! remain valid in every branch via [`FieldElement::migrate`].
//!
//! Values are immutable after construction and the towers are shared behind
//! `Arc`, so everything here is safe to use across threads.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// One level of the coefficient tower.
#[derive(Debug, Clone)]
enum Level {
    /// A free (transcendental) generator; arithmetic is rational-function
    /// arithmetic in it.
    Transcendental { name: String },
    /// A generator satisfying exactly `min_poly` (monic, squarefree,
    /// coefficients from the levels below).
    Algebraic { name: String, min_poly: Vec<Repr> },
}

impl Level {
    fn name(&self) -> &str {
        match self {
            Level::Transcendental { name } => name,
            Level::Algebraic { name, .. } => name,
        }
    }
}

#[derive(Debug)]
struct TowerInner {
    levels: Vec<Level>,
}

/// An immutable coefficient tower. Cloning is cheap (shared `Arc`).
#[derive(Clone)]
pub struct Tower {
    inner: Arc<TowerInner>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower[Q")?;
        for lv in &self.inner.levels {
            match lv {
                Level::Transcendental { name } => write!(f, "({name})")?,
                Level::Algebraic { name, min_poly } => {
                    write!(f, "[{name}; deg {}]", min_poly.len() - 1)?
                }
            }
        }
        write!(f, "]")
    }
}

/// Internal value representation. `Rat` lives at level 0; the other two carry
/// the 1-based level index of the generator they are written in, with
/// coefficients from strictly lower levels. Canonical form is always kept:
/// fractions are reduced with monic denominator, algebraic values are reduced
/// modulo the defining polynomial, and values that fit a lower level are
/// demoted, so the zero element is always `Rat(0)`.
#[derive(Debug, Clone)]
pub(crate) enum Repr {
    Rat(BigRational),
    RatFn { lvl: usize, num: Vec<Repr>, den: Vec<Repr> },
    Alg { lvl: usize, coeffs: Vec<Repr> },
}

impl Repr {
    fn level(&self) -> usize {
        match self {
            Repr::Rat(_) => 0,
            Repr::RatFn { lvl, .. } | Repr::Alg { lvl, .. } => *lvl,
        }
    }

    fn zero() -> Repr {
        Repr::Rat(BigRational::zero())
    }

    fn one() -> Repr {
        Repr::Rat(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        matches!(self, Repr::Rat(r) if r.is_zero())
    }

    fn is_one(&self) -> bool {
        matches!(self, Repr::Rat(r) if r.is_one())
    }
}

// ---- Arithmetic on representations -------------------------------------
//
// All operations are methods on `TowerInner` so that algebraic reductions can
// reach the defining polynomials. Binary operations lift both sides to the
// higher of the two levels and normalize the result back down.

impl TowerInner {
    fn split(&self, lvl: usize, g: Vec<Repr>, h: Vec<Repr>) -> Error {
        let name = self.levels[lvl - 1].name().to_string();
        let mk = |mp: Vec<Repr>| {
            let mut levels = self.levels.clone();
            levels[lvl - 1] = Level::Algebraic {
                name: name.clone(),
                min_poly: mp,
            };
            Tower {
                inner: Arc::new(TowerInner { levels }),
            }
        };
        Error::ZeroDivisorSplit {
            generator: name.clone(),
            branches: vec![mk(g), mk(h)],
        }
    }

    fn add(&self, a: &Repr, b: &Repr) -> Result<Repr> {
        if a.is_zero() {
            return Ok(b.clone());
        }
        if b.is_zero() {
            return Ok(a.clone());
        }
        let lvl = a.level().max(b.level());
        if lvl == 0 {
            let (Repr::Rat(x), Repr::Rat(y)) = (a, b) else {
                unreachable!()
            };
            return Ok(Repr::Rat(x + y));
        }
        match &self.levels[lvl - 1] {
            Level::Transcendental { .. } => {
                let (an, ad) = as_fraction(a, lvl);
                let (bn, bd) = as_fraction(b, lvl);
                let num = self.p_add(&self.p_mul(&an, &bd)?, &self.p_mul(&bn, &ad)?)?;
                let den = self.p_mul(&ad, &bd)?;
                self.norm_ratfn(lvl, num, den)
            }
            Level::Algebraic { .. } => {
                let ac = as_alg(a, lvl);
                let bc = as_alg(b, lvl);
                let sum = self.p_add(&ac, &bc)?;
                self.norm_alg(lvl, sum)
            }
        }
    }

    fn neg(&self, a: &Repr) -> Repr {
        match a {
            Repr::Rat(r) => Repr::Rat(-r),
            Repr::RatFn { lvl, num, den } => Repr::RatFn {
                lvl: *lvl,
                num: num.iter().map(|c| self.neg(c)).collect(),
                den: den.clone(),
            },
            Repr::Alg { lvl, coeffs } => Repr::Alg {
                lvl: *lvl,
                coeffs: coeffs.iter().map(|c| self.neg(c)).collect(),
            },
        }
    }

    fn sub(&self, a: &Repr, b: &Repr) -> Result<Repr> {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &Repr, b: &Repr) -> Result<Repr> {
        if a.is_zero() || b.is_zero() {
            return Ok(Repr::zero());
        }
        if a.is_one() {
            return Ok(b.clone());
        }
        if b.is_one() {
            return Ok(a.clone());
        }
        let lvl = a.level().max(b.level());
        if lvl == 0 {
            let (Repr::Rat(x), Repr::Rat(y)) = (a, b) else {
                unreachable!()
            };
            return Ok(Repr::Rat(x * y));
        }
        match &self.levels[lvl - 1] {
            Level::Transcendental { .. } => {
                let (an, ad) = as_fraction(a, lvl);
                let (bn, bd) = as_fraction(b, lvl);
                let num = self.p_mul(&an, &bn)?;
                let den = self.p_mul(&ad, &bd)?;
                self.norm_ratfn(lvl, num, den)
            }
            Level::Algebraic { .. } => {
                let prod = self.p_mul(&as_alg(a, lvl), &as_alg(b, lvl))?;
                self.norm_alg(lvl, prod)
            }
        }
    }

    fn inv(&self, a: &Repr) -> Result<Repr> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lvl = a.level();
        if lvl == 0 {
            let Repr::Rat(r) = a else { unreachable!() };
            return Ok(Repr::Rat(r.recip()));
        }
        match &self.levels[lvl - 1] {
            Level::Transcendental { .. } => {
                let (num, den) = as_fraction(a, lvl);
                self.norm_ratfn(lvl, den, num)
            }
            Level::Algebraic { min_poly, .. } => {
                // Extended Euclid against the defining polynomial. A proper
                // common divisor is a zero divisor: split the level.
                let ac = as_alg(a, lvl);
                let (g, s) = self.p_half_exgcd(&ac, min_poly)?;
                if g.len() == 1 {
                    // g is monic, hence exactly 1: s * a ≡ 1 (mod m).
                    return self.norm_alg(lvl, s);
                }
                debug_assert!(g.len() < min_poly.len());
                let (q, r) = self.p_divrem(min_poly, &g)?;
                debug_assert!(self.p_trimmed_is_zero(&r));
                Err(self.split(lvl, g, q))
            }
        }
    }

    fn rebuild(&self, a: &Repr) -> Result<Repr> {
        // Re-normalize a representation in this tower (used after branch
        // splits replaced a defining polynomial).
        match a {
            Repr::Rat(_) => Ok(a.clone()),
            Repr::RatFn { lvl, num, den } => {
                let num = num.iter().map(|c| self.rebuild(c)).collect::<Result<Vec<_>>>()?;
                let den = den.iter().map(|c| self.rebuild(c)).collect::<Result<Vec<_>>>()?;
                self.norm_ratfn(*lvl, num, den)
            }
            Repr::Alg { lvl, coeffs } => {
                let coeffs = coeffs
                    .iter()
                    .map(|c| self.rebuild(c))
                    .collect::<Result<Vec<_>>>()?;
                self.norm_alg(*lvl, coeffs)
            }
        }
    }

    // ---- Normal forms ----

    fn norm_ratfn(&self, lvl: usize, mut num: Vec<Repr>, mut den: Vec<Repr>) -> Result<Repr> {
        p_trim(&mut num);
        p_trim(&mut den);
        if p_is_zero(&den) {
            return Err(Error::DivisionByZero);
        }
        if p_is_zero(&num) {
            return Ok(Repr::zero());
        }
        let g = self.p_gcd(&num, &den)?;
        if g.len() > 1 {
            num = self.p_divrem(&num, &g)?.0;
            den = self.p_divrem(&den, &g)?.0;
        }
        // Monic denominator pins the unit.
        let lc = den.last().expect("nonzero").clone();
        if !lc.is_one() {
            let c = self.inv(&lc)?;
            num = self.p_scale(&num, &c)?;
            den = self.p_scale(&den, &c)?;
        }
        if den.len() == 1 && num.len() == 1 {
            return Ok(num.pop().expect("len 1"));
        }
        Ok(Repr::RatFn { lvl, num, den })
    }

    fn norm_alg(&self, lvl: usize, mut coeffs: Vec<Repr>) -> Result<Repr> {
        let Level::Algebraic { min_poly, .. } = &self.levels[lvl - 1] else {
            unreachable!("norm_alg on non-algebraic level")
        };
        if coeffs.len() >= min_poly.len() {
            coeffs = self.p_divrem(&coeffs, min_poly)?.1;
        }
        p_trim(&mut coeffs);
        match coeffs.len() {
            0 => Ok(Repr::zero()),
            1 => Ok(coeffs.pop().expect("len 1")),
            _ => Ok(Repr::Alg { lvl, coeffs }),
        }
    }

    // ---- Dense polynomial helpers over lower-level coefficients ----

    fn p_trimmed_is_zero(&self, p: &[Repr]) -> bool {
        p.iter().all(Repr::is_zero)
    }

    fn p_add(&self, a: &[Repr], b: &[Repr]) -> Result<Vec<Repr>> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).cloned().unwrap_or_else(Repr::zero);
            let y = b.get(i).cloned().unwrap_or_else(Repr::zero);
            out.push(self.add(&x, &y)?);
        }
        p_trim(&mut out);
        Ok(out)
    }

    fn p_mul(&self, a: &[Repr], b: &[Repr]) -> Result<Vec<Repr>> {
        if p_is_zero(a) || p_is_zero(b) {
            return Ok(vec![]);
        }
        let mut out = vec![Repr::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let t = self.mul(x, y)?;
                out[i + j] = self.add(&out[i + j], &t)?;
            }
        }
        p_trim(&mut out);
        Ok(out)
    }

    fn p_scale(&self, a: &[Repr], c: &Repr) -> Result<Vec<Repr>> {
        let mut out = Vec::with_capacity(a.len());
        for x in a {
            out.push(self.mul(x, c)?);
        }
        p_trim(&mut out);
        Ok(out)
    }

    /// Division with remainder; the divisor's leading coefficient is inverted,
    /// which can split a lower algebraic level.
    fn p_divrem(&self, a: &[Repr], b: &[Repr]) -> Result<(Vec<Repr>, Vec<Repr>)> {
        let mut b = b.to_vec();
        p_trim(&mut b);
        if p_is_zero(&b) {
            return Err(Error::DivisionByZero);
        }
        let db = b.len() - 1;
        let lc_inv = self.inv(b.last().expect("nonzero"))?;
        let mut rem = a.to_vec();
        p_trim(&mut rem);
        if rem.len() <= db {
            return Ok((vec![], rem));
        }
        let mut quot = vec![Repr::zero(); rem.len() - db];
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = self.mul(rem.last().expect("nonzero"), &lc_inv)?;
            if !c.is_zero() {
                quot[dr - db] = c.clone();
                for (i, bc) in b.iter().enumerate() {
                    let t = self.mul(&c, bc)?;
                    rem[dr - db + i] = self.sub(&rem[dr - db + i], &t)?;
                }
            }
            rem.pop();
            p_trim(&mut rem);
            if rem.len() <= db {
                break;
            }
        }
        p_trim(&mut quot);
        Ok((quot, rem))
    }

    /// Monic gcd via the Euclidean algorithm.
    fn p_gcd(&self, a: &[Repr], b: &[Repr]) -> Result<Vec<Repr>> {
        let mut r0 = a.to_vec();
        let mut r1 = b.to_vec();
        p_trim(&mut r0);
        p_trim(&mut r1);
        while !p_is_zero(&r1) {
            let (_, rem) = self.p_divrem(&r0, &r1)?;
            r0 = r1;
            r1 = rem;
        }
        self.p_make_monic(r0)
    }

    fn p_make_monic(&self, mut p: Vec<Repr>) -> Result<Vec<Repr>> {
        p_trim(&mut p);
        if p.is_empty() {
            return Ok(p);
        }
        let lc = p.last().expect("nonzero").clone();
        if lc.is_one() {
            return Ok(p);
        }
        let c = self.inv(&lc)?;
        self.p_scale(&p, &c)
    }

    /// Half extended gcd: returns (monic g, s) with s*a ≡ g (mod b).
    fn p_half_exgcd(&self, a: &[Repr], b: &[Repr]) -> Result<(Vec<Repr>, Vec<Repr>)> {
        let mut r0 = a.to_vec();
        let mut r1 = b.to_vec();
        p_trim(&mut r0);
        p_trim(&mut r1);
        let mut s0 = vec![Repr::one()];
        let mut s1: Vec<Repr> = vec![];
        while !p_is_zero(&r1) {
            let (q, rem) = self.p_divrem(&r0, &r1)?;
            let qs = self.p_mul(&q, &s1)?;
            let ns = self.p_sub(&s0, &qs)?;
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = ns;
        }
        if p_is_zero(&r0) {
            return Ok((vec![], s0));
        }
        let lc = r0.last().expect("nonzero").clone();
        let c = self.inv(&lc)?;
        Ok((self.p_scale(&r0, &c)?, self.p_scale(&s0, &c)?))
    }

    fn p_sub(&self, a: &[Repr], b: &[Repr]) -> Result<Vec<Repr>> {
        let nb: Vec<Repr> = b.iter().map(|c| self.neg(c)).collect();
        self.p_add(a, &nb)
    }

    fn p_derivative(&self, a: &[Repr]) -> Result<Vec<Repr>> {
        if a.len() <= 1 {
            return Ok(vec![]);
        }
        let mut out = Vec::with_capacity(a.len() - 1);
        for (i, c) in a.iter().enumerate().skip(1) {
            let k = Repr::Rat(BigRational::from_integer(BigInt::from(i)));
            out.push(self.mul(c, &k)?);
        }
        p_trim(&mut out);
        Ok(out)
    }
}

fn p_trim(p: &mut Vec<Repr>) {
    while p.last().is_some_and(Repr::is_zero) {
        p.pop();
    }
}

fn p_is_zero(p: &[Repr]) -> bool {
    p.is_empty()
}

fn as_fraction(a: &Repr, lvl: usize) -> (Vec<Repr>, Vec<Repr>) {
    match a {
        Repr::RatFn { lvl: l, num, den } if *l == lvl => (num.clone(), den.clone()),
        _ => (vec![a.clone()], vec![Repr::one()]),
    }
}

fn as_alg(a: &Repr, lvl: usize) -> Vec<Repr> {
    match a {
        Repr::Alg { lvl: l, coeffs } if *l == lvl => coeffs.clone(),
        _ => vec![a.clone()],
    }
}

// ---- Public tower API ----------------------------------------------------

impl Tower {
    /// The bare rationals.
    pub fn rationals() -> Tower {
        Tower {
            inner: Arc::new(TowerInner { levels: vec![] }),
        }
    }

    pub fn level_count(&self) -> usize {
        self.inner.levels.len()
    }

    pub fn generator_names(&self) -> impl Iterator<Item = &str> {
        self.inner.levels.iter().map(Level::name)
    }

    pub fn find_generator(&self, name: &str) -> Option<usize> {
        self.inner.levels.iter().position(|l| l.name() == name)
    }

    /// Adjoin a free generator; arithmetic becomes rational functions in it.
    pub fn adjoin_transcendental(&self, name: &str) -> Result<Tower> {
        self.check_name(name)?;
        let mut levels = self.inner.levels.clone();
        levels.push(Level::Transcendental {
            name: name.to_string(),
        });
        Ok(Tower {
            inner: Arc::new(TowerInner { levels }),
        })
    }

    /// Adjoin an algebraic generator with defining polynomial `min_poly`
    /// (coefficients in `self`, ascending degree, degree ≥ 1). The polynomial
    /// is normalized monic and must be squarefree; it does not have to be
    /// irreducible — zero divisors split the level lazily.
    pub fn adjoin_algebraic(&self, name: &str, min_poly: &[FieldElement]) -> Result<Tower> {
        self.check_name(name)?;
        for c in min_poly {
            if !c.tower.compatible(self) {
                return Err(Error::TowerMismatch);
            }
        }
        let mut mp: Vec<Repr> = min_poly.iter().map(|c| c.repr.clone()).collect();
        p_trim(&mut mp);
        if mp.len() < 2 {
            return Err(Error::Internal(
                "defining polynomial must have degree >= 1".into(),
            ));
        }
        let t = &self.inner;
        mp = t.p_make_monic(mp)?;
        // Squarefree over characteristic zero: gcd(m, m') must be constant.
        let dm = t.p_derivative(&mp)?;
        let g = t.p_gcd(&mp, &dm)?;
        if g.len() > 1 {
            return Err(Error::NotSquarefree);
        }
        let mut levels = self.inner.levels.clone();
        levels.push(Level::Algebraic {
            name: name.to_string(),
            min_poly: mp,
        });
        Ok(Tower {
            inner: Arc::new(TowerInner { levels }),
        })
    }

    /// Defining-polynomial degree of an algebraic level, by generator name.
    pub fn algebraic_degree(&self, name: &str) -> Option<usize> {
        self.inner.levels.iter().find_map(|l| match l {
            Level::Algebraic { name: n, min_poly } if n == name => Some(min_poly.len() - 1),
            _ => None,
        })
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if name.is_empty() {
            return Err(Error::Internal("empty generator name".into()));
        }
        if self.find_generator(name).is_some() {
            return Err(Error::NameClash(name.to_string()));
        }
        Ok(())
    }

    /// Structural compatibility: same generator names and kinds level by
    /// level. Defining polynomials may differ (branch towers are compatible
    /// with their parent), so migrating elements re-reduces them.
    pub fn compatible(&self, other: &Tower) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        self.inner.levels.len() == other.inner.levels.len()
            && self
                .inner
                .levels
                .iter()
                .zip(other.inner.levels.iter())
                .all(|(a, b)| match (a, b) {
                    (Level::Transcendental { name: x }, Level::Transcendental { name: y }) => {
                        x == y
                    }
                    (Level::Algebraic { name: x, .. }, Level::Algebraic { name: y, .. }) => x == y,
                    _ => false,
                })
    }

    /// True when `other` extends `self` by zero or more levels (names/kinds
    /// agree on the common prefix).
    pub fn extends(&self, other: &Tower) -> bool {
        other.inner.levels.len() <= self.inner.levels.len()
            && other
                .inner
                .levels
                .iter()
                .zip(self.inner.levels.iter())
                .all(|(b, a)| match (a, b) {
                    (Level::Transcendental { name: x }, Level::Transcendental { name: y }) => {
                        x == y
                    }
                    (Level::Algebraic { name: x, .. }, Level::Algebraic { name: y, .. }) => x == y,
                    _ => false,
                })
    }

    /// A name of the form `prefix`, `prefix1`, `prefix2`, … not yet in use.
    pub fn fresh_name(&self, prefix: &str) -> String {
        if self.find_generator(prefix).is_none() {
            return prefix.to_string();
        }
        let mut i = 1usize;
        loop {
            let cand = format!("{prefix}{i}");
            if self.find_generator(&cand).is_none() {
                return cand;
            }
            i += 1;
        }
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

// ---- Field elements -------------------------------------------------------

/// An element of a coefficient tower, kept in canonical reduced form, with an
/// exact and decidable zero test.
#[derive(Clone, Debug)]
pub struct FieldElement {
    tower: Tower,
    repr: Repr,
}

impl FieldElement {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn zero(tower: &Tower) -> FieldElement {
        FieldElement {
            tower: tower.clone(),
            repr: Repr::zero(),
        }
    }

    pub fn one(tower: &Tower) -> FieldElement {
        FieldElement {
            tower: tower.clone(),
            repr: Repr::one(),
        }
    }

    pub fn from_rational(tower: &Tower, r: BigRational) -> FieldElement {
        FieldElement {
            tower: tower.clone(),
            repr: Repr::Rat(r),
        }
    }

    pub fn from_integer(tower: &Tower, n: i64) -> FieldElement {
        Self::from_rational(tower, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(tower: &Tower, num: i64, den: i64) -> FieldElement {
        assert!(den != 0, "zero denominator");
        Self::from_rational(
            tower,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    /// The generator with the given name, as an element.
    pub fn generator(tower: &Tower, name: &str) -> Result<FieldElement> {
        let idx = tower
            .find_generator(name)
            .ok_or_else(|| Error::Internal(format!("no generator named '{name}'")))?;
        let lvl = idx + 1;
        let gen = vec![Repr::zero(), Repr::one()];
        let repr = match &tower.inner.levels[idx] {
            Level::Transcendental { .. } => Repr::RatFn {
                lvl,
                num: gen,
                den: vec![Repr::one()],
            },
            Level::Algebraic { .. } => tower.inner.norm_alg(lvl, gen)?,
        };
        Ok(FieldElement {
            tower: tower.clone(),
            repr,
        })
    }

    fn ctx<'a>(&self, other: &'a FieldElement) -> Result<&'a Tower> {
        if !self.tower.compatible(&other.tower) {
            return Err(Error::TowerMismatch);
        }
        Ok(&other.tower)
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ctx(other)?;
        Ok(FieldElement {
            tower: self.tower.clone(),
            repr: self.tower.inner.add(&self.repr, &other.repr)?,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ctx(other)?;
        Ok(FieldElement {
            tower: self.tower.clone(),
            repr: self.tower.inner.sub(&self.repr, &other.repr)?,
        })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.ctx(other)?;
        Ok(FieldElement {
            tower: self.tower.clone(),
            repr: self.tower.inner.mul(&self.repr, &other.repr)?,
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        let inv = other.inv()?;
        self.mul(&inv)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement {
            tower: self.tower.clone(),
            repr: self.tower.inner.inv(&self.repr)?,
        })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            tower: self.tower.clone(),
            repr: self.tower.inner.neg(&self.repr),
        }
    }

    pub fn pow(&self, mut e: u32) -> Result<FieldElement> {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.tower);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.repr.is_one()
    }

    /// Exact equality. Can split (the difference has to be normalized).
    pub fn eq_elem(&self, other: &FieldElement) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// The value as a base rational, when it lives at level 0. Canonical
    /// forms are always demoted, so this is a faithful test.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Coordinates of this element in the power basis `1, α, α², …` of the
    /// named algebraic generator, which must be the tower's top level. The
    /// coordinates live in the same tower (they do not mention `α`).
    pub fn algebraic_coords(&self, name: &str) -> Result<Vec<FieldElement>> {
        let idx = self
            .tower
            .find_generator(name)
            .ok_or_else(|| Error::Internal(format!("no generator named '{name}'")))?;
        if idx + 1 != self.tower.level_count() {
            return Err(Error::Internal(
                "algebraic_coords: generator is not the top level".into(),
            ));
        }
        let lvl = idx + 1;
        match &self.repr {
            Repr::Alg { lvl: l, coeffs } if *l == lvl => Ok(coeffs
                .iter()
                .map(|c| FieldElement {
                    tower: self.tower.clone(),
                    repr: c.clone(),
                })
                .collect()),
            r if r.level() < lvl => Ok(vec![self.clone()]),
            _ => Err(Error::Internal(
                "algebraic_coords: unexpected representation".into(),
            )),
        }
    }

    /// Re-normalize this element in a branch tower (or any compatible tower).
    pub fn migrate(&self, to: &Tower) -> Result<FieldElement> {
        if self.tower == *to {
            return Ok(self.clone());
        }
        if !self.tower.compatible(to) && !to.extends(&self.tower) {
            return Err(Error::TowerMismatch);
        }
        Ok(FieldElement {
            tower: to.clone(),
            repr: to.inner.rebuild(&self.repr)?,
        })
    }

    /// Move the element into a prefix tower; it must not mention the
    /// generators above it.
    pub fn migrate_down(&self, to: &Tower) -> Result<FieldElement> {
        if self.tower == *to {
            return Ok(self.clone());
        }
        if !self.tower.extends(to) {
            return Err(Error::TowerMismatch);
        }
        if self.repr.level() > to.level_count() {
            return Err(Error::Internal(
                "element mentions generators beyond the target tower".into(),
            ));
        }
        Ok(FieldElement {
            tower: to.clone(),
            repr: to.inner.rebuild(&self.repr)?,
        })
    }

    /// Evaluate numerically, reading named generators from `bind`.
    pub fn eval_complex(
        &self,
        bind: &dyn Fn(&str) -> Option<num_complex::Complex64>,
    ) -> Result<num_complex::Complex64> {
        eval_repr(&self.tower, &self.repr, bind)
    }
}

fn eval_repr(
    tower: &Tower,
    repr: &Repr,
    bind: &dyn Fn(&str) -> Option<num_complex::Complex64>,
) -> Result<num_complex::Complex64> {
    use num_complex::Complex64;
    let eval_poly = |p: &[Repr], x: Complex64| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in p.iter().rev() {
            acc = acc * x + eval_repr(tower, c, bind)?;
        }
        Ok(acc)
    };
    match repr {
        Repr::Rat(r) => {
            let n = bigint_to_f64(r.numer());
            let d = bigint_to_f64(r.denom());
            Ok(Complex64::new(n / d, 0.0))
        }
        Repr::RatFn { lvl, num, den } => {
            let name = tower.inner.levels[*lvl - 1].name();
            let x = bind(name).ok_or_else(|| Error::UnboundParameter(name.to_string()))?;
            let n = eval_poly(num, x)?;
            let d = eval_poly(den, x)?;
            Ok(n / d)
        }
        Repr::Alg { lvl, coeffs } => {
            let name = tower.inner.levels[*lvl - 1].name();
            let x = bind(name).ok_or_else(|| Error::UnboundParameter(name.to_string()))?;
            eval_poly(coeffs, x)
        }
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

// ---- Canonical text form ---------------------------------------------------

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_repr(&self.tower, &self.repr, false))
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: polynomials in descending powers, fractions as
/// `(num)/(den)`; `wrap` asks for parentheses when the result is a sum.
fn fmt_repr(tower: &Tower, r: &Repr, wrap: bool) -> String {
    match r {
        Repr::Rat(q) => fmt_rat(q),
        Repr::RatFn { lvl, num, den } => {
            let name = tower.inner.levels[*lvl - 1].name();
            if den.len() == 1 {
                fmt_poly(tower, num, name, wrap)
            } else {
                format!(
                    "({})/({})",
                    fmt_poly(tower, num, name, false),
                    fmt_poly(tower, den, name, false)
                )
            }
        }
        Repr::Alg { lvl, coeffs } => {
            let name = tower.inner.levels[*lvl - 1].name();
            fmt_poly(tower, coeffs, name, wrap)
        }
    }
}

fn fmt_poly(tower: &Tower, p: &[Repr], var: &str, wrap: bool) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let pow = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let cs = fmt_repr(tower, c, true);
        let term = if pow.is_empty() {
            cs
        } else if cs == "1" {
            pow
        } else if cs == "-1" {
            format!("-{pow}")
        } else {
            format!("{cs}*{pow}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        if let Some(stripped) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    if wrap && terms.len() > 1 {
        format!("({out})")
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(t: &Tower, n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(t, n, d)
    }

    #[test]
    fn rational_arithmetic() {
        let t = Tower::rationals();
        let a = q(&t, 1, 2);
        let b = q(&t, 1, 3);
        let s = a.add(&b).unwrap();
        assert_eq!(s.to_string(), "5/6");
        let p = a.mul(&b).unwrap();
        assert_eq!(p.to_string(), "1/6");
        assert!(a.sub(&a).unwrap().is_zero());
        assert_eq!(a.inv().unwrap().to_string(), "2");
    }

    #[test]
    fn transcendental_identities() {
        let t = Tower::rationals().adjoin_transcendental("c").unwrap();
        let c = FieldElement::generator(&t, "c").unwrap();
        // c - c = 0 and c^2 - c*c = 0
        assert!(c.sub(&c).unwrap().is_zero());
        let c2 = c.mul(&c).unwrap();
        assert!(c2.sub(&c.mul(&c).unwrap()).unwrap().is_zero());
        // 1/(1+c) * (1+c) = 1
        let one = FieldElement::one(&t);
        let u = one.add(&c).unwrap();
        assert!(u.inv().unwrap().mul(&u).unwrap().is_one());
        // reduced fraction: (c^2-1)/(c-1) = c+1
        let num = c2.sub(&one).unwrap();
        let den = c.sub(&one).unwrap();
        let r = num.div(&den).unwrap();
        assert_eq!(r.to_string(), "c + 1");
    }

    #[test]
    fn algebraic_defining_relation() {
        // adjoin sqrt2 with t^2 - 2
        let t0 = Tower::rationals();
        let mp = [q(&t0, -2, 1), q(&t0, 0, 1), q(&t0, 1, 1)];
        let t = t0.adjoin_algebraic("s", &mp).unwrap();
        let s = FieldElement::generator(&t, "s").unwrap();
        let s2 = s.mul(&s).unwrap();
        assert_eq!(s2.to_string(), "2");
        // (1+s)^-1 = s - 1 (since (1+s)(s-1) = s^2-1 = 1)
        let one = FieldElement::one(&t);
        let inv = one.add(&s).unwrap().inv().unwrap();
        assert_eq!(inv.to_string(), "s - 1");
    }

    #[test]
    fn cube_root_reduction() {
        // t^3 - 2: alpha^3 + alpha = 2 + alpha
        let t0 = Tower::rationals();
        let mp = [q(&t0, -2, 1), q(&t0, 0, 1), q(&t0, 0, 1), q(&t0, 1, 1)];
        let t = t0.adjoin_algebraic("a", &mp).unwrap();
        let a = FieldElement::generator(&t, "a").unwrap();
        let v = a.pow(3).unwrap().add(&a).unwrap();
        assert_eq!(v.to_string(), "a + 2");
    }

    #[test]
    fn zero_divisor_split() {
        // alpha^2 - 1 is squarefree but reducible; inverting alpha - 1 splits.
        let t0 = Tower::rationals();
        let mp = [q(&t0, -1, 1), q(&t0, 0, 1), q(&t0, 1, 1)];
        let t = t0.adjoin_algebraic("a", &mp).unwrap();
        let a = FieldElement::generator(&t, "a").unwrap();
        let x = a.sub(&FieldElement::one(&t)).unwrap();
        match x.inv() {
            Err(Error::ZeroDivisorSplit { branches, .. }) => {
                assert_eq!(branches.len(), 2);
                // In one branch x migrates to 0, in the other it is invertible.
                let migrated: Vec<FieldElement> = branches
                    .iter()
                    .map(|b| x.migrate(b).unwrap())
                    .collect();
                let zeros = migrated.iter().filter(|m| m.is_zero()).count();
                assert_eq!(zeros, 1);
                let inv_ok = migrated.iter().filter(|m| m.inv().is_ok()).count();
                assert_eq!(inv_ok, 1);
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn not_squarefree_rejected() {
        let t0 = Tower::rationals();
        // (t-1)^2 = t^2 - 2t + 1
        let mp = [q(&t0, 1, 1), q(&t0, -2, 1), q(&t0, 1, 1)];
        assert!(matches!(
            t0.adjoin_algebraic("a", &mp),
            Err(Error::NotSquarefree)
        ));
    }

    #[test]
    fn mixed_tower() {
        // Q(c)[s]/(s^2 - c): s^2/c = 1
        let t1 = Tower::rationals().adjoin_transcendental("c").unwrap();
        let c = FieldElement::generator(&t1, "c").unwrap();
        let mp = [c.neg(), FieldElement::zero(&t1), FieldElement::one(&t1)];
        let t2 = t1.adjoin_algebraic("s", &mp).unwrap();
        let s = FieldElement::generator(&t2, "s").unwrap();
        let c2 = c.migrate(&t2).unwrap();
        let v = s.mul(&s).unwrap().div(&c2).unwrap();
        assert!(v.is_one());
    }

    #[test]
    fn field_axioms_random_rationals() {
        // Associativity / distributivity / inverse on a small deterministic set.
        let t = Tower::rationals();
        let vals: Vec<FieldElement> = (1..6)
            .flat_map(|n| (1..4).map(move |d| (n, d)))
            .map(|(n, d)| q(&t, n as i64 - 3, d as i64))
            .collect();
        for a in &vals {
            for b in &vals {
                for c in &vals {
                    let ab_c = a.add(b).unwrap().add(c).unwrap();
                    let a_bc = a.add(&b.add(c).unwrap()).unwrap();
                    assert!(ab_c.eq_elem(&a_bc).unwrap());
                    let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                    let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                    assert!(lhs.eq_elem(&rhs).unwrap());
                }
                if !a.is_zero() {
                    assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
                }
            }
        }
    }
}
