//! Univariate truncated series and Laurent residues at the origin.

use crate::algebra::tower::FieldElement;
use crate::algebra::upoly::UniPoly;
use crate::error::{Error, Result};

/// A univariate series known up to a certified degree (`None` = exact
/// polynomial, i.e. all higher coefficients are zero).
#[derive(Clone, Debug)]
pub struct USeries {
    poly: UniPoly,
    prec: Option<u32>,
}

impl USeries {
    pub fn new(poly: UniPoly, prec: Option<u32>) -> USeries {
        let poly = match prec {
            Some(p) => {
                let coeffs = poly
                    .coeffs()
                    .iter()
                    .take(p as usize + 1)
                    .cloned()
                    .collect();
                UniPoly::from_coeffs(poly.tower(), poly.var(), coeffs)
            }
            None => poly,
        };
        USeries { poly, prec }
    }

    pub fn exact(poly: UniPoly) -> USeries {
        USeries { poly, prec: None }
    }

    pub fn poly(&self) -> &UniPoly {
        &self.poly
    }

    pub fn prec(&self) -> Option<u32> {
        self.prec
    }

    pub fn coeff(&self, i: u32) -> Result<FieldElement> {
        if let Some(p) = self.prec {
            if i > p {
                return Err(Error::InsufficientPrecision { needed: i, have: p });
            }
        }
        Ok(self.poly.coeff(i as usize))
    }

    /// Order of vanishing at 0; truncations that look like zero cannot
    /// certify one.
    pub fn valuation(&self) -> Result<u32> {
        match self.poly.valuation() {
            Some(v) => Ok(v as u32),
            None => match self.prec {
                Some(p) => Err(Error::InsufficientPrecision {
                    needed: p + 1,
                    have: p,
                }),
                None => Err(Error::DivisionByZero),
            },
        }
    }

    pub fn is_zero_poly(&self) -> bool {
        self.poly.is_zero()
    }
}

/// Residue at 0 of the Laurent expansion `numer / denom`.
///
/// With `denom = x^m · u(x)` for a unit `u`, the residue is the coefficient
/// of `x^{m-1}` in `numer · u^{-1}`; this needs `numer` certified to degree
/// `m - 1` and `denom` certified to degree `2m - 1`, otherwise
/// `InsufficientPrecision` asks the caller to recompute with more terms.
pub fn laurent_residue(numer: &USeries, denom: &USeries) -> Result<FieldElement> {
    let tower = denom.poly().tower().clone();
    let m = denom.valuation()?;
    if m == 0 {
        // Regular denominator: numer/denom is holomorphic, residue 0.
        return Ok(FieldElement::zero(&tower));
    }
    let need = m - 1;
    if let Some(p) = numer.prec() {
        if p < need {
            return Err(Error::InsufficientPrecision { needed: need, have: p });
        }
    }
    if let Some(p) = denom.prec() {
        if p < 2 * m - 1 {
            return Err(Error::InsufficientPrecision {
                needed: 2 * m - 1,
                have: p,
            });
        }
    }
    // Unit part u with u_i = denom_{m+i}; invert as a power series to degree
    // m - 1: v_0 = 1/u_0, v_k = -(sum_{i=1..k} u_i v_{k-i}) / u_0.
    let u = |i: u32| denom.poly().coeff((m + i) as usize);
    let u0_inv = u(0).inv()?;
    let mut v: Vec<FieldElement> = vec![u0_inv.clone()];
    for k in 1..=need {
        let mut acc = FieldElement::zero(&tower);
        for i in 1..=k {
            acc = acc.add(&u(i).mul(&v[(k - i) as usize])?)?;
        }
        v.push(acc.neg().mul(&u0_inv)?);
    }
    // Residue = sum_{i+j = m-1} numer_i v_j.
    let mut res = FieldElement::zero(&tower);
    for i in 0..=need {
        let n = numer.poly().coeff(i as usize);
        if n.is_zero() {
            continue;
        }
        res = res.add(&n.mul(&v[(need - i) as usize])?)?;
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tower::Tower;

    fn up(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_integer_coeffs(&Tower::rationals(), "x", coeffs)
    }

    #[test]
    fn simple_pole() {
        // (lambda, x) -> lambda, with lambda = 7
        let r = laurent_residue(&USeries::exact(up(&[7])), &USeries::exact(up(&[0, 1]))).unwrap();
        assert_eq!(r.to_string(), "7");
    }

    #[test]
    fn no_residue_term() {
        // (1, x^2) -> 0
        let r =
            laurent_residue(&USeries::exact(up(&[1])), &USeries::exact(up(&[0, 0, 1]))).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn partial_fractions_case() {
        // (1, x^2 - x) -> -1 since 1/(x(x-1)) = -1/x + 1/(x-1)
        let r =
            laurent_residue(&USeries::exact(up(&[1])), &USeries::exact(up(&[0, -1, 1]))).unwrap();
        assert_eq!(r.to_string(), "-1");
    }

    #[test]
    fn precision_demanded() {
        // denominator of valuation 2 known only to degree 2 cannot certify
        let denom = USeries::new(up(&[0, 0, 1]), Some(2));
        let numer = USeries::new(up(&[1, 5]), Some(0));
        assert!(matches!(
            laurent_residue(&numer, &denom),
            Err(Error::InsufficientPrecision { .. })
        ));
        // with enough certified terms it passes and reads numer coeff 1
        let denom = USeries::new(up(&[0, 0, 1]), Some(3));
        let numer = USeries::new(up(&[1, 5]), Some(1));
        let r = laurent_residue(&numer, &denom).unwrap();
        assert_eq!(r.to_string(), "5");
    }

    /// Brute-force oracle: residue via explicit series division to a large
    /// cutoff. Used by the randomized agreement test below.
    fn residue_bruteforce(numer: &UniPoly, denom: &UniPoly, cutoff: usize) -> FieldElement {
        let tower = denom.tower().clone();
        let m = denom.valuation().expect("nonzero denom");
        // series quotient q with numer = denom * q + O(x^cutoff), solved
        // coefficient by coefficient after shifting by m
        let u: Vec<FieldElement> = (0..cutoff).map(|i| denom.coeff(m + i)).collect();
        let mut q: Vec<FieldElement> = Vec::new();
        for k in 0..cutoff {
            let mut acc = numer.coeff(k);
            for i in 1..=k {
                acc = acc.sub(&u[i].mul(&q[k - i]).unwrap()).unwrap();
            }
            q.push(acc.div(&u[0]).unwrap());
        }
        if m == 0 {
            FieldElement::zero(&tower)
        } else {
            q[m - 1].clone()
        }
    }

    #[test]
    fn agrees_with_bruteforce_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_0001);
        let tower = Tower::rationals();
        for _ in 0..100 {
            let val = rng.gen_range(0..=4usize);
            let mut dvec = vec![0i64; val];
            dvec.push(*[1, -1, 2, -3].get(rng.gen_range(0..4)).unwrap());
            for _ in 0..rng.gen_range(0..4) {
                dvec.push(rng.gen_range(-5..=5));
            }
            let denom = UniPoly::from_integer_coeffs(&tower, "x", &dvec);
            let nvec: Vec<i64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(-5..=5)).collect();
            let numer = UniPoly::from_integer_coeffs(&tower, "x", &nvec);
            if numer.is_zero() {
                continue;
            }
            let got = laurent_residue(&USeries::exact(numer.clone()), &USeries::exact(denom.clone()))
                .unwrap();
            let want = residue_bruteforce(&numer, &denom, 12);
            assert!(got.eq_elem(&want).unwrap(), "residue mismatch");
        }
    }
}
