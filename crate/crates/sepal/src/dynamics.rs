//! Double-precision verification: orbits, tangent directions, iterated
//! tangents, and the sampled checks on the saddle-node chart domain.
//!
//! The symbolic layer stays exact; here exact polynomial maps are compiled
//! against user-supplied numeric bindings for the tower generators, and
//! blow-up transforms are evaluated through the chart conjugation of their
//! parent (no truncation error). Convergence thresholds are configurable and
//! reported, never silent.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::jet::Jet2;
use crate::error::{Error, Result};
use crate::germs::{Chart, Diffeo, DiffeoSource};

type C2 = (Complex64, Complex64);

/// A compiled numeric evaluator of a plane map.
#[derive(Clone)]
pub enum NumericMap {
    /// Polynomial components as coefficient lists.
    Poly {
        comp1: Vec<(u32, u32, Complex64)>,
        comp2: Vec<(u32, u32, Complex64)>,
    },
    /// Rational components `num/den` (exact closed forms).
    Rational {
        num1: Vec<(u32, u32, Complex64)>,
        den1: Vec<(u32, u32, Complex64)>,
        num2: Vec<(u32, u32, Complex64)>,
        den2: Vec<(u32, u32, Complex64)>,
    },
    /// Blow-up conjugation of a parent map: evaluate the parent downstairs
    /// and lift back through the chart.
    BlowUp {
        parent: Arc<NumericMap>,
        chart: Chart,
        center: Complex64,
    },
}

fn eval_terms(terms: &[(u32, u32, Complex64)], z: C2) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(i, j, c) in terms {
        acc += c * z.0.powu(i) * z.1.powu(j);
    }
    acc
}

fn jet_terms(
    j: &Jet2,
    bind: &dyn Fn(&str) -> Option<Complex64>,
) -> Result<Vec<(u32, u32, Complex64)>> {
    let mut out = Vec::with_capacity(j.term_count());
    for (&(a, b), c) in j.terms() {
        out.push((a, b, c.eval_complex(bind)?));
    }
    Ok(out)
}

impl NumericMap {
    /// Compile a diffeomorphism against numeric bindings. Exact maps and
    /// blow-up chains evaluate exactly; plain jets evaluate their stored
    /// truncation.
    pub fn compile(f: &Diffeo, bindings: &HashMap<String, f64>) -> Result<NumericMap> {
        let bind = |name: &str| bindings.get(name).map(|&v| Complex64::new(v, 0.0));
        match f.source() {
            DiffeoSource::Exact | DiffeoSource::Jet => Ok(NumericMap::Poly {
                comp1: jet_terms(f.map1(), &bind)?,
                comp2: jet_terms(f.map2(), &bind)?,
            }),
            DiffeoSource::BlowUp {
                parent,
                chart,
                center,
            } => Ok(NumericMap::BlowUp {
                parent: Arc::new(NumericMap::compile(parent, bindings)?),
                chart: *chart,
                center: center.eval_complex(&bind)?,
            }),
        }
    }

    pub fn eval(&self, z: C2) -> C2 {
        match self {
            NumericMap::Poly { comp1, comp2 } => (eval_terms(comp1, z), eval_terms(comp2, z)),
            NumericMap::Rational {
                num1,
                den1,
                num2,
                den2,
            } => (
                eval_terms(num1, z) / eval_terms(den1, z),
                eval_terms(num2, z) / eval_terms(den2, z),
            ),
            NumericMap::BlowUp {
                parent,
                chart,
                center,
            } => {
                // chart coordinates (v1, v2), divisor at v1 = 0
                let v2 = z.1 + center;
                let down = match chart {
                    Chart::T => (z.0, z.0 * v2),
                    Chart::S => (z.0 * v2, z.0),
                };
                let img = parent.eval(down);
                match chart {
                    Chart::T => (img.0, img.1 / img.0 - center),
                    Chart::S => (img.1, img.0 / img.1 - center),
                }
            }
        }
    }
}

/// A numerically computed orbit.
#[derive(Clone, Debug)]
pub struct NumericOrbit {
    pub points: Vec<C2>,
}

impl NumericOrbit {
    pub fn last(&self) -> C2 {
        *self.points.last().expect("nonempty orbit")
    }
}

fn norm(z: C2) -> f64 {
    (z.0.norm_sqr() + z.1.norm_sqr()).sqrt()
}

/// Iterate `n` steps from `z0`; stops with `Escape` beyond radius
/// `escape_radius` (default 10).
pub fn iterate(map: &NumericMap, z0: C2, n: usize, escape_radius: f64) -> Result<NumericOrbit> {
    let mut points = Vec::with_capacity(n + 1);
    let mut z = z0;
    points.push(z);
    for step in 0..n {
        z = map.eval(z);
        if !z.0.is_finite() || !z.1.is_finite() || norm(z) > escape_radius {
            return Err(Error::Escape { step });
        }
        points.push(z);
    }
    Ok(NumericOrbit { points })
}

/// Convergence thresholds for orbit post-processing.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceOptions {
    /// Length of the tail whose norms must decrease.
    pub tail: usize,
    /// The final norm must be below `factor` times the starting norm.
    pub factor: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            tail: 50,
            factor: 1e-4,
        }
    }
}

fn check_convergent(orbit: &NumericOrbit, opts: &ConvergenceOptions) -> Result<()> {
    let n = orbit.points.len();
    if n < opts.tail + 1 {
        return Err(Error::NotConvergent);
    }
    let start = norm(orbit.points[0]).max(f64::MIN_POSITIVE);
    let tail = &orbit.points[n - opts.tail..];
    for w in tail.windows(2) {
        if norm(w[1]) > norm(w[0]) {
            return Err(Error::NotConvergent);
        }
    }
    if norm(*tail.last().expect("tail")) > opts.factor * start {
        return Err(Error::NotConvergent);
    }
    Ok(())
}

/// Estimated tangent direction of a convergent orbit, as a normalized
/// projective pair with a convergence residual (chordal distance between the
/// last two normalized points).
pub fn tangent_direction(
    orbit: &NumericOrbit,
    opts: &ConvergenceOptions,
) -> Result<((Complex64, Complex64), f64)> {
    check_convergent(orbit, opts)?;
    let dir = |z: C2| -> (Complex64, Complex64) {
        let n = norm(z);
        (z.0 / n, z.1 / n)
    };
    let n = orbit.points.len();
    let last = dir(orbit.points[n - 1]);
    let prev = dir(orbit.points[n - 2]);
    let residual = chordal(last, prev);
    Ok((last, residual))
}

/// Chordal (projective) distance between two nonzero direction pairs.
pub fn chordal(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    let cross = a.0 * b.1 - a.1 * b.0;
    let na = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt();
    let nb = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    cross.norm() / (na * nb)
}

/// One level of the iterated-tangent lift.
#[derive(Clone, Debug)]
pub struct TangentLevel {
    pub chart: Chart,
    pub value: Complex64,
    pub residual: f64,
}

/// Lift a convergent orbit through `depth` blow-ups, reporting the limit
/// chart point at each level. At each level the orbit in chart coordinates
/// must converge to a point of the divisor; its `v2`-limit is estimated from
/// the tail.
pub fn iterated_tangents(
    orbit: &NumericOrbit,
    depth: usize,
    opts: &ConvergenceOptions,
) -> Result<Vec<TangentLevel>> {
    check_convergent(orbit, opts)?;
    let mut pts: Vec<C2> = orbit.points.clone();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        // choose the chart from the tail direction
        let last = *pts.last().expect("nonempty");
        let chart = if last.0.norm() >= last.1.norm() {
            Chart::T
        } else {
            Chart::S
        };
        let lifted: Vec<C2> = pts
            .iter()
            .map(|&(x, y)| match chart {
                Chart::T => (x, y / x),
                Chart::S => (y, x / y),
            })
            .collect();
        // limit of v2 along the tail
        let tail_len = opts.tail.min(lifted.len().saturating_sub(1)).max(2);
        let tail = &lifted[lifted.len() - tail_len..];
        let value = tail.last().expect("tail").1;
        let spread = tail
            .iter()
            .map(|p| (p.1 - value).norm())
            .fold(0.0f64, f64::max);
        if !value.is_finite() || spread > 0.1 * (1.0 + value.norm()) {
            return Err(Error::NotConvergent);
        }
        out.push(TangentLevel {
            chart,
            value,
            residual: spread,
        });
        // recentre for the next level
        pts = lifted.into_iter().map(|(v1, v2)| (v1, v2 - value)).collect();
    }
    Ok(out)
}

/// The saddle-node chart domain: four inequalities in `(z, u)`.
#[derive(Clone, Copy, Debug)]
pub struct VivasDomain {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub big_m: u32,
    pub r: u32,
    pub m: u32,
    pub p: u32,
}

impl VivasDomain {
    pub fn contains(&self, z: Complex64, u: Complex64) -> bool {
        let zu = z.powu(self.r) * u.powu(self.m);
        let up = u.powu(self.p);
        (zu - self.epsilon).norm() < self.epsilon
            && zu.arg().abs() < self.eta
            && (up - self.delta).norm() < self.delta
            && z.norm() < u.norm().powi(self.big_m as i32)
    }

    /// Rejection-sample a point of the domain; `None` when the draw misses.
    /// `u` is drawn from the p-th roots of the delta-disk; `z` from a full
    /// angular sweep below the `|z| < |u|^M` cap, then all four conditions
    /// are re-verified.
    fn sample(&self, rng: &mut impl FnMut() -> f64) -> Option<(Complex64, Complex64)> {
        use std::f64::consts::PI;
        // u from |u^p - delta| < delta, random branch of the p-th root
        let rho = rng().sqrt();
        let theta = (rng() * 2.0 - 1.0) * PI;
        let w = self.delta + self.delta * rho * Complex64::new(theta.cos(), theta.sin());
        let branch = (rng() * self.p as f64).floor() as i32;
        let u = w.powf(1.0 / self.p as f64)
            * Complex64::from_polar(1.0, 2.0 * PI * branch as f64 / self.p as f64);
        let cap = u.norm().powi(self.big_m as i32);
        let z = Complex64::from_polar(rng() * cap, (rng() * 2.0 - 1.0) * PI);
        if self.contains(z, u) {
            Some((z, u))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct VivasReport {
    pub samples_drawn: usize,
    pub samples_in_domain: usize,
    pub invariant: usize,
    pub invariance_rate: f64,
    /// Smallest slack of the four inequalities over the images.
    pub margin: f64,
    pub empty_domain: bool,
    /// arg(z^r u^m) at the start vs after the test orbit.
    pub arg_start: f64,
    pub arg_end: f64,
    /// Fitted slope of log|z_n| against log|u_n| on the orbit tail.
    pub exponent_slope: f64,
    /// First index from which |z_n| <= C |u_n|^N held to the end.
    pub exponent_n0: Option<usize>,
    pub exponent_constant: f64,
}

/// Sampled checks on the saddle-node chart model: domain invariance, the
/// drift of `arg(z^r u^m)` toward the positive real axis, and the asymptotic
/// exponent bound `|z_n| ≤ C |u_n|^N`.
pub fn vivas_checks(
    map: &NumericMap,
    domain: &VivasDomain,
    samples: usize,
    exponent_n: u32,
    seed: u64,
) -> Result<VivasReport> {
    // shape sanity: near a reference point the increments must match the
    // normalized displayed form (a = c = -1)
    let z0 = Complex64::new(0.02, 0.0);
    let u0 = Complex64::new(0.05, 0.0);
    let img = map.eval((z0, u0));
    let a_est = (img.0 - z0) / (z0.powu(domain.r + 1) * u0.powu(domain.m));
    let c_est = (img.1 - u0) / (z0.powu(domain.r) * u0.powu(domain.m + domain.p + 1));
    if (a_est + 1.0).norm() > 0.25 || (c_est + 1.0).norm() > 0.25 {
        return Err(Error::ShapeMismatch(format!(
            "normalized coefficients estimate a = {a_est}, c = {c_est}; expected -1"
        )));
    }
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut rng = move || {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut drawn = 0usize;
    let mut in_domain = Vec::new();
    let mut attempts = 0usize;
    while in_domain.len() < samples && attempts < samples * 200 {
        attempts += 1;
        drawn += 1;
        if let Some(p) = domain.sample(&mut rng) {
            in_domain.push(p);
        }
    }
    if in_domain.is_empty() {
        return Ok(VivasReport {
            samples_drawn: drawn,
            samples_in_domain: 0,
            invariant: 0,
            invariance_rate: 0.0,
            margin: 0.0,
            empty_domain: true,
            arg_start: 0.0,
            arg_end: 0.0,
            exponent_slope: 0.0,
            exponent_n0: None,
            exponent_constant: 0.0,
        });
    }
    let mut invariant = 0usize;
    let mut margin = f64::INFINITY;
    for &(z, u) in &in_domain {
        let (z1, u1) = map.eval((z, u));
        if domain.contains(z1, u1) {
            invariant += 1;
            let zu = z1.powu(domain.r) * u1.powu(domain.m);
            let up = u1.powu(domain.p);
            let slack = [
                domain.epsilon - (zu - domain.epsilon).norm(),
                domain.eta - zu.arg().abs(),
                domain.delta - (up - domain.delta).norm(),
                u1.norm().powi(domain.big_m as i32) - z1.norm(),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            margin = margin.min(slack);
        }
    }
    // arg drift and exponent along one long orbit from the first sample
    let (z, u) = in_domain[0];
    let n_steps = 4000;
    let mut zs = Vec::with_capacity(n_steps);
    let mut cur = (z, u);
    for _ in 0..n_steps {
        zs.push(cur);
        cur = map.eval(cur);
        if !cur.0.is_finite() || !cur.1.is_finite() {
            break;
        }
    }
    let arg_of = |(z, u): C2| (z.powu(domain.r) * u.powu(domain.m)).arg().abs();
    let arg_start = arg_of(zs[0]);
    let arg_end = arg_of(*zs.last().expect("orbit"));
    // exponent: fit on the second half
    let half = zs.len() / 2;
    let pairs: Vec<(f64, f64)> = zs[half..]
        .iter()
        .filter(|(z, u)| z.norm() > 0.0 && u.norm() > 0.0)
        .map(|&(z, u)| (u.norm().ln(), z.norm().ln()))
        .collect();
    let slope = fit_slope(&pairs);
    // explicit n0 for |z_n| <= C |u_n|^N with C fixed from the candidate n0
    let mut n0 = None;
    let mut constant = 0.0;
    'outer: for cand in 0..zs.len() {
        let (zc, uc) = zs[cand];
        if uc.norm() == 0.0 {
            continue;
        }
        let c = zc.norm() / uc.norm().powi(exponent_n as i32);
        for &(zn, un) in &zs[cand..] {
            if zn.norm() > (c * 1.0000001) * un.norm().powi(exponent_n as i32) {
                continue 'outer;
            }
        }
        n0 = Some(cand);
        constant = c;
        break;
    }
    Ok(VivasReport {
        samples_drawn: drawn,
        samples_in_domain: in_domain.len(),
        invariant,
        invariance_rate: invariant as f64 / in_domain.len() as f64,
        margin,
        empty_domain: false,
        arg_start,
        arg_end,
        exponent_slope: slope,
        exponent_n0: n0,
        exponent_constant: constant,
    })
}

fn fit_slope(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return 0.0;
    }
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// CSV dump of an orbit (`n,re1,im1,re2,im2`).
pub fn orbit_to_csv(orbit: &NumericOrbit) -> String {
    let mut out = String::from("n,re1,im1,re2,im2\n");
    for (i, (a, b)) in orbit.points.iter().enumerate() {
        out.push_str(&format!("{i},{},{},{},{}\n", a.re, a.im, b.re, b.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moebius_contraction() -> NumericMap {
        // (x/(1-x), y): exact rational evaluation
        NumericMap::Rational {
            num1: vec![(1, 0, Complex64::new(1.0, 0.0))],
            den1: vec![
                (0, 0, Complex64::new(1.0, 0.0)),
                (1, 0, Complex64::new(-1.0, 0.0)),
            ],
            num2: vec![(0, 1, Complex64::new(1.0, 0.0))],
            den2: vec![(0, 0, Complex64::new(1.0, 0.0))],
        }
    }

    #[test]
    fn closed_form_orbit() {
        // from x0 = -0.1: x_n = x0 / (1 - n x0) -> 0 monotonically
        let map = moebius_contraction();
        let x0 = -0.1;
        let orbit = iterate(&map, (Complex64::new(x0, 0.0), Complex64::new(0.0, 0.0)), 10_000, 10.0)
            .unwrap();
        for (n, p) in orbit.points.iter().enumerate() {
            let expect = x0 / (1.0 - n as f64 * x0);
            assert!(
                (p.0.re - expect).abs() <= 1e-12 * expect.abs().max(1e-300),
                "step {n}: {} vs {expect}",
                p.0.re
            );
        }
    }

    #[test]
    fn identity_orbit_constant() {
        let map = NumericMap::Poly {
            comp1: vec![(1, 0, Complex64::new(1.0, 0.0))],
            comp2: vec![(0, 1, Complex64::new(1.0, 0.0))],
        };
        let orbit = iterate(&map, (Complex64::new(0.3, 0.1), Complex64::new(0.2, 0.0)), 100, 10.0)
            .unwrap();
        assert!(orbit.points.iter().all(|p| (p.0 - orbit.points[0].0).norm() == 0.0));
    }

    #[test]
    fn doubling_escapes() {
        let map = NumericMap::Poly {
            comp1: vec![(1, 0, Complex64::new(2.0, 0.0))],
            comp2: vec![(0, 1, Complex64::new(1.0, 0.0))],
        };
        let r = iterate(&map, (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), 100, 10.0);
        assert!(matches!(r, Err(Error::Escape { .. })));
    }

    #[test]
    fn tangent_direction_of_contraction() {
        let map = moebius_contraction();
        let orbit = iterate(&map, (Complex64::new(-0.1, 0.0), Complex64::new(0.0, 0.0)), 200_000, 10.0)
            .unwrap();
        let ((a, b), res) = tangent_direction(&orbit, &ConvergenceOptions::default()).unwrap();
        assert!(res < 1e-9);
        // direction [1:0]
        assert!(b.norm() < 1e-12 && (a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iterated_tangents_of_axis_orbit() {
        let map = moebius_contraction();
        let orbit = iterate(&map, (Complex64::new(-0.1, 0.0), Complex64::new(0.0, 0.0)), 200_000, 10.0)
            .unwrap();
        let levels = iterated_tangents(&orbit, 3, &ConvergenceOptions::default()).unwrap();
        for l in &levels {
            assert_eq!(l.chart, Chart::T);
            assert!(l.value.norm() < 1e-12);
        }
        // two different starts in the same petal share the sequence
        let orbit2 = iterate(&map, (Complex64::new(-0.05, 0.0), Complex64::new(0.0, 0.0)), 200_000, 10.0)
            .unwrap();
        let levels2 = iterated_tangents(&orbit2, 3, &ConvergenceOptions::default()).unwrap();
        for (a, b) in levels.iter().zip(levels2.iter()) {
            assert_eq!(a.chart, b.chart);
            assert!((a.value - b.value).norm() < 1e-9);
        }
    }

    #[test]
    fn non_convergent_detected() {
        // fixed first coordinate: orbit of (x, y + x^2) from (0.5, 0)
        let map = NumericMap::Poly {
            comp1: vec![(1, 0, Complex64::new(1.0, 0.0))],
            comp2: vec![(0, 1, Complex64::new(1.0, 0.0)), (2, 0, Complex64::new(1.0, 0.0))],
        };
        let orbit = iterate(&map, (Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0)), 200, 10.0)
            .unwrap();
        assert!(matches!(
            tangent_direction(&orbit, &ConvergenceOptions::default()),
            Err(Error::NotConvergent)
        ));
    }

    #[test]
    fn vivas_curated_shape() {
        // F = (z - z^2, u - z u^2): r = 1, m = 0, p = 1, a = c = -1
        let map = NumericMap::Poly {
            comp1: vec![
                (1, 0, Complex64::new(1.0, 0.0)),
                (2, 0, Complex64::new(-1.0, 0.0)),
            ],
            comp2: vec![
                (0, 1, Complex64::new(1.0, 0.0)),
                (1, 2, Complex64::new(-1.0, 0.0)),
            ],
        };
        let domain = VivasDomain {
            epsilon: 0.1,
            delta: 0.1,
            eta: 0.3,
            big_m: 2,
            r: 1,
            m: 0,
            p: 1,
        };
        let report = vivas_checks(&map, &domain, 1000, 3, 0xC0FFEE).unwrap();
        assert!(!report.empty_domain);
        assert!(report.samples_in_domain >= 1000);
        assert!(
            report.invariance_rate >= 0.99,
            "invariance rate {}",
            report.invariance_rate
        );
        assert!(report.arg_end <= report.arg_start + 1e-9);
        assert!(report.exponent_slope >= 3.0, "slope {}", report.exponent_slope);
        assert!(report.exponent_n0.is_some());
    }

    #[test]
    fn empty_domain_flagged() {
        let map = NumericMap::Poly {
            comp1: vec![
                (1, 0, Complex64::new(1.0, 0.0)),
                (2, 0, Complex64::new(-1.0, 0.0)),
            ],
            comp2: vec![
                (0, 1, Complex64::new(1.0, 0.0)),
                (1, 2, Complex64::new(-1.0, 0.0)),
            ],
        };
        // degenerate parameter choice: the angular sector collapses
        let domain = VivasDomain {
            epsilon: 0.1,
            delta: 0.1,
            eta: 0.0,
            big_m: 2,
            r: 1,
            m: 0,
            p: 1,
        };
        let report = vivas_checks(&map, &domain, 50, 3, 1).unwrap();
        assert!(report.empty_domain);
    }
}
