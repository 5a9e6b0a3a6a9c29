//! Offspring densities and the branching kernel.
//!
//! A parent of type `x` has up to four candidate children. The type of child
//! `i` is `(a y - x - s_i)`-distributed as a difference of two uniforms, so its
//! density is `a f(a y - x - s_i)` with `f` the triangular density on
//! `[-t, t]` and shifts `s_1 = -h`, `s_2 = s_4 = 0`, `s_3 = h`,
//! `h = 1/2 + a/2 - b`. Every integral here is exact.

use serde::Serialize;

use crate::params::Params;
use crate::typespace::TypeSpace;
use crate::{Error, Result};

/// Triangular density on `[-t, t]`.
pub fn triangular(z: f64, t: f64) -> f64 {
    let d = t - z.abs();
    if d <= 0.0 {
        0.0
    } else {
        d / (t * t)
    }
}

/// Distribution function of [`triangular`].
pub fn triangular_cdf(z: f64, t: f64) -> f64 {
    if z <= -t {
        0.0
    } else if z >= t {
        1.0
    } else if z <= 0.0 {
        let d = z + t;
        d * d / (2.0 * t * t)
    } else {
        let d = t - z;
        1.0 - d * d / (2.0 * t * t)
    }
}

/// Intercepts of the lines `l_j(x) = x / a + intercept_j`, `j = 1..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFamily {
    pub intercepts: [f64; 6],
}

impl LineFamily {
    pub fn new(p: &Params) -> Self {
        let a = p.a();
        let i1 = (1.0 - a - 2.0 * p.b()) / a;
        let i3 = p.t() / a;
        Self {
            intercepts: [i1, 2.0, i3, -i3, -2.0, -i1],
        }
    }

    pub fn eval(&self, j: usize, x: f64, a: f64) -> Result<f64> {
        if !(1..=6).contains(&j) {
            return Err(Error::BadIndex(j));
        }
        Ok(x / a + self.intercepts[j - 1])
    }
}

pub fn line_eval(j: usize, x: f64, p: &Params) -> Result<f64> {
    LineFamily::new(p).eval(j, x, p.a())
}

/// The open stripe `(l_{2k}(x), l_{2k-1}(x))`, `k = 1..=3`.
///
/// Stripe 1 carries child 3, stripe 2 children 2 and 4, stripe 3 child 1.
pub fn stripe(k: usize, x: f64, p: &Params) -> Result<(f64, f64)> {
    if !(1..=3).contains(&k) {
        return Err(Error::BadIndex(k));
    }
    let lines = LineFamily::new(p);
    Ok((
        lines.eval(2 * k, x, p.a())?,
        lines.eval(2 * k - 1, x, p.a())?,
    ))
}

/// Shift `s_i` of child `i`.
pub fn shift(i: usize, p: &Params) -> Result<f64> {
    match i {
        1 => Ok(-p.side_shift()),
        2 | 4 => Ok(0.0),
        3 => Ok(p.side_shift()),
        _ => Err(Error::BadIndex(i)),
    }
}

/// Density of `Phi_i(x)` at `y` (restricted to `[-1, 1]`).
pub fn phi_density(i: usize, x: f64, y: f64, p: &Params) -> Result<f64> {
    let s = shift(i, p)?;
    Ok(density_with_shift(s, x, y, p))
}

fn density_with_shift(s: f64, x: f64, y: f64, p: &Params) -> f64 {
    if !(-1.0..=1.0).contains(&y) {
        return 0.0;
    }
    let a = p.a();
    a * triangular(a * y - x - s, p.t())
}

/// `P(Phi_i(x) in [lo, hi])` for `[lo, hi] ⊂ [-1, 1]`.
fn mass_with_shift(s: f64, x: f64, lo: f64, hi: f64, p: &Params) -> f64 {
    let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
    if lo >= hi {
        return 0.0;
    }
    let (a, t) = (p.a(), p.t());
    triangular_cdf(a * hi - x - s, t) - triangular_cdf(a * lo - x - s, t)
}

/// `P(Phi_i(x) in T)`.
pub fn mass_in(i: usize, x: f64, p: &Params, ts: &TypeSpace) -> Result<f64> {
    let s = shift(i, p)?;
    Ok(ts
        .components()
        .iter()
        .map(|c| mass_with_shift(s, x, c.lo, c.hi, p))
        .sum())
}

/// `P(Phi_i(x) in [lo, hi] ∩ T)`.
pub fn mass_in_interval(
    i: usize,
    x: f64,
    lo: f64,
    hi: f64,
    p: &Params,
    ts: &TypeSpace,
) -> Result<f64> {
    let s = shift(i, p)?;
    Ok(ts
        .components()
        .iter()
        .map(|c| mass_with_shift(s, x, c.lo.max(lo), c.hi.min(hi), p))
        .sum())
}

/// Probability that child `i` of a type-`x` parent has no type in `T`.
pub fn atom_prob(i: usize, x: f64, p: &Params, ts: &TypeSpace) -> Result<f64> {
    Ok((1.0 - mass_in(i, x, p, ts)?).clamp(0.0, 1.0))
}

/// Expected-offspring density `m(x, y)`.
pub fn kernel_m(x: f64, y: f64, p: &Params, ts: &TypeSpace) -> f64 {
    if !ts.contains(y) {
        return 0.0;
    }
    kernel_unrestricted(x, y, p)
}

/// `sum_i phi_density(i, x, y)` without the restriction to `T`.
pub fn kernel_unrestricted(x: f64, y: f64, p: &Params) -> f64 {
    let h = p.side_shift();
    density_with_shift(-h, x, y, p)
        + 2.0 * density_with_shift(0.0, x, y, p)
        + density_with_shift(h, x, y, p)
}

/// Expected number of children with type in `[lo, hi] ∩ T`.
pub fn kernel_mass(x: f64, lo: f64, hi: f64, p: &Params, ts: &TypeSpace) -> f64 {
    (1..=4)
        .map(|i| mass_in_interval(i, x, lo, hi, p, ts).expect("index in range"))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    A1Minus,
    A2Minus,
    A3,
    A2Plus,
    A1Plus,
    Outside,
}

/// Which of the five sets `x` falls in. `A3` is closed, the others are
/// half-open with their closed end away from zero.
pub fn region_of(x: f64, p: &Params) -> RegionLabel {
    let a = p.a();
    let mid = 0.5 - 0.5 * a - p.b();
    let edge = 1.0 - 2.0 * p.b();
    let r = x.abs();
    let (two, one) = if x >= 0.0 {
        (RegionLabel::A2Plus, RegionLabel::A1Plus)
    } else {
        (RegionLabel::A2Minus, RegionLabel::A1Minus)
    };
    if r <= a {
        RegionLabel::A3
    } else if r <= mid {
        two
    } else if r <= edge {
        one
    } else {
        RegionLabel::Outside
    }
}

/// One-child density `h1(x, z)` and two-child density `h2(x, z1, z2)`.
///
/// `h2` is symmetric in `(z1, z2)` and integrates to twice the probability of
/// two children.
pub fn offspring_densities(
    x: f64,
    z: f64,
    z1: f64,
    z2: f64,
    p: &Params,
    ts: &TypeSpace,
) -> (f64, f64) {
    let f = |i: usize, y: f64| {
        if ts.contains(y) {
            phi_density(i, x, y, p).unwrap()
        } else {
            0.0
        }
    };
    let middle_lone = || 2.0 * f(2, z) * atom_prob(4, x, p, ts).unwrap();
    let pair = || 2.0 * f(2, z1) * f(4, z2);
    match region_of(x, p) {
        RegionLabel::A3 => (middle_lone(), pair()),
        RegionLabel::A2Plus => (f(1, z) + middle_lone(), pair()),
        RegionLabel::A2Minus => (f(3, z) + middle_lone(), pair()),
        RegionLabel::A1Plus => (f(1, z), 0.0),
        RegionLabel::A1Minus => (f(3, z), 0.0),
        RegionLabel::Outside => (0.0, 0.0),
    }
}

/// `P(exactly one child)` and `P(two children)` for a type-`x` parent.
pub fn child_count_probs(x: f64, p: &Params, ts: &TypeSpace) -> (f64, f64) {
    let m = |i| mass_in(i, x, p, ts).unwrap();
    let (m1, m2, m3, m4) = (m(1), m(2), m(3), m(4));
    (m1 + m3 + m2 * (1.0 - m4) + m4 * (1.0 - m2), m2 * m4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::offspring_types;
    use crate::rng;
    use crate::typespace;
    use proptest::prelude::*;
    use rand::Rng;

    fn simple() -> Params {
        Params::new(0.26, 0.01).unwrap()
    }

    fn general() -> Params {
        Params::new(0.28, 0.05).unwrap()
    }

    fn default_ts(p: &Params) -> TypeSpace {
        typespace::build(p, typespace::default_epsilon(p)).unwrap()
    }

    #[test]
    fn line_examples() {
        let p = general();
        assert!((line_eval(3, 0.0, &p).unwrap() - 0.1071429).abs() < 1e-7);
        assert_eq!(line_eval(2, 0.0, &p).unwrap(), 2.0);
        assert!(matches!(line_eval(7, 0.0, &p), Err(Error::BadIndex(7))));
        let lines = LineFamily::new(&p);
        for j in 1..=6 {
            assert_eq!(lines.intercepts[j - 1], -lines.intercepts[6 - j]);
            for x in [-0.7, 0.0, 0.3] {
                let l = line_eval(j, x, &p).unwrap();
                let r = -line_eval(7 - j, -x, &p).unwrap();
                assert!((l - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangular_examples() {
        assert!((triangular(0.0, 0.03) - 1.0 / 0.03).abs() < 1e-9);
        assert_eq!(triangular(0.03, 0.03), 0.0);
        assert_eq!(triangular(-0.03, 0.03), 0.0);
        assert!((triangular_cdf(0.03, 0.03) - triangular_cdf(-0.03, 0.03) - 1.0).abs() < 1e-10);
        assert!((triangular_cdf(0.0, 0.03) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let p = general();
        assert!((phi_density(2, 0.0, 0.0, &p).unwrap() - 0.28 / 0.03).abs() < 1e-9);
        let edge = p.t() / p.a();
        assert_eq!(phi_density(2, 0.0, edge + 1e-9, &p).unwrap(), 0.0);
        assert_eq!(phi_density(2, 0.0, -edge - 1e-9, &p).unwrap(), 0.0);
        assert!(phi_density(2, 0.0, edge - 1e-9, &p).unwrap() > 0.0);
        let (lo, hi) = stripe(2, 0.0, &p).unwrap();
        assert!((lo + edge).abs() < 1e-15 && (hi - edge).abs() < 1e-15);
    }

    #[test]
    fn atoms() {
        for p in [simple(), general()] {
            let ts = default_ts(&p);
            assert_eq!(atom_prob(1, 0.0, &p, &ts).unwrap(), 1.0);
            assert_eq!(atom_prob(3, 0.0, &p, &ts).unwrap(), 1.0);
        }
        let p = simple();
        let ts = default_ts(&p);
        assert!(atom_prob(2, 0.0, &p, &ts).unwrap().abs() < 1e-15);
    }

    #[test]
    fn regions() {
        let p = simple();
        assert_eq!(region_of(0.0, &p), RegionLabel::A3);
        assert_eq!(region_of(p.a(), &p), RegionLabel::A3);
        assert_eq!(region_of(-p.a(), &p), RegionLabel::A3);
        assert_eq!(region_of(0.30, &p), RegionLabel::A2Plus);
        assert_eq!(region_of(0.36, &p), RegionLabel::A2Plus);
        assert_eq!(region_of(-0.36, &p), RegionLabel::A2Minus);
        assert_eq!(region_of(0.37, &p), RegionLabel::A1Plus);
        assert_eq!(region_of(0.98, &p), RegionLabel::A1Plus);
        assert_eq!(region_of(-0.99, &p), RegionLabel::Outside);
    }

    #[test]
    fn kernel_is_reflection_symmetric() {
        for p in [simple(), general()] {
            let ts = default_ts(&p);
            for i in 0..100 {
                for j in 0..100 {
                    let x = -1.0 + 2.0 * (i as f64 + 0.37) / 100.0;
                    let y = -1.0 + 2.0 * (j as f64 + 0.61) / 100.0;
                    let d = kernel_m(x, y, &p, &ts) - kernel_m(-x, -y, &p, &ts);
                    assert!(d.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn row_and_column_mass() {
        for p in [simple(), general()] {
            let ts = default_ts(&p);
            let n = 4000;
            let nodes: Vec<f64> = (0..n)
                .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / n as f64)
                .collect();
            let w = 2.0 / n as f64;
            for &x in nodes.iter().step_by(37) {
                assert!(kernel_mass(x, -1.0, 1.0, &p, &ts) <= 2.0 + 1e-12);
            }
            for &y in nodes.iter().step_by(37) {
                let col: f64 = nodes
                    .iter()
                    .filter(|&&x| ts.contains(x))
                    .map(|&x| kernel_m(x, y, &p, &ts) * w)
                    .sum();
                assert!(col <= 4.0 * p.a() + 1e-6, "column mass {col}");
            }
        }
    }

    #[test]
    fn lone_child_impossible_at_zero_in_simple_case() {
        let p = simple();
        let ts = default_ts(&p);
        for k in 0..50 {
            let z = -1.0 + 2.0 * k as f64 / 49.0;
            assert_eq!(offspring_densities(0.0, z, 0.0, 0.0, &p, &ts).0, 0.0);
        }
    }

    #[test]
    fn two_children_impossible_in_outer_region() {
        let p = general();
        let ts = default_ts(&p);
        let x = 0.5;
        assert_eq!(region_of(x, &p), RegionLabel::A1Plus);
        for &(z1, z2) in &[(0.0, 0.0), (0.5, 0.5), (0.3, -0.2)] {
            assert_eq!(offspring_densities(x, 0.0, z1, z2, &p, &ts).1, 0.0);
        }
    }

    #[test]
    fn case_display_matches_general_formula() {
        for p in [simple(), general()] {
            let ts = default_ts(&p);
            let mut rng = rng::trial_stream(3, 0);
            for _ in 0..2000 {
                let x = rng.gen_range(-1.0..1.0);
                let z = rng.gen_range(-1.0..1.0);
                let (z1, z2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let (h1, h2) = offspring_densities(x, z, z1, z2, &p, &ts);
                let ind = |y: f64| if ts.contains(y) { 1.0 } else { 0.0 };
                let f = |i, y| phi_density(i, x, y, &p).unwrap() * ind(y);
                let ap = |i| atom_prob(i, x, &p, &ts).unwrap();
                let want1 = f(1, z) + f(3, z) + f(2, z) * ap(4) + f(4, z) * ap(2);
                let want2 = f(2, z1) * f(4, z2) + f(4, z1) * f(2, z2);
                if region_of(x, &p) != RegionLabel::Outside {
                    assert!((h1 - want1).abs() < 1e-9, "x={x} z={z}: {h1} vs {want1}");
                    assert!((h2 - want2).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn mass_balance_against_simulation() {
        for p in [simple(), general()] {
            let ts = default_ts(&p);
            let mut rng = rng::trial_stream(11, 1);
            let comps = ts.components().clone();
            let span = (comps.as_slice()[0].lo, comps.as_slice().last().unwrap().hi);
            for k in 0..20 {
                let x = span.0 + (span.1 - span.0) * (k as f64 + 0.5) / 20.0;
                if !ts.contains(x) {
                    continue;
                }
                // one-child and two-child masses from the closed forms
                let (one, two) = child_count_probs(x, &p, &ts);
                let m = |i| mass_in(i, x, &p, &ts).unwrap();
                let int_h1 = m(1) + m(3) + 2.0 * m(2) * (1.0 - m(4));
                let int_h2 = 2.0 * m(2) * m(4);
                assert!((int_h1 - one).abs() < 1e-12 && (0.5 * int_h2 - two).abs() < 1e-12);
                let trials = 20_000;
                let mut none = 0usize;
                for _ in 0..trials {
                    let u = [(); 4].map(|_| rng.gen::<f64>() * p.t());
                    let o = offspring_types(x, u, &p);
                    if o.iter().all(|(_, v)| !ts.contains(v)) {
                        none += 1;
                    }
                }
                let p0 = none as f64 / trials as f64;
                let want = 1.0 - int_h1 - 0.5 * int_h2;
                let sigma = (want * (1.0 - want) / trials as f64).sqrt().max(1e-4);
                assert!((p0 - want).abs() < 4.0 * sigma, "x={x}: {p0} vs {want}");
            }
        }
    }

    proptest! {
        #[test]
        fn stripe_confinement(x in -1.0f64..1.0, u in prop::array::uniform4(0.0f64..1.0)) {
            for p in [simple(), general()] {
                let o = offspring_types(x, u.map(|v| v * p.t()), &p);
                for (i, y) in o.iter() {
                    let k = match i { 3 => 1, 2 | 4 => 2, _ => 3 };
                    let (lo, hi) = stripe(k, x, &p).unwrap();
                    prop_assert!(lo <= y && y <= hi);
                }
            }
        }

        #[test]
        fn masses_are_probabilities(x in -1.0f64..1.0, i in 1usize..=4) {
            let p = general();
            let ts = default_ts(&p);
            let at = atom_prob(i, x, &p, &ts).unwrap();
            prop_assert!((0.0..=1.0).contains(&at));
        }
    }
}
