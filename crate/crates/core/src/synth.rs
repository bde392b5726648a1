//! Seeded synthetic instances for benchmarks and tests.
//!
//! All generators draw from a caller-supplied RNG; [`rng`] gives the
//! platform-independent ChaCha stream used throughout the test suites.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::{dot, Dataset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_gaussian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let r = dot(&v, &v).sqrt();
        if r > 1e-8 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Points separable through the origin by a hidden unit direction `u`, with
/// every normalized margin `|u . x| / ||x||` at least `min_margin`. Raw norms
/// are drawn from `[0.5, 2]`.
pub fn planted_separable<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    min_margin: f64,
) -> Dataset {
    assert!(d >= 2 && min_margin < 1.0);
    let u = unit_gaussian(rng, d);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while labels.len() < n {
        let x = unit_gaussian(rng, d);
        let m = dot(&u, &x);
        if m.abs() < min_margin {
            continue;
        }
        let scale = rng.random_range(0.5..2.0);
        points.push(x.into_iter().map(|v| v * scale).collect());
        labels.push(m.signum());
    }
    Dataset::new(points, labels).expect("generated points are valid")
}

/// A 2-D instance whose linear-kernel margin is exactly `margin`.
///
/// The signed unit vectors `y_i x_i / ||x_i||` have angles in `[-b, b]` with
/// `b = pi/2 - asin(margin)`; one sits alone at `+b` and the rest crowd near
/// `-b`, so averaging the points is a poor separator.
pub fn arc_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, margin: f64) -> Dataset {
    assert!(n >= 2 && margin > 0.0 && margin < 1.0);
    let b = PI / 2.0 - margin.asin();
    let mut angles = vec![b, -b];
    while angles.len() < n {
        angles.push(-b + rng.random_range(0.0..0.5));
    }
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for a in angles {
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let r = rng.random_range(0.5..2.0);
        points.push(vec![y * r * a.cos(), y * r * a.sin()]);
        labels.push(y);
    }
    Dataset::new(points, labels).expect("generated points are valid")
}

/// A 2-D instance with no linear separator: the signed unit vectors are
/// spread around the whole circle with angular gaps below `0.8 * 2 pi / n * 2`.
pub fn surrounding<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Dataset {
    assert!(n >= 4);
    let step = 2.0 * PI / n as f64;
    let offset = rng.random_range(0.0..2.0 * PI);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let a = offset + step * (i as f64 + rng.random_range(-0.3..0.3));
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let r = rng.random_range(0.5..2.0);
        points.push(vec![y * r * a.cos(), y * r * a.sin()]);
        labels.push(y);
    }
    Dataset::new(points, labels).expect("generated points are valid")
}

/// Standard normal points with independent fair labels.
pub fn random_points<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Dataset {
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            if dot(&x, &x) > 1e-12 {
                points.push(x);
                break;
            }
        }
        labels.push(if rng.random_bool(0.5) { 1.0 } else { -1.0 });
    }
    Dataset::new(points, labels).expect("generated points are valid")
}
