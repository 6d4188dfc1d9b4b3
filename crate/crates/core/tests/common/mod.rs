//! Seeded generators shared by the oracle suites. Everything is driven by
//! ChaCha so reruns are bit-identical.

#![allow(dead_code)]

use frontera::{MarketModel, RateInterval};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A well-conditioned random covariance at weekly-return scale.
pub fn random_covariance(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let f = Array2::from_shape_fn((n, n), |_| rng.gen_range(-0.05..0.05));
    let mut sigma = f.dot(&f.t());
    for i in 0..n {
        sigma[[i, i]] += rng.gen_range(0.0005..0.002);
    }
    sigma
}

/// A valid market with `c > 0`, so the upper frontier branch exists.
pub fn random_model(rng: &mut ChaCha8Rng, n: usize) -> MarketModel {
    loop {
        let sigma = random_covariance(rng, n);
        let mu = Array1::from_shape_fn(n, |_| rng.gen_range(-0.002..0.02));
        if let Ok(model) = MarketModel::from_moments(mu, sigma) {
            if model.c() > 0.0 {
                return model;
            }
        }
    }
}

pub fn random_model_sized(rng: &mut ChaCha8Rng) -> MarketModel {
    let n = rng.gen_range(3..=10);
    random_model(rng, n)
}

/// A valid market whose frontier geometry resembles real panels:
/// `rho = ab/c^2` bounded away from 1 (no near-degenerate frontier, where
/// `m_tp - m_gmv` cancels catastrophically) and from above (intervals inside
/// `[0, r_gmv]` stay within the curvature scale `m_ah * sigma_gmv` that the
/// 201-node Simpson tolerances assume). Both published case studies sit,
/// with margin, inside these bounds (rho of roughly 2.3 and 9.5).
pub fn random_model_shaped(rng: &mut ChaCha8Rng) -> MarketModel {
    loop {
        let model = random_model_sized(rng);
        let rho = model.a() * model.b() / (model.c() * model.c());
        if (1.1..=30.0).contains(&rho) {
            return model;
        }
    }
}

/// A valid market in percent units (monthly industry scale), where rates are
/// of order one. Finite-difference oracles with a fixed step need this scale.
pub fn random_model_percent(rng: &mut ChaCha8Rng, n: usize) -> MarketModel {
    loop {
        let f = Array2::from_shape_fn((n, n), |_| rng.gen_range(-2.0..2.0));
        let mut sigma = f.dot(&f.t());
        for i in 0..n {
            sigma[[i, i]] += rng.gen_range(8.0..20.0);
        }
        let mu = Array1::from_shape_fn(n, |_| rng.gen_range(0.3..1.5));
        if let Ok(model) = MarketModel::from_moments(mu, sigma) {
            if model.c() > 0.0 {
                return model;
            }
        }
    }
}

/// An admissible rate strictly inside `[0, r_gmv)`.
pub fn random_rate(rng: &mut ChaCha8Rng, model: &MarketModel) -> f64 {
    rng.gen_range(0.0..model.r_gmv() * 0.999)
}

/// A non-degenerate interval inside `[0, r_gmv]`. The width floor keeps a
/// 1e5-point grid step above the f64 resolution of the flat CE maximum.
pub fn random_interval(rng: &mut ChaCha8Rng, model: &MarketModel) -> RateInterval {
    let r_gmv = model.r_gmv();
    loop {
        let r1 = rng.gen_range(0.0..r_gmv);
        let r2 = rng.gen_range(r1..=r_gmv);
        if r2 - r1 > 0.05 * r_gmv {
            return RateInterval::new(r1, r2).unwrap();
        }
    }
}

/// Random fully invested weights (shorts allowed), for sampling oracles.
pub fn random_full_investment(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    let mut w = Array1::<f64>::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
    let total = w.sum();
    if total.abs() < 0.1 {
        w[0] += 1.0 - total;
    } else {
        w /= total;
    }
    w
}

/// A uniform point of the probability simplex.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    let mut w = Array1::<f64>::from_shape_fn(n, |_| -f64::ln(rng.gen_range(1e-12..1.0)));
    let total = w.sum();
    w /= total;
    w
}
