//! Seeded synthetic data used by tests, benchmarks and the CLI demo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::dataset::{AttributeKind, AttributeSchema, Column, Dataset};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    StandardNormal,
    /// Exponential with rate 1.
    Exponential,
    /// Equal-weight mixture of N(-2, 1) and N(2, 1).
    Bimodal,
}

impl Shape {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Shape::StandardNormal => Normal::new(0.0, 1.0).unwrap().sample(rng),
            Shape::Exponential => Exp::new(1.0).unwrap().sample(rng),
            Shape::Bimodal => {
                let mean = if rng.random::<bool>() { 2.0 } else { -2.0 };
                Normal::new(mean, 1.0).unwrap().sample(rng)
            }
        }
    }

    pub fn samples(self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }

    /// Exact CDF, for checking transforms.
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Shape::StandardNormal => normal_cdf(x),
            Shape::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-x).exp()
                }
            }
            Shape::Bimodal => 0.5 * (normal_cdf(x + 2.0) + normal_cdf(x - 2.0)),
        }
    }
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Numerical Recipes erfc approximation, |error| < 1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

fn continuous_schema(f: usize) -> Vec<AttributeSchema> {
    (0..f)
        .map(|i| AttributeSchema {
            name: format!("x{i}"),
            index: i,
            kind: AttributeKind::Continuous,
        })
        .collect()
}

fn binary_labels() -> Vec<String> {
    vec!["neg".into(), "pos".into()]
}

/// One attribute, two balanced classes drawn from N(0, 1) and N(2, 1).
pub fn two_gaussians(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        xs.push(unit.sample(&mut rng) + 2.0 * class as f64);
        ys.push(class);
    }
    Dataset::new(
        continuous_schema(1),
        binary_labels(),
        vec![Column::Continuous(xs)],
        ys,
    )
    .expect("generated data is valid")
}

/// `f` attributes with mixed marginals; the class is a noisy nonlinear
/// function of the first few attributes, the rest are distractors.
pub fn mixed_marginals(n: usize, f: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [Shape::StandardNormal, Shape::Exponential, Shape::Bimodal];
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); f];
    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..f)
            .map(|a| shapes[a % shapes.len()].sample(&mut rng))
            .collect();
        let at = |a: usize| row.get(a).copied().unwrap_or(0.0);
        let score = at(0) * at(2).signum() + (at(1) - 1.0) * 1.5 - 0.3 * at(3) * at(4)
            + noise.sample(&mut rng);
        ys.push(usize::from(score > 0.0));
        for (c, v) in columns.iter_mut().zip(row) {
            c.push(v);
        }
    }
    Dataset::new(
        continuous_schema(f),
        binary_labels(),
        columns.into_iter().map(Column::Continuous).collect(),
        ys,
    )
    .expect("generated data is valid")
}
