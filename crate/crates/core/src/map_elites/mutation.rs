use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::archive::Genome;

/// How a parent genome is perturbed into a child.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mutation {
    /// Each component is, with probability `rate`, redrawn uniformly from the
    /// `levels` equally spaced values `0, 1/(levels-1), ..., 1`.
    Discrete { rate: f64, levels: usize },
    /// Each component is, with probability `rate`, shifted by a polynomial
    /// perturbation with distribution index `eta_m` and clamped to `[0, 1]`.
    Polynomial { rate: f64, eta_m: f64 },
}

impl Mutation {
    /// 5% per component over {0, 0.05, ..., 1}.
    pub const GAIT: Mutation = Mutation::Discrete { rate: 0.05, levels: 21 };
    /// 12.5% per component, eta_m = 10.
    pub const ARM: Mutation = Mutation::Polynomial { rate: 0.125, eta_m: 10.0 };

    pub fn apply<R: Rng + ?Sized>(&self, genome: &Genome, rng: &mut R) -> Genome {
        match *self {
            Mutation::Discrete { rate, levels } => mutate_discrete(genome, rate, levels, rng),
            Mutation::Polynomial { rate, eta_m } => mutate_polynomial(genome, rate, eta_m, rng),
        }
    }

    /// A uniformly random genome in the space this operator works on.
    pub fn random_genome<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Genome {
        let params = match *self {
            Mutation::Discrete { levels, .. } => (0..len).map(|_| random_level(levels, rng)).collect(),
            Mutation::Polynomial { .. } => (0..len).map(|_| rng.random::<f64>()).collect(),
        };
        Genome::new(params).expect("generated components lie in [0, 1]")
    }
}

pub fn level_value(k: usize, levels: usize) -> f64 {
    if levels <= 1 {
        0.0
    } else {
        k as f64 / (levels - 1) as f64
    }
}

fn random_level<R: Rng + ?Sized>(levels: usize, rng: &mut R) -> f64 {
    level_value(rng.random_range(0..levels.max(1)), levels)
}

pub fn mutate_discrete<R: Rng + ?Sized>(genome: &Genome, rate: f64, levels: usize, rng: &mut R) -> Genome {
    let params = genome.params().iter().map(|&v| if rng.random::<f64>() < rate { random_level(levels, rng) } else { v }).collect();
    Genome::new(params).expect("levels lie in [0, 1]")
}

/// Polynomial perturbation for a uniform draw `u`:
/// `(2u)^(1/(eta+1)) - 1` below one half, `1 - (2(1-u))^(1/(eta+1))` otherwise.
pub fn polynomial_delta(u: f64, eta_m: f64) -> f64 {
    let p = 1.0 / (eta_m + 1.0);
    if u < 0.5 {
        (2.0 * u).powf(p) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(p)
    }
}

pub fn mutate_polynomial<R: Rng + ?Sized>(genome: &Genome, rate: f64, eta_m: f64, rng: &mut R) -> Genome {
    let params = genome
        .params()
        .iter()
        .map(|&v| {
            if rng.random::<f64>() < rate {
                let u: f64 = rng.random();
                (v + polynomial_delta(u, eta_m)).clamp(0.0, 1.0)
            } else {
                v
            }
        })
        .collect();
    Genome::new(params).expect("clamped to [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn on_levels(g: &Genome) -> bool {
        g.params().iter().all(|&v| ((v * 20.0).round() - v * 20.0).abs() < 1e-12)
    }

    #[test]
    fn zero_rate_is_identity() {
        let mut rng = seeded(3);
        let g = Mutation::GAIT.random_genome(36, &mut rng);
        assert_eq!(mutate_discrete(&g, 0.0, 21, &mut rng), g);
        let h = Genome::new(vec![0.3, 0.9, 0.0, 1.0]).unwrap();
        assert_eq!(mutate_polynomial(&h, 0.0, 10.0, &mut rng), h);
    }

    #[test]
    fn discrete_resampling_is_uniform_over_levels() {
        let mut rng = seeded(11);
        let g = Genome::new(vec![0.5]).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 21];
        for _ in 0..n {
            let m = mutate_discrete(&g, 1.0, 21, &mut rng);
            assert!(on_levels(&m));
            counts[(m.params()[0] * 20.0).round() as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - 1.0 / 21.0).abs() < 0.005, "frequency {f}");
        }
    }

    #[test]
    fn discrete_expected_changed_components() {
        let mut rng = seeded(12);
        let g = Mutation::GAIT.random_genome(36, &mut rng);
        let n = 100_000;
        let changed: usize = (0..n)
            .map(|_| {
                let m = mutate_discrete(&g, 0.05, 21, &mut rng);
                m.params().iter().zip(g.params()).filter(|(a, b)| a != b).count()
            })
            .sum();
        let mean = changed as f64 / n as f64;
        let expected = 36.0 * 0.05 * 20.0 / 21.0;
        assert!((mean - expected).abs() < 0.02, "mean {mean} vs {expected}");
    }

    #[test]
    fn polynomial_delta_symmetry_point_and_range() {
        assert_eq!(polynomial_delta(0.5, 10.0), 0.0);
        assert_eq!(polynomial_delta(0.0, 10.0), -1.0);
        assert!((polynomial_delta(1.0 - 1e-16, 10.0) - 1.0).abs() < 0.05);
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            let d = polynomial_delta(u, 10.0);
            assert!(d.abs() <= 1.0);
            assert!((d + polynomial_delta(1.0 - u, 10.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_mutation_is_centred() {
        let mut rng = seeded(13);
        let g = Genome::new(vec![0.5]).unwrap();
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let v = mutate_polynomial(&g, 1.0, 10.0, &mut rng).params()[0];
            assert!((v - 0.5).abs() <= 1.0 && (0.0..=1.0).contains(&v));
            sum += v;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }
}
