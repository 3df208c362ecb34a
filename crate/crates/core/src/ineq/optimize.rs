//! Multi-start coordinate ascent with numeric gradients.
//!
//! The local step estimates each partial derivative by a central
//! difference, then tries moves of geometrically shrinking length along
//! the sign of the derivative, keeping the first improvement.  A sweep
//! visits every coordinate (or a seeded random subset, for
//! high-dimensional objectives); when a whole sweep fails to improve,
//! the base step halves.  Restarts draw independent starting points from
//! caller-supplied samplers on per-restart ChaCha8 streams, so the whole
//! procedure is deterministic for a fixed seed, including under parallel
//! execution: results are reduced by maximum value with ties broken
//! toward the lowest restart index.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec::{par_map, ExecMode};

/// Knobs for one local ascent run.
#[derive(Debug, Clone)]
pub struct AscentOptions {
    /// Maximum number of coordinate sweeps.
    pub max_sweeps: usize,
    /// Central-difference half-width for derivative estimates.
    pub grad_step: f64,
    /// Initial trial move length.
    pub initial_step: f64,
    /// Move lengths below this end the run (and cap the trial ladder).
    pub min_step: f64,
    /// How many geometrically shrinking moves to try per coordinate.
    pub ladder_tries: usize,
    /// If set, each sweep updates only this many randomly chosen
    /// coordinates instead of all of them.
    pub coord_subset: Option<usize>,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 200,
            grad_step: 1e-5,
            initial_step: 0.5,
            min_step: 1e-9,
            ladder_tries: 4,
            coord_subset: None,
        }
    }
}

/// Multi-start wrapper options.
#[derive(Debug, Clone)]
pub struct MultiStartOptions {
    pub restarts: usize,
    pub seed: u64,
    pub mode: ExecMode,
    pub ascent: AscentOptions,
}

impl Default for MultiStartOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 1,
            mode: ExecMode::auto(),
            ascent: AscentOptions::default(),
        }
    }
}

/// Best point found across all restarts.
#[derive(Debug, Clone)]
pub struct AscentOutcome {
    pub params: Vec<f64>,
    pub value: f64,
    /// Index of the restart that produced the best value (lowest index on
    /// ties).
    pub restart: usize,
}

/// Central-difference estimate of `∂f/∂x_i`, evaluated by mutating and
/// restoring `x` in place.
pub fn central_difference(
    f: &impl Fn(&[f64]) -> f64,
    x: &mut [f64],
    i: usize,
    h: f64,
) -> f64 {
    let saved = x[i];
    x[i] = saved + h;
    let up = f(x);
    x[i] = saved - h;
    let down = f(x);
    x[i] = saved;
    (up - down) / (2.0 * h)
}

/// Maximize `f` from `x0` by coordinate ascent.  Returns the best point
/// and its value.
pub fn coordinate_ascent(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    o: &AscentOptions,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = o.initial_step;
    let n = x.len();
    for _ in 0..o.max_sweeps {
        let coords: Vec<usize> = match o.coord_subset {
            Some(k) if k < n => rand::seq::index::sample(rng, n, k).into_vec(),
            _ => (0..n).collect(),
        };
        let mut improved = false;
        for i in coords {
            let g = central_difference(f, &mut x, i, o.grad_step);
            if !g.is_finite() || g.abs() < 1e-14 {
                continue;
            }
            let dir = g.signum();
            let mut s = step;
            for _ in 0..o.ladder_tries {
                if s < o.min_step {
                    break;
                }
                let saved = x[i];
                x[i] = saved + dir * s;
                let ft = f(&x);
                if ft > fx {
                    fx = ft;
                    improved = true;
                    break;
                }
                x[i] = saved;
                s *= 0.5;
            }
        }
        if !improved {
            step *= 0.5;
            if step < o.min_step {
                break;
            }
        }
    }
    (x, fx)
}

/// Run [`coordinate_ascent`] from `restarts` sampled starting points and
/// keep the best result.  `sample(rng, dim)` draws one starting point;
/// restart `r` uses ChaCha8 stream `r + 1` of the configured seed.
pub fn multi_start_ascent<F, S>(
    f: F,
    dim: usize,
    sample: S,
    o: &MultiStartOptions,
) -> AscentOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut ChaCha8Rng, usize) -> Vec<f64> + Sync,
{
    assert!(o.restarts >= 1, "need at least one restart");
    let runs = par_map(o.mode, (0..o.restarts).collect(), |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
        rng.set_stream(r as u64 + 1);
        let x0 = sample(&mut rng, dim);
        debug_assert_eq!(x0.len(), dim);
        let (params, value) = coordinate_ascent(&f, &x0, &o.ascent, &mut rng);
        (params, value)
    });
    let mut best: Option<AscentOutcome> = None;
    for (restart, (params, value)) in runs.into_iter().enumerate() {
        let better = match &best {
            None => true,
            Some(b) => value > b.value,
        };
        if better {
            best = Some(AscentOutcome { params, value, restart });
        }
    }
    best.expect("at least one restart ran")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_sampler(lo: f64, hi: f64) -> impl Fn(&mut ChaCha8Rng, usize) -> Vec<f64> + Sync {
        use rand::Rng;
        move |rng, dim| (0..dim).map(|_| rng.random_range(lo..hi)).collect()
    }

    #[test]
    fn quadratic_bowl_is_solved_to_high_precision() {
        let target = [0.3, -1.2, 2.5];
        let f = |x: &[f64]| -> f64 {
            -x.iter()
                .zip(target)
                .map(|(xi, ti)| (xi - ti) * (xi - ti))
                .sum::<f64>()
        };
        let o = MultiStartOptions {
            restarts: 4,
            seed: 11,
            mode: ExecMode::Sequential,
            ascent: AscentOptions::default(),
        };
        let out = multi_start_ascent(f, 3, uniform_sampler(-3.0, 3.0), &o);
        assert!(out.value > -1e-12, "value {}", out.value);
        for (xi, ti) in out.params.iter().zip(target) {
            assert!((xi - ti).abs() < 1e-6);
        }
    }

    #[test]
    fn subset_sweeps_also_converge() {
        let f = |x: &[f64]| -> f64 { -x.iter().map(|v| v * v).sum::<f64>() };
        let o = MultiStartOptions {
            restarts: 2,
            seed: 5,
            mode: ExecMode::Sequential,
            ascent: AscentOptions {
                max_sweeps: 400,
                coord_subset: Some(3),
                ..AscentOptions::default()
            },
        };
        let out = multi_start_ascent(f, 10, uniform_sampler(-1.0, 1.0), &o);
        assert!(out.value > -1e-10, "value {}", out.value);
    }

    #[test]
    fn fixed_seed_is_bitwise_deterministic() {
        let f = |x: &[f64]| -> f64 { (x[0] * 1.3).sin() + (x[1] * 0.7).cos() };
        let o = MultiStartOptions {
            restarts: 6,
            seed: 42,
            mode: ExecMode::Sequential,
            ascent: AscentOptions::default(),
        };
        let a = multi_start_ascent(f, 2, uniform_sampler(-3.0, 3.0), &o);
        let b = multi_start_ascent(f, 2, uniform_sampler(-3.0, 3.0), &o);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.params, b.params);
        assert_eq!(a.restart, b.restart);
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let f = |x: &[f64]| -> f64 { -(x[0] - 0.5).powi(2) - (x[1] + 0.25).powi(4) };
        let mk = |mode| MultiStartOptions {
            restarts: 5,
            seed: 9,
            mode,
            ascent: AscentOptions::default(),
        };
        let a = multi_start_ascent(f, 2, uniform_sampler(-2.0, 2.0), &mk(ExecMode::Sequential));
        let b = multi_start_ascent(f, 2, uniform_sampler(-2.0, 2.0), &mk(ExecMode::Parallel));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.restart, b.restart);
    }

    #[test]
    fn constant_objective_reports_lowest_restart() {
        let f = |_: &[f64]| 1.0;
        let o = MultiStartOptions {
            restarts: 8,
            seed: 3,
            mode: ExecMode::Sequential,
            ascent: AscentOptions {
                max_sweeps: 3,
                ..AscentOptions::default()
            },
        };
        let out = multi_start_ascent(f, 2, uniform_sampler(0.0, 1.0), &o);
        assert_eq!(out.restart, 0);
    }

    #[test]
    fn zero_sweeps_returns_the_starting_point() {
        let f = |x: &[f64]| -> f64 { -x[0] * x[0] };
        let o = AscentOptions {
            max_sweeps: 0,
            ..AscentOptions::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (x, v) = coordinate_ascent(&f, &[2.0], &o, &mut rng);
        assert_eq!(x, vec![2.0]);
        assert_eq!(v, -4.0);
    }
}
