//! Kolmogorov–Smirnov distance between distribution functions.

use crate::dist_models::DistributionModel;
use crate::quantile_core::Ecdf;

/// Mean of the Kolmogorov distribution, `sqrt(pi / 2) ln 2`.
pub const KOLMOGOROV_MEAN: f64 = 0.868_731_160_636_159_4;
/// Standard deviation of the Kolmogorov distribution,
/// `sqrt(pi^2 / 12 - (pi / 2) ln^2 2)`.
pub const KOLMOGOROV_SD: f64 = 0.260_332_871_462_412_7;

/// Standard deviation of the two-sample KS statistic between samples of
/// sizes `m` and `n` under the null, from the Kolmogorov limit.
pub fn ks_null_sd(m: usize, n: usize) -> f64 {
    KOLMOGOROV_SD * (1.0 / m as f64 + 1.0 / n as f64).sqrt()
}

/// Same for a one-sample statistic against a fully specified cdf.
pub fn ks_null_sd_one_sample(n: usize) -> f64 {
    KOLMOGOROV_SD / (n as f64).sqrt()
}

/// A distribution function that can be evaluated, together with its jump
/// points. Between consecutive jumps the function must be continuous and
/// monotone.
pub trait DistributionFunction {
    fn cdf_at(&self, t: f64) -> f64;

    /// Left limit at `t`.
    fn cdf_left(&self, t: f64) -> f64 {
        self.cdf_at(t)
    }

    /// Sorted jump locations (duplicates allowed).
    fn jump_points(&self) -> &[f64] {
        &[]
    }
}

impl DistributionFunction for Ecdf {
    fn cdf_at(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn cdf_left(&self, t: f64) -> f64 {
        self.eval_left(t)
    }

    fn jump_points(&self) -> &[f64] {
        self.sorted_values()
    }
}

impl DistributionFunction for DistributionModel {
    fn cdf_at(&self, t: f64) -> f64 {
        self.cdf(t)
    }
}

/// Adapter for a continuous cdf given as a closure.
pub struct ContinuousCdf<F>(pub F);

impl<F: Fn(f64) -> f64> DistributionFunction for ContinuousCdf<F> {
    fn cdf_at(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// `sup_t |F(t) - G(t)|`.
///
/// Both functions are evaluated at, and just before, every jump of either
/// one. When at least one argument is a step function and the other is
/// continuous between its own jumps this is the exact supremum; for two
/// ECDFs it is the two-sample KS statistic.
pub fn ks_distance<A, B>(a: &A, b: &B) -> f64
where
    A: DistributionFunction + ?Sized,
    B: DistributionFunction + ?Sized,
{
    let (ja, jb) = (a.jump_points(), b.jump_points());
    let (mut i, mut j) = (0, 0);
    let mut sup = 0.0f64;
    let mut last = f64::NAN;
    while i < ja.len() || j < jb.len() {
        let t = if j >= jb.len() || (i < ja.len() && ja[i] <= jb[j]) {
            i += 1;
            ja[i - 1]
        } else {
            j += 1;
            jb[j - 1]
        };
        if t == last {
            continue;
        }
        last = t;
        sup = sup
            .max((a.cdf_at(t) - b.cdf_at(t)).abs())
            .max((a.cdf_left(t) - b.cdf_left(t)).abs());
    }
    sup
}

/// Two-sample KS statistic by a single merge pass over the sorted values.
pub fn ks_two_sample(a: &Ecdf, b: &Ecdf) -> f64 {
    let (x, y) = (a.sorted_values(), b.sorted_values());
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup = 0.0f64;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        sup = sup.max((i as f64 / nx - j as f64 / ny).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_models::{normal_cdf, GaussianModel};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn ecdf(v: &[f64]) -> Ecdf {
        Ecdf::new(v).unwrap()
    }

    /// Brute-force sup over a grid containing every jump point and points
    /// strictly between and beyond them.
    fn grid_sup(a: &Ecdf, b: &Ecdf) -> f64 {
        let mut pts: Vec<f64> = a.sorted_values().iter().chain(b.sorted_values()).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut grid = vec![pts[0] - 1.0, pts[pts.len() - 1] + 1.0];
        for w in pts.windows(2) {
            grid.push(0.5 * (w[0] + w[1]));
        }
        grid.extend(&pts);
        grid.iter().map(|&t| (a.eval(t) - b.eval(t)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn examples() {
        let a = ecdf(&[0.3, 1.2, -0.5]);
        assert_eq!(ks_distance(&a, &a), 0.0);
        assert_eq!(ks_distance(&ecdf(&[0.0]), &ecdf(&[1.0])), 1.0);
        assert_eq!(ks_distance(&ecdf(&[1.0, 2.0]), &ecdf(&[1.0, 3.0])), 0.5);
        assert_eq!(ks_two_sample(&ecdf(&[1.0, 2.0]), &ecdf(&[1.0, 3.0])), 0.5);
    }

    #[test]
    fn kolmogorov_constants() {
        let pi = std::f64::consts::PI;
        let ln2 = std::f64::consts::LN_2;
        assert!((KOLMOGOROV_MEAN - (pi / 2.0).sqrt() * ln2).abs() < 1e-15);
        assert!((KOLMOGOROV_SD - (pi * pi / 12.0 - pi / 2.0 * ln2 * ln2).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn one_sample_against_continuous_cdf() {
        // ECDF of {0}: sup |1{t >= 0} - Phi(t)| = 1/2, attained at 0 from either side
        let d = ks_distance(&ecdf(&[0.0]), &ContinuousCdf(normal_cdf));
        assert_eq!(d, 0.5);
        let model: crate::dist_models::DistributionModel = GaussianModel::standard().into();
        let mut rng = rng_from_seed(4);
        let v: Vec<f64> = (0..400).map(|_| rng.random_range(-3.0..3.0)).collect();
        let e = ecdf(&v);
        // brute force against the continuous cdf on the jumps and their left limits
        let brute = e
            .sorted_values()
            .iter()
            .map(|&t| (e.eval(t) - model.cdf(t)).abs().max((e.eval_left(t) - model.cdf(t)).abs()))
            .fold(0.0, f64::max);
        assert_eq!(ks_distance(&e, &model), brute);
    }

    proptest! {
        #[test]
        fn exact_against_grid(a in prop::collection::vec(-3i32..3, 1..40), b in prop::collection::vec(-30.0f64..30.0, 1..40)) {
            // integer-valued `a` forces ties
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let (ea, eb) = (ecdf(&a), ecdf(&b));
            let brute = grid_sup(&ea, &eb);
            prop_assert!((ks_distance(&ea, &eb) - brute).abs() <= 1e-12);
            prop_assert!((ks_two_sample(&ea, &eb) - brute).abs() <= 1e-12);
            prop_assert_eq!(ks_distance(&ea, &eb), ks_distance(&eb, &ea));
        }
    }
}
