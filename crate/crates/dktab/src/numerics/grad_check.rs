//! Central-difference verification of hand-derived gradients.

/// Compares `analytic` against central finite differences of `loss_fn` and
/// returns the worst relative error over all coordinates.
///
/// `loss_fn` must be pure in the parameter groups it receives: any noise or
/// timestep draws have to be fixed by the caller beforehand. Disagreement is
/// reported, never raised — callers decide what error is acceptable.
pub fn grad_check<F>(mut loss_fn: F, params: &[Vec<f64>], analytic: &[Vec<f64>], h: f64) -> f64
where
    F: FnMut(&[Vec<f64>]) -> f64,
{
    assert!(h > 0.0, "step size must be positive");
    assert_eq!(params.len(), analytic.len(), "group count mismatch");
    let mut work: Vec<Vec<f64>> = params.to_vec();
    let mut max_rel = 0.0f64;
    for g in 0..params.len() {
        assert_eq!(params[g].len(), analytic[g].len(), "group {g} size mismatch");
        for i in 0..params[g].len() {
            let orig = work[g][i];
            work[g][i] = orig + h;
            let plus = loss_fn(&work);
            work[g][i] = orig - h;
            let minus = loss_fn(&work);
            work[g][i] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[g][i];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
            if rel > max_rel {
                max_rel = rel;
            }
        }
    }
    max_rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    fn quadratic(params: &[Vec<f64>]) -> f64 {
        0.5 * params.iter().flatten().map(|x| x * x).sum::<f64>()
    }

    #[test]
    fn exact_gradient_of_quadratic() {
        let mut rng = Rng::new(3);
        let params = vec![(0..4).map(|_| rng.uniform_range(-2.0, 2.0)).collect::<Vec<_>>()];
        let grads = params.clone(); // d(½‖θ‖²)/dθ = θ
        let err = grad_check(quadratic, &params, &grads, 1e-5);
        assert!(err < 1e-7, "err {err}");
    }

    #[test]
    fn doubled_gradient_reports_one_third() {
        let params = vec![vec![0.8, -1.3, 2.1]];
        let doubled: Vec<Vec<f64>> = params.iter().map(|g| g.iter().map(|x| 2.0 * x).collect()).collect();
        let err = grad_check(quadratic, &params, &doubled, 1e-5);
        assert!((err - 1.0 / 3.0).abs() < 1e-5, "err {err}");
    }
}
