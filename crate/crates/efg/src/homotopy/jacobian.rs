//! Forward finite-difference Jacobians.

use nalgebra::DMatrix;

/// Column k approximates the partial derivative of `f` along coordinate k,
/// with step sqrt(machine epsilon) scaled by the coordinate magnitude.
/// `f` writes `rows` outputs into its second argument.
pub fn fd_jacobian(
    f: &mut dyn FnMut(&[f64], &mut [f64]),
    x: &[f64],
    rows: usize,
) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(rows, n);
    let mut base = vec![0.0; rows];
    f(x, &mut base);
    let mut xs = x.to_vec();
    let mut out = vec![0.0; rows];
    let sqrt_eps = f64::EPSILON.sqrt();
    for k in 0..n {
        let h = sqrt_eps * (1.0 + x[k].abs());
        xs[k] = x[k] + h;
        // Recover the exactly representable step.
        let h_actual = xs[k] - x[k];
        f(&xs, &mut out);
        for r in 0..rows {
            jac[(r, k)] = (out[r] - base[r]) / h_actual;
        }
        xs[k] = x[k];
    }
    jac
}
