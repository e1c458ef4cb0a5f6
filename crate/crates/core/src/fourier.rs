//! Band-limited numerical Fourier transforms used by the consistency
//! oracles. Convention: `(F f)(ξ) = (2π)^{-1/2} ∫ f(k) e^{-ikξ} dk`,
//! approximated by the trapezoid rule over `[-B, B]`.

use num_complex::Complex64;

/// `n` equispaced nodes spanning `[-half_width, half_width]` inclusive.
pub fn uniform_band(half_width: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a band needs at least two nodes");
    let step = 2.0 * half_width / (n - 1) as f64;
    (0..n).map(|i| -half_width + i as f64 * step).collect()
}

/// Trapezoid-rule transform of uniformly sampled values.
pub fn ft_uniform(ks: &[f64], values: &[Complex64], xi: f64) -> Complex64 {
    assert_eq!(ks.len(), values.len());
    assert!(ks.len() >= 2);
    let dk = ks[1] - ks[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (&k, &v)) in ks.iter().zip(values).enumerate() {
        let w = if i == 0 || i == ks.len() - 1 { 0.5 } else { 1.0 };
        acc += v * Complex64::from_polar(w, -k * xi);
    }
    acc * dk * crate::source::INV_SQRT_2PI
}
