//! Gauss–Hermite quadrature for the weight `e^{−x²}` on the real line.

use std::f64::consts::PI;

/// Default node count per noncompact dimension.
pub const DEFAULT_NODES: usize = 40;

/// Nodes and weights of the `n`-point Gauss–Hermite rule, nodes ascending.
///
/// Newton iteration on the orthonormal Hermite recurrence; stable well past
/// a few hundred nodes.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Hermite rule needs at least one node");
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// Node count that integrates `e^{2 a x} e^{−x²}` to full double precision.
///
/// Empirical envelope of the minimal count, never below [`DEFAULT_NODES`].
pub fn nodes_for_exponent(a: f64) -> usize {
    let a = a.abs();
    let needed = (a * a + 4.0 * a + 12.0).ceil() as usize;
    needed.max(DEFAULT_NODES)
}
