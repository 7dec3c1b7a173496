//! Fixed reference rules: Gauss–Legendre on [0, 1], the 7-point degree-5
//! triangle rule, and the uniform rule on the unit circle `ℝ/ℤ`.

/// Gauss–Legendre nodes and weights mapped to [0, 1] (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pn1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (z * pn - pn1) / (z * z - 1.0);
    (pn, d)
}

/// Degree-5 Radon rule on the reference triangle `{ξ, η ≥ 0, ξ + η ≤ 1}`:
/// `(ξ, η, weight)` with weights summing to 1/2.
pub fn triangle_rule() -> [(f64, f64, f64); 7] {
    let s = 15f64.sqrt();
    let a1 = (6.0 - s) / 21.0;
    let b1 = (9.0 + 2.0 * s) / 21.0;
    let a2 = (6.0 + s) / 21.0;
    let b2 = (9.0 - 2.0 * s) / 21.0;
    let w0 = 9.0 / 80.0;
    let w1 = (155.0 - s) / 2400.0;
    let w2 = (155.0 + s) / 2400.0;
    [
        (1.0 / 3.0, 1.0 / 3.0, w0),
        (a1, a1, w1),
        (b1, a1, w1),
        (a1, b1, w1),
        (a2, a2, w2),
        (b2, a2, w2),
        (a2, b2, w2),
    ]
}

/// Uniform `n`-point rule on `S¹ = ℝ/ℤ`: nodes `j/n`, weights `1/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleRule {
    pub n: usize,
}

impl CircleRule {
    pub fn new(n: usize) -> CircleRule {
        assert!(n > 0, "circle rule needs at least one node");
        CircleRule { n }
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let w = 1.0 / self.n as f64;
        (0..self.n).map(move |j| (j as f64 * w, w))
    }
}
