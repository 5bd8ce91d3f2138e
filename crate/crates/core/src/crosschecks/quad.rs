//! Adaptive Gauss–Kronrod (7/15) quadrature in `f64`.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [0.0; 15];
    fv[7] = f(c);
    for j in 0..7 {
        let dx = h * XGK[j];
        fv[j] = f(c - dx);
        fv[14 - j] = f(c + dx);
    }
    let weight = |i: usize| WGK[if i <= 7 { i } else { 14 - i }];
    let mut k = 0.0;
    let mut g = fv[7] * WG[3];
    for (i, v) in fv.iter().enumerate() {
        k += weight(i) * v;
    }
    for j in (1..7).step_by(2) {
        g += WG[j / 2] * (fv[j] + fv[14 - j]);
    }
    // error estimate as in QUADPACK's qk15
    let mean = 0.5 * k;
    let asc: f64 = fv.iter().enumerate().map(|(i, v)| weight(i) * (v - mean).abs()).sum::<f64>() * h.abs();
    let mut err = ((k - g) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (k * h, err)
}

const MAX_INTERVALS: usize = 200;

/// `∫_a^b f` by globally adaptive bisection, stopping once the summed error
/// estimate is below `abs_tol` or `rel_tol` times the running total.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (k, e) = kronrod(&mut f, a, b);
    let mut parts = vec![(a, b, k, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(rel_tol * total.abs()).max(50.0 * f64::EPSILON * total.abs());
        if err <= tol || parts.len() >= MAX_INTERVALS {
            return total;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(i);
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            return total;
        }
        let (k1, e1) = kronrod(&mut f, lo, m);
        let (k2, e2) = kronrod(&mut f, m, hi);
        parts.push((lo, m, k1, e1));
        parts.push((m, hi, k2, e2));
    }
}

/// `∫_a^∞ f` through `t = a + u/(1−u)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    integrate(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            let v = f(a + u / w) / (w * w);
            if v.is_finite() { v } else { 0.0 }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_integrals() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-14, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-14, 1e-14);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let v = integrate_to_infinity(|x| x * x * (-x).exp(), 0.0, 1e-14, 1e-14);
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate_to_infinity(|x| (-x * x).exp(), 1.0, 1e-15, 1e-14);
        assert!((v - 0.5 * std::f64::consts::PI.sqrt() * libm::erfc(1.0)).abs() < 1e-13);
    }
}
