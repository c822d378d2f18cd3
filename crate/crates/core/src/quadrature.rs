//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

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
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal panels the range is split into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 4000,
            initial_panels: 8,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// Kronrod error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 { b } else { lo + width };
            kronrod(&mut f, lo, hi)
        })
        .collect();

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return Ok(total);
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                a,
                b,
                error: err,
                evaluations: panels.len() * 15,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel can no longer be split in floating point.
            return Err(Error::Quadrature {
                a,
                b,
                error: err,
                evaluations: panels.len() * 15,
            });
        }
        panels.push(kronrod(&mut f, p.a, mid));
        panels.push(kronrod(&mut f, mid, p.b));
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, opts).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let v = integrate_real(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, &QuadOptions::default())
            .unwrap();
        assert_relative_eq!(v, 64.0 / 6.0 - 8.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_moment() {
        // ∫₀^∞ x² e^{−x²/2} dx = √(π/2)
        let v = integrate_real(
            |x| x * x * (-0.5 * x * x).exp(),
            0.0,
            14.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(v, (std::f64::consts::PI / 2.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫₀^{2π} e^{i 7 x} dx = 0, ∫₀^1 e^{i 3x} dx = (e^{3i} − 1)/(3i)
        let z = integrate(
            |x| Complex64::new(0.0, 3.0 * x).exp(),
            0.0,
            1.0,
            &QuadOptions::default(),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 3.0).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((z - exact).norm() < 1e-13);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            max_intervals: 10,
            initial_panels: 1,
            ..QuadOptions::default()
        };
        let r = integrate_real(|x| (1.0 / x).sin(), 1e-9, 1.0, &opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
