//! Adaptive quadrature for complex-valued integrands on finite intervals.
//!
//! Integrands return a value together with an error bound they already carry
//! (from an inner integration), so nested product rules report one combined
//! estimate.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-9, abs_tol: 1e-15, max_intervals: 400 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// `∫|f|`, used as the roundoff floor.
    resabs: f64,
}

fn gk15<F: FnMut(f64) -> (Complex64, f64)>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, ec) = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut inner = ec * WGK[7];
    let mut resabs = fc.norm() * WGK[7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let (f1, e1) = f(c - h * x);
        let (f2, e2) = f(c + h * x);
        k += (f1 + f2) * WGK[j];
        inner += (e1 + e2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        // odd Kronrod nodes are the Gauss nodes
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).norm() + inner * h.abs();
    Panel { a, b, value, error, resabs: resabs * h.abs() }
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]`, bisecting the worst panel.
pub fn gauss_kronrod<F: FnMut(f64) -> (Complex64, f64)>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    let mut panels = vec![gk15(&mut f, a, b)];
    let mut evals = 15;
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        // cancellation below 50 ulp of ∫|f| cannot be resolved
        let floor = 50.0 * f64::EPSILON * resabs;
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()).max(floor) {
            return QuadResult { value, error, evals, converged: true };
        }
        if panels.len() >= cfg.max_intervals {
            return QuadResult { value, error, evals, converged: false };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("nonempty");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        panels.push(gk15(&mut f, p.a, m));
        panels.push(gk15(&mut f, m, p.b));
        evals += 30;
    }
}

/// Tanh-sinh on `[a, b]`, real and imaginary parts separately.
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    let tol = cfg.abs_tol.max(cfg.rel_tol);
    let re = quadrature::double_exponential::integrate(|x| f(x).re, a, b, tol);
    let im = quadrature::double_exponential::integrate(|x| f(x).im, a, b, tol);
    let value = Complex64::new(re.integral, im.integral);
    let error = re.error_estimate.hypot(im.error_estimate);
    QuadResult {
        value,
        error,
        evals: re.num_function_evaluations as usize + im.num_function_evaluations as usize,
        converged: error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()) * 10.0,
    }
}

/// `∫_0^∞ f(r) dr` via `r = t/(1-t)`.
pub fn half_line<F: FnMut(f64) -> (Complex64, f64)>(mut f: F, cfg: &QuadConfig) -> QuadResult {
    gauss_kronrod(
        |t| {
            if t >= 1.0 {
                return (Complex64::new(0.0, 0.0), 0.0);
            }
            let u = 1.0 - t;
            let (v, e) = f(t / u);
            let j = 1.0 / (u * u);
            (v * j, e * j)
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Tanh-sinh counterpart of [`half_line`].
pub fn half_line_tanh_sinh<F: Fn(f64) -> Complex64>(f: F, cfg: &QuadConfig) -> QuadResult {
    tanh_sinh(
        |t| {
            if t >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let u = 1.0 - t;
            f(t / u) / (u * u)
        },
        0.0,
        1.0,
        cfg,
    )
}
