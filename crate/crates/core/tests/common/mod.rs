//! Reference values computed independently of the crate under test.

#![allow(dead_code, clippy::excessive_precision)]

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 40)
}

/// Density of `|Y|` when `Y = A S + W`, `S = +-1` equiprobable and `W` is
/// Laplacian with the given rate: a two-sided exponential folded at zero.
pub fn folded_density(x: f64, amplitude: f64, rate: f64) -> f64 {
    0.5 * rate * ((-rate * (x - amplitude).abs()).exp() + (-rate * (x + amplitude)).exp())
}

/// `E[g(ln F0(|Y|))]` under the signal-present model, by quadrature over `x`.
///
/// The log singularity at `x = 0` is removed with `x = u^2` on `[0, A]`.
pub fn expect_of_log_z(g: impl Fn(f64) -> f64, snr_linear: f64, variance: f64) -> f64 {
    let rate = (2.0 / variance).sqrt();
    let amp = snr_linear.sqrt();
    let h = |x: f64| {
        let ln_z = (-(-rate * x).exp_m1()).ln();
        g(ln_z) * folded_density(x, amp, rate)
    };
    let near = integrate(
        |u| {
            if u == 0.0 {
                0.0
            } else {
                2.0 * u * h(u * u)
            }
        },
        0.0,
        amp.sqrt(),
        1e-13,
    );
    let upper = amp + 60.0 / rate;
    let far =
        integrate(h, amp, amp + 1.0 / rate, 1e-13) + integrate(h, amp + 1.0 / rate, upper, 1e-13);
    near + far
}

/// `(E[ln z], E[(ln z)^2])` under the signal-present model.
pub fn log_z_moments(snr_linear: f64, variance: f64) -> (f64, f64) {
    (
        expect_of_log_z(|l| l, snr_linear, variance),
        expect_of_log_z(|l| l * l, snr_linear, variance),
    )
}

/// Standard normal upper tail by quadrature of the density.
pub fn normal_upper_tail(x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x < 0.0 {
        return 1.0 - normal_upper_tail(-x);
    }
    0.5 - integrate(pdf, 0.0, x, 1e-15)
}
