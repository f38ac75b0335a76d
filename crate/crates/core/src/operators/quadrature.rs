//! Fixed quadrature rules used by the kernel oracle and by time integration
//! of diagnostics.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quadrature points on a union of intervals.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` points.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> Rule {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut rule = Rule::default();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            rule.nodes.push(lo + 0.5 * h * (xi + 1.0));
            rule.weights.push(0.5 * h * wi);
        }
    }
    rule
}

/// Tanh-sinh rule on `[0, a]` clustered at the left end, for integrands
/// with an integrable singularity at 0.
///
/// Abscissas are formed as `a / (1 + e^{-π sinh t})`, which stays accurate
/// for nodes extremely close to 0.
pub fn tanh_sinh_left(a: f64, level: u32) -> Rule {
    let h = 0.5f64.powi(level as i32);
    let t_max = 4.0;
    let steps = (t_max / h) as i64;
    let mut rule = Rule::default();
    for j in -steps..=steps {
        let t = j as f64 * h;
        let s = PI * t.sinh();
        let x = a / (1.0 + (-s).exp());
        let c = (0.5 * s).cosh();
        let w = a * h * PI * t.cosh() / (4.0 * c * c);
        if x > 0.0 && x < a && w > 0.0 && w.is_finite() {
            rule.nodes.push(x);
            rule.weights.push(w);
        }
    }
    rule
}

/// `[0, b]` split as a tanh-sinh first panel then Gauss panels.
pub fn singular_left_rule(b: f64, panels: usize, order: usize) -> Rule {
    let h = b / panels as f64;
    let mut rule = tanh_sinh_left(h, 6);
    if panels > 1 {
        rule.extend(composite_gauss(h, b, panels - 1, order));
    }
    rule
}

/// Length of the longest prefix of `times` with constant spacing.
fn uniform_prefix(times: &[f64]) -> usize {
    if times.len() < 2 {
        return times.len();
    }
    let h = times[1] - times[0];
    let tol = 1e-9 * h.abs().max(f64::MIN_POSITIVE);
    1 + times
        .windows(2)
        .take_while(|w| ((w[1] - w[0]) - h).abs() <= tol)
        .count()
}

/// Running integral `∫_{t_0}^{t_i} f dt` at each sample.
///
/// On the longest uniformly spaced prefix (at least three samples) the
/// trapezoid rule is corrected with the first Euler–Maclaurin endpoint
/// term, using second-order difference estimates of `f'`, which makes the
/// rule fourth order. Samples past that prefix continue with the plain
/// trapezoid rule.
pub fn cumulative_integral(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let n = times.len();
    let mut out = vec![0.0; n];
    for i in 1..n {
        out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
    }
    let m = uniform_prefix(times);
    if m < 3 {
        return out;
    }
    let h = times[1] - times[0];
    let deriv = |j: usize| -> f64 {
        if j == 0 {
            (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
        } else if j == m - 1 {
            (3.0 * values[j] - 4.0 * values[j - 1] + values[j - 2]) / (2.0 * h)
        } else {
            (values[j + 1] - values[j - 1]) / (2.0 * h)
        }
    };
    let d0 = deriv(0);
    let mut last = 0.0;
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        if i < m {
            last = h * h / 12.0 * (deriv(i) - d0);
        }
        *o -= last;
    }
    out
}

/// Total integral with the same rule as [`cumulative_integral`].
pub fn integrate_samples(times: &[f64], values: &[f64]) -> f64 {
    cumulative_integral(times, values).last().copied().unwrap_or(0.0)
}
