//! Small special-function toolbox: Gauss-Legendre rules, the exponential
//! integral E1, and low-order Legendre functions of both kinds.
//!
//! These are the only special functions the integral evaluations need. The
//! Gauss nodes are found by Newton iteration on the Legendre polynomial,
//! E1 switches between the alternating series and a continued fraction at
//! x = 1, and the second-kind Legendre functions are needed only for
//! l <= 2 because the two-center charge distributions terminate the
//! multipole expansion there.

/// Euler-Mascheroni constant, written with the true digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_861;

/// Legendre polynomial P_n and derivative P_n' at `x` by upward recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    // Derivative from the standard identity; |x| = 1 never occurs for roots.
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Legendre polynomial P_l(x) for l <= 2.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        2 => 1.5 * x * x - 0.5,
        _ => legendre_pair(l, x).0,
    }
}

/// Legendre function of the second kind Q_l(x) for l <= 2 on x > 1.
///
/// # Arguments
/// * `l` - order, only 0..=2 are supported
/// * `x` - argument, strictly greater than 1
pub fn legendre_q(l: usize, x: f64) -> f64 {
    debug_assert!(x > 1.0, "Q_l is evaluated on the cut-free region x > 1");
    let q0 = 0.5 * ((x + 1.0) / (x - 1.0)).ln();
    match l {
        0 => q0,
        1 => x * q0 - 1.0,
        2 => (1.5 * x * x - 0.5) * q0 - 1.5 * x,
        _ => panic!("legendre_q supports l <= 2 only, got {l}"),
    }
}

/// Fixed-order Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    /// Nodes in ascending order.
    pub nodes: Vec<f64>,
    /// Weights matching `nodes`.
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Builds the n-point rule. Nodes are the roots of P_n located by Newton
    /// iteration from the Chebyshev-like initial guess; weights follow from
    /// the derivative identity w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
    ///
    /// # Arguments
    /// * `n` - number of nodes, n >= 1
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess for the i-th root from above.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_pair(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            // One polishing step keeps the weights at full precision.
            let (p, d) = legendre_pair(n, x);
            x -= p / d;
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // Odd rules pin the middle node at zero exactly.
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_pair(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over [a, b] with the affinely mapped rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0.
///
/// The alternating series converges fast for x <= 1; beyond that the
/// continued fraction evaluated with the modified Lentz algorithm takes
/// over. Both pieces are accurate to full double precision on their side
/// of the switch.
///
/// # Arguments
/// * `x` - argument, strictly positive
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 is defined here for positive arguments only");
    if x <= 1.0 {
        // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=60 {
            let kf = k as f64;
            term *= -x / kf;
            let contrib = -term / kf;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // E1(x) = exp(-x) * 1/(x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...)))))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x).exp() * h
    }
}
