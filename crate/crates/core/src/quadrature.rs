//! Quadrature rules: Gauss-Legendre (single and composite), tanh-sinh for
//! endpoint singularities, and compensated summation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on P_n.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("Gauss-Legendre rule needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over [a, b].
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut acc = Neumaier::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(c + h * x));
        }
        h * acc.sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional composite rule: nodes and weights over a union of panels.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub edges: Vec<f64>,
}

impl Axis {
    /// Composite Gauss-Legendre over the panels delimited by `edges`.
    pub fn from_edges(edges: Vec<f64>, nodes_per_panel: usize) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Config("an axis needs at least one panel".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("panel edges must be strictly increasing".into()));
        }
        let rule = GaussLegendre::new(nodes_per_panel)?;
        let mut nodes = Vec::with_capacity((edges.len() - 1) * nodes_per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let h = 0.5 * (w[1] - w[0]);
            let c = 0.5 * (w[1] + w[0]);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(c + h * x);
                weights.push(h * wt);
            }
        }
        Ok(Self { nodes, weights, edges })
    }

    /// `panels` equal panels over [a, b].
    pub fn uniform(a: f64, b: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return Err(Error::Config(format!(
                "uniform axis needs panels >= 1 and b > a (got {panels} panels on [{a}, {b}])"
            )));
        }
        let edges = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        Self::from_edges(edges, nodes_per_panel)
    }

    /// Same panels, each split in two.
    pub fn refined(&self, nodes_per_panel: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for w in self.edges.windows(2) {
            edges.push(w[0]);
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(*self.edges.last().unwrap());
        Self::from_edges(edges, nodes_per_panel)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().unwrap()
    }
}

/// Panel edges on [0, `upper`]: uniform panels of width `core_width` up to
/// `core`, then widths growing by `growth` and capped at `max_width`.
pub fn graded_edges(core: f64, core_width: f64, growth: f64, max_width: f64, upper: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut x = 0.0;
    while x + 1e-12 < core.min(upper) {
        x = (x + core_width).min(core.min(upper));
        edges.push(x);
    }
    let mut width = core_width;
    while x + 1e-12 < upper {
        width = (width * growth).min(max_width);
        x = (x + width).min(upper);
        if upper - x < 0.25 * width {
            x = upper;
        }
        edges.push(x);
    }
    edges
}

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.sum()
}

/// Tanh-sinh quadrature on [a, b] with level doubling until two successive
/// levels agree to `rel_tol`. The integrand is never evaluated at the
/// endpoints, and abscissae close to an endpoint are formed from their
/// distance to it, so integrable endpoint singularities are handled.
///
/// Returns the integral and the last level-to-level difference.
pub fn tanh_sinh(a: f64, b: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const MAX_LEVEL: u32 = 12;
    const T_MAX: f64 = 6.0;
    let half = 0.5 * (b - a);

    // Contribution of abscissa parameter u (both mirrored points).
    let pair = |u: f64| -> f64 {
        let s = FRAC_PI_2 * u.sinh();
        let c = s.cosh();
        // 1 - tanh(s) computed without cancellation.
        let gap = (-s).exp() / c;
        let w = FRAC_PI_2 * u.cosh() / (c * c);
        if w == 0.0 {
            return 0.0;
        }
        let left = a + half * gap;
        let right = b - half * gap;
        let mut v = 0.0;
        if left > a && left < b {
            v += f(left);
        }
        if right > a && right < b && u != 0.0 {
            v += f(right);
        }
        w * v
    };

    let mut h = 1.0;
    let mut sum = Neumaier::default();
    sum.add(FRAC_PI_2 * f(a + half)); // u = 0
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum.add(pair(k as f64 * h));
        k += 1;
    }
    let mut estimate = half * h * sum.sum();
    let mut diff = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            sum.add(pair(k as f64 * h));
            k += 2;
        }
        let next = half * h * sum.sum();
        diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * estimate.abs() {
            break;
        }
    }
    (estimate, diff)
}

/// Golden-section minimization of a unimodal function on [lo, hi].
pub fn golden_section_min(mut lo: f64, mut hi: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (hi - lo).abs() <= rel_tol * (lo.abs() + hi.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 33] {
            let rule = GaussLegendre::new(n).unwrap();
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - exact).abs() < 1e-14, "n={n}: {got} vs {exact}");
            let even = rule.integrate(-1.0, 1.0, |x| x.powi(2 * (n as i32 - 1)));
            assert_relative_eq!(even, 2.0 / (2.0 * n as f64 - 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let rule = GaussLegendre::new(16).unwrap();
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-15);
        let axis = Axis::uniform(0.0, 12.0, 8, 16).unwrap();
        assert_relative_eq!(axis.weights.iter().sum::<f64>(), 12.0, max_relative = 1e-14);
        assert_eq!(axis.len(), 128);
    }

    #[test]
    fn invalid_axes_are_rejected() {
        assert!(GaussLegendre::new(0).is_err());
        assert!(Axis::uniform(0.0, 1.0, 0, 4).is_err());
        assert!(Axis::from_edges(vec![0.0, 1.0, 1.0], 4).is_err());
    }

    #[test]
    fn refinement_doubles_panels() {
        let axis = Axis::uniform(0.0, 3.0, 3, 4).unwrap();
        let fine = axis.refined(4).unwrap();
        assert_eq!(fine.panels(), 6);
        assert_relative_eq!(fine.weights.iter().sum::<f64>(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn graded_edges_reach_upper_bound() {
        let e = graded_edges(4.0, 0.5, 1.25, 8.0, 400.0);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 400.0);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 8.0 + 1e-9 + 2.0));
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let (v, _) = tanh_sinh(0.0, 1.0, 1e-14, |x| x.powf(-0.5));
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        let (v, _) = tanh_sinh(0.0, 1.0, 1e-14, |x| x.ln());
        assert_relative_eq!(v, -1.0, max_relative = 1e-12);
        let (v, _) = tanh_sinh(0.0, FRAC_PI_2, 1e-14, |x| x.cos().sqrt());
        // ∫ cos^{1/2} = B(3/4, 1/2)/2
        assert_relative_eq!(v, 1.198_140_234_735_592_2, max_relative = 1e-12);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section_min(0.0, 5.0, 1e-12, |x| (x - 1.7).powi(2));
        assert_relative_eq!(x, 1.7, max_relative = 1e-9);
    }
}
