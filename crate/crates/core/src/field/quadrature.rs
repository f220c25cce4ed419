//! Composite tensor-product Gauss-Legendre quadrature over a square, with
//! per-panel refinement.
//!
//! All users on a unit are integrated together: the same panel partition is
//! used for every entry of the `K x K` coupling block, so the result is
//! Hermitian by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Largest base panel side as a fraction of the wavelength.
    pub panel_fraction: f64,
    /// Gauss nodes per panel and dimension.
    pub nodes_per_panel: usize,
    /// Relative tolerance on the change from one refinement level to the next.
    pub rel_tol: f64,
    /// Maximum number of bisection levels below a base panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_fraction: 0.5,
            nodes_per_panel: 4,
            rel_tol: 1e-8,
            max_depth: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.panel_fraction > 0.0 && self.panel_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "panel_fraction must lie in (0, 1], got {}",
                self.panel_fraction
            )));
        }
        if self.nodes_per_panel < 2 {
            return Err(Error::domain("nodes_per_panel must be at least 2"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain("rel_tol must be positive"));
        }
        Ok(())
    }

    /// Same rule with base panels half as wide.
    pub fn halved(&self) -> Self {
        Self {
            panel_fraction: self.panel_fraction / 2.0,
            ..*self
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and P_{n-1}
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
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
    (nodes, weights)
}

/// Rectangle `[x0, x0 + h] x [y0, y0 + h]` in coordinates local to the unit
/// center.
#[derive(Debug, Clone, Copy)]
struct Panel {
    x0: f64,
    y0: f64,
    h: f64,
}

impl Panel {
    fn children(&self) -> [Panel; 4] {
        let h = 0.5 * self.h;
        [
            Panel { x0: self.x0, y0: self.y0, h },
            Panel { x0: self.x0 + h, y0: self.y0, h },
            Panel { x0: self.x0, y0: self.y0 + h, h },
            Panel { x0: self.x0 + h, y0: self.y0 + h, h },
        ]
    }
}

/// Result of integrating `s_l * conj(s_k)` for every pair of channels.
#[derive(Debug, Clone)]
pub struct BlockIntegral {
    pub size: usize,
    /// Row-major, entry `k * size + l` holds the `(k, l)` coupling.
    pub values: Vec<Complex64>,
    /// Estimated relative change if every leaf panel were bisected once
    /// more; entries are normalized by `sqrt(phi_kk * phi_ll)`.
    pub rel_change: f64,
    /// Whether every leaf met its share of the tolerance.
    pub converged: bool,
    pub leaves: usize,
}

impl BlockIntegral {
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.values[k * self.size + l]
    }
}

struct Integrator<'a, F> {
    eval: &'a F,
    count: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    max_depth: u32,
    scale: Vec<f64>,
    samples: Vec<Complex64>,
    leaves: usize,
    converged: bool,
}

impl<'a, F> Integrator<'a, F>
where
    F: Fn(f64, f64, &mut [Complex64]) -> Result<()>,
{
    /// Tensor rule on one panel. Only the upper triangle (`l >= k`) is
    /// accumulated; the diagonal is real.
    fn rule(&mut self, panel: Panel, out: &mut [Complex64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let half = 0.5 * panel.h;
        let (cx, cy) = (panel.x0 + half, panel.y0 + half);
        let k = self.count;
        for (i, &ni) in self.nodes.iter().enumerate() {
            for (j, &nj) in self.nodes.iter().enumerate() {
                let w = self.weights[i] * self.weights[j] * half * half;
                (self.eval)(cx + half * ni, cy + half * nj, &mut self.samples)?;
                for a in 0..k {
                    let sa = self.samples[a];
                    out[a * k + a].re += sa.norm_sqr() * w;
                    for b in a + 1..k {
                        out[a * k + b] += (self.samples[b] * sa.conj()) * w;
                    }
                }
            }
        }
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::domain("coupling integrand is not finite on the unit"));
        }
        Ok(())
    }

    fn discrepancy(&self, coarse: &[Complex64], fine: &[Complex64]) -> f64 {
        let k = self.count;
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let d = (fine[a * k + b] - coarse[a * k + b]).norm() / (self.scale[a] * self.scale[b]).sqrt();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Returns the refined panel value and the leaf discrepancy sum.
    fn refine(&mut self, panel: Panel, coarse: &[Complex64], tol: f64, depth: u32, acc: &mut [Complex64]) -> Result<f64> {
        let kk = self.count * self.count;
        let children = panel.children();
        let mut child_vals = vec![Complex64::new(0.0, 0.0); 4 * kk];
        for (c, child) in children.iter().enumerate() {
            self.rule(*child, &mut child_vals[c * kk..(c + 1) * kk])?;
        }
        let mut fine = vec![Complex64::new(0.0, 0.0); kk];
        for c in 0..4 {
            for (f, v) in fine.iter_mut().zip(&child_vals[c * kk..(c + 1) * kk]) {
                *f += *v;
            }
        }
        let err = self.discrepancy(coarse, &fine);
        if err <= tol || depth >= self.max_depth {
            if err > tol {
                self.converged = false;
            }
            self.leaves += 4;
            for (a, f) in acc.iter_mut().zip(&fine) {
                *a += *f;
            }
            return Ok(err);
        }
        let mut total = 0.0;
        for c in 0..4 {
            let coarse_child = child_vals[c * kk..(c + 1) * kk].to_vec();
            total += self.refine(children[c], &coarse_child, tol / 4.0, depth + 1, acc)?;
        }
        Ok(total)
    }
}

/// Integrate `s_l(x, y) * conj(s_k(x, y))` over the square `[-side/2, side/2]^2`
/// for all channel pairs. `eval(x, y, out)` writes the `count` channel values
/// at local coordinates `(x, y)`.
pub fn integrate_block<F>(side: f64, wavelength: f64, count: usize, spec: &QuadratureSpec, eval: F) -> Result<BlockIntegral>
where
    F: Fn(f64, f64, &mut [Complex64]) -> Result<()>,
{
    spec.validate()?;
    if count == 0 {
        return Err(Error::domain("no channels to integrate"));
    }
    let per_side = (side / (spec.panel_fraction * wavelength)).ceil().max(1.0) as usize;
    let h = side / per_side as f64;
    let (nodes, weights) = gauss_legendre(spec.nodes_per_panel);
    let kk = count * count;
    let mut integ = Integrator {
        eval: &eval,
        count,
        nodes,
        weights,
        max_depth: spec.max_depth,
        scale: vec![0.0; count],
        samples: vec![Complex64::new(0.0, 0.0); count],
        leaves: 0,
        converged: true,
    };

    let origin = -0.5 * side;
    let mut base = Vec::with_capacity(per_side * per_side);
    let mut base_vals = vec![Complex64::new(0.0, 0.0); per_side * per_side * kk];
    for i in 0..per_side {
        for j in 0..per_side {
            let idx = base.len();
            let panel = Panel {
                x0: origin + i as f64 * h,
                y0: origin + j as f64 * h,
                h,
            };
            integ.rule(panel, &mut base_vals[idx * kk..(idx + 1) * kk])?;
            base.push(panel);
        }
    }
    for k in 0..count {
        integ.scale[k] = (0..base.len()).map(|p| base_vals[p * kk + k * count + k].re).sum();
        if !(integ.scale[k] > 0.0) {
            return Err(Error::domain("self-coupling is not positive"));
        }
    }

    let tol = spec.rel_tol / base.len() as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); kk];
    let mut rel_change = 0.0;
    for (p, panel) in base.iter().enumerate() {
        let coarse = base_vals[p * kk..(p + 1) * kk].to_vec();
        rel_change += integ.refine(*panel, &coarse, tol, 0, &mut acc)?;
    }

    for a in 0..count {
        acc[a * count + a].im = 0.0;
        for b in 0..a {
            acc[a * count + b] = acc[b * count + a].conj();
        }
    }
    Ok(BlockIntegral {
        size: count,
        values: acc,
        rel_change,
        converged: integ.converged,
        leaves: integ.leaves,
    })
}
