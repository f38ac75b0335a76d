//! Extrema of the trigonometric interpolant, refined from the grid by
//! Newton iteration.

use num_complex::Complex64;

use crate::spectral::{SpectralField, MAX_DIM};

struct Interpolant {
    dim: usize,
    modes: Vec<([i64; MAX_DIM], Complex64)>,
}

impl Interpolant {
    fn new(f: &SpectralField) -> Self {
        let g = f.grid();
        let peak = f.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let modes = f
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-17 * peak)
            .map(|(i, &c)| {
                let mut k = [0i64; MAX_DIM];
                k[..g.n_dim()].copy_from_slice(g.wavevector(i).as_slice());
                (k, c)
            })
            .collect();
        Interpolant { dim: g.n_dim(), modes }
    }

    /// Value, gradient and Hessian at `x`.
    fn eval(&self, x: &[f64]) -> (f64, [f64; MAX_DIM], [[f64; MAX_DIM]; MAX_DIM]) {
        let mut v = 0.0;
        let mut grad = [0.0; MAX_DIM];
        let mut hess = [[0.0; MAX_DIM]; MAX_DIM];
        for (k, c) in &self.modes {
            let phase: f64 = (0..self.dim).map(|a| k[a] as f64 * x[a]).sum();
            let e = c * Complex64::from_polar(1.0, phase);
            v += e.re;
            for a in 0..self.dim {
                // d/dx_a of Re(c e^{ik·x}) = Re(i k_a e) = -k_a Im(e)
                grad[a] -= k[a] as f64 * e.im;
                for b in 0..self.dim {
                    hess[a][b] -= (k[a] * k[b]) as f64 * e.re;
                }
            }
        }
        (v, grad, hess)
    }
}

fn solve(h: &[[f64; MAX_DIM]; MAX_DIM], g: &[f64; MAX_DIM], dim: usize) -> Option<[f64; MAX_DIM]> {
    let mut out = [0.0; MAX_DIM];
    match dim {
        1 => {
            if h[0][0] == 0.0 {
                return None;
            }
            out[0] = g[0] / h[0][0];
        }
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det == 0.0 {
                return None;
            }
            out[0] = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
            out[1] = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        }
        _ => return None,
    }
    Some(out)
}

/// Newton refinement of a local extremum starting at grid point `start`.
/// `sign` is +1 for a minimum and -1 for a maximum. The search never
/// leaves the surrounding grid cell and never returns a worse value than
/// the grid sample.
fn refine(p: &Interpolant, start: [f64; MAX_DIM], start_val: f64, spacing: &[f64], sign: f64) -> f64 {
    let dim = p.dim;
    let mut x = start;
    let mut best = start_val;
    for _ in 0..30 {
        let (v, g, h) = p.eval(&x[..dim]);
        if sign * v < sign * best {
            best = v;
        }
        // A minimum needs a positive definite Hessian, a maximum a negative one.
        let definite = match dim {
            1 => sign * h[0][0] > 0.0,
            2 => sign * h[0][0] > 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0,
            _ => false,
        };
        if !definite {
            break;
        }
        let Some(step) = solve(&h, &g, dim) else { break };
        let mut moved = 0.0f64;
        for a in 0..dim {
            x[a] -= step[a];
            if (x[a] - start[a]).abs() > spacing[a] {
                return best;
            }
            moved = moved.max(step[a].abs());
        }
        if moved < 1e-15 {
            let (v, _, _) = p.eval(&x[..dim]);
            if sign * v < sign * best {
                best = v;
            }
            break;
        }
    }
    best
}

/// `(min, max)` of the interpolant of `f`, never looser than the grid
/// extrema. Only 1D and 2D fields are refined; 3D returns grid values.
pub fn refined_extrema(f: &SpectralField) -> (f64, f64) {
    let g = f.grid();
    let vals = f.values();
    let (mut imin, mut imax) = (0, 0);
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[imin] {
            imin = i;
        }
        if v > vals[imax] {
            imax = i;
        }
    }
    if g.n_dim() > 2 {
        return (vals[imin], vals[imax]);
    }
    let p = Interpolant::new(f);
    let spacing: Vec<f64> = (0..g.n_dim()).map(|a| g.spacing(a)).collect();
    let lo = refine(&p, g.point(imin), vals[imin], &spacing, 1.0);
    let hi = refine(&p, g.point(imax), vals[imax], &spacing, -1.0);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn finds_off_grid_extrema() {
        let g = TorusGrid::new(&[16]).unwrap();
        let f = SpectralField::from_fn(&g, |x| (x[0] - 0.2).cos()).unwrap();
        let (lo, hi) = refined_extrema(&f);
        assert!((lo + 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        assert!(f.grid_max() < 0.985);

        let g2 = TorusGrid::new(&[16, 16]).unwrap();
        let f2 = SpectralField::from_fn(&g2, |x| (x[0] - 0.2).cos() * (x[1] + 0.15).cos()).unwrap();
        let (lo, hi) = refined_extrema(&f2);
        assert!((lo + 1.0).abs() < 1e-13 && (hi - 1.0).abs() < 1e-13);
    }
}
