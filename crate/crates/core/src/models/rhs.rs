use num_complex::Complex64;

use super::params::{Equation, ModelParams};
use crate::error::{Error, Result};
use crate::operators::symbols;
use crate::spectral::{dealias_coeffs, dealias_mask, forward_real, inverse_real, Multiplier, SpectralField, TorusGrid};

/// Right-hand side of a model on a fixed grid, with every symbol tabulated
/// once. Works directly on coefficient arrays.
#[derive(Debug, Clone)]
pub struct RhsEvaluator {
    grid: TorusGrid,
    params: ModelParams,
    linear: Vec<f64>,
    deriv: Vec<Vec<Complex64>>,
    hilbert: Vec<Complex64>,
    riesz: Vec<Vec<Complex64>>,
    velocity: Vec<Vec<Complex64>>,
    mask: Vec<bool>,
}

fn table(grid: &TorusGrid, sigma: impl Fn(&[i64]) -> Complex64) -> Result<Vec<Complex64>> {
    Ok(Multiplier::from_fn(grid, sigma)?.values().to_vec())
}

fn to_phys(grid: &TorusGrid, symbol: &[Complex64], coeffs: &[Complex64]) -> Vec<f64> {
    let scaled: Vec<Complex64> = coeffs.iter().zip(symbol).map(|(c, s)| c * s).collect();
    inverse_real(grid, &scaled)
}

fn check_state(coeffs: &[Complex64]) -> Result<()> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::BlowUp("non-finite value in the nonlinear term".into()));
    }
    Ok(())
}

impl RhsEvaluator {
    pub fn new(grid: &TorusGrid, params: &ModelParams) -> Result<Self> {
        params.check_grid(grid)?;
        let n = grid.n_dim();
        let linear = grid.wavevectors().map(|k| params.linear_symbol(k.as_slice())).collect();
        let deriv = (0..n)
            .map(|a| table(grid, symbols::derivative(a)))
            .collect::<Result<Vec<_>>>()?;
        let (hilbert, riesz, velocity) = match params.equation {
            Equation::OneD => (table(grid, symbols::hilbert)?, Vec::new(), Vec::new()),
            Equation::NDim => {
                let riesz = (0..n)
                    .map(|j| table(grid, symbols::riesz(j)))
                    .collect::<Result<Vec<_>>>()?;
                let velocity = params
                    .velocity
                    .as_ref()
                    .expect("validated")
                    .tables(grid)?
                    .into_iter()
                    .map(|m| m.values().to_vec())
                    .collect();
                (Vec::new(), riesz, velocity)
            }
        };
        Ok(RhsEvaluator {
            grid: grid.clone(),
            params: params.clone(),
            linear,
            deriv,
            hilbert,
            riesz,
            velocity,
            mask: dealias_mask(grid),
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `-(ν|k|^γ + ε|k|²)` per stored mode.
    pub fn linear_symbol(&self) -> &[f64] {
        &self.linear
    }

    /// Dealiased coefficients of a pointwise product.
    fn product(&self, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let mut c = forward_real(&self.grid, &prod);
        dealias_coeffs(&self.mask, &mut c);
        c
    }

    /// Quadratic part of the right-hand side in coefficients.
    pub fn nonlinear(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let len = self.grid.len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        if self.params.linear_only {
            return Ok(out);
        }
        let delta = self.params.delta;
        let theta = inverse_real(&self.grid, coeffs);
        match self.params.equation {
            Equation::OneD => {
                let h = to_phys(&self.grid, &self.hilbert, coeffs);
                if delta < 1.0 {
                    let tx = to_phys(&self.grid, &self.deriv[0], coeffs);
                    let adv = self.product(&h, &tx);
                    for (o, a) in out.iter_mut().zip(&adv) {
                        *o -= a * (1.0 - delta);
                    }
                }
                if delta > 0.0 {
                    let flux = self.product(&theta, &h);
                    for ((o, f), d) in out.iter_mut().zip(&flux).zip(&self.deriv[0]) {
                        *o -= f * d * delta;
                    }
                }
            }
            Equation::NDim => {
                let n = self.grid.n_dim();
                if delta < 1.0 {
                    let mut adv = vec![0.0; len];
                    for i in 0..n {
                        let u = to_phys(&self.grid, &self.velocity[i], coeffs);
                        let gi = to_phys(&self.grid, &self.deriv[i], coeffs);
                        for ((a, x), y) in adv.iter_mut().zip(&u).zip(&gi) {
                            *a += x * y;
                        }
                    }
                    let mut c = forward_real(&self.grid, &adv);
                    dealias_coeffs(&self.mask, &mut c);
                    for (o, a) in out.iter_mut().zip(&c) {
                        *o -= a * (1.0 - delta);
                    }
                }
                if delta > 0.0 {
                    for i in 0..n {
                        let r = to_phys(&self.grid, &self.riesz[i], coeffs);
                        let flux = self.product(&theta, &r);
                        for ((o, f), d) in out.iter_mut().zip(&flux).zip(&self.deriv[i]) {
                            *o -= f * d * delta;
                        }
                    }
                }
            }
        }
        check_state(&out)?;
        Ok(out)
    }

    /// Full right-hand side in coefficients.
    pub fn evaluate(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = self.nonlinear(coeffs)?;
        for ((o, c), l) in out.iter_mut().zip(coeffs).zip(&self.linear) {
            *o += c * l;
        }
        Ok(out)
    }
}

/// `θ_t` for the selected model, every quadratic product dealiased once.
pub fn rhs(theta: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    let eval = RhsEvaluator::new(theta.grid(), params)?;
    SpectralField::from_coeffs(theta.grid(), eval.evaluate(theta.coeffs())?)
}

/// The 1D right-hand side assembled in the equivalent form
/// `-Hθθ_x - δθΛθ - νΛ^γθ + εθ_xx`.
pub fn rhs_lambda_form(theta: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    let grid = theta.grid();
    params.check_grid(grid)?;
    if params.equation != Equation::OneD {
        return Err(Error::Dimension("the Λ form exists for the 1D model only".into()));
    }
    let eval = RhsEvaluator::new(grid, params)?;
    let c = theta.coeffs();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    if !params.linear_only {
        let th = theta.values();
        let h = to_phys(grid, &eval.hilbert, c);
        let tx = to_phys(grid, &eval.deriv[0], c);
        let lam = table(grid, |k| Complex64::new(symbols::lambda_pow(1.0)(k), 0.0))?;
        let lt = to_phys(grid, &lam, c);
        let a = eval.product(&h, &tx);
        let b = eval.product(th, &lt);
        for ((o, x), y) in out.iter_mut().zip(&a).zip(&b) {
            *o -= x + y * params.delta;
        }
    }
    for ((o, ci), l) in out.iter_mut().zip(c).zip(eval.linear_symbol()) {
        *o += ci * l;
    }
    SpectralField::from_coeffs(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::VelocityFamily;
    use crate::spectral::dealias;

    #[test]
    fn constants_are_steady() {
        let g1 = TorusGrid::new(&[32]).unwrap();
        let g2 = TorusGrid::new(&[16, 16]).unwrap();
        let p1 = ModelParams::dqg_1d(0.7, 1.3, 0.4, 0.01);
        let p2 = ModelParams::nd_transport(0.5, VelocityFamily::Sqg, 0.01);
        assert!(rhs(&SpectralField::constant(&g1, 2.0), &p1).unwrap().max_abs() < 1e-14);
        assert!(rhs(&SpectralField::constant(&g2, 2.0), &p2).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn linear_only_cosine() {
        let g = TorusGrid::new(&[32]).unwrap();
        let th = SpectralField::from_fn(&g, |x| x[0].cos()).unwrap();
        let p = ModelParams::dqg_1d(1.0, 1.7, 0.0, 0.0).with_linear_only(true);
        let r = rhs(&th, &p).unwrap();
        for (a, b) in r.values().iter().zip(th.values()) {
            assert!((a + b).abs() < 1e-13);
        }
    }

    #[test]
    fn both_forms_agree() {
        let g = TorusGrid::new(&[64]).unwrap();
        let th = dealias(&SpectralField::from_fn(&g, |x| 1.0 + 0.4 * x[0].cos() + 0.2 * (3.0 * x[0]).sin()).unwrap());
        for delta in [0.0, 0.3, 1.0] {
            let p = ModelParams::dqg_1d(0.5, 0.8, delta, 1e-3);
            let a = rhs(&th, &p).unwrap();
            let b = rhs_lambda_form(&th, &p).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-12, "δ={delta}");
            }
        }
    }

    #[test]
    fn blow_up_is_structured() {
        let g = TorusGrid::new(&[16]).unwrap();
        let eval = RhsEvaluator::new(&g, &ModelParams::qg_1d(0.0)).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 16];
        c[1] = Complex64::new(1e300, 0.0);
        c[15] = Complex64::new(1e300, 0.0);
        assert!(matches!(eval.evaluate(&c), Err(Error::BlowUp(_))));
    }
}
