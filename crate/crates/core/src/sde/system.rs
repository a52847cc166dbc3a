//! Models lowered to f64 for integration: drift, noise fields and their
//! Jacobians, all obtained by exact differentiation before conversion.

use nalgebra::Matrix2;

use super::SdeError;
use crate::algebra::{rational_to_f64, ModelSpec, Polynomial, VectorField};

#[derive(Clone, Debug, PartialEq)]
struct CompiledPoly {
    terms: Vec<(usize, usize, f64)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| (m.q as usize, m.p as usize, rational_to_f64(c)))
                .collect(),
        }
    }

    #[inline]
    fn eval(&self, pw: &Powers) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * pw.q[i] * pw.p[j]).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct CompiledField {
    vq: CompiledPoly,
    vp: CompiledPoly,
    jac: [[CompiledPoly; 2]; 2],
}

impl CompiledField {
    fn new(v: &VectorField) -> Self {
        let [[a, b], [c, d]] = v.jacobian();
        CompiledField {
            vq: CompiledPoly::new(&v.vq),
            vp: CompiledPoly::new(&v.vp),
            jac: [
                [CompiledPoly::new(&a), CompiledPoly::new(&b)],
                [CompiledPoly::new(&c), CompiledPoly::new(&d)],
            ],
        }
    }

    #[inline]
    fn value(&self, pw: &Powers) -> [f64; 2] {
        [self.vq.eval(pw), self.vp.eval(pw)]
    }

    #[inline]
    fn jacobian(&self, pw: &Powers) -> Matrix2<f64> {
        Matrix2::new(
            self.jac[0][0].eval(pw),
            self.jac[0][1].eval(pw),
            self.jac[1][0].eval(pw),
            self.jac[1][1].eval(pw),
        )
    }
}

/// Scratch table of `q^i`, `p^j` for the current state.
#[derive(Clone, Debug)]
pub struct Powers {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl Powers {
    fn new(degree: usize) -> Self {
        Powers {
            q: vec![1.0; degree + 1],
            p: vec![1.0; degree + 1],
        }
    }

    #[inline]
    fn fill(&mut self, q: f64, p: f64) {
        for i in 1..self.q.len() {
            self.q[i] = self.q[i - 1] * q;
            self.p[i] = self.p[i - 1] * p;
        }
    }
}

/// `dx = v(x) dt + Σ_k σ_k(x) dW_k`, with the noise fields in increment
/// order (`dQ_k`, then `dP_k` for conjugate pairs).
#[derive(Clone, Debug, PartialEq)]
pub struct SdeSystem {
    drift: CompiledField,
    noise: Vec<CompiledField>,
    degree: usize,
}

impl SdeSystem {
    pub fn from_model(model: &ModelSpec) -> Self {
        Self::from_fields(&model.drift_field(), &model.noise_fields())
    }

    pub fn from_fields(drift: &VectorField, noise: &[VectorField]) -> Self {
        let degree = noise
            .iter()
            .chain(std::iter::once(drift))
            .map(VectorField::degree)
            .max()
            .unwrap_or(0) as usize;
        SdeSystem {
            drift: CompiledField::new(drift),
            noise: noise.iter().map(CompiledField::new).collect(),
            degree,
        }
    }

    /// Same drift, all noise removed.
    pub fn without_noise(&self) -> Self {
        SdeSystem {
            drift: self.drift.clone(),
            noise: Vec::new(),
            degree: self.degree,
        }
    }

    /// Number of Wiener increments consumed per step.
    pub fn noise_width(&self) -> usize {
        self.noise.len()
    }

    pub fn powers(&self) -> Powers {
        Powers::new(self.degree)
    }

    /// One Euler–Maruyama step with every coefficient taken at the
    /// pre-step state. When `jac` is given it is advanced by the
    /// variational equation driven by the same increments.
    #[inline]
    pub fn step(
        &self,
        x: [f64; 2],
        dt: f64,
        increments: &[f64],
        jac: Option<&mut Matrix2<f64>>,
        pw: &mut Powers,
    ) -> [f64; 2] {
        debug_assert_eq!(increments.len(), self.noise.len());
        pw.fill(x[0], x[1]);
        let v = self.drift.value(pw);
        let mut out = [x[0] + v[0] * dt, x[1] + v[1] * dt];
        for (field, &dw) in self.noise.iter().zip(increments) {
            let s = field.value(pw);
            out[0] += s[0] * dw;
            out[1] += s[1] * dw;
        }
        if let Some(j) = jac {
            let mut m = self.drift.jacobian(pw) * dt;
            for (field, &dw) in self.noise.iter().zip(increments) {
                m += field.jacobian(pw) * dw;
            }
            *j += m * *j;
        }
        out
    }
}

/// Single Euler–Maruyama step of `model` from `state`.
pub fn em_step(model: &ModelSpec, state: [f64; 2], dt: f64, increments: &[f64]) -> Result<[f64; 2], SdeError> {
    let system = SdeSystem::from_model(model);
    if increments.len() != system.noise_width() {
        return Err(SdeError::IncrementCount {
            expected: system.noise_width(),
            got: increments.len(),
        });
    }
    if !(state.iter().all(|x| x.is_finite()) && increments.iter().all(|x| x.is_finite()) && dt.is_finite()) {
        return Err(SdeError::NonFiniteInput);
    }
    let out = system.step(state, dt, increments, None, &mut system.powers());
    if out.iter().all(|x| x.is_finite()) {
        Ok(out)
    } else {
        Err(SdeError::BlowUp { step: 1, time: dt })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::catalog::{build_dho_model, build_linear_model, LinearModelParams};
    use approx::assert_relative_eq;

    #[test]
    fn linear_model_single_step() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 4))).unwrap();
        let x = em_step(&model, [1.0, 0.0], 0.01, &[0.1, -0.2]).unwrap();
        assert_relative_eq!(x[0], 0.95, epsilon = 1e-15);
        assert_relative_eq!(x[1], 0.09, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_euler_step() {
        let model = ModelSpec::hamiltonian_only("1/2*p^2 + 1/2*q^2".parse().unwrap());
        assert_eq!(em_step(&model, [1.0, 0.0], 0.01, &[]).unwrap(), [1.0, -0.01]);
    }

    #[test]
    fn example2_noise_field() {
        let model = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(9, 16), &rat(2, 1)).unwrap();
        let w = 0.3;
        let x = em_step(&model, [0.0, 1.0], 0.0, &[w]).unwrap();
        assert_relative_eq!(x[0], 3.0 / 8.0 * w, epsilon = 1e-15);
        assert_eq!(x[1], 1.0);
    }

    #[test]
    fn input_errors() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 4))).unwrap();
        assert!(matches!(
            em_step(&model, [1.0, 0.0], 0.01, &[0.1]),
            Err(SdeError::IncrementCount { expected: 2, got: 1 })
        ));
        assert_eq!(
            em_step(&model, [f64::NAN, 0.0], 0.01, &[0.0, 0.0]),
            Err(SdeError::NonFiniteInput)
        );
        assert_eq!(
            em_step(&model, [0.0, 0.0], 0.01, &[f64::INFINITY, 0.0]),
            Err(SdeError::NonFiniteInput)
        );
    }

    #[test]
    fn jacobian_of_linear_step_is_i_plus_a_dt() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let sys = SdeSystem::from_model(&model);
        let mut j = Matrix2::identity();
        sys.step([0.3, -0.7], 0.1, &[0.5, 0.2], Some(&mut j), &mut sys.powers());
        assert_relative_eq!(j, Matrix2::new(1.0, 0.1, -0.1, 0.95), epsilon = 1e-15);
    }
}
