//! Poisson brackets and first-order operators on the plane.

use super::polynomial::Polynomial;

/// `{f, g} = ∂f/∂q ∂g/∂p − ∂g/∂q ∂f/∂p`.
pub fn poisson_bracket(f: &Polynomial, g: &Polynomial) -> Polynomial {
    &(&f.d_dq() * &g.d_dp()) - &(&g.d_dq() * &f.d_dp())
}

/// The Hamiltonian vector field `(∂F/∂p, −∂F/∂q)`; as an operator it acts
/// as `{·, F}`.
pub fn hamiltonian_vector_field(f: &Polynomial) -> VectorField {
    VectorField {
        vq: f.d_dp(),
        vp: -f.d_dq(),
    }
}

/// A polynomial vector field `(v^q, v^p)` on phase space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VectorField {
    pub vq: Polynomial,
    pub vp: Polynomial,
}

impl VectorField {
    pub fn new(vq: Polynomial, vp: Polynomial) -> Self {
        VectorField { vq, vp }
    }

    pub fn zero() -> Self {
        VectorField::default()
    }

    pub fn is_zero(&self) -> bool {
        self.vq.is_zero() && self.vp.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.vq.degree().max(self.vp.degree())
    }

    /// `∂v^q/∂q + ∂v^p/∂p`.
    pub fn divergence(&self) -> Polynomial {
        &self.vq.d_dq() + &self.vp.d_dp()
    }

    /// `v·∇f = v^q ∂f/∂q + v^p ∂f/∂p`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        &(&self.vq * &f.d_dq()) + &(&self.vp * &f.d_dp())
    }

    /// Recovers `H` with `(∂H/∂p, −∂H/∂q) = v` and `H(0,0) = 0` when the
    /// field is divergence-free; `None` otherwise.
    pub fn hamiltonian(&self) -> Option<Polynomial> {
        if !self.divergence().is_zero() {
            return None;
        }
        // H = ∫₀^p v^q dp' − ∫₀^q v^p(q', 0) dq'
        let along_p = self.vq.antiderivative_p();
        let along_q = self.vp.at_p_zero().antiderivative_q();
        Some(&along_p - &along_q)
    }

    /// Matrix of partial derivatives `[[∂v^q/∂q, ∂v^q/∂p], [∂v^p/∂q, ∂v^p/∂p]]`.
    pub fn jacobian(&self) -> [[Polynomial; 2]; 2] {
        [[self.vq.d_dq(), self.vq.d_dp()], [self.vp.d_dq(), self.vp.d_dp()]]
    }

    pub fn eval_f64(&self, q: f64, p: f64) -> [f64; 2] {
        [self.vq.eval_f64(q, p), self.vp.eval_f64(q, p)]
    }
}

impl std::ops::Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            vq: &self.vq + &rhs.vq,
            vp: &self.vp + &rhs.vp,
        }
    }
}

impl std::ops::AddAssign<&VectorField> for VectorField {
    fn add_assign(&mut self, rhs: &VectorField) {
        self.vq += &rhs.vq;
        self.vp += &rhs.vp;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::polynomial::rat;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(poisson_bracket(&poly("q"), &poly("p")), Polynomial::one());
        assert_eq!(poisson_bracket(&poly("p^2"), &poly("q")), poly("-2*p"));
        // {p²/2 + q²/2, qp}: f_q g_p − g_q f_p = q·q − p·p
        assert_eq!(
            poisson_bracket(&poly("1/2*p^2 + 1/2*q^2"), &poly("q*p")),
            poly("q^2 - p^2")
        );
    }

    #[test]
    fn hamiltonian_vector_field_examples() {
        let v = hamiltonian_vector_field(&poly("2*p + 5*q"));
        assert_eq!(v, VectorField::new(poly("2"), poly("-5")));
        assert!(hamiltonian_vector_field(&Polynomial::zero()).is_zero());
        // Example-2 F at γ = 9/16, zScale = 2: (3/4)(p²/4 + q²)
        let v = hamiltonian_vector_field(&poly("3/4*(1/4*p^2 + q^2)"));
        assert_eq!(v, VectorField::new(poly("3/8*p"), poly("-3/2*q")));
    }

    #[test]
    fn divergence_examples() {
        let dho = VectorField::new(poly("p"), poly("-q - 1/2*p"));
        assert_eq!(dho.divergence(), Polynomial::constant(rat(-1, 2)));
        assert_eq!(VectorField::new(poly("q"), poly("p")).divergence(), poly("2"));
        let h = hamiltonian_vector_field(&poly("q^3*p - 2*p^4 + q"));
        assert!(h.divergence().is_zero());
    }

    #[test]
    fn recover_hamiltonian() {
        let h = VectorField::new(poly("p"), poly("-q")).hamiltonian().unwrap();
        assert_eq!(h, poly("1/2*p^2 + 1/2*q^2"));
        let dho = VectorField::new(poly("p"), poly("-q - 1/2*p"));
        assert!(dho.hamiltonian().is_none());
        let lin = VectorField::new(poly("3"), poly("-7")).hamiltonian().unwrap();
        assert_eq!(lin, poly("3*p + 7*q"));
    }

    #[test]
    fn first_order_application() {
        assert_eq!(VectorField::new(poly("1"), poly("0")).apply(&poly("q^2")), poly("2*q"));
        let dho = VectorField::new(poly("p"), poly("-q - 1/2*p"));
        assert_eq!(dho.apply(&poly("q")), poly("p"));
        let rot = VectorField::new(poly("p"), poly("-q"));
        assert_eq!(rot.apply(&poly("q*p")), poly("p^2 - q^2"));
    }
}
