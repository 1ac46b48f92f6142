//! Gross discrete Wigner functions for odd prime dimension.
//!
//! Phase-point operators are `A_u = T_u A₀ T_u†` with the parity
//! `A₀|q⟩ = |−q⟩` and displacements `T_{(q,p)} = ω^{−2⁻¹qp} X^q Z^p`. Pure
//! stabilizer states have non-negative distributions. For qubits (d = 2) no
//! such Clifford-covariant representation exists; that case is not covered.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, StateVector, C64};

/// Dimensions accepted by [`phase_point_operators`].
pub const SUPPORTED_DIMENSIONS: [usize; 3] = [3, 5, 7];

/// A point `(q, p)` of the `d × d` discrete phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscretePhasePoint {
    pub q: usize,
    pub p: usize,
}

impl DiscretePhasePoint {
    pub fn new(q: usize, p: usize, d: usize) -> Result<Self> {
        if q >= d || p >= d {
            return Err(Error::OutOfRange { index: q.max(p), dim: d });
        }
        Ok(Self { q, p })
    }

    /// Row-major index `q·d + p`.
    pub fn index(&self, d: usize) -> usize {
        self.q * d + self.p
    }
}

/// `W(q, p)` stored at `values[q·d + p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteWignerDistribution {
    d: usize,
    values: Vec<f64>,
}

impl DiscreteWignerDistribution {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, u: DiscretePhasePoint) -> f64 {
        self.values[u.index(self.d)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Uniform distribution `1/d²`.
    pub fn uniform(d: usize) -> Result<Self> {
        check_dimension(d)?;
        Ok(Self { d, values: vec![1.0 / (d * d) as f64; d * d] })
    }

    /// Writes `q,p,W` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "q,p,W")?;
        for q in 0..self.d {
            for p in 0..self.d {
                writeln!(out, "{q},{p},{}", crate::format_float(self.values[q * self.d + p]))?;
            }
        }
        Ok(())
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if SUPPORTED_DIMENSIONS.contains(&d) {
        Ok(())
    } else {
        Err(Error::Argument(format!("discrete Wigner dimension must be one of {SUPPORTED_DIMENSIONS:?}, got {d}")))
    }
}

fn omega_power(k: usize, d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

/// The `d²` operators `A_u`, indexed by `q·d + p`.
pub fn phase_point_operators(d: usize) -> Result<Vec<DMatrix<C64>>> {
    check_dimension(d)?;
    let half = (d + 1) / 2; // inverse of 2 mod d
    let mut parity = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        parity[((d - j) % d, j)] = C64::new(1.0, 0.0);
    }
    let mut ops = Vec::with_capacity(d * d);
    for q in 0..d {
        for p in 0..d {
            // T|j⟩ = ω^{−2⁻¹qp} ω^{pj} |j + q⟩
            let phase = (d * d - (half * q * p) % d) % d;
            let mut t = DMatrix::<C64>::zeros(d, d);
            for j in 0..d {
                t[((j + q) % d, j)] = omega_power(phase + p * j, d);
            }
            ops.push(&t * &parity * t.adjoint());
        }
    }
    Ok(ops)
}

/// `W(u) = Tr[A_u ρ] / d`.
pub fn discrete_wigner(rho: &DensityOperator, d: usize) -> Result<DiscreteWignerDistribution> {
    if rho.dim() != d || rho.dims().len() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "density operator with dims {:?} for discrete dimension {d}",
            rho.dims()
        )));
    }
    let ops = phase_point_operators(d)?;
    let values = ops.iter().map(|a| (a * rho.matrix()).trace().re / d as f64).collect();
    Ok(DiscreteWignerDistribution { d, values })
}

/// `½(Σ|W(u)| − 1)`.
pub fn discrete_sum_negativity(w: &DiscreteWignerDistribution) -> f64 {
    let abs: f64 = w.values.iter().map(|v| v.abs()).sum();
    0.5 * (abs - 1.0)
}

/// `Σ_u W(u) A_u`.
pub fn reconstruct(w: &DiscreteWignerDistribution) -> Result<DMatrix<C64>> {
    let ops = phase_point_operators(w.d)?;
    let mut rho = DMatrix::<C64>::zeros(w.d, w.d);
    for (a, v) in ops.iter().zip(&w.values) {
        rho += a * C64::from(*v);
    }
    Ok(rho)
}

/// The twelve pure qutrit stabilizer states: the computational basis and
/// `(1/√3) Σ_q ω^{aq² + bq}|q⟩` for `a, b ∈ {0, 1, 2}`.
pub fn qutrit_stabilizer_states() -> Vec<(String, StateVector)> {
    let mut out = Vec::with_capacity(12);
    for k in 0..3 {
        let mut amps = vec![C64::new(0.0, 0.0); 3];
        amps[k] = C64::new(1.0, 0.0);
        out.push((format!("z{k}"), StateVector::new(amps, vec![3]).expect("unit vector")));
    }
    let s = 1.0 / 3f64.sqrt();
    for a in 0..3 {
        for b in 0..3 {
            let amps = (0..3).map(|q| omega_power(a * q * q + b * q, 3) * s).collect();
            out.push((format!("a{a}b{b}"), StateVector::new(amps, vec![3]).expect("normalized")));
        }
    }
    out
}

/// `(|1⟩ − |2⟩)/√2`, the parity eigenvector with eigenvalue −1.
pub fn qutrit_strange_state() -> StateVector {
    let s = 0.5f64.sqrt();
    StateVector::new(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)], vec![3]).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_density(rng: &mut StdRng, d: usize) -> DensityOperator {
        let g = DMatrix::<C64>::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let m = &g * g.adjoint();
        let tr = m.trace();
        DensityOperator::new(m / tr, vec![d]).unwrap()
    }

    #[test]
    fn operator_frame_properties() {
        for d in SUPPORTED_DIMENSIONS {
            let ops = phase_point_operators(d).unwrap();
            assert_eq!(ops.len(), d * d);
            let mut total = DMatrix::<C64>::zeros(d, d);
            for (i, a) in ops.iter().enumerate() {
                assert!((a - a.adjoint()).norm() < 1e-12);
                assert!((a.trace() - C64::from(1.0)).norm() < 1e-12);
                for (j, b) in ops.iter().enumerate() {
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!(((a * b).trace() - C64::from(expect)).norm() < 1e-12);
                }
                total += a;
            }
            assert!((total - DMatrix::<C64>::identity(d, d) * C64::from(d as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn parity_for_qutrit() {
        let a0 = &phase_point_operators(3).unwrap()[0];
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]).map(C64::from);
        assert_eq!(a0, &expect);
    }

    #[test]
    fn rejected_dimensions() {
        for d in [0, 1, 2, 4, 9, 11] {
            assert!(phase_point_operators(d).is_err());
        }
        let rho = DensityOperator::maximally_mixed(vec![3]).unwrap();
        assert!(discrete_wigner(&rho, 5).is_err());
    }

    #[test]
    fn mixed_and_basis_states() {
        let w = discrete_wigner(&DensityOperator::maximally_mixed(vec![3]).unwrap(), 3).unwrap();
        assert!(w.values().iter().all(|v| (v - 1.0 / 9.0).abs() < 1e-15));
        assert!(discrete_sum_negativity(&w).abs() < 1e-15);
        assert!(discrete_sum_negativity(&DiscreteWignerDistribution::uniform(5).unwrap()).abs() < 1e-15);
        let one = crate::fock::fock_state(1, 3).unwrap().density();
        let w = discrete_wigner(&one, 3).unwrap();
        assert!(w.min_value() >= 0.0);
        assert_eq!(discrete_sum_negativity(&w), 0.0);
    }

    #[test]
    fn stabilizers_are_nonnegative() {
        let states = qutrit_stabilizer_states();
        assert_eq!(states.len(), 12);
        for (label, s) in &states {
            let w = discrete_wigner(&s.density(), 3).unwrap();
            assert!(w.min_value() >= -1e-12, "{label}");
            assert!(discrete_sum_negativity(&w).abs() < 1e-12, "{label}");
            assert!((w.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn strange_state_is_negative() {
        let strange = qutrit_strange_state();
        let a0 = &phase_point_operators(3).unwrap()[0];
        let image = a0 * DMatrix::from_column_slice(3, 1, strange.amplitudes());
        assert!((image + DMatrix::from_column_slice(3, 1, strange.amplitudes())).norm() < 1e-15);
        let w = discrete_wigner(&strange.density(), 3).unwrap();
        assert!((w.min_value() + 1.0 / 3.0).abs() < 1e-12);
        assert!(discrete_sum_negativity(&w) > 0.0);
    }

    #[test]
    fn reconstruction_on_random_states() {
        let mut rng = StdRng::seed_from_u64(7);
        for d in SUPPORTED_DIMENSIONS {
            for _ in 0..20 {
                let rho = random_density(&mut rng, d);
                let back = reconstruct(&discrete_wigner(&rho, d).unwrap()).unwrap();
                assert!((back - rho.matrix()).camax() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn sum_negativity_is_convex(seed in any::<u64>(), lam in 0.0f64..=1.0) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_density(&mut rng, 3);
            let b = if rng.gen_bool(0.5) { qutrit_strange_state().density() } else { random_density(&mut rng, 3) };
            let mix = a.mix(lam, &b).unwrap();
            let n = |r: &DensityOperator| discrete_sum_negativity(&discrete_wigner(r, 3).unwrap());
            prop_assert!(n(&mix) <= lam * n(&a) + (1.0 - lam) * n(&b) + 1e-12);
        }
    }
}
