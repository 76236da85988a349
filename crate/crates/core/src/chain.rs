//! The spin chain model and its quadratic Majorana form.
//!
//! The Hamiltonian is
//! `H = -Σ_n (σˣ_n σˣ_{n+1} + σᶻ_n) + δ σᶻ_α` on an open chain, with any
//! subset of the `σˣσˣ` bonds removed. After a Jordan-Wigner transform with
//! Majoranas `a_{2n-1} = (Π_{k<n} σᶻ_k) σˣ_n` and `a_{2n} = (Π_{k<n} σᶻ_k) σʸ_n`
//! (so `a_j² = 1`) the chain reads `H = (i/4) Σ_jk A_jk a_j a_k` with `A` real
//! antisymmetric:
//!
//! * `A_{2n-1,2n} = 2 h_n`, where `h_n = 1` except `h_α = 1 - δ`,
//! * `A_{2n,2n+1} = 2` for every bond `n ↔ n+1` that is present.
//!
//! With unit-normalised Majoranas `γ = a/√2` the same operator is
//! `H = Σ_ij C_ij γ_i γ_j` where `C = iA/2`.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Physical parameters of the chain. Site and bond indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    impurity_strength: f64,
    impurity_site: usize,
    cut_bonds: BTreeSet<usize>,
}

impl ChainSpec {
    pub fn new(
        n_sites: usize,
        impurity_strength: f64,
        impurity_site: usize,
        cut_bonds: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let spec = Self {
            n_sites,
            impurity_strength,
            impurity_site,
            cut_bonds: cut_bonds.into_iter().collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Critical chain with no impurity and no cuts.
    pub fn uniform(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 0.0, 1, [])
    }

    fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(invalid(format!("n_sites must be at least 2, got {}", self.n_sites)));
        }
        if !(self.impurity_strength.is_finite() && self.impurity_strength >= 0.0) {
            return Err(invalid(format!(
                "impurity_strength must be finite and non-negative, got {}",
                self.impurity_strength
            )));
        }
        if self.impurity_site < 1 || self.impurity_site > self.n_sites {
            return Err(invalid(format!(
                "impurity_site {} outside [1, {}]",
                self.impurity_site, self.n_sites
            )));
        }
        if let Some(&b) = self.cut_bonds.iter().find(|&&b| b < 1 || b >= self.n_sites) {
            return Err(invalid(format!("cut bond {b} outside [1, {}]", self.n_sites - 1)));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn impurity_strength(&self) -> f64 {
        self.impurity_strength
    }

    pub fn impurity_site(&self) -> usize {
        self.impurity_site
    }

    pub fn cut_bonds(&self) -> &BTreeSet<usize> {
        &self.cut_bonds
    }

    pub fn is_cut(&self, bond: usize) -> bool {
        self.cut_bonds.contains(&bond)
    }

    /// Transverse field on 1-based `site`, including the impurity shift.
    pub fn field(&self, site: usize) -> f64 {
        if site == self.impurity_site {
            1.0 - self.impurity_strength
        } else {
            1.0
        }
    }

    /// Same chain with `δ = 0`.
    pub fn without_impurity(&self) -> Self {
        Self {
            impurity_strength: 0.0,
            ..self.clone()
        }
    }

    /// Same chain with an impurity of strength `delta` at `site`.
    pub fn with_impurity(&self, delta: f64, site: usize) -> Result<Self> {
        Self::new(self.n_sites, delta, site, self.cut_bonds.iter().copied())
    }

    /// Removes the `σˣ_b σˣ_{b+1}` coupling. Cutting twice is a no-op.
    pub fn cut_bond(&self, bond: usize) -> Result<Self> {
        if bond < 1 || bond >= self.n_sites {
            return Err(invalid(format!("bond {bond} outside [1, {}]", self.n_sites - 1)));
        }
        let mut out = self.clone();
        out.cut_bonds.insert(bond);
        Ok(out)
    }

    /// Puts a previously cut bond back.
    pub fn restore_bond(&self, bond: usize) -> Self {
        let mut out = self.clone();
        out.cut_bonds.remove(&bond);
        out
    }

    /// The chain on sites `1..=n_prime` alone: the bond to site `n_prime + 1`
    /// is gone, internal cuts survive, and the impurity is kept only when it
    /// lies inside the block.
    pub fn subsystem(&self, n_prime: usize) -> Result<Self> {
        if n_prime < 1 || n_prime > self.n_sites {
            return Err(invalid(format!(
                "subsystem size {n_prime} outside [1, {}]",
                self.n_sites
            )));
        }
        let (delta, site) = if self.impurity_site <= n_prime {
            (self.impurity_strength, self.impurity_site)
        } else {
            (0.0, 1)
        };
        Ok(Self {
            n_sites: n_prime,
            impurity_strength: delta,
            impurity_site: site,
            cut_bonds: self.cut_bonds.iter().copied().filter(|&b| b < n_prime).collect(),
        })
    }

    /// Builds the Majorana coupling matrix of this chain.
    pub fn coupling(&self) -> CouplingMatrix {
        let n = self.n_sites;
        let mut a = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for site in 1..=n {
            let (i, j) = (2 * site - 2, 2 * site - 1);
            let h = 2.0 * self.field(site);
            a[(i, j)] = h;
            a[(j, i)] = -h;
        }
        for bond in 1..n {
            if self.is_cut(bond) {
                continue;
            }
            let (i, j) = (2 * bond - 1, 2 * bond);
            a[(i, j)] = 2.0;
            a[(j, i)] = -2.0;
        }
        CouplingMatrix { generator: a }
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cuts: Vec<String> = self.cut_bonds.iter().map(|b| b.to_string()).collect();
        writeln!(f, "n_sites = {}", self.n_sites)?;
        writeln!(f, "impurity_strength = {}", self.impurity_strength)?;
        writeln!(f, "impurity_site = {}", self.impurity_site)?;
        writeln!(f, "cut_bonds = {}", cuts.join(","))
    }
}

/// Quadratic form `C` of the chain in the Majorana basis.
///
/// Stored as the real antisymmetric generator `A = -2iC`, which is also the
/// matrix in the Heisenberg equation `da/dt = A a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    generator: DMatrix<f64>,
}

impl CouplingMatrix {
    /// Wraps a real antisymmetric generator `A`.
    pub fn from_generator(generator: DMatrix<f64>) -> Result<Self> {
        let dim = generator.nrows();
        if dim != generator.ncols() || !dim.is_multiple_of(2) || dim == 0 {
            return Err(invalid(format!(
                "generator must be square with even dimension, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        let scale = generator.amax().max(1.0);
        for i in 0..dim {
            for j in 0..=i {
                let s = generator[(i, j)] + generator[(j, i)];
                if !generator[(i, j)].is_finite() || s.abs() > 1e-12 * scale {
                    return Err(invalid(format!("generator not antisymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { generator })
    }

    /// Accepts `C` itself; it must be Hermitian with purely imaginary entries.
    pub fn from_complex(c: &DMatrix<Complex64>) -> Result<Self> {
        let dim = c.nrows();
        if dim != c.ncols() {
            return Err(invalid("coupling matrix must be square"));
        }
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for z in c.iter() {
            if z.re.abs() > 1e-12 * scale {
                return Err(invalid("coupling matrix has a real part"));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if (c[(i, j)] - c[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(invalid(format!("coupling matrix not Hermitian at ({i}, {j})")));
                }
            }
        }
        // C = iA/2  =>  A = -2i C, real part of that is 2 Im C.
        let generator = c.map(|z| 2.0 * z.im);
        Self::from_generator(generator)
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    /// Real antisymmetric generator `A`.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// `C_ij = (i/2) A_ij`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(0.0, 0.5 * self.generator[(i, j)])
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.generator.map(|x| Complex64::new(0.0, 0.5 * x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn rejects_invalid_specs() {
        assert!(matches!(ChainSpec::new(1, 0.0, 1, []), Err(Error::Validation(_))));
        assert!(ChainSpec::new(4, -0.5, 1, []).is_err());
        assert!(ChainSpec::new(4, 1.0, 0, []).is_err());
        assert!(ChainSpec::new(4, 1.0, 5, []).is_err());
        assert!(ChainSpec::new(4, 1.0, 2, [4]).is_err());
        assert!(ChainSpec::new(4, 1.0, 2, [0]).is_err());
        assert!(ChainSpec::new(4, f64::NAN, 2, []).is_err());
        assert!(ChainSpec::new(4, 1.0, 4, [1, 3]).is_ok());
    }

    #[test]
    fn coupling_is_imaginary_antisymmetric() {
        let spec = ChainSpec::new(7, 1.3, 4, [2, 5]).unwrap();
        let c = spec.coupling().to_complex();
        for i in 0..14 {
            for j in 0..14 {
                assert_eq!(c[(i, j)], -c[(j, i)]);
                assert_eq!(c[(i, j)].conj(), -c[(i, j)]);
            }
        }
    }

    #[test]
    fn sparsity_pattern() {
        let spec = ChainSpec::new(5, 0.4, 3, [2]).unwrap();
        let a = spec.coupling();
        let g = a.generator();
        for i in 0..10 {
            for j in 0..10 {
                let allowed = (i as isize - j as isize).abs() == 1;
                if !allowed {
                    assert_eq!(g[(i, j)], 0.0);
                }
            }
        }
        // on-site field with impurity at site 3 (indices 4, 5)
        assert_eq!(g[(4, 5)], 2.0 * 0.6);
        assert_eq!(g[(0, 1)], 2.0);
        // bond 2 joins Majoranas 4 and 5 (1-based), i.e. indices 3 and 4
        assert_eq!(g[(3, 4)], 0.0);
        assert_eq!(g[(1, 2)], 2.0);
    }

    #[test]
    fn zero_impurity_restores_uniform_field() {
        let with = ChainSpec::new(6, 0.8, 2, []).unwrap().coupling();
        let without = ChainSpec::new(6, 0.0, 2, []).unwrap().coupling();
        let mut restored = with.generator().clone();
        restored[(2, 3)] = 2.0;
        restored[(3, 2)] = -2.0;
        assert_eq!(&restored, without.generator());
        assert_eq!(&without, &ChainSpec::uniform(6).unwrap().coupling());
    }

    #[test]
    fn cut_bond_behaviour() {
        let spec = ChainSpec::uniform(10).unwrap();
        let cut = spec.cut_bond(5).unwrap();
        assert_eq!(cut.cut_bonds().iter().copied().collect::<Vec<_>>(), vec![5]);
        assert_eq!(cut.cut_bond(5).unwrap(), cut);
        assert!(spec.cut_bond(0).is_err());
        assert!(spec.cut_bond(10).is_err());

        let full = spec.coupling();
        let g = cut.coupling();
        for i in 0..20 {
            for j in 0..20 {
                if (i, j) == (9, 10) || (i, j) == (10, 9) {
                    assert_eq!(g.generator()[(i, j)], 0.0);
                } else {
                    assert_eq!(g.generator()[(i, j)], full.generator()[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn two_site_cut_is_block_diagonal() {
        let g = ChainSpec::uniform(2).unwrap().cut_bond(1).unwrap().coupling();
        let g = g.generator();
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(g[(i, j)], 0.0);
                assert_eq!(g[(j, i)], 0.0);
            }
        }
    }

    #[test]
    fn subsystem_restriction() {
        let spec = ChainSpec::new(50, 1.0, 25, []).unwrap();
        assert_eq!(spec.subsystem(25).unwrap(), ChainSpec::new(25, 1.0, 25, []).unwrap());

        let outside = ChainSpec::new(50, 1.0, 40, []).unwrap().subsystem(25).unwrap();
        assert_eq!(outside.n_sites(), 25);
        assert_eq!(outside.impurity_strength(), 0.0);

        let cut = ChainSpec::uniform(10)
            .unwrap()
            .cut_bond(5)
            .unwrap()
            .subsystem(5)
            .unwrap();
        assert_eq!(cut.n_sites(), 5);
        assert!(cut.cut_bonds().is_empty());

        assert!(spec.subsystem(0).is_err());
        assert!(spec.subsystem(51).is_err());
    }

    #[test]
    fn complex_round_trip_and_validation() {
        let c = ChainSpec::new(3, 0.5, 2, [1]).unwrap().coupling();
        let back = CouplingMatrix::from_complex(&c.to_complex()).unwrap();
        assert_eq!(back, c);

        let mut bad = c.to_complex();
        bad[(0, 1)] += Complex64::new(0.3, 0.0);
        assert!(CouplingMatrix::from_complex(&bad).is_err());

        let mut non_herm = c.to_complex();
        non_herm[(0, 2)] = Complex64::new(0.0, 1.0);
        assert!(CouplingMatrix::from_complex(&non_herm).is_err());
    }
}
