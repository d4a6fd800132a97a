//! Bohr–Sommerfeld fibres of the degree-`n` brane and the resulting Hom spaces.
//!
//! A fibre `ξ ∈ (1/2πi)Λ* ∩ (−inΔ)` is stored by its lattice representative
//! `m ∈ nΔ ∩ ℤ^d` (so `λ = 2πm`). Each fibre carries a one-dimensional space of
//! flat sections, which we identify with the ring basis label `e_{n,m}`.

use serde::Serialize;

use crate::ncring::WeightedSection;
use crate::polytope::{DelzantPolytope, LatticePoint, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BSFibre {
    pub degree: u32,
    pub weight: LatticePoint,
}

impl BSFibre {
    /// Flat-section label of this fibre in the ring basis.
    pub fn section(&self, polytope: &DelzantPolytope) -> Result<WeightedSection, crate::ncring::NcRingError> {
        WeightedSection::new(polytope, self.degree, self.weight.clone())
    }
}

/// Torus character of `H⁰(M, L^n)`: weights with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Character {
    pub degree: u32,
    pub weights: Vec<(LatticePoint, usize)>,
}

impl Character {
    pub fn dimension(&self) -> usize {
        self.weights.iter().map(|(_, k)| k).sum()
    }

    pub fn multiplicity(&self, m: &LatticePoint) -> usize {
        self.weights.iter().find(|(w, _)| w == m).map_or(0, |(_, k)| *k)
    }
}

pub fn bs_fibres(polytope: &DelzantPolytope, n: u32) -> Result<Vec<BSFibre>, PolytopeError> {
    Ok(polytope
        .lattice_points(n)?
        .into_iter()
        .map(|weight| BSFibre { degree: n, weight })
        .collect())
}

/// `dim Hom(L_n, B_n)`; one flat section per fibre.
pub fn hom_dimension(polytope: &DelzantPolytope, n: u32) -> Result<usize, PolytopeError> {
    Ok(bs_fibres(polytope, n)?.len())
}

pub fn character(polytope: &DelzantPolytope, n: u32) -> Result<Character, PolytopeError> {
    Ok(Character {
        degree: n,
        weights: polytope.lattice_points(n)?.into_iter().map(|m| (m, 1)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncring::hilbert_function;
    use crate::polytope::standard;

    fn lp(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec())
    }

    #[test]
    fn fibre_examples() {
        let cp2 = standard("cp2", &[]).unwrap();
        assert_eq!(bs_fibres(&cp2, 1).unwrap().len(), 3);
        assert_eq!(bs_fibres(&standard("hirzebruch", &[1]).unwrap(), 1).unwrap().len(), 5);
        for name in ["cp1", "cp2", "cp1xcp1"] {
            let p = standard(name, &[]).unwrap();
            let f = bs_fibres(&p, 0).unwrap();
            assert_eq!(f.len(), 1);
            assert_eq!(f[0].weight, LatticePoint::origin(p.dim()));
            assert_eq!(hom_dimension(&p, 0).unwrap(), 1);
        }
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(hom_dimension(&standard("cp2", &[]).unwrap(), 3).unwrap(), 10);
        assert_eq!(hom_dimension(&standard("cp1", &[]).unwrap(), 7).unwrap(), 8);
    }

    #[test]
    fn character_examples() {
        let ch = character(&standard("cp1", &[]).unwrap(), 2).unwrap();
        let w: Vec<_> = ch.weights.iter().map(|(m, _)| m.clone()).collect();
        assert_eq!(w, vec![lp(&[0]), lp(&[1]), lp(&[2])]);
        let ch = character(&standard("cp2", &[]).unwrap(), 1).unwrap();
        for m in [[0, 0], [1, 0], [0, 1]] {
            assert_eq!(ch.multiplicity(&lp(&m)), 1);
        }
        assert_eq!(ch.dimension(), 3);
        assert_eq!(ch.multiplicity(&lp(&[1, 1])), 0);
    }

    #[test]
    fn matches_hilbert_function() {
        for name in ["cp1", "cp2", "cp1xcp1", "hirzebruch(1)", "hirzebruch(2)"] {
            let p = name.parse::<crate::polytope::Standard>().unwrap().polytope().unwrap();
            let h = hilbert_function(&p, 12).unwrap();
            for n in 0..=12u32 {
                assert_eq!(hom_dimension(&p, n).unwrap(), h[n as usize], "{name} n={n}");
                assert_eq!(character(&p, n).unwrap().dimension(), h[n as usize]);
            }
        }
    }

    #[test]
    fn fibre_weights_close_under_addition() {
        let p = standard("hirzebruch", &[1]).unwrap();
        for a in bs_fibres(&p, 1).unwrap() {
            for b in bs_fibres(&p, 2).unwrap() {
                let m = a.weight.add(&b.weight);
                assert!(p.contains_lattice(3, &m).unwrap());
                assert!(a.section(&p).is_ok());
            }
        }
    }
}
