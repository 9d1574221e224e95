//! Quantum-number sectors of the Bethe reduction.
//!
//! For integer `J` the `2J + 1` eigenstates split into the sectors
//! `(k, n1, n2, nu)` with `J = 2k + n1 + n2 + nu` and `n1, n2, nu` in `{0, 1}`.
//! A sector with `k` boson quartets carries `k + 1` solutions.

use std::fmt;

use crate::error::Result;
use crate::spin::Spin;

/// One Bethe sector `{k; n1, n2, nu}` at total angular momentum `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorLabel {
    j: u32,
    k: u32,
    n1: u8,
    n2: u8,
    nu: u8,
}

impl SectorLabel {
    /// Builds the sector with the given pair/seniority quantum numbers, or
    /// `None` when they are not bits or `J - n1 - n2 - nu` is not a
    /// non-negative even number.
    pub fn new(j: u32, n1: u8, n2: u8, nu: u8) -> Option<Self> {
        if n1 > 1 || n2 > 1 || nu > 1 {
            return None;
        }
        let rest = j.checked_sub(u32::from(n1 + n2 + nu))?;
        if rest % 2 != 0 {
            return None;
        }
        Some(SectorLabel {
            j,
            k: rest / 2,
            n1,
            n2,
            nu,
        })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Number of boson quartets, also the degree of the polynomial.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n1(&self) -> u8 {
        self.n1
    }

    pub fn n2(&self) -> u8 {
        self.n2
    }

    pub fn nu(&self) -> u8 {
        self.nu
    }

    /// `1 + 2 delta(nu, 1)`: 1 without an unpaired boson pair, 3 with one.
    pub fn seniority_factor(&self) -> f64 {
        if self.nu == 1 {
            3.0
        } else {
            1.0
        }
    }

    /// The fixed charge `(1 + 2 delta(nu, 1)) / 2` sitting at `u = 0`.
    pub fn origin_weight(&self) -> f64 {
        0.5 * self.seniority_factor()
    }

    pub fn pair_imbalance(&self) -> f64 {
        f64::from(self.n1) - f64::from(self.n2)
    }

    /// Number of solutions in this sector.
    pub fn solution_count(&self) -> usize {
        self.k as usize + 1
    }

    pub fn bits(&self) -> (u8, u8, u8) {
        (self.n1, self.n2, self.nu)
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}; {},{},{}}}", self.k, self.n1, self.n2, self.nu)
    }
}

/// All sectors of one integer `J` with their solution counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorCatalog {
    j: u32,
    sectors: Vec<(SectorLabel, usize)>,
}

impl SectorCatalog {
    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn sectors(&self) -> &[(SectorLabel, usize)] {
        &self.sectors
    }

    pub fn labels(&self) -> impl Iterator<Item = SectorLabel> + '_ {
        self.sectors.iter().map(|(s, _)| *s)
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
}

/// Enumerates the sectors of integer `J` in canonical order: descending `k`,
/// then lexicographic `(n1, n2, nu)`. Sectors that would need `k < 0` are absent.
pub fn enumerate_sectors(j: impl Into<Spin>) -> Result<SectorCatalog> {
    let j = j.into().as_integer()?;
    let mut sectors: Vec<(SectorLabel, usize)> = (0u8..8)
        .filter_map(|bits| SectorLabel::new(j, (bits >> 2) & 1, (bits >> 1) & 1, bits & 1))
        .map(|s| (s, s.solution_count()))
        .collect();
    sectors.sort_by(|(a, _), (b, _)| b.k.cmp(&a.k).then(a.bits().cmp(&b.bits())));
    Ok(SectorCatalog { j, sectors })
}

/// Total number of Bethe solutions at `J`, summed over the catalog.
pub fn solution_count_total(j: impl Into<Spin>) -> Result<usize> {
    Ok(enumerate_sectors(j)?.sectors.iter().map(|(_, n)| n).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn tuples(c: &SectorCatalog) -> Vec<(u32, (u8, u8, u8), usize)> {
        c.sectors().iter().map(|(s, n)| (s.k(), s.bits(), *n)).collect()
    }

    #[test]
    fn j0_has_a_single_trivial_sector() {
        let c = enumerate_sectors(0).unwrap();
        assert_eq!(tuples(&c), vec![(0, (0, 0, 0), 1)]);
    }

    #[test]
    fn j2_sectors() {
        let c = enumerate_sectors(2).unwrap();
        assert_eq!(
            tuples(&c),
            vec![
                (1, (0, 0, 0), 2),
                (0, (0, 1, 1), 1),
                (0, (1, 0, 1), 1),
                (0, (1, 1, 0), 1)
            ]
        );
    }

    #[test]
    fn j5_sectors() {
        let c = enumerate_sectors(5).unwrap();
        assert_eq!(
            tuples(&c),
            vec![
                (2, (0, 0, 1), 3),
                (2, (0, 1, 0), 3),
                (2, (1, 0, 0), 3),
                (1, (1, 1, 1), 2)
            ]
        );
    }

    #[test]
    fn totals() {
        assert_eq!(solution_count_total(4).unwrap(), 9);
        assert_eq!(solution_count_total(12).unwrap(), 25);
        assert_eq!(solution_count_total(1000).unwrap(), 2001);
    }

    #[test]
    fn half_integer_is_rejected() {
        assert!(enumerate_sectors(Spin::from_twice(5)).is_err());
    }

    #[test]
    fn sector_counts_below_three() {
        assert_eq!(enumerate_sectors(1).unwrap().len(), 3);
        assert_eq!(enumerate_sectors(2).unwrap().len(), 4);
        assert_eq!(enumerate_sectors(3).unwrap().len(), 4);
    }

    #[test]
    fn label_rejects_inconsistent_bits() {
        assert!(SectorLabel::new(3, 0, 0, 0).is_none());
        assert!(SectorLabel::new(0, 1, 0, 0).is_none());
        assert!(SectorLabel::new(4, 2, 0, 0).is_none());
        assert_eq!(SectorLabel::new(4, 1, 1, 0).unwrap().k(), 1);
    }

    #[test]
    fn even_and_odd_case_structure() {
        for j in 3..40u32 {
            let c = enumerate_sectors(j).unwrap();
            let got: BTreeSet<_> = tuples(&c).into_iter().map(|(_, b, n)| (b, n)).collect();
            let k = j / 2;
            let want: BTreeSet<_> = if j % 2 == 0 {
                [
                    ((0, 0, 0), k as usize + 1),
                    ((1, 1, 0), k as usize),
                    ((1, 0, 1), k as usize),
                    ((0, 1, 1), k as usize),
                ]
                .into()
            } else {
                [
                    ((1, 0, 0), k as usize + 1),
                    ((0, 1, 0), k as usize + 1),
                    ((0, 0, 1), k as usize + 1),
                    ((1, 1, 1), k as usize),
                ]
                .into()
            };
            assert_eq!(got, want, "J = {j}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn counts_sum_to_dimension(j in 0u32..=1000) {
                prop_assert_eq!(solution_count_total(j).unwrap(), 2 * j as usize + 1);
            }

            #[test]
            fn labels_satisfy_the_constraint(j in 0u32..=1000) {
                for s in enumerate_sectors(j).unwrap().labels() {
                    prop_assert_eq!(2 * s.k() + u32::from(s.n1() + s.n2() + s.nu()), j);
                }
            }
        }
    }
}
