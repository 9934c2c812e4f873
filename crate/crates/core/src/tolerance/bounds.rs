use num_bigint::BigInt;

use super::Engine;
use crate::csp::CspInstance;
use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::value::{ExtendedValue, Rational};

/// Bounds on the set tolerances of `E` that avoid solving for `E` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub set: Subset,
    /// Lower bound on the set lower tolerance.
    pub max_single_lower: ExtendedValue,
    pub sum_single_lower: ExtendedValue,
    /// `f_c(D+(E)) - c*`.
    pub min_cost: ExtendedValue,
    /// The requested partition and the sum of its parts' lower tolerances.
    pub partition: Option<(Vec<Subset>, ExtendedValue)>,
    /// `(s, bound)` for each requested subset size `s`.
    pub binomial: Vec<(usize, ExtendedValue)>,
    /// Lower bound on the set upper tolerance.
    pub max_single_upper: ExtendedValue,
}

impl BoundsReport {
    /// Smallest of the upper bounds on the set lower tolerance.
    pub fn best_lower_cap(&self) -> ExtendedValue {
        let mut best = self.sum_single_lower.clone().min(self.min_cost.clone());
        if let Some((_, v)) = &self.partition {
            best = best.min(v.clone());
        }
        for (_, v) in &self.binomial {
            best = best.min(v.clone());
        }
        best
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

fn check_partition(set: Subset, parts: &[Subset]) -> Result<()> {
    if parts.len() < 2 {
        return Err(Error::invalid("a partition bound needs at least two parts"));
    }
    let mut covered = Subset::EMPTY;
    for &p in parts {
        if p.is_empty() {
            return Err(Error::invalid("partition parts must be nonempty"));
        }
        if p.intersects(covered) {
            return Err(Error::invalid("partition parts must be disjoint"));
        }
        covered = covered.union(p);
    }
    if covered != set {
        return Err(Error::invalid("partition parts must cover the set exactly"));
    }
    Ok(())
}

impl Engine<'_> {
    /// Computes every bound; `sizes` selects the binomial bounds, all valid
    /// sizes when empty.
    pub fn bounds_report(
        &mut self,
        set: Subset,
        partition: Option<&[Subset]>,
        sizes: &[usize],
    ) -> Result<BoundsReport> {
        if set.is_empty() {
            return Err(Error::invalid("tolerances are undefined for the empty set"));
        }
        crate::csp::check_subset(self.instance(), set)?;
        let k = set.len();
        if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s >= k) {
            return Err(Error::invalid(format!(
                "binomial bound size {bad} is outside 1..={}",
                k.saturating_sub(1)
            )));
        }
        if let Some(parts) = partition {
            check_partition(set, parts)?;
        }

        let mut lowers = Vec::with_capacity(k);
        let mut uppers = Vec::with_capacity(k);
        for e in set.iter() {
            lowers.push(self.lower_value(Subset::singleton(e))?);
            uppers.push(self.single_upper_value(Subset::singleton(e))?);
        }
        let max_single_lower = lowers.iter().max().cloned().expect("nonempty set");
        let sum_single_lower = lowers.into_iter().sum();
        let max_single_upper = uppers.into_iter().max().expect("nonempty set");
        let min_cost = self.include_excess(set)?;

        let partition = match partition {
            Some(parts) => {
                let mut total = ExtendedValue::zero();
                for &p in parts {
                    total = total + self.lower_value(p)?;
                }
                Some((parts.to_vec(), total))
            }
            None => None,
        };

        let sizes: Vec<usize> = if sizes.is_empty() {
            (1..k).collect()
        } else {
            sizes.to_vec()
        };
        let mut binomials = Vec::with_capacity(sizes.len());
        for s in sizes {
            let mut total = ExtendedValue::zero();
            for f in set.subsets_of_size(s) {
                total = total + self.lower_value(f)?;
            }
            let factor = Rational::new(BigInt::from(1), binomial(k - 1, s - 1));
            binomials.push((s, total.scale(&factor)?));
        }

        Ok(BoundsReport {
            set,
            max_single_lower,
            sum_single_lower,
            min_cost,
            partition,
            binomial: binomials,
            max_single_upper,
        })
    }
}

pub fn bounds_report(
    inst: &dyn CspInstance,
    set: Subset,
    partition: Option<&[Subset]>,
    sizes: &[usize],
) -> Result<BoundsReport> {
    Engine::new(inst).bounds_report(set, partition, sizes)
}
