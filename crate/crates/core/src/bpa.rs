use std::collections::BTreeMap;

use crate::error::EvidenceError;
use crate::frame::Frame;
use crate::set::FocalSet;
use crate::{MASS_EPSILON, PRUNE_EPSILON};

/// A basic probability assignment: positive masses on nonempty subsets of a
/// frame, summing to 1 within [`MASS_EPSILON`].
///
/// Entries are kept in ascending bit-pattern order, so iteration and every
/// serialized form are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Bpa {
    frame: Frame,
    entries: BTreeMap<FocalSet, f64>,
}

/// Result of combining two bpas: the normalized bpa plus the conflict mass
/// (total product mass that fell on the empty set before normalization).
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub bpa: Bpa,
    pub conflict: f64,
}

impl Bpa {
    /// Validates and builds a bpa. Duplicate sets have their masses
    /// accumulated; entries below [`PRUNE_EPSILON`] are then pruned.
    pub fn new<I>(frame: Frame, assignments: I) -> Result<Bpa, EvidenceError>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let mut entries: BTreeMap<FocalSet, f64> = BTreeMap::new();
        for (set, mass) in assignments {
            if !mass.is_finite() || mass < 0.0 {
                return Err(EvidenceError::InvalidMass(mass));
            }
            if set.is_empty() {
                if mass > 0.0 {
                    return Err(EvidenceError::EmptyFocalSet);
                }
                continue;
            }
            if !frame.contains_set(set) {
                return Err(EvidenceError::OutOfFrame);
            }
            *entries.entry(set).or_insert(0.0) += mass;
        }
        entries.retain(|_, mass| *mass >= PRUNE_EPSILON);
        let sum: f64 = entries.values().sum();
        if (sum - 1.0).abs() > MASS_EPSILON {
            return Err(EvidenceError::MassNotNormalized { sum });
        }
        Ok(Bpa { frame, entries })
    }

    /// Convenience constructor resolving element labels through the frame.
    pub fn from_labels<'a, I, S>(frame: Frame, assignments: I) -> Result<Bpa, EvidenceError>
    where
        I: IntoIterator<Item = (&'a [S], f64)>,
        S: AsRef<str> + 'a,
    {
        let mut resolved = Vec::new();
        for (labels, mass) in assignments {
            resolved.push((frame.set_of(labels.iter())?, mass));
        }
        Bpa::new(frame, resolved)
    }

    /// The vacuous bpa m(Θ) = 1: total ignorance, identity of combination.
    pub fn vacuous(frame: Frame) -> Bpa {
        let mut entries = BTreeMap::new();
        entries.insert(frame.full_set(), 1.0);
        Bpa { frame, entries }
    }

    /// Internal constructor for already-valid mass maps; prunes dust entries.
    pub(crate) fn from_parts(frame: Frame, mut entries: BTreeMap<FocalSet, f64>) -> Bpa {
        entries.retain(|set, mass| !set.is_empty() && *mass >= PRUNE_EPSILON);
        debug_assert!(
            (entries.values().sum::<f64>() - 1.0).abs() <= 1e-6,
            "internal bpa out of normalization"
        );
        Bpa { frame, entries }
    }

    /// Internal constructor that keeps sub-threshold entries (used by the
    /// random generator, whose postcondition fixes the exact entry count).
    pub(crate) fn from_parts_unpruned(frame: Frame, entries: BTreeMap<FocalSet, f64>) -> Bpa {
        debug_assert!(entries.iter().all(|(s, m)| !s.is_empty() && *m > 0.0));
        Bpa { frame, entries }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn focal_count(&self) -> usize {
        self.entries.len()
    }

    /// Mass of `set`; 0 when `set` is not focal.
    pub fn mass(&self, set: FocalSet) -> f64 {
        self.entries.get(&set).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses, ascending by bit pattern.
    pub fn iter(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.entries.iter().map(|(set, mass)| (*set, *mass))
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    /// True when every focal element is a singleton.
    pub fn is_bayesian(&self) -> bool {
        self.entries.keys().all(|set| set.cardinality() == 1)
    }

    /// Dempster's rule of combination. See [`Bpa::combine_report`] for the
    /// variant that also reports the conflict mass.
    pub fn combine(&self, other: &Bpa) -> Result<Bpa, EvidenceError> {
        Ok(self.combine_report(other)?.bpa)
    }

    /// Combines two bpas: products of masses are accumulated per intersection
    /// and normalized once by the total product mass of nonempty
    /// intersections. Fails with `TotalConflict` when (almost) no product mass
    /// survives.
    pub fn combine_report(&self, other: &Bpa) -> Result<Combination, EvidenceError> {
        if self.frame != other.frame {
            return Err(EvidenceError::FrameMismatch);
        }
        let mut acc: BTreeMap<FocalSet, f64> = BTreeMap::new();
        let mut conflict = 0.0;
        for (a1, m1) in self.iter() {
            for (a2, m2) in other.iter() {
                let product = m1 * m2;
                let meet = a1.intersection(a2);
                if meet.is_empty() {
                    conflict += product;
                } else {
                    *acc.entry(meet).or_insert(0.0) += product;
                }
            }
        }
        let kept: f64 = acc.values().sum();
        if kept <= MASS_EPSILON {
            return Err(EvidenceError::TotalConflict { conflict });
        }
        for mass in acc.values_mut() {
            *mass /= kept;
        }
        Ok(Combination {
            bpa: Bpa::from_parts(self.frame.clone(), acc),
            conflict,
        })
    }

    /// Belief: total mass of focal elements contained in `set`.
    pub fn belief(&self, set: FocalSet) -> Result<f64, EvidenceError> {
        if !self.frame.contains_set(set) {
            return Err(EvidenceError::FrameMismatch);
        }
        Ok(self
            .iter()
            .filter(|(focal, _)| focal.is_subset_of(set))
            .map(|(_, mass)| mass)
            .sum())
    }

    /// Plausibility: total mass of focal elements intersecting `set`.
    pub fn plausibility(&self, set: FocalSet) -> Result<f64, EvidenceError> {
        if !self.frame.contains_set(set) {
            return Err(EvidenceError::FrameMismatch);
        }
        Ok(self
            .iter()
            .filter(|(focal, _)| focal.intersects(set))
            .map(|(_, mass)| mass)
            .sum())
    }

    /// Pignistic transform: each focal element spreads its mass uniformly over
    /// its members, yielding a probability distribution on the frame.
    pub fn pignistic(&self) -> PignisticDist {
        let mut probs = vec![0.0; self.frame.size()];
        for (set, mass) in self.iter() {
            let share = mass / set.cardinality() as f64;
            for i in set.indices() {
                probs[i] += share;
            }
        }
        PignisticDist {
            frame: self.frame.clone(),
            probs,
        }
    }
}

/// A probability distribution over a frame's elements (indexed in frame order).
#[derive(Debug, Clone, PartialEq)]
pub struct PignisticDist {
    frame: Frame,
    probs: Vec<f64>,
}

impl PignisticDist {
    /// Validates an externally supplied distribution: one finite non-negative
    /// probability per frame element, summing to 1 within [`MASS_EPSILON`].
    pub fn new(frame: Frame, probs: Vec<f64>) -> Result<PignisticDist, EvidenceError> {
        if probs.len() != frame.size() {
            return Err(EvidenceError::FrameMismatch);
        }
        if let Some(&bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(EvidenceError::InvalidMass(bad));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > MASS_EPSILON {
            return Err(EvidenceError::MassNotNormalized { sum });
        }
        Ok(PignisticDist { frame, probs })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Probability of an arbitrary subset (sum over its members).
    pub fn prob_of_set(&self, set: FocalSet) -> f64 {
        set.indices().map(|i| self.probs[i]).sum()
    }
}
