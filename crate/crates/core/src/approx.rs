//! Focal-element reduction: algorithms that replace a bpa with one carrying
//! fewer focal elements, trading decision quality for combination cost.

use std::collections::BTreeMap;
use std::fmt;

use crate::bpa::Bpa;
use crate::error::EvidenceError;
use crate::set::FocalSet;

/// A reduction algorithm with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxMethod {
    /// Collapse to singletons weighted by relative plausibility.
    Bayesian,
    /// Keep the `k` largest masses, then more while under the `l` cap and the
    /// kept mass is below `1 - x`; renormalize. `l = None` means no cap.
    Klx { k: usize, l: Option<usize>, x: f64 },
    /// Keep the `k - 1` largest masses and pool the rest onto their union.
    Summarize { k: usize },
    /// Keep the `k - 1` largest masses and redistribute the rest onto related
    /// retained sets (or Θ), never renormalizing.
    D1 { k: usize },
}

impl ApproxMethod {
    pub fn validate(&self) -> Result<(), EvidenceError> {
        let fail = |msg: String| Err(EvidenceError::InvalidParameter(msg));
        match *self {
            ApproxMethod::Bayesian => Ok(()),
            ApproxMethod::Klx { k, l, x } => {
                if k < 1 {
                    return fail("klx requires k >= 1".into());
                }
                if let Some(l) = l {
                    if l < k {
                        return fail(format!("klx requires l >= k, got k={k} l={l}"));
                    }
                }
                // x = 1.0 is admitted: the mass guard is then never satisfied
                // and only k (and l) bind.
                if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                    return fail(format!("klx requires 0 <= x <= 1, got x={x}"));
                }
                Ok(())
            }
            ApproxMethod::Summarize { k } => {
                if k < 1 {
                    return fail("summarize requires k >= 1".into());
                }
                Ok(())
            }
            ApproxMethod::D1 { k } => {
                if k < 2 {
                    return fail("d1 requires k >= 2".into());
                }
                Ok(())
            }
        }
    }

    /// Runs the algorithm. Parameters must satisfy [`ApproxMethod::validate`].
    pub fn apply(&self, m: &Bpa) -> Bpa {
        match *self {
            ApproxMethod::Bayesian => bayesian(m),
            ApproxMethod::Klx { k, l, x } => klx(m, k, l, x),
            ApproxMethod::Summarize { k } => summarize(m, k),
            ApproxMethod::D1 { k } => d1(m, k),
        }
    }
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ApproxMethod::Bayesian => write!(f, "bayes"),
            ApproxMethod::Klx { k, l, x } => match l {
                Some(l) => write!(f, "klx(k={k},l={l},x={x})"),
                None => write!(f, "klx(k={k},l=inf,x={x})"),
            },
            ApproxMethod::Summarize { k } => write!(f, "summarize(k={k})"),
            ApproxMethod::D1 { k } => write!(f, "d1(k={k})"),
        }
    }
}

/// Focal elements ordered by descending mass; ties broken by ascending
/// cardinality, then ascending bit pattern. Every selection of "largest"
/// focal elements uses this order, so results are deterministic.
fn ranked(m: &Bpa) -> Vec<(FocalSet, f64)> {
    let mut entries: Vec<(FocalSet, f64)> = m.iter().collect();
    entries.sort_by(|(sa, ma), (sb, mb)| {
        mb.partial_cmp(ma)
            .expect("bpa masses are finite")
            .then(sa.cardinality().cmp(&sb.cardinality()))
            .then(sa.bits().cmp(&sb.bits()))
    });
    entries
}

/// Bayesian approximation: collapses the bpa to singletons, weighting each
/// element by the mass of the sets containing it and normalizing by the
/// cardinality-weighted total mass. Distributes over combination and absorbs
/// non-Bayesian operands (combining Bayesian-reduced inputs gives the
/// Bayesian reduction of the combination).
pub fn bayesian(m: &Bpa) -> Bpa {
    let frame = m.frame().clone();
    let mut weight = vec![0.0; frame.size()];
    let mut denom = 0.0;
    for (set, mass) in m.iter() {
        denom += mass * set.cardinality() as f64;
        for i in set.indices() {
            weight[i] += mass;
        }
    }
    let entries = weight
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(i, w)| (FocalSet::singleton(i), w / denom))
        .collect();
    Bpa::from_parts(frame, entries)
}

/// k-l-x approximation: walk the focal elements in descending-mass order,
/// keeping at least `k` and at most `l`, stopping early once the kept mass
/// reaches `1 - x`; the kept masses are renormalized.
///
/// Panics when the parameters violate [`ApproxMethod::validate`].
pub fn klx(m: &Bpa, k: usize, l: Option<usize>, x: f64) -> Bpa {
    ApproxMethod::Klx { k, l, x }.validate().unwrap();
    let mut kept: BTreeMap<FocalSet, f64> = BTreeMap::new();
    let mut total = 0.0;
    for (set, mass) in ranked(m) {
        let count = kept.len();
        if l.is_some_and(|l| count >= l) {
            break;
        }
        if !(count < k || total < 1.0 - x) {
            break;
        }
        kept.insert(set, mass);
        total += mass;
    }
    for mass in kept.values_mut() {
        *mass /= total;
    }
    Bpa::from_parts(m.frame().clone(), kept)
}

/// Summarization: the `k - 1` largest masses are kept verbatim and all
/// remaining mass is pooled onto the union of the remaining sets. Mass is
/// conserved exactly; the output has `k` focal elements, or `k - 1` when the
/// pooled union collides with a kept set.
///
/// Panics when `k < 1`.
pub fn summarize(m: &Bpa, k: usize) -> Bpa {
    ApproxMethod::Summarize { k }.validate().unwrap();
    if m.focal_count() <= k {
        return m.clone();
    }
    let ranked = ranked(m);
    let (keep, pool) = ranked.split_at(k - 1);
    let mut entries: BTreeMap<FocalSet, f64> = keep.iter().copied().collect();
    let mut union = FocalSet::EMPTY;
    let mut pooled = 0.0;
    for (set, mass) in pool {
        union = union.union(*set);
        pooled += mass;
    }
    *entries.entry(union).or_insert(0.0) += pooled;
    Bpa::from_parts(m.frame().clone(), entries)
}

/// One mass movement performed by [`d1_traced`]: `amount` of `source`'s mass
/// landed on the retained set (or Θ) `destination`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Redistribution {
    pub source: FocalSet,
    pub destination: FocalSet,
    pub amount: f64,
}

/// D1 approximation: keeps the `k - 1` largest masses plus Θ, then moves each
/// remaining focal element's mass onto retained supersets when possible,
/// otherwise proportionally onto retained sets that are at least as large as
/// the source and overlap it, recursing on the uncovered remainder; mass with
/// no eligible destination falls to Θ. Mass is conserved exactly and retained
/// sets never lose mass.
///
/// Panics when `k < 2`.
pub fn d1(m: &Bpa, k: usize) -> Bpa {
    d1_impl(m, k, &mut |_, _, _| {})
}

/// [`d1`] that also reports every mass movement, including recursive ones
/// (whose `source` is the still-uncovered remainder being redistributed).
pub fn d1_traced(m: &Bpa, k: usize) -> (Bpa, Vec<Redistribution>) {
    let mut events = Vec::new();
    let bpa = d1_impl(m, k, &mut |source, destination, amount| {
        events.push(Redistribution {
            source,
            destination,
            amount,
        });
    });
    (bpa, events)
}

fn d1_impl(m: &Bpa, k: usize, on_move: &mut dyn FnMut(FocalSet, FocalSet, f64)) -> Bpa {
    ApproxMethod::D1 { k }.validate().unwrap();
    let frame = m.frame().clone();
    let theta = frame.full_set();
    let ranked = ranked(m);
    let cut = (k - 1).min(ranked.len());
    let retained: Vec<FocalSet> = ranked[..cut].iter().map(|(set, _)| *set).collect();

    let mut acc: BTreeMap<FocalSet, f64> = ranked[..cut].iter().copied().collect();
    // Θ keeps its own mass even when it falls below the cut; redistributing it
    // as well would count it twice.
    acc.insert(theta, m.mass(theta));
    for &(set, mass) in &ranked[cut..] {
        if set == theta {
            continue;
        }
        distribute(
            set,
            mass,
            set.cardinality(),
            &retained,
            theta,
            &mut acc,
            on_move,
        );
    }
    Bpa::from_parts(frame, acc)
}

/// Moves `val` (the mass of the still-uncovered remainder `a`) onto retained
/// sets. `limit` stays fixed at the original source's cardinality across
/// recursion.
fn distribute(
    a: FocalSet,
    val: f64,
    limit: usize,
    retained: &[FocalSet],
    theta: FocalSet,
    acc: &mut BTreeMap<FocalSet, f64>,
    on_move: &mut dyn FnMut(FocalSet, FocalSet, f64),
) {
    // Case 1: retained strict supersets exist; the smallest ones share equally.
    let supersets: Vec<FocalSet> = retained
        .iter()
        .copied()
        .filter(|b| a.is_strict_subset_of(*b))
        .collect();
    if !supersets.is_empty() {
        let min_card = supersets.iter().map(|b| b.cardinality()).min().unwrap();
        let smallest: Vec<FocalSet> = supersets
            .into_iter()
            .filter(|b| b.cardinality() == min_card)
            .collect();
        let share = val / smallest.len() as f64;
        for b in smallest {
            *acc.entry(b).or_insert(0.0) += share;
            on_move(a, b, share);
        }
        return;
    }

    // Case 2: retained sets at least as large as the original source that
    // overlap `a`; the smallest ones split `val` by overlap size, scaled by
    // the fraction of `a` they cover. The uncovered remainder recurses.
    let candidates: Vec<FocalSet> = retained
        .iter()
        .copied()
        .filter(|b| b.cardinality() >= limit && b.intersects(a))
        .collect();
    if candidates.is_empty() {
        *acc.entry(theta).or_insert(0.0) += val;
        on_move(a, theta, val);
        return;
    }
    let min_card = candidates.iter().map(|b| b.cardinality()).min().unwrap();
    let smallest: Vec<FocalSet> = candidates
        .into_iter()
        .filter(|b| b.cardinality() == min_card)
        .collect();
    let covered = smallest
        .iter()
        .fold(FocalSet::EMPTY, |acc, b| acc.union(b.intersection(a)));
    let ratio = covered.cardinality() as f64 / a.cardinality() as f64;
    let overlap_total: usize = smallest
        .iter()
        .map(|b| b.intersection(a).cardinality())
        .sum();
    let mut assigned = 0.0;
    for b in &smallest {
        let share = (b.intersection(a).cardinality() as f64 / overlap_total as f64) * ratio * val;
        *acc.entry(*b).or_insert(0.0) += share;
        assigned += share;
        on_move(a, *b, share);
    }
    if ratio < 1.0 {
        let rest = a.difference(covered);
        if !rest.is_empty() {
            distribute(rest, val - assigned, limit, retained, theta, acc, on_move);
        }
    }
}
