//! Decision-quality metrics comparing an approximated pignistic distribution
//! against the exact one.

use crate::bpa::PignisticDist;
use crate::error::EvidenceError;

/// Ranking of frame elements by pignistic probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionReport {
    /// Element with the highest probability (ties broken by lowest index).
    pub best: usize,
    /// All elements, by descending probability; ties keep ascending index order.
    pub ranking: Vec<usize>,
}

pub fn decide(dist: &PignisticDist) -> DecisionReport {
    decide_probs(dist.probs())
}

pub fn decide_probs(probs: &[f64]) -> DecisionReport {
    assert!(!probs.is_empty(), "cannot decide over an empty frame");
    let mut ranking: Vec<usize> = (0..probs.len()).collect();
    ranking.sort_by(|&i, &j| {
        probs[j]
            .partial_cmp(&probs[i])
            .expect("probabilities are finite")
            .then(i.cmp(&j))
    });
    DecisionReport {
        best: ranking[0],
        ranking,
    }
}

/// Largest absolute difference in probability assigned to any subset of the
/// frame. Equals the one-sided sum Σ_x max(p0(x) - papp(x), 0): the
/// maximizing subset collects exactly the elements where one distribution
/// exceeds the other, so the 2^N subset maximum reduces to a linear scan.
pub fn error1(p0: &PignisticDist, papp: &PignisticDist) -> Result<f64, EvidenceError> {
    if p0.frame() != papp.frame() {
        return Err(EvidenceError::FrameMismatch);
    }
    Ok(error1_probs(p0.probs(), papp.probs()))
}

pub fn error1_probs(p0: &[f64], papp: &[f64]) -> f64 {
    debug_assert_eq!(p0.len(), papp.len());
    p0.iter().zip(papp).map(|(a, b)| (a - b).max(0.0)).sum()
}

/// error2: how many elements the approximation ranks strictly above the
/// exact-best element. error3: how many elements the exact distribution ranks
/// strictly above the approximation's pick. Both are 0 when the approximation
/// would make the same decision.
pub fn error23(p0: &PignisticDist, papp: &PignisticDist) -> Result<(usize, usize), EvidenceError> {
    if p0.frame() != papp.frame() {
        return Err(EvidenceError::FrameMismatch);
    }
    Ok(error23_probs(p0.probs(), papp.probs()))
}

pub fn error23_probs(p0: &[f64], papp: &[f64]) -> (usize, usize) {
    debug_assert_eq!(p0.len(), papp.len());
    let best_exact = decide_probs(p0).best;
    let best_approx = decide_probs(papp).best;
    let error2 = papp.iter().filter(|&&p| p > papp[best_exact]).count();
    let error3 = p0.iter().filter(|&&p| p > p0[best_approx]).count();
    (error2, error3)
}

/// All three error measures for one exact/approximate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub error1: f64,
    pub error2: usize,
    pub error3: usize,
}

pub fn error_triple(
    p0: &PignisticDist,
    papp: &PignisticDist,
) -> Result<ErrorTriple, EvidenceError> {
    let error1 = error1(p0, papp)?;
    let (error2, error3) = error23(p0, papp)?;
    Ok(ErrorTriple {
        error1,
        error2,
        error3,
    })
}
