//! Accepting or refuting causal hypotheses from observed distributions.
//!
//! A hypothesis promises that some set of hidden variables of known
//! cardinality d-separates the target pair. Every d-separating set of
//! cardinality `c` forces the nonnegative rank of the observed joint to be
//! at most `c`, so a certified rank lower bound above `c` refutes the
//! hypothesis — it witnesses direct causal influence. The verdict is
//! three-valued: rank bounds are intervals, and an open interval straddling
//! the cardinality decides nothing.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::graph::CausalGraph;
use crate::rank::{nonnegative_rank, RankConfig};
use crate::scalar::Scalar;

/// A causal hypothesis: a graph with observed/hidden flags and cardinality
/// promises, a target pair of observed variables, and the observed
/// variables to condition on.
#[derive(Debug, Clone)]
pub struct CausalHypothesis {
    pub graph: CausalGraph,
    pub x: String,
    pub y: String,
    pub conditioning: Vec<String>,
}

impl CausalHypothesis {
    pub fn new(
        graph: CausalGraph,
        x: impl Into<String>,
        y: impl Into<String>,
        conditioning: Vec<String>,
    ) -> Result<Self> {
        let hypothesis = CausalHypothesis { graph, x: x.into(), y: y.into(), conditioning };
        for name in
            [&hypothesis.x, &hypothesis.y].into_iter().chain(hypothesis.conditioning.iter())
        {
            let i = hypothesis.graph.variable_index(name)?;
            if !hypothesis.graph.variable(i).observed {
                return Err(Error::NoObservedData(name.clone()));
            }
        }
        Ok(hypothesis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Refuted,
    Consistent,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Refuted => "refuted",
            VerdictStatus::Consistent => "consistent",
            VerdictStatus::Inconclusive => "inconclusive",
        }
    }
}

/// Numeric evidence for one conditioning slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceEvidence {
    /// Conditioning assignment, empty when nothing was conditioned on.
    pub slice: Vec<(String, usize)>,
    pub rank_lower: usize,
    pub rank_upper: usize,
    pub rank_exact: bool,
    pub separator_cardinality: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerdict {
    pub status: VerdictStatus,
    pub evidence: Vec<SliceEvidence>,
    pub message: String,
}

impl WitnessVerdict {
    fn new(status: VerdictStatus, evidence: Vec<SliceEvidence>, message: String) -> Self {
        WitnessVerdict { status, evidence, message }
    }
}

/// Compares certified rank bounds of a two-variable distribution against a
/// separator cardinality: refuted when even the lower bound exceeds it,
/// consistent when the certified upper bound fits under it.
pub fn corollary1_check<T: Scalar>(
    dist: &JointDistribution<T>,
    separator_cardinality: u64,
    config: &RankConfig,
) -> Result<WitnessVerdict> {
    let matrix = dist.as_matrix()?;
    let bounds = nonnegative_rank(&matrix, config);
    let evidence = vec![SliceEvidence {
        slice: Vec::new(),
        rank_lower: bounds.lower,
        rank_upper: bounds.upper,
        rank_exact: bounds.exact,
        separator_cardinality,
    }];
    let verdict = if bounds.lower as u64 > separator_cardinality {
        WitnessVerdict::new(
            VerdictStatus::Refuted,
            evidence,
            format!(
                "certified rank lower bound {} exceeds separator cardinality {}: \
                 direct causal influence is needed",
                bounds.lower, separator_cardinality
            ),
        )
    } else if bounds.upper as u64 <= separator_cardinality {
        WitnessVerdict::new(
            VerdictStatus::Consistent,
            evidence,
            format!(
                "certified rank upper bound {} fits the separator cardinality {}",
                bounds.upper, separator_cardinality
            ),
        )
    } else {
        WitnessVerdict::new(
            VerdictStatus::Inconclusive,
            evidence,
            format!(
                "rank interval [{}, {}] straddles separator cardinality {}",
                bounds.lower, bounds.upper, separator_cardinality
            ),
        )
    };
    Ok(verdict)
}

/// Probability below which a conditioning slice is skipped: such slices
/// carry no constraint.
pub const SLICE_PROB_MIN: f64 = 1e-9;

/// Tests an entire hypothesis against observed data.
///
/// Finds the minimal hidden separating sets, then checks every positive-
/// probability assignment of the conditioning variables against the
/// largest available separator cardinality. Any refuted slice refutes the
/// hypothesis; all slices consistent makes it consistent; otherwise the
/// outcome is inconclusive. A hypothesis with no hidden separator (a
/// direct edge) is vacuously consistent — it constrains nothing.
pub fn witness_direct_influence<T: Scalar>(
    hypothesis: &CausalHypothesis,
    data: &JointDistribution<T>,
    config: &RankConfig,
) -> Result<WitnessVerdict> {
    for name in
        [&hypothesis.x, &hypothesis.y].into_iter().chain(hypothesis.conditioning.iter())
    {
        if data.axis_index(name).is_err() {
            return Err(Error::NoObservedData(name.clone()));
        }
    }
    let separators = hypothesis.graph.find_hidden_separators(
        &hypothesis.x,
        &hypothesis.y,
        &hypothesis.conditioning,
    )?;
    if separators.is_empty() {
        return Ok(WitnessVerdict::new(
            VerdictStatus::Consistent,
            Vec::new(),
            String::from(
                "vacuously consistent: the hypothesis graph has no hidden separating set, \
                 so it imposes no rank constraint",
            ),
        ));
    }
    let best_cardinality = separators.iter().map(|(_, c)| *c).max().unwrap();

    let mut keep: Vec<&str> = vec![hypothesis.x.as_str(), hypothesis.y.as_str()];
    keep.extend(hypothesis.conditioning.iter().map(String::as_str));
    let reduced = data.marginalize(&keep)?;

    let mut evidence = Vec::new();
    let mut skipped = 0usize;
    let mut statuses = Vec::new();
    for assignment in conditioning_assignments(&reduced, &hypothesis.conditioning)? {
        let event: Vec<(&str, usize)> =
            assignment.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        let weight = reduced.event_prob(&event)?.to_f64();
        if weight < SLICE_PROB_MIN {
            skipped += 1;
            continue;
        }
        let mut slice_dist = reduced.clone();
        for (name, value) in &assignment {
            slice_dist = slice_dist.condition(name, *value)?.dist;
        }
        let pair = slice_dist.marginalize(&[hypothesis.x.as_str(), hypothesis.y.as_str()])?;
        let verdict = corollary1_check(&pair, best_cardinality, config)?;
        let mut slice_evidence = verdict.evidence;
        for e in &mut slice_evidence {
            e.slice = assignment.clone();
        }
        evidence.extend(slice_evidence);
        statuses.push(verdict.status);
    }

    let mut message = String::new();
    if skipped > 0 {
        message = format!("{skipped} zero-probability slice(s) skipped; ");
    }
    let status = if statuses.iter().any(|s| *s == VerdictStatus::Refuted) {
        message.push_str(
            "some slice needs more states than every candidate hidden separator provides: \
             direct causal influence witnessed",
        );
        VerdictStatus::Refuted
    } else if statuses.iter().all(|s| *s == VerdictStatus::Consistent) {
        message.push_str("every slice fits a candidate hidden separator");
        VerdictStatus::Consistent
    } else {
        message.push_str("rank certification left at least one slice undecided");
        VerdictStatus::Inconclusive
    };
    Ok(WitnessVerdict::new(status, evidence, message))
}

/// All assignments of the conditioning variables; a single empty
/// assignment when nothing is conditioned on.
fn conditioning_assignments<T: Scalar>(
    data: &JointDistribution<T>,
    conditioning: &[String],
) -> Result<Vec<Vec<(String, usize)>>> {
    let mut cards = Vec::with_capacity(conditioning.len());
    for name in conditioning {
        let axis = data.axis_index(name)?;
        cards.push(data.axes()[axis].cardinality);
    }
    Ok(crate::dist::Assignments::new(&cards)
        .map(|values| conditioning.iter().cloned().zip(values).collect::<Vec<(String, usize)>>())
        .collect())
}

/// The certified rank lower bound, reported as the minimum cardinality any
/// d-separating hidden variable must have.
pub fn lower_bound_hidden_cardinality<T: Scalar>(
    dist: &JointDistribution<T>,
    config: &RankConfig,
) -> Result<usize> {
    let matrix = dist.as_matrix()?;
    Ok(nonnegative_rank(&matrix, config).lower)
}

/// Inputs of the perfect-correlation constraint check: the conditional
/// expectations of X, Y and XY at `z = +1` and `z = -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalExpectations {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub xy: (f64, f64),
}

/// The constraint system for binary X, Y perfectly positively correlated
/// at both values of an observed binary Z, under a hypothesis where a
/// hidden binary U and Z are the only common causes.
///
/// Perfect correlation forces X and Y to respond deterministically and
/// identically to (Z, U); eliminating U leaves, per variable V: the two
/// conditional expectations agree in magnitude, or one of them is pinned
/// at -1, or one of them is pinned at +1. On top of that, ⟨V|Z=z⟩ must be
/// the same for V = X and V = Y at each z.
pub fn perfect_correlation_check(
    inputs: &ConditionalExpectations,
    tol: f64,
) -> Result<WitnessVerdict> {
    for v in [inputs.x.0, inputs.x.1, inputs.y.0, inputs.y.1, inputs.xy.0, inputs.xy.1] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange { value: v });
        }
    }
    if libm::fabs(inputs.xy.0 - 1.0) > tol || libm::fabs(inputs.xy.1 - 1.0) > tol {
        return Ok(WitnessVerdict::new(
            VerdictStatus::Inconclusive,
            Vec::new(),
            String::from(
                "not applicable: the check requires perfect positive correlation \
                 (⟨XY|Z=z⟩ = 1) at both values of Z",
            ),
        ));
    }

    let disjunction = |pair: (f64, f64)| -> bool {
        let equal_magnitude = libm::fabs(libm::fabs(pair.0) - libm::fabs(pair.1)) <= tol;
        let min_pinned = pair.0.min(pair.1) <= -1.0 + tol;
        let max_pinned = pair.0.max(pair.1) >= 1.0 - tol;
        equal_magnitude || min_pinned || max_pinned
    };
    let marginals_match = libm::fabs(inputs.x.0 - inputs.y.0) <= tol
        && libm::fabs(inputs.x.1 - inputs.y.1) <= tol;

    if disjunction(inputs.x) && disjunction(inputs.y) && marginals_match {
        Ok(WitnessVerdict::new(
            VerdictStatus::Consistent,
            Vec::new(),
            String::from(
                "the conditional expectations satisfy the deterministic-response constraints",
            ),
        ))
    } else {
        Ok(WitnessVerdict::new(
            VerdictStatus::Refuted,
            Vec::new(),
            String::from(
                "an additional causal influence between X and Y is needed: no deterministic \
                 response to (Z, U) produces these conditional expectations",
            ),
        ))
    }
}

/// Resolution of the probability grid for `P(U = +1)` in the brute-force
/// oracle.
pub const ORACLE_P_STEP_DENOM: u32 = 256;

/// A deterministic response achieving the target, if any: the response
/// table `f(z, u)` (indexed `[f(+1,+1), f(+1,-1), f(-1,+1), f(-1,-1)]`)
/// and the weight `P(U=+1)` on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseWitness {
    pub responses: [i8; 4],
    pub p_u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub witness: Option<ResponseWitness>,
    /// Grid step used for P(U).
    pub p_step: f64,
}

/// Decides by exhaustive enumeration whether a pair of conditional
/// expectations `(⟨X|z=+1⟩, ⟨X|z=-1⟩)` is achievable by a variable that
/// responds deterministically to an observed binary Z and a hidden binary
/// U (with Y forced to copy X's response by the perfect correlation).
///
/// All 16 response functions are combined with every `P(U = +1)` on a
/// 1/256 grid; `P(Z)` is irrelevant because the constraints are per-z.
/// This is the independent ground truth the closed-form
/// [`perfect_correlation_check`] is validated against.
pub fn brute_force_response_oracle(target: (f64, f64), tol: f64) -> Result<FeasibilityReport> {
    for v in [target.0, target.1] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange { value: v });
        }
    }
    let p_step = 1.0 / f64::from(ORACLE_P_STEP_DENOM);
    for table in 0u8..16 {
        let responses = response_table(table);
        for numer in 0..=ORACLE_P_STEP_DENOM {
            let p = f64::from(numer) * p_step;
            let (e_plus, e_minus) = response_expectations(responses, p);
            if libm::fabs(e_plus - target.0) <= tol && libm::fabs(e_minus - target.1) <= tol {
                return Ok(FeasibilityReport {
                    feasible: true,
                    witness: Some(ResponseWitness { responses, p_u: p }),
                    p_step,
                });
            }
        }
    }
    Ok(FeasibilityReport { feasible: false, witness: None, p_step })
}

fn response_table(bits: u8) -> [i8; 4] {
    let mut out = [0i8; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = if bits & (1 << i) != 0 { 1 } else { -1 };
    }
    out
}

fn response_expectations(responses: [i8; 4], p_u: f64) -> (f64, f64) {
    // responses: [f(+1,+1), f(+1,-1), f(-1,+1), f(-1,-1)], p_u = P(U=+1).
    let e_plus = p_u * f64::from(responses[0]) + (1.0 - p_u) * f64::from(responses[1]);
    let e_minus = p_u * f64::from(responses[2]) + (1.0 - p_u) * f64::from(responses[3]);
    (e_plus, e_minus)
}

/// Samples the oracle's achievable region on an `n × n` target grid over
/// `[-1, 1]²`. Rows of the output are `(⟨X|z=+1⟩, ⟨X|z=-1⟩, feasible)`.
pub fn achievable_region(n: usize, tol: f64) -> Vec<(f64, f64, bool)> {
    assert!(n >= 2);
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let target = (coord(i), coord(j));
            let feasible =
                brute_force_response_oracle(target, tol).expect("grid targets in range").feasible;
            out.push((target.0, target.1, feasible));
        }
    }
    out
}
