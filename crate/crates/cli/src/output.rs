//! Machine-readable output documents and their human-readable rendering.
//!
//! Every subcommand emits exactly one JSON document on stdout (or a table
//! with `--format table`). Documents are validated on emission by parsing
//! them back, so anything printed conforms to the shipped schemas.

use anyhow::{ensure, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use rankwitness_core::rank::RankBounds;
use rankwitness_core::witness::{SliceEvidence, WitnessVerdict};

use crate::formats::DistributionFile;

pub fn emit<T: Serialize + DeserializeOwned + PartialEq>(doc: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(doc)?;
    let back: T = serde_json::from_str(&text)?;
    ensure!(&back == doc, "emitted JSON does not round-trip through its schema");
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SearchConfigDoc {
    pub restarts: usize,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub seed: u64,
    pub exact_lb_max_support: usize,
    pub arith: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LowerCertificateDoc {
    pub method: String,
    pub value: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RankDoc {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub lower_certificates: Vec<LowerCertificateDoc>,
    /// Residual of the upper-bound certificate, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub config: SearchConfigDoc,
}

pub fn rank_doc(bounds: &RankBounds, config: SearchConfigDoc) -> RankDoc {
    RankDoc {
        lower: bounds.lower,
        upper: bounds.upper,
        exact: bounds.exact,
        lower_certificates: bounds
            .lower_certificates
            .iter()
            .map(|&(method, value)| LowerCertificateDoc { method: method.name().into(), value })
            .collect(),
        residual: bounds.upper_certificate.as_ref().map(|c| c.residual),
        config,
    }
}

impl RankDoc {
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("rank+ lower    {}\n", self.lower));
        out.push_str(&format!("rank+ upper    {}\n", self.upper));
        out.push_str(&format!("exact          {}\n", self.exact));
        for c in &self.lower_certificates {
            out.push_str(&format!("lower via      {} = {}\n", c.method, c.value));
        }
        if let Some(r) = self.residual {
            out.push_str(&format!("cert residual  {r:.3e}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DsepDoc {
    pub d_separated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SliceEvidenceDoc {
    pub slice: Vec<(String, usize)>,
    pub rank_lower: usize,
    pub rank_upper: usize,
    pub rank_exact: bool,
    pub separator_cardinality: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerdictDoc {
    pub status: String,
    pub evidence: Vec<SliceEvidenceDoc>,
    pub message: String,
}

pub fn verdict_doc(verdict: &WitnessVerdict) -> VerdictDoc {
    VerdictDoc {
        status: verdict.status.as_str().to_string(),
        evidence: verdict.evidence.iter().map(evidence_doc).collect(),
        message: verdict.message.clone(),
    }
}

fn evidence_doc(e: &SliceEvidence) -> SliceEvidenceDoc {
    SliceEvidenceDoc {
        slice: e.slice.clone(),
        rank_lower: e.rank_lower,
        rank_upper: e.rank_upper,
        rank_exact: e.rank_exact,
        separator_cardinality: e.separator_cardinality,
    }
}

impl VerdictDoc {
    pub fn table(&self) -> String {
        let mut out = format!("verdict  {}\n", self.status);
        for e in &self.evidence {
            let slice = if e.slice.is_empty() {
                "(whole)".to_string()
            } else {
                e.slice
                    .iter()
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            out.push_str(&format!(
                "slice {slice}: rank in [{}, {}]{} vs separator {}\n",
                e.rank_lower,
                e.rank_upper,
                if e.rank_exact { " (exact)" } else { "" },
                e.separator_cardinality
            ));
        }
        out.push_str(&format!("note     {}\n", self.message));
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RankSummaryDoc {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexityDoc {
    pub rank: RankSummaryDoc,
    pub rcorr_bits: (f64, f64),
    pub rcomm_bits: (f64, f64),
    pub exact: bool,
}

impl ComplexityDoc {
    pub fn table(&self) -> String {
        format!(
            "rank+        [{}, {}]{}\nRCorr bits   [{}, {}]\nRComm bits   [{}, {}]\n",
            self.rank.lower,
            self.rank.upper,
            if self.exact { " (exact)" } else { "" },
            self.rcorr_bits.0,
            self.rcorr_bits.1,
            self.rcomm_bits.0,
            self.rcomm_bits.1,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TradeoffDoc {
    pub satisfiable: bool,
    pub budget: u64,
    pub required_lower_bound: usize,
    pub margin: i64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PsdDoc {
    pub lower: usize,
    pub upper: usize,
    pub notes: Vec<String>,
    /// Set when `--certificate` was supplied: whether it verified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_verified: Option<bool>,
    /// Set when `--search` was requested: the certificate found, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_certificate: Option<crate::formats::PsdFactorizationFile>,
}

impl PsdDoc {
    pub fn table(&self) -> String {
        let mut out = format!("rank_PSD lower  {}\nrank_PSD upper  {}\n", self.lower, self.upper);
        for n in &self.notes {
            out.push_str(&format!("note            {n}\n"));
        }
        if let Some(v) = self.certificate_verified {
            out.push_str(&format!("certificate     {}\n", if v { "verified" } else { "rejected" }));
        }
        if self.search_certificate.is_some() {
            out.push_str("search          found a certificate (in JSON output)\n");
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SliceDoc {
    pub variable: String,
    pub value: usize,
    /// Probability of the conditioning event.
    pub weight: f64,
    pub distribution: DistributionFile,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResponseWitnessDoc {
    pub responses: [i8; 4],
    pub p_u: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeasibilityDoc {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ResponseWitnessDoc>,
    pub p_step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulationDoc {
    pub distribution: DistributionFile,
}
