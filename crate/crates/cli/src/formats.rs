//! JSON and CSV file formats for graphs, distributions, factorizations and
//! protocols, plus DOT export.
//!
//! Rational-encoded files keep probabilities as strings like `"1/6"`, so
//! exact inputs stay exact through parsing. Float files use plain numbers.
//! Schemas for every document live in `docs/schemas/`.

use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use rankwitness_core::dist::{AxisSpec, JointDistribution, NORMALIZATION_TOL};
use rankwitness_core::graph::{CausalGraph, VariableSpec};
use rankwitness_core::matrix::Mat;
use rankwitness_core::protocol::{HybridProtocol, MessageProtocol, SeedProtocol};
use rankwitness_core::psd::PsdFactorization;
use rankwitness_core::rank::{FactorPair, NnFactorization};
use rankwitness_core::scalar::{Rational, Scalar};

// ---------------------------------------------------------------------------
// Graphs

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub variables: Vec<VariableFile>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VariableFile {
    pub name: String,
    pub cardinality: usize,
    pub observed: bool,
}

pub fn parse_graph(text: &str) -> Result<CausalGraph> {
    let file: GraphFile = serde_json::from_str(text).context("parsing graph JSON")?;
    let variables = file
        .variables
        .into_iter()
        .map(|v| VariableSpec { name: v.name, cardinality: v.cardinality, observed: v.observed })
        .collect();
    let edges: Vec<(&str, &str)> =
        file.edges.iter().map(|(f, t)| (f.as_str(), t.as_str())).collect();
    CausalGraph::build(variables, &edges).map_err(|e| anyhow!("invalid graph: {e}"))
}

pub fn graph_to_file(graph: &CausalGraph) -> GraphFile {
    GraphFile {
        variables: graph
            .variables()
            .iter()
            .map(|v| VariableFile {
                name: v.name.clone(),
                cardinality: v.cardinality,
                observed: v.observed,
            })
            .collect(),
        edges: graph.edges().map(|(f, t)| (f.to_string(), t.to_string())).collect(),
    }
}

/// DOT rendering: observed variables as solid ellipses, hidden ones dashed.
pub fn graph_to_dot(graph: &CausalGraph) -> String {
    let mut out = String::from("digraph causal {\n");
    for v in graph.variables() {
        let style = if v.observed { "solid" } else { "dashed" };
        out.push_str(&format!(
            "  \"{}\" [shape=ellipse, style={}, label=\"{} (|{}|={})\"];\n",
            v.name, style, v.name, v.name, v.cardinality
        ));
    }
    for (from, to) in graph.edges() {
        out.push_str(&format!("  \"{from}\" -> \"{to}\";\n"));
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Distributions and matrices

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Float,
    Rational,
}

/// A probability entry: a plain number in float files, a `"num/den"`
/// string (or integer) in rational files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ValueEntry {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistributionFile {
    pub axes: Vec<AxisFile>,
    pub values: Vec<ValueEntry>,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AxisFile {
    pub name: String,
    pub cardinality: usize,
}

fn parse_rational(text: &str) -> Result<Rational> {
    Ratio::<BigInt>::from_str(text.trim())
        .map_err(|e| anyhow!("invalid rational literal `{text}`: {e}"))
}

fn entry_to_rational(entry: &ValueEntry) -> Result<Rational> {
    match entry {
        ValueEntry::Number(x) => {
            if x.fract() == 0.0 {
                Ok(Rational::from_int(*x as i64))
            } else {
                // Floats are dyadic rationals; conversion is exact.
                Ok(<Rational as Scalar>::from_f64(*x))
            }
        }
        ValueEntry::Text(s) => parse_rational(s),
    }
}

fn entry_to_f64(entry: &ValueEntry) -> Result<f64> {
    match entry {
        ValueEntry::Number(x) => Ok(*x),
        ValueEntry::Text(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
    }
}

/// A parsed distribution in whichever backend the file (or a `--arith`
/// override) selects.
#[derive(Debug, Clone)]
pub enum AnyDistribution {
    Float(JointDistribution<f64>),
    Rational(JointDistribution<Rational>),
}

impl AnyDistribution {
    pub fn axes(&self) -> &[AxisSpec] {
        match self {
            AnyDistribution::Float(d) => d.axes(),
            AnyDistribution::Rational(d) => d.axes(),
        }
    }
}

pub fn parse_distribution(text: &str, force: Option<Encoding>) -> Result<AnyDistribution> {
    let file: DistributionFile = serde_json::from_str(text).context("parsing distribution JSON")?;
    let axes: Vec<AxisSpec> =
        file.axes.iter().map(|a| AxisSpec::new(a.name.clone(), a.cardinality)).collect();
    let encoding = force.unwrap_or(file.encoding);
    match encoding {
        Encoding::Float => {
            let values = file.values.iter().map(entry_to_f64).collect::<Result<Vec<_>>>()?;
            let dist = JointDistribution::from_values(axes, values, NORMALIZATION_TOL)
                .map_err(|e| anyhow!("invalid distribution: {e}"))?;
            Ok(AnyDistribution::Float(dist))
        }
        Encoding::Rational => {
            let values =
                file.values.iter().map(entry_to_rational).collect::<Result<Vec<_>>>()?;
            let dist = JointDistribution::from_values(axes, values, NORMALIZATION_TOL)
                .map_err(|e| anyhow!("invalid distribution: {e}"))?;
            Ok(AnyDistribution::Rational(dist))
        }
    }
}

pub fn distribution_to_file<T: Scalar>(dist: &JointDistribution<T>) -> DistributionFile {
    let axes = dist
        .axes()
        .iter()
        .map(|a| AxisFile { name: a.name.clone(), cardinality: a.cardinality })
        .collect();
    let (encoding, values) = if T::EXACT {
        (
            Encoding::Rational,
            dist.values().iter().map(|v| ValueEntry::Text(v.display())).collect(),
        )
    } else {
        (
            Encoding::Float,
            dist.values().iter().map(|v| ValueEntry::Number(v.to_f64())).collect(),
        )
    };
    DistributionFile { axes, values, encoding }
}

/// A parsed two-axis matrix: not necessarily normalized (rank bounds do
/// not require a distribution).
#[derive(Debug, Clone)]
pub enum AnyMatrix {
    Float(Mat<f64>),
    Rational(Mat<Rational>),
}

/// Reads a matrix from distribution JSON or (by `.csv` extension) from a
/// plain comma-separated table, rows = first axis. CSV cells may be
/// numbers or `num/den` rationals; any rational cell makes the whole
/// matrix exact.
pub fn parse_matrix(path: &std::path::Path, force: Option<Encoding>) -> Result<AnyMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return parse_csv_matrix(&text, force);
    }
    let file: DistributionFile = serde_json::from_str(&text).context("parsing matrix JSON")?;
    if file.axes.len() != 2 {
        bail!("expected a two-axis distribution, found {} axes", file.axes.len());
    }
    let rows = file.axes[0].cardinality;
    let cols = file.axes[1].cardinality;
    let encoding = force.unwrap_or(file.encoding);
    match encoding {
        Encoding::Float => {
            let values = file.values.iter().map(entry_to_f64).collect::<Result<Vec<_>>>()?;
            check_nonnegative_f64(&values)?;
            Ok(AnyMatrix::Float(Mat::new(rows, cols, values).map_err(|e| anyhow!("{e}"))?))
        }
        Encoding::Rational => {
            let values =
                file.values.iter().map(entry_to_rational).collect::<Result<Vec<_>>>()?;
            check_nonnegative_rational(&values)?;
            Ok(AnyMatrix::Rational(Mat::new(rows, cols, values).map_err(|e| anyhow!("{e}"))?))
        }
    }
}

fn check_nonnegative_f64(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        bail!("matrix entries must be finite and nonnegative, found {v}");
    }
    Ok(())
}

fn check_nonnegative_rational(values: &[Rational]) -> Result<()> {
    use num_traits::Signed;
    if values.iter().any(|v| v.is_negative()) {
        bail!("matrix entries must be nonnegative");
    }
    Ok(())
}

fn parse_csv_matrix(text: &str, force: Option<Encoding>) -> Result<AnyMatrix> {
    let mut cells: Vec<Vec<&str>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        cells.push(line.split(',').map(str::trim).collect());
    }
    if cells.is_empty() {
        bail!("CSV matrix is empty");
    }
    let cols = cells[0].len();
    if let Some(bad) = cells.iter().find(|row| row.len() != cols) {
        bail!("ragged CSV: expected {cols} columns, found a row with {}", bad.len());
    }
    let any_rational = cells.iter().flatten().any(|c| c.contains('/'));
    let exact = match force {
        Some(Encoding::Rational) => true,
        Some(Encoding::Float) => false,
        None => any_rational,
    };
    if exact {
        let mut values = Vec::with_capacity(cells.len() * cols);
        for cell in cells.iter().flatten() {
            values.push(if cell.contains('/') {
                parse_rational(cell)?
            } else if cell.contains('.') || cell.contains('e') || cell.contains('E') {
                let x: f64 = cell.parse().with_context(|| format!("CSV cell `{cell}`"))?;
                <Rational as Scalar>::from_f64(x)
            } else {
                let n: i64 = cell.parse().with_context(|| format!("CSV cell `{cell}`"))?;
                Rational::from_int(n)
            });
        }
        check_nonnegative_rational(&values)?;
        Ok(AnyMatrix::Rational(Mat::new(cells.len(), cols, values).map_err(|e| anyhow!("{e}"))?))
    } else {
        let mut values = Vec::with_capacity(cells.len() * cols);
        for cell in cells.iter().flatten() {
            values.push(if cell.contains('/') {
                Scalar::to_f64(&parse_rational(cell)?)
            } else {
                cell.parse::<f64>().with_context(|| format!("CSV cell `{cell}`"))?
            });
        }
        check_nonnegative_f64(&values)?;
        Ok(AnyMatrix::Float(Mat::new(cells.len(), cols, values).map_err(|e| anyhow!("{e}"))?))
    }
}

// ---------------------------------------------------------------------------
// Factorizations

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorizationFile {
    pub r: usize,
    pub pairs: Vec<FactorPairFile>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorPairFile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn factorization_to_file(fact: &NnFactorization) -> FactorizationFile {
    FactorizationFile {
        r: fact.r,
        pairs: fact
            .pairs
            .iter()
            .map(|p| FactorPairFile { x: p.x.clone(), y: p.y.clone() })
            .collect(),
        residual: fact.residual,
    }
}

pub fn factorization_from_file(file: &FactorizationFile) -> NnFactorization {
    NnFactorization {
        r: file.r,
        pairs: file
            .pairs
            .iter()
            .map(|p| FactorPair { x: p.x.clone(), y: p.y.clone() })
            .collect(),
        residual: file.residual,
    }
}

/// PSD factorization: `r×r` symmetric matrices row-major, one per row
/// index (`E`) and per column index (`F`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PsdFactorizationFile {
    pub r: usize,
    #[serde(rename = "E")]
    pub e: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<Vec<f64>>>,
}

pub fn psd_factorization_from_file(file: &PsdFactorizationFile) -> Result<PsdFactorization> {
    let to_mats = |blocks: &[Vec<Vec<f64>>]| -> Result<Vec<Mat<f64>>> {
        blocks
            .iter()
            .map(|rows| Mat::from_rows(rows).map_err(|e| anyhow!("bad factor shape: {e}")))
            .collect()
    };
    Ok(PsdFactorization { r: file.r, e_factors: to_mats(&file.e)?, f_factors: to_mats(&file.f)? })
}

pub fn psd_factorization_to_file(fact: &PsdFactorization) -> PsdFactorizationFile {
    let to_rows = |mats: &[Mat<f64>]| {
        mats.iter()
            .map(|m| (0..m.rows()).map(|r| m.row(r).to_vec()).collect())
            .collect()
    };
    PsdFactorizationFile {
        r: fact.r,
        e: to_rows(&fact.e_factors),
        f: to_rows(&fact.f_factors),
    }
}

// ---------------------------------------------------------------------------
// Protocols

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProtocolFile {
    Seed { seed: Vec<f64>, encoders: SeedEncoders },
    Message { encoders: MessageEncoders },
    Hybrid { seed: Vec<f64>, encoders: HybridEncoders },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SeedEncoders {
    /// Row per seed value: distribution of X.
    pub alice: Vec<Vec<f64>>,
    /// Row per seed value: distribution of Y.
    pub bob: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MessageEncoders {
    /// Distribution of X.
    pub alice: Vec<f64>,
    /// Row per x: distribution of the message.
    pub channel: Vec<Vec<f64>>,
    /// Row per message: distribution of Y.
    pub bob: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HybridEncoders {
    /// Row per z1: distribution of X.
    pub alice: Vec<Vec<f64>>,
    /// `channel[z1]` row per x: distribution of the message z2.
    pub channel: Vec<Vec<Vec<f64>>>,
    /// `bob[z1]` row per z2: distribution of Y.
    pub bob: Vec<Vec<Vec<f64>>>,
}

pub enum AnyProtocol {
    Seed(SeedProtocol),
    Message(MessageProtocol),
    Hybrid(HybridProtocol),
}

pub fn parse_protocol(text: &str) -> Result<AnyProtocol> {
    let file: ProtocolFile = serde_json::from_str(text).context("parsing protocol JSON")?;
    let mat = |rows: &[Vec<f64>]| Mat::from_rows(rows).map_err(|e| anyhow!("{e}"));
    match file {
        ProtocolFile::Seed { seed, encoders } => {
            let p = SeedProtocol::new(seed, mat(&encoders.alice)?, mat(&encoders.bob)?)
                .map_err(|e| anyhow!("invalid seed protocol: {e}"))?;
            Ok(AnyProtocol::Seed(p))
        }
        ProtocolFile::Message { encoders } => {
            let p = MessageProtocol::new(
                encoders.alice,
                mat(&encoders.channel)?,
                mat(&encoders.bob)?,
            )
            .map_err(|e| anyhow!("invalid message protocol: {e}"))?;
            Ok(AnyProtocol::Message(p))
        }
        ProtocolFile::Hybrid { seed, encoders } => {
            let channels =
                encoders.channel.iter().map(|c| mat(c)).collect::<Result<Vec<_>>>()?;
            let decoders = encoders.bob.iter().map(|d| mat(d)).collect::<Result<Vec<_>>>()?;
            let p = HybridProtocol::new(seed, mat(&encoders.alice)?, channels, decoders)
                .map_err(|e| anyhow!("invalid hybrid protocol: {e}"))?;
            Ok(AnyProtocol::Hybrid(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip() {
        let text = r#"{"variables":[{"name":"X","cardinality":3,"observed":true},
                        {"name":"Y","cardinality":3,"observed":true},
                        {"name":"Z","cardinality":4,"observed":false}],
                       "edges":[["Z","X"],["Z","Y"]]}"#;
        let graph = parse_graph(text).unwrap();
        assert_eq!(graph.len(), 3);
        let file = graph_to_file(&graph);
        assert_eq!(file.edges.len(), 2);
        let dot = graph_to_dot(&graph);
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("\"Z\" -> \"X\""));
    }

    #[test]
    fn rational_distribution_parses_exactly() {
        let text = r#"{"axes":[{"name":"X","cardinality":3},{"name":"Y","cardinality":3}],
                       "values":["0","1/6","1/6","1/6","0","1/6","1/6","1/6","0"],
                       "encoding":"rational"}"#;
        let dist = parse_distribution(text, None).unwrap();
        match dist {
            AnyDistribution::Rational(d) => {
                assert_eq!(*d.prob(&[0, 1]), Rational::from_ratio(1, 6));
            }
            AnyDistribution::Float(_) => panic!("expected rational backend"),
        }
    }

    #[test]
    fn float_distribution_parses() {
        let text = r#"{"axes":[{"name":"A","cardinality":2},{"name":"B","cardinality":2}],
                       "values":[0.25,0.25,0.25,0.25],"encoding":"float"}"#;
        match parse_distribution(text, None).unwrap() {
            AnyDistribution::Float(d) => assert_eq!(d.values(), &[0.25; 4]),
            AnyDistribution::Rational(_) => panic!("expected float backend"),
        }
    }

    #[test]
    fn arith_override_wins() {
        let text = r#"{"axes":[{"name":"A","cardinality":2},{"name":"B","cardinality":2}],
                       "values":[0.25,0.25,0.25,0.25],"encoding":"float"}"#;
        assert!(matches!(
            parse_distribution(text, Some(Encoding::Rational)).unwrap(),
            AnyDistribution::Rational(_)
        ));
    }

    #[test]
    fn csv_matrix_with_rationals_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "0, 1/6, 1/6\n1/6, 0, 1/6\n1/6, 1/6, 0\n").unwrap();
        match parse_matrix(&path, None).unwrap() {
            AnyMatrix::Rational(m) => {
                assert_eq!((m.rows(), m.cols()), (3, 3));
                assert_eq!(*m.at(0, 1), Rational::from_ratio(1, 6));
            }
            AnyMatrix::Float(_) => panic!("expected exact parse"),
        }
        let plain = dir.path().join("p.csv");
        std::fs::write(&plain, "0.5,0.5\n0.25,0.75\n").unwrap();
        assert!(matches!(parse_matrix(&plain, None).unwrap(), AnyMatrix::Float(_)));
    }

    #[test]
    fn protocol_files_parse() {
        let seed = r#"{"type":"seed","seed":[0.5,0.5],
                       "encoders":{"alice":[[1,0],[0,1]],"bob":[[1,0],[0,1]]}}"#;
        assert!(matches!(parse_protocol(seed).unwrap(), AnyProtocol::Seed(_)));

        let message = r#"{"type":"message",
                          "encoders":{"alice":[0.5,0.5],
                                      "channel":[[1,0],[0,1]],
                                      "bob":[[0.9,0.1],[0.2,0.8]]}}"#;
        assert!(matches!(parse_protocol(message).unwrap(), AnyProtocol::Message(_)));

        let hybrid = r#"{"type":"hybrid","seed":[1.0],
                         "encoders":{"alice":[[0.4,0.6]],
                                     "channel":[[[1.0],[1.0]]],
                                     "bob":[[[0.3,0.7]]]}}"#;
        assert!(matches!(parse_protocol(hybrid).unwrap(), AnyProtocol::Hybrid(_)));
    }

    #[test]
    fn psd_factorization_roundtrip() {
        let file = PsdFactorizationFile {
            r: 2,
            e: vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]],
            f: vec![vec![vec![0.5, 0.0], vec![0.0, 0.5]]],
        };
        let fact = psd_factorization_from_file(&file).unwrap();
        assert_eq!(psd_factorization_to_file(&fact), file);
    }
}
