//! JSON shapes of every command's output. Field order is the declaration
//! order, so emitting, parsing and re-emitting is byte-identical.

use std::fmt::Display;
use std::str::FromStr;

use looptop_core::cobar::{TorsionPolicy, VerificationReport};
use looptop_core::linalg::ZMatrix;
use looptop_core::spaces::{DecompositionReport, MooreReport, SpaceModel};
use serde::{Deserialize, Serialize};
use serde_json::Number;

fn number(v: impl Display) -> Number {
    Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

fn matrix_json(m: &ZMatrix) -> Vec<Vec<Number>> {
    m.to_rows().iter().map(|row| row.iter().map(number).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub kind: String,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<Number>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factors: Option<Vec<[u32; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signs: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<i64>,
}

impl SpaceJson {
    pub fn new(s: &SpaceModel) -> Self {
        let mut out = SpaceJson {
            kind: String::new(),
            text: crate::space::space_string(s),
            n: None,
            r: None,
            matrix: None,
            factors: None,
            signs: None,
            m: None,
        };
        match s {
            SpaceModel::Manifold { n, r, .. } => {
                out.kind = "manifold".into();
                out.n = Some(*n);
                out.r = Some(*r);
                out.matrix = s.intersection_matrix().ok().map(|m| matrix_json(&m));
            }
            SpaceModel::ConnectedSum { factors, signs } => {
                out.kind = "connected-sum".into();
                out.factors = Some(factors.iter().map(|&(p, q)| [p, q]).collect());
                out.signs = Some(signs.clone());
            }
            SpaceModel::TwoCellComplex { n, r, q } => {
                out.kind = "cw".into();
                out.n = Some(*n);
                out.r = Some(*r);
                out.matrix = Some(matrix_json(q));
            }
            SpaceModel::BettiOne { n, m } => {
                out.kind = "betti-one".into();
                out.n = Some(*n);
                out.m = Some(*m);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandJson {
    pub sphere_dim: u32,
    pub multiplicity: u128,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthJson {
    pub surd: [i64; 3],
    pub decimal: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MooreJson {
    pub verdict: String,
    pub justification: String,
    pub caveat: Option<String>,
}

impl From<&MooreReport> for MooreJson {
    fn from(m: &MooreReport) -> Self {
        MooreJson { verdict: m.verdict.as_str().into(), justification: m.justification.clone(), caveat: m.caveat.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub space: SpaceJson,
    pub max_dimension: u32,
    pub inverted_primes: Vec<Number>,
    pub summands: Vec<SummandJson>,
    pub classification: String,
    pub growth_rate: Option<GrowthJson>,
    pub loop_decomposition: String,
    pub moore: MooreJson,
    pub notes: Vec<String>,
}

pub const GROWTH_DIGITS: u32 = 6;

impl ReportJson {
    pub fn new(space: &SpaceModel, r: &DecompositionReport) -> Self {
        ReportJson {
            space: SpaceJson::new(space),
            max_dimension: r.max_dimension,
            inverted_primes: r.inverted_primes.iter().map(number).collect(),
            summands: r
                .summands
                .iter()
                .map(|s| SummandJson { sphere_dim: s.sphere_dim, multiplicity: s.multiplicity, witnesses: s.witnesses.clone() })
                .collect(),
            classification: r.classification.as_str().into(),
            growth_rate: r.growth.as_ref().map(|g| GrowthJson { surd: [g.a, g.s, g.c], decimal: g.decimal(GROWTH_DIGITS) }),
            loop_decomposition: r.loop_decomposition.clone(),
            moore: (&r.moore).into(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MooreOutput {
    pub space: SpaceJson,
    pub classification: String,
    pub moore: MooreJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRowJson {
    pub degree: u32,
    pub rank: u64,
    pub predicted: Option<u128>,
    pub torsion: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub space: SpaceJson,
    pub max_degree: u32,
    pub cells: usize,
    pub rows: Vec<VerifyRowJson>,
    /// "none", "bad-primes" or "unconstrained".
    pub torsion_policy: String,
    pub allowed_torsion_primes: Vec<Number>,
    pub euler_weights: Vec<u32>,
    pub discrepancies: Vec<String>,
    pub passed: bool,
}

impl VerifyJson {
    pub fn new(space: &SpaceModel, max_degree: u32, v: &VerificationReport) -> Self {
        let (policy, primes) = match &v.torsion_policy {
            TorsionPolicy::None => ("none", Vec::new()),
            TorsionPolicy::OnlyPrimes(ps) => ("bad-primes", ps.iter().map(number).collect()),
            TorsionPolicy::Unconstrained => ("unconstrained", Vec::new()),
        };
        VerifyJson {
            space: SpaceJson::new(space),
            max_degree,
            cells: v.cells,
            rows: v
                .rows
                .iter()
                .filter(|r| r.degree <= max_degree)
                .map(|r| VerifyRowJson {
                    degree: r.degree,
                    rank: r.rank,
                    predicted: r.predicted,
                    torsion: r.torsion.iter().map(number).collect(),
                })
                .collect(),
            torsion_policy: policy.into(),
            allowed_torsion_primes: primes,
            euler_weights: v.euler_weights.clone(),
            discrepancies: v.discrepancies.clone(),
            passed: v.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertRowJson {
    pub degree: u32,
    pub series: Number,
    pub enumerated: Option<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertJson {
    pub space: SpaceJson,
    pub max_degree: u32,
    /// Where the series comes from: "one-relator" or "cobar-prediction".
    pub source: String,
    pub rows: Vec<HilbertRowJson>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieElementJson {
    pub lyndon: String,
    pub bracket: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieDegreeJson {
    pub degree: u32,
    pub elements: Vec<LieElementJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieBasisJson {
    pub space: SpaceJson,
    pub max_degree: u32,
    pub relation: String,
    pub degrees: Vec<LieDegreeJson>,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}
