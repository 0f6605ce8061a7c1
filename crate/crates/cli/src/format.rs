//! Instance and trace files: JSON with 1-based ids and exact `p/q` strings.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uncrossing::functions::{
    make_deficiency, make_indicator, make_requirement, make_table, FunctionError, FunctionOracle, OracleKind,
    RequirementMatrix,
};
use uncrossing::game::{BlueChoice, RedMove, TraceRecord};
use uncrossing::ground::{Bipartition, Family, GroundError, GroundSet, PairChoice, Subset};
use uncrossing::lp::{CutCoveringInstance, LpError};
use uncrossing::redstrategy::StrategySnapshot;
use uncrossing::uncross::{DualSolution, UncrossError};
use uncrossing::Rational;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid rational {0:?}")]
    Rational(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Uncross(#[from] UncrossError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: message.strip_suffix(&suffix).unwrap_or(&message).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub ground_set_size: usize,
    pub function: FunctionSpec,
    #[serde(default)]
    pub family: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<WeightedSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp: Option<LpSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Unlisted bipartitions are 0.
    Table { entries: Vec<TableEntry> },
    /// Upper-triangle entries `i < j`; unlisted pairs are 0.
    Requirement { entries: Vec<RequirementEntry> },
    Deficiency { edges: Vec<[usize; 2]>, target: u64 },
    Indicator { family: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub set: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementEntry {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedSet {
    pub set: Vec<usize>,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpSpec {
    pub edges: Vec<[usize; 2]>,
    pub costs: Vec<String>,
}

/// Parsed and validated instance.
#[derive(Debug)]
pub struct Instance {
    pub ground: GroundSet,
    pub f: FunctionOracle,
    pub family: Family,
    pub dual: Option<DualSolution>,
    pub lp: Option<CutCoveringInstance>,
}

pub fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| FormatError::Rational(s.to_string()))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn ids(b: &Bipartition) -> Vec<usize> {
    b.side().ids()
}

pub fn family_ids(f: &Family) -> Vec<Vec<usize>> {
    f.iter().map(ids).collect()
}

pub fn dual_records(lam: &DualSolution) -> Vec<WeightedSet> {
    lam.iter()
        .map(|(b, w)| WeightedSet {
            set: ids(b),
            weight: format_rational(w),
        })
        .collect()
}

/// Describes an oracle in file form. Table entries come out in canonical order.
pub fn function_spec(f: &FunctionOracle) -> FunctionSpec {
    let ground = f.ground();
    match f.kind() {
        OracleKind::Table(t) => {
            let mut keys: Vec<u64> = t.keys().copied().collect();
            keys.sort_by(|a, b| uncrossing::ground::lex_cmp(*a, *b));
            FunctionSpec::Table {
                entries: keys
                    .into_iter()
                    .map(|k| TableEntry {
                        set: Subset::from_bits(k, ground).ids(),
                        value: format_rational(&t[&k]),
                    })
                    .collect(),
            }
        }
        OracleKind::Requirement(r) => FunctionSpec::Requirement {
            entries: r
                .entries()
                .into_iter()
                .map(|(i, j, v)| RequirementEntry {
                    i,
                    j,
                    value: format_rational(&v),
                })
                .collect(),
        },
        OracleKind::Deficiency { edges, target } => FunctionSpec::Deficiency {
            edges: edges.iter().map(|&(u, v)| [u, v]).collect(),
            target: *target,
        },
        OracleKind::Indicator(set) => {
            let mut keys: Vec<u64> = set.iter().copied().collect();
            keys.sort_by(|a, b| uncrossing::ground::lex_cmp(*a, *b));
            FunctionSpec::Indicator {
                family: keys.into_iter().map(|k| Subset::from_bits(k, ground).ids()).collect(),
            }
        }
    }
}

fn bipartition(set: &[usize], ground: GroundSet) -> Result<Bipartition, FormatError> {
    Ok(Bipartition::from_ids(set, ground)?)
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Builds the module types. The oracle is not verified here.
    pub fn build(&self) -> Result<Instance, FormatError> {
        let ground = GroundSet::new(self.ground_set_size)?;
        let f = self.build_function(ground)?;
        let family = Family::from_id_sets(ground, &self.family)?;
        let dual = match &self.dual {
            None => None,
            Some(items) => {
                let mut pairs = Vec::with_capacity(items.len());
                for w in items {
                    pairs.push((bipartition(&w.set, ground)?, parse_rational(&w.weight)?));
                }
                Some(DualSolution::new(ground, pairs)?)
            }
        };
        let lp = match &self.lp {
            None => None,
            Some(spec) => {
                let costs = spec
                    .costs
                    .iter()
                    .map(|c| parse_rational(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let edges = spec.edges.iter().map(|e| (e[0], e[1])).collect();
                Some(CutCoveringInstance::new(ground, edges, costs, self.build_function(ground)?)?)
            }
        };
        Ok(Instance {
            ground,
            f,
            family,
            dual,
            lp,
        })
    }

    fn build_function(&self, ground: GroundSet) -> Result<FunctionOracle, FormatError> {
        let n = ground.size();
        Ok(match &self.function {
            FunctionSpec::Table { entries } => {
                let mut values = Vec::with_capacity(entries.len());
                for e in entries {
                    values.push((Subset::from_ids(&e.set, ground)?, parse_rational(&e.value)?));
                }
                make_table(values, ground, false)?
            }
            FunctionSpec::Requirement { entries } => {
                let mut r = RequirementMatrix::zeros(n);
                for e in entries {
                    if e.i == 0 || e.j == 0 || e.i > n || e.j > n || e.i == e.j {
                        return Err(FormatError::Invalid(format!(
                            "requirement entry ({}, {}) is outside the ground set or on the diagonal",
                            e.i, e.j
                        )));
                    }
                    r.set(e.i, e.j, parse_rational(&e.value)?);
                }
                make_requirement(r, ground)?
            }
            FunctionSpec::Deficiency { edges, target } => {
                make_deficiency(edges.iter().map(|e| (e[0], e[1])).collect(), *target, ground)?
            }
            FunctionSpec::Indicator { family } => {
                let fam = Family::from_id_sets(ground, family)?;
                make_indicator(&fam, ground, false)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub records: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub pair_choice: String,
    pub returned: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDump>,
}

/// Red's internal state before the move, in verbose traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDump {
    pub phase: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atom_order: Vec<Vec<usize>>,
}

impl From<&StrategySnapshot> for StateDump {
    fn from(s: &StrategySnapshot) -> Self {
        StateDump {
            phase: s.phase.name().to_string(),
            branch: s.branch.map(|b| b.label().to_string()),
            d: s.d,
            k: s.k,
            atom_order: s.atom_order.clone(),
        }
    }
}

pub fn trace_entry(rec: &TraceRecord) -> TraceEntry {
    TraceEntry {
        x: ids(&rec.red.x),
        y: ids(&rec.red.y),
        pair_choice: rec.red.pair.name().to_string(),
        returned: rec.blue.name().to_string(),
        state: None,
    }
}

impl TraceFile {
    pub fn from_records(trace: &[TraceRecord]) -> Self {
        TraceFile {
            records: trace.iter().map(trace_entry).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn to_records(&self, ground: GroundSet) -> Result<Vec<TraceRecord>, FormatError> {
        self.records
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let pair = PairChoice::parse(&e.pair_choice).ok_or_else(|| {
                    FormatError::Invalid(format!("record {i}: unknown pair_choice {:?}", e.pair_choice))
                })?;
                let blue = BlueChoice::parse(&e.returned)
                    .ok_or_else(|| FormatError::Invalid(format!("record {i}: unknown returned {:?}", e.returned)))?;
                Ok(TraceRecord {
                    red: RedMove {
                        x: bipartition(&e.x, ground)?,
                        y: bipartition(&e.y, ground)?,
                        pair,
                    },
                    blue,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "ground_set_size": 4,
        "function": {"kind": "requirement", "entries": [{"i": 1, "j": 3, "value": "2"}, {"i": 2, "j": 4, "value": "1/2"}]},
        "family": [[1, 2], [2, 3]],
        "dual": [{"set": [1, 2], "weight": "3/2"}, {"set": [3, 4], "weight": "1"}],
        "lp": {"edges": [[1, 2], [2, 3], [3, 4], [4, 1]], "costs": ["1", "2", "1", "2"]}
    }"#;

    #[test]
    fn sample_builds() {
        let file = InstanceFile::parse(SAMPLE).unwrap();
        let inst = file.build().unwrap();
        assert_eq!(inst.ground.size(), 4);
        assert_eq!(inst.family.len(), 2);
        let dual = inst.dual.unwrap();
        // {1,2} and {3,4} are the same bipartition
        assert_eq!(dual.len(), 1);
        assert_eq!(dual.iter().next().unwrap().1, &"5/2".parse::<Rational>().unwrap());
        assert_eq!(inst.lp.unwrap().edges.len(), 4);
    }

    #[test]
    fn round_trip() {
        let file = InstanceFile::parse(SAMPLE).unwrap();
        let again = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(file, again);
    }

    #[test]
    fn function_spec_round_trips_through_oracle() {
        let file = InstanceFile::parse(SAMPLE).unwrap();
        let inst = file.build().unwrap();
        assert_eq!(function_spec(&inst.f), file.function);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = InstanceFile::parse("{\n  \"ground_set_size\": 4,\n  oops\n}").unwrap_err();
        match err {
            FormatError::Json { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_values() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational("-6/4").unwrap(), "-3/2".parse::<Rational>().unwrap());
        let bad = SAMPLE.replace("\"weight\": \"1\"", "\"weight\": \"one\"");
        assert!(matches!(
            InstanceFile::parse(&bad).unwrap().build(),
            Err(FormatError::Rational(_))
        ));
        let bad = SAMPLE.replace("[2, 3]]", "[2, 9]]");
        assert!(InstanceFile::parse(&bad).unwrap().build().is_err());
    }

    #[test]
    fn unknown_kind_rejected() {
        let bad = SAMPLE.replace("requirement", "banana");
        assert!(matches!(InstanceFile::parse(&bad), Err(FormatError::Json { .. })));
    }

    #[test]
    fn trace_round_trip() {
        let ground = GroundSet::new(4).unwrap();
        let x = Bipartition::from_ids(&[1, 2], ground).unwrap();
        let y = Bipartition::from_ids(&[1, 3], ground).unwrap();
        let recs = vec![TraceRecord {
            red: RedMove {
                x,
                y,
                pair: PairChoice::DiffPair,
            },
            blue: BlueChoice::Y,
        }];
        let file = TraceFile::from_records(&recs);
        let text = file.to_json();
        assert!(text.contains("\"returned\": \"y\""));
        let back = TraceFile::parse(&text).unwrap().to_records(ground).unwrap();
        assert_eq!(back, recs);
    }
}
