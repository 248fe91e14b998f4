//! JSON formats. Elements are 1-based in every file; rationals are written
//! as `"p/q"` strings (plain integers when the denominator is 1) and read
//! from integers, decimals, exponent notation or `"p/q"`.

use std::collections::{BTreeMap, HashSet};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::cov2::{StrongCertificate, TwoCoverageCertificate, TwoCoverageWitness};
use crate::entropy::JointDistribution;
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::poly::Polynomial;
use crate::rational::{self, Rational};
use crate::setfn::{CoverageInstance, CoverageWeights, SetFunctionTable};
use crate::subset::{subsets_up_to, Subset, MAX_GROUND};

fn number(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => rational::parse(&n.to_string()),
        Value::String(s) => rational::parse(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn subset_from_labels(labels: &[usize], n: usize) -> Result<Subset> {
    let mut s = Subset::EMPTY;
    for &l in labels {
        if l == 0 || l > n {
            return Err(Error::Parse(format!("element {l} outside 1..={n}")));
        }
        s = s.with(l - 1);
    }
    Ok(s)
}

fn check_ground(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::CapExceeded {
            what: "ground set",
            got: n,
            cap: MAX_GROUND,
        });
    }
    Ok(())
}

fn subset_key(s: Subset) -> String {
    s.to_string()
}

fn parse_subset_key(key: &str, n: usize) -> Result<Subset> {
    let labels: Vec<usize> = serde_json::from_str(key).map_err(|e| Error::Parse(format!("subset key {key}: {e}")))?;
    subset_from_labels(&labels, n)
}

#[derive(Deserialize)]
struct SetFunctionJson {
    n: usize,
    #[serde(default)]
    entries: Vec<EntryJson>,
}

#[derive(Deserialize)]
struct EntryJson {
    set: Vec<usize>,
    value: Value,
}

/// `{"n":3,"entries":[{"set":[1,2],"value":"2"}]}`; missing sets are 0.
pub fn parse_set_function(text: &str) -> Result<SetFunctionTable> {
    let raw: SetFunctionJson = serde_json::from_str(text)?;
    check_ground(raw.n)?;
    let mut values: Vec<Option<Rational>> = vec![None; 1 << raw.n];
    for e in raw.entries {
        let s = subset_from_labels(&e.set, raw.n)?;
        let v = number(&e.value)?;
        if values[s.index()].replace(v).is_some() {
            return Err(Error::Parse(format!("set {s} listed twice")));
        }
    }
    SetFunctionTable::new(raw.n, values.into_iter().map(Option::unwrap_or_default).collect())
}

/// Nonzero entries, by size then lexicographically.
pub fn set_function_json(f: &SetFunctionTable) -> Value {
    let entries: Vec<Value> = subsets_up_to(f.ground(), f.n())
        .into_iter()
        .filter(|s| !num_traits::Zero::is_zero(f.get(*s)))
        .map(|s| json!({"set": s, "value": rational_value(f.get(s))}))
        .collect();
    json!({"n": f.n(), "entries": entries})
}

#[derive(Deserialize)]
struct CoverageJson {
    universe: Vec<UniverseJson>,
    sets: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct UniverseJson {
    id: String,
    weight: Value,
}

/// `{"universe":[{"id":"a","weight":"1"}],"sets":[["a"],["a","b"]]}`.
pub fn parse_coverage(text: &str) -> Result<CoverageInstance> {
    let raw: CoverageJson = serde_json::from_str(text)?;
    let universe = raw
        .universe
        .into_iter()
        .map(|u| Ok((u.id, number(&u.weight)?)))
        .collect::<Result<Vec<_>>>()?;
    CoverageInstance::new(universe, raw.sets)
}

pub fn coverage_json(g: &CoverageInstance) -> Value {
    let ids: Vec<&str> = g.universe().map(|(id, _)| id).collect();
    let universe: Vec<Value> = g
        .universe()
        .map(|(id, w)| json!({"id": id, "weight": rational_value(w)}))
        .collect();
    let sets: Vec<Vec<&str>> = g.sets().iter().map(|s| s.iter().map(|&u| ids[u]).collect()).collect();
    json!({"universe": universe, "sets": sets})
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MatroidJson {
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Uniform {
        r: usize,
        n: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    Explicit {
        n: usize,
        independent: Vec<Vec<usize>>,
    },
}

/// Graphic (1-based vertices), uniform, partition or explicit matroids.
pub fn parse_matroid(text: &str) -> Result<Matroid> {
    match serde_json::from_str(text)? {
        MatroidJson::Graphic { vertices, edges } => {
            let edges = edges
                .into_iter()
                .map(|(a, b)| {
                    if a == 0 || b == 0 || a > vertices || b > vertices {
                        return Err(Error::Parse(format!("edge ({a},{b}) outside 1..={vertices}")));
                    }
                    Ok((a - 1, b - 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Matroid::graphic(vertices, edges)
        }
        MatroidJson::Uniform { r, n } => Matroid::uniform(r, n),
        MatroidJson::Partition { blocks, caps } => {
            let n = blocks.iter().map(Vec::len).sum();
            check_ground(n)?;
            let blocks = blocks
                .iter()
                .map(|b| subset_from_labels(b, n))
                .collect::<Result<Vec<_>>>()?;
            Matroid::partition(n, blocks, caps)
        }
        MatroidJson::Explicit { n, independent } => {
            check_ground(n)?;
            let family = independent
                .iter()
                .map(|s| subset_from_labels(s, n))
                .collect::<Result<HashSet<_>>>()?;
            Matroid::explicit(n, family)
        }
    }
}

#[derive(Deserialize)]
struct PolynomialJson {
    n: usize,
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
struct TermJson {
    #[serde(default)]
    y: u32,
    set: Vec<usize>,
    coeff: Value,
}

/// `{"n":3,"terms":[{"y":0,"set":[1,2],"coeff":"3"}]}`. The polynomial has a
/// `y` variable when some term carries a positive power of it.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let raw: PolynomialJson = serde_json::from_str(text)?;
    check_ground(raw.n)?;
    let has_y = raw.terms.iter().any(|t| t.y > 0);
    let terms = raw
        .terms
        .iter()
        .map(|t| Ok((t.y, subset_from_labels(&t.set, raw.n)?, number(&t.coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    Polynomial::from_terms(raw.n, has_y, terms)
}

pub fn polynomial_json(p: &Polynomial) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!({"y": m.y, "set": m.x, "coeff": rational_value(c)}))
        .collect();
    json!({"n": p.n(), "terms": terms})
}

#[derive(Deserialize)]
struct JointJson {
    alphabets: Vec<usize>,
    pmf: Vec<OutcomeJson>,
}

#[derive(Deserialize)]
struct OutcomeJson {
    outcome: Vec<usize>,
    p: Value,
}

/// `{"alphabets":[2,2],"pmf":[{"outcome":[0,1],"p":0.5}]}`; outcomes are 0-based symbols.
pub fn parse_joint(text: &str) -> Result<JointDistribution> {
    let raw: JointJson = serde_json::from_str(text)?;
    let pmf = raw
        .pmf
        .into_iter()
        .map(|o| {
            let p = match &o.p {
                Value::Number(x) => x.as_f64(),
                Value::String(s) => s
                    .parse::<f64>()
                    .ok()
                    .or_else(|| rational::parse(s).ok().map(|r| rational::to_f64(&r))),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("probability {}", o.p)))?;
            Ok((o.outcome, p))
        })
        .collect::<Result<Vec<_>>>()?;
    JointDistribution::new(raw.alphabets, pmf)
}

fn weights_json(g: &CoverageWeights) -> Value {
    Value::Object(
        g.weights
            .iter()
            .map(|(t, x)| (subset_key(*t), rational_value(x)))
            .collect::<Map<_, _>>(),
    )
}

fn parse_weights(v: &Value, n: usize) -> Result<CoverageWeights> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("weights must be an object".into()))?;
    let mut g = CoverageWeights::new(n);
    for (k, x) in obj {
        g.insert(parse_subset_key(k, n)?, number(x)?);
    }
    Ok(g)
}

/// `{"d":2,"witnesses":[{"tau":[1],"S":[2,3],"g":{"[2,3]":"1"},"l":{"2":"1","3":"1"}}]}`.
pub fn two_cov_json(cert: &TwoCoverageCertificate) -> Value {
    let witnesses: Vec<Value> = cert
        .witnesses
        .iter()
        .map(|(tau, w)| {
            let l: Map<String, Value> =
                w.l.iter()
                    .map(|(i, v)| ((i + 1).to_string(), rational_value(v)))
                    .collect();
            json!({"tau": tau, "S": w.s, "g": weights_json(&w.g), "l": l})
        })
        .collect();
    json!({"d": cert.d, "witnesses": witnesses})
}

#[derive(Deserialize)]
struct TwoCovJson {
    d: usize,
    witnesses: Vec<TwoCovWitnessJson>,
}

#[derive(Deserialize)]
struct TwoCovWitnessJson {
    tau: Vec<usize>,
    #[serde(rename = "S")]
    s: Vec<usize>,
    g: Value,
    #[serde(default)]
    l: BTreeMap<String, Value>,
}

pub fn parse_two_cov(text: &str, n: usize) -> Result<TwoCoverageCertificate> {
    let raw: TwoCovJson = serde_json::from_str(text)?;
    let mut witnesses = BTreeMap::new();
    for w in raw.witnesses {
        let tau = subset_from_labels(&w.tau, n)?;
        let mut l = BTreeMap::new();
        for (k, v) in &w.l {
            let i: usize = k.parse().map_err(|_| Error::Parse(format!("element key {k}")))?;
            let e = subset_from_labels(&[i], n)?;
            l.insert(e.min_element().expect("singleton"), number(v)?);
        }
        let witness = TwoCoverageWitness {
            s: subset_from_labels(&w.s, n)?,
            g: parse_weights(&w.g, n)?,
            l,
        };
        if witnesses.insert(tau, witness).is_some() {
            return Err(Error::Parse(format!("tau {tau} listed twice")));
        }
    }
    Ok(TwoCoverageCertificate { d: raw.d, witnesses })
}

/// `{"n":3,"witnesses":[{"tau":[1],"g":{"[2,3]":"1"}}]}`.
pub fn strong_json(cert: &StrongCertificate) -> Value {
    let witnesses: Vec<Value> = cert
        .witnesses
        .iter()
        .map(|(tau, g)| json!({"tau": tau, "g": weights_json(g)}))
        .collect();
    json!({"n": cert.n, "witnesses": witnesses})
}

#[derive(Deserialize)]
struct StrongJson {
    n: usize,
    witnesses: Vec<StrongWitnessJson>,
}

#[derive(Deserialize)]
struct StrongWitnessJson {
    tau: Vec<usize>,
    g: Value,
}

pub fn parse_strong(text: &str) -> Result<StrongCertificate> {
    let raw: StrongJson = serde_json::from_str(text)?;
    check_ground(raw.n)?;
    let mut witnesses = BTreeMap::new();
    for w in raw.witnesses {
        let tau = subset_from_labels(&w.tau, raw.n)?;
        if witnesses.insert(tau, parse_weights(&w.g, raw.n)?).is_some() {
            return Err(Error::Parse(format!("tau {tau} listed twice")));
        }
    }
    Ok(StrongCertificate { n: raw.n, witnesses })
}

pub fn coverage_weights_json(g: &CoverageWeights) -> Value {
    weights_json(g)
}
