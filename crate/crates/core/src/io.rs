//! File formats: instance JSON, point CSV, solution and coreset JSON.
//!
//! Files name clients and facilities by point index. Internally they are
//! addressed by position in [`Instance::clients`] / [`Instance::facilities`];
//! the conversions here translate between the two.

use std::collections::BTreeMap;
use std::io::Read;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coreset::{Coreset, CoresetMeta};
use crate::error::{Error, Result};
use crate::fair::FairnessSpec;
use crate::model::{Assignment, Instance, MetricSpace, Solution, Violation};

/// Significant digits kept for floats in emitted JSON.
pub const FLOAT_DIGITS: usize = 12;

/// Per-facility values, either keyed by point index or listed in the order
/// of `facilities`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PerFacility<T> {
    Map(BTreeMap<usize, T>),
    List(Vec<T>),
}

impl<'de, T: serde::de::DeserializeOwned> Deserialize<'de> for PerFacility<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match Value::deserialize(d)? {
            Value::Array(items) => items
                .into_iter()
                .map(serde_json::from_value)
                .collect::<std::result::Result<_, _>>()
                .map(PerFacility::List)
                .map_err(D::Error::custom),
            Value::Object(map) => map
                .into_iter()
                .map(|(k, v)| {
                    let key = k
                        .parse::<usize>()
                        .map_err(|_| D::Error::custom(format!("key {k:?} is not a point index")))?;
                    serde_json::from_value(v)
                        .map(|v| (key, v))
                        .map_err(D::Error::custom)
                })
                .collect::<std::result::Result<_, _>>()
                .map(PerFacility::Map),
            _ => Err(D::Error::custom(
                "expected an object keyed by point index or an array",
            )),
        }
    }
}

/// A rational written as a JSON number or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatioValue {
    Number(serde_json::Number),
    Text(String),
}

impl RatioValue {
    pub fn to_ratio(&self) -> Result<Ratio<u64>> {
        match self {
            RatioValue::Number(n) => parse_ratio(&n.to_string()),
            RatioValue::Text(t) => parse_ratio(t),
        }
    }

    pub fn from_ratio(r: Ratio<u64>) -> Self {
        if *r.denom() == 1 {
            RatioValue::Number((*r.numer()).into())
        } else {
            RatioValue::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `0.25`.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Parse(format!("invalid ratio {text:?}"));
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac_value: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let denom = 10u64.pow(frac.len() as u32);
    let numer = int
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac_value))
        .ok_or_else(bad)?;
    Ok(Ratio::new(numer, denom))
}

/// On-disk instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub clients: Vec<usize>,
    pub facilities: Vec<usize>,
    pub capacities: PerFacility<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opening_costs: Option<PerFacility<f64>>,
    pub k: usize,
    pub m: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    /// Group label to client point indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<BTreeMap<usize, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<RatioValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<RatioValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_vec: Option<Vec<u64>>,
}

/// An instance with its optional fairness constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub fairness: Option<FairnessSpec>,
}

fn per_facility<T: Copy + Default>(
    values: &PerFacility<T>,
    facilities: &[usize],
    field: &str,
) -> Result<Vec<T>> {
    match values {
        PerFacility::List(list) => {
            if list.len() != facilities.len() {
                return Err(Error::Parse(format!(
                    "{field}: {} values for {} facilities",
                    list.len(),
                    facilities.len()
                )));
            }
            Ok(list.clone())
        }
        PerFacility::Map(map) => {
            for p in map.keys() {
                if !facilities.contains(p) {
                    return Err(Error::Parse(format!(
                        "{field}: point {p} is not a facility"
                    )));
                }
            }
            Ok(facilities
                .iter()
                .map(|p| map.get(p).copied().unwrap_or_default())
                .collect())
        }
    }
}

fn point_positions(points: &[usize]) -> BTreeMap<usize, usize> {
    points.iter().enumerate().map(|(i, &p)| (p, i)).collect()
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<LoadedInstance> {
        let metric = match (self.points, self.matrix) {
            (Some(p), None) => MetricSpace::Points(p),
            (None, Some(m)) => MetricSpace::Matrix(m),
            _ => {
                return Err(Error::Parse(
                    "exactly one of \"points\" and \"matrix\" must be given".to_string(),
                ))
            }
        };
        let capacities = per_facility(&self.capacities, &self.facilities, "capacities")?;
        if let PerFacility::Map(map) = &self.capacities {
            if let Some(p) = self.facilities.iter().find(|p| !map.contains_key(p)) {
                return Err(Error::Parse(format!(
                    "capacities: no capacity for facility point {p}"
                )));
            }
        }
        let opening = match &self.opening_costs {
            Some(o) => per_facility(o, &self.facilities, "opening_costs")?,
            None => vec![0.0; self.facilities.len()],
        };
        let mut instance = Instance::new(
            metric,
            self.clients,
            self.facilities,
            capacities,
            self.k,
            self.m,
        )
        .with_opening_costs(opening);
        if let Some(z) = self.z {
            instance = instance.with_z(z);
        }
        instance.validate()?;
        let fairness = match self.groups {
            None => {
                if self.alpha.is_some() || self.beta.is_some() || self.m_vec.is_some() {
                    return Err(Error::Parse(
                        "alpha, beta and m_vec need \"groups\"".to_string(),
                    ));
                }
                None
            }
            Some(groups) => {
                let positions = point_positions(&instance.clients);
                let l = groups.len();
                let mut group_of = vec![usize::MAX; instance.n()];
                for (i, (&g, members)) in groups.iter().enumerate() {
                    if g != i {
                        return Err(Error::Parse(format!(
                            "groups: labels must be 0..{l}, found {g}"
                        )));
                    }
                    for p in members {
                        let c = *positions.get(p).ok_or_else(|| {
                            Error::Parse(format!("groups: point {p} in group {g} is not a client"))
                        })?;
                        if group_of[c] != usize::MAX {
                            return Err(Error::Parse(format!(
                                "groups: client point {p} is in two groups"
                            )));
                        }
                        group_of[c] = g;
                    }
                }
                if let Some(c) = group_of.iter().position(|&g| g == usize::MAX) {
                    return Err(Error::Parse(format!(
                        "groups: client point {} has no group",
                        instance.clients[c]
                    )));
                }
                let ratios = |v: Option<Vec<RatioValue>>,
                              name: &str,
                              default: u64|
                 -> Result<Vec<Ratio<u64>>> {
                    match v {
                        None => Ok(vec![Ratio::from_integer(default); l]),
                        Some(v) => v
                            .iter()
                            .map(|r| {
                                r.to_ratio()
                                    .map_err(|e| Error::Parse(format!("{name}: {e}")))
                            })
                            .collect(),
                    }
                };
                let spec = FairnessSpec {
                    group_of,
                    alpha: ratios(self.alpha, "alpha", 1)?,
                    beta: ratios(self.beta, "beta", 0)?,
                    m_vec: self
                        .m_vec
                        .ok_or_else(|| Error::Parse("groups given without m_vec".to_string()))?,
                };
                spec.validate(&instance)?;
                Some(spec)
            }
        };
        Ok(LoadedInstance { instance, fairness })
    }

    pub fn from_instance(instance: &Instance, fairness: Option<&FairnessSpec>) -> Self {
        let (points, matrix) = match &instance.metric {
            MetricSpace::Points(p) => (Some(p.clone()), None),
            MetricSpace::Matrix(m) => (None, Some(m.clone())),
        };
        let keyed = |values: &[u64]| {
            instance
                .facilities
                .iter()
                .copied()
                .zip(values.iter().copied())
                .collect()
        };
        let opening_costs = instance.has_opening_costs().then(|| {
            PerFacility::Map(
                instance
                    .facilities
                    .iter()
                    .copied()
                    .zip(instance.opening_costs.iter().copied())
                    .collect(),
            )
        });
        let mut file = InstanceFile {
            points,
            matrix,
            clients: instance.clients.clone(),
            facilities: instance.facilities.clone(),
            capacities: PerFacility::Map(keyed(&instance.capacities)),
            opening_costs,
            k: instance.k,
            m: instance.m,
            z: (instance.z != 1.0).then_some(instance.z),
            groups: None,
            alpha: None,
            beta: None,
            m_vec: None,
        };
        if let Some(spec) = fairness {
            let mut groups: BTreeMap<usize, Vec<usize>> =
                (0..spec.num_groups()).map(|g| (g, Vec::new())).collect();
            for (c, &g) in spec.group_of.iter().enumerate() {
                groups.entry(g).or_default().push(instance.clients[c]);
            }
            file.groups = Some(groups);
            file.alpha = Some(
                spec.alpha
                    .iter()
                    .copied()
                    .map(RatioValue::from_ratio)
                    .collect(),
            );
            file.beta = Some(
                spec.beta
                    .iter()
                    .copied()
                    .map(RatioValue::from_ratio)
                    .collect(),
            );
            file.m_vec = Some(spec.m_vec.clone());
        }
        file
    }
}

/// Reads an instance file; errors carry the line and column of the fault.
pub fn read_instance<R: Read>(reader: R) -> Result<LoadedInstance> {
    let file: InstanceFile = serde_json::from_reader(reader)?;
    file.into_instance()
}

pub fn parse_instance(text: &str) -> Result<LoadedInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_instance()
}

/// Point CSV: a header row, then one point per row. The `role` column is
/// `client`, `facility` or `both`; facility rows carry `capacity` and
/// optionally `opening_cost`; every other column is a coordinate.
pub fn read_points_csv<R: Read>(reader: R, k: usize, m: u64, z: f64) -> Result<Instance> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let role_col = col("role")
        .ok_or_else(|| Error::Parse("points csv: missing \"role\" column".to_string()))?;
    let cap_col = col("capacity");
    let open_col = col("opening_cost");
    let coords: Vec<usize> = (0..headers.len())
        .filter(|&i| i != role_col && Some(i) != cap_col && Some(i) != open_col)
        .collect();
    let mut points = Vec::new();
    let mut clients = Vec::new();
    let mut facilities = Vec::new();
    let mut capacities = Vec::new();
    let mut opening = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let number = |i: usize| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "points csv line {line}, column {:?}: not a number",
                    &headers[i]
                ))
            })
        };
        let point = points.len();
        points.push(
            coords
                .iter()
                .map(|&i| number(i))
                .collect::<Result<Vec<f64>>>()?,
        );
        let role = field(role_col).to_ascii_lowercase();
        let (is_client, is_facility) = match role.as_str() {
            "client" => (true, false),
            "facility" => (false, true),
            "both" => (true, true),
            other => {
                return Err(Error::Parse(format!(
                    "points csv line {line}: unknown role {other:?}"
                )))
            }
        };
        if is_client {
            clients.push(point);
        }
        if is_facility {
            let cap_col = cap_col.ok_or_else(|| {
                Error::Parse(format!(
                    "points csv line {line}: facility row needs a \"capacity\" column"
                ))
            })?;
            let cap = field(cap_col).parse::<u64>().map_err(|_| {
                Error::Parse(format!(
                    "points csv line {line}, column \"capacity\": not a nonnegative integer"
                ))
            })?;
            facilities.push(point);
            capacities.push(cap);
            opening.push(match open_col {
                Some(i) if !field(i).is_empty() => number(i)?,
                _ => 0.0,
            });
        }
    }
    let instance = Instance::new(
        MetricSpace::Points(points),
        clients,
        facilities,
        capacities,
        k,
        m,
    )
    .with_opening_costs(opening)
    .with_z(z);
    instance.validate()?;
    Ok(instance)
}

/// On-disk solution, in point indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub open: Vec<usize>,
    /// `(client point, facility point, amount)`.
    pub assignment: Vec<(usize, usize, u64)>,
    pub outliers: BTreeMap<usize, u64>,
    pub assignment_cost: f64,
    pub cost: f64,
    #[serde(default)]
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
}

impl SolutionFile {
    pub fn new(
        instance: &Instance,
        solution: &Solution,
        partial: bool,
        report: Option<Value>,
    ) -> Self {
        Self {
            open: solution
                .open
                .iter()
                .map(|&f| instance.facilities[f])
                .collect(),
            assignment: solution
                .assignment
                .iter()
                .map(|a| {
                    (
                        instance.clients[a.client],
                        instance.facilities[a.facility],
                        a.amount,
                    )
                })
                .collect(),
            outliers: solution
                .outliers
                .iter()
                .map(|(&c, &o)| (instance.clients[c], o))
                .collect(),
            assignment_cost: solution.assignment_cost,
            cost: solution.cost,
            partial,
            report,
        }
    }

    /// Translates back to positions. Unknown points are reported as
    /// violations.
    pub fn to_solution(&self, instance: &Instance) -> Result<Solution> {
        let clients = point_positions(&instance.clients);
        let facilities = point_positions(&instance.facilities);
        let mut bad = Vec::new();
        let mut open = Vec::new();
        for &p in &self.open {
            match facilities.get(&p) {
                Some(&f) => open.push(f),
                None => bad.push(Violation::Shape(format!("point {p} is not a facility"))),
            }
        }
        let mut assignment = Vec::new();
        for &(c, f, amount) in &self.assignment {
            match (clients.get(&c), facilities.get(&f)) {
                (Some(&client), Some(&facility)) => assignment.push(Assignment {
                    client,
                    facility,
                    amount,
                }),
                (None, _) => bad.push(Violation::Shape(format!("point {c} is not a client"))),
                (_, None) => bad.push(Violation::Shape(format!("point {f} is not a facility"))),
            }
        }
        let mut outliers = BTreeMap::new();
        for (&c, &o) in &self.outliers {
            match clients.get(&c) {
                Some(&client) => {
                    *outliers.entry(client).or_insert(0) += o;
                }
                None => bad.push(Violation::Shape(format!("point {c} is not a client"))),
            }
        }
        if !bad.is_empty() {
            return Err(Error::InvalidSolution(bad));
        }
        Ok(Solution {
            open,
            assignment,
            outliers,
            assignment_cost: self.assignment_cost,
            cost: self.cost,
        })
    }
}

/// On-disk coreset: `(client point, weight)` entries and the build record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetFile {
    pub entries: Vec<(usize, u64)>,
    pub meta: CoresetMeta,
}

impl CoresetFile {
    pub fn new(instance: &Instance, coreset: &Coreset) -> Self {
        Self {
            entries: coreset
                .weights
                .iter()
                .map(|(c, w)| (instance.clients[c], w))
                .collect(),
            meta: coreset.meta.clone(),
        }
    }
}

/// Rounds to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x, FLOAT_DIGITS)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with fields in declaration order and floats rounded to
/// [`FLOAT_DIGITS`] significant digits, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut out = serde_json::to_string_pretty(&v)?;
    out.push('\n');
    Ok(out)
}
