use std::collections::HashSet;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit of the COVID-19 deaths column in memory. The attribute file stores
/// the values as printed (percent of population).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovidScale {
    /// Keep the printed percent values.
    #[default]
    Percent,
    /// Divide the printed values by 100.
    Fraction,
}

impl FromStr for CovidScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "percent" => Ok(CovidScale::Percent),
            "fraction" => Ok(CovidScale::Fraction),
            other => Err(Error::Attribute(format!("unknown covid scale `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    Binary,
    Continuous,
}

pub const BINARY_ATTRS: [&str; 3] = ["giips", "abfn", "euro"];
pub const CONTINUOUS_ATTRS: [&str; 4] = [
    "covid_deaths",
    "debt_to_gdp",
    "inflation",
    "account_balance",
];

/// Economic and health attributes of one entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub name: String,
    pub giips: bool,
    pub abfn: bool,
    pub euro: bool,
    pub covid_deaths: f64,
    pub debt_to_gdp: f64,
    pub inflation: f64,
    pub account_balance: f64,
}

impl NodeRecord {
    pub fn get(&self, attr: &str) -> Option<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        Some(match attr {
            "giips" => flag(self.giips),
            "abfn" => flag(self.abfn),
            "euro" => flag(self.euro),
            "covid_deaths" => self.covid_deaths,
            "debt_to_gdp" => self.debt_to_gdp,
            "inflation" => self.inflation,
            "account_balance" => self.account_balance,
            _ => return None,
        })
    }
}

pub fn attr_kind(attr: &str) -> Option<AttrKind> {
    if BINARY_ATTRS.contains(&attr) {
        Some(AttrKind::Binary)
    } else if CONTINUOUS_ATTRS.contains(&attr) {
        Some(AttrKind::Continuous)
    } else {
        None
    }
}

/// Per-node attributes, one record per entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAttributes {
    nodes: Vec<NodeRecord>,
}

impl NodeAttributes {
    pub fn new(nodes: Vec<NodeRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &nodes {
            if !seen.insert(r.name.as_str()) {
                return Err(Error::Attribute(format!("duplicate node `{}`", r.name)));
            }
            if r.giips && r.abfn {
                return Err(Error::Attribute(format!(
                    "`{}` cannot be both GIIPS and ABFN",
                    r.name
                )));
            }
            for attr in CONTINUOUS_ATTRS {
                if !r.get(attr).is_some_and(f64::is_finite) {
                    return Err(Error::Attribute(format!(
                        "`{}`: {attr} is not finite",
                        r.name
                    )));
                }
            }
        }
        Ok(Self { nodes })
    }

    /// The bundled 2020 economic and health table.
    pub fn table_2020() -> Self {
        read_attributes(
            include_str!("../../data/attributes_2020.csv").as_bytes(),
            CovidScale::Percent,
        )
        .expect("bundled attribute table is valid")
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, name: &str) -> Option<&NodeRecord> {
        self.nodes.iter().find(|r| r.name == name)
    }

    /// Values of `attr` in node order.
    pub fn column(&self, attr: &str) -> Result<Vec<f64>> {
        if attr_kind(attr).is_none() {
            return Err(Error::Spec(format!("unknown attribute `{attr}`")));
        }
        Ok(self.nodes.iter().map(|r| r.get(attr).unwrap()).collect())
    }

    /// Records reordered to match `names`; every name must be present.
    pub fn align(&self, names: &[String]) -> Result<Self> {
        let nodes = names
            .iter()
            .map(|n| {
                self.node(n)
                    .cloned()
                    .ok_or_else(|| Error::Attribute(format!("no attributes for entity `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes })
    }

    /// Multiplies a continuous attribute by `factor`.
    pub fn scaled(&self, attr: &str, factor: f64) -> Result<Self> {
        if attr_kind(attr) != Some(AttrKind::Continuous) {
            return Err(Error::Attribute(format!(
                "`{attr}` is not a continuous attribute"
            )));
        }
        let mut nodes = self.nodes.clone();
        for r in &mut nodes {
            let slot = match attr {
                "covid_deaths" => &mut r.covid_deaths,
                "debt_to_gdp" => &mut r.debt_to_gdp,
                "inflation" => &mut r.inflation,
                _ => &mut r.account_balance,
            };
            *slot *= factor;
        }
        Ok(Self { nodes })
    }
}

pub fn load_attributes(path: impl AsRef<Path>, scale: CovidScale) -> Result<NodeAttributes> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_attributes(file, scale)
}

/// Reads `name,giips,abfn,euro,covid_deaths,debt_to_gdp,inflation,account_balance`.
pub fn read_attributes<R: Read>(reader: R, scale: CovidScale) -> Result<NodeAttributes> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = [
        "name",
        "giips",
        "abfn",
        "euro",
        "covid_deaths",
        "debt_to_gdp",
        "inflation",
        "account_balance",
    ];
    let idx: Vec<usize> = expected
        .iter()
        .map(|col| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(col))
                .ok_or_else(|| Error::Parse {
                    row: 1,
                    column: col.to_string(),
                    message: "missing column".into(),
                })
        })
        .collect::<Result<_>>()?;
    let mut nodes = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map_or(k + 2, |p| p.line() as usize);
        let cell = |c: usize| rec.get(idx[c]).unwrap_or("");
        let flag = |c: usize| -> Result<bool> {
            match cell(c) {
                "1" => Ok(true),
                "0" | "" => Ok(false),
                other => Err(Error::Parse {
                    row,
                    column: expected[c].into(),
                    message: format!("`{other}` is not 0 or 1"),
                }),
            }
        };
        let num = |c: usize| -> Result<f64> {
            cell(c).parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: expected[c].into(),
                message: format!("`{}` is not a number", cell(c)),
            })
        };
        let covid = num(4)?;
        nodes.push(NodeRecord {
            name: cell(0).to_string(),
            giips: flag(1)?,
            abfn: flag(2)?,
            euro: flag(3)?,
            covid_deaths: match scale {
                CovidScale::Percent => covid,
                CovidScale::Fraction => covid / 100.0,
            },
            debt_to_gdp: num(5)?,
            inflation: num(6)?,
            account_balance: num(7)?,
        });
    }
    NodeAttributes::new(nodes)
}
