//! JSON documents for complexes and languages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    blockade_graph_of, format_rational, parse_rational, BlockadeGraph, Complex, Language, Point,
    Port, Word,
};

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    pub detuning: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PortDoc {
    pub label: String,
    pub index: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub atoms: Vec<AtomDoc>,
    pub ports: Vec<PortDoc>,
    pub blockade_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blockade_edges: Option<Vec<[usize; 2]>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct LanguageDoc {
    pub word_length: usize,
    pub words: Vec<String>,
}

pub(crate) fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl ComplexDoc {
    pub fn from_complex(c: &Complex) -> Self {
        let pos = c.positions();
        ComplexDoc {
            atoms: (0..c.n_atoms())
                .map(|i| AtomDoc {
                    x: pos.map(|p| p[i].x),
                    y: pos.map(|p| p[i].y),
                    detuning: format_rational(&c.detunings()[i]),
                })
                .collect(),
            ports: c
                .ports()
                .iter()
                .map(|p| PortDoc {
                    label: p.label.clone(),
                    index: p.index,
                })
                .collect(),
            blockade_radius: c.radius(),
            blockade_edges: c
                .has_explicit_edges()
                .then(|| c.graph().edges().into_iter().map(|(i, j)| [i, j]).collect()),
        }
    }

    pub fn to_complex(&self) -> Result<Complex> {
        let n = self.atoms.len();
        let mut detunings = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for (i, a) in self.atoms.iter().enumerate() {
            detunings.push(parse_rational(&a.detuning).map_err(|e| Error::Schema {
                field: format!("atoms[{i}].detuning"),
                message: e.to_string(),
            })?);
            match (a.x, a.y) {
                (Some(x), Some(y)) => coords.push(Some(Point::new(x, y))),
                (None, None) => coords.push(None),
                _ => {
                    return Err(Error::Schema {
                        field: format!("atoms[{i}]"),
                        message: "x and y must be given together".into(),
                    })
                }
            }
        }
        let positions = if coords.iter().all(|c| c.is_some()) && n > 0 {
            Some(coords.into_iter().map(|c| c.unwrap()).collect::<Vec<_>>())
        } else if coords.iter().all(|c| c.is_none()) {
            None
        } else {
            return Err(Error::Schema {
                field: "atoms".into(),
                message: "either all atoms or none carry coordinates".into(),
            });
        };
        let ports = self.ports.iter().map(|p| Port::new(p.label.clone(), p.index)).collect();
        match (&self.blockade_edges, positions) {
            (Some(edges), positions) => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                let graph = BlockadeGraph::from_edges(n, &pairs).map_err(|e| Error::Schema {
                    field: "blockade_edges".into(),
                    message: e.to_string(),
                })?;
                if let Some(p) = &positions {
                    // an override that equals the geometric graph is not an override
                    if blockade_graph_of(p, self.blockade_radius)? == graph {
                        return Complex::geometric(p.clone(), detunings, ports, self.blockade_radius);
                    }
                }
                Complex::with_explicit_edges(positions, detunings, ports, self.blockade_radius, graph)
            }
            (None, Some(p)) => Complex::geometric(p, detunings, ports, self.blockade_radius),
            (None, None) => Err(Error::Schema {
                field: "blockade_edges".into(),
                message: "required when atoms have no coordinates".into(),
            }),
        }
    }
}

pub fn complex_to_json(c: &Complex) -> String {
    serde_json::to_string_pretty(&ComplexDoc::from_complex(c)).expect("complex serializes")
}

pub fn complex_from_json(s: &str) -> Result<Complex> {
    let doc: ComplexDoc = serde_json::from_str(s).map_err(parse_err)?;
    doc.to_complex()
}

impl LanguageDoc {
    pub fn from_language(l: &Language) -> Self {
        LanguageDoc {
            word_length: l.word_length(),
            words: l.iter().map(|w| w.to_string()).collect(),
        }
    }

    pub fn to_language(&self) -> Result<Language> {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<Word>().map_err(|e| Error::Schema {
                    field: format!("words[{i}]"),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Language::new(self.word_length, words)
    }
}

/// A named complex together with the language it realizes.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CatalogDoc {
    pub name: String,
    pub minimal_atom_count: usize,
    pub complex: ComplexDoc,
    pub language: LanguageDoc,
}

pub fn language_to_json(l: &Language) -> String {
    serde_json::to_string_pretty(&LanguageDoc::from_language(l)).expect("language serializes")
}

pub fn language_from_json(s: &str) -> Result<Language> {
    let doc: LanguageDoc = serde_json::from_str(s).map_err(parse_err)?;
    doc.to_language()
}
