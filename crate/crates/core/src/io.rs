//! Model file formats. All three model classes are stored as JSON with
//! rational entries written as "p/q" strings and integer vectors as plain
//! arrays; parse errors carry line and column.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::graded::{GradedMonomialSystem, Presentation, ReesGenerator};
use crate::linalg::{IVec, QMatrix, QVector};
use crate::rational::{format_rat, parse_rat, Int};
use crate::surface::{CurveEntry, SurfaceModel};
use crate::toric::ToricModel;

#[derive(Serialize, Deserialize)]
struct SurfaceFile {
    #[serde(rename = "type")]
    kind: String,
    name: String,
    basis: Vec<String>,
    intersection_matrix: Vec<Vec<String>>,
    curves: Vec<CurveFile>,
    ample_witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    effective_cone: Option<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    name: String,
    class: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ToricFile {
    #[serde(rename = "type")]
    kind: String,
    name: String,
    rays: Vec<Vec<i64>>,
    ray_labels: Vec<String>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    cone_labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    class_basis: Vec<ClassBasisFile>,
}

#[derive(Serialize, Deserialize)]
struct ClassBasisFile {
    name: String,
    divisor: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GradedFile {
    #[serde(rename = "type")]
    kind: String,
    name: String,
    rank: usize,
    variables: usize,
    semigroup: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    rees_generators: Vec<ReesGeneratorFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<TableEntryFile>,
}

#[derive(Serialize, Deserialize)]
struct ReesGeneratorFile {
    degree: Vec<i64>,
    exponent: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TableEntryFile {
    degree: Vec<i64>,
    generators: Vec<Vec<u64>>,
}

fn ints(v: &[i64]) -> IVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn parse_rat_vec(v: &[String]) -> Result<QVector> {
    Ok(QVector(
        v.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?,
    ))
}

fn format_rat_vec(v: &QVector) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

/// "3,-2,1/2" -> class vector.
pub fn parse_class_vector(s: &str) -> Result<QVector> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.is_empty() || parts.iter().all(|p| p.trim().is_empty()) {
        return Err(Error::Parse("empty class vector".into()));
    }
    Ok(QVector(
        parts.iter().map(|p| parse_rat(p)).collect::<Result<_>>()?,
    ))
}

pub fn parse_surface_model(text: &str) -> Result<(String, SurfaceModel)> {
    let file: SurfaceFile =
        serde_json::from_str(text).map_err(|e| Error::parse_json(&e))?;
    if file.kind != "surface" {
        return Err(Error::Parse(format!(
            "expected type `surface`, found `{}`",
            file.kind
        )));
    }
    let rank = file.basis.len();
    let mut rows = Vec::new();
    for r in &file.intersection_matrix {
        if r.len() != rank {
            return Err(Error::Parse("ragged intersection matrix".into()));
        }
        rows.push(parse_rat_vec(r)?);
    }
    if rows.len() != rank {
        return Err(Error::Parse(
            "intersection matrix size differs from basis size".into(),
        ));
    }
    let curves = file
        .curves
        .iter()
        .map(|c| CurveEntry {
            name: c.name.clone(),
            class: ints(&c.class),
        })
        .collect();
    let effective_cone = match &file.effective_cone {
        None => None,
        Some(gens) => Some(Cone::new(
            rank,
            gens.iter()
                .map(|g| {
                    if g.len() != rank {
                        Err(Error::Parse("effective cone generator dimension".into()))
                    } else {
                        Ok(ints(g))
                    }
                })
                .collect::<Result<_>>()?,
        )),
    };
    let model = SurfaceModel::new(
        file.basis,
        QMatrix::from_rows(rows),
        curves,
        parse_rat_vec(&file.ample_witness)?,
        effective_cone,
    )?;
    Ok((file.name, model))
}

pub fn surface_model_to_json(name: &str, model: &SurfaceModel) -> String {
    let rank = model.rank();
    let file = SurfaceFile {
        kind: "surface".into(),
        name: name.into(),
        basis: model.basis_labels().to_vec(),
        intersection_matrix: (0..rank)
            .map(|i| format_rat_vec(&model.intersection_form().row(i)))
            .collect(),
        curves: model
            .curves()
            .iter()
            .map(|c| CurveFile {
                name: c.name.clone(),
                class: c.class.iter().map(|x| i64::try_from(x).unwrap()).collect(),
            })
            .collect(),
        ample_witness: format_rat_vec(model.ample_witness()),
        effective_cone: model.effective_cone().map(|c| {
            c.generators()
                .iter()
                .map(|g| g.iter().map(|x| i64::try_from(x).unwrap()).collect())
                .collect()
        }),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn parse_toric_model(text: &str) -> Result<(String, ToricModel)> {
    let file: ToricFile = serde_json::from_str(text).map_err(|e| Error::parse_json(&e))?;
    if file.kind != "toric" {
        return Err(Error::Parse(format!(
            "expected type `toric`, found `{}`",
            file.kind
        )));
    }
    let dim = file.rays.first().map_or(0, Vec::len);
    let mut cone_labels = BTreeMap::new();
    for (key, label) in &file.cone_labels {
        let indices: Vec<usize> = key
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad cone label key `{key}`")))
            })
            .collect::<Result<_>>()?;
        let mut sorted = indices;
        sorted.sort_unstable();
        cone_labels.insert(sorted, label.clone());
    }
    let class_basis = file
        .class_basis
        .iter()
        .map(|b| Ok((b.name.clone(), parse_rat_vec(&b.divisor)?)))
        .collect::<Result<_>>()?;
    let model = ToricModel::new(
        dim,
        file.rays.iter().map(|r| ints(r)).collect(),
        file.ray_labels,
        file.max_cones,
        cone_labels,
        class_basis,
    )?;
    Ok((file.name, model))
}

pub fn toric_model_to_json(name: &str, model: &ToricModel) -> String {
    let file = ToricFile {
        kind: "toric".into(),
        name: name.into(),
        rays: model
            .rays()
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect(),
        ray_labels: model.ray_labels().to_vec(),
        max_cones: model.max_cones().to_vec(),
        cone_labels: {
            let mut out = BTreeMap::new();
            for indices in model.all_cone_index_sets() {
                let default = if indices.len() == 1 {
                    model.ray_labels()[indices[0]].clone()
                } else {
                    String::new()
                };
                let label = model.orbit_label(&indices);
                if label != default && !label.starts_with("V(") {
                    let key = indices
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(",");
                    out.insert(key, label);
                }
            }
            out
        },
        class_basis: model
            .class_basis()
            .iter()
            .map(|(n, d)| ClassBasisFile {
                name: n.clone(),
                divisor: format_rat_vec(d),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn parse_graded_system(text: &str) -> Result<(String, GradedMonomialSystem)> {
    let file: GradedFile = serde_json::from_str(text).map_err(|e| Error::parse_json(&e))?;
    if file.kind != "graded" {
        return Err(Error::Parse(format!(
            "expected type `graded`, found `{}`",
            file.kind
        )));
    }
    let semigroup = Cone::new(
        file.rank,
        file.semigroup
            .iter()
            .map(|g| {
                if g.len() != file.rank {
                    Err(Error::Parse("semigroup generator dimension".into()))
                } else {
                    Ok(ints(g))
                }
            })
            .collect::<Result<_>>()?,
    );
    let presentation = if !file.rees_generators.is_empty() {
        Presentation::Rees(
            file.rees_generators
                .iter()
                .map(|g| ReesGenerator {
                    degree: ints(&g.degree),
                    exponent: g.exponent.clone(),
                })
                .collect(),
        )
    } else if !file.table.is_empty() {
        let mut table = BTreeMap::new();
        for entry in &file.table {
            table.insert(ints(&entry.degree), entry.generators.clone());
        }
        Presentation::Table(table)
    } else {
        return Err(Error::Parse(
            "graded system needs rees_generators or a table".into(),
        ));
    };
    let system = GradedMonomialSystem::new(file.rank, file.variables, semigroup, presentation)?;
    Ok((file.name, system))
}

pub fn graded_system_to_json(name: &str, system: &GradedMonomialSystem) -> String {
    let (rees, table) = match system.presentation() {
        Presentation::Rees(gens) => (
            gens.iter()
                .map(|g| ReesGeneratorFile {
                    degree: g.degree.iter().map(|x| i64::try_from(x).unwrap()).collect(),
                    exponent: g.exponent.clone(),
                })
                .collect(),
            Vec::new(),
        ),
        Presentation::Table(t) => (
            Vec::new(),
            t.iter()
                .map(|(degree, gens)| TableEntryFile {
                    degree: degree.iter().map(|x| i64::try_from(x).unwrap()).collect(),
                    generators: gens.clone(),
                })
                .collect(),
        ),
    };
    let file = GradedFile {
        kind: "graded".into(),
        name: name.into(),
        rank: system.rank(),
        variables: system.vars(),
        semigroup: system
            .semigroup()
            .generators()
            .iter()
            .map(|g| g.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect(),
        rees_generators: rees,
        table,
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// Any of the three model kinds, detected from the "type" field.
pub enum AnyModel {
    Surface(String, SurfaceModel),
    Toric(String, ToricModel),
    Graded(String, GradedMonomialSystem),
}

pub fn parse_model(text: &str) -> Result<AnyModel> {
    #[derive(Deserialize)]
    struct Probe {
        #[serde(rename = "type")]
        kind: String,
    }
    let probe: Probe = serde_json::from_str(text).map_err(|e| Error::parse_json(&e))?;
    match probe.kind.as_str() {
        "surface" => {
            let (name, m) = parse_surface_model(text)?;
            Ok(AnyModel::Surface(name, m))
        }
        "toric" => {
            let (name, m) = parse_toric_model(text)?;
            Ok(AnyModel::Toric(name, m))
        }
        "graded" => {
            let (name, m) = parse_graded_system(text)?;
            Ok(AnyModel::Graded(name, m))
        }
        other => Err(Error::Parse(format!("unknown model type `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn surface_round_trip() {
        for name in catalog::surface_fixture_names() {
            let model = catalog::surface_fixture(name).unwrap();
            let json = surface_model_to_json(name, &model);
            let (parsed_name, parsed) = parse_surface_model(&json).unwrap();
            assert_eq!(parsed_name, name);
            assert_eq!(parsed.basis_labels(), model.basis_labels());
            assert_eq!(parsed.intersection_form(), model.intersection_form());
            assert_eq!(parsed.ample_witness(), model.ample_witness());
            assert_eq!(parsed.curves().len(), model.curves().len());
        }
    }

    #[test]
    fn toric_round_trip() {
        for name in catalog::toric_fixture_names() {
            let model = catalog::toric_fixture(name).unwrap();
            let json = toric_model_to_json(name, &model);
            let (parsed_name, parsed) = parse_toric_model(&json).unwrap();
            assert_eq!(parsed_name, name);
            assert_eq!(parsed.rays(), model.rays());
            assert_eq!(parsed.max_cones(), model.max_cones());
            assert_eq!(
                parsed.orbit_label(&[1]),
                model.orbit_label(&[1])
            );
        }
    }

    #[test]
    fn graded_round_trip() {
        for name in catalog::graded_fixture_names() {
            let system = catalog::graded_fixture(name).unwrap();
            let json = graded_system_to_json(name, &system);
            let (parsed_name, parsed) = parse_graded_system(&json).unwrap();
            assert_eq!(parsed_name, name);
            assert_eq!(parsed.rank(), system.rank());
            assert_eq!(parsed.vars(), system.vars());
            let degree = crate::linalg::ivec(&vec![1; system.rank()]);
            if let (Ok(a), Ok(b)) = (system.ideal_at(&degree), parsed.ideal_at(&degree)) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_surface_model("{ \"type\": \"surface\", ").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "missing position info: {msg}");
        let Err(err) = parse_model("{\"type\": \"volcano\"}") else {
            panic!("unknown model type accepted");
        };
        assert!(err.to_string().contains("volcano"));
    }

    #[test]
    fn invalid_models_are_rejected_after_parse() {
        // Valid JSON, invalid geometry: non-complete fan.
        let text = r#"{
            "type": "toric",
            "name": "broken",
            "rays": [[1,0],[0,1]],
            "ray_labels": ["a","b"],
            "max_cones": [[0,1]]
        }"#;
        assert!(parse_toric_model(text).is_err());
        // Positive-definite intersection form: wrong signature.
        let text = r#"{
            "type": "surface",
            "name": "broken",
            "basis": ["A", "B"],
            "intersection_matrix": [["1","0"],["0","1"]],
            "curves": [],
            "ample_witness": ["1","1"]
        }"#;
        assert!(parse_surface_model(text).is_err());
    }

    #[test]
    fn class_vectors() {
        let v = parse_class_vector("3,-2,1/2").unwrap();
        assert_eq!(v.dim(), 3);
        assert_eq!(v[2], crate::rational::rat(1, 2));
        assert!(parse_class_vector("").is_err());
        assert!(parse_class_vector("1,x").is_err());
    }
}
