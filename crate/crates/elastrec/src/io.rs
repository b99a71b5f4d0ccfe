//! Field serialization: CSV round-trip files, legacy-VTK exports for
//! external viewers, and per-iteration residual logs.
//!
//! CSV files carry one row per vertex with the shortest decimal
//! representation that parses back to the identical float, so write/read is
//! bitwise stable.

use crate::error::{Error, Result};
use crate::field::{LameField, ScalarField, VectorField};
use crate::inversion::{LogRow, NoisyData};
use crate::mesh::TriMesh;
use std::fmt::Write as _;
use std::path::Path;

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn csv_body(
    mesh: &TriMesh,
    header: &str,
    row: impl Fn(usize) -> Vec<f64>,
) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for (i, &p) in mesh.vertices.iter().enumerate() {
        write!(out, "{},{}", p[0], p[1]).unwrap();
        for v in row(i) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_scalar_field(path: &Path, mesh: &TriMesh, field: &ScalarField) -> Result<()> {
    field.check_mesh(mesh)?;
    write_text(path, &csv_body(mesh, "x,y,value", |i| vec![field.values[i]]))
}

pub fn write_vector_field(path: &Path, mesh: &TriMesh, field: &VectorField) -> Result<()> {
    field.check_mesh(mesh)?;
    write_text(
        path,
        &csv_body(mesh, "x,y,ux,uy", |i| field.at(i).to_vec()),
    )
}

pub fn write_lame_field(path: &Path, mesh: &TriMesh, field: &LameField) -> Result<()> {
    field.check_mesh(mesh)?;
    write_text(
        path,
        &csv_body(mesh, "x,y,lambda_kpa,mu_kpa", |i| {
            vec![field.lambda.values[i], field.mu.values[i]]
        }),
    )
}

/// Parse one CSV field file: a header plus one row per vertex with the
/// given number of value columns (after the two coordinates).
fn read_rows(path: &Path, mesh: &TriMesh, ncols: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let pstr = path.display().to_string();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: pstr.clone(),
        line,
        msg,
    };
    let mut rows = Vec::with_capacity(mesh.num_vertices());
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + ncols {
            return Err(parse_err(
                idx + 1,
                format!("expected {} columns, found {}", 2 + ncols, fields.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(2 + ncols);
        for f in &fields {
            parsed.push(
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(idx + 1, format!("bad number '{f}': {e}")))?,
            );
        }
        let vertex = rows.len();
        if vertex >= mesh.num_vertices() {
            return Err(parse_err(idx + 1, "more rows than mesh vertices".into()));
        }
        let p = mesh.vertices[vertex];
        if (parsed[0] - p[0]).abs() > 1e-12 || (parsed[1] - p[1]).abs() > 1e-12 {
            return Err(parse_err(
                idx + 1,
                format!(
                    "vertex coordinates ({}, {}) do not match the mesh ({}, {})",
                    parsed[0], parsed[1], p[0], p[1]
                ),
            ));
        }
        rows.push(parsed[2..].to_vec());
    }
    if rows.len() != mesh.num_vertices() {
        return Err(Error::Parse {
            path: pstr,
            line: text.lines().count(),
            msg: format!(
                "expected {} vertex rows, found {}",
                mesh.num_vertices(),
                rows.len()
            ),
        });
    }
    Ok(rows)
}

pub fn read_scalar_field(path: &Path, mesh: &TriMesh) -> Result<ScalarField> {
    let rows = read_rows(path, mesh, 1)?;
    Ok(ScalarField {
        values: rows.into_iter().map(|r| r[0]).collect(),
    })
}

pub fn read_vector_field(path: &Path, mesh: &TriMesh) -> Result<VectorField> {
    let rows = read_rows(path, mesh, 2)?;
    let mut values = Vec::with_capacity(2 * rows.len());
    for r in rows {
        values.push(r[0]);
        values.push(r[1]);
    }
    Ok(VectorField { values })
}

pub fn read_lame_field(path: &Path, mesh: &TriMesh) -> Result<LameField> {
    let rows = read_rows(path, mesh, 2)?;
    Ok(LameField {
        lambda: ScalarField {
            values: rows.iter().map(|r| r[0]).collect(),
        },
        mu: ScalarField {
            values: rows.iter().map(|r| r[1]).collect(),
        },
    })
}

/// Legacy-VTK ASCII unstructured grid with point data, for external viewers.
pub fn write_vtk(
    path: &Path,
    mesh: &TriMesh,
    scalars: &[(&str, &ScalarField)],
    vectors: &[(&str, &VectorField)],
) -> Result<()> {
    for (_, f) in scalars {
        f.check_mesh(mesh)?;
    }
    for (_, f) in vectors {
        f.check_mesh(mesh)?;
    }
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("elastrec field export\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");
    writeln!(out, "POINTS {nv} double").unwrap();
    for &p in &mesh.vertices {
        writeln!(out, "{} {} 0", p[0], p[1]).unwrap();
    }
    writeln!(out, "CELLS {nt} {}", 4 * nt).unwrap();
    for t in &mesh.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(out, "CELL_TYPES {nt}").unwrap();
    for _ in 0..nt {
        out.push_str("5\n");
    }
    if !scalars.is_empty() || !vectors.is_empty() {
        writeln!(out, "POINT_DATA {nv}").unwrap();
    }
    for (name, f) in scalars {
        writeln!(out, "SCALARS {name} double 1").unwrap();
        out.push_str("LOOKUP_TABLE default\n");
        for &v in &f.values {
            writeln!(out, "{v}").unwrap();
        }
    }
    for (name, f) in vectors {
        writeln!(out, "VECTORS {name} double").unwrap();
        for i in 0..nv {
            let v = f.at(i);
            writeln!(out, "{} {} 0", v[0], v[1]).unwrap();
        }
    }
    write_text(path, &out)
}

/// Per-iteration residual log in CSV.
pub fn write_residual_log(path: &Path, log: &[LogRow]) -> Result<()> {
    let mut out = String::from("k,residual,stepsize,alpha,wall_secs\n");
    for row in log {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.k, row.residual, row.stepsize, row.alpha, row.wall_secs
        )
        .unwrap();
    }
    write_text(path, &out)
}

/// Noise realization metadata alongside the noisy data file.
pub fn write_noise_meta(path: &Path, noisy: &NoisyData, relative_level: f64) -> Result<()> {
    let text = format!(
        "delta = {}\nrelative_level = {}\nseed = {}\n",
        noisy.delta, relative_level, noisy.seed
    );
    write_text(path, &text)
}
