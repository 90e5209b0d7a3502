//! Mesh, table and report writers.

use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA: &str = "isosurf/1";

/// Per-vertex attributes of a sampled surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VertexAttr {
    pub u: f64,
    pub t: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub det_g: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshOutput {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based quads in counter-clockwise grid order.
    pub faces: Vec<[usize; 4]>,
    pub attrs: Vec<VertexAttr>,
}

impl MeshOutput {
    /// Quads of an `nu x nt` grid whose vertex `(i, j)` sits at `i * nt + j`.
    pub fn grid_faces(nu: usize, nt: usize) -> Vec<[usize; 4]> {
        let mut f = Vec::with_capacity(nu.saturating_sub(1) * nt.saturating_sub(1));
        for i in 0..nu.saturating_sub(1) {
            for j in 0..nt.saturating_sub(1) {
                let k = i * nt + j;
                f.push([k, k + nt, k + nt + 1, k + 1]);
            }
        }
        f
    }
}

/// `v x y z` with 17 significant digits, then 1-based `f` quads.
pub fn write_obj(w: &mut impl Write, mesh: &MeshOutput, comment: &str) -> io::Result<()> {
    for line in comment.lines() {
        writeln!(w, "# {line}")?;
    }
    for v in &mesh.vertices {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
    }
    Ok(())
}

/// Reads back the vertices and faces (zero-based) of an OBJ file. Only `v`
/// and `f` records are interpreted; `f` entries may carry `/vt/vn` suffixes.
pub type ObjData = (Vec<[f64; 3]>, Vec<Vec<usize>>);

pub fn read_obj(r: impl BufRead) -> io::Result<ObjData> {
    let bad = |n: usize, msg: String| {
        io::Error::new(io::ErrorKind::InvalidData, format!("line {n}: {msg}"))
    };
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let xs: Vec<f64> = it
                    .take(3)
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|e| bad(n + 1, format!("{s}: {e}")))
                    })
                    .collect::<io::Result<_>>()?;
                if xs.len() != 3 {
                    return Err(bad(n + 1, "vertex needs three coordinates".into()));
                }
                verts.push([xs[0], xs[1], xs[2]]);
            }
            Some("f") => {
                let idx = it
                    .map(|s| {
                        let head = s.split('/').next().unwrap_or(s);
                        match head.parse::<usize>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(bad(n + 1, format!("bad face index '{s}'"))),
                        }
                    })
                    .collect::<io::Result<Vec<_>>>()?;
                faces.push(idx);
            }
            _ => {}
        }
    }
    Ok((verts, faces))
}

#[derive(Serialize)]
struct CsvRow {
    u: f64,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "H")]
    h: f64,
    det_g: f64,
}

/// Per-vertex table with header `u,t,x,y,z,K,H,det_g`.
pub fn write_vertex_csv(w: impl Write, mesh: &MeshOutput) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (v, a) in mesh.vertices.iter().zip(&mesh.attrs) {
        wr.serialize(CsvRow {
            u: a.u,
            t: a.t,
            x: v[0],
            y: v[1],
            z: v[2],
            k: a.k,
            h: a.h,
            det_g: a.det_g,
        })?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes rows of serializable records as CSV.
pub fn write_rows<T: Serialize>(w: impl Write, rows: &[T]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Prefixes a report with the schema and command keys.
pub fn report(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema": SCHEMA, "command": command });
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    out
}

/// Output directory that creates itself and names files inside it.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn with_file(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> Result<(), Box<dyn std::error::Error>>,
    ) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w).map_err(|e| CliError::io(&path, io::Error::other(e.to_string())))?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn json(&self, name: &str, v: &Value) -> Result<PathBuf, CliError> {
        self.with_file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, v)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

/// Replaces non-finite floats, which JSON cannot carry, with `null`.
pub fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
