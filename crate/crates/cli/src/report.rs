//! Tables with a `#` provenance block, and the artifacts a run writes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

/// `# key: value` lines written above every table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub lines: Vec<(String, String)>,
}

impl Provenance {
    pub fn for_run(cfg: &RunConfig, command: &str) -> Self {
        let n = &cfg.numerics;
        let mut p = Provenance::default();
        p.push("tool", format!("cornerscale {}", env!("CARGO_PKG_VERSION")));
        p.push("command", command);
        p.push("config_sha256", cfg.hash());
        p.push(
            "geometry",
            format!("{:?}", cfg.model.geometry).to_lowercase(),
        );
        p.push(
            "grid",
            format!(
                "L={} n={} scheme={} h={}",
                num(n.length),
                n.points,
                n.scheme,
                num(n.length / (n.points + 1) as f64)
            ),
        );
        let sweep = cfg
            .thetas()
            .map(|t| {
                t.iter()
                    .map(|t| fmt_c(t.theta()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        p.push(
            "theta",
            fmt_c(cornerscale_core::Complex64::new(n.theta[0], n.theta[1])),
        );
        p.push("theta_sweep", sweep);
        p.push(
            "tolerances",
            format!(
                "rays={} stability={} residual={} imag={} richardson_levels={}",
                num(n.rays_tolerance),
                n.stability_tolerance
                    .map_or_else(|| "default".to_string(), num),
                num(n.residual_bound),
                num(n.imag_tolerance),
                n.richardson_levels
            ),
        );
        p
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.lines.push((key.into(), value.into()));
    }
}

/// Shortest round-trip form; exponent notation outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_c(z: cornerscale_core::Complex64) -> String {
    let im = num(z.im);
    if im.starts_with('-') {
        format!("{}{im}i", num(z.re))
    } else {
        format!("{}+{im}i", num(z.re))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub provenance: Provenance,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(provenance: Provenance, columns: &[&'static str]) -> Self {
        Self {
            provenance,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut head = String::new();
        for (k, v) in &self.provenance.lines {
            writeln!(head, "# {k}: {v}").expect("string write");
        }
        let mut w = csv::Writer::from_writer(head.into_bytes());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// A file to write into the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
    /// Short lines for stdout.
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn table(&mut self, name: &str, t: &Table) -> Result<(), CliError> {
        self.artifacts.push(Artifact {
            name: name.into(),
            bytes: t.to_bytes()?,
        });
        Ok(())
    }

    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.artifacts.push(Artifact {
            name: name.into(),
            bytes,
        });
    }

    /// Writes every artifact, plus `warnings.csv` when there are warnings.
    pub fn write(&self, dir: &Path, provenance: &Provenance) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut all = self.artifacts.clone();
        if !self.warnings.is_empty() {
            let mut t = Table::new(provenance.clone(), &["warning"]);
            for w in &self.warnings {
                t.row(vec![w.clone()]);
            }
            all.push(Artifact {
                name: "warnings.csv".into(),
                bytes: t.to_bytes()?,
            });
        }
        for a in &all {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}
