use std::fs;
use std::io::Write;
use std::path::PathBuf;

use caplaw::Result;
use serde::Serialize;

use crate::config::{config_error, Echo, Format};

/// Full round-trip precision: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Table {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header).map_err(config_error)?;
        for r in &self.rows {
            w.write_record(r).map_err(config_error)?;
        }
        let bytes = w.into_inner().map_err(config_error)?;
        String::from_utf8(bytes).map_err(config_error)
    }
}

#[derive(Serialize)]
struct WithConfig<'a, E: Serialize, R: Serialize> {
    resolved_config: &'a E,
    #[serde(flatten)]
    result: &'a R,
}

/// Destination of a run: files under `--out`, or stdout.
pub struct Sink {
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn emit<T: Serialize, R: Serialize>(
        &self,
        echo: &Echo<'_, T>,
        json_name: &str,
        report: &R,
        tables: &[Table],
    ) -> Result<()> {
        let json = pretty(&WithConfig {
            resolved_config: echo,
            result: report,
        })?;
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)
                    .map_err(|e| config_error(format!("cannot create {}: {e}", dir.display())))?;
                write(dir.join("config.json"), &pretty(echo)?)?;
                if self.format.json() {
                    write(dir.join(json_name), &json)?;
                }
                if self.format.csv() {
                    for t in tables {
                        write(dir.join(t.name), &t.render()?)?;
                    }
                }
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                let mut text = String::new();
                if self.format.json() {
                    text.push_str(&json);
                } else {
                    for (i, t) in tables.iter().enumerate() {
                        if i > 0 {
                            text.push('\n');
                        }
                        text.push_str(&t.render()?);
                    }
                }
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| config_error(format!("cannot write to stdout: {e}")))?;
            }
        }
        Ok(())
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(config_error)?;
    s.push('\n');
    Ok(s)
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text)
        .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}
