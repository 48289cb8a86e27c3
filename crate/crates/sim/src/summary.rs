//! Aggregates and plots computed from a results CSV.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::plot::{LinePlot, Series};
use crate::sweep::ResultRow;

/// Identifies a curve: scheme plus its alpha, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesKey {
    pub scheme: String,
    pub alpha: Option<f64>,
}

impl SeriesKey {
    fn of(row: &ResultRow) -> Self {
        Self {
            scheme: row.scheme.clone(),
            alpha: row.alpha,
        }
    }

    pub fn label(&self) -> String {
        match self.alpha {
            Some(a) => format!("{} (alpha {a})", self.scheme),
            None => self.scheme.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub key: SeriesKey,
    pub snr_db: f64,
    pub nmse: Option<f64>,
    pub ber: Option<f64>,
    pub nmse_count: usize,
    pub ber_count: usize,
}

/// Mean NMSE per frame index across realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub key: SeriesKey,
    pub snr_db: f64,
    pub points: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub table: Vec<Aggregate>,
    pub traces: Vec<Trace>,
}

#[derive(Debug, thiserror::Error)]
pub enum SummaryError {
    #[error("malformed results: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Default)]
struct Acc {
    nmse: (f64, usize),
    ber: (f64, usize),
    frames: BTreeMap<usize, (f64, usize)>,
}

fn mean((sum, count): (f64, usize)) -> Option<f64> {
    (count > 0).then(|| sum / count as f64)
}

/// Groups keep the order in which they first appear in `rows`.
pub fn summarize(rows: &[ResultRow]) -> Summary {
    let mut groups: Vec<(SeriesKey, f64, Acc)> = Vec::new();
    for row in rows {
        let key = SeriesKey::of(row);
        let pos = groups
            .iter()
            .position(|(k, s, _)| *k == key && s.to_bits() == row.snr_db.to_bits());
        let idx = pos.unwrap_or_else(|| {
            groups.push((key, row.snr_db, Acc::default()));
            groups.len() - 1
        });
        let acc = &mut groups[idx].2;
        if let Some(v) = row.nmse {
            acc.nmse.0 += v;
            acc.nmse.1 += 1;
            let f = acc.frames.entry(row.frame).or_default();
            f.0 += v;
            f.1 += 1;
        }
        if let Some(v) = row.ber {
            acc.ber.0 += v;
            acc.ber.1 += 1;
        }
    }
    let mut summary = Summary::default();
    for (key, snr_db, acc) in groups {
        summary.table.push(Aggregate {
            key: key.clone(),
            snr_db,
            nmse: mean(acc.nmse),
            ber: mean(acc.ber),
            nmse_count: acc.nmse.1,
            ber_count: acc.ber.1,
        });
        if !acc.frames.is_empty() {
            summary.traces.push(Trace {
                key,
                snr_db,
                points: acc
                    .frames
                    .into_iter()
                    .map(|(f, s)| (f, s.0 / s.1 as f64))
                    .collect(),
            });
        }
    }
    summary
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_table<W: Write>(summary: &Summary, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "alpha", "snr_db", "mean_nmse", "mean_ber", "nmse_rows", "ber_rows"])?;
    for a in &summary.table {
        w.write_record([
            a.key.scheme.clone(),
            opt(a.key.alpha),
            a.snr_db.to_string(),
            opt(a.nmse),
            opt(a.ber),
            a.nmse_count.to_string(),
            a.ber_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn snr_tag(snr: f64) -> String {
    snr.to_string().replace('-', "m").replace('.', "p")
}

fn series_over_snr(summary: &Summary, pick: impl Fn(&Aggregate) -> Option<f64>) -> Vec<Series> {
    let mut out: Vec<(SeriesKey, Series)> = Vec::new();
    for a in &summary.table {
        let Some(v) = pick(a) else { continue };
        let idx = out.iter().position(|(k, _)| *k == a.key).unwrap_or_else(|| {
            out.push((
                a.key.clone(),
                Series {
                    label: a.key.label(),
                    points: Vec::new(),
                },
            ));
            out.len() - 1
        });
        out[idx].1.points.push((a.snr_db, v));
    }
    out.into_iter()
        .map(|(_, mut s)| {
            s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
            s
        })
        .collect()
}

/// `(file name, SVG text)` for every plot with data.
pub fn render_plots(summary: &Summary) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let nmse = LinePlot {
        title: "Channel estimate NMSE",
        x_label: "SNR (dB)",
        y_label: "NMSE",
        log_y: true,
    };
    let nmse_series: Vec<Series> = series_over_snr(summary, |a| a.nmse)
        .into_iter()
        .filter(|s| s.points.iter().any(|p| p.1 > 0.0))
        .collect();
    if let Some(svg) = nmse.render(&nmse_series) {
        files.push(("nmse_vs_snr.svg".to_string(), svg));
    }
    let ber = LinePlot {
        title: "Bit error rate",
        x_label: "SNR (dB)",
        y_label: "BER",
        log_y: true,
    };
    if let Some(svg) = ber.render(&series_over_snr(summary, |a| a.ber)) {
        files.push(("ber_vs_snr.svg".to_string(), svg));
    }
    let mut snrs: Vec<f64> = summary.traces.iter().map(|t| t.snr_db).collect();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    for snr in snrs {
        let title = format!("Per-frame NMSE at {snr} dB");
        let plot = LinePlot {
            title: &title,
            x_label: "frame",
            y_label: "NMSE",
            log_y: true,
        };
        let series: Vec<Series> = summary
            .traces
            .iter()
            .filter(|t| t.snr_db == snr && t.points.iter().any(|p| p.1 > 0.0))
            .map(|t| Series {
                label: t.key.label(),
                points: t.points.iter().map(|&(f, v)| (f as f64, v)).collect(),
            })
            .collect();
        if let Some(svg) = plot.render(&series) {
            files.push((format!("nmse_trace_snr{}.svg", snr_tag(snr)), svg));
        }
    }
    files
}

/// Read `csv_path`, write `summary.csv` and (optionally) SVG plots into
/// `out_dir`. Returns the summary and the files written.
pub fn summarize_file(
    csv_path: &Path,
    out_dir: &Path,
    plots: bool,
) -> Result<(Summary, Vec<PathBuf>), SummaryError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SummaryError::Io { path, source }
    };
    let file = std::fs::File::open(csv_path).map_err(io(csv_path))?;
    let rows = read_rows(std::io::BufReader::new(file))?;
    let summary = summarize(&rows);
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let table = out_dir.join("summary.csv");
    let f = std::fs::File::create(&table).map_err(io(&table))?;
    write_table(&summary, f)?;
    let mut written = vec![table];
    if plots {
        for (name, svg) in render_plots(&summary) {
            let path = out_dir.join(name);
            std::fs::write(&path, svg).map_err(io(&path))?;
            written.push(path);
        }
    }
    Ok((summary, written))
}
