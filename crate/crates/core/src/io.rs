//! CSV readers and writers for every file the toolkit consumes or emits.
//!
//! All files are comma-separated UTF-8 with a header row. Numbers are
//! written with 17 significant digits so that every value survives a
//! round trip exactly; [`format_number`] is the single formatting routine.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use csv::StringRecord;

use crate::bounds::{Assignment, EeBounds};
use crate::error::{Error, Result};
use crate::meta::{AgreementRow, PosteriorDraws, SiteParams};
use crate::prospects::Prospect;
use crate::rules::{RegretRow, StatePair};
use crate::welfare::IncomeVector;

pub const BOUNDS_HEADER: [&str; 6] = [
    "scheme",
    "gamma",
    "ee_a_low",
    "ee_a_high",
    "ee_b_low",
    "ee_b_high",
];
pub const DRAWS_HEADER: [&str; 5] = ["site", "mu", "zeta", "sigma", "lambda"];
pub const STATES_HEADER: [&str; 3] = ["label", "ee_a", "ee_b"];
pub const REGRET_HEADER: [&str; 4] = ["delta", "regret_a", "regret_b", "worst"];
pub const ASSIGNMENT_HEADER: [&str; 4] = ["scheme", "gamma", "delta", "worst_regret"];
pub const SUMMARY_HEADER: [&str; 9] = [
    "site",
    "mean_tau",
    "prob_tau_pos",
    "mean_tau_ee",
    "prob_tau_ee_pos",
    "tau_at_mean",
    "tau_ee_at_mean",
    "bayes_delta",
    "plugin_delta",
];
pub const AGREEMENT_HEADER: [&str; 5] = [
    "sample_size",
    "replications",
    "agreements",
    "skipped",
    "agreement_rate",
];

/// Decimal representation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp).max(0) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

/// A parsed file: header plus data records tagged with their line numbers.
struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(u64, StringRecord)>,
}

impl Table {
    fn read<R: Read>(rdr: R, path: &Path) -> Result<Table> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(rdr);
        let mut records = csv.records();
        let header = match records.next() {
            None => {
                return Err(Error::Parse {
                    path: path.to_owned(),
                    line: 1,
                    message: "file is empty".to_owned(),
                })
            }
            Some(rec) => rec.map_err(|e| csv_error(path, e))?,
        };
        let mut rows = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.iter().all(str::is_empty) {
                continue;
            }
            rows.push((line, rec));
        }
        Ok(Table {
            path: path.to_owned(),
            header: header.iter().map(str::to_owned).collect(),
            rows,
        })
    }

    fn open(path: &Path) -> Result<Table> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Table::read(file, path)
    }

    fn expect_header(&self, expected: &[&str]) -> Result<()> {
        if self
            .header
            .iter()
            .map(String::as_str)
            .ne(expected.iter().copied())
        {
            return Err(self.error(
                1,
                format!(
                    "expected header '{}', found '{}'",
                    expected.join(","),
                    self.header.join(",")
                ),
            ));
        }
        Ok(())
    }

    fn expect_rows(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(self.error(1, "no data rows".to_owned()));
        }
        Ok(())
    }

    fn error(&self, line: u64, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn number(&self, line: u64, rec: &StringRecord, col: usize) -> Result<f64> {
        let raw = rec.get(col).unwrap_or("");
        raw.parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan())
            .ok_or_else(|| {
                let name = self.header.get(col).map_or("?", String::as_str);
                self.error(line, format!("column '{name}': '{raw}' is not a number"))
            })
    }

    fn integer(&self, line: u64, rec: &StringRecord, col: usize) -> Result<usize> {
        let raw = rec.get(col).unwrap_or("");
        raw.parse::<usize>().map_err(|_| {
            let name = self.header.get(col).map_or("?", String::as_str);
            self.error(line, format!("column '{name}': '{raw}' is not a count"))
        })
    }

    /// Re-tags a validation error with the offending line.
    fn at<T>(&self, line: u64, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.error(line, e.to_string()))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_owned(),
        line,
        message: e.to_string(),
    }
}

/// Writes a header and string rows; the building block of every writer.
pub fn write_rows<W: Write>(out: W, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Io {
        path: PathBuf::from("<output>"),
        source: e.into(),
    };
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<output>"),
        source,
    })
}

/// Header and raw fields of any CSV written by this crate or the CLI.
pub fn read_rows_from<R: Read>(rdr: R, path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let t = Table::read(rdr, path)?;
    let rows = t
        .rows
        .iter()
        .map(|(_, rec)| rec.iter().map(str::to_owned).collect())
        .collect();
    Ok((t.header, rows))
}

/// File stem, used to name prospects.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

// ---- prospects ------------------------------------------------------------

/// Prospect CSV: header of state labels, one row per individual.
pub fn read_prospect_from<R: Read>(rdr: R, path: &Path, name: &str) -> Result<Prospect> {
    let t = Table::read(rdr, path)?;
    t.expect_rows()?;
    let m = t.header.len();
    let mut rows = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        rows.push(
            (0..m)
                .map(|c| t.number(*line, rec, c))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    t.at(1, Prospect::new(name, t.header.clone(), rows))
}

pub fn read_prospect(path: &Path) -> Result<Prospect> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_prospect_from(file, path, &stem(path))
}

pub fn write_prospect<W: Write>(out: W, p: &Prospect) -> Result<()> {
    let header: Vec<&str> = p.state_labels().iter().map(String::as_str).collect();
    let rows = p
        .rows()
        .iter()
        .map(|r| r.iter().map(|&v| format_number(v)).collect())
        .collect();
    write_rows(out, &header, rows)
}

// ---- incomes --------------------------------------------------------------

/// Income CSV: each data row is one distribution. The header row is
/// optional; a first row that parses entirely as numbers is data.
pub fn read_incomes(path: &Path) -> Result<Vec<IncomeVector>> {
    let t = Table::open(path)?;
    let mut out = Vec::new();
    let header_numeric: Option<Vec<f64>> = t.header.iter().map(|h| h.parse::<f64>().ok()).collect();
    if let Some(values) = header_numeric {
        out.push(t.at(1, IncomeVector::new(values))?);
    }
    for (line, rec) in &t.rows {
        let values = (0..rec.len())
            .map(|c| t.number(*line, rec, c))
            .collect::<Result<Vec<_>>>()?;
        out.push(t.at(*line, IncomeVector::new(values))?);
    }
    if out.is_empty() {
        return Err(t.error(1, "no income rows".to_owned()));
    }
    Ok(out)
}

// ---- states ---------------------------------------------------------------

pub fn read_states_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<StatePair>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&STATES_HEADER)?;
    t.expect_rows()?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let pair = StatePair::new(
                rec.get(0).unwrap_or(""),
                t.number(*line, rec, 1)?,
                t.number(*line, rec, 2)?,
            );
            t.at(*line, pair)
        })
        .collect()
}

pub fn read_states(path: &Path) -> Result<Vec<StatePair>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_states_from(file, path)
}

/// Header row of a CSV file, without parsing the rest.
pub fn peek_header(path: &Path) -> Result<Vec<String>> {
    Ok(Table::open(path)?.header)
}

// ---- bounds ---------------------------------------------------------------

pub fn read_bounds_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<EeBounds>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&BOUNDS_HEADER)?;
    t.expect_rows()?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let b = EeBounds::new(
                rec.get(0).unwrap_or(""),
                t.number(*line, rec, 1)?,
                (t.number(*line, rec, 2)?, t.number(*line, rec, 3)?),
                (t.number(*line, rec, 4)?, t.number(*line, rec, 5)?),
            );
            t.at(*line, b)
        })
        .collect()
}

pub fn read_bounds(path: &Path) -> Result<Vec<EeBounds>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_bounds_from(file, path)
}

pub fn write_bounds<W: Write>(out: W, rows: &[EeBounds]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|b| {
            vec![
                b.scheme.clone(),
                format_number(b.gamma),
                format_number(b.ee_a_low),
                format_number(b.ee_a_high),
                format_number(b.ee_b_low),
                format_number(b.ee_b_high),
            ]
        })
        .collect();
    write_rows(out, &BOUNDS_HEADER, rows)
}

// ---- assignments ----------------------------------------------------------

pub fn write_assignments<W: Write>(out: W, rows: &[Assignment]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|a| {
            vec![
                a.scheme.clone(),
                format_number(a.gamma),
                format_number(a.delta),
                format_number(a.worst_regret),
            ]
        })
        .collect();
    write_rows(out, &ASSIGNMENT_HEADER, rows)
}

pub fn read_assignments_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<Assignment>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&ASSIGNMENT_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(Assignment {
                scheme: rec.get(0).unwrap_or("").to_owned(),
                gamma: t.number(*line, rec, 1)?,
                delta: t.number(*line, rec, 2)?,
                worst_regret: t.number(*line, rec, 3)?,
            })
        })
        .collect()
}

// ---- regret curves --------------------------------------------------------

pub fn write_regret_profile<W: Write>(out: W, rows: &[RegretRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| {
            [r.delta, r.regret_a, r.regret_b, r.worst]
                .iter()
                .map(|&v| format_number(v))
                .collect()
        })
        .collect();
    write_rows(out, &REGRET_HEADER, rows)
}

pub fn read_regret_profile_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<RegretRow>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&REGRET_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(RegretRow {
                delta: t.number(*line, rec, 0)?,
                regret_a: t.number(*line, rec, 1)?,
                regret_b: t.number(*line, rec, 2)?,
                worst: t.number(*line, rec, 3)?,
            })
        })
        .collect()
}

// ---- posterior draws ------------------------------------------------------

/// Draws CSV, grouped by site in order of first appearance.
pub fn read_draws_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<PosteriorDraws>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&DRAWS_HEADER)?;
    t.expect_rows()?;
    let mut sites: Vec<(String, Vec<SiteParams>)> = Vec::new();
    for (line, rec) in &t.rows {
        let site = rec.get(0).unwrap_or("").to_owned();
        let params = t.at(
            *line,
            SiteParams::new(
                t.number(*line, rec, 1)?,
                t.number(*line, rec, 2)?,
                t.number(*line, rec, 3)?,
                t.number(*line, rec, 4)?,
            ),
        )?;
        match sites.iter_mut().find(|(s, _)| *s == site) {
            Some((_, draws)) => draws.push(params),
            None => sites.push((site, vec![params])),
        }
    }
    sites
        .into_iter()
        .map(|(site, draws)| PosteriorDraws::new(site, draws))
        .collect()
}

pub fn read_draws(path: &Path) -> Result<Vec<PosteriorDraws>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_draws_from(file, path)
}

pub fn write_draws<W: Write>(out: W, sites: &[PosteriorDraws]) -> Result<()> {
    let mut rows = Vec::new();
    for d in sites {
        for p in &d.draws {
            let mut row = vec![d.site.clone()];
            row.extend(
                [p.mu, p.zeta, p.sigma, p.lambda]
                    .iter()
                    .map(|&v| format_number(v)),
            );
            rows.push(row);
        }
    }
    write_rows(out, &DRAWS_HEADER, rows)
}

// ---- posterior summaries --------------------------------------------------

/// One row of the summary CSV: draw averages plus the plug-in evaluation at
/// the posterior mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub site: String,
    pub mean_tau: f64,
    pub prob_tau_pos: f64,
    pub mean_tau_ee: f64,
    pub prob_tau_ee_pos: f64,
    pub tau_at_mean: f64,
    pub tau_ee_at_mean: f64,
    pub bayes_delta: f64,
    pub plugin_delta: f64,
}

pub fn write_summaries<W: Write>(out: W, rows: &[SummaryRecord]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|s| {
            let mut row = vec![s.site.clone()];
            row.extend(
                [
                    s.mean_tau,
                    s.prob_tau_pos,
                    s.mean_tau_ee,
                    s.prob_tau_ee_pos,
                    s.tau_at_mean,
                    s.tau_ee_at_mean,
                    s.bayes_delta,
                    s.plugin_delta,
                ]
                .iter()
                .map(|&v| format_number(v)),
            );
            row
        })
        .collect();
    write_rows(out, &SUMMARY_HEADER, rows)
}

pub fn read_summaries_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<SummaryRecord>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&SUMMARY_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            let n = |c| t.number(*line, rec, c);
            Ok(SummaryRecord {
                site: rec.get(0).unwrap_or("").to_owned(),
                mean_tau: n(1)?,
                prob_tau_pos: n(2)?,
                mean_tau_ee: n(3)?,
                prob_tau_ee_pos: n(4)?,
                tau_at_mean: n(5)?,
                tau_ee_at_mean: n(6)?,
                bayes_delta: n(7)?,
                plugin_delta: n(8)?,
            })
        })
        .collect()
}

// ---- simulation agreement -------------------------------------------------

pub fn write_agreement<W: Write>(out: W, rows: &[AgreementRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.sample_size.to_string(),
                r.replications.to_string(),
                r.agreements.to_string(),
                r.skipped.to_string(),
                format_number(r.rate()),
            ]
        })
        .collect();
    write_rows(out, &AGREEMENT_HEADER, rows)
}

pub fn read_agreement_from<R: Read>(rdr: R, path: &Path) -> Result<Vec<AgreementRow>> {
    let t = Table::read(rdr, path)?;
    t.expect_header(&AGREEMENT_HEADER)?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(AgreementRow {
                sample_size: t.integer(*line, rec, 0)?,
                replications: t.integer(*line, rec, 1)?,
                agreements: t.integer(*line, rec, 2)?,
                skipped: t.integer(*line, rec, 3)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("mem.csv")
    }

    #[test]
    fn format_has_seventeen_significant_digits() {
        assert_eq!(format_number(0.5892857142857143), "0.58928571428571430");
        assert_eq!(format_number(2.0), "2.0000000000000000");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-12.5), "-12.500000000000000");
        assert_eq!(format_number(1.5e-9), "1.5000000000000000e-9");
    }

    proptest! {
        #[test]
        fn format_round_trips(x in prop::num::f64::NORMAL) {
            prop_assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn prospect_round_trip() {
        let src = "state_1,state_2\n4,2\n6,2\n5,2\n";
        let a = read_prospect_from(src.as_bytes(), p(), "a").unwrap();
        assert_eq!(a.rows(), &[vec![4.0, 2.0], vec![6.0, 2.0], vec![5.0, 2.0]]);
        let mut buf = Vec::new();
        write_prospect(&mut buf, &a).unwrap();
        assert_eq!(read_prospect_from(&buf[..], p(), "a").unwrap(), a);
    }

    #[test]
    fn parse_errors_name_file_and_line() {
        let src = "scheme,gamma,ee_a_low,ee_a_high,ee_b_low,ee_b_high\nhm,0,5.4,10.7,6.1,12\nlee,0,7.9,x,7.5,8.7\n";
        let err = read_bounds_from(src.as_bytes(), Path::new("b.csv")).unwrap_err();
        match err {
            Error::Parse {
                path,
                line,
                message,
            } => {
                assert_eq!(path, Path::new("b.csv"));
                assert_eq!(line, 3);
                assert!(message.contains("ee_a_high"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_rows_report_line() {
        let src = "scheme,gamma,ee_a_low,ee_a_high,ee_b_low,ee_b_high\nhm,0,10.7,5.4,6.1,12\n";
        let err = read_bounds_from(src.as_bytes(), p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_and_headerless_files() {
        assert!(matches!(
            read_bounds_from("".as_bytes(), p()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(read_bounds_from(
            "scheme,gamma,ee_a_low,ee_a_high,ee_b_low,ee_b_high\n".as_bytes(),
            p()
        )
        .is_err());
        assert!(read_draws_from("a,b\n1,2\n".as_bytes(), p()).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let src = "site,mu,zeta,sigma,lambda\nx,1,2,3\n";
        assert!(matches!(
            read_draws_from(src.as_bytes(), p()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn draws_group_by_site_in_order() {
        let src = "site,mu,zeta,sigma,lambda\nB,1,0,1,1\nA,2,0,1,1\nB,3,0,1,1\n";
        let sites = read_draws_from(src.as_bytes(), p()).unwrap();
        assert_eq!(sites.len(), 2);
        assert_eq!(sites[0].site, "B");
        assert_eq!(sites[0].draws.len(), 2);
        let mut buf = Vec::new();
        write_draws(&mut buf, &sites).unwrap();
        assert_eq!(read_draws_from(&buf[..], p()).unwrap(), sites);
        let bad = "site,mu,zeta,sigma,lambda\nx,1,0,0,1\n";
        assert!(read_draws_from(bad.as_bytes(), p()).is_err());
    }

    #[test]
    fn emitted_tables_reparse() {
        let rows = vec![Assignment {
            scheme: "hm".into(),
            gamma: 2.0,
            delta: 0.4271,
            worst_regret: 1.0 / 3.0,
        }];
        let mut buf = Vec::new();
        write_assignments(&mut buf, &rows).unwrap();
        assert_eq!(read_assignments_from(&buf[..], p()).unwrap(), rows);

        let curve = vec![RegretRow {
            delta: 0.5,
            regret_a: 2.3,
            regret_b: 3.3,
            worst: 3.3,
        }];
        let mut buf = Vec::new();
        write_regret_profile(&mut buf, &curve).unwrap();
        assert_eq!(read_regret_profile_from(&buf[..], p()).unwrap(), curve);

        let agree = vec![AgreementRow {
            sample_size: 10,
            replications: 5,
            agreements: 4,
            skipped: 0,
        }];
        let mut buf = Vec::new();
        write_agreement(&mut buf, &agree).unwrap();
        assert_eq!(read_agreement_from(&buf[..], p()).unwrap(), agree);

        let summary = vec![SummaryRecord {
            site: "Morocco".into(),
            mean_tau: -2.57,
            prob_tau_pos: 0.227,
            mean_tau_ee: 2.55,
            prob_tau_ee_pos: 0.824,
            tau_at_mean: -2.5,
            tau_ee_at_mean: 2.5,
            bayes_delta: 1.0,
            plugin_delta: 1.0,
        }];
        let mut buf = Vec::new();
        write_summaries(&mut buf, &summary).unwrap();
        assert_eq!(read_summaries_from(&buf[..], p()).unwrap(), summary);

        let bounds = vec![EeBounds::new("lee", 2.0, (6.6, 6.6), (6.5, 7.7)).unwrap()];
        let mut buf = Vec::new();
        write_bounds(&mut buf, &bounds).unwrap();
        assert_eq!(read_bounds_from(&buf[..], p()).unwrap(), bounds);
    }

    #[test]
    fn states_file() {
        let src = "label,ee_a,ee_b\nlow,1,3\nhigh,3,1\n";
        let s = read_states_from(src.as_bytes(), p()).unwrap();
        assert_eq!(s[1].label, "high");
        assert!(read_states_from("label,ee_a,ee_b\nx,0,1\n".as_bytes(), p()).is_err());
    }
}
