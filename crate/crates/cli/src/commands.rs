//! One function per subcommand.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Serialize;
use stvaudit::anomaly::{
    analyze, verify_certificate, AnomalyCertificate, ElectionAnalysis, Modification, SearchKind, SearchOptions,
};
use stvaudit::closeness::{
    closeness_report, closeness_series, write_series_csv, ClosenessReport, SeriesInput, PERCENTS,
};
use stvaudit::corpus::results::{summary_csv, write_certificates, SummaryRow};
use stvaudit::corpus::stats::descriptive_stats;
use stvaudit::corpus::{read_ballot_file, Metadata};
use stvaudit::engine::RoundAction;
use stvaudit::{tabulate as count, CandidateId, Election, TabulationRecord, TiePolicy};

use crate::input::{load, par_map, report, Failure, Loaded};
use crate::{table, Format, Inputs, Output, Search};

fn names(e: &Election, ids: impl IntoIterator<Item = CandidateId>) -> String {
    ids.into_iter()
        .map(|c| e.profile().name(c).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn ranking(e: &Election, r: &[CandidateId]) -> String {
    r.iter().map(|&c| e.profile().name(c)).collect::<Vec<_>>().join(" > ")
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(path.display(), e))
}

fn out_dir(output: &Output) -> Result<Option<&Path>, Failure> {
    match &output.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir.display(), e))?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

/// Prints `text` and, with `--out`, saves it as `<name>.<ext>`.
fn emit(output: &Output, name: &str, text: &str) -> Result<(), Failure> {
    print!("{text}");
    if let Some(dir) = out_dir(output)? {
        let ext = match output.format {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        };
        write(&dir.join(format!("{name}.{ext}")), text)?;
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

// ---------------------------------------------------------------- tabulate

#[derive(Serialize)]
struct TabulationOut<'a> {
    election: &'a str,
    metadata: &'a Metadata,
    candidates: Vec<&'a str>,
    record: &'a TabulationRecord,
}

fn action_text(e: &Election, a: &RoundAction) -> String {
    match a {
        RoundAction::Surplus { candidate, surplus } => {
            format!(
                "surplus {} {}",
                e.profile().name(*candidate),
                surplus.display_rounded(3)
            )
        }
        RoundAction::Elimination { candidate } => format!("exclude {}", e.profile().name(*candidate)),
        RoundAction::Complete => "-".to_string(),
    }
}

fn rounds_table(e: &Election, rec: &TabulationRecord) -> String {
    let heads: Vec<String> = std::iter::once("candidate".to_string())
        .chain(rec.rounds.iter().map(|r| r.number.to_string()))
        .collect();
    let heads: Vec<&str> = heads.iter().map(String::as_str).collect();
    let mut rows: Vec<Vec<String>> = e
        .active_candidates()
        .into_iter()
        .map(|c| {
            std::iter::once(e.profile().name(c).to_string())
                .chain(rec.rounds.iter().map(|r| {
                    if let Some(t) = r.totals.get(&c) {
                        let mark = if r.elected.contains(&c) { "*" } else { "" };
                        format!("{}{mark}", t.display_rounded(3))
                    } else if let Some(h) = r.held.get(&c) {
                        h.display_rounded(3)
                    } else {
                        "-".to_string()
                    }
                }))
                .collect()
        })
        .collect();
    let label_row = |label: &str, f: &dyn Fn(&stvaudit::engine::Round) -> String| {
        std::iter::once(label.to_string())
            .chain(rec.rounds.iter().map(f))
            .collect::<Vec<_>>()
    };
    rows.push(label_row("exhausted", &|r| r.exhausted.display_rounded(3)));
    rows.push(label_row("loss", &|r| r.loss.display_rounded(3)));
    rows.push(label_row("action", &|r| action_text(e, &r.action)));
    table::render(&heads, &rows)
}

pub fn tabulate(inputs: &Inputs, output: &Output) -> Result<(), Failure> {
    let policy = TiePolicy::from(inputs.tie_policy);
    let (loaded, mut failures) = load(inputs)?;
    let (records, fails) = par_map(&loaded, |l| {
        count(&l.file.election, policy)
            .map(|r| (l, r))
            .map_err(|e| Failure::tie(&l.label, e))
    });
    failures.extend(fails);
    let text = match output.format {
        Format::Json => {
            let out: Vec<TabulationOut> = records
                .iter()
                .map(|(l, rec)| TabulationOut {
                    election: &l.label,
                    metadata: &l.file.metadata,
                    candidates: l
                        .file
                        .election
                        .profile()
                        .roster()
                        .iter()
                        .map(|c| c.name.as_str())
                        .collect(),
                    record: rec,
                })
                .collect();
            json(&out)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (l, rec) in &records {
                let e = &l.file.election;
                for r in &rec.rounds {
                    let entries = r
                        .totals
                        .iter()
                        .map(|(c, t)| (c, t, if r.elected.contains(c) { "elected" } else { "continuing" }))
                        .chain(r.held.iter().map(|(c, t)| (c, t, "held")));
                    for (c, t, status) in entries {
                        rows.push(vec![
                            l.label.clone(),
                            r.number.to_string(),
                            c.to_string(),
                            e.profile().name(*c).to_string(),
                            t.to_string(),
                            status.to_string(),
                            action_text(e, &r.action),
                        ]);
                    }
                }
            }
            csv_text(
                &["election", "round", "candidate", "name", "value", "status", "action"],
                &rows,
            )
        }
        Format::Table => {
            let mut s = String::new();
            for (l, rec) in &records {
                let e = &l.file.election;
                s.push_str(&format!(
                    "{}  seats {}  voters {}  quota {}\n",
                    l.label,
                    rec.seats,
                    rec.total_voters,
                    rec.quota.display_rounded(0)
                ));
                s.push_str(&rounds_table(e, rec));
                s.push_str(&format!("winners: {}\n", names(e, rec.winners.iter().copied())));
                for t in &rec.tie_breaks {
                    s.push_str(&format!(
                        "tie in round {} between {} broken for {}\n",
                        t.round,
                        names(e, t.candidates.iter().copied()),
                        e.profile().name(t.chosen)
                    ));
                }
                s.push('\n');
            }
            s
        }
    };
    emit(output, "tabulation", &text)?;
    report(failures)
}

// --------------------------------------------------------------- anomalies

fn kinds(search: &Search) -> BTreeSet<SearchKind> {
    search.kinds.iter().copied().collect()
}

fn describe_modification(e: &Election, m: &Modification) -> String {
    match m {
        Modification::ShiftUp { from, to, count }
        | Modification::ShiftDown { from, to, count }
        | Modification::BulletRewrite { from, to, count } => {
            format!("{count} x [{}] -> [{}]", ranking(e, from), ranking(e, to))
        }
        Modification::Remove { from, count } => format!("remove {count} x [{}]", ranking(e, from)),
        Modification::SeatCount { seats } => format!("{seats} seat{}", if *seats == 1 { "" } else { "s" }),
    }
}

fn describe(e: &Election, c: &AnomalyCertificate) -> String {
    let mods: Vec<String> = c.modifications.iter().map(|m| describe_modification(e, m)).collect();
    let flags: Vec<String> = c
        .flags
        .iter()
        .map(|f| {
            serde_json::to_value(f)
                .expect("flag")
                .as_str()
                .unwrap_or_default()
                .to_string()
        })
        .collect();
    let mut s = format!(
        "  {} ({}): {}; winners {{{}}} -> {{{}}}",
        c.kind.label(),
        e.profile().name(c.focal),
        mods.join(", "),
        names(e, c.original_winners.iter().copied()),
        names(e, c.modified_winners.iter().copied()),
    );
    if !flags.is_empty() {
        s.push_str(&format!(" [{}]", flags.join(", ")));
    }
    s
}

struct Analyzed<'a> {
    loaded: &'a Loaded,
    analysis: ElectionAnalysis,
    row: SummaryRow,
}

fn analyze_one(
    l: &Loaded,
    kinds: &BTreeSet<SearchKind>,
    opts: &SearchOptions,
) -> Result<(ElectionAnalysis, SummaryRow), Failure> {
    let e = &l.file.election;
    let analysis = analyze(e, kinds, opts).map_err(|err| Failure::tie(&l.label, err))?;
    let row = SummaryRow::new(
        &l.label,
        e.seats(),
        e.num_active(),
        e.profile().total_voters(),
        &analysis,
    );
    log::info!(
        "{}: {} certificates, {} probes",
        l.label,
        analysis.certificates.len(),
        analysis.probes
    );
    Ok((analysis, row))
}

#[derive(Serialize)]
struct AnomaliesOut<'a> {
    summary: &'a SummaryRow,
    certificates: &'a [AnomalyCertificate],
}

pub fn anomalies(inputs: &Inputs, search: &Search, output: &Output) -> Result<(), Failure> {
    let policy = TiePolicy::from(inputs.tie_policy);
    let (loaded, mut failures) = load(inputs)?;
    let opts = search.options(policy);
    let kinds = kinds(search);
    let (done, fails) = par_map(&loaded, |l| {
        let (analysis, row) = analyze_one(l, &kinds, &opts)?;
        Ok(Analyzed {
            loaded: l,
            analysis,
            row,
        })
    });
    failures.extend(fails);
    let rows: Vec<SummaryRow> = done.iter().map(|a| a.row.clone()).collect();
    let text = match output.format {
        Format::Json => json(
            &done
                .iter()
                .map(|a| AnomaliesOut {
                    summary: &a.row,
                    certificates: &a.analysis.certificates,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => summary_csv(&rows),
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.election.clone(),
                        r.seats.to_string(),
                        r.candidates.to_string(),
                        r.voters.to_string(),
                        r.committee_size.clone(),
                        r.upward.clone(),
                        r.downward.clone(),
                        r.no_show.clone(),
                        r.probes.to_string(),
                        if r.truncated { "truncated" } else { "" }.to_string(),
                        if r.skipped_first_round { "first round" } else { "" }.to_string(),
                    ]
                })
                .collect();
            let mut s = table::render(
                &[
                    "election",
                    "seats",
                    "n",
                    "voters",
                    "committee",
                    "upward",
                    "downward",
                    "no-show",
                    "probes",
                    "budget",
                    "skipped",
                ],
                &body,
            );
            for a in &done {
                if a.analysis.certificates.is_empty() {
                    continue;
                }
                s.push_str(&format!("\n{}\n", a.loaded.label));
                for c in &a.analysis.certificates {
                    s.push_str(&describe(&a.loaded.file.election, c));
                    s.push('\n');
                }
            }
            s
        }
    };
    print!("{text}");
    if let Some(dir) = out_dir(output)? {
        write(&dir.join("summary.csv"), &summary_csv(&rows))?;
        let certs = dir.join("certificates");
        for a in &done {
            write_certificates(&certs, &a.loaded.stem, &a.analysis.certificates)
                .map_err(|e| Failure::io(certs.display(), e))?;
        }
    }
    report(failures)
}

// --------------------------------------------------------------- closeness

#[derive(Serialize)]
struct ClosenessRow<'a> {
    election: &'a str,
    seats: usize,
    report: &'a ClosenessReport,
    any_anomaly: bool,
    ballot_anomaly: bool,
}

fn max_close(m: &BTreeMap<u32, bool>) -> String {
    m.iter()
        .filter(|(_, &v)| v)
        .map(|(p, _)| p.to_string())
        .next_back()
        .unwrap_or_else(|| "-".to_string())
}

fn closeness_csv(rows: &[(&Loaded, ClosenessReport, SummaryRow)]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(l, r, s)| {
            let e = &l.file.election;
            vec![
                l.label.clone(),
                e.seats().to_string(),
                r.first_round_terminated.to_string(),
                max_close(&r.three_close),
                max_close(&r.two_close),
                r.condorcet_committee
                    .as_ref()
                    .map_or_else(|| "none".to_string(), |c| names(e, c.iter().copied())),
                names(e, r.sntv_winners.iter().copied()),
                r.methods_agree.to_string(),
                s.any_anomaly().to_string(),
                s.ballot_anomaly().to_string(),
            ]
        })
        .collect();
    csv_text(
        &[
            "election",
            "seats",
            "first_round_terminated",
            "max_three_close",
            "max_two_close",
            "condorcet_committee",
            "sntv_winners",
            "methods_agree",
            "any_anomaly",
            "ballot_anomaly",
        ],
        &body,
    )
}

#[derive(Serialize)]
struct ClosenessOut<'a> {
    elections: Vec<ClosenessRow<'a>>,
    series: stvaudit::closeness::ClosenessSeries,
}

pub fn closeness(inputs: &Inputs, search: &Search, output: &Output) -> Result<(), Failure> {
    let policy = TiePolicy::from(inputs.tie_policy);
    let opts = search.options(policy);
    let kinds = kinds(search);
    let (loaded, mut failures) = load(inputs)?;
    let (done, fails) = par_map(&loaded, |l| {
        let e = &l.file.election;
        let tie = |err| Failure::tie(&l.label, err);
        let rec = count(e, policy).map_err(tie)?;
        let report = closeness_report(e, &rec, policy).map_err(tie)?;
        let (_, row) = analyze_one(l, &kinds, &opts)?;
        Ok((l, report, row))
    });
    failures.extend(fails);
    let inputs: Vec<SeriesInput> = done
        .iter()
        .map(|(_, report, row)| SeriesInput {
            report,
            any_anomaly: row.any_anomaly(),
            ballot_anomaly: row.ballot_anomaly(),
        })
        .collect();
    let series = closeness_series(&inputs);
    let named = [
        ("three_any", &series.three_any),
        ("three_excluding_committee", &series.three_excluding_committee),
        ("two_any", &series.two_any),
        ("two_excluding_committee", &series.two_excluding_committee),
    ];
    let text = match output.format {
        Format::Json => json(&ClosenessOut {
            elections: done
                .iter()
                .map(|(l, report, row)| ClosenessRow {
                    election: &l.label,
                    seats: l.file.election.seats(),
                    report,
                    any_anomaly: row.any_anomaly(),
                    ballot_anomaly: row.ballot_anomaly(),
                })
                .collect(),
            series: series.clone(),
        }),
        Format::Csv => closeness_csv(&done),
        Format::Table => {
            let mut s = String::new();
            let rendered = closeness_csv(&done);
            let mut rdr = csv::Reader::from_reader(rendered.as_bytes());
            let heads: Vec<String> = rdr.headers().expect("header").iter().map(str::to_string).collect();
            let heads: Vec<&str> = heads.iter().map(String::as_str).collect();
            let body: Vec<Vec<String>> = rdr
                .records()
                .map(|r| r.expect("own csv").iter().map(str::to_string).collect())
                .collect();
            s.push_str(&table::render(&heads, &body));
            if !done.is_empty() {
                let cell = |pts: &[stvaudit::closeness::SeriesPoint], i: usize| {
                    let pt = &pts[i];
                    format!("{}/{}", pt.anomalous_close_count, pt.close_count)
                };
                let body: Vec<Vec<String>> = PERCENTS
                    .enumerate()
                    .map(|(i, p)| {
                        std::iter::once(p.to_string())
                            .chain(named.iter().map(|(_, pts)| cell(pts, i)))
                            .collect()
                    })
                    .collect();
                s.push('\n');
                let mut heads = vec!["p"];
                heads.extend(named.iter().map(|(n, _)| *n));
                s.push_str(&table::render(&heads, &body));
            }
            s
        }
    };
    print!("{text}");
    if let Some(dir) = out_dir(output)? {
        write(&dir.join("closeness.csv"), &closeness_csv(&done))?;
        for (name, pts) in named {
            let path = dir.join(format!("series_{name}.csv"));
            let mut buf = Vec::new();
            write_series_csv(pts, &mut buf).map_err(|e| Failure::Operational(format!("{}: {e}", path.display())))?;
            write(&path, &String::from_utf8(buf).expect("utf-8"))?;
        }
    }
    report(failures)
}

// ------------------------------------------------------------------- stats

pub fn stats(inputs: &Inputs, output: &Output) -> Result<(), Failure> {
    let (loaded, failures) = load(inputs)?;
    let st = descriptive_stats(loaded.iter().map(|l| (l.label.as_str(), &l.file.election)));
    let text = match output.format {
        Format::Json => json(&st),
        Format::Csv => st.to_csv(),
        Format::Table => {
            let fmt2 = |x: f64| format!("{x:.2}");
            let per: Vec<Vec<String>> = st
                .elections
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        e.seats.to_string(),
                        e.candidates.to_string(),
                        e.voters.to_string(),
                        fmt2(e.mean_length),
                        format!("{:.1}", e.median_length),
                    ]
                })
                .collect();
            let mut s = table::render(&["election", "seats", "n", "voters", "mean", "median"], &per);
            let groups: Vec<Vec<String>> = st
                .by_seats
                .iter()
                .map(|(seats, g)| (seats.to_string(), "all".to_string(), g))
                .chain(
                    st.by_seats_and_candidates
                        .iter()
                        .map(|((seats, n), g)| (seats.to_string(), n.to_string(), g)),
                )
                .map(|(seats, n, g)| {
                    vec![
                        seats,
                        n,
                        g.elections.to_string(),
                        g.voters.to_string(),
                        fmt2(g.mean_length),
                        format!("{:.1}", g.median_length),
                    ]
                })
                .collect();
            s.push('\n');
            s.push_str(&table::render(
                &["seats", "n", "elections", "voters", "mean", "median"],
                &groups,
            ));
            s
        }
    };
    emit(output, "stats", &text)?;
    report(failures)
}

// ------------------------------------------------------------------ verify

#[derive(Serialize)]
struct VerifyOut {
    certificate: String,
    verified: bool,
    reason: Option<String>,
}

pub fn verify(election: &Path, certificates: &[PathBuf], format: Format) -> Result<(), Failure> {
    let file = read_ballot_file(election)?;
    let mut results = Vec::new();
    for path in certificates {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let cert = AnomalyCertificate::from_json(&text)
            .map_err(|e| Failure::Input(format!("{}: not a certificate: {e}", path.display())))?;
        let outcome = file
            .election
            .with_seats(cert.seats)
            .map_err(|e| e.to_string())
            .and_then(|e| verify_certificate(&e, &cert).map_err(|r| r.to_string()));
        results.push(VerifyOut {
            certificate: path.display().to_string(),
            verified: outcome.is_ok(),
            reason: outcome.err(),
        });
    }
    let text = match format {
        Format::Json => json(&results),
        Format::Csv => csv_text(
            &["certificate", "verified", "reason"],
            &results
                .iter()
                .map(|r| {
                    vec![
                        r.certificate.clone(),
                        r.verified.to_string(),
                        r.reason.clone().unwrap_or_default(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => results
            .iter()
            .map(|r| match &r.reason {
                None => format!("{}: verified\n", r.certificate),
                Some(why) => format!("{}: rejected: {why}\n", r.certificate),
            })
            .collect(),
    };
    print!("{text}");
    let rejected = results.iter().filter(|r| !r.verified).count();
    if rejected > 0 {
        return Err(Failure::Rejected(format!(
            "{rejected} of {} certificates rejected",
            results.len()
        )));
    }
    Ok(())
}
