//! BLT ballot files.
//!
//! ```text
//! 4 2
//! -3
//! 19 1 2 0
//! 41 2 1 4 0
//! 0
//! "Alice (Green)"
//! "Bob"
//! "Carol"
//! "Dan"
//! "Example Ward"
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::ModelError;
use crate::model::{BallotType, Candidate, CandidateId, Election, PreferenceProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct BltError {
    pub line: usize,
    pub kind: BltErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BltErrorKind {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("expected header \"<candidates> <seats>\"")]
    Header,
    #[error("bad withdrawal entry {0:?}")]
    Withdrawal(String),
    #[error("bad number {0:?}")]
    Number(String),
    #[error("ballot count must be at least 1")]
    ZeroCount,
    #[error("ballot line must end with 0")]
    Unterminated,
    #[error("empty ranking")]
    EmptyRanking,
    #[error("candidate {0} listed twice")]
    Duplicate(u32),
    #[error("candidate index {0} out of range")]
    OutOfRange(u32),
    #[error("missing \"0\" line after the ballots")]
    MissingTerminator,
    #[error("expected a quoted candidate name")]
    Name,
    #[error("expected a quoted election title")]
    Title,
    #[error("unexpected content after the title")]
    Trailing,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A parsed ballot file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedBlt {
    pub election: Election,
    pub title: String,
}

fn err(line: usize, kind: BltErrorKind) -> BltError {
    BltError { line, kind }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, BltError> {
    tok.parse()
        .map_err(|_| err(line, BltErrorKind::Number(tok.to_string())))
}

fn quoted(s: &str) -> Option<&str> {
    s.strip_prefix('"')?.strip_suffix('"')
}

/// Splits `"Name (Party)"` into name and party.
fn split_party(s: &str) -> (String, Option<String>) {
    if let Some(open) = s.strip_suffix(')').and_then(|r| r.rfind(" (")) {
        let name = s[..open].trim();
        let party = s[open + 2..s.len() - 1].trim();
        if !name.is_empty() && !party.is_empty() {
            return (name.to_string(), Some(party.to_string()));
        }
    }
    (s.trim().to_string(), None)
}

pub fn parse_blt_bytes(bytes: &[u8]) -> Result<ParsedBlt, BltError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_blt(text),
        Err(e) => {
            let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
            Err(err(line, BltErrorKind::Encoding))
        }
    }
}

pub fn parse_blt(text: &str) -> Result<ParsedBlt, BltError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let last_line = text.lines().count().max(1);

    let (hl, header) = lines.next().ok_or_else(|| err(1, BltErrorKind::Header))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(err(hl, BltErrorKind::Header));
    }
    let n: usize = head[0].parse().map_err(|_| err(hl, BltErrorKind::Header))?;
    let seats: usize = head[1].parse().map_err(|_| err(hl, BltErrorKind::Header))?;
    if n == 0 || n > u32::MAX as usize {
        return Err(err(hl, BltErrorKind::Header));
    }

    let mut withdrawn = BTreeSet::new();
    while let Some(&(ln, line)) = lines.peek() {
        if !line.starts_with('-') {
            break;
        }
        for tok in line.split_whitespace() {
            let id = tok
                .strip_prefix('-')
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|&d| d >= 1 && d as usize <= n)
                .ok_or_else(|| err(ln, BltErrorKind::Withdrawal(tok.to_string())))?;
            withdrawn.insert(CandidateId(id));
        }
        lines.next();
    }

    let mut ballots = Vec::new();
    let mut terminated = false;
    for (ln, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks == ["0"] {
            terminated = true;
            break;
        }
        if line.starts_with('"') {
            return Err(err(ln, BltErrorKind::MissingTerminator));
        }
        let count: u64 = number(ln, toks[0])?;
        if count == 0 {
            return Err(err(ln, BltErrorKind::ZeroCount));
        }
        if toks.last() != Some(&"0") || toks.len() < 2 {
            return Err(err(ln, BltErrorKind::Unterminated));
        }
        let body = &toks[1..toks.len() - 1];
        if body.is_empty() {
            return Err(err(ln, BltErrorKind::EmptyRanking));
        }
        let mut ranking = Vec::with_capacity(body.len());
        let mut seen = BTreeSet::new();
        for tok in body {
            let id: u32 = number(ln, tok)?;
            if id == 0 || id as usize > n {
                return Err(err(ln, BltErrorKind::OutOfRange(id)));
            }
            if !seen.insert(id) {
                return Err(err(ln, BltErrorKind::Duplicate(id)));
            }
            let c = CandidateId(id);
            if !withdrawn.contains(&c) {
                ranking.push(c);
            }
        }
        if !ranking.is_empty() {
            ballots.push(BallotType::new(ranking, count));
        }
    }
    if !terminated {
        return Err(err(last_line, BltErrorKind::MissingTerminator));
    }

    let mut roster = Vec::with_capacity(n);
    for i in 0..n {
        let (ln, line) = lines.next().ok_or_else(|| err(last_line, BltErrorKind::Name))?;
        let inner = quoted(line).ok_or_else(|| err(ln, BltErrorKind::Name))?;
        let (name, party) = split_party(inner);
        let mut c = Candidate::new(CandidateId::from_index(i), name);
        c.party = party;
        roster.push(c);
    }
    let (tl, title) = lines.next().ok_or_else(|| err(last_line, BltErrorKind::Title))?;
    let title = quoted(title).ok_or_else(|| err(tl, BltErrorKind::Title))?.to_string();
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, BltErrorKind::Trailing));
    }

    let profile = PreferenceProfile::new(roster, ballots).map_err(|e| err(hl, e.into()))?;
    let election = Election::with_withdrawn(profile, seats, withdrawn).map_err(|e| err(hl, e.into()))?;
    Ok(ParsedBlt { election, title })
}

/// Canonical BLT rendering: one line per canonical ballot type.
pub fn write_blt(election: &Election, title: Option<&str>) -> String {
    let profile = election.profile();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", profile.num_candidates(), election.seats());
    if !election.withdrawn().is_empty() {
        let ids: Vec<String> = election.withdrawn().iter().map(|c| format!("-{}", c.0)).collect();
        let _ = writeln!(out, "{}", ids.join(" "));
    }
    for b in profile.ballots() {
        let _ = write!(out, "{}", b.count);
        for c in &b.ranking {
            let _ = write!(out, " {}", c.0);
        }
        out.push_str(" 0\n");
    }
    out.push_str("0\n");
    for c in profile.roster() {
        match &c.party {
            Some(p) => {
                let _ = writeln!(out, "\"{} ({})\"", c.name, p);
            }
            None => {
                let _ = writeln!(out, "\"{}\"", c.name);
            }
        }
    }
    let _ = writeln!(out, "\"{}\"", title.unwrap_or(""));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_profile;

    const TABLE1: &str = "4 2
19 1 2 0
41 1 2 3 4 0
60 1 3 4 0
15 1 4 0
73 2 3 1 0
51 2 1 4 3 0
19 2 4 3 1 0
57 3 1 0
12 3 2 1 4 0
40 3 4 2 1 0
8 4 1 3 0
47 4 3 2 0
59 4 2 0
0
\"A\"
\"B\"
\"C\"
\"D\"
\"Example\"
";

    #[test]
    fn parses_example() {
        let p = parse_blt(TABLE1).unwrap();
        assert_eq!(p.election.profile().total_voters(), 501);
        assert_eq!(p.election.seats(), 2);
        assert_eq!(p.title, "Example");
        assert_eq!(p.election.profile().ballots(), example_profile().ballots());
    }

    #[test]
    fn round_trip() {
        let p = parse_blt(TABLE1).unwrap();
        let text = write_blt(&p.election, Some(&p.title));
        assert_eq!(parse_blt(&text).unwrap(), p);
        assert_eq!(write_blt(&parse_blt(&text).unwrap().election, Some("Example")), text);
    }

    #[test]
    fn crlf_and_party() {
        let text = "2 1\r\n3 1 2 0\r\n2 2 0\r\n0\r\n\"Ann Smith (SNP)\"\r\n\"Bo\"\r\n\"T\"\r\n";
        let p = parse_blt(text).unwrap();
        let roster = p.election.profile().roster();
        assert_eq!(roster[0].name, "Ann Smith");
        assert_eq!(roster[0].party.as_deref(), Some("SNP"));
        assert_eq!(roster[1].party, None);
    }

    #[test]
    fn withdrawn_candidates_stripped() {
        let text = "3 1\n-2\n4 2 1 0\n3 2 0\n2 3 0\n0\n\"A\"\n\"B\"\n\"C\"\n\"T\"\n";
        let p = parse_blt(text).unwrap();
        assert!(p.election.is_withdrawn(CandidateId(2)));
        assert_eq!(p.election.profile().total_voters(), 6);
        assert_eq!(p.election.profile().num_candidates(), 3);
    }

    fn line_of(text: &str) -> (usize, BltErrorKind) {
        let e = parse_blt(text).unwrap_err();
        (e.line, e.kind)
    }

    #[test]
    fn located_errors() {
        assert_eq!(line_of("4\n").0, 1);
        assert_eq!(
            line_of("2 1\n3 1 1 0\n0\n\"A\"\n\"B\"\n\"T\"\n"),
            (2, BltErrorKind::Duplicate(1))
        );
        assert_eq!(
            line_of("2 1\n3 1 0\n3 1 5 0\n0\n\"A\"\n\"B\"\n\"T\"\n"),
            (3, BltErrorKind::OutOfRange(5))
        );
        assert_eq!(
            line_of("2 1\n3 0\n0\n\"A\"\n\"B\"\n\"T\"\n"),
            (2, BltErrorKind::EmptyRanking)
        );
        assert_eq!(
            line_of("2 1\n3 1 0\n\"A\"\n\"B\"\n\"T\"\n").1,
            BltErrorKind::MissingTerminator
        );
        assert_eq!(
            line_of("2 1\n3 1 2\n0\n\"A\"\n\"B\"\n\"T\"\n"),
            (2, BltErrorKind::Unterminated)
        );
        assert_eq!(line_of("2 1\n3 1 0\n0\nA\n\"B\"\n\"T\"\n"), (4, BltErrorKind::Name));
        assert_eq!(
            line_of("4 2\n0\n\"A\"\n\"B\"\n\"C\"\n\"D\"\n\"T\"\n").1,
            BltErrorKind::Model(ModelError::NoVoters)
        );
        assert_eq!(
            line_of("2 1\n3 1 0\n0\n\"A\"\n\"B\"\n\"T\"\nextra\n"),
            (7, BltErrorKind::Trailing)
        );
        assert_eq!(parse_blt_bytes(b"2 1\n\xff\n").unwrap_err().line, 2);
    }

    mod properties {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::strategies::arb_election;

        proptest! {
            #[test]
            fn any_bytes_parse_or_locate(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
                if let Err(e) = parse_blt_bytes(&bytes) {
                    prop_assert!(e.line >= 1);
                }
            }

            #[test]
            fn near_miss_text_parses_or_locates(lines in prop::collection::vec("[-0-9 \"a-z()]{0,12}", 0..12)) {
                let text = lines.join("\n");
                if let Err(e) = parse_blt(&text) {
                    prop_assert!(e.line >= 1 && e.line <= lines.len().max(1) + 1);
                }
            }

            #[test]
            fn written_files_read_back(e in arb_election(6, 10, 50)) {
                let text = write_blt(&e, Some("T"));
                let back = parse_blt(&text).unwrap();
                prop_assert_eq!(&back.election, &e);
                prop_assert_eq!(back.election.fingerprint(), e.fingerprint());
            }
        }
    }
}
