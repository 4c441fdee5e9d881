//! File formats: grid boards and `quadcomplex` square lists.

use std::fmt;
use std::path::Path;

use crate::disk::{DiskError, QuadDisk};

#[derive(Debug)]
pub enum ReadError {
    Io(std::io::Error),
    Format(String),
    Disk(DiskError),
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadError::Io(e) => write!(f, "{e}"),
            ReadError::Format(msg) => write!(f, "{msg}"),
            ReadError::Disk(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ReadError {}

impl From<DiskError> for ReadError {
    fn from(e: DiskError) -> Self {
        ReadError::Disk(e)
    }
}

impl From<std::io::Error> for ReadError {
    fn from(e: std::io::Error) -> Self {
        ReadError::Io(e)
    }
}

/// Parses the complex text format: a `quadcomplex` header, then one
/// `s <index>: <v0> <v1> <v2> <v3>` line per square.
pub fn parse_complex(text: &str) -> Result<QuadDisk, ReadError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    match lines.next().map(str::trim) {
        Some("quadcomplex") => {}
        _ => return Err(ReadError::Format("missing quadcomplex header".into())),
    }
    let mut entries: Vec<(usize, [String; 4])> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| ReadError::Format(format!("line {}: {msg}", lineno + 2));
        let rest = line
            .strip_prefix('s')
            .ok_or_else(|| err("expected `s <index>: <v0> <v1> <v2> <v3>`"))?;
        let (index, verts) = rest
            .split_once(':')
            .ok_or_else(|| err("missing `:` separator"))?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| err("square index is not a number"))?;
        let tokens: Vec<&str> = verts.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(err("expected exactly four vertex tokens"));
        }
        entries.push((
            index,
            [
                tokens[0].to_string(),
                tokens[1].to_string(),
                tokens[2].to_string(),
                tokens[3].to_string(),
            ],
        ));
    }
    entries.sort_by_key(|&(i, _)| i);
    for (expect, &(i, _)) in entries.iter().enumerate() {
        if i != expect {
            return Err(ReadError::Format(format!(
                "square indices must cover 0..{} exactly, found {i}",
                entries.len()
            )));
        }
    }
    let squares: Vec<[String; 4]> = entries.into_iter().map(|(_, sq)| sq).collect();
    Ok(QuadDisk::from_squares(&squares)?)
}

/// Reads either format, sniffing the `quadcomplex` header.
pub fn parse_disk(text: &str) -> Result<QuadDisk, ReadError> {
    let first = text
        .lines()
        .map(|l| l.trim_end_matches('\r').trim())
        .find(|l| !l.is_empty());
    if first == Some("quadcomplex") {
        parse_complex(text)
    } else {
        Ok(QuadDisk::parse_board(text)?)
    }
}

pub fn read_disk(path: &Path) -> Result<QuadDisk, ReadError> {
    let text = std::fs::read_to_string(path)?;
    parse_disk(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let d = QuadDisk::parse_board("##\n#.").unwrap();
        let text = d.to_complex_text();
        let back = parse_complex(&text).unwrap();
        assert_eq!(back.num_squares(), d.num_squares());
        assert_eq!(back.counts(), d.counts());
    }

    #[test]
    fn sniffs_board_and_complex() {
        assert!(parse_disk("##\n##").is_ok());
        assert!(parse_disk("quadcomplex\ns 0: a b c d\n").is_ok());
    }

    #[test]
    fn format_errors() {
        assert!(matches!(
            parse_complex("s 0: a b c d\n"),
            Err(ReadError::Format(_))
        ));
        assert!(matches!(
            parse_complex("quadcomplex\ns 0: a b c\n"),
            Err(ReadError::Format(_))
        ));
        assert!(matches!(
            parse_complex("quadcomplex\ns 1: a b c d\n"),
            Err(ReadError::Format(_))
        ));
    }

    #[test]
    fn crlf_accepted() {
        assert!(parse_disk("##\r\n##\r\n").is_ok());
    }
}
