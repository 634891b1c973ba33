use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GradeSource {
    Nra,
    Lcv,
}

impl FromStr for GradeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NRA" => Ok(GradeSource::Nra),
            "LCV" => Ok(GradeSource::Lcv),
            other => Err(Error::Validation(format!("unknown grade source {other:?}"))),
        }
    }
}

/// Letter grade with optional modifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LetterGrade {
    /// One of `A B C D F`.
    pub letter: char,
    /// `+1`, `0` or `-1`.
    pub modifier: i8,
}

impl FromStr for LetterGrade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('\u{2212}', "-");
        let mut chars = s.chars();
        let letter = chars
            .next()
            .map(|c| c.to_ascii_uppercase())
            .filter(|c| matches!(c, 'A' | 'B' | 'C' | 'D' | 'F'))
            .ok_or_else(|| Error::Validation(format!("bad letter grade {s:?}")))?;
        let modifier = match chars.as_str() {
            "" => 0,
            "+" => 1,
            "-" => -1,
            _ => return Err(Error::Validation(format!("bad letter grade {s:?}"))),
        };
        if letter == 'F' && modifier != 0 {
            return Err(Error::Validation(format!("bad letter grade {s:?}")));
        }
        Ok(LetterGrade { letter, modifier })
    }
}

impl fmt::Display for LetterGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.modifier {
            1 => "+",
            -1 => "-",
            _ => "",
        };
        write!(f, "{}{m}", self.letter)
    }
}

impl LetterGrade {
    /// Five-class label: `A=0, B=1, C=2, D=3, F=4`; modifiers collapse.
    pub fn five_class(self) -> usize {
        match self.letter {
            'A' => 0,
            'B' => 1,
            'C' => 2,
            'D' => 3,
            _ => 4,
        }
    }

    /// Binary paraphrase label: `A+, A, A-, B+` are positive.
    pub fn paraphrase_positive(self) -> bool {
        self.letter == 'A' || (self.letter == 'B' && self.modifier == 1)
    }
}

pub const NRA_CLASSES: [&str; 5] = ["A", "B", "C", "D", "F"];

/// Quartile bin of a 0..=100 score: `[0,25) [25,50) [50,75) [75,100]`.
pub fn lcv_bin(score: f64) -> Result<usize> {
    if !(0.0..=100.0).contains(&score) {
        return Err(Error::Validation(format!("LCV score {score} outside [0, 100]")));
    }
    Ok(((score / 25.0).floor() as usize).min(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RawGrade {
    Letter(LetterGrade),
    Score(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub politician: String,
    pub source: GradeSource,
    pub raw: RawGrade,
}

impl GradeRecord {
    /// Class label: five-class letter for NRA, quartile bin for LCV.
    pub fn class(&self) -> Result<usize> {
        match (self.source, self.raw) {
            (GradeSource::Nra, RawGrade::Letter(g)) => Ok(g.five_class()),
            (GradeSource::Lcv, RawGrade::Score(s)) => lcv_bin(s),
            _ => Err(Error::Validation(format!(
                "{}: grade kind does not match source",
                self.politician
            ))),
        }
    }

    /// Binary paraphrase label; letter grades only.
    pub fn paraphrase_positive(&self) -> Result<bool> {
        match self.raw {
            RawGrade::Letter(g) => Ok(g.paraphrase_positive()),
            RawGrade::Score(_) => Err(Error::Validation(format!(
                "{}: paraphrase labels need a letter grade",
                self.politician
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    politician: String,
    source: String,
    grade: String,
}

/// Parses a delimited grade table with header `politician,source,grade`.
/// NRA grades are letters, LCV grades 0..=100 scores.
pub fn parse_grades(text: &str, delimiter: u8) -> Result<Vec<GradeRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::schema(format!("grades line {line}"), e.to_string()))?;
        let source: GradeSource = row.source.parse()?;
        let raw = match source {
            GradeSource::Nra => RawGrade::Letter(row.grade.parse()?),
            GradeSource::Lcv => {
                let s: f64 = row.grade.parse().map_err(|_| {
                    Error::schema(format!("grades line {line}"), format!("bad score {:?}", row.grade))
                })?;
                lcv_bin(s)?;
                RawGrade::Score(s)
            }
        };
        out.push(GradeRecord {
            politician: row.politician,
            source,
            raw,
        });
    }
    Ok(out)
}

/// Reads a grade file; `.tsv` files are tab-delimited, others comma.
pub fn load_grades(path: impl AsRef<Path>) -> Result<Vec<GradeRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let delim = if path.extension().is_some_and(|e| e == "tsv") {
        b'\t'
    } else {
        b','
    };
    parse_grades(&text, delim)
}
