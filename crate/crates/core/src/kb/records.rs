use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

const YEARS: std::ops::RangeInclusive<i32> = 1950..=2100;

fn check_year(year: i32, problems: &mut Vec<String>) {
    if !YEARS.contains(&year) {
        problems.push(format!("year {year} outside {}..={}", YEARS.start(), YEARS.end()));
    }
}

fn check_nonempty(field: &str, value: &str, problems: &mut Vec<String>) {
    if value.trim().is_empty() {
        problems.push(format!("{field} is empty"));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub venue: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub conclusion: Option<String>,
    /// Stored section text keyed by lowercase section name.
    #[serde(default)]
    pub sections: BTreeMap<String, String>,
    #[serde(default)]
    pub citations: Option<u64>,
    #[serde(default)]
    pub figures: Vec<String>,
    pub url: String,
    pub bib: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonRecord {
    pub name: String,
    #[serde(default)]
    pub affiliation: Option<String>,
    /// As reported by the source; not checked against the paper count.
    #[serde(default)]
    pub h_index: Option<u32>,
    /// Paper ids.
    #[serde(default)]
    pub papers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deadline {
    pub kind: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferenceRecord {
    pub id: String,
    pub name: String,
    pub year: i32,
    pub venue: String,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    #[serde(default)]
    pub deadlines: Vec<Deadline>,
}

impl ConferenceRecord {
    pub fn deadline(&self, kind: &str) -> Option<&Deadline> {
        self.deadlines.iter().find(|d| d.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Keynote,
    Tutorial,
    Social,
    Session,
    Oral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: String,
    /// Conference display name, e.g. `NAACL 2019`.
    pub conference: String,
    pub kind: EventKind,
    pub title: String,
    #[serde(default)]
    pub speakers: Vec<String>,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsItem {
    pub date: NaiveDate,
    pub headline: String,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub topics: Vec<String>,
    pub url: String,
}

/// Invariant checks applied to every record at load time.
pub trait Validate {
    fn problems(&self) -> Vec<String>;
}

impl Validate for PaperRecord {
    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        check_nonempty("id", &self.id, &mut p);
        check_nonempty("title", &self.title, &mut p);
        check_year(self.year, &mut p);
        p
    }
}

impl Validate for PersonRecord {
    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        check_nonempty("name", &self.name, &mut p);
        p
    }
}

impl Validate for ConferenceRecord {
    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        check_nonempty("id", &self.id, &mut p);
        check_nonempty("name", &self.name, &mut p);
        check_year(self.year, &mut p);
        if let (Some(s), Some(e)) = (self.start, self.end) {
            if e < s {
                p.push(format!("end {e} before start {s}"));
            }
        }
        if let Some(start) = self.start {
            for d in &self.deadlines {
                if d.date > start {
                    p.push(format!("{} deadline {} after start {start}", d.kind, d.date));
                }
            }
        }
        p
    }
}

impl Validate for EventRecord {
    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        check_nonempty("id", &self.id, &mut p);
        check_nonempty("title", &self.title, &mut p);
        if self.end < self.start {
            p.push(format!("end {} before start {}", self.end, self.start));
        }
        check_year(self.start.year(), &mut p);
        p
    }
}

impl Validate for NewsItem {
    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        check_nonempty("headline", &self.headline, &mut p);
        check_year(self.date.year(), &mut p);
        p
    }
}
