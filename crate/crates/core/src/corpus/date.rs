use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A calendar date in which any component may be missing.
///
/// Ordering compares `(year, month, day)` with missing components sorting
/// before every known value, so `??_??_77` precedes `01_01_77`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartialDate {
    year: Option<i32>,
    month: Option<u8>,
    day: Option<u8>,
}

impl PartialDate {
    /// Builds a date, discarding any component whose coarser components are
    /// unknown (a known day requires a known month and year).
    pub fn new(day: Option<u8>, month: Option<u8>, year: Option<i32>) -> Self {
        let month = month.filter(|m| (1..=12).contains(m));
        let day = day.filter(|d| (1..=31).contains(d));
        let month = if year.is_some() { month } else { None };
        let day = if month.is_some() { day } else { None };
        PartialDate { year, month, day }
    }

    pub fn unknown() -> Self {
        Self::default()
    }

    /// True when the known components place `self` strictly before `other`:
    /// compared field by field from the year down, stopping at the first
    /// component unknown on either side.
    pub fn certainly_before(&self, other: &PartialDate) -> bool {
        let pairs = [
            (self.year, other.year),
            (self.month.map(i32::from), other.month.map(i32::from)),
            (self.day.map(i32::from), other.day.map(i32::from)),
        ];
        for (a, b) in pairs {
            match (a, b) {
                (Some(a), Some(b)) if a != b => return a < b,
                (Some(_), Some(_)) => continue,
                _ => return false,
            }
        }
        false
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }

    pub fn month(&self) -> Option<u8> {
        self.month
    }

    pub fn year(&self) -> Option<i32> {
        self.year
    }

    /// Parses the archive's `dd_mm_yy` form. Components that are `??` or
    /// otherwise unreadable become unknown; the parse itself never fails.
    /// Two-digit years land in 1900–1999, four-digit years are taken as is.
    pub fn parse_archive(field: &str) -> Self {
        let mut parts = field.split('_');
        let day = parts.next().and_then(parse_small);
        let month = parts.next().and_then(parse_small);
        let year = parts.next().and_then(parse_year);
        if parts.next().is_some() {
            return Self::unknown();
        }
        Self::new(day, month, year)
    }
}

fn parse_small(s: &str) -> Option<u8> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.len() > 2 {
        return None;
    }
    s.parse().ok()
}

fn parse_year(s: &str) -> Option<i32> {
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    match s.len() {
        2 => s.parse::<i32>().ok().map(|y| 1900 + y),
        4 => s.parse().ok(),
        _ => None,
    }
}

impl fmt::Display for PartialDate {
    /// Renders in the archive's `dd_mm_yy` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.day {
            Some(d) => write!(f, "{d:02}_")?,
            None => f.write_str("??_")?,
        }
        match self.month {
            Some(m) => write!(f, "{m:02}_")?,
            None => f.write_str("??_")?,
        }
        match self.year {
            Some(y) if (1900..2000).contains(&y) => write!(f, "{:02}", y - 1900),
            Some(y) => write!(f, "{y}"),
            None => f.write_str("??"),
        }
    }
}

impl FromStr for PartialDate {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self::parse_archive(s))
    }
}

impl Serialize for PartialDate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialDate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Self::parse_archive(&s))
    }
}
