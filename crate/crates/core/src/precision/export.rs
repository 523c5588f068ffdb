//! CSV and JSON forms of a [`RankTally`].
//!
//! CSV has the header `strength,class,count,percent`, one line per cell, and a
//! closing `total` line. JSON nests cells per strength and flags the modal
//! class of each row and the class the strength would hold under a perfect ranking.

use serde::{Deserialize, Serialize};

use super::{percent, RankTally};
use crate::bracket::PlacementClass;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyCell {
    pub class: String,
    pub count: u64,
    pub percent: u64,
    pub modal: bool,
    pub expected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyRow {
    pub strength: u32,
    pub cells: Vec<TallyCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyDocument {
    pub total: u64,
    pub classes: Vec<PlacementClass>,
    pub rows: Vec<TallyRow>,
}

pub fn tally_to_json(tally: &RankTally, expected: Option<&[usize]>) -> TallyDocument {
    let rows = (1..=tally.participants() as u32)
        .map(|s| {
            let modal = tally.modal(s);
            let cells = tally
                .classes
                .iter()
                .enumerate()
                .map(|(c, class)| {
                    let count = tally.row(s)[c];
                    TallyCell {
                        class: class.label.clone(),
                        count,
                        percent: percent(count, tally.total),
                        modal: modal.contains(&c),
                        expected: expected.is_some_and(|e| e[s as usize - 1] == c),
                    }
                })
                .collect();
            TallyRow { strength: s, cells }
        })
        .collect();
    TallyDocument {
        total: tally.total,
        classes: tally.classes.clone(),
        rows,
    }
}

pub fn tally_from_json(doc: &TallyDocument) -> Result<RankTally> {
    let mut tally = RankTally::empty(doc.rows.len(), doc.classes.clone());
    tally.total = doc.total;
    for row in &doc.rows {
        let r = (row.strength as usize)
            .checked_sub(1)
            .filter(|&r| r < doc.rows.len())
            .ok_or_else(|| Error::Tally(format!("strength {} out of range", row.strength)))?;
        for cell in &row.cells {
            let c = doc
                .classes
                .iter()
                .position(|k| k.label == cell.class)
                .ok_or_else(|| Error::Tally(format!("unknown class `{}`", cell.class)))?;
            tally.counts[r][c] = cell.count;
        }
    }
    Ok(tally)
}

pub fn tally_to_csv(tally: &RankTally) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["strength", "class", "count", "percent"])?;
    for s in 1..=tally.participants() as u32 {
        for (c, class) in tally.classes.iter().enumerate() {
            let count = tally.row(s)[c];
            w.write_record([
                s.to_string(),
                class.label.clone(),
                count.to_string(),
                percent(count, tally.total).to_string(),
            ])?;
        }
    }
    w.write_record([
        "total".to_string(),
        String::new(),
        tally.total.to_string(),
        "100".to_string(),
    ])?;
    let bytes = w.into_inner().map_err(|e| Error::Tally(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Tally(e.to_string()))
}

pub fn tally_from_csv(text: &str) -> Result<RankTally> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["strength", "class", "count", "percent"] {
        return Err(Error::Tally(format!("unexpected header {header:?}")));
    }
    let mut classes: Vec<PlacementClass> = Vec::new();
    let mut cells: Vec<(u32, usize, u64)> = Vec::new();
    let mut total = None;
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let count: u64 = field(2)
            .parse()
            .map_err(|_| Error::Tally(format!("bad count `{}`", field(2))))?;
        if field(0) == "total" {
            total = Some(count);
            continue;
        }
        let strength: u32 = field(0)
            .parse()
            .map_err(|_| Error::Tally(format!("bad strength `{}`", field(0))))?;
        let class = PlacementClass::parse_label(field(1))
            .ok_or_else(|| Error::Tally(format!("bad class label `{}`", field(1))))?;
        let c = match classes.iter().position(|k| *k == class) {
            Some(c) => c,
            None => {
                classes.push(class);
                classes.len() - 1
            }
        };
        cells.push((strength, c, count));
    }
    let total = total.ok_or_else(|| Error::Tally("missing total line".into()))?;
    let n = cells.iter().map(|&(s, _, _)| s).max().unwrap_or(0) as usize;
    let mut tally = RankTally::empty(n, classes);
    tally.total = total;
    for (s, c, count) in cells {
        if s == 0 {
            return Err(Error::Tally("strength 0".into()));
        }
        tally.counts[s as usize - 1][c] = count;
    }
    Ok(tally)
}
