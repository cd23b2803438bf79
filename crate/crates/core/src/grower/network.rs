use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Apex, ApexState};
use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point};

/// One root's body: the polyline its apex traced.
#[derive(Debug, Clone, PartialEq)]
pub struct Trail {
    pub root_id: usize,
    pub parent_id: Option<usize>,
    pub points: Vec<Point>,
    /// Final state of the apex that drew this trail.
    pub state: ApexState,
}

impl Trail {
    pub fn length(&self) -> f64 {
        polyline_length(&self.points)
    }
}

/// A forest of root trails linked by branching.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootNetwork {
    pub trails: Vec<Trail>,
}

impl RootNetwork {
    pub fn from_apexes(apexes: &[Apex]) -> Self {
        let mut trails: Vec<Trail> = apexes
            .iter()
            .map(|a| Trail {
                root_id: a.root_id,
                parent_id: a.parent_id,
                points: a.trail.clone(),
                state: a.state,
            })
            .collect();
        trails.sort_by_key(|t| t.root_id);
        RootNetwork { trails }
    }

    pub fn is_empty(&self) -> bool {
        self.trails.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.trails.iter().map(Trail::length).sum()
    }

    pub fn trail(&self, root_id: usize) -> Option<&Trail> {
        self.trails.iter().find(|t| t.root_id == root_id)
    }

    /// Parent links form a forest: ids unique, parents exist, no cycles.
    pub fn is_forest(&self) -> bool {
        let parents: BTreeMap<usize, Option<usize>> =
            self.trails.iter().map(|t| (t.root_id, t.parent_id)).collect();
        if parents.len() != self.trails.len() {
            return false;
        }
        for &start in parents.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(start);
            while let Some(id) = cur {
                if !seen.insert(id) {
                    return false;
                }
                match parents.get(&id) {
                    Some(p) => cur = *p,
                    None => return false,
                }
            }
        }
        true
    }

    /// Every child trail starts at a vertex of its parent trail.
    pub fn children_start_on_parents(&self) -> bool {
        self.trails.iter().all(|t| match t.parent_id {
            None => true,
            Some(pid) => match (self.trail(pid), t.points.first()) {
                (Some(parent), Some(start)) => parent.points.iter().any(|p| p == start),
                _ => false,
            },
        })
    }

    /// One row per trail vertex: `root_id,parent_id,vertex,x,y,state`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("root_id,parent_id,vertex,x,y,state\n");
        for t in &self.trails {
            let parent = t.parent_id.map_or_else(|| "-".to_string(), |p| p.to_string());
            for (i, p) in t.points.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{},{}", t.root_id, parent, i, p.x, p.y, t.state.as_str());
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut trails: Vec<Trail> = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(Error::parse(n + 1, "expected 6 columns"));
            }
            let bad = |what: &str| Error::parse(n + 1, format!("bad {what}"));
            let root_id: usize = f[0].parse().map_err(|_| bad("root_id"))?;
            let parent_id = match f[1] {
                "-" => None,
                s => Some(s.parse().map_err(|_| bad("parent_id"))?),
            };
            let x: f64 = f[3].parse().map_err(|_| bad("x"))?;
            let y: f64 = f[4].parse().map_err(|_| bad("y"))?;
            let state = ApexState::parse(f[5]).ok_or_else(|| bad("state"))?;
            match trails.last_mut() {
                Some(t) if t.root_id == root_id => t.points.push(Point::new(x, y)),
                _ => trails.push(Trail {
                    root_id,
                    parent_id,
                    points: vec![Point::new(x, y)],
                    state,
                }),
            }
        }
        Ok(RootNetwork { trails })
    }
}
