use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Label, Labeling, PointSet};
use crate::error::{Error, Result};
use crate::field::Terrain;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    time: f64,
    cell: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Synchronous multi-source growth fronts on the cell grid.
///
/// Fronts advance through the 8-neighbourhood (no corner cutting past
/// obstacles), one unit of time per step. The clock of a front reaching a
/// cell is the Euclidean distance from its seed to the cell centre, which
/// removes the anisotropy of plain chamfer stepping. At step `k` every
/// unresolved cell reached with time `≤ k` is resolved: claimed when a single
/// front reached it, boundary when two or more did. Resolved cells never
/// change and boundary cells do not propagate. Once every front has died
/// out, cells that could only be reached through a collision are marked as
/// boundary so the labeling covers every cell a seed can reach.
#[derive(Debug, Clone)]
pub struct VoronoiFront<'a> {
    terrain: &'a Terrain,
    seeds: Vec<Point>,
    labels: Vec<Label>,
    best: Vec<(f64, usize)>,
    second: Vec<f64>,
    heap: BinaryHeap<Pending>,
    step: u32,
}

impl<'a> VoronoiFront<'a> {
    pub fn new(seeds: &PointSet, terrain: &'a Terrain) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::config("Voronoi needs at least one seed"));
        }
        let n = terrain.len();
        let mut front = VoronoiFront {
            terrain,
            seeds: seeds.points().to_vec(),
            labels: vec![Label::Unclaimed; n],
            best: vec![(f64::INFINITY, usize::MAX); n],
            second: vec![f64::INFINITY; n],
            heap: BinaryHeap::new(),
            step: 0,
        };
        let mut seeded: Vec<(usize, usize)> = Vec::new();
        for (i, &s) in front.seeds.iter().enumerate() {
            let (x, y) = terrain
                .cell_of(s)
                .ok_or(Error::OutOfDomain { x: s.x, y: s.y })?;
            if terrain.is_obstacle(x, y) {
                return Err(Error::InObstacle { x: s.x, y: s.y });
            }
            seeded.push((terrain.index(x, y), i));
        }
        for &(cell, i) in &seeded {
            front.labels[cell] = if seeded.iter().any(|&(c, j)| c == cell && j != i) {
                Label::Boundary
            } else {
                Label::Seed(i)
            };
        }
        for &(cell, _) in &seeded {
            front.offer_from(cell);
        }
        Ok(front)
    }

    pub fn step_count(&self) -> u32 {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn labeling(&self) -> Labeling {
        Labeling::new(self.terrain.width(), self.terrain.height(), self.labels.clone())
    }

    fn offer(&mut self, cell: usize, label: usize) {
        if self.labels[cell] != Label::Unclaimed {
            return;
        }
        let w = self.terrain.width();
        let centre = Terrain::cell_center(cell % w, cell / w);
        let t = centre.dist(self.seeds[label]);
        let (bt, bl) = self.best[cell];
        if bl == label {
            self.best[cell].0 = bt.min(t);
        } else if t < bt {
            self.second[cell] = bt;
            self.best[cell] = (t, label);
        } else {
            self.second[cell] = self.second[cell].min(t);
        }
        self.heap.push(Pending {
            time: self.best[cell].0,
            cell,
        });
    }

    fn offer_from(&mut self, cell: usize) {
        let Label::Seed(label) = self.labels[cell] else {
            return;
        };
        let w = self.terrain.width();
        let (x, y) = (cell % w, cell / w);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if !self.terrain.contains(nx, ny) {
                    continue;
                }
                let nb = (nx as usize, ny as usize);
                if !crate::oracle::is_legal_move(self.terrain, (x, y), nb) {
                    continue;
                }
                self.offer(self.terrain.index(nb.0, nb.1), label);
            }
        }
    }

    /// Advances one unit of time. Returns the cells resolved in this step.
    pub fn step(&mut self) -> Vec<usize> {
        self.step += 1;
        let k = self.step as f64;
        let mut ready = Vec::new();
        while let Some(top) = self.heap.peek() {
            if top.time > k {
                break;
            }
            let Pending { cell, .. } = self.heap.pop().expect("peeked");
            if self.labels[cell] == Label::Unclaimed && !ready.contains(&cell) {
                ready.push(cell);
            }
        }
        for &cell in &ready {
            self.labels[cell] = if self.second[cell] <= k {
                Label::Boundary
            } else {
                Label::Seed(self.best[cell].1)
            };
        }
        for &cell in &ready {
            self.offer_from(cell);
        }
        if self.heap.is_empty() {
            self.fill_behind_collisions(&mut ready);
        }
        ready
    }

    fn fill_behind_collisions(&mut self, resolved: &mut Vec<usize>) {
        let w = self.terrain.width();
        let mut stack: Vec<usize> = (0..self.labels.len())
            .filter(|&c| self.labels[c] == Label::Boundary)
            .collect();
        while let Some(cell) = stack.pop() {
            let (x, y) = (cell % w, cell / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if (dx, dy) == (0, 0) || !self.terrain.contains(nx, ny) {
                        continue;
                    }
                    let nb = (nx as usize, ny as usize);
                    let j = self.terrain.index(nb.0, nb.1);
                    if self.labels[j] == Label::Unclaimed && crate::oracle::is_legal_move(self.terrain, (x, y), nb) {
                        self.labels[j] = Label::Boundary;
                        resolved.push(j);
                        stack.push(j);
                    }
                }
            }
        }
    }

    /// Steps until no front can advance.
    pub fn run(mut self) -> Labeling {
        while !self.is_done() {
            self.step();
        }
        self.labeling()
    }
}

/// Labels the terrain by racing uniform-speed growth fronts from every seed.
pub fn approximate_voronoi(seeds: &PointSet, terrain: &Terrain) -> Result<Labeling> {
    Ok(VoronoiFront::new(seeds, terrain)?.run())
}
