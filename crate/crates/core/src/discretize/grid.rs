use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Fd2,
    Fd4,
}

/// Truncation `[0, L]` with `n_points` interior nodes; nominal step L/(n+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub length: f64,
    pub n_points: usize,
    pub scheme: Scheme,
}

pub const MAX_STEP: f64 = 0.1;
pub const MIN_POINTS: usize = 50;

impl Grid1D {
    pub fn new(length: f64, n_points: usize, scheme: Scheme) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("grid length must be positive"));
        }
        if n_points < MIN_POINTS {
            return Err(invalid(format!(
                "at least {MIN_POINTS} interior points are required"
            )));
        }
        let g = Self {
            length,
            n_points,
            scheme,
        };
        if g.step() > MAX_STEP {
            return Err(Error::GridTooCoarse {
                step: g.step(),
                limit: MAX_STEP,
            });
        }
        Ok(g)
    }

    pub fn fd2(length: f64, n_points: usize) -> Result<Self> {
        Self::new(length, n_points, Scheme::Fd2)
    }

    pub fn step(&self) -> f64 {
        self.length / (self.n_points + 1) as f64
    }

    /// Piecewise-uniform layout with a node on every breakpoint inside (0, L).
    pub fn layout(&self, breakpoints: &[f64]) -> NodeLayout {
        NodeLayout::new(self.length, self.n_points + 1, breakpoints)
    }
}

/// Segments `[edges[s], edges[s+1]]` each split into `counts[s]` equal intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    edges: Vec<f64>,
    counts: Vec<usize>,
}

impl NodeLayout {
    pub fn new(length: f64, intervals: usize, breakpoints: &[f64]) -> Self {
        let tol = 1e-9 * length;
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > tol && b < length - tol)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let mut edges = Vec::with_capacity(inner.len() + 2);
        edges.push(0.0);
        edges.extend(inner);
        edges.push(length);
        let lens: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let mut counts: Vec<usize> = lens
            .iter()
            .map(|l| ((l / length * intervals as f64).round() as usize).max(1))
            .collect();
        let spacing = |c: &Vec<usize>, s: usize| lens[s] / c[s] as f64;
        while counts.iter().sum::<usize>() > intervals.max(counts.len()) {
            let s = (0..counts.len())
                .filter(|&s| counts[s] > 1)
                .min_by(|&a, &b| spacing(&counts, a).total_cmp(&spacing(&counts, b)))
                .expect("some segment has more than one interval");
            counts[s] -= 1;
        }
        while counts.iter().sum::<usize>() < intervals {
            let s = (0..counts.len())
                .max_by(|&a, &b| {
                    spacing(&counts, a)
                        .total_cmp(&spacing(&counts, b))
                        .then(b.cmp(&a))
                })
                .expect("nonempty");
            counts[s] += 1;
        }
        Self { edges, counts }
    }

    pub fn length(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn intervals(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn interior_count(&self) -> usize {
        self.intervals() - 1
    }

    pub fn is_uniform(&self) -> bool {
        self.counts.len() == 1
    }

    pub fn max_step(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| (w[1] - w[0]) / c as f64)
            .fold(0.0, f64::max)
    }

    /// Every node including both ends.
    pub fn nodes(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.intervals() + 1);
        x.push(0.0);
        for (w, &c) in self.edges.windows(2).zip(&self.counts) {
            let h = (w[1] - w[0]) / c as f64;
            for k in 1..c {
                x.push(w[0] + k as f64 * h);
            }
            x.push(w[1]);
        }
        x
    }

    /// Same edges, every segment split twice as finely (nested grid).
    pub fn refine(&self) -> Self {
        Self {
            edges: self.edges.clone(),
            counts: self.counts.iter().map(|c| 2 * c).collect(),
        }
    }
}
