use std::str::FromStr;

use serde::Serialize;

use super::SectionsError;

/// One axis `lo:hi:steps`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self, SectionsError> {
        if steps < 2 {
            return Err(SectionsError::Grid(format!("need at least 2 steps, got {steps}")));
        }
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(SectionsError::Grid(format!("bad range {lo}:{hi}")));
        }
        Ok(Axis { lo, hi, steps })
    }

    /// `lo + (hi - lo) i / (steps - 1)`, so both ends are hit exactly.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.point(i))
    }
}

/// Cartesian product of axes, last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn uniform(d: usize, lo: f64, hi: f64, steps: usize) -> Result<Self, SectionsError> {
        Ok(GridSpec {
            axes: vec![Axis::new(lo, hi, steps)?; d],
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.points().map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

impl FromStr for GridSpec {
    type Err = SectionsError;

    /// `lo:hi:steps[,lo:hi:steps...]`.
    fn from_str(s: &str) -> Result<Self, SectionsError> {
        let axes = s
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.trim().split(':').collect();
                let [lo, hi, steps] = fields.as_slice() else {
                    return Err(SectionsError::Grid(format!("expected lo:hi:steps, got `{part}`")));
                };
                let num = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| SectionsError::Grid(format!("bad number `{t}` in `{part}`")))
                };
                let steps = steps
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| SectionsError::Grid(format!("bad step count in `{part}`")))?;
                Axis::new(num(lo)?, num(hi)?, steps)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridSpec { axes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_enumerate() {
        let g: GridSpec = "-5:5:101".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 101);
        assert_eq!(pts[0], vec![-5.0]);
        assert_eq!(pts[50], vec![0.0]);
        assert_eq!(pts[100], vec![5.0]);
        let g2: GridSpec = "0:1:2, -1:1:3".parse().unwrap();
        assert_eq!(g2.points()[4], vec![1.0, 0.0]);
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("1:0:5".parse::<GridSpec>().is_err());
    }
}
