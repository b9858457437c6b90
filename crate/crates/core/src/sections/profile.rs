use std::io::Write;

use serde::Serialize;

use crate::pointwise::{finsler_interval, ExtendedReal, Section};
use crate::polycore::MatPoly;

use super::membership::membership_flags;
use super::SectionsError;

/// Per-point sections and membership flags; all vectors are parallel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionProfile {
    pub points: Vec<Vec<f64>>,
    pub sections: Vec<Section>,
    pub in_kg: Vec<bool>,
    pub in_lg: Vec<bool>,
}

impl SectionProfile {
    pub fn mu(&self) -> Vec<ExtendedReal> {
        self.sections.iter().map(|s| s.interval.lo).collect()
    }

    pub fn nu(&self) -> Vec<ExtendedReal> {
        self.sections.iter().map(|s| s.interval.hi).collect()
    }

    pub fn low_confidence_count(&self) -> usize {
        self.sections.iter().filter(|s| s.low_confidence).count()
    }

    /// Columns `x1..xd, mu, nu, in_KG, in_LG`; an empty section is written as
    /// `empty` in both endpoint columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SectionsError> {
        let d = self.points.first().map_or(0, Vec::len);
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.extend(["mu", "nu", "in_KG", "in_LG"].map(String::from));
        w.write_record(&header)?;
        for (k, p) in self.points.iter().enumerate() {
            let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            let iv = self.sections[k].interval;
            if iv.is_empty() {
                row.push("empty".into());
                row.push("empty".into());
            } else {
                row.push(iv.lo.to_string());
                row.push(iv.hi.to_string());
            }
            row.push(self.in_kg[k].to_string());
            row.push(self.in_lg[k].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sections of `F - rG` at each point, with `K_G` and `L_G` membership.
pub fn mu_nu_profile(
    f: &MatPoly,
    g: &MatPoly,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<SectionProfile, SectionsError> {
    if f.n() != g.n() {
        return Err(SectionsError::Shape(format!(
            "F is {}x{} but G is {}x{}",
            f.n(),
            f.n(),
            g.n(),
            g.n()
        )));
    }
    if f.nvars() != g.nvars() {
        return Err(SectionsError::Dimension {
            expected: f.nvars(),
            found: g.nvars(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != f.nvars()) {
        return Err(SectionsError::Dimension {
            expected: f.nvars(),
            found: p.len(),
        });
    }
    let fc = f.compile()?;
    let gc = g.compile()?;
    let mut profile = SectionProfile {
        points: points.to_vec(),
        sections: Vec::with_capacity(points.len()),
        in_kg: Vec::with_capacity(points.len()),
        in_lg: Vec::with_capacity(points.len()),
    };
    for a in points {
        let section = finsler_interval(&fc.eval(a), &gc.eval(a), tol)?;
        let (kg, lg) = membership_flags(&gc, a, tol)?;
        profile.sections.push(section);
        profile.in_kg.push(kg);
        profile.in_lg.push(lg);
    }
    Ok(profile)
}
