use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::mesh::PixelGrid;
use crate::monotonicity::loewner::LoewnerOutcome;
use crate::scalar::Real;

/// Outcome of one dictionary set in the indefinite method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DictionaryOutcome<T> {
    pub index: usize,
    pub passed: bool,
    /// `min_eig(Λ₀(C) − Λ_data)`.
    pub insulating: LoewnerOutcome<T>,
    /// `min_eig(Λ_data − Λ∞(C))`.
    pub conducting: LoewnerOutcome<T>,
}

/// Pixel indicator of a reconstruction with its diagnostics.
///
/// Cells are stored row-major with `iy` (ascending `y`) as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult<T> {
    pub grid: PixelGrid<T>,
    pub indicator: Vec<bool>,
    /// Per-pixel witness eigenvalue of a definite test; `None` where no test ran.
    pub min_eig: Vec<Option<T>>,
    pub marginal: Vec<bool>,
    /// Indefinite method only: no dictionary set passed, so the indicator is all ones.
    pub vacuous: bool,
    pub dictionary: Vec<DictionaryOutcome<T>>,
}

impl<T: Real> ReconstructionResult<T> {
    pub(crate) fn from_pixel_outcomes(grid: PixelGrid<T>, outcomes: Vec<Option<LoewnerOutcome<T>>>) -> Self {
        Self {
            indicator: outcomes.iter().map(|o| o.is_some_and(|o| o.passed)).collect(),
            min_eig: outcomes.iter().map(|o| o.map(|o| o.min_eig)).collect(),
            marginal: outcomes.iter().map(|o| o.is_some_and(|o| o.marginal)).collect(),
            grid,
            vacuous: false,
            dictionary: Vec::new(),
        }
    }

    pub fn at(&self, cell: [usize; 2]) -> bool {
        self.indicator[self.grid.index(cell)]
    }

    pub fn count(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    pub fn marginal_count(&self) -> usize {
        self.marginal.iter().filter(|&&b| b).count()
    }

    /// `{0,1}` grid, one row per `iy`.
    pub fn write_indicator_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for iy in 0..self.grid.ny {
            let row: Vec<&str> = (0..self.grid.nx).map(|ix| if self.at([ix, iy]) { "1" } else { "0" }).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Witness eigenvalues on the same layout; untested pixels are `nan`.
    pub fn write_min_eig_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for iy in 0..self.grid.ny {
            let row: Vec<String> = (0..self.grid.nx)
                .map(|ix| match self.min_eig[self.grid.index([ix, iy])] {
                    Some(v) => format!("{v:e}"),
                    None => "nan".to_string(),
                })
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// ASCII PGM of the witness eigenvalues, top row = largest `y`.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let tested: Vec<T> = self.min_eig.iter().flatten().copied().collect();
        let lo = tested.iter().copied().fold(T::infinity(), T::min);
        let hi = tested.iter().copied().fold(T::neg_infinity(), T::max);
        writeln!(w, "P2")?;
        writeln!(w, "# min_eig mapped linearly from [{lo:e}, {hi:e}] to [1, 255]; untested pixels are 0")?;
        writeln!(w, "{} {}", self.grid.nx, self.grid.ny)?;
        writeln!(w, "255")?;
        let span = hi - lo;
        for iy in (0..self.grid.ny).rev() {
            let row: Vec<String> = (0..self.grid.nx)
                .map(|ix| match self.min_eig[self.grid.index([ix, iy])] {
                    Some(v) => {
                        let t = if span > T::zero() { (v - lo) / span } else { T::one() };
                        (1.0 + 254.0 * t.as_f64()).round().to_string()
                    }
                    None => "0".to_string(),
                })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// Writes `<stem>_indicator.csv`, `<stem>_min_eig.csv` and `<stem>.pgm`; returns the paths.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<Vec<std::path::PathBuf>> {
        let dir = dir.as_ref();
        let paths = [
            dir.join(format!("{stem}_indicator.csv")),
            dir.join(format!("{stem}_min_eig.csv")),
            dir.join(format!("{stem}.pgm")),
        ];
        let open = |p: &Path| -> Result<std::io::BufWriter<std::fs::File>> {
            Ok(std::io::BufWriter::new(std::fs::File::create(p)?))
        };
        self.write_indicator_csv(open(&paths[0])?)?;
        self.write_min_eig_csv(open(&paths[1])?)?;
        self.write_pgm(open(&paths[2])?)?;
        Ok(paths.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReconstructionResult<f64> {
        let grid = PixelGrid::new([0.0, 0.0], [1.0, 1.0], 2, 1).unwrap();
        let pass = LoewnerOutcome { passed: true, min_eig: 0.25, marginal: false };
        ReconstructionResult::from_pixel_outcomes(grid, vec![Some(pass), None])
    }

    #[test]
    fn untested_pixels_are_outside_and_nan() {
        let r = sample();
        assert!(r.at([0, 0]) && !r.at([1, 0]));
        assert_eq!(r.count(), 1);
        let mut buf = Vec::new();
        r.write_min_eig_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("nan"));
    }

    #[test]
    fn pgm_header_documents_rescale() {
        let mut buf = Vec::new();
        sample().write_pgm(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("P2\n#"));
    }
}
