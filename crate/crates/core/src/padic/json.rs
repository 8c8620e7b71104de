//! JSON forms of series and matrices used by fixtures.

use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::matrix::Mat2;
use super::series::{Series, EXACT};
use crate::error::Result;

/// `{low, shift, Mx, coeffs}`; `Mx` is null for exact series and each
/// coefficient is a comma-separated list of base-10 coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub low: i64,
    pub shift: u32,
    #[serde(rename = "Mx")]
    pub mx: Option<i64>,
    pub coeffs: Vec<String>,
}

impl SeriesJson {
    pub fn from_series<C: Coeff>(s: &Series<C>) -> Self {
        SeriesJson {
            low: s.low(),
            shift: s.shift(),
            mx: (!s.is_exact()).then_some(s.prec()),
            coeffs: s.coeffs().iter().map(|c| c.to_coord_string()).collect(),
        }
    }

    pub fn to_series<C: Coeff>(&self, ctx: &C::Ctx) -> Result<Series<C>> {
        let cs = self
            .coeffs
            .iter()
            .map(|c| C::from_coord_str(ctx, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::new(ctx, self.low, cs, self.mx.unwrap_or(EXACT)).with_shift(self.shift))
    }
}

pub fn mat_to_json<C: Coeff>(m: &Mat2<C>) -> Vec<SeriesJson> {
    m.e.iter().map(SeriesJson::from_series).collect()
}

pub fn mat_from_json<C: Coeff>(v: &[SeriesJson], ctx: &C::Ctx) -> Result<Mat2<C>> {
    if v.len() != 4 {
        return Err(crate::Error::Parse(format!(
            "matrix needs 4 entries, got {}",
            v.len()
        )));
    }
    Ok(Mat2::new(
        v[0].to_series(ctx)?,
        v[1].to_series(ctx)?,
        v[2].to_series(ctx)?,
        v[3].to_series(ctx)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ol::EisensteinRing;
    use crate::OlSeries;
    use num_bigint::BigInt;

    #[test]
    fn roundtrip_ramified() {
        let r = EisensteinRing::new(5, vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)], 3)
            .unwrap();
        let s = OlSeries::from_i64s(&r, -1, &[4, 0, 7], 9).with_shift(1);
        let j = SeriesJson::from_series(&s);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"Mx\":9"));
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_series::<crate::OlElem>(&r).unwrap(), s);
    }
}
