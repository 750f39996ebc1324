//! Loading growth functions from JSON spec files.
//!
//! ```json
//! { "family": "double_phase",
//!   "params": { "p": 2, "q": 3, "a": "x1*x1" },
//!   "domain_ref": "lshape.txt",
//!   "flags": { "l_q": 1 },
//!   "constants": { "beta0": 0.5, "q": 3 } }
//! ```
//!
//! Coefficients (`p` of `variable_exponent`, `a` of `double_phase`) are a
//! number, an expression in `x1, x2`, or `{"grid": "field.csv"}`. A grid
//! needs a raster `domain_ref`, whose origin anchors the field.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::RasterDomain;
use crate::error::{input_err, Result};
use crate::scalar::Real;

use super::field::{CellField, Field};
use super::function::{PhiFlags, PhiFunction, Region};

/// Structural constants declared alongside a growth function. Missing
/// entries are measured by the pipeline instead.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredConstants {
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
    /// Constant of the combined (aInc)_1 / (aDec)_q comparison.
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "Lq")]
    pub lq: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
    #[serde(default)]
    domain_ref: Option<String>,
    #[serde(default)]
    flags: Option<RawFlags>,
    #[serde(default)]
    constants: DeclaredConstants,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlags {
    convex: Option<bool>,
    left_continuous: Option<bool>,
    p_lo: Option<f64>,
    q_hi: Option<f64>,
    l_p: Option<f64>,
    l_q: Option<f64>,
}

/// A growth function together with its domain and declared constants.
#[derive(Clone, Debug)]
pub struct PhiSpec<T> {
    pub phi: PhiFunction<T>,
    pub domain: Option<Arc<RasterDomain<T>>>,
    pub constants: DeclaredConstants,
    /// The spec as read, for echoing into reports.
    pub source: Value,
}

impl<T: Real> PhiSpec<T> {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Parses spec text; relative file references resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let source: Value = serde_json::from_str(text)?;
        let raw: RawSpec = serde_json::from_value(source.clone())?;
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let (region, domain) = match raw.domain_ref.as_deref() {
            None | Some("all") => (Region::Everywhere, None),
            Some("dumbbell") => (Region::Dumbbell, None),
            Some(file) => {
                let d = Arc::new(RasterDomain::load(resolve(file))?);
                (Region::Raster(d.clone()), Some(d))
            }
        };
        let params = &raw.params;
        let num = |key: &str| -> Result<T> {
            match params.get(key).and_then(Value::as_f64) {
                Some(v) => Ok(T::lit(v)),
                None => input_err(format!("family '{}' needs numeric parameter '{key}'", raw.family)),
            }
        };
        let coefficient = |key: &str| -> Result<Field<T>> {
            match params.get(key) {
                Some(Value::Number(n)) => Ok(Field::Const(T::lit(n.as_f64().unwrap_or(f64::NAN)))),
                Some(Value::String(s)) => Field::expr(s),
                Some(Value::Object(o)) => {
                    let Some(Value::String(file)) = o.get("grid") else {
                        return input_err(format!("coefficient '{key}' object needs a 'grid' path"));
                    };
                    let Some(d) = &domain else {
                        return input_err(format!("grid coefficient '{key}' needs a raster domain_ref"));
                    };
                    let g = CellField::load(resolve(file), d.origin())?;
                    if g.dims() != (d.nx(), d.ny()) {
                        return input_err(format!("grid coefficient '{key}' does not match the domain grid"));
                    }
                    Ok(Field::Grid(Arc::new(g)))
                }
                _ => input_err(format!("family '{}' needs coefficient '{key}'", raw.family)),
            }
        };
        let floats = |key: &str| -> Result<Vec<T>> {
            match params.get(key).and_then(Value::as_array) {
                Some(a) => a
                    .iter()
                    .map(|v| v.as_f64().map(T::lit).ok_or_else(|| crate::Error::Input(format!("'{key}' must hold numbers"))))
                    .collect(),
                None => input_err(format!("family '{}' needs array parameter '{key}'", raw.family)),
            }
        };
        let phi = match raw.family.as_str() {
            "power" => PhiFunction::power(num("p")?)?,
            "orlicz" => {
                if let Some(Value::String(e)) = params.get("expr") {
                    PhiFunction::orlicz_expr(e)?
                } else {
                    PhiFunction::orlicz_table(floats("t")?, floats("phi")?)?
                }
            }
            "variable_exponent" => PhiFunction::variable_exponent(coefficient("p")?),
            "double_phase" => PhiFunction::double_phase(num("p")?, num("q")?, coefficient("a")?)?,
            "tabulated" => {
                let Some(d) = &domain else {
                    return input_err("tabulated family needs a raster domain_ref");
                };
                let ts = floats("t")?;
                let Some(rows) = params.get("values").and_then(Value::as_array) else {
                    return input_err("tabulated family needs 'values' (one row per cell, top row first)");
                };
                if rows.len() != d.len() {
                    return input_err(format!("tabulated family needs {} rows, got {}", d.len(), rows.len()));
                }
                let mut vs = vec![T::zero(); d.len() * ts.len()];
                for (r, row) in rows.iter().enumerate() {
                    let (i, j) = (r % d.nx(), d.ny() - 1 - r / d.nx());
                    let k = d.idx(i, j);
                    let row = row.as_array().filter(|a| a.len() == ts.len()).ok_or_else(|| {
                        crate::Error::Input(format!("tabulated row {r} must hold {} numbers", ts.len()))
                    })?;
                    for (c, v) in row.iter().enumerate() {
                        vs[k * ts.len() + c] = T::lit(v.as_f64().unwrap_or(f64::NAN));
                    }
                }
                PhiFunction::tabulated(d.clone(), ts, vs)?
            }
            "example_dumbbell" => PhiFunction::example_dumbbell(),
            other => return input_err(format!("unknown family '{other}'")),
        };
        // the dumbbell keeps its analytic region unless a raster is given
        let mut phi = match (raw.family.as_str(), region) {
            ("example_dumbbell", Region::Everywhere) | ("tabulated", _) => phi,
            (_, region) => phi.on(region),
        };
        if let Some(f) = raw.flags {
            let mut flags = *phi.flags();
            flags = PhiFlags {
                convex: f.convex.unwrap_or(flags.convex),
                left_continuous: f.left_continuous.unwrap_or(flags.left_continuous),
                p_lo: f.p_lo.or(flags.p_lo),
                q_hi: f.q_hi.or(flags.q_hi),
                l_p: f.l_p.unwrap_or(flags.l_p),
                l_q: f.l_q.unwrap_or(flags.l_q),
            };
            if flags.l_p < 1.0 || flags.l_q < 1.0 {
                return input_err("declared constants l_p and l_q must be >= 1");
            }
            phi = phi.with_flags(flags);
        }
        Ok(Self {
            phi,
            domain,
            constants: raw.constants,
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::Extended;
    use crate::geometry::Point;
    use crate::phi::{eval_phi, Family};

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("orlicz-spec-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn power_everywhere() {
        let s = PhiSpec::<f64>::parse(r#"{"family":"power","params":{"p":2.5}}"#, Path::new(".")).unwrap();
        assert!(matches!(s.phi.family(), Family::Power(p) if *p == 2.5));
        assert_eq!(s.phi.flags().q_hi, Some(2.5));
        assert!(s.domain.is_none());
    }

    #[test]
    fn double_phase_with_grid_weight() {
        let dir = tmpdir("dp");
        std::fs::write(dir.join("d.txt"), "ORLICZ-DOMAIN v1\n2 2 0.5 0 0\n##\n#.\n").unwrap();
        std::fs::write(dir.join("a.csv"), "2 2 0.5\n1 2\n3 4\n").unwrap();
        let spec = r#"{"family":"double_phase","params":{"p":2,"q":3,"a":{"grid":"a.csv"}},
                       "domain_ref":"d.txt","flags":{"l_q":2},"constants":{"beta0":0.5,"K":1.5}}"#;
        let s = PhiSpec::<f64>::parse(spec, &dir).unwrap();
        // top-left cell carries a = 1: 1 + 1 at t = 1
        assert_eq!(eval_phi(&s.phi, Point(0.25, 0.75), 1.0).unwrap(), Extended::Finite(2.0));
        assert_eq!(eval_phi(&s.phi, Point(0.25, 0.25), 1.0).unwrap(), Extended::Finite(4.0));
        assert!(eval_phi(&s.phi, Point(0.75, 0.25), 1.0).is_err());
        assert_eq!(s.phi.flags().l_q, 2.0);
        assert_eq!(s.constants.beta0, Some(0.5));
        assert_eq!(s.constants.k, Some(1.5));
    }

    #[test]
    fn dumbbell_and_errors() {
        let s = PhiSpec::<f64>::parse(r#"{"family":"example_dumbbell"}"#, Path::new(".")).unwrap();
        assert!(s.phi.region().contains(Point(2.0, 1e9)));
        for bad in [
            r#"{"family":"nope"}"#,
            r#"{"family":"power"}"#,
            r#"{"family":"power","params":{"p":2},"extra":1}"#,
            r#"{"family":"double_phase","params":{"p":3,"q":2,"a":0}}"#,
            r#"{"family":"variable_exponent","params":{"p":"2+t"}}"#,
        ] {
            assert!(PhiSpec::<f64>::parse(bad, Path::new(".")).is_err(), "{bad}");
        }
    }
}
