//! Piecewise-linear color maps over [0, 1] and the per-parent-bin coloring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One RGB pixel, serialized as a 3-element array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb8(pub [u8; 3]);

pub const WHITE: Rgb8 = Rgb8([255, 255, 255]);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub t: f64,
    pub color: Rgb8,
}

/// Ordered control points with t strictly increasing from 0 to 1. The
/// constructor validates, so lookups never fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ControlPoint>", into = "Vec<ControlPoint>")]
pub struct ColorMapSpec {
    points: Vec<ControlPoint>,
}

impl ColorMapSpec {
    pub fn new(points: Vec<ControlPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::BadColorMap("need at least 2 control points".into()));
        }
        if points[0].t != 0.0 {
            return Err(Error::BadColorMap("first control point must be at t=0".into()));
        }
        if points[points.len() - 1].t != 1.0 {
            return Err(Error::BadColorMap("last control point must be at t=1".into()));
        }
        if points.windows(2).any(|w| !(w[0].t < w[1].t)) {
            return Err(Error::BadColorMap("t values must be strictly increasing".into()));
        }
        Ok(ColorMapSpec { points })
    }

    pub fn points(&self) -> &[ControlPoint] {
        &self.points
    }
}

impl Default for ColorMapSpec {
    /// Earth-tone palette, dark to light, monotone in luminance.
    fn default() -> Self {
        ColorMapSpec::new(vec![
            ControlPoint { t: 0.0, color: Rgb8([0, 0, 70]) },
            ControlPoint { t: 0.25, color: Rgb8([0, 90, 120]) },
            ControlPoint { t: 0.5, color: Rgb8([60, 140, 70]) },
            ControlPoint { t: 0.75, color: Rgb8([180, 160, 100]) },
            ControlPoint { t: 1.0, color: Rgb8([250, 250, 240]) },
        ])
        .expect("default palette is valid")
    }
}

impl TryFrom<Vec<ControlPoint>> for ColorMapSpec {
    type Error = Error;
    fn try_from(points: Vec<ControlPoint>) -> Result<Self> {
        ColorMapSpec::new(points)
    }
}

impl From<ColorMapSpec> for Vec<ControlPoint> {
    fn from(spec: ColorMapSpec) -> Self {
        spec.points
    }
}

/// Rounds to nearest integer with halves going up: 127.5 -> 128.
pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Piecewise-linear interpolation between the bracketing control points,
/// each channel rounded half-up. t is clamped to [0, 1].
pub fn colormap_lookup(spec: &ColorMapSpec, t: f64) -> Rgb8 {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pts = &spec.points;
    let hi = pts.iter().position(|p| t <= p.t).unwrap_or(pts.len() - 1);
    if hi == 0 {
        return pts[0].color;
    }
    let (a, b) = (&pts[hi - 1], &pts[hi]);
    let u = (t - a.t) / (b.t - a.t);
    let mut out = [0u8; 3];
    for c in 0..3 {
        let v = a.color.0[c] as f64 + (b.color.0[c] as f64 - a.color.0[c] as f64) * u;
        out[c] = round_half_up(v).clamp(0.0, 255.0) as u8;
    }
    Rgb8(out)
}

/// Color of a parent bin: the colormap sampled at the bin midpoint fraction.
/// The same map is reused for every joint pair.
pub fn parent_color(spec: &ColorMapSpec, parent_bin: usize, n_d: usize) -> Result<Rgb8> {
    if n_d == 0 {
        return Err(Error::ZeroBins);
    }
    if parent_bin >= n_d {
        return Err(Error::BinOutOfRange { bin: parent_bin, n_d });
    }
    Ok(colormap_lookup(spec, (parent_bin as f64 + 0.5) / n_d as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bw() -> ColorMapSpec {
        ColorMapSpec::new(vec![
            ControlPoint { t: 0.0, color: Rgb8([0, 0, 0]) },
            ControlPoint { t: 1.0, color: Rgb8([255, 255, 255]) },
        ])
        .unwrap()
    }

    #[test]
    fn endpoints_hit_control_colors() {
        let m = ColorMapSpec::default();
        assert_eq!(colormap_lookup(&m, 0.0), Rgb8([0, 0, 70]));
        assert_eq!(colormap_lookup(&m, 1.0), Rgb8([250, 250, 240]));
        assert_eq!(colormap_lookup(&m, 0.5), Rgb8([60, 140, 70]));
    }

    #[test]
    fn midpoint_rounds_half_up() {
        // 127.5 rounds up to 128
        assert_eq!(colormap_lookup(&bw(), 0.5), Rgb8([128, 128, 128]));
    }

    #[test]
    fn interpolation_between_default_controls() {
        // halfway between (0,0,70) and (0,90,120)
        assert_eq!(colormap_lookup(&ColorMapSpec::default(), 0.125), Rgb8([0, 45, 95]));
    }

    #[test]
    fn lookup_clamps_out_of_range() {
        let m = bw();
        assert_eq!(colormap_lookup(&m, -3.0), Rgb8([0, 0, 0]));
        assert_eq!(colormap_lookup(&m, 2.0), Rgb8([255, 255, 255]));
        assert_eq!(colormap_lookup(&m, f64::NAN), Rgb8([0, 0, 0]));
    }

    #[test]
    fn parent_color_uses_bin_midpoints() {
        let m = bw();
        assert_eq!(parent_color(&m, 0, 1).unwrap(), colormap_lookup(&m, 0.5));
        let a = parent_color(&m, 3, 10).unwrap();
        assert_eq!(a, colormap_lookup(&m, 0.35));
        // adjacent bins differ by exactly 1/n_d in parameter
        let b = parent_color(&m, 4, 10).unwrap();
        assert_eq!(b, colormap_lookup(&m, 0.45));
        assert!(matches!(parent_color(&m, 10, 10), Err(Error::BinOutOfRange { .. })));
    }

    #[test]
    fn monotone_parameter_gives_monotone_luminance_on_default() {
        let m = ColorMapSpec::default();
        let mut last = -1.0;
        for k in 0..=100 {
            let Rgb8([r, g, b]) = colormap_lookup(&m, k as f64 / 100.0);
            let lum = 0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64;
            assert!(lum >= last - 1e-9, "luminance dipped at k={k}");
            last = lum;
        }
    }

    #[test]
    fn constructor_rejects_bad_specs() {
        let p = |t, c: [u8; 3]| ControlPoint { t, color: Rgb8(c) };
        assert!(ColorMapSpec::new(vec![p(0.0, [0; 3])]).is_err());
        assert!(ColorMapSpec::new(vec![p(0.1, [0; 3]), p(1.0, [9; 3])]).is_err());
        assert!(ColorMapSpec::new(vec![p(0.0, [0; 3]), p(0.9, [9; 3])]).is_err());
        assert!(ColorMapSpec::new(vec![p(0.0, [0; 3]), p(0.5, [1; 3]), p(0.5, [2; 3]), p(1.0, [9; 3])])
            .is_err());
    }

    #[test]
    fn serde_round_trip_validates() {
        let m = ColorMapSpec::default();
        let j = serde_json::to_string(&m).unwrap();
        let back: ColorMapSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
        // invalid control list is rejected on deserialize
        let bad = r#"[{"t":0.5,"color":[0,0,0]},{"t":1.0,"color":[1,1,1]}]"#;
        assert!(serde_json::from_str::<ColorMapSpec>(bad).is_err());
    }
}
