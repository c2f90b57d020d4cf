//! Pulse envelopes `f(t)` on `[0, duration]` and the transforms used to
//! build dynamically corrected gates.
//!
//! Every envelope is evaluated in closed form. The Gaussian is centred on
//! the window with width `duration / 7`, hard-truncated to the window and
//! rescaled so that its truncated integral equals the requested area.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian width as a fraction of the pulse duration.
pub const GAUSSIAN_WIDTH_FRACTION: f64 = 1.0 / 7.0;

/// Base envelope families selectable from configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Sine,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Sine => "sine",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" => Ok(Family::Gaussian),
            "sine" => Ok(Family::Sine),
            other => Err(Error::Invalid(format!("unknown pulse family {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulseShape {
    Gaussian { duration: f64, area: f64 },
    Sine { duration: f64, area: f64 },
    Zero { duration: f64 },
    /// `f(t)` followed by `-f(2 t_Q - t)`: a faulty identity.
    NegativeReverse(Box<PulseShape>),
    /// `f(t/2) / 2` over twice the duration.
    HalfScaled(Box<PulseShape>),
}

fn check_duration(duration: f64) -> Result<()> {
    if duration > 0.0 && duration.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("pulse duration must be positive, got {duration}")))
    }
}

impl PulseShape {
    pub fn new(family: Family, duration: f64, area: f64) -> Result<Self> {
        check_duration(duration)?;
        if !area.is_finite() {
            return Err(Error::Invalid(format!("pulse area must be finite, got {area}")));
        }
        Ok(match family {
            Family::Gaussian => PulseShape::Gaussian { duration, area },
            Family::Sine => PulseShape::Sine { duration, area },
        })
    }

    pub fn gaussian(duration: f64, area: f64) -> Result<Self> {
        Self::new(Family::Gaussian, duration, area)
    }

    pub fn sine(duration: f64, area: f64) -> Result<Self> {
        Self::new(Family::Sine, duration, area)
    }

    pub fn zero(duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(PulseShape::Zero { duration })
    }

    pub fn negative_reverse(&self) -> PulseShape {
        PulseShape::NegativeReverse(Box::new(self.clone()))
    }

    pub fn half_scaled(&self) -> PulseShape {
        PulseShape::HalfScaled(Box::new(self.clone()))
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulseShape::Gaussian { duration, .. }
            | PulseShape::Sine { duration, .. }
            | PulseShape::Zero { duration } => *duration,
            PulseShape::NegativeReverse(inner) | PulseShape::HalfScaled(inner) => {
                2.0 * inner.duration()
            }
        }
    }

    /// Duration of the innermost base envelope, `t_p` for every shape the
    /// sequencer emits.
    pub fn base_duration(&self) -> f64 {
        match self {
            PulseShape::NegativeReverse(inner) | PulseShape::HalfScaled(inner) => inner.base_duration(),
            other => other.duration(),
        }
    }

    /// Net integral of the envelope over its window.
    pub fn area(&self) -> f64 {
        match self {
            PulseShape::Gaussian { area, .. } | PulseShape::Sine { area, .. } => *area,
            PulseShape::Zero { .. } | PulseShape::NegativeReverse(_) => 0.0,
            PulseShape::HalfScaled(inner) => inner.area(),
        }
    }

    /// Area parameter of the innermost base envelope (the rotation angle the
    /// shape was derived from).
    pub fn base_area(&self) -> f64 {
        match self {
            PulseShape::Gaussian { area, .. } | PulseShape::Sine { area, .. } => *area,
            PulseShape::Zero { .. } => 0.0,
            PulseShape::NegativeReverse(inner) | PulseShape::HalfScaled(inner) => inner.base_area(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PulseShape::Zero { .. } => true,
            PulseShape::Gaussian { area, .. } | PulseShape::Sine { area, .. } => *area == 0.0,
            PulseShape::NegativeReverse(inner) | PulseShape::HalfScaled(inner) => inner.is_zero(),
        }
    }

    /// `f(t)`; zero outside `[0, duration]`.
    pub fn amplitude_at(&self, t: f64) -> f64 {
        if !(0.0..=self.duration()).contains(&t) {
            return 0.0;
        }
        match self {
            PulseShape::Gaussian { duration, area } => {
                let (amp, sigma) = gaussian_params(*duration, *area);
                let x = t - duration / 2.0;
                amp * (-x * x / (2.0 * sigma * sigma)).exp()
            }
            PulseShape::Sine { duration, area } => {
                sine_amplitude(*duration, *area) * (PI * t / duration).sin()
            }
            PulseShape::Zero { .. } => 0.0,
            PulseShape::NegativeReverse(inner) => {
                let tq = inner.duration();
                if t < tq {
                    inner.amplitude_at(t)
                } else {
                    -inner.amplitude_at(2.0 * tq - t)
                }
            }
            PulseShape::HalfScaled(inner) => 0.5 * inner.amplitude_at(t / 2.0),
        }
    }

    /// Closed-form `int_0^t f(s) ds`, clamped to the window.
    pub fn cumulative_area(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration());
        match self {
            PulseShape::Gaussian { duration, area } => {
                let (amp, sigma) = gaussian_params(*duration, *area);
                let c = duration / 2.0;
                let k = SQRT_2 * sigma;
                amp * sigma * (PI / 2.0).sqrt() * (libm::erf((t - c) / k) + libm::erf(c / k))
            }
            PulseShape::Sine { duration, area } => {
                sine_amplitude(*duration, *area) * duration / PI * (1.0 - (PI * t / duration).cos())
            }
            PulseShape::Zero { .. } => 0.0,
            PulseShape::NegativeReverse(inner) => {
                let tq = inner.duration();
                if t < tq {
                    inner.cumulative_area(t)
                } else {
                    inner.cumulative_area(2.0 * tq - t)
                }
            }
            PulseShape::HalfScaled(inner) => inner.cumulative_area(t / 2.0),
        }
    }

    /// `max |f(t)|` over the window.
    pub fn peak_amplitude(&self) -> f64 {
        match self {
            PulseShape::Gaussian { duration, area } => gaussian_params(*duration, *area).0.abs(),
            PulseShape::Sine { duration, area } => sine_amplitude(*duration, *area).abs(),
            PulseShape::Zero { .. } => 0.0,
            PulseShape::NegativeReverse(inner) => inner.peak_amplitude(),
            PulseShape::HalfScaled(inner) => 0.5 * inner.peak_amplitude(),
        }
    }

    /// Interior points (relative to the window start) where the envelope is
    /// not smooth. Integrators split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PulseShape::Gaussian { .. } | PulseShape::Sine { .. } | PulseShape::Zero { .. } => {
                Vec::new()
            }
            PulseShape::NegativeReverse(inner) => {
                let tq = inner.duration();
                let mut pts = inner.breakpoints();
                let mirrored: Vec<f64> = pts.iter().map(|&p| 2.0 * tq - p).collect();
                pts.push(tq);
                pts.extend(mirrored);
                pts.sort_by(f64::total_cmp);
                pts
            }
            PulseShape::HalfScaled(inner) => inner.breakpoints().iter().map(|p| 2.0 * p).collect(),
        }
    }

    /// Same family with a new base duration and unchanged area.
    pub fn with_duration(&self, duration: f64) -> Result<PulseShape> {
        check_duration(duration)?;
        Ok(match self {
            PulseShape::Gaussian { area, .. } => PulseShape::Gaussian { duration, area: *area },
            PulseShape::Sine { area, .. } => PulseShape::Sine { duration, area: *area },
            PulseShape::Zero { .. } => PulseShape::Zero { duration },
            PulseShape::NegativeReverse(inner) => {
                PulseShape::NegativeReverse(Box::new(inner.with_duration(duration / 2.0)?))
            }
            PulseShape::HalfScaled(inner) => {
                PulseShape::HalfScaled(Box::new(inner.with_duration(duration / 2.0)?))
            }
        })
    }

    /// Family label such as `gaussian` or `negative_reverse(sine)`.
    pub fn label(&self) -> String {
        match self {
            PulseShape::Gaussian { .. } => "gaussian".into(),
            PulseShape::Sine { .. } => "sine".into(),
            PulseShape::Zero { .. } => "zero".into(),
            PulseShape::NegativeReverse(inner) => format!("negative_reverse({})", inner.label()),
            PulseShape::HalfScaled(inner) => format!("half_scaled({})", inner.label()),
        }
    }

    /// Inverse of [`label`](Self::label): rebuilds a shape from its family
    /// label, total duration and base area.
    pub fn from_label(label: &str, duration: f64, base_area: f64) -> Result<PulseShape> {
        let label = label.trim();
        for (prefix, wrap) in [
            ("negative_reverse(", PulseShape::negative_reverse as fn(&PulseShape) -> PulseShape),
            ("half_scaled(", PulseShape::half_scaled),
        ] {
            if let Some(rest) = label.strip_prefix(prefix) {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Invalid(format!("unbalanced family label {label:?}")))?;
                return Ok(wrap(&Self::from_label(inner, duration / 2.0, base_area)?));
            }
        }
        match label {
            "zero" => Self::zero(duration),
            other => Self::new(other.parse()?, duration, base_area),
        }
    }
}

fn gaussian_params(duration: f64, area: f64) -> (f64, f64) {
    let sigma = duration * GAUSSIAN_WIDTH_FRACTION;
    let truncated = sigma * (2.0 * PI).sqrt() * libm::erf(duration / (2.0 * SQRT_2 * sigma));
    (area / truncated, sigma)
}

fn sine_amplitude(duration: f64, area: f64) -> f64 {
    area * PI / (2.0 * duration)
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` on `[a, b]` to the given
/// absolute tolerance.
pub fn integrate_adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        const XK: [f64; 8] = [
            0.991_455_371_120_812_6,
            0.949_107_912_342_758_5,
            0.864_864_423_359_769_1,
            0.741_531_185_599_394_4,
            0.586_087_235_467_691_1,
            0.405_845_151_377_397_2,
            0.207_784_955_007_898_5,
            0.0,
        ];
        const WK: [f64; 8] = [
            0.022_935_322_010_529_22,
            0.063_092_092_629_978_55,
            0.104_790_010_322_250_2,
            0.140_653_259_715_525_9,
            0.169_004_726_639_267_9,
            0.190_350_578_064_785_4,
            0.204_432_940_075_298_9,
            0.209_482_141_084_727_8,
        ];
        const WG: [f64; 4] = [
            0.129_484_966_168_869_7,
            0.279_705_391_489_276_7,
            0.381_830_050_505_118_9,
            0.417_959_183_673_469_4,
        ];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut kronrod = WK[7] * fc;
        let mut gauss = WG[3] * fc;
        for i in 0..7 {
            let x = h * XK[i];
            let s = f(c - x) + f(c + x);
            kronrod += WK[i] * s;
            if i % 2 == 1 {
                gauss += WG[i / 2] * s;
            }
        }
        (kronrod * h, ((kronrod - gauss) * h).abs())
    }

    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 || (b - a).abs() < 1e-300 {
            return val;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, tol / 2.0, depth + 1) + recurse(f, m, b, tol / 2.0, depth + 1)
    }

    recurse(f, a, b, tol, 0)
}

/// Numerical area of a shape, split at its breakpoints.
pub fn quadrature_area(shape: &PulseShape, tol: f64) -> f64 {
    let mut edges = vec![0.0];
    edges.extend(shape.breakpoints());
    edges.push(shape.duration());
    let f = |t: f64| shape.amplitude_at(t);
    edges
        .windows(2)
        .map(|w| integrate_adaptive(&f, w[0], w[1], tol))
        .sum()
}
