//! JSON form of a [`Schedule`]:
//!
//! ```json
//! {"n_qubits": 2, "total_duration": 1.5707963267948966,
//!  "segments": [{"qubit": 0, "start": 0.0, "duration": 0.19634954084936207,
//!                "family": "gaussian", "area": 3.141592653589793, "axis_phase": 0.0}]}
//! ```
//!
//! `family` is the shape label (`gaussian`, `negative_reverse(gaussian)`,
//! `half_scaled(sine)`, ...) and `area` the area of the innermost base
//! envelope, so a faulty identity records the rotation angle it cancels.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pulses::PulseShape;
use crate::sequencer::{Schedule, Segment};

#[derive(Serialize, Deserialize)]
struct SegmentRecord {
    qubit: usize,
    start: f64,
    duration: f64,
    family: String,
    area: f64,
    axis_phase: f64,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRecord {
    n_qubits: usize,
    total_duration: f64,
    segments: Vec<SegmentRecord>,
}

/// Serialises `schedule`, segments sorted by start time then qubit.
pub fn to_json(schedule: &Schedule) -> Result<String> {
    let mut segments: Vec<&Segment> = schedule.segments.iter().collect();
    segments.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.qubit.cmp(&b.qubit)));
    let record = ScheduleRecord {
        n_qubits: schedule.n_qubits,
        total_duration: schedule.total_duration,
        segments: segments
            .into_iter()
            .map(|s| SegmentRecord {
                qubit: s.qubit,
                start: s.start,
                duration: s.duration(),
                family: s.shape.label(),
                area: s.shape.base_area(),
                axis_phase: s.axis_phase,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&record)?)
}

/// Reads a schedule written by [`to_json`] and validates it. Block
/// annotations are not part of the format.
pub fn from_json(text: &str) -> Result<Schedule> {
    let record: ScheduleRecord = serde_json::from_str(text)?;
    let segments = record
        .segments
        .into_iter()
        .map(|s| {
            Ok(Segment {
                qubit: s.qubit,
                start: s.start,
                shape: PulseShape::from_label(&s.family, s.duration, s.area)?,
                axis_phase: s.axis_phase,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let schedule = Schedule {
        n_qubits: record.n_qubits,
        total_duration: record.total_duration,
        segments,
        label: "imported".into(),
        blocks: Vec::new(),
    };
    schedule.validate()?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::Family;
    use crate::sequencer::{compile_cns, compile_dcg, Rotation};
    use std::f64::consts::PI;

    fn sorted(mut s: Vec<Segment>) -> Vec<Segment> {
        s.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.qubit.cmp(&b.qubit)));
        s
    }

    #[test]
    fn round_trip() {
        for s in [
            compile_dcg(3, Rotation::ry(-PI / 2.0), 1, PI / 32.0, Family::Sine).unwrap(),
            compile_cns(4, 1, 2, PI / 48.0, Family::Gaussian).unwrap(),
        ] {
            let back = from_json(&to_json(&s).unwrap()).unwrap();
            assert_eq!(back.n_qubits, s.n_qubits);
            assert_eq!(back.total_duration, s.total_duration);
            assert_eq!(back.segments, sorted(s.segments.clone()));
        }
    }

    #[test]
    fn field_names() {
        let s = compile_dcg(2, Rotation::rx(PI / 2.0), 0, PI / 16.0, Family::Gaussian).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&s).unwrap()).unwrap();
        assert_eq!(v["n_qubits"], 2);
        let seg = &v["segments"][0];
        for key in ["qubit", "start", "duration", "family", "area", "axis_phase"] {
            assert!(seg.get(key).is_some(), "missing {key}");
        }
        let families: Vec<&str> = v["segments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["family"].as_str().unwrap())
            .collect();
        assert_eq!(families.iter().filter(|f| **f == "negative_reverse(gaussian)").count(), 3);
        assert_eq!(families.iter().filter(|f| **f == "half_scaled(gaussian)").count(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(from_json("{").is_err());
        let bad = r#"{"n_qubits": 1, "total_duration": 1.0,
            "segments": [{"qubit": 0, "start": 0.5, "duration": 1.0,
                          "family": "gaussian", "area": 1.0, "axis_phase": 0.0}]}"#;
        assert!(from_json(bad).is_err());
        let bad = r#"{"n_qubits": 1, "total_duration": 1.0,
            "segments": [{"qubit": 0, "start": 0.0, "duration": 1.0,
                          "family": "square", "area": 1.0, "axis_phase": 0.0}]}"#;
        assert!(from_json(bad).is_err());
    }
}
