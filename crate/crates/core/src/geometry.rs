//! Circuit model and the widest-line trajectory through each curve.
//!
//! A circuit is a flat, cyclic sequence of straights and circular curves that
//! share one track width. The fastest line through a curve is the circular arc
//! of maximum radius that stays on track; it starts before the geometric
//! corner entry and ends after its exit, so part of each neighbouring straight
//! is driven as curve.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CircuitError, GeometryError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveElement {
    #[serde(rename = "inner_radius_m")]
    pub inner_radius: f64,
    #[serde(rename = "angle_rad")]
    pub angle: f64,
    /// Cornering speed of the baseline car on this curve.
    #[serde(rename = "ref_speed_mps")]
    pub ref_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraightElement {
    #[serde(rename = "length_m")]
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Element {
    Straight(StraightElement),
    Curve(CurveElement),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    #[serde(rename = "track_width_m")]
    pub track_width: f64,
    pub laps: u32,
    #[serde(rename = "max_speed_mps")]
    pub max_speed: f64,
    #[serde(rename = "pit_penalty_s")]
    pub pit_penalty: f64,
    #[serde(rename = "fuel_per_lap_kg")]
    pub fuel_per_lap: f64,
    #[serde(default = "default_speed_scale")]
    pub speed_scale: f64,
    pub elements: Vec<Element>,
}

fn default_speed_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySolution {
    pub max_radius: f64,
    pub absorbed_length: f64,
    pub arc_length: f64,
}

fn check_inputs(curve: &CurveElement, track_width: f64) -> Result<(), GeometryError> {
    if !curve.angle.is_finite() || curve.angle <= 0.0 {
        return Err(GeometryError::BadAngle(curve.angle));
    }
    if !curve.inner_radius.is_finite() || curve.inner_radius <= 0.0 {
        return Err(GeometryError::BadInput("inner radius"));
    }
    if !track_width.is_finite() || track_width <= 0.0 {
        return Err(GeometryError::BadInput("track width"));
    }
    Ok(())
}

/// Radius of the widest circular line that touches the outer edge at both
/// ends of the curve and the inner edge at its apex. Curves turning through
/// half a revolution or more are driven along the outer edge.
pub fn max_trajectory_radius(curve: &CurveElement, track_width: f64) -> Result<f64, GeometryError> {
    check_inputs(curve, track_width)?;
    let outer = curve.inner_radius + track_width;
    if curve.angle >= PI {
        return Ok(outer);
    }
    let c = (curve.angle / 2.0).cos();
    Ok((outer - curve.inner_radius * c) / (1.0 - c))
}

/// Length of each adjoining straight that the widest line swallows.
pub fn absorbed_straight_length(curve: &CurveElement, track_width: f64) -> Result<f64, GeometryError> {
    let r = max_trajectory_radius(curve, track_width)?;
    if curve.angle >= PI {
        Ok(track_width)
    } else {
        Ok((r - curve.inner_radius) * (curve.angle / 2.0).sin())
    }
}

pub fn trajectory(curve: &CurveElement, track_width: f64) -> Result<TrajectorySolution, GeometryError> {
    let max_radius = max_trajectory_radius(curve, track_width)?;
    let absorbed_length = absorbed_straight_length(curve, track_width)?;
    Ok(TrajectorySolution {
        max_radius,
        absorbed_length,
        arc_length: max_radius * curve.angle,
    })
}

/// One step of a lap after straights have been merged and every pair of
/// adjacent curves has been separated by a zero-length straight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Curve {
        curve: CurveElement,
        path: TrajectorySolution,
    },
    Straight {
        nominal: f64,
        effective: f64,
        /// Indices into the layout's segment list.
        prev_curve: usize,
        next_curve: usize,
    },
}

/// A circuit rearranged as a strict curve/straight alternation starting at the
/// first curve. Lap time is a cyclic sum, so the rotation does not matter.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub segments: Vec<Segment>,
}

impl Layout {
    pub fn new(circuit: &Circuit) -> Result<Self, GeometryError> {
        let n = circuit.elements.len();
        let first_curve = circuit
            .elements
            .iter()
            .position(|e| matches!(e, Element::Curve(_)))
            .ok_or(GeometryError::BadInput("circuit has no curve"))?;

        let mut segments = Vec::with_capacity(2 * n);
        let mut pending: Option<f64> = None;
        for step in 0..n {
            match circuit.elements[(first_curve + step) % n] {
                Element::Straight(s) => *pending.get_or_insert(0.0) += s.length,
                Element::Curve(c) => {
                    if !segments.is_empty() {
                        segments.push(straight_placeholder(pending.take().unwrap_or(0.0)));
                    }
                    let path = trajectory(&c, circuit.track_width)?;
                    segments.push(Segment::Curve { curve: c, path });
                }
            }
        }
        segments.push(straight_placeholder(pending.take().unwrap_or(0.0)));

        let len = segments.len();
        for i in (1..len).step_by(2) {
            let prev = i - 1;
            let next = (i + 1) % len;
            let absorbed = |idx: usize| match segments[idx] {
                Segment::Curve { path, .. } => path.absorbed_length,
                Segment::Straight { .. } => unreachable!("layout alternates"),
            };
            let cut = absorbed(prev) + absorbed(next);
            if let Segment::Straight {
                nominal,
                effective,
                prev_curve,
                next_curve,
            } = &mut segments[i]
            {
                *effective = (*nominal - cut).max(0.0);
                *prev_curve = prev;
                *next_curve = next;
            }
        }
        Ok(Layout { segments })
    }

    pub fn effective_lengths(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Straight { effective, .. } => Some(*effective),
                Segment::Curve { .. } => None,
            })
            .collect()
    }

    pub fn arc_lengths(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Curve { path, .. } => Some(path.arc_length),
                Segment::Straight { .. } => None,
            })
            .collect()
    }
}

fn straight_placeholder(nominal: f64) -> Segment {
    Segment::Straight {
        nominal,
        effective: nominal,
        prev_curve: 0,
        next_curve: 0,
    }
}

/// Effective straight lengths after curve absorption, one per merged straight,
/// in layout order (starting after the first curve of the element list).
pub fn effective_lengths(circuit: &Circuit) -> Result<Vec<f64>, GeometryError> {
    Ok(Layout::new(circuit)?.effective_lengths())
}

impl Circuit {
    /// Every failed invariant, in element order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.name.trim().is_empty() {
            out.push("name must not be empty".to_string());
        }
        if !(self.track_width.is_finite() && self.track_width > 0.0) {
            out.push(format!("track_width_m must be > 0, got {}", self.track_width));
        }
        if self.laps < 1 {
            out.push("laps must be >= 1".to_string());
        }
        if !(self.max_speed.is_finite() && self.max_speed > 0.0) {
            out.push(format!("max_speed_mps must be > 0, got {}", self.max_speed));
        }
        if !(self.pit_penalty.is_finite() && self.pit_penalty >= 0.0) {
            out.push(format!("pit_penalty_s must be >= 0, got {}", self.pit_penalty));
        }
        if !(self.fuel_per_lap.is_finite() && self.fuel_per_lap > 0.0) {
            out.push(format!("fuel_per_lap_kg must be > 0, got {}", self.fuel_per_lap));
        }
        if !(self.speed_scale.is_finite() && self.speed_scale > 0.0) {
            out.push(format!("speed_scale must be > 0, got {}", self.speed_scale));
        }
        if self.elements.is_empty() {
            out.push("elements must not be empty".to_string());
        }
        let mut curves = 0;
        let mut straights = 0;
        for (i, e) in self.elements.iter().enumerate() {
            match e {
                Element::Straight(s) => {
                    straights += 1;
                    if !(s.length.is_finite() && s.length >= 0.0) {
                        out.push(format!("element {i}: straight length_m must be >= 0, got {}", s.length));
                    }
                }
                Element::Curve(c) => {
                    curves += 1;
                    if !(c.inner_radius.is_finite() && c.inner_radius > 0.0) {
                        out.push(format!(
                            "element {i}: curve inner_radius_m must be > 0, got {}",
                            c.inner_radius
                        ));
                    }
                    if !(c.angle.is_finite() && c.angle > 0.0) {
                        out.push(format!("element {i}: curve angle_rad must be > 0, got {}", c.angle));
                    }
                    if !(c.ref_speed.is_finite() && c.ref_speed > 0.0) {
                        out.push(format!(
                            "element {i}: curve ref_speed_mps must be > 0, got {}",
                            c.ref_speed
                        ));
                    }
                }
            }
        }
        if !self.elements.is_empty() {
            if curves == 0 {
                out.push("circuit needs at least one curve".to_string());
            }
            if straights == 0 {
                out.push("circuit needs at least one straight".to_string());
            }
        }
        out
    }

    pub fn validate(self) -> Result<Self, CircuitError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(CircuitError::Invalid(v))
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, CircuitError> {
        let circuit: Circuit = serde_json::from_str(text).map_err(|e| CircuitError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        circuit.validate()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn layout(&self) -> Result<Layout, GeometryError> {
        Layout::new(self)
    }

    /// Driven lap distance: effective straights plus trajectory arcs.
    pub fn driven_length(&self) -> Result<f64, GeometryError> {
        let layout = self.layout()?;
        Ok(layout.effective_lengths().iter().sum::<f64>() + layout.arc_lengths().iter().sum::<f64>())
    }
}

pub fn load_circuit<R: Read>(mut reader: R) -> Result<Circuit, CircuitError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Circuit::from_json_str(&text)
}

pub fn load_circuit_file(path: impl AsRef<Path>) -> Result<Circuit, CircuitError> {
    load_circuit(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn curve(r: f64, a: f64) -> CurveElement {
        CurveElement {
            inner_radius: r,
            angle: a,
            ref_speed: 40.0,
        }
    }

    fn circuit(elements: Vec<Element>) -> Circuit {
        Circuit {
            name: "toy".into(),
            track_width: 15.0,
            laps: 10,
            max_speed: 90.0,
            pit_penalty: 20.0,
            fuel_per_lap: 1.3,
            speed_scale: 1.0,
            elements,
        }
    }

    fn s(len: f64) -> Element {
        Element::Straight(StraightElement { length: len })
    }

    #[test]
    fn hairpin_uses_outer_edge() {
        let c = curve(50.0, PI);
        assert_eq!(max_trajectory_radius(&c, 15.0).unwrap(), 65.0);
        assert_eq!(absorbed_straight_length(&c, 15.0).unwrap(), 15.0);
    }

    #[test]
    fn quarter_turn_values() {
        let c = curve(30.0, FRAC_PI_2);
        let r = max_trajectory_radius(&c, 15.0).unwrap();
        assert_abs_diff_eq!(r, 81.213_203_435_596_42, epsilon = 1e-9);
        let ds = absorbed_straight_length(&c, 15.0).unwrap();
        assert_abs_diff_eq!(ds, 36.213_203_435_596_42, epsilon = 1e-9);
    }

    /// Geometric check that does not use the closed form: the trajectory
    /// circle is tangent to the outer edge at the corner entry and exit, and
    /// tangent to the inner edge at the apex.
    #[test]
    fn quarter_turn_tangency_oracle() {
        let (ri, w, a) = (30.0_f64, 15.0_f64, FRAC_PI_2);
        let re = ri + w;
        let r = max_trajectory_radius(&curve(ri, a), w).unwrap();
        // Curve centre at origin, bisector along +y; the apex is at distance ri
        // along the bisector and the trajectory centre lies beyond it.
        let centre_t = (0.0, ri - r);
        // Tangent to inner edge at apex: centre distance = r - ri.
        assert_abs_diff_eq!(centre_t.1.abs(), r - ri, epsilon = 1e-9);
        // The exit straight's outer edge is the line p.u = re, u the radial
        // direction at the corner exit.
        let half = a / 2.0;
        let u = (half.sin(), half.cos());
        let dist_to_edge = re - (centre_t.0 * u.0 + centre_t.1 * u.1);
        assert_abs_diff_eq!(dist_to_edge, r, epsilon = 1e-9);
        // The touch point sits down the straight from the corner exit by the
        // absorbed length.
        let t = (half.cos(), -half.sin());
        let along = centre_t.0 * t.0 + centre_t.1 * t.1;
        let ds = absorbed_straight_length(&curve(ri, a), w).unwrap();
        assert_abs_diff_eq!(along, ds, epsilon = 1e-9);
    }

    #[test]
    fn continuity_near_half_turn() {
        // The left derivative at a half turn is -w/2, so the gap closes
        // linearly in the angle deficit.
        let at_pi = max_trajectory_radius(&curve(50.0, PI), 15.0).unwrap();
        for eps in [1e-4, 1e-6, 1e-8, 1e-10] {
            let below = max_trajectory_radius(&curve(50.0, PI - eps), 15.0).unwrap();
            let gap = below - at_pi;
            assert!(gap >= 0.0);
            assert!(gap <= 7.5 * eps * (1.0 + eps) + 1e-12, "eps {eps}: gap {gap}");
        }
        let tiny = max_trajectory_radius(&curve(50.0, PI - 1e-10), 15.0).unwrap();
        assert!((tiny - at_pi).abs() <= 1e-9 * at_pi);
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(matches!(
            max_trajectory_radius(&curve(50.0, 0.0), 15.0),
            Err(GeometryError::BadAngle(_))
        ));
        assert!(max_trajectory_radius(&curve(50.0, f64::NAN), 15.0).is_err());
        assert!(max_trajectory_radius(&curve(50.0, 1.0), f64::INFINITY).is_err());
    }

    #[test]
    fn absorption_grows_for_shallow_kinks() {
        let shallow = absorbed_straight_length(&curve(30.0, 1e-3), 15.0).unwrap();
        assert!(shallow > 1e3);
    }

    #[test]
    fn straight_between_two_quarter_turns() {
        let q = Element::Curve(curve(30.0, FRAC_PI_2));
        let c = circuit(vec![q, s(800.0), q, s(50.0)]);
        let eff = effective_lengths(&c).unwrap();
        assert_abs_diff_eq!(eff[0], 800.0 - 2.0 * 36.213_203_435_596_42, epsilon = 1e-9);
        assert_eq!(eff[1], 0.0);
    }

    #[test]
    fn single_hairpin_loop_absorbs_both_ends() {
        let c = circuit(vec![s(1000.0), Element::Curve(curve(50.0, PI))]);
        assert_eq!(effective_lengths(&c).unwrap(), vec![1000.0 - 30.0]);
    }

    #[test]
    fn consecutive_straights_merge_across_wraparound() {
        let q = Element::Curve(curve(30.0, FRAC_PI_2));
        let split = circuit(vec![s(300.0), q, s(500.0), q, s(200.0)]);
        let whole = circuit(vec![q, s(500.0), q, s(500.0)]);
        assert_eq!(effective_lengths(&split).unwrap(), effective_lengths(&whole).unwrap());
    }

    #[test]
    fn adjacent_curves_get_a_zero_straight() {
        let q = Element::Curve(curve(30.0, FRAC_PI_2));
        let c = circuit(vec![q, q, s(900.0)]);
        let eff = effective_lengths(&c).unwrap();
        assert_eq!(eff.len(), 2);
        assert_eq!(eff[0], 0.0);
    }

    #[test]
    fn parse_reports_line_and_violations() {
        let bad = r#"{
  "name": "x", "track_width_m": 12, "laps": 3, "max_speed_mps": 80,
  "pit_penalty_s": 20, "fuel_per_lap_kg": 1.5,
  "elements": [ {"kind": "straight", "length_m": 100},
                {"kind": "curve", "inner_radius_m": -5, "angle_rad": 1, "ref_speed_mps": 30} ]
}"#;
        match Circuit::from_json_str(bad) {
            Err(CircuitError::Invalid(v)) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].contains("element 1"), "{v:?}");
            }
            other => panic!("unexpected {other:?}"),
        }

        let empty = r#"{"name": "x", "track_width_m": 12, "laps": 3, "max_speed_mps": 80,
            "pit_penalty_s": 20, "fuel_per_lap_kg": 1.5, "elements": []}"#;
        assert!(matches!(Circuit::from_json_str(empty), Err(CircuitError::Invalid(_))));

        let broken = "{\n  \"name\": \"x\",\n  \"laps\": oops\n}";
        match Circuit::from_json_str(broken) {
            Err(CircuitError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
