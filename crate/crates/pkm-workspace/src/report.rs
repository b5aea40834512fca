//! Report rendering: JSON/CSV cube reports, sweep tables, paving exports
//! and SVG slices. Every number comes from the search/certify layers; the
//! renderers only format.

use serde::Serialize;

use crate::certify::Verdict;
use crate::kinematics::MachineModel;
use crate::search::{CubeResult, Paving};

#[derive(Serialize)]
pub struct ParamsOut {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub base_radius: Option<f64>,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    pub psi_min: f64,
    pub psi_max: f64,
    pub alpha: f64,
}

#[derive(Serialize)]
pub struct CubeOut {
    pub center: Vec<f64>,
    pub edge: f64,
}

#[derive(Serialize)]
pub struct StatsOut {
    pub boxes: u64,
    pub classify_calls: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

/// The stable find-cube report schema.
#[derive(Serialize)]
pub struct CubeReport {
    pub machine: String,
    pub params: ParamsOut,
    pub cube: CubeOut,
    pub stats: StatsOut,
    pub incomplete: bool,
}

impl CubeReport {
    pub fn new(
        machine: &MachineModel,
        psi_min: f64,
        psi_max: f64,
        result: &CubeResult,
        deterministic: bool,
    ) -> Self {
        CubeReport {
            machine: machine.kind().name().to_string(),
            params: ParamsOut {
                l: machine.leg_length(),
                base_radius: machine.base_radius(),
                r: machine.platform_radius(),
                lambda: machine.lambda(),
                psi_min,
                psi_max,
                alpha: result.alpha,
            },
            cube: CubeOut {
                center: result.center.clone(),
                edge: result.edge(),
            },
            stats: StatsOut {
                boxes: result.stats.boxes,
                classify_calls: result.stats.classify_calls,
                wall_ms: (!deterministic).then_some(result.stats.wall_ms),
            },
            incomplete: result.incomplete,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut s = String::from(
            "machine,L,R,r,lambda,psi_min,psi_max,alpha,center_x,center_y,center_z,edge,boxes,classify_calls,wall_ms,incomplete\n",
        );
        let center_z = self.cube.center.get(2).map(|z| z.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.machine,
            self.params.l,
            opt(self.params.base_radius),
            opt(self.params.r),
            opt(self.params.lambda),
            self.params.psi_min,
            self.params.psi_max,
            self.params.alpha,
            self.cube.center[0],
            self.cube.center[1],
            center_z,
            self.cube.edge,
            self.stats.boxes,
            self.stats.classify_calls,
            self.stats.wall_ms.map(|w| w.to_string()).unwrap_or_default(),
            self.incomplete,
        ));
        s
    }
}

/// One sweep row; `result` is absent for invalid geometry.
pub struct SweepRow {
    pub lambda: f64,
    pub result: Option<CubeResult>,
}

impl SweepRow {
    pub fn status(&self) -> &'static str {
        match &self.result {
            None => "invalid-geometry",
            Some(r) if r.incomplete => "incomplete",
            Some(_) => "ok",
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("lambda,center_x,center_y,edge,status\n");
    for row in rows {
        match &row.result {
            Some(r) => s.push_str(&format!(
                "{},{},{},{},{}\n",
                row.lambda,
                r.center[0],
                r.center[1],
                r.edge(),
                row.status()
            )),
            None => s.push_str(&format!("{},,,,{}\n", row.lambda, row.status())),
        }
    }
    s
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Inside => "inside",
        Verdict::Outside => "outside",
        Verdict::Undetermined => "boundary",
    }
}

/// Box list with per-axis bounds and verdict.
pub fn paving_csv(paving: &Paving) -> String {
    let dim = paving.boxes.first().map_or(3, |(b, _)| b.dim());
    let mut s = String::new();
    if dim == 2 {
        s.push_str("x_lo,x_hi,y_lo,y_hi,verdict\n");
    } else {
        s.push_str("x_lo,x_hi,y_lo,y_hi,z_lo,z_hi,verdict\n");
    }
    for (b, v) in &paving.boxes {
        for j in 0..dim {
            s.push_str(&format!("{},{},", b.axis(j).lo(), b.axis(j).hi()));
        }
        s.push_str(verdict_name(v.code));
        s.push('\n');
    }
    s
}

const SVG_SIZE: f64 = 720.0;
const SVG_MARGIN: f64 = 20.0;

/// Standalone SVG of a paving slice: the x-y plane for 2D pavings, the
/// boxes straddling `slice_z` for 3D ones. Inside, boundary and outside
/// boxes get three fill styles.
pub fn paving_svg(paving: &Paving, slice_z: f64) -> String {
    let drawn: Vec<_> = paving
        .boxes
        .iter()
        .filter(|(b, _)| b.dim() == 2 || b.axis(2).contains(slice_z))
        .collect();

    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (-1.0_f64, 1.0_f64, -1.0_f64, 1.0_f64);
    for (b, _) in &drawn {
        x_lo = x_lo.min(b.axis(0).lo());
        x_hi = x_hi.max(b.axis(0).hi());
        y_lo = y_lo.min(b.axis(1).lo());
        y_hi = y_hi.max(b.axis(1).hi());
    }
    let span = (x_hi - x_lo).max(y_hi - y_lo).max(1e-9);
    let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
    let px = |x: f64| SVG_MARGIN + (x - x_lo) * scale;
    // SVG y grows downward.
    let py = |y: f64| SVG_SIZE - SVG_MARGIN - (y - y_lo) * scale;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SVG_SIZE
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n",
        SVG_SIZE
    ));
    for (b, v) in &drawn {
        let (fill, stroke) = match v.code {
            Verdict::Inside => ("#74b06f", "#4c7a48"),
            Verdict::Undetermined => ("#e8c86e", "#b29340"),
            Verdict::Outside => ("#d9816f", "#a85744"),
        };
        let x = px(b.axis(0).lo());
        let y = py(b.axis(1).hi());
        let w = b.axis(0).width() * scale;
        let h = b.axis(1).width() * scale;
        s.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.4\"/>\n",
        ));
    }
    s.push_str("</svg>\n");
    s
}
