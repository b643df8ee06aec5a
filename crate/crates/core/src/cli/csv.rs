use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::sim::{Detail, Mode, TimeSeries};

use super::fmt_num;

pub const BASE_HEADER: &str = "t,x,y,psi,u,v,r,tau_u,tau_r,tau1,tau2";
pub const STABILIZE_COLUMNS: &str = ",xbar,ybar,vbar,z,ubar,L1,L2,D1,D2";
pub const TRACK_COLUMNS: &str = ",xe,ye,psie,ue,ve,re,vbare,ze,ubare,red,L3,err_norm";

pub fn csv_header(mode: Mode) -> String {
    let extra = match mode {
        Mode::Stabilize => STABILIZE_COLUMNS,
        Mode::Track => TRACK_COLUMNS,
        Mode::Reference => "",
    };
    format!("{BASE_HEADER}{extra}")
}

/// Writes one header line and one row per sample.
pub fn write_csv_to<W: Write>(ts: &TimeSeries, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", csv_header(ts.mode()))?;
    let mut row: Vec<f64> = Vec::with_capacity(24);
    for s in &ts.samples {
        row.clear();
        row.push(s.t);
        row.extend(s.state.to_array());
        row.extend([s.inputs.tau_u, s.inputs.tau_r, s.reduced.tau1, s.reduced.tau2]);
        match &s.detail {
            Detail::Stabilize(r) => {
                let c = &r.coords;
                row.extend([c.xbar, c.ybar, c.vbar, c.z, c.ubar, r.l1, r.l2, r.d1, r.d2]);
            }
            Detail::Track(r) => {
                let c = &r.law.coords;
                row.extend([
                    c.xe, c.ye, c.psie, c.ue, c.ve, c.re, c.vbare, c.ze, c.ubare, r.law.red, r.l3, r.err_norm,
                ]);
            }
            Detail::Reference => {}
        }
        let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_csv(ts: &TimeSeries, path: &Path) -> io::Result<()> {
    write_csv_to(ts, BufWriter::new(File::create(path)?))
}
