use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, CMatrix, Cx, Real};
use std::fmt::Write as _;

/// An ordered gate list on `site_count` qubits, measured at the end.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T: Real> {
    site_count: usize,
    gates: Vec<Gate<T>>,
    measured: Vec<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(site_count: usize) -> Result<Self> {
        if site_count == 0 {
            return Err(Error::InvalidArgument("a circuit needs at least one site".into()));
        }
        Ok(Circuit { site_count, gates: Vec::new(), measured: Vec::new() })
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn measured_sites(&self) -> &[usize] {
        &self.measured
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn probabilistic_count(&self) -> usize {
        self.gates.iter().filter(|g| g.probability.is_some()).count()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<&mut Self> {
        if !self.measured.is_empty() {
            return Err(Error::InvalidGate("gates cannot follow the measurement".into()));
        }
        gate.validate(self.site_count)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn gate(&mut self, kind: GateKind<T>, sites: &[usize]) -> Result<&mut Self> {
        self.push(Gate::new(kind, sites.to_vec()))
    }

    pub fn x(&mut self, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::X, &[site])
    }

    pub fn h(&mut self, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::H, &[site])
    }

    pub fn z(&mut self, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::Z, &[site])
    }

    pub fn rx(&mut self, theta: T, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::Rx(theta), &[site])
    }

    pub fn rz(&mut self, theta: T, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::Rz(theta), &[site])
    }

    pub fn u3(&mut self, theta: T, phi: T, lambda: T, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::U3(theta, phi, lambda), &[site])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::Cnot, &[control, target])
    }

    pub fn crx(&mut self, theta: T, control: usize, target: usize) -> Result<&mut Self> {
        self.gate(GateKind::CRx(theta), &[control, target])
    }

    pub fn delay(&mut self, duration: T, site: usize) -> Result<&mut Self> {
        self.gate(GateKind::Delay(duration), &[site])
    }

    pub fn unitary(&mut self, u: CMatrix<T>, sites: &[usize]) -> Result<&mut Self> {
        self.gate(GateKind::Unitary(u), sites)
    }

    pub fn probabilistic(&mut self, kind: GateKind<T>, sites: &[usize], p: T) -> Result<&mut Self> {
        self.push(Gate::new(kind, sites.to_vec()).with_probability(p))
    }

    pub fn measure(&mut self, sites: &[usize]) -> Result<&mut Self> {
        crate::linalg::check_sites(sites, self.site_count)?;
        if sites.is_empty() {
            return Err(Error::InvalidArgument("nothing to measure".into()));
        }
        self.measured = sites.to_vec();
        Ok(self)
    }

    /// Appends `other` with its site `k` relabelled to `map[k]`; a
    /// measurement on `other` is dropped.
    pub fn append_mapped(&mut self, other: &Circuit<T>, map: &[usize]) -> Result<&mut Self> {
        if map.len() != other.site_count {
            return Err(Error::DimensionMismatch { expected: other.site_count, found: map.len() });
        }
        crate::linalg::check_sites(map, self.site_count)?;
        for g in &other.gates {
            let mut g = g.clone();
            g.sites = g.sites.iter().map(|&s| map[s]).collect();
            self.push(g)?;
        }
        Ok(self)
    }

    pub fn append(&mut self, other: &Circuit<T>) -> Result<&mut Self> {
        let map: Vec<usize> = (0..other.site_count).collect();
        self.append_mapped(other, &map)
    }

    /// Total gate time on `site` under the given per-gate durations.
    pub fn duration_on(&self, site: usize, durations: &super::GateDurations<T>) -> T {
        self.gates
            .iter()
            .filter(|g| g.sites.contains(&site))
            .fold(T::zero(), |acc, g| acc + durations.of(&g.kind))
    }

    /// Line-oriented text form; see [`Circuit::parse`].
    pub fn dump(&self) -> String {
        let mut out = format!("SITES {}\n", self.site_count);
        for g in &self.gates {
            let sites: Vec<String> = g.sites.iter().map(|s| s.to_string()).collect();
            let params = g.kind.params();
            let params = if params.is_empty() {
                "-".to_string()
            } else {
                params.iter().map(|p| format!("{:e}", to_f64(*p))).collect::<Vec<_>>().join(",")
            };
            let _ = write!(out, "GATE {} {} {}", g.kind.name(), sites.join(","), params);
            if let Some(p) = g.probability {
                let _ = write!(out, " {:e}", to_f64(p));
            }
            out.push('\n');
        }
        if !self.measured.is_empty() {
            let sites: Vec<String> = self.measured.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "MEASURE {}", sites.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit<T>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "SITES" => {
                    if circuit.is_some() {
                        return Err(err("SITES given twice".into()));
                    }
                    let n = fields
                        .get(1)
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err("SITES needs a count".into()))?;
                    circuit = Some(Circuit::new(n).map_err(|e| err(e.to_string()))?);
                }
                "GATE" => {
                    let c = circuit.as_mut().ok_or_else(|| err("GATE before SITES".into()))?;
                    let gate = parse_gate(&fields).map_err(err)?;
                    c.push(gate).map_err(|e| err(e.to_string()))?;
                }
                "MEASURE" => {
                    let c = circuit.as_mut().ok_or_else(|| err("MEASURE before SITES".into()))?;
                    let sites = parse_list::<usize>(fields.get(1).copied().unwrap_or("")).map_err(err)?;
                    c.measure(&sites).map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }
        circuit.ok_or(Error::Parse { line: 0, message: "missing SITES line".into() })
    }
}

fn parse_list<V: std::str::FromStr>(field: &str) -> std::result::Result<Vec<V>, String> {
    if field == "-" {
        return Ok(Vec::new());
    }
    field
        .split(',')
        .map(|s| s.trim().parse::<V>().map_err(|_| format!("cannot parse {s:?}")))
        .collect()
}

fn parse_gate<T: Real>(fields: &[&str]) -> std::result::Result<Gate<T>, String> {
    if !(4..=5).contains(&fields.len()) {
        return Err("expected `GATE kind sites params [prob]`".into());
    }
    let sites = parse_list::<usize>(fields[2])?;
    let params: Vec<T> = parse_list::<f64>(fields[3])?.into_iter().map(lit).collect();
    let need = |n: usize| -> std::result::Result<(), String> {
        if params.len() == n {
            Ok(())
        } else {
            Err(format!("{} takes {n} parameters, got {}", fields[1], params.len()))
        }
    };
    let kind = match fields[1].to_ascii_uppercase().as_str() {
        "X" => need(0).map(|_| GateKind::X)?,
        "H" => need(0).map(|_| GateKind::H)?,
        "Z" => need(0).map(|_| GateKind::Z)?,
        "RX" => need(1).map(|_| GateKind::Rx(params[0]))?,
        "RZ" => need(1).map(|_| GateKind::Rz(params[0]))?,
        "U3" => need(3).map(|_| GateKind::U3(params[0], params[1], params[2]))?,
        "CNOT" => need(0).map(|_| GateKind::Cnot)?,
        "CRX" => need(1).map(|_| GateKind::CRx(params[0]))?,
        "DELAY" => need(1).map(|_| GateKind::Delay(params[0]))?,
        "UNITARY" => {
            let dim = 1usize << sites.len();
            need(2 * dim * dim)?;
            let entries: Vec<Cx<T>> = params.chunks(2).map(|c| Cx::new(c[0], c[1])).collect();
            GateKind::Unitary(CMatrix::from_row_slice(dim, dim, &entries))
        }
        other => return Err(format!("unknown gate {other:?}")),
    };
    let mut gate = Gate::new(kind, sites);
    if let Some(p) = fields.get(4) {
        gate = gate.with_probability(lit(p.parse::<f64>().map_err(|_| format!("bad probability {p:?}"))?));
    }
    Ok(gate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_parse_round_trip() {
        let mut c = Circuit::<f64>::new(3).unwrap();
        c.x(0).unwrap().h(1).unwrap().cnot(1, 2).unwrap().rz(0.25, 2).unwrap();
        c.u3(0.1, -0.2, 0.3, 0).unwrap().crx(1.5, 1, 0).unwrap().delay(35.5, 2).unwrap();
        c.probabilistic(GateKind::X, &[1], 0.5).unwrap();
        c.unitary(GateKind::<f64>::Cnot.matrix(), &[2, 0]).unwrap();
        c.measure(&[0, 2]).unwrap();
        let text = c.dump();
        let back = Circuit::<f64>::parse(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_reports_line() {
        let text = "# header\nSITES 2\nGATE X 0 -\nGATE RZ 1 oops\n";
        match Circuit::<f64>::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Circuit::<f64>::parse("GATE X 0 -").is_err());
        assert!(Circuit::<f64>::parse("SITES 1\nGATE CNOT 0,1 -").is_err());
    }

    #[test]
    fn measurement_is_last() {
        let mut c = Circuit::<f64>::new(2).unwrap();
        c.measure(&[0, 1]).unwrap();
        assert!(c.x(0).is_err());
    }
}
