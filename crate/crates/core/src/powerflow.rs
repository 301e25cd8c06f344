//! AC power flow by Newton-Raphson in polar coordinates, and conversion of
//! line apparent powers into a normalized weighted graph.
//!
//! All quantities are per-unit on the case's `base_mva`. Bus `P` and `Q` are
//! net injections (generation minus load); angles are in radians.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{normalize_weights, WeightedGraph};

/// Flows below this magnitude are treated as zero and dropped.
pub const ZERO_FLOW: f64 = 1e-9;

/// Representative 24-bus case shipped with the crate.
pub const SAMPLE_CASE_JSON: &str = include_str!("../data/rts24_der.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BusKind {
    #[serde(rename = "slack")]
    Slack,
    PV,
    PQ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: i64,
    pub kind: BusKind,
    #[serde(rename = "P", default)]
    pub p: f64,
    #[serde(rename = "Q", default)]
    pub q: f64,
    #[serde(rename = "Vm", default = "one")]
    pub vm: f64,
    #[serde(rename = "Va", default)]
    pub va: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: i64,
    pub to: i64,
    pub r: f64,
    pub x: f64,
    /// Total line-charging susceptance, split evenly between the two ends.
    #[serde(default)]
    pub b_sh: f64,
}

impl Branch {
    pub fn series_admittance(&self) -> Complex64 {
        Complex64::new(self.r, self.x).inv()
    }
}

/// Injection overrides for one operating scenario; unset fields keep the
/// base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusOverride {
    pub id: i64,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "Vm", default, skip_serializing_if = "Option::is_none")]
    pub vm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub overrides: Vec<BusOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFlowCase {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<Scenario>,
}

impl PowerFlowCase {
    pub fn sample() -> Self {
        serde_json::from_str(SAMPLE_CASE_JSON).expect("shipped case parses")
    }

    fn index(&self) -> Result<HashMap<i64, usize>> {
        let mut index = HashMap::with_capacity(self.buses.len());
        for (k, b) in self.buses.iter().enumerate() {
            if index.insert(b.id, k).is_some() {
                return Err(Error::InvalidInput(format!("duplicate bus id {}", b.id)));
            }
        }
        Ok(index)
    }

    /// Checks ids, branch endpoints, impedances, the single slack bus and
    /// connectivity. Returns the id-to-position map.
    pub fn validate(&self) -> Result<HashMap<i64, usize>> {
        if self.buses.is_empty() {
            return Err(Error::InvalidInput("case has no buses".into()));
        }
        let index = self.index()?;
        let slack = self.buses.iter().filter(|b| b.kind == BusKind::Slack).count();
        if slack != 1 {
            return Err(Error::InvalidInput(format!("case needs exactly one slack bus, found {slack}")));
        }
        if let Some(b) = self
            .buses
            .iter()
            .find(|b| ![b.p, b.q, b.vm, b.va].iter().all(|v| v.is_finite()) || b.vm <= 0.0)
        {
            return Err(Error::InvalidInput(format!("bus {} has invalid values", b.id)));
        }
        let mut parent: Vec<usize> = (0..self.buses.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for br in &self.branches {
            let (Some(&a), Some(&b)) = (index.get(&br.from), index.get(&br.to)) else {
                return Err(Error::InvalidInput(format!(
                    "branch {}-{} references an unknown bus",
                    br.from, br.to
                )));
            };
            if a == b {
                return Err(Error::InvalidInput(format!("branch {}-{} is a self-loop", br.from, br.to)));
            }
            if !(br.r.is_finite() && br.x.is_finite() && br.b_sh.is_finite()) || (br.r == 0.0 && br.x == 0.0) {
                return Err(Error::InvalidInput(format!(
                    "branch {}-{} has invalid impedance",
                    br.from, br.to
                )));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        if let Some(k) = (0..self.buses.len()).find(|&k| find(&mut parent, k) != root) {
            return Err(Error::InvalidInput(format!(
                "network is disconnected: bus {} is unreachable from bus {}",
                self.buses[k].id, self.buses[0].id
            )));
        }
        Ok(index)
    }

    /// Copy of the case with a scenario's overrides applied.
    pub fn with_scenario(&self, scenario: &Scenario) -> Result<Self> {
        let index = self.index()?;
        let mut case = self.clone();
        for o in &scenario.overrides {
            let k = *index.get(&o.id).ok_or_else(|| {
                Error::InvalidInput(format!("scenario {} overrides unknown bus {}", scenario.name, o.id))
            })?;
            let bus = &mut case.buses[k];
            bus.p = o.p.unwrap_or(bus.p);
            bus.q = o.q.unwrap_or(bus.q);
            bus.vm = o.vm.unwrap_or(bus.vm);
        }
        Ok(case)
    }

    pub fn scenario(&self, name: &str) -> Result<Self> {
        let s = self
            .scenarios
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("case has no scenario named {name:?}")))?;
        self.with_scenario(s)
    }
}

/// Bus admittance matrix: `Y_ii = Σ (y + j b_sh/2)` over incident branches,
/// `Y_ik = -Σ y` over branches between `i` and `k`.
pub fn build_admittance(case: &PowerFlowCase) -> Result<DMatrix<Complex64>> {
    let index = case.validate()?;
    let n = case.buses.len();
    let mut y = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for br in &case.branches {
        let (a, b) = (index[&br.from], index[&br.to]);
        let ys = br.series_admittance();
        let half = Complex64::new(0.0, br.b_sh / 2.0);
        y[(a, a)] += ys + half;
        y[(b, b)] += ys + half;
        y[(a, b)] -= ys;
        y[(b, a)] -= ys;
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfOptions {
    /// Largest acceptable |ΔP| or |ΔQ| in per-unit.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PfOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFlowSolution {
    /// Complex bus voltages in case order.
    pub v: Vec<Complex64>,
    /// Final `[ΔP (non-slack); ΔQ (PQ)]`.
    pub mismatches: Vec<f64>,
    pub iterations: usize,
    /// Largest mismatch before each iteration and after the last.
    pub trace: Vec<f64>,
}

impl PowerFlowSolution {
    pub fn max_mismatch(&self) -> f64 {
        self.mismatches.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn injections(y: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let current = y * v;
    v.zip_map(&current, |vi, ii| vi * ii.conj())
}

/// Newton-Raphson on P mismatches at PV and PQ buses and Q mismatches at PQ
/// buses, from a flat start (`|V| = 1`, angle 0 at PQ buses; specified
/// magnitudes at PV buses; slack voltage fixed).
pub fn solve_power_flow(case: &PowerFlowCase, opts: &PfOptions) -> Result<PowerFlowSolution> {
    let y = build_admittance(case)?;
    let n = case.buses.len();
    let pvpq: Vec<usize> = (0..n).filter(|&k| case.buses[k].kind != BusKind::Slack).collect();
    let pq: Vec<usize> = (0..n).filter(|&k| case.buses[k].kind == BusKind::PQ).collect();

    let mut vm: Vec<f64> = case
        .buses
        .iter()
        .map(|b| if b.kind == BusKind::PQ { 1.0 } else { b.vm })
        .collect();
    let mut va: Vec<f64> = case
        .buses
        .iter()
        .map(|b| if b.kind == BusKind::Slack { b.va } else { 0.0 })
        .collect();
    let spec: Vec<Complex64> = case.buses.iter().map(|b| Complex64::new(b.p, b.q)).collect();

    let voltages = |vm: &[f64], va: &[f64]| DVector::from_fn(n, |k, _| Complex64::from_polar(vm[k], va[k]));
    let mismatch = |v: &DVector<Complex64>| -> Vec<f64> {
        let s = injections(&y, v);
        pvpq.iter()
            .map(|&k| s[k].re - spec[k].re)
            .chain(pq.iter().map(|&k| s[k].im - spec[k].im))
            .collect()
    };
    let max_abs = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut v = voltages(&vm, &va);
    let mut f = mismatch(&v);
    let mut trace = vec![max_abs(&f)];
    let mut iterations = 0;
    while max_abs(&f) > opts.tol {
        if iterations == opts.max_iter || !max_abs(&f).is_finite() {
            return Err(Error::Divergence { iterations, trace });
        }
        iterations += 1;

        // dS/dθ = j diag(V) conj(diag(I) - Y diag(V))
        // dS/d|V| = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        let current = &y * &v;
        let unit = v.map(|x| x / x.norm());
        let ds_dva = DMatrix::from_fn(n, n, |i, k| {
            let diag = if i == k { current[i] } else { Complex64::new(0.0, 0.0) };
            Complex64::i() * v[i] * (diag - y[(i, k)] * v[k]).conj()
        });
        let ds_dvm = DMatrix::from_fn(n, n, |i, k| {
            let diag = if i == k { current[i].conj() * unit[i] } else { Complex64::new(0.0, 0.0) };
            v[i] * (y[(i, k)] * unit[k]).conj() + diag
        });
        let (na, nm) = (pvpq.len(), pq.len());
        let jac = DMatrix::from_fn(na + nm, na + nm, |r, c| {
            let (row, take_re) = if r < na { (pvpq[r], true) } else { (pq[r - na], false) };
            let entry = if c < na { ds_dva[(row, pvpq[c])] } else { ds_dvm[(row, pq[c - na])] };
            if take_re {
                entry.re
            } else {
                entry.im
            }
        });
        let rhs = DVector::from_iterator(na + nm, f.iter().map(|x| -x));
        let lu = jac.clone().lu();
        let Some(dx) = lu.solve(&rhs) else {
            let weakest = (0..na + nm)
                .min_by(|&a, &b| jac.row(a).norm().total_cmp(&jac.row(b).norm()))
                .map(|r| if r < na { pvpq[r] } else { pq[r - na] })
                .expect("non-empty system");
            return Err(Error::Numeric(format!(
                "singular power-flow Jacobian at iteration {iterations}; weakest row belongs to bus {}",
                case.buses[weakest].id
            )));
        };
        for (c, &k) in pvpq.iter().enumerate() {
            va[k] += dx[c];
        }
        for (c, &k) in pq.iter().enumerate() {
            vm[k] += dx[na + c];
        }
        v = voltages(&vm, &va);
        f = mismatch(&v);
        trace.push(max_abs(&f));
    }
    Ok(PowerFlowSolution {
        v: v.iter().copied().collect(),
        mismatches: f,
        iterations,
        trace,
    })
}

/// Complex power entering branch `br` at its `from` end and at its `to` end.
pub fn branch_flows(br: &Branch, vf: Complex64, vt: Complex64) -> (Complex64, Complex64) {
    let ys = br.series_admittance();
    let half = Complex64::new(0.0, br.b_sh / 2.0);
    let s_ft = vf * ((vf - vt) * ys + vf * half).conj();
    let s_tf = vt * ((vt - vf) * ys + vt * half).conj();
    (s_ft, s_tf)
}

/// `|Σ P_i - Σ_branches Re(S_ij + S_ji)|`: injected real power minus losses.
pub fn power_balance_residual(case: &PowerFlowCase, sol: &PowerFlowSolution) -> Result<f64> {
    let index = case.validate()?;
    let y = build_admittance(case)?;
    let v = DVector::from_vec(sol.v.clone());
    let injected: f64 = injections(&y, &v).iter().map(|s| s.re).sum();
    let losses: f64 = case
        .branches
        .iter()
        .map(|br| {
            let (a, b) = branch_flows(br, sol.v[index[&br.from]], sol.v[index[&br.to]]);
            (a + b).re
        })
        .sum();
    Ok((injected - losses).abs())
}

/// Weighted graph over the buses (in case order) whose edge weights are
/// branch loadings `max(|S_ij|, |S_ji|)`, summed over parallel branches,
/// dropped below [`ZERO_FLOW`] and normalized to a maximum of 1.
pub fn line_weights(case: &PowerFlowCase, sol: &PowerFlowSolution) -> Result<WeightedGraph> {
    let index = case.validate()?;
    if sol.v.len() != case.buses.len() {
        return Err(Error::InvalidInput("solution does not match the case".into()));
    }
    let residual = sol.max_mismatch();
    if !(residual <= 1e-6) {
        return Err(Error::InvalidInput(format!(
            "power flow is not converged (max mismatch {residual:e})"
        )));
    }
    let mut loading: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for br in &case.branches {
        let (a, b) = (index[&br.from], index[&br.to]);
        let (s_ab, s_ba) = branch_flows(br, sol.v[a], sol.v[b]);
        *loading.entry((a.min(b), a.max(b))).or_default() += s_ab.norm().max(s_ba.norm());
    }
    let g = WeightedGraph::new(
        case.buses.len(),
        loading.into_iter().filter(|&(_, w)| w >= ZERO_FLOW).map(|((a, b), w)| (a, b, w)),
    )?;
    if g.m() == 0 {
        return Ok(g);
    }
    normalize_weights(&g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bus(id: i64, kind: BusKind, p: f64, q: f64) -> Bus {
        Bus {
            id,
            kind,
            p,
            q,
            vm: 1.0,
            va: 0.0,
        }
    }

    fn two_bus(p: f64, q: f64, r: f64, x: f64) -> PowerFlowCase {
        PowerFlowCase {
            description: String::new(),
            base_mva: 100.0,
            buses: vec![bus(1, BusKind::Slack, 0.0, 0.0), bus(2, BusKind::PQ, p, q)],
            branches: vec![Branch {
                from: 1,
                to: 2,
                r,
                x,
                b_sh: 0.0,
            }],
            scenarios: vec![],
        }
    }

    #[test]
    fn two_bus_admittance() {
        // y = 1 - j10 corresponds to z = 1/(1 - j10)
        let z = Complex64::new(1.0, -10.0).inv();
        let case = two_bus(0.0, 0.0, z.re, z.im);
        let y = build_admittance(&case).unwrap();
        let expect = Complex64::new(1.0, -10.0);
        assert!((y[(0, 0)] - expect).norm() < 1e-12);
        assert!((y[(0, 1)] + expect).norm() < 1e-12);
        assert_eq!(y, y.transpose());

        let mut shunted = case.clone();
        shunted.branches[0].b_sh = 0.2;
        let ys = build_admittance(&shunted).unwrap();
        assert!((ys[(0, 0)] - y[(0, 0)] - Complex64::new(0.0, 0.1)).norm() < 1e-12);
        assert_eq!(ys[(0, 1)], y[(0, 1)]);
    }

    #[test]
    fn zero_injection_is_flat() {
        let case = two_bus(0.0, 0.0, 0.01, 0.1);
        let sol = solve_power_flow(&case, &PfOptions::default()).unwrap();
        assert!(sol.iterations <= 1);
        assert!(sol.v.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn rejects_bad_cases() {
        let mut case = two_bus(-0.5, -0.2, 0.01, 0.1);
        case.buses[1].kind = BusKind::Slack;
        assert!(build_admittance(&case).is_err());
        let mut case = two_bus(-0.5, -0.2, 0.01, 0.1);
        case.buses.push(bus(3, BusKind::PQ, 0.0, 0.0));
        assert!(matches!(build_admittance(&case), Err(Error::InvalidInput(m)) if m.contains("disconnected")));
    }

    #[test]
    fn single_edge_weight() {
        let case = two_bus(-0.5, -0.2, 0.01, 0.1);
        let sol = solve_power_flow(&case, &PfOptions::default()).unwrap();
        let g = line_weights(&case, &sol).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edges()[0].w, 1.0);
    }

    #[test]
    fn divergence_reports_trace() {
        // far beyond the transfer limit of the line
        let case = two_bus(-50.0, -20.0, 0.01, 0.1);
        match solve_power_flow(&case, &PfOptions::default()) {
            Err(Error::Divergence { trace, .. }) => assert!(!trace.is_empty()),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn sample_case_parses_with_scenarios() {
        let case = PowerFlowCase::sample();
        assert_eq!(case.buses.len(), 24);
        case.validate().unwrap();
        assert_eq!(case.scenarios.len(), 2);
        for s in &case.scenarios {
            case.with_scenario(s).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn sample_case_and_scenarios_converge() {
        let case = PowerFlowCase::sample();
        let mut densities = Vec::new();
        for c in [case.clone(), case.scenario("der-low").unwrap(), case.scenario("der-high").unwrap()] {
            let sol = solve_power_flow(&c, &PfOptions::default()).unwrap();
            assert!(sol.iterations <= 10, "{} iterations", sol.iterations);
            assert!(power_balance_residual(&c, &sol).unwrap() <= 1e-6);
            let g = line_weights(&c, &sol).unwrap();
            assert!(g.is_normalized());
            densities.push(g.density().unwrap());
        }
        assert!((densities[1] - densities[2]).abs() > 1e-3);
    }
}
