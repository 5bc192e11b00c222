//! Tables, figure data and sweeps as CSV.
//!
//! Every cell is computed independently (in parallel) and the rows are
//! assembled in input order, so the output only depends on the inputs.
//! Exact diagonalization and Bethe results go through the optional cache.

use rayon::prelude::*;

use crate::bethe::{solve_pattern, xx_energy_and_derivatives, xx_sector_record, BetheConfig, RootPattern};
use crate::cache::{cached, key_float, TextCache};
use crate::cft::{negativity_cft_ground, negativity_cft_sector, negativity_cft_tbc, Magnetization};
use crate::entanglement::{
    negativity_from_energy, negativity_from_rdm, negativity_sector_from_energy, negativity_tbc_from_energy, Method,
    TwistForm,
};
use crate::error::{Error, Result};
use crate::exact_diag::{ground_state, sector_minimum, two_site_rdm, EdConfig};
use crate::model::ModelSpec;
use crate::record::EnergyRecord;
use crate::reference::{self, TABLE_5};
use crate::thermo::{thermo_limit, thermo_limit_sector};

pub const UNAVAILABLE: &str = "UNAVAILABLE";

/// Largest ring handed to exact diagonalization unless configured otherwise.
pub const DEFAULT_ED_CAP: usize = 16;

/// Which twist-frame derivative the twisted columns use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TableForm {
    /// Exact column with [`TwistForm::UnscaledFlux`], conformal column with
    /// [`TwistForm::FixedAnisotropy`]; reproduces the reference tables.
    #[default]
    Tabulated,
    /// [`TwistForm::Consistent`] in both columns; agrees with the
    /// density-matrix route.
    Consistent,
}

impl TableForm {
    pub fn exact(&self) -> TwistForm {
        match self {
            TableForm::Tabulated => TwistForm::UnscaledFlux,
            TableForm::Consistent => TwistForm::Consistent,
        }
    }

    pub fn cft(&self) -> TwistForm {
        match self {
            TableForm::Tabulated => TwistForm::FixedAnisotropy,
            TableForm::Consistent => TwistForm::Consistent,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TableForm::Tabulated => "tabulated",
            TableForm::Consistent => "consistent",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [TableForm::Tabulated, TableForm::Consistent].into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub methods: Vec<Method>,
    pub ed_cap: usize,
    pub form: TableForm,
    pub ed: EdConfig,
    pub bethe: BetheConfig,
    pub cache: Option<TextCache>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            ed_cap: DEFAULT_ED_CAP,
            form: TableForm::default(),
            ed: EdConfig::default(),
            bethe: BetheConfig::default(),
            cache: None,
        }
    }
}

impl RunOptions {
    pub fn has(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }

    fn cache(&self) -> Option<&TextCache> {
        self.cache.as_ref()
    }

    fn check_ed(&self, length: usize) -> Result<()> {
        if length > self.ed_cap {
            return Err(Error::Infeasible(format!(
                "exact diagonalization is capped at L = {}; L = {length} needs --method bethe (or ff at Δ = 0) or a larger --ed-cap",
                self.ed_cap
            )));
        }
        Ok(())
    }
}

fn need_free_fermions(length: usize, delta: f64) -> Result<()> {
    if delta != 0.0 || !length.is_multiple_of(2) {
        return Err(Error::Infeasible(format!(
            "free fermions need Δ = 0 and even L (got Δ = {delta}, L = {length}); use --method ed or bethe"
        )));
    }
    Ok(())
}

fn need_bethe(length: usize, phi: f64) -> Result<()> {
    if !length.is_multiple_of(2) || !(0.0..std::f64::consts::PI).contains(&phi) {
        return Err(Error::Infeasible(format!(
            "the Bethe solver covers even L and 0 ≤ Φ < π (got L = {length}, Φ = {phi}); use --method ed"
        )));
    }
    Ok(())
}

/// Cached energy records hold ε, ∂ε/∂Δ and ∂ε/∂Φ.
const RECORD_LEN: usize = 3;

fn record_values(r: &EnergyRecord) -> Vec<f64> {
    vec![r.energy_density, r.d_delta, r.d_phi]
}

fn record_from(length: usize, delta: f64, phi: f64, v: &[f64]) -> Result<EnergyRecord> {
    match v {
        [e, d, p] => Ok(EnergyRecord {
            length,
            delta,
            phi,
            energy_density: *e,
            d_delta: *d,
            d_phi: *p,
        }),
        _ => Err(Error::DegenerateInput(format!("cached record has {} values", v.len()))),
    }
}

fn params_key(op: &str, length: usize, delta: f64, phi: f64) -> String {
    format!("{op} L={length} delta={} phi={}", key_float(delta), key_float(phi))
}

/// ε, ∂ε/∂Δ and ∂ε/∂Φ of the ground state from the Bethe solver or free fermions.
pub fn ground_record(method: Method, length: usize, delta: f64, phi: f64, opts: &RunOptions) -> Result<EnergyRecord> {
    let values = match method {
        Method::FreeFermion => {
            need_free_fermions(length, delta)?;
            record_values(&xx_energy_and_derivatives(length, phi)?)
        }
        Method::Bethe => {
            need_bethe(length, phi)?;
            cached(opts.cache(), &params_key("bethe-ground", length, delta, phi), RECORD_LEN, || {
                let spec = ModelSpec::twisted(length, delta, phi)?;
                Ok(record_values(&solve_pattern(&spec, RootPattern::Ground, &opts.bethe)?.record()?))
            })?
        }
        Method::Ed => {
            opts.check_ed(length)?;
            cached(opts.cache(), &params_key("ed-ground-record", length, delta, phi), RECORD_LEN, || {
                let spec = ModelSpec::twisted(length, delta, phi)?;
                Ok(record_values(&ground_state(&spec, &opts.ed)?.energy_record()))
            })?
        }
        Method::Cft => return Err(Error::Infeasible("the conformal formulas give no energy record".into())),
    };
    record_from(length, delta, phi, &values)
}

fn energy_route(rec: &EnergyRecord, form: TableForm) -> Result<f64> {
    if rec.phi == 0.0 {
        Ok(negativity_from_energy(rec.energy_density, rec.d_delta, rec.delta))
    } else {
        negativity_tbc_from_energy(rec, form.exact())
    }
}

/// Ground-state negativity of the (possibly twisted) ring by one method.
/// Exact diagonalization uses the density matrix unless the tabulated
/// twist form asks for the energy route.
pub fn ground_negativity(method: Method, length: usize, delta: f64, phi: f64, opts: &RunOptions) -> Result<f64> {
    match method {
        Method::Cft => {
            let thermo = thermo_limit(delta)?;
            if phi == 0.0 {
                negativity_cft_ground(delta, length, &thermo)
            } else {
                negativity_cft_tbc(delta, phi, length, &thermo, opts.form.cft())
            }
        }
        Method::Ed if phi == 0.0 || opts.form == TableForm::Consistent => {
            opts.check_ed(length)?;
            let v = cached(opts.cache(), &params_key("ed-ground-rdm", length, delta, phi), 1, || {
                let spec = ModelSpec::twisted(length, delta, phi)?;
                let state = ground_state(&spec, &opts.ed)?;
                Ok(vec![negativity_from_rdm(&two_site_rdm(&state, 0, 1))?])
            })?;
            Ok(v[0])
        }
        _ => energy_route(&ground_record(method, length, delta, phi, opts)?, opts.form),
    }
}

/// Negativity of the minimum-energy state of sector n = L/2 − r.
pub fn sector_negativity(method: Method, length: usize, delta: f64, n: usize, opts: &RunOptions) -> Result<f64> {
    if n > length / 2 {
        return Err(Error::Domain(format!("sector n = {n} on L = {length}")));
    }
    let g_z = 2.0 * n as f64 / length as f64;
    match method {
        Method::Ed => {
            opts.check_ed(length)?;
            let v = cached(opts.cache(), &params_key(&format!("ed-sector-{n}"), length, delta, 0.0), 1, || {
                let state = sector_minimum(&ModelSpec::periodic(length, delta)?, n, &opts.ed)?;
                Ok(vec![negativity_from_rdm(&two_site_rdm(&state, 0, 1))?])
            })?;
            Ok(v[0])
        }
        Method::FreeFermion => {
            need_free_fermions(length, delta)?;
            Ok(negativity_sector_from_energy(&xx_sector_record(length, n, 0.0)?, g_z))
        }
        Method::Bethe => {
            need_bethe(length, 0.0)?;
            let pattern = if n == 0 { RootPattern::Ground } else { RootPattern::Sector(n) };
            let v = cached(opts.cache(), &params_key(&format!("bethe-sector-{n}"), length, delta, 0.0), RECORD_LEN, || {
                let spec = ModelSpec::periodic(length, delta)?;
                Ok(record_values(&solve_pattern(&spec, pattern, &opts.bethe)?.record()?))
            })?;
            Ok(negativity_sector_from_energy(&record_from(length, delta, 0.0, &v)?, g_z))
        }
        Method::Cft => {
            negativity_cft_sector(delta, n, length, &thermo_limit_sector(delta, n)?, Magnetization::Pauli)
        }
    }
}

/// Negativity of the zero-magnetization state with x = 2 (Bethe solver).
pub fn marginal_negativity(length: usize, delta: f64, opts: &RunOptions) -> Result<f64> {
    need_bethe(length, 0.0)?;
    let v = cached(opts.cache(), &params_key("bethe-marginal", length, delta, 0.0), RECORD_LEN, || {
        let spec = ModelSpec::periodic(length, delta)?;
        Ok(record_values(&solve_pattern(&spec, RootPattern::Marginal, &opts.bethe)?.record()?))
    })?;
    Ok(negativity_sector_from_energy(&record_from(length, delta, 0.0, &v)?, 0.0))
}

/// The cheapest requested method able to produce an exact value, or `None`
/// when only conformal output was requested.
pub fn exact_method(length: usize, delta: f64, phi: f64, opts: &RunOptions) -> Result<Option<Method>> {
    let wanted: Vec<Method> = [Method::Ed, Method::FreeFermion, Method::Bethe]
        .into_iter()
        .filter(|m| opts.has(*m))
        .collect();
    if wanted.is_empty() {
        return Ok(None);
    }
    let feasible = |m: &Method| match m {
        Method::Ed => opts.check_ed(length).is_ok(),
        Method::FreeFermion => need_free_fermions(length, delta).is_ok(),
        Method::Bethe => need_bethe(length, phi).is_ok(),
        Method::Cft => false,
    };
    match wanted.iter().find(|m| feasible(m)) {
        Some(m) => Ok(Some(*m)),
        None => {
            let names: Vec<&str> = wanted.iter().map(|m| m.name()).collect();
            let reason = match wanted[0] {
                Method::Ed => opts.check_ed(length),
                Method::FreeFermion => need_free_fermions(length, delta),
                _ => need_bethe(length, phi),
            };
            let hint = match reason {
                Err(Error::Infeasible(m)) => m,
                _ => String::new(),
            };
            Err(Error::Infeasible(format!(
                "no exact method among [{}] handles L = {length}, Δ = {delta}, Φ = {phi}: {hint}",
                names.join(", ")
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self, precision: usize) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // adding 0.0 turns −0 into +0
            Cell::Num(v) => format!("{:.*}", precision, v + 0.0),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn opt_num(v: Option<f64>) -> Cell {
    v.map_or_else(|| Cell::Text(UNAVAILABLE.into()), Cell::Num)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Comma-separated, header row first, LF line endings.
    pub fn render(&self, precision: usize) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render(precision)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Rows (L, N_exact, N_cft, diff, L²·diff) of tables 1–4, or
/// (L, Δ, N_marginal, N_ground) of table 5.
pub fn run_table(id: usize, lengths: &[usize], opts: &RunOptions) -> Result<Csv> {
    if id == 5 {
        return run_marginal_table(lengths, opts);
    }
    let t = reference::table(id).ok_or_else(|| Error::Domain(format!("no table {id}")))?;
    let mut csv = Csv::new(&["L", "N_exact", "N_cft", "diff", "L2_diff"]);
    let rows: Vec<Vec<Cell>> = lengths
        .par_iter()
        .map(|&l| {
            let exact = match exact_method(l, t.delta, t.phi, opts)? {
                Some(m) => Some(ground_negativity(m, l, t.delta, t.phi, opts)?),
                None => None,
            };
            let cft = if opts.has(Method::Cft) {
                Some(ground_negativity(Method::Cft, l, t.delta, t.phi, opts)?)
            } else {
                None
            };
            let diff = exact.zip(cft).map(|(e, c)| e - c);
            Ok(vec![
                Cell::Int(l),
                opt_num(exact),
                opt_num(cft),
                opt_num(diff),
                opt_num(diff.map(|d| d * (l * l) as f64)),
            ])
        })
        .collect::<Result<_>>()?;
    csv.rows = rows;
    Ok(csv)
}

fn run_marginal_table(lengths: &[usize], opts: &RunOptions) -> Result<Csv> {
    let mut csv = Csv::new(&["L", "delta", "N_marginal", "N_ground"]);
    let points: Vec<(usize, f64)> = lengths
        .iter()
        .flat_map(|&l| TABLE_5.deltas().into_iter().map(move |d| (l, d)))
        .collect();
    csv.rows = points
        .par_iter()
        .map(|&(l, d)| {
            let marginal = if opts.has(Method::Bethe) {
                match marginal_negativity(l, d, opts) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        log::warn!("marginal state unavailable at L = {l}, Δ = {d}: {e}");
                        None
                    }
                }
            } else {
                None
            };
            let ground = match exact_method(l, d, 0.0, opts) {
                Ok(Some(m)) => Some(ground_negativity(m, l, d, 0.0, opts)?),
                Ok(None) | Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(vec![Cell::Int(l), Cell::Num(d), opt_num(marginal), opt_num(ground)])
        })
        .collect::<Result<_>>()?;
    Ok(csv)
}

/// Ring size for figure data; `Infinite` uses the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Size {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Size {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Size::Finite(l) => write!(f, "{l}"),
            Size::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "∞" => Ok(Size::Infinite),
            t => t.parse().map(Size::Finite).map_err(|_| format!("not a ring size: {t}")),
        }
    }
}

fn duality_values(size: Size, delta: f64, opts: &RunOptions) -> Result<(f64, f64)> {
    match size {
        Size::Infinite => {
            let t = thermo_limit(delta)?;
            Ok((t.denergy_ddelta_inf, t.energy_density_inf))
        }
        Size::Finite(l) => {
            let method = if opts.has(Method::Ed) && l <= opts.ed_cap {
                Method::Ed
            } else if opts.has(Method::Bethe) {
                Method::Bethe
            } else {
                opts.check_ed(l)?;
                return Err(Error::Infeasible(format!("no method for L = {l}; request ed or bethe")));
            };
            let r = ground_record(method, l, delta, 0.0, opts)?;
            Ok((r.d_delta, r.energy_density))
        }
    }
}

/// Figure 1: (L, Δ, ∂ε/∂Δ, ε). Figure 2: (L, n, Δ, N_exact, N_cft) for the
/// sector minima.
pub fn run_fig(id: usize, sizes: &[Size], deltas: &[f64], sectors: &[usize], opts: &RunOptions) -> Result<Csv> {
    match id {
        1 => {
            let mut csv = Csv::new(&["L", "delta", "deps_ddelta", "eps"]);
            let points: Vec<(Size, f64)> = sizes.iter().flat_map(|&s| deltas.iter().map(move |&d| (s, d))).collect();
            csv.rows = points
                .par_iter()
                .map(|&(s, d)| {
                    let (de, e) = duality_values(s, d, opts)?;
                    Ok(vec![Cell::Text(s.to_string()), Cell::Num(d), Cell::Num(de), Cell::Num(e)])
                })
                .collect::<Result<_>>()?;
            Ok(csv)
        }
        2 => {
            let mut csv = Csv::new(&["L", "n", "delta", "N_exact", "N_cft"]);
            let mut points = Vec::new();
            for s in sizes {
                let Size::Finite(l) = *s else {
                    return Err(Error::Domain("figure 2 needs finite ring sizes".into()));
                };
                for &n in sectors {
                    for &d in deltas {
                        points.push((l, n, d));
                    }
                }
            }
            csv.rows = points
                .par_iter()
                .map(|&(l, n, d)| {
                    let exact = match exact_method(l, d, 0.0, opts)? {
                        Some(m) => Some(sector_negativity(m, l, d, n, opts)?),
                        None => None,
                    };
                    let cft = if opts.has(Method::Cft) {
                        Some(sector_negativity(Method::Cft, l, d, n, opts)?)
                    } else {
                        None
                    };
                    Ok(vec![Cell::Int(l), Cell::Int(n), Cell::Num(d), opt_num(exact), opt_num(cft)])
                })
                .collect::<Result<_>>()?;
            Ok(csv)
        }
        _ => Err(Error::Domain(format!("no figure {id}"))),
    }
}

/// Ground-state negativity on an (L, Δ) grid at fixed Φ, one column per
/// requested method.
pub fn run_sweep(lengths: &[usize], deltas: &[f64], phi: f64, opts: &RunOptions) -> Result<Csv> {
    let methods: Vec<Method> = Method::ALL.into_iter().filter(|m| opts.has(*m)).collect();
    let mut header = vec!["L".to_string(), "delta".into(), "phi".into()];
    header.extend(methods.iter().map(|m| format!("N_{}", m.name())));
    let points: Vec<(usize, f64)> = lengths.iter().flat_map(|&l| deltas.iter().map(move |&d| (l, d))).collect();
    let rows = points
        .par_iter()
        .map(|&(l, d)| {
            let mut row = vec![Cell::Int(l), Cell::Num(d), Cell::Num(phi)];
            for &m in &methods {
                row.push(Cell::Num(ground_negativity(m, l, d, phi, opts)?));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Csv { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_printed_plain() {
        assert_eq!(Cell::Num(-0.0).render(3), "0.000");
        assert_eq!(Cell::Num(-1e-20).render(3), "-0.000");
    }

    #[test]
    fn empty_length_list_gives_header_only() {
        let csv = run_table(1, &[], &RunOptions::default()).unwrap();
        assert_eq!(csv.render(12), "L,N_exact,N_cft,diff,L2_diff\n");
    }

    #[test]
    fn ed_only_refuses_large_rings() {
        let opts = RunOptions {
            methods: vec![Method::Ed],
            ..Default::default()
        };
        assert!(matches!(run_table(1, &[1024], &opts), Err(Error::Infeasible(_))));
    }

    #[test]
    fn twisted_table_from_exact_diagonalization() {
        let opts = RunOptions {
            methods: vec![Method::Ed],
            ..Default::default()
        };
        let text = run_table(4, &[4, 8], &opts).unwrap().render(12);
        assert_eq!(
            text,
            "L,N_exact,N_cft,diff,L2_diff\n4,0.400000000000,UNAVAILABLE,UNAVAILABLE,UNAVAILABLE\n8,0.381121448251,UNAVAILABLE,UNAVAILABLE,UNAVAILABLE\n"
        );
    }

    #[test]
    fn size_parsing() {
        assert_eq!("inf".parse::<Size>(), Ok(Size::Infinite));
        assert_eq!(" 12".parse::<Size>(), Ok(Size::Finite(12)));
        assert!("x".parse::<Size>().is_err());
    }
}
