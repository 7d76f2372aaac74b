//! The search and configuration engine: enumerates multiplexing
//! variants, computes spare bits, validates capacity exactly, and houses
//! the resolution, echo-budget, and redundancy calculators.
//!
//! Capacity decisions are always exact big-integer comparisons; the
//! capacity-to-modulus ratio is double precision for display only.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::engine::{min_bits_for, WideUint};
use crate::error::{Error, Result};
use crate::model::decompose;

/// Unsigned ALU complexity class: the power-of-two bit width that fits
/// the round's root arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AluClass {
    U8,
    U16,
    U32,
    U64,
    U128,
    U256,
    U512,
    U1024,
    Beyond,
}

impl AluClass {
    pub fn width(&self) -> Option<u32> {
        match self {
            AluClass::U8 => Some(8),
            AluClass::U16 => Some(16),
            AluClass::U32 => Some(32),
            AluClass::U64 => Some(64),
            AluClass::U128 => Some(128),
            AluClass::U256 => Some(256),
            AluClass::U512 => Some(512),
            AluClass::U1024 => Some(1024),
            AluClass::Beyond => None,
        }
    }
}

impl fmt::Display for AluClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.width() {
            Some(w) => write!(f, "U{w}"),
            None => write!(f, ">U1024"),
        }
    }
}

impl Serialize for AluClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Smallest power-of-two width holding `root_bits` (never below U8).
pub fn alu_class(root_bits: u32) -> AluClass {
    match root_bits.max(8).next_power_of_two() {
        8 => AluClass::U8,
        16 => AluClass::U16,
        32 => AluClass::U32,
        64 => AluClass::U64,
        128 => AluClass::U128,
        256 => AluClass::U256,
        512 => AluClass::U512,
        1024 => AluClass::U1024,
        _ => AluClass::Beyond,
    }
}

/// Largest modulus `N` with `N^units <= 2^payload_bits`, by exact test.
pub fn upper_modulus(payload_bits: u64, units: u64) -> u64 {
    assert!(units >= 1, "unit count must be positive");
    let exponent = payload_bits / units + 1;
    if exponent >= 63 {
        return u64::MAX;
    }
    let fits = |n: u64| {
        if n <= 1 {
            return true;
        }
        let power = BigUint::from(n).pow(units as u32);
        (power - 1u32).bits() <= payload_bits
    };
    let mut low = 1u64; // known to fit
    let mut high = 1u64 << exponent; // known not to fit
    debug_assert!(!fits(high));
    while high - low > 1 {
        let mid = low + (high - low) / 2;
        if fits(mid) {
            low = mid;
        } else {
            high = mid;
        }
    }
    low
}

/// All positive divisors, ascending.
pub fn divisors(n: u32) -> Vec<u32> {
    assert!(n >= 1);
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1u32;
    while d as u64 * d as u64 <= n as u64 {
        if n.is_multiple_of(d) {
            low.push(d);
            if d != n / d {
                high.push(n / d);
            }
        }
        d += 1;
    }
    high.reverse();
    low.extend(high);
    low
}

/// One search grid cell: a (units-per-round, modulus) pair with its
/// per-round budget verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRow {
    #[serde(rename = "ne")]
    pub units_per_round: u32,
    #[serde(rename = "N")]
    pub modulus: u32,
    #[serde(rename = "Nr")]
    pub root_modulus: u32,
    #[serde(rename = "Nb")]
    pub bypass_modulus: u32,
    #[serde(rename = "k")]
    pub rounds: u32,
    #[serde(rename = "v")]
    pub payload_bits: u32,
    /// Capacity-to-modulus ratio, display only; feasibility never
    /// consults it.
    #[serde(rename = "cr_mr")]
    pub ratio: f64,
    pub feasible: bool,
    #[serde(flatten)]
    pub solution: Option<RowSolution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowSolution {
    #[serde(rename = "t")]
    pub bits_per_round: u32,
    #[serde(rename = "b")]
    pub bypass_bits: u32,
    #[serde(rename = "r")]
    pub root_bits: u32,
    #[serde(rename = "s")]
    pub spare_bits: u32,
    pub alu: AluClass,
}

impl SearchRow {
    pub fn status(&self) -> &'static str {
        match &self.solution {
            None => "unreachable",
            Some(sol) if sol.spare_bits == 0 => "no spare",
            Some(_) => "spare>0",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Emit one row per total in `[t_min, floor(v/k)]` instead of only
    /// the minimal-total row.
    pub enumerate_budget: bool,
}

fn capacity_ratio(units: u32, modulus: u32, bypass_bits: u32, root_bits: u32) -> f64 {
    // C_r = r ln2, M_r = n_e lnN - b ln2
    let transported = root_bits as f64 * std::f64::consts::LN_2;
    let required =
        units as f64 * (modulus as f64).ln() - bypass_bits as f64 * std::f64::consts::LN_2;
    if required <= 0.0 {
        return f64::INFINITY;
    }
    transported / required
}

/// Enumerate the whole (divisor, modulus) grid for a payload. Infeasible
/// cells stay in the output with their sub-unity ratio.
pub fn search(payload_bits: u32, units_per_frame: u32, options: &SearchOptions) -> Vec<SearchRow> {
    assert!(units_per_frame >= 1);
    assert!(
        payload_bits >= 8 * units_per_frame,
        "payload must cover the duty"
    );
    let top = upper_modulus(payload_bits as u64, units_per_frame as u64).min(u32::MAX as u64) as u32;
    let mut rows = Vec::new();
    for units in divisors(units_per_frame) {
        let rounds = units_per_frame / units;
        let budget = payload_bits / rounds;
        for modulus in 257..=top {
            let (root_modulus, bypass_modulus) = decompose(modulus);
            let bypass_bits = units * bypass_modulus.trailing_zeros();
            let root_min = min_bits_for(root_modulus, units);
            let total_min = bypass_bits + root_min;
            let feasible = total_min <= budget;
            let emit = |total: u32| {
                let root_bits = total - bypass_bits;
                SearchRow {
                    units_per_round: units,
                    modulus,
                    root_modulus,
                    bypass_modulus,
                    rounds,
                    payload_bits,
                    ratio: capacity_ratio(units, modulus, bypass_bits, root_bits),
                    feasible: true,
                    solution: Some(RowSolution {
                        bits_per_round: total,
                        bypass_bits,
                        root_bits,
                        spare_bits: payload_bits - rounds * total,
                        alu: alu_class(root_bits),
                    }),
                }
            };
            if !feasible {
                // ratio at the budget point shows how far the cell misses
                rows.push(SearchRow {
                    units_per_round: units,
                    modulus,
                    root_modulus,
                    bypass_modulus,
                    rounds,
                    payload_bits,
                    ratio: capacity_ratio(
                        units,
                        modulus,
                        bypass_bits,
                        budget.saturating_sub(bypass_bits),
                    ),
                    feasible: false,
                    solution: None,
                });
            } else if options.enumerate_budget {
                for total in total_min..=budget {
                    rows.push(emit(total));
                }
            } else {
                rows.push(emit(total_min));
            }
        }
    }
    rows
}

/// Best-choice focus for sorting search output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestFocus {
    /// Maximize spare bits first.
    Spare,
    /// Maximize the modulus first.
    Modulus,
    /// Maximize bypass, minimize root width and ALU class.
    Width,
}

/// Order rows by the chosen focus; infeasible rows sink to the bottom.
pub fn sort_rows(rows: &mut [SearchRow], focus: BestFocus) {
    rows.sort_by(|a, b| {
        match (&a.solution, &b.solution) {
            (None, None) => return a.units_per_round.cmp(&b.units_per_round),
            (None, Some(_)) => return std::cmp::Ordering::Greater,
            (Some(_), None) => return std::cmp::Ordering::Less,
            _ => {}
        }
        let x = a.solution.as_ref().unwrap();
        let y = b.solution.as_ref().unwrap();
        let spare = y.spare_bits.cmp(&x.spare_bits);
        let modulus = b.modulus.cmp(&a.modulus);
        let bypass = y.bypass_bits.cmp(&x.bypass_bits);
        let root = x.root_bits.cmp(&y.root_bits);
        let alu = x.alu.cmp(&y.alu);
        match focus {
            BestFocus::Spare => spare.then(modulus).then(bypass).then(root).then(alu),
            BestFocus::Modulus => modulus.then(spare).then(bypass).then(root).then(alu),
            BestFocus::Width => bypass.then(root).then(alu).then(spare).then(modulus),
        }
    });
}

/// Render rows with the search-table column set.
pub fn rows_to_csv(rows: &[SearchRow]) -> String {
    let mut out = String::from("ne,N,b_per_ne,r_per_ne,cr_mr,feasible,t,alu,k,budget,status\n");
    for row in rows {
        let decomposition = format!(
            "{}={}x{}",
            row.modulus, row.root_modulus, row.bypass_modulus
        );
        match &row.solution {
            Some(sol) => {
                out.push_str(&format!(
                    "{},{},{},{:.2},{:.5},yes,{}={}+{},{},{},{}+{}={},{}\n",
                    row.units_per_round,
                    decomposition,
                    sol.bypass_bits / row.units_per_round,
                    sol.root_bits as f64 / row.units_per_round as f64,
                    row.ratio,
                    sol.bits_per_round,
                    sol.bypass_bits,
                    sol.root_bits,
                    sol.alu,
                    row.rounds,
                    row.rounds * sol.bits_per_round,
                    sol.spare_bits,
                    row.payload_bits,
                    row.status(),
                ));
            }
            None => {
                out.push_str(&format!(
                    "{},{},,,{:.5},no,,,,,{}\n",
                    row.units_per_round,
                    decomposition,
                    row.ratio,
                    row.status(),
                ));
            }
        }
    }
    out
}

/// Largest round scope under the budget rule `t = 8*units + extra`:
/// `gather * h` for the largest `h` with `N^h <= 2^(8h + extra)`.
/// Unbounded (and rejected) at or below the 256-item data modulus.
pub fn max_units_per_round(modulus: u32, extra_bits: u32, gather: u32) -> Result<u32> {
    if modulus <= 256 {
        return Err(Error::ModulusTooSmall { modulus });
    }
    if extra_bits == 0 {
        return Err(Error::ExtraBitsRequired);
    }
    assert!(gather >= 1);
    let base = BigUint::from(modulus);
    let mut power = base.clone();
    let mut h = 0u32;
    loop {
        // N^(h+1) <= 2^(8(h+1) + extra)?
        let bound = 8 * (h + 1) as u64 + extra_bits as u64;
        if (&power - 1u32).bits() <= bound {
            h += 1;
            power *= &base;
        } else {
            return Ok(gather * h);
        }
    }
}

/// A full multiplexing configuration: complete rounds, the optional
/// partial round, and the spare bits left over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuxConfig {
    #[serde(rename = "v")]
    pub payload_bits: u32,
    /// Target scope: units fed to the rounds per frame.
    #[serde(rename = "np")]
    pub stream_units: u32,
    #[serde(rename = "g")]
    pub gather: u32,
    #[serde(rename = "xi")]
    pub extra_bits: u32,
    #[serde(rename = "N")]
    pub modulus: u32,
    #[serde(rename = "Nr")]
    pub root_modulus: u32,
    #[serde(rename = "Nb")]
    pub bypass_modulus: u32,
    #[serde(rename = "ne")]
    pub units_per_round: u32,
    #[serde(rename = "k")]
    pub complete_rounds: u32,
    #[serde(rename = "star_ne")]
    pub partial_units: u32,
    #[serde(rename = "star_k")]
    pub partial_rounds: u32,
    #[serde(rename = "t")]
    pub bits_per_round: u32,
    #[serde(rename = "b")]
    pub bypass_bits: u32,
    #[serde(rename = "r")]
    pub root_bits: u32,
    #[serde(rename = "star_t")]
    pub partial_bits: u32,
    #[serde(rename = "star_b")]
    pub partial_bypass: u32,
    #[serde(rename = "star_r")]
    pub partial_root: u32,
    #[serde(rename = "s")]
    pub spare_bits: u32,
    #[serde(skip_deserializing, default = "default_alu")]
    pub alu: AluClass,
}

fn default_alu() -> AluClass {
    AluClass::Beyond
}

impl MuxConfig {
    /// The budget identity every valid configuration satisfies.
    pub fn budget_holds(&self) -> bool {
        self.complete_rounds as u64 * self.bits_per_round as u64
            + self.partial_rounds as u64 * self.partial_bits as u64
            + self.spare_bits as u64
            == self.payload_bits as u64
    }
}

fn per_round_shape(units: u32, gather: u32, extra_bits: u32, bypass_width: u32) -> (u32, u32) {
    // b = (n_e/g) * (log2(Nb) + 8*(g-1)); t = 8*n_e + extra
    let spans = units / gather;
    let bypass = spans * (bypass_width + 8 * (gather - 1));
    let total = 8 * units + extra_bits;
    (total, bypass)
}

fn check_capacity(scope: &'static str, root_modulus: u32, spans: u32, root_bits: u32) -> Result<()> {
    if spans == 0 || root_modulus <= 1 {
        return Ok(());
    }
    let power = BigUint::from(root_modulus).pow(spans);
    if (power - 1u32).bits() > root_bits as u64 {
        return Err(Error::CapacityExceeded {
            scope,
            root_modulus,
            count: spans,
            root_bits,
        });
    }
    Ok(())
}

/// Build the configuration for a target scope: `k` complete rounds of
/// `units_per_round`, at most one partial round for the remainder, and
/// whatever spare is left. Fails distinctly on capacity violations,
/// negative spare, and gather misalignment.
pub fn configure(
    payload_bits: u32,
    modulus: u32,
    gather: u32,
    extra_bits: u32,
    units_per_round: u32,
    stream_units: u32,
) -> Result<MuxConfig> {
    if modulus <= 256 {
        return Err(Error::ModulusTooSmall { modulus });
    }
    if extra_bits == 0 {
        return Err(Error::ExtraBitsRequired);
    }
    assert!(gather >= 1 && units_per_round >= 1);
    if !units_per_round.is_multiple_of(gather) {
        return Err(Error::GatherMisaligned {
            scope: "complete",
            units: units_per_round,
            gather,
        });
    }
    if stream_units < units_per_round {
        return Err(Error::TargetTooSmall {
            target: stream_units,
            units: units_per_round,
        });
    }

    let (root_modulus, bypass_modulus) = decompose(modulus);
    let bypass_width = bypass_modulus.trailing_zeros();
    let complete_rounds = stream_units / units_per_round;
    let partial_units = stream_units - complete_rounds * units_per_round;
    let partial_rounds = u32::from(partial_units > 0);
    if !partial_units.is_multiple_of(gather) {
        return Err(Error::GatherMisaligned {
            scope: "partial",
            units: partial_units,
            gather,
        });
    }

    let (bits_per_round, bypass_bits) =
        per_round_shape(units_per_round, gather, extra_bits, bypass_width);
    let root_bits = bits_per_round
        .checked_sub(bypass_bits)
        .ok_or(Error::CapacityExceeded {
            scope: "complete",
            root_modulus,
            count: units_per_round / gather,
            root_bits: 0,
        })?;
    check_capacity(
        "complete",
        root_modulus,
        units_per_round / gather,
        root_bits,
    )?;

    let (partial_bits, partial_bypass, partial_root) = if partial_rounds == 1 {
        let (total, bypass) = per_round_shape(partial_units, gather, extra_bits, bypass_width);
        let root = total.checked_sub(bypass).ok_or(Error::CapacityExceeded {
            scope: "partial",
            root_modulus,
            count: partial_units / gather,
            root_bits: 0,
        })?;
        check_capacity("partial", root_modulus, partial_units / gather, root)?;
        (total, bypass, root)
    } else {
        (0, 0, 0)
    };

    let needed =
        complete_rounds as u64 * bits_per_round as u64 + partial_rounds as u64 * partial_bits as u64;
    if needed > payload_bits as u64 {
        return Err(Error::NegativeSpare {
            needed,
            available: payload_bits as u64,
        });
    }

    Ok(MuxConfig {
        payload_bits,
        stream_units,
        gather,
        extra_bits,
        modulus,
        root_modulus,
        bypass_modulus,
        units_per_round,
        complete_rounds,
        partial_units,
        partial_rounds,
        bits_per_round,
        bypass_bits,
        root_bits,
        partial_bits,
        partial_bypass,
        partial_root,
        spare_bits: (payload_bits as u64 - needed) as u32,
        alu: alu_class(root_bits.max(partial_root)),
    })
}

/// Event fixation scale for `positions` codes spread over one frame time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    pub period_ps: f64,
    pub frequency_ghz: f64,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.2} ps / {:.2} GHz",
            self.period_ps, self.frequency_ghz
        )
    }
}

pub fn resolution(positions: u64, frame_time_ns: f64) -> Resolution {
    assert!(positions >= 1 && frame_time_ns > 0.0);
    Resolution {
        period_ps: frame_time_ns * 1000.0 / positions as f64,
        frequency_ghz: positions as f64 / frame_time_ns,
    }
}

/// The echo pools of one round shape: every distinguishable sample,
/// the native ones, and the free rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchoBudget {
    pub root_modulus: u32,
    pub count: u32,
    pub root_bits: u32,
    pub bypass_bits: u32,
    pub total: WideUint,
    pub native: WideUint,
    pub rest: WideUint,
}

impl EchoBudget {
    /// The rest pool factored as `q * 2^bypass_bits`.
    pub fn rest_factor(&self) -> WideUint {
        &self.rest >> self.bypass_bits
    }

    /// The native pool factored as `q * 2^bypass_bits`.
    pub fn native_factor(&self) -> WideUint {
        &self.native >> self.bypass_bits
    }
}

impl fmt::Display for EchoBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "total 2^{} | native {} x 2^{} | rest {} x 2^{}",
            self.root_bits as u64 + self.bypass_bits as u64,
            self.native_factor(),
            self.bypass_bits,
            self.rest_factor(),
            self.bypass_bits
        )
    }
}

pub fn echo_budget(
    root_modulus: u32,
    count: u32,
    root_bits: u32,
    bypass_bits: u32,
) -> Result<EchoBudget> {
    debug_assert!(root_modulus % 2 == 1);
    let native_roots = BigUint::from(root_modulus).pow(count);
    if root_modulus > 1 && (native_roots.clone() - 1u32).bits() > root_bits as u64 {
        return Err(Error::CapacityExceeded {
            scope: "complete",
            root_modulus,
            count,
            root_bits,
        });
    }
    let total = BigUint::one() << (root_bits as u64 + bypass_bits as u64);
    let native = native_roots << bypass_bits;
    let rest = &total - &native;
    Ok(EchoBudget {
        root_modulus,
        count,
        root_bits,
        bypass_bits,
        total,
        native,
        rest,
    })
}

/// Payload redundancy above the pure duty, as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Redundancy {
    pub spare: u32,
    pub payload: u32,
}

impl Redundancy {
    pub fn percent(&self) -> f64 {
        self.spare as f64 * 100.0 / self.payload as f64
    }
}

impl fmt::Display for Redundancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.percent())
    }
}

pub fn redundancy(payload_bits: u32, units_per_frame: u32) -> Redundancy {
    assert!(
        payload_bits >= 8 * units_per_frame,
        "payload below the duty has no redundancy"
    );
    Redundancy {
        spare: payload_bits - 8 * units_per_frame,
        payload: payload_bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_modulus_golden() {
        assert_eq!(upper_modulus(3645, 450), 274);
        assert_eq!(upper_modulus(3250, 400), 279);
        assert_eq!(upper_modulus(2080, 256), 279);
    }

    #[test]
    fn divisors_ascending() {
        let d450 = divisors(450);
        for want in [10, 15, 18, 25, 30, 45, 75, 90, 150, 225, 450] {
            assert!(d450.contains(&want));
        }
        assert!(d450.windows(2).all(|w| w[0] < w[1]));
        let d400 = divisors(400);
        for want in [8, 10, 16, 20, 25, 40, 50, 80, 100, 200, 400] {
            assert!(d400.contains(&want));
        }
        assert_eq!(divisors(1), vec![1]);
    }

    #[test]
    fn alu_class_rows() {
        assert_eq!(alu_class(91).to_string(), "U128");
        assert_eq!(alu_class(7).to_string(), "U8");
        assert_eq!(alu_class(1201).to_string(), ">U1024");
        assert_eq!(alu_class(721).to_string(), "U1024");
        assert_eq!(alu_class(41).to_string(), "U64");
        assert_eq!(alu_class(1024).to_string(), "U1024");
        assert_eq!(alu_class(1025).to_string(), ">U1024");
    }

    fn find_row(rows: &[SearchRow], units: u32, modulus: u32) -> &SearchRow {
        rows.iter()
            .find(|r| r.units_per_round == units && r.modulus == modulus)
            .unwrap_or_else(|| panic!("missing row ({units}, {modulus})"))
    }

    #[test]
    fn search_golden_cells() {
        let rows = search(3645, 450, &SearchOptions::default());
        let row = find_row(&rows, 18, 264);
        let sol = row.solution.unwrap();
        assert_eq!(
            (
                sol.bits_per_round,
                sol.bypass_bits,
                sol.root_bits,
                row.rounds,
                sol.spare_bits
            ),
            (145, 54, 91, 25, 20)
        );
        assert_eq!(sol.alu, AluClass::U128);

        let infeasible = find_row(&rows, 15, 274);
        assert!(!infeasible.feasible);
        assert!((infeasible.ratio - 0.99558).abs() < 5e-4);

        let rows = search(3250, 400, &SearchOptions::default());
        let sol = find_row(&rows, 10, 272).solution.unwrap();
        assert_eq!(
            (sol.bits_per_round, sol.bypass_bits, sol.root_bits, sol.spare_bits),
            (81, 40, 41, 10)
        );
        assert_eq!(sol.alu, AluClass::U64);

        let rows = search(2080, 256, &SearchOptions::default());
        let sol = find_row(&rows, 16, 264).solution.unwrap();
        assert_eq!(
            (sol.bits_per_round, sol.bypass_bits, sol.root_bits, sol.spare_bits),
            (129, 48, 81, 16)
        );
    }

    #[test]
    fn search_budget_enumeration() {
        let rows = search(
            3645,
            450,
            &SearchOptions {
                enumerate_budget: true,
            },
        );
        // (45, 264): budget 364, minimum 362 -> totals 362, 363, 364
        let totals: Vec<u32> = rows
            .iter()
            .filter(|r| r.units_per_round == 45 && r.modulus == 264)
            .map(|r| r.solution.unwrap().bits_per_round)
            .collect();
        assert_eq!(totals, vec![362, 363, 364]);
        let spares: Vec<u32> = rows
            .iter()
            .filter(|r| r.units_per_round == 45 && r.modulus == 264)
            .map(|r| r.solution.unwrap().spare_bits)
            .collect();
        assert_eq!(spares, vec![25, 15, 5]);
    }

    #[test]
    fn search_ratio_crosses_unity_with_feasibility() {
        for (v, np) in [(3645u32, 450u32), (3250, 400), (2080, 256)] {
            for row in search(v, np, &SearchOptions::default()) {
                if row.feasible {
                    assert!(row.ratio >= 1.0, "feasible row below unity: {row:?}");
                    let sol = row.solution.unwrap();
                    assert_eq!(
                        row.rounds as u64 * sol.bits_per_round as u64 + sol.spare_bits as u64,
                        v as u64
                    );
                } else {
                    assert!(row.ratio < 1.0, "infeasible row at/above unity: {row:?}");
                }
            }
        }
    }

    #[test]
    fn best_spare_sort_top_row() {
        let mut rows = search(3645, 450, &SearchOptions::default());
        sort_rows(&mut rows, BestFocus::Spare);
        let top = &rows[0];
        assert_eq!((top.units_per_round, top.modulus), (150, 257));
        assert_eq!(top.solution.unwrap().spare_bits, 42);
    }

    #[test]
    fn max_units_golden() {
        assert_eq!(max_units_per_round(272, 1, 1).unwrap(), 11);
        assert_eq!(max_units_per_round(264, 1, 1).unwrap(), 22);
        assert_eq!(max_units_per_round(384, 3, 1).unwrap(), 5);
        assert_eq!(max_units_per_round(258, 1, 1).unwrap(), 89);
        assert_eq!(max_units_per_round(257, 1, 1).unwrap(), 177);
        assert_eq!(
            max_units_per_round(256, 1, 1),
            Err(Error::ModulusTooSmall { modulus: 256 })
        );
        assert_eq!(max_units_per_round(272, 0, 1), Err(Error::ExtraBitsRequired));
    }

    #[test]
    fn max_units_scales_with_gather() {
        for modulus in [258u32, 264, 272, 288] {
            for extra in 1..=3 {
                let base = max_units_per_round(modulus, extra, 1).unwrap();
                for gather in [2u32, 4, 8] {
                    assert_eq!(
                        max_units_per_round(modulus, extra, gather).unwrap(),
                        base * gather
                    );
                }
            }
        }
    }

    #[test]
    fn configure_integral_solution() {
        let config = configure(2080, 272, 1, 1, 11, 257).unwrap();
        assert_eq!(config.complete_rounds, 23);
        assert_eq!(config.partial_units, 4);
        assert_eq!(config.partial_rounds, 1);
        assert_eq!(
            (config.bits_per_round, config.bypass_bits, config.root_bits),
            (89, 44, 45)
        );
        assert_eq!(
            (config.partial_bits, config.partial_bypass, config.partial_root),
            (33, 16, 17)
        );
        assert_eq!(config.spare_bits, 0);
        assert_eq!(config.alu, AluClass::U64);
        assert!(config.budget_holds());
    }

    #[test]
    fn configure_gathered_solutions() {
        let config = configure(3211, 272, 8, 1, 56, 400).unwrap();
        assert_eq!((config.complete_rounds, config.partial_units), (7, 8));
        assert_eq!(
            (config.bits_per_round, config.bypass_bits, config.root_bits),
            (449, 420, 29)
        );
        assert_eq!(
            (config.partial_bits, config.partial_bypass, config.partial_root),
            (65, 60, 5)
        );
        assert_eq!(config.spare_bits, 3);

        let config = configure(3250, 272, 2, 1, 14, 402).unwrap();
        assert_eq!((config.complete_rounds, config.partial_units), (28, 10));
        assert_eq!(
            (config.bits_per_round, config.bypass_bits, config.root_bits),
            (113, 84, 29)
        );
        assert_eq!(
            (config.partial_bits, config.partial_bypass, config.partial_root),
            (81, 60, 21)
        );
        assert_eq!(config.spare_bits, 5);
    }

    #[test]
    fn configure_per_round_shape_only() {
        // duty pass of a 200-unit frame: 40 rounds of 5 at the 288 modulus
        let config = configure(1640, 288, 1, 1, 5, 200).unwrap();
        assert_eq!(
            (config.bits_per_round, config.bypass_bits, config.root_bits),
            (41, 25, 16)
        );
        assert_eq!(config.alu, AluClass::U16);
        assert_eq!(config.spare_bits, 0);
    }

    #[test]
    fn configure_distinct_failures() {
        assert!(matches!(
            configure(2080, 272, 1, 1, 12, 257),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(matches!(
            configure(2080, 272, 2, 1, 11, 257),
            Err(Error::GatherMisaligned {
                scope: "complete",
                ..
            })
        ));
        assert!(matches!(
            configure(2080, 272, 2, 1, 12, 257),
            Err(Error::GatherMisaligned {
                scope: "partial",
                ..
            })
        ));
        assert!(matches!(
            configure(100, 272, 1, 1, 11, 257),
            Err(Error::NegativeSpare { .. })
        ));
    }

    #[test]
    fn configure_tracks_max_units_boundary() {
        for modulus in 257..=288u32 {
            for extra in 1..=3u32 {
                let top = max_units_per_round(modulus, extra, 1).unwrap();
                if top == 0 {
                    continue;
                }
                let budget = 8 * top + extra;
                assert!(configure(budget, modulus, 1, extra, top, top).is_ok());
                let over = top + 1;
                assert!(matches!(
                    configure(8 * over + extra, modulus, 1, extra, over, over),
                    Err(Error::CapacityExceeded { .. })
                ));
            }
        }
    }

    #[test]
    fn resolution_rows() {
        let r = resolution(1 << 20, 3600.0);
        assert!((r.period_ps - 3.433).abs() < 0.01);
        assert!((r.frequency_ghz - 291.27).abs() < 0.05);
        let r = resolution(1 << 15, 3600.0);
        assert!((r.period_ps - 109.86).abs() < 0.01);
        assert!((r.frequency_ghz - 9.10).abs() < 0.01);
        let r = resolution(512, 51.2);
        assert!((r.period_ps - 100.0).abs() < 1e-9);
        assert!((r.frequency_ghz - 10.0).abs() < 1e-12);
        assert_eq!(r.to_string(), "100.00 ps / 10.00 GHz");
    }

    #[test]
    fn echo_budget_rows() {
        let budget = echo_budget(9, 5, 16, 25).unwrap();
        assert_eq!(budget.native_factor(), BigUint::from(59_049u32));
        assert_eq!(budget.rest_factor(), BigUint::from(6_487u32));
        assert_eq!(budget.total, BigUint::one() << 41);

        // trivial all-bypass pool
        let budget = echo_budget(1, 7, 0, 25).unwrap();
        assert_eq!(budget.total, budget.native);
        assert_eq!(budget.rest, BigUint::from(0u32));

        // big-integer evaluation: 2^29 - 17^7 = 536870912 - 410338673
        let budget = echo_budget(17, 7, 29, 420).unwrap();
        assert_eq!(BigUint::from(17u32).pow(7), BigUint::from(410_338_673u32));
        assert_eq!(budget.rest_factor(), BigUint::from(126_532_239u32));

        assert!(matches!(
            echo_budget(17, 8, 29, 0),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn redundancy_rows() {
        assert_eq!(redundancy(1625, 200).to_string(), "1.54%");
        assert_eq!(redundancy(3208, 400).to_string(), "0.25%");
        assert_eq!(redundancy(3211, 400).to_string(), "0.34%");
        assert_eq!(redundancy(2080, 256).to_string(), "1.54%");
    }
}
