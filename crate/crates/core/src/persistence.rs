//! Persistent homology by column reduction of the filtered boundary matrix.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::complex::{Filtration, Simplex};
use crate::error::{Error, Result};
use crate::field::{Coefficients, Column, ColumnReducer, FieldSpec, PrimeField, Rationals};
use crate::metric::FORMAT_VERSION;

/// A bar `[birth, death)` in dimension `k`; `death = None` is an essential class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub k: usize,
    pub birth: f64,
    pub death: Option<f64>,
}

impl Interval {
    pub fn new(k: usize, birth: f64, death: Option<f64>) -> Self {
        Interval { k, birth, death }
    }

    fn death_value(&self) -> f64 {
        self.death.unwrap_or(f64::INFINITY)
    }

    /// Whether the bar covers the closed range `[a, b]`.
    pub fn contains_range(&self, a: f64, b: f64) -> bool {
        self.birth <= a && self.death_value() > b
    }

    pub fn is_empty(&self) -> bool {
        self.death == Some(self.birth)
    }
}

impl Eq for Interval {}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.birth.total_cmp(&other.birth))
            .then_with(|| self.death_value().total_cmp(&other.death_value()))
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    k: usize,
    birth: f64,
    death: Value,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let death = match self.death {
            Some(d) => Value::from(d),
            None => Value::from("inf"),
        };
        IntervalJson { k: self.k, birth: self.birth, death }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = IntervalJson::deserialize(deserializer)?;
        let death = match &raw.death {
            Value::String(s) if s == "inf" => None,
            Value::Number(n) => Some(n.as_f64().ok_or_else(|| D::Error::custom("death out of range"))?),
            other => return Err(D::Error::custom(format!("death must be a number or \"inf\", got {other}"))),
        };
        if death.is_some_and(|d| d < raw.birth) {
            return Err(D::Error::custom("interval dies before it is born"));
        }
        Ok(Interval { k: raw.k, birth: raw.birth, death })
    }
}

/// Multiset of intervals sorted by `(k, birth, death)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Barcode {
    intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.sort();
        Barcode { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn in_dimension(&self, k: usize) -> impl Iterator<Item = &Interval> + '_ {
        self.intervals.iter().filter(move |i| i.k == k)
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// One interval per line, e.g. `H1 [1, 2)` or `H0 [0, inf)`.
    pub fn to_text(&self) -> String {
        self.intervals
            .iter()
            .map(|i| match i.death {
                Some(d) => format!("H{} [{}, {})\n", i.k, i.birth, d),
                None => format!("H{} [{}, inf)\n", i.k, i.birth),
            })
            .collect()
    }
}

#[derive(Serialize)]
struct BarcodeOut<'a> {
    format_version: u32,
    intervals: &'a [Interval],
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BarcodeIn {
    Bare(Vec<Interval>),
    File {
        #[serde(default = "default_version")]
        format_version: u32,
        intervals: Vec<Interval>,
    },
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl Serialize for Barcode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BarcodeOut { format_version: FORMAT_VERSION, intervals: &self.intervals }.serialize(serializer)
    }
}

/// Accepts either a bare interval list or an object with an `intervals` field.
impl<'de> Deserialize<'de> for Barcode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let intervals = match BarcodeIn::deserialize(deserializer)? {
            BarcodeIn::Bare(v) => v,
            BarcodeIn::File { format_version, intervals } => {
                if format_version != FORMAT_VERSION {
                    return Err(D::Error::custom(format!("unsupported format_version {format_version}")));
                }
                intervals
            }
        };
        Ok(Barcode::new(intervals))
    }
}

/// Barcode together with the zero-length pairs removed from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceOutput {
    pub barcode: Barcode,
    pub zero_length: Vec<Interval>,
}

/// Simplices of dimension `<= max_k + 1` in reduction order.
fn reduction_order(filtration: &Filtration, max_k: usize) -> Result<Vec<(&Simplex, f64)>> {
    if !filtration.complex().is_complete_in(max_k + 1) {
        return Err(Error::InvalidParameter(format!(
            "persistence up to degree {max_k} needs the complex built to dimension {}",
            max_k + 1
        )));
    }
    Ok(filtration.ordered().into_iter().filter(|(s, _)| s.dim() <= max_k + 1).collect())
}

/// Pivot row of each reduced column, and the reduced columns themselves.
fn reduce<F: Coefficients>(field: F, order: &[(&Simplex, f64)]) -> (Vec<Option<usize>>, ColumnReducer<F>) {
    let position: HashMap<&Simplex, usize> = order.iter().enumerate().map(|(i, (s, _))| (*s, i)).collect();
    let mut reducer = ColumnReducer::new(field);
    let mut pivots = Vec::with_capacity(order.len());
    for (s, _) in order {
        let mut col: Column<i64> = if s.dim() == 0 {
            Vec::new()
        } else {
            s.facets().enumerate().map(|(i, f)| (position[&f], if i % 2 == 0 { 1 } else { -1 })).collect()
        };
        col.sort_unstable_by_key(|(r, _)| *r);
        let converted = col.into_iter().map(|(r, x)| (r, reducer.field().embed(x))).collect();
        pivots.push(reducer.push(converted));
    }
    (pivots, reducer)
}

fn pair_up(order: &[(&Simplex, f64)], pivots: &[Option<usize>], max_k: usize) -> PersistenceOutput {
    let mut killed = BTreeSet::new();
    let mut bars = Vec::new();
    let mut zero_length = Vec::new();
    for (j, low) in pivots.iter().enumerate() {
        if let Some(i) = *low {
            killed.insert(i);
            let (s, birth) = order[i];
            let bar = Interval::new(s.dim(), birth, Some(order[j].1));
            if bar.is_empty() {
                zero_length.push(bar);
            } else {
                bars.push(bar);
            }
        }
    }
    for (j, low) in pivots.iter().enumerate() {
        let (s, birth) = order[j];
        if low.is_none() && !killed.contains(&j) && s.dim() <= max_k {
            bars.push(Interval::new(s.dim(), birth, None));
        }
    }
    zero_length.sort();
    PersistenceOutput { barcode: Barcode::new(bars), zero_length }
}

/// Barcode in degrees `0..=max_k`, keeping the zero-length pairs for diagnostics.
pub fn persistent_homology_verbose(filtration: &Filtration, field: FieldSpec, max_k: usize) -> Result<PersistenceOutput> {
    let order = reduction_order(filtration, max_k)?;
    let pivots = match field.validate()? {
        FieldSpec::Rationals => reduce(Rationals, &order).0,
        FieldSpec::PrimeField { p } => reduce(PrimeField::new(p)?, &order).0,
    };
    Ok(pair_up(&order, &pivots, max_k))
}

/// Barcode in degrees `0..=max_k` over `field`.
pub fn persistent_homology(filtration: &Filtration, field: FieldSpec, max_k: usize) -> Result<Barcode> {
    persistent_homology_verbose(filtration, field, max_k).map(|out| out.barcode)
}

/// Number of bars in dimension `k` alive on all of `[eps, eps_prime]`: the
/// rank of `H_k(eps) -> H_k(eps_prime)`.
pub fn rank_invariant(barcode: &Barcode, k: usize, eps: f64, eps_prime: f64) -> Result<usize> {
    if eps.is_nan() || eps_prime.is_nan() || eps > eps_prime {
        return Err(Error::InvalidParameter(format!("rank invariant needs eps <= eps', got {eps} > {eps_prime}")));
    }
    Ok(barcode.in_dimension(k).filter(|i| i.contains_range(eps, eps_prime)).count())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionDiff {
    pub k: usize,
    pub only_in_a: Vec<Interval>,
    pub only_in_b: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeDiff {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub equal: bool,
    pub dimensions: Vec<DimensionDiff>,
}

/// Per-dimension multiset difference.
pub fn compare_barcodes(a: &Barcode, b: &Barcode) -> BarcodeDiff {
    let mut by_dim: BTreeMap<usize, DimensionDiff> = BTreeMap::new();
    fn slot(m: &mut BTreeMap<usize, DimensionDiff>, k: usize) -> &mut DimensionDiff {
        m.entry(k).or_insert_with(|| DimensionDiff { k, only_in_a: Vec::new(), only_in_b: Vec::new() })
    }
    let (xs, ys) = (a.intervals(), b.intervals());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let ord = match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                slot(&mut by_dim, xs[i].k).only_in_a.push(xs[i]);
                i += 1;
            }
            Ordering::Greater => {
                slot(&mut by_dim, ys[j].k).only_in_b.push(ys[j]);
                j += 1;
            }
        }
    }
    BarcodeDiff { format_version: FORMAT_VERSION, equal: by_dim.is_empty(), dimensions: by_dim.into_values().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{close_under_faces, SimplicialComplex};
    use crate::datasets::rp2_triangulation;
    use crate::homology::field_homology;

    fn triangle_filtration() -> Filtration {
        let c = close_under_faces(&[vec![0, 1, 2]]).unwrap();
        let births = c.iter().map(|s| (s.clone(), s.dim() as f64)).collect();
        Filtration::new(c, births, vec![0.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn triangle_barcode() {
        let bc = persistent_homology(&triangle_filtration(), FieldSpec::Rationals, 1).unwrap();
        let expected = Barcode::new(vec![
            Interval::new(0, 0.0, None),
            Interval::new(0, 0.0, Some(1.0)),
            Interval::new(0, 0.0, Some(1.0)),
            Interval::new(1, 1.0, Some(2.0)),
        ]);
        assert_eq!(bc, expected);
        assert_eq!(rank_invariant(&bc, 1, 1.0, 1.5).unwrap(), 1);
        assert_eq!(rank_invariant(&bc, 1, 1.0, 2.0).unwrap(), 0);
        assert!(rank_invariant(&bc, 1, 2.0, 1.0).is_err());
    }

    #[test]
    fn triangle_zero_length_pair_is_kept_aside() {
        let out = persistent_homology_verbose(&triangle_filtration(), FieldSpec::PrimeField { p: 2 }, 1).unwrap();
        // every dimension has its own scale, so no pair has zero length
        assert!(out.zero_length.is_empty());
        let c = close_under_faces(&[vec![0, 1]]).unwrap();
        let f = Filtration::new(c.clone(), c.iter().map(|s| (s.clone(), 0.0)).collect(), vec![0.0]).unwrap();
        let out = persistent_homology_verbose(&f, FieldSpec::Rationals, 0).unwrap();
        assert_eq!(out.zero_length, vec![Interval::new(0, 0.0, Some(0.0))]);
        assert_eq!(out.barcode, Barcode::new(vec![Interval::new(0, 0.0, None)]));
    }

    #[test]
    fn single_vertex() {
        let c = SimplicialComplex::from_simplices(1, vec![Simplex::new(vec![0]).unwrap()]).unwrap();
        let f = Filtration::new(c.clone(), c.iter().map(|s| (s.clone(), 0.5)).collect(), vec![0.5]).unwrap();
        let bc = persistent_homology(&f, FieldSpec::Rationals, 0).unwrap();
        assert_eq!(bc.intervals(), &[Interval::new(0, 0.5, None)]);
    }

    #[test]
    fn rp2_field_dependence() {
        let f = Filtration::simplexwise(rp2_triangulation().complex);
        let q = persistent_homology(&f, FieldSpec::Rationals, 2).unwrap();
        let z2 = persistent_homology(&f, FieldSpec::PrimeField { p: 2 }, 2).unwrap();
        let z3 = persistent_homology(&f, FieldSpec::PrimeField { p: 3 }, 2).unwrap();
        assert!(compare_barcodes(&q, &z3).equal);
        let diff = compare_barcodes(&q, &z2);
        assert!(!diff.equal);
        assert_eq!(diff.dimensions.iter().map(|d| d.k).collect::<Vec<_>>(), vec![1, 2]);
        let last = *f.scales().last().unwrap();
        let essential = |bc: &Barcode, k| bc.in_dimension(k).filter(|i| i.death.is_none()).count();
        assert_eq!([0, 1, 2].map(|k| essential(&z2, k)), [1, 1, 1]);
        assert_eq!([0, 1, 2].map(|k| essential(&q, k)), [1, 0, 0]);
        for k in 0..=2 {
            assert_eq!(
                rank_invariant(&z2, k, last, last).unwrap(),
                field_homology(f.complex(), k, FieldSpec::PrimeField { p: 2 }).unwrap()
            );
        }
    }

    #[test]
    fn reduced_columns_are_cycles() {
        let f = Filtration::simplexwise(rp2_triangulation().complex);
        let order = reduction_order(&f, 2).unwrap();
        let check = |columns: &[Vec<usize>]| {
            // Over Z/2 every reduced column R_j = ∂V_j; its boundary must vanish.
            for rows in columns {
                let mut parity: BTreeMap<&Simplex, usize> = BTreeMap::new();
                for &r in rows {
                    for face in order[r].0.facets() {
                        *parity.entry(order.iter().find(|(s, _)| **s == face).unwrap().0).or_default() += 1;
                    }
                }
                assert!(parity.values().all(|c| c % 2 == 0));
            }
        };
        let (_, reducer) = reduce(PrimeField::new(2).unwrap(), &order);
        let cols: Vec<Vec<usize>> =
            reducer.columns().iter().map(|c| c.iter().map(|(r, _)| *r).collect()).collect();
        check(&cols);
    }

    #[test]
    fn json_roundtrip_and_bare_list() {
        let bc = persistent_homology(&triangle_filtration(), FieldSpec::Rationals, 1).unwrap();
        let text = serde_json::to_string(&bc).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<Barcode>(&text).unwrap(), bc);
        let bare = r#"[{"k":1,"birth":1.0,"death":2.0},{"k":0,"birth":0.0,"death":"inf"}]"#;
        let parsed: Barcode = serde_json::from_str(bare).unwrap();
        assert_eq!(parsed.intervals()[0], Interval::new(0, 0.0, None));
        assert!(serde_json::from_str::<Barcode>(r#"[{"k":0,"birth":2.0,"death":1.0}]"#).is_err());
        assert!(serde_json::from_str::<Barcode>(r#"[{"k":0,"birth":0.0,"death":"never"}]"#).is_err());
    }

    #[test]
    fn text_rendering() {
        let bc = Barcode::new(vec![Interval::new(1, 1.0, Some(2.0)), Interval::new(0, 0.0, None)]);
        assert_eq!(bc.to_text(), "H0 [0, inf)\nH1 [1, 2)\n");
    }
}
