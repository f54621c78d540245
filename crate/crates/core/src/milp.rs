//! Export of the mixed-integer packing model as LP text.
//!
//! # Format
//!
//! The emitted text follows the CPLEX LP layout, one item per line, LF endings:
//!
//! ```text
//! \ generated-by surfpack milp 1
//! \ instance <id>
//! \ items <n>
//! \ encoding <disjunctive|literal>
//! Minimize
//!  obj: [ 2 L * W + 2 L * H + 2 W * H ] / 2
//! Subject To
//!  <name>: <terms> <= | = <rhs>
//! Bounds
//!  0 <= x_0 <= 30
//! Binaries
//!  s_0_1
//! End
//! ```
//!
//! In fixed-extents mode the objective line is ` obj: 0 L` and the bounds of
//! `L`, `W`, `H` are pinned with `L = <value>`.
//!
//! Variables: `L W H` (bin extents), `x_i y_i z_i` (item origins),
//! `s_i_j u_i_j b_i_j` (item `i` entirely before item `j` along x, y, z),
//! `d_i_k` (item `i` uses orientation `k`, indexed as in [`Orientation::ALL`])
//! and `lhat_i what_i hhat_i` (oriented item sides).
//!
//! Rows, in emission order:
//!
//! | prefix    | count (disjunctive) | count (literal) | meaning |
//! |-----------|---------------------|-----------------|---------|
//! | `pair_`   | n(n−1)/2            | n(n−1)/2        | one separation per unordered pair |
//! | `orient_` | n                   | n               | one orientation per item |
//! | `sep_`    | 3n(n−1)             | 3n(n−1)/2       | big-M separation |
//! | `fit_`    | 3n                  | 3n              | item inside the bin |
//! | `def_`    | 3n                  | 3n              | oriented sides from `d_i_k` |
//!
//! The disjunctive encoding declares pair binaries for every ordered pair, so
//! any non-overlapping packing has a matching assignment. The literal encoding
//! declares them only for `i < j`, which forces the lower-indexed item of each
//! pair to come first along the chosen axis.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{separation_witness, BinExtents, Instance, Length, Orientation, PackingSolution};

pub const FORMAT_HEADER: &str = "\\ generated-by surfpack milp 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilpError {
    #[error("instance has no items")]
    EmptyInstance,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model has {expected} items, solution covers {found}")]
    InstanceMismatch { expected: usize, found: usize },
    #[error("item {0} has no placement")]
    MissingPlacement(usize),
    #[error("items {0} and {1} overlap")]
    NoSeparation(usize, usize),
    #[error("items {0} and {1} are only separated with {1} first, which the literal encoding cannot express")]
    NotRepresentable(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// Pair binaries for every ordered pair.
    Disjunctive,
    /// Pair binaries only for `i < j`.
    Literal,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Disjunctive => "disjunctive",
            Encoding::Literal => "literal",
        }
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "disjunctive" => Ok(Encoding::Disjunctive),
            "literal" => Ok(Encoding::Literal),
            other => Err(format!("unknown encoding `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Minimize `LW + LH + WH` as a quadratic objective.
    Quadratic,
    /// Pin the extents and emit a feasibility model.
    FixedExtents(BinExtents),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExportOptions {
    /// Big-M constants per axis. Defaults to the working bin, or to the pinned
    /// extents in fixed-extents mode.
    pub big_m: Option<BinExtents>,
    pub objective: ObjectiveMode,
    pub encoding: Encoding,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            big_m: None,
            objective: ObjectiveMode::Quadratic,
            encoding: Encoding::Disjunctive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: Length,
    pub upper: Option<Length>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintGroup {
    PairExclusivity,
    OrientationExclusivity,
    Separation,
    Containment,
    OrientedDims,
}

impl ConstraintGroup {
    pub const ALL: [ConstraintGroup; 5] = [
        ConstraintGroup::PairExclusivity,
        ConstraintGroup::OrientationExclusivity,
        ConstraintGroup::Separation,
        ConstraintGroup::Containment,
        ConstraintGroup::OrientedDims,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            ConstraintGroup::PairExclusivity => "pair_",
            ConstraintGroup::OrientationExclusivity => "orient_",
            ConstraintGroup::Separation => "sep_",
            ConstraintGroup::Containment => "fit_",
            ConstraintGroup::OrientedDims => "def_",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ConstraintGroup::PairExclusivity => "pair-exclusivity",
            ConstraintGroup::OrientationExclusivity => "orientation-exclusivity",
            ConstraintGroup::Separation => "big-m-separation",
            ConstraintGroup::Containment => "containment",
            ConstraintGroup::OrientedDims => "oriented-dims",
        }
    }

    fn of_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| name.starts_with(g.prefix()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(Length, String)>,
    pub sense: Sense,
    pub rhs: Length,
}

impl Constraint {
    pub fn group(&self) -> Option<ConstraintGroup> {
        ConstraintGroup::of_name(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    HalfSurfaceArea,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilpModel {
    pub instance_id: String,
    pub items: usize,
    pub encoding: Encoding,
    pub objective: Objective,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

const AXES: [(&str, &str, &str); 3] = [("x", "s", "lhat"), ("y", "u", "what"), ("z", "b", "hhat")];
const EXTENTS: [&str; 3] = ["L", "W", "H"];

fn has_pair_binaries(encoding: Encoding, i: usize, j: usize) -> bool {
    i != j && (encoding == Encoding::Disjunctive || i < j)
}

/// Builds the model for `instance`.
pub fn export_milp(instance: &Instance, options: &ExportOptions) -> Result<MilpModel, MilpError> {
    let n = instance.len();
    if n == 0 {
        return Err(MilpError::EmptyInstance);
    }
    let encoding = options.encoding;
    let fixed = match options.objective {
        ObjectiveMode::FixedExtents(e) => Some(e),
        ObjectiveMode::Quadratic => None,
    };
    let big_m = options
        .big_m
        .or(fixed)
        .unwrap_or_else(|| instance.working_bin())
        .as_array();

    let continuous = |name: String, lower, upper| Variable {
        name,
        kind: VarKind::Continuous,
        lower,
        upper,
    };
    let binary = |name: String| Variable {
        name,
        kind: VarKind::Binary,
        lower: 0,
        upper: Some(1),
    };

    let mut variables = Vec::new();
    for (a, name) in EXTENTS.iter().enumerate() {
        variables.push(match fixed {
            Some(e) => continuous(name.to_string(), e.as_array()[a], Some(e.as_array()[a])),
            None => continuous(name.to_string(), 0, Some(big_m[a])),
        });
    }
    for i in 0..n {
        for (a, (coord, _, _)) in AXES.iter().enumerate() {
            variables.push(continuous(format!("{coord}_{i}"), 0, Some(big_m[a])));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if has_pair_binaries(encoding, i, j) {
                for (_, rel, _) in AXES {
                    variables.push(binary(format!("{rel}_{i}_{j}")));
                }
            }
        }
    }
    for i in 0..n {
        for k in 0..Orientation::ALL.len() {
            variables.push(binary(format!("d_{i}_{k}")));
        }
    }
    for i in 0..n {
        for (_, _, side) in AXES {
            variables.push(continuous(format!("{side}_{i}"), 0, None));
        }
    }

    let mut constraints = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut terms = Vec::new();
            for (a, b) in [(i, j), (j, i)] {
                if has_pair_binaries(encoding, a, b) {
                    for (_, rel, _) in AXES {
                        terms.push((1, format!("{rel}_{a}_{b}")));
                    }
                }
            }
            constraints.push(Constraint {
                name: format!("pair_{i}_{j}"),
                terms,
                sense: Sense::Eq,
                rhs: 1,
            });
        }
    }
    for i in 0..n {
        constraints.push(Constraint {
            name: format!("orient_{i}"),
            terms: (0..Orientation::ALL.len()).map(|k| (1, format!("d_{i}_{k}"))).collect(),
            sense: Sense::Eq,
            rhs: 1,
        });
    }
    for i in 0..n {
        for j in 0..n {
            if !has_pair_binaries(encoding, i, j) {
                continue;
            }
            for (a, (coord, rel, side)) in AXES.iter().enumerate() {
                constraints.push(Constraint {
                    name: format!("sep_{coord}_{i}_{j}"),
                    terms: vec![
                        (1, format!("{coord}_{i}")),
                        (-1, format!("{coord}_{j}")),
                        (big_m[a], format!("{rel}_{i}_{j}")),
                        (1, format!("{side}_{i}")),
                    ],
                    sense: Sense::Le,
                    rhs: big_m[a],
                });
            }
        }
    }
    for i in 0..n {
        for (a, (coord, _, side)) in AXES.iter().enumerate() {
            constraints.push(Constraint {
                name: format!("fit_{coord}_{i}"),
                terms: vec![
                    (1, format!("{coord}_{i}")),
                    (1, format!("{side}_{i}")),
                    (-1, EXTENTS[a].to_string()),
                ],
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }
    for (i, dims) in instance.items().iter().enumerate() {
        for (a, (_, _, side)) in AXES.iter().enumerate() {
            let mut terms = vec![(1, format!("{side}_{i}"))];
            for (k, o) in Orientation::ALL.iter().enumerate() {
                terms.push((-dims.orient(*o).as_array()[a], format!("d_{i}_{k}")));
            }
            constraints.push(Constraint {
                name: format!("def_{}_{i}", &side[..1]),
                terms,
                sense: Sense::Eq,
                rhs: 0,
            });
        }
    }

    Ok(MilpModel {
        instance_id: instance.id.clone(),
        items: n,
        encoding,
        objective: if fixed.is_some() {
            Objective::Constant
        } else {
            Objective::HalfSurfaceArea
        },
        variables,
        constraints,
    })
}

fn write_terms(out: &mut String, terms: &[(Length, String)]) {
    for (idx, (c, var)) in terms.iter().enumerate() {
        let sign = if *c < 0 { "-" } else { "+" };
        match (idx, c.abs()) {
            (0, 1) if *c > 0 => write!(out, "{var}"),
            (0, 1) => write!(out, "- {var}"),
            (0, m) if *c > 0 => write!(out, "{m} {var}"),
            (0, m) => write!(out, "- {m} {var}"),
            (_, 1) => write!(out, " {sign} {var}"),
            (_, m) => write!(out, " {sign} {m} {var}"),
        }
        .expect("writing to a String cannot fail");
    }
}

impl MilpModel {
    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Renders the model as LP text.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("\\ instance {}\n", self.instance_id));
        out.push_str(&format!("\\ items {}\n", self.items));
        out.push_str(&format!("\\ encoding {}\n", self.encoding.name()));
        out.push_str("Minimize\n");
        match self.objective {
            Objective::HalfSurfaceArea => out.push_str(" obj: [ 2 L * W + 2 L * H + 2 W * H ] / 2\n"),
            Objective::Constant => out.push_str(" obj: 0 L\n"),
        }
        out.push_str("Subject To\n");
        for c in &self.constraints {
            out.push_str(&format!(" {}: ", c.name));
            write_terms(&mut out, &c.terms);
            out.push_str(&format!(" {} {}\n", c.sense.symbol(), c.rhs));
        }
        out.push_str("Bounds\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
            match v.upper {
                Some(u) if u == v.lower => out.push_str(&format!(" {} = {}\n", v.name, u)),
                Some(u) => out.push_str(&format!(" {} <= {} <= {}\n", v.lower, v.name, u)),
                None => out.push_str(&format!(" {} >= {}\n", v.name, v.lower)),
            }
        }
        out.push_str("Binaries\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Binary) {
            out.push_str(&format!(" {}\n", v.name));
        }
        out.push_str("End\n");
        out
    }

    /// Reads text produced by [`MilpModel::to_lp`].
    ///
    /// Variables appear in the order they are first mentioned by a bound or
    /// binary declaration, which matches the builder for unmodified text.
    pub fn parse_lp(text: &str) -> Result<Self, MilpError> {
        #[derive(PartialEq)]
        enum Section {
            Header,
            Objective,
            Rows,
            Bounds,
            Binaries,
            Done,
        }
        let err = |line: usize, message: &str| MilpError::Parse {
            line,
            message: message.to_string(),
        };
        let int = |line: usize, s: &str| -> Result<Length, MilpError> {
            s.parse().map_err(|_| err(line, &format!("expected an integer, found `{s}`")))
        };

        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l == FORMAT_HEADER => {}
            _ => return Err(err(1, "missing format header")),
        }
        let mut instance_id = None;
        let mut items = None;
        let mut encoding = None;
        let mut objective = None;
        let mut constraints = Vec::new();
        let mut bounded: Vec<Variable> = Vec::new();
        let mut binaries: Vec<Variable> = Vec::new();
        let mut section = Section::Header;

        for (no, raw) in lines {
            if let Some(comment) = raw.strip_prefix("\\ ") {
                if section != Section::Header {
                    continue;
                }
                let (key, value) = comment.split_once(' ').unwrap_or((comment, ""));
                match key {
                    "instance" => instance_id = Some(value.to_string()),
                    "items" => items = Some(int(no, value)? as usize),
                    "encoding" => encoding = Some(value.parse().map_err(|e: String| err(no, &e))?),
                    _ => {}
                }
                continue;
            }
            match raw {
                "Minimize" => {
                    section = Section::Objective;
                    continue;
                }
                "Subject To" => {
                    section = Section::Rows;
                    continue;
                }
                "Bounds" => {
                    section = Section::Bounds;
                    continue;
                }
                "Binaries" => {
                    section = Section::Binaries;
                    continue;
                }
                "End" => {
                    section = Section::Done;
                    continue;
                }
                _ => {}
            }
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            match section {
                Section::Header | Section::Done => return Err(err(no, "unexpected content")),
                Section::Objective => {
                    objective = Some(match line {
                        "obj: [ 2 L * W + 2 L * H + 2 W * H ] / 2" => Objective::HalfSurfaceArea,
                        "obj: 0 L" => Objective::Constant,
                        _ => return Err(err(no, "unsupported objective")),
                    });
                }
                Section::Rows => {
                    let (name, body) = line.split_once(": ").ok_or_else(|| err(no, "row without a name"))?;
                    let tokens: Vec<&str> = body.split_whitespace().collect();
                    if tokens.len() < 3 {
                        return Err(err(no, "row too short"));
                    }
                    let (lhs, tail) = tokens.split_at(tokens.len() - 2);
                    let sense = match tail[0] {
                        "<=" => Sense::Le,
                        "=" => Sense::Eq,
                        other => return Err(err(no, &format!("unsupported sense `{other}`"))),
                    };
                    let rhs = int(no, tail[1])?;
                    let mut terms = Vec::new();
                    let mut sign = 1;
                    let mut coef: Option<Length> = None;
                    for tok in lhs {
                        match *tok {
                            "+" => sign = 1,
                            "-" => sign = -1,
                            t if t.starts_with(|c: char| c.is_ascii_digit()) => coef = Some(int(no, t)?),
                            var => {
                                terms.push((sign * coef.take().unwrap_or(1), var.to_string()));
                                sign = 1;
                            }
                        }
                    }
                    constraints.push(Constraint {
                        name: name.to_string(),
                        terms,
                        sense,
                        rhs,
                    });
                }
                Section::Bounds => {
                    let t: Vec<&str> = line.split_whitespace().collect();
                    let (name, lower, upper) = match t.as_slice() {
                        [lo, "<=", name, "<=", hi] => (*name, int(no, lo)?, Some(int(no, hi)?)),
                        [name, "=", v] => (*name, int(no, v)?, Some(int(no, v)?)),
                        [name, ">=", lo] => (*name, int(no, lo)?, None),
                        _ => return Err(err(no, "unsupported bound")),
                    };
                    bounded.push(Variable {
                        name: name.to_string(),
                        kind: VarKind::Continuous,
                        lower,
                        upper,
                    });
                }
                Section::Binaries => binaries.push(Variable {
                    name: line.to_string(),
                    kind: VarKind::Binary,
                    lower: 0,
                    upper: Some(1),
                }),
            }
        }
        if section != Section::Done {
            return Err(err(text.lines().count(), "missing End"));
        }

        // Builder order: extents, coordinates, pair binaries, orientation binaries, oriented sides.
        let (sides, head): (Vec<Variable>, Vec<Variable>) = bounded
            .into_iter()
            .partition(|v| v.name.contains("hat_"));
        let (pair_bins, orient_bins): (Vec<Variable>, Vec<Variable>) =
            binaries.into_iter().partition(|v| !v.name.starts_with("d_"));
        let variables = head
            .into_iter()
            .chain(pair_bins)
            .chain(orient_bins)
            .chain(sides)
            .collect();

        Ok(MilpModel {
            instance_id: instance_id.ok_or_else(|| err(1, "missing instance line"))?,
            items: items.ok_or_else(|| err(1, "missing items line"))?,
            encoding: encoding.ok_or_else(|| err(1, "missing encoding line"))?,
            objective: objective.ok_or_else(|| err(1, "missing objective"))?,
            variables,
            constraints,
        })
    }
}

impl fmt::Display for MilpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lp())
    }
}

/// Expected versus found size of one structural group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupCount {
    pub group: &'static str,
    pub expected: usize,
    pub found: usize,
}

impl GroupCount {
    pub fn is_pass(&self) -> bool {
        self.expected == self.found
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub groups: Vec<GroupCount>,
}

impl CountReport {
    pub fn is_pass(&self) -> bool {
        self.groups.iter().all(GroupCount::is_pass)
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn failing(&self) -> impl Iterator<Item = &GroupCount> {
        self.groups.iter().filter(|g| !g.is_pass())
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict())?;
        for g in &self.groups {
            let mark = if g.is_pass() { "ok" } else { "MISMATCH" };
            writeln!(f, "  {:<26} expected {:>6} found {:>6} {mark}", g.group, g.expected, g.found)?;
        }
        Ok(())
    }
}

/// Checks the structure of `model` against counts derived from `n` alone.
///
/// Variables are classified by name prefix and kind; rows by name prefix.
pub fn check_model_counts(model: &MilpModel, n: usize) -> CountReport {
    let pairs = n * n.saturating_sub(1) / 2;
    let pair_binaries = match model.encoding {
        Encoding::Disjunctive => 6 * pairs,
        Encoding::Literal => 3 * pairs,
    };
    let var_count = |pred: &dyn Fn(&Variable) -> bool| model.variables.iter().filter(|v| pred(v)).count();
    let is_pair_name = |name: &str| {
        let mut parts = name.split('_');
        matches!(parts.next(), Some("s" | "u" | "b")) && parts.count() == 2
    };
    let is_coord_name = |name: &str| {
        let mut parts = name.split('_');
        matches!(parts.next(), Some("x" | "y" | "z")) && parts.count() == 1
    };
    let extents = var_count(&|v| EXTENTS.contains(&v.name.as_str()) && v.kind == VarKind::Continuous);
    let coords = var_count(&|v| is_coord_name(&v.name) && v.kind == VarKind::Continuous);
    let pair_bins = var_count(&|v| is_pair_name(&v.name) && v.kind == VarKind::Binary);
    let orient_bins = var_count(&|v| v.name.starts_with("d_") && v.kind == VarKind::Binary);
    let sides = var_count(&|v| v.name.contains("hat_") && v.kind == VarKind::Continuous);

    let row_count = |g: ConstraintGroup| model.constraints.iter().filter(|c| c.group() == Some(g)).count();
    let separation_rows = match model.encoding {
        Encoding::Disjunctive => 6 * pairs,
        Encoding::Literal => 3 * pairs,
    };

    let groups = vec![
        GroupCount { group: "items", expected: n, found: model.items },
        GroupCount { group: "extent-variables", expected: 3, found: extents },
        GroupCount { group: "coordinate-variables", expected: 3 * n, found: coords },
        GroupCount { group: "pair-binaries", expected: pair_binaries, found: pair_bins },
        GroupCount { group: "orientation-binaries", expected: 6 * n, found: orient_bins },
        GroupCount {
            group: "decision-variables",
            expected: 3 + 3 * n + pair_binaries + 6 * n,
            found: extents + coords + pair_bins + orient_bins,
        },
        GroupCount { group: "oriented-side-variables", expected: 3 * n, found: sides },
        GroupCount { group: "variables", expected: 3 + 3 * n + pair_binaries + 9 * n, found: model.variables.len() },
        GroupCount {
            group: ConstraintGroup::PairExclusivity.label(),
            expected: pairs,
            found: row_count(ConstraintGroup::PairExclusivity),
        },
        GroupCount {
            group: ConstraintGroup::OrientationExclusivity.label(),
            expected: n,
            found: row_count(ConstraintGroup::OrientationExclusivity),
        },
        GroupCount {
            group: ConstraintGroup::Separation.label(),
            expected: separation_rows,
            found: row_count(ConstraintGroup::Separation),
        },
        GroupCount {
            group: ConstraintGroup::Containment.label(),
            expected: 3 * n,
            found: row_count(ConstraintGroup::Containment),
        },
        GroupCount {
            group: ConstraintGroup::OrientedDims.label(),
            expected: 3 * n,
            found: row_count(ConstraintGroup::OrientedDims),
        },
        GroupCount {
            group: "constraints",
            expected: pairs + n + separation_rows + 6 * n,
            found: model.constraints.len(),
        },
    ];
    CountReport { groups }
}

/// Values for every model variable.
pub type Assignment = BTreeMap<String, Length>;

/// Builds the model point corresponding to a packing.
///
/// Extents are the solution's tight extents, or the pinned values for a
/// fixed-extents model. Each pair gets the first separating relation found by
/// [`separation_witness`].
pub fn feasible_point(
    model: &MilpModel,
    instance: &Instance,
    solution: &PackingSolution,
) -> Result<Assignment, MilpError> {
    let n = model.items;
    if instance.len() != n || solution.placements.len() != n {
        return Err(MilpError::InstanceMismatch {
            expected: n,
            found: solution.placements.len(),
        });
    }
    let mut point: Assignment = model.variables.iter().map(|v| (v.name.clone(), 0)).collect();
    for (a, name) in EXTENTS.iter().enumerate() {
        let value = match model.variable(name) {
            Some(Variable { lower, upper: Some(u), .. }) if lower == u => *u,
            _ => solution.extents.as_array()[a],
        };
        point.insert(name.to_string(), value);
    }
    let mut boxes = Vec::with_capacity(n);
    for i in 0..n {
        let p = solution.placement_of(i).ok_or(MilpError::MissingPlacement(i))?;
        let oriented = instance.item(i).orient(p.orientation).as_array();
        for (a, (coord, _, side)) in AXES.iter().enumerate() {
            point.insert(format!("{coord}_{i}"), p.origin.as_array()[a]);
            point.insert(format!("{side}_{i}"), oriented[a]);
        }
        point.insert(format!("d_{i}_{}", p.orientation.index()), 1);
        boxes.push(p.cuboid(instance.item(i)));
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = separation_witness(i, &boxes[i], j, &boxes[j]).ok_or(MilpError::NoSeparation(i, j))?;
            if !has_pair_binaries(model.encoding, w.before, w.after) {
                return Err(MilpError::NotRepresentable(i, j));
            }
            point.insert(format!("{}_{}_{}", AXES[w.axis].1, w.before, w.after), 1);
        }
    }
    Ok(point)
}

/// Rows and bounds broken by a point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionReport {
    pub violated: Vec<String>,
}

impl SubstitutionReport {
    pub fn is_pass(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Substitutes `point` into every bound, integrality condition and row of `model`.
pub fn check_substitution(model: &MilpModel, point: &Assignment) -> SubstitutionReport {
    let mut violated = Vec::new();
    for v in &model.variables {
        let Some(&value) = point.get(&v.name) else {
            violated.push(format!("unassigned {}", v.name));
            continue;
        };
        if value < v.lower || v.upper.is_some_and(|u| value > u) {
            violated.push(format!("bound {}", v.name));
        }
        if v.kind == VarKind::Binary && !(value == 0 || value == 1) {
            violated.push(format!("binary {}", v.name));
        }
    }
    for c in &model.constraints {
        let mut lhs = 0;
        let mut missing = false;
        for (coef, var) in &c.terms {
            match point.get(var) {
                Some(value) => lhs += coef * value,
                None => missing = true,
            }
        }
        let ok = !missing
            && match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
        if !ok {
            violated.push(c.name.clone());
        }
    }
    SubstitutionReport { violated }
}

/// Objective value `LW + LH + WH` at `point`, or zero for a feasibility model.
pub fn objective_value(model: &MilpModel, point: &Assignment) -> Length {
    match model.objective {
        Objective::Constant => 0,
        Objective::HalfSurfaceArea => {
            let g = |k: &str| point.get(k).copied().unwrap_or(0);
            g("L") * g("W") + g("L") * g("H") + g("W") * g("H")
        }
    }
}
