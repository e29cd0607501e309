//! Parameter-selection problems as 0/1 linear constraints.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::model::{Constraint, Location, Operand, Operation, ParamId, Selection};

/// A comparison on the number of selected variables among `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atom {
    Eq(Vec<usize>, usize),
    Ge(Vec<usize>, usize),
    Le(Vec<usize>, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Unknown,
}

impl Atom {
    fn vars(&self) -> &[usize] {
        match self {
            Atom::Eq(v, _) | Atom::Ge(v, _) | Atom::Le(v, _) => v,
        }
    }

    pub fn holds(&self, x: &[bool]) -> bool {
        let sum = self.vars().iter().filter(|v| x[**v]).count();
        match self {
            Atom::Eq(_, k) => sum == *k,
            Atom::Ge(_, k) => sum >= *k,
            Atom::Le(_, k) => sum <= *k,
        }
    }

    fn partial(&self, x: &[Option<bool>]) -> Truth {
        let (mut lo, mut hi) = (0, 0);
        for v in self.vars() {
            match x[*v] {
                Some(true) => {
                    lo += 1;
                    hi += 1;
                }
                None => hi += 1,
                Some(false) => {}
            }
        }
        let (t, f) = match self {
            Atom::Eq(_, k) => (lo == *k && hi == *k, *k < lo || *k > hi),
            Atom::Ge(_, k) => (lo >= *k, hi < *k),
            Atom::Le(_, k) => (hi <= *k, lo > *k),
        };
        if t {
            Truth::True
        } else if f {
            Truth::False
        } else {
            Truth::Unknown
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    Holds(Atom),
    Implies(Atom, Atom),
    Either(Atom, Atom),
}

impl Clause {
    pub fn holds(&self, x: &[bool]) -> bool {
        match self {
            Clause::Holds(a) => a.holds(x),
            Clause::Implies(a, b) => !a.holds(x) || b.holds(x),
            Clause::Either(a, b) => a.holds(x) || b.holds(x),
        }
    }

    fn violated(&self, x: &[Option<bool>]) -> bool {
        use Truth::*;
        match self {
            Clause::Holds(a) => a.partial(x) == False,
            Clause::Implies(a, b) => a.partial(x) == True && b.partial(x) == False,
            Clause::Either(a, b) => a.partial(x) == False && b.partial(x) == False,
        }
    }

    fn unit(&self) -> Option<usize> {
        match self {
            Clause::Holds(Atom::Eq(v, 1)) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionProblem {
    pub target_op: String,
    pub variables: Vec<ParamId>,
    pub clauses: Vec<Clause>,
    /// Two alternative clause sets per data-influenced selection constraint.
    pub splits: Vec<[Vec<Clause>; 2]>,
}

impl SelectionProblem {
    pub fn index(&self, id: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == id)
    }

    pub fn mandatory(&self) -> BTreeSet<usize> {
        self.clauses.iter().filter_map(Clause::unit).collect()
    }

    /// Every combination of split choices, each as a full clause list.
    pub fn alternatives(&self) -> Vec<Vec<Clause>> {
        let mut out = vec![self.clauses.clone()];
        for split in &self.splits {
            out = out
                .into_iter()
                .flat_map(|base| {
                    split.iter().map(move |extra| {
                        let mut c = base.clone();
                        c.extend(extra.iter().cloned());
                        c
                    })
                })
                .collect();
        }
        out
    }

    pub fn to_mask(&self, selected: &BTreeSet<ParamId>) -> Vec<bool> {
        self.variables.iter().map(|v| selected.contains(v)).collect()
    }

    /// Satisfied by at least one alternative.
    pub fn satisfied_by(&self, selected: &BTreeSet<ParamId>) -> bool {
        let x = self.to_mask(selected);
        self.alternatives().iter().any(|cs| cs.iter().all(|c| c.holds(&x)))
    }
}

fn vars(problem_vars: &[ParamId], ids: &[ParamId]) -> Vec<usize> {
    let mut out: Vec<usize> = ids.iter().filter_map(|id| problem_vars.iter().position(|v| v == id)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn selection_clauses(sel: &Selection, variables: &[ParamId], optional: &[usize]) -> Vec<Clause> {
    let v = |ids: &[ParamId]| vars(variables, ids);
    match sel {
        Selection::Present { param } => vec![Clause::Holds(Atom::Eq(v(std::slice::from_ref(param)), 1))],
        Selection::Absent { param } => vec![Clause::Holds(Atom::Eq(v(std::slice::from_ref(param)), 0))],
        Selection::Or { params } => group_clauses(GroupKind::Or, &v(params), optional),
        Selection::One { params } => group_clauses(GroupKind::One, &v(params), optional),
        Selection::AllOrNone { params } => group_clauses(GroupKind::AllOrNone, &v(params), optional),
        Selection::Conditional { p1, p1_present, p2, p2_present } => vec![conditional(
            &v(std::slice::from_ref(p1)),
            *p1_present,
            &v(std::slice::from_ref(p2)),
            *p2_present,
        )],
    }
}

enum GroupKind {
    Or,
    One,
    AllOrNone,
}

fn group_clauses(kind: GroupKind, g: &[usize], optional: &[usize]) -> Vec<Clause> {
    if g.is_empty() {
        return Vec::new();
    }
    match kind {
        GroupKind::Or => vec![Clause::Implies(Atom::Ge(optional.to_vec(), 1), Atom::Ge(g.to_vec(), 1))],
        GroupKind::One => vec![Clause::Implies(Atom::Ge(g.to_vec(), 1), Atom::Eq(g.to_vec(), 1))],
        GroupKind::AllOrNone => vec![Clause::Either(Atom::Eq(g.to_vec(), 0), Atom::Eq(g.to_vec(), g.len()))],
    }
}

fn conditional(p1: &[usize], b1: bool, p2: &[usize], b2: bool) -> Clause {
    Clause::Implies(Atom::Eq(p2.to_vec(), b2 as usize), Atom::Eq(p1.to_vec(), b1 as usize))
}

/// Clauses for the live inputs of `op` under its local constraints.
pub fn encode_selection_constraints(op: &Operation) -> SelectionProblem {
    let live: Vec<_> = op.live_inputs().collect();
    let variables: Vec<ParamId> = live.iter().map(|p| p.id.clone()).collect();
    let learned_mandatory: BTreeSet<&str> = op
        .local_constraints
        .iter()
        .filter_map(|c| match c {
            Constraint::AdditionalMandatory { param } => Some(param.as_str()),
            _ => None,
        })
        .collect();
    let mandatory: Vec<usize> = live
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_required || learned_mandatory.contains(p.id.as_str()))
        .map(|(i, _)| i)
        .collect();
    let optional: Vec<usize> = (0..variables.len()).filter(|i| !mandatory.contains(i)).collect();

    let mut clauses: Vec<Clause> = mandatory.iter().map(|i| Clause::Holds(Atom::Eq(vec![*i], 1))).collect();

    // an optional body field at 1 forces its object's locally required siblings
    for (qi, q) in live.iter().enumerate() {
        if q.loc != Location::Body || q.body_root || !q.locally_required || mandatory.contains(&qi) {
            continue;
        }
        let scope = q.parent_path();
        for (pi, p) in live.iter().enumerate() {
            let inside = scope.is_empty() || p.name.starts_with(&format!("{scope}."));
            if pi != qi && p.loc == Location::Body && !p.body_root && inside {
                clauses.push(Clause::Implies(Atom::Eq(vec![pi], 1), Atom::Eq(vec![qi], 1)));
            }
        }
    }

    let mut splits = Vec::new();
    for c in &op.local_constraints {
        let v = |ids: &[ParamId]| vars(&variables, ids);
        match c {
            Constraint::Or { params } => clauses.extend(group_clauses(GroupKind::Or, &v(params), &optional)),
            Constraint::One { params } => clauses.extend(group_clauses(GroupKind::One, &v(params), &optional)),
            Constraint::AllOrNone { params } => {
                clauses.extend(group_clauses(GroupKind::AllOrNone, &v(params), &optional))
            }
            Constraint::ConditionalParameterRequired { p1, p1_present, p2, p2_present } => {
                clauses.push(conditional(
                    &v(std::slice::from_ref(p1)),
                    *p1_present,
                    &v(std::slice::from_ref(p2)),
                    *p2_present,
                ));
            }
            Constraint::DataInfluencedParamSelection { antecedent, consequent } => {
                let mut with = selection_clauses(consequent, &variables, &optional);
                let mut forced = vec![antecedent.lhs.clone()];
                if let Operand::Param(r) = &antecedent.rhs {
                    forced.push(r.clone());
                }
                with.extend(v(&forced).into_iter().map(|i| Clause::Holds(Atom::Eq(vec![i], 1))));
                splits.push([with, Vec::new()]);
            }
            _ => {}
        }
    }
    SelectionProblem { target_op: op.opname.clone(), variables, clauses, splits }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    Maximal,
    Minimal,
    OptionalCovering,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Maximal => "maximal",
            ScenarioKind::Minimal => "minimal",
            ScenarioKind::OptionalCovering => "covering",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterScenario {
    pub target_op: String,
    pub selected: BTreeSet<ParamId>,
    pub kind: ScenarioKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Upper bound on maximal scenarios per operation.
    pub max_maximal: usize,
    /// Problems with at most this many variables are enumerated exhaustively.
    pub exhaustive_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_maximal: 8, exhaustive_limit: 16 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Max,
    Min,
}

/// Search over one clause list. Candidate order is canonical: sets compare
/// as ascending index vectors, so index 0 selected sorts first.
trait Search {
    fn best(&self, goal: Goal, forced: Option<usize>) -> Option<usize>;
    fn with_cardinality(&self, k: usize, forced: Option<usize>, limit: usize) -> Vec<Vec<bool>>;
}

struct Exhaustive {
    /// Satisfying assignments in canonical order.
    solutions: Vec<Vec<bool>>,
}

impl Exhaustive {
    fn new(n: usize, clauses: &[Clause]) -> Self {
        let mut solutions: Vec<Vec<bool>> = (0u64..1 << n)
            .map(|mask| (0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|x| clauses.iter().all(|c| c.holds(x)))
            .collect();
        solutions.sort_by_key(|x| canonical_key(x));
        Exhaustive { solutions }
    }
}

fn canonical_key(x: &[bool]) -> Vec<bool> {
    // ascending-index-vector order equals reverse order of the membership bits
    x.iter().map(|b| !b).collect()
}

fn count(x: &[bool]) -> usize {
    x.iter().filter(|b| **b).count()
}

impl Search for Exhaustive {
    fn best(&self, goal: Goal, forced: Option<usize>) -> Option<usize> {
        let sizes = self.solutions.iter().filter(|x| forced.is_none_or(|f| x[f])).map(|x| count(x));
        match goal {
            Goal::Max => sizes.max(),
            Goal::Min => sizes.min(),
        }
    }

    fn with_cardinality(&self, k: usize, forced: Option<usize>, limit: usize) -> Vec<Vec<bool>> {
        self.solutions
            .iter()
            .filter(|x| count(x) == k && forced.is_none_or(|f| x[f]))
            .take(limit)
            .cloned()
            .collect()
    }
}

/// Depth-first branch and bound with partial clause evaluation.
struct BranchAndBound<'a> {
    n: usize,
    clauses: &'a [Clause],
}

impl BranchAndBound<'_> {
    fn feasible(&self, x: &[Option<bool>]) -> bool {
        !self.clauses.iter().any(|c| c.violated(x))
    }

    fn optimize(&self, x: &mut Vec<Option<bool>>, i: usize, ones: usize, goal: Goal, best: &mut Option<usize>) {
        if !self.feasible(x) {
            return;
        }
        let open = self.n - i;
        match (goal, *best) {
            (Goal::Max, Some(b)) if ones + open <= b => return,
            (Goal::Min, Some(b)) if ones >= b => return,
            _ => {}
        }
        if i == self.n {
            *best = Some(ones);
            return;
        }
        if x[i].is_some() {
            let add = usize::from(x[i] == Some(true));
            return self.optimize(x, i + 1, ones + add, goal, best);
        }
        let order = if goal == Goal::Max { [true, false] } else { [false, true] };
        for v in order {
            x[i] = Some(v);
            self.optimize(x, i + 1, ones + usize::from(v), goal, best);
        }
        x[i] = None;
    }

    fn collect(&self, x: &mut Vec<Option<bool>>, i: usize, ones: usize, k: usize, limit: usize, out: &mut Vec<Vec<bool>>) {
        if out.len() >= limit || ones > k || ones + (self.n - i) < k || !self.feasible(x) {
            return;
        }
        if i == self.n {
            out.push(x.iter().map(|v| *v == Some(true)).collect());
            return;
        }
        if x[i].is_some() {
            let add = usize::from(x[i] == Some(true));
            return self.collect(x, i + 1, ones + add, k, limit, out);
        }
        for v in [true, false] {
            x[i] = Some(v);
            self.collect(x, i + 1, ones + usize::from(v), k, limit, out);
        }
        x[i] = None;
    }

    fn start(&self, forced: Option<usize>) -> Vec<Option<bool>> {
        let mut x = vec![None; self.n];
        if let Some(f) = forced {
            x[f] = Some(true);
        }
        x
    }
}

impl Search for BranchAndBound<'_> {
    fn best(&self, goal: Goal, forced: Option<usize>) -> Option<usize> {
        let mut best = None;
        self.optimize(&mut self.start(forced), 0, 0, goal, &mut best);
        best
    }

    fn with_cardinality(&self, k: usize, forced: Option<usize>, limit: usize) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        self.collect(&mut self.start(forced), 0, 0, k, limit, &mut out);
        out
    }
}

fn to_set(problem: &SelectionProblem, x: &[bool]) -> BTreeSet<ParamId> {
    x.iter().zip(&problem.variables).filter(|(b, _)| **b).map(|(_, v)| v.clone()).collect()
}

fn solve_one(
    problem: &SelectionProblem,
    clauses: &[Clause],
    is_prerequisite: bool,
    opts: SolveOptions,
) -> Option<Vec<(BTreeSet<ParamId>, ScenarioKind)>> {
    let n = problem.variables.len();
    let exhaustive;
    let bnb;
    let search: &dyn Search = if n <= opts.exhaustive_limit {
        exhaustive = Exhaustive::new(n, clauses);
        &exhaustive
    } else {
        bnb = BranchAndBound { n, clauses };
        &bnb
    };
    let min = search.best(Goal::Min, None)?;
    let minimal = search.with_cardinality(min, None, 1).remove(0);
    if is_prerequisite {
        return Some(vec![(to_set(problem, &minimal), ScenarioKind::Minimal)]);
    }
    let mut out: Vec<(Vec<bool>, ScenarioKind)> = Vec::new();
    let max = search.best(Goal::Max, None)?;
    for x in search.with_cardinality(max, None, opts.max_maximal) {
        out.push((x, ScenarioKind::Maximal));
    }
    if !out.iter().any(|(x, _)| *x == minimal) {
        out.push((minimal, ScenarioKind::Minimal));
    }
    let mandatory = problem.mandatory();
    for v in (0..n).filter(|v| !mandatory.contains(v)) {
        if out.iter().any(|(x, _)| x[v]) {
            continue;
        }
        if let Some(k) = search.best(Goal::Min, Some(v)) {
            let x = search.with_cardinality(k, Some(v), 1).remove(0);
            out.push((x, ScenarioKind::OptionalCovering));
        }
    }
    Some(out.into_iter().map(|(x, k)| (to_set(problem, &x), k)).collect())
}

/// Maximal, minimal and optional-covering scenarios; a prerequisite
/// operation gets its minimal scenario only. Split alternatives are solved
/// separately and their scenario lists joined.
pub fn solve_parameter_scenarios(
    problem: &SelectionProblem,
    is_prerequisite: bool,
) -> Result<Vec<ParameterScenario>, ScenarioError> {
    solve_parameter_scenarios_with(problem, is_prerequisite, SolveOptions::default())
}

pub fn solve_parameter_scenarios_with(
    problem: &SelectionProblem,
    is_prerequisite: bool,
    opts: SolveOptions,
) -> Result<Vec<ParameterScenario>, ScenarioError> {
    let mut out: Vec<ParameterScenario> = Vec::new();
    for clauses in problem.alternatives() {
        let Some(found) = solve_one(problem, &clauses, is_prerequisite, opts) else { continue };
        for (selected, kind) in found {
            if !out.iter().any(|s| s.selected == selected) {
                out.push(ParameterScenario { target_op: problem.target_op.clone(), selected, kind });
            }
        }
    }
    if is_prerequisite && out.len() > 1 {
        // smallest over all alternatives, canonical order on ties
        let key = |s: &ParameterScenario| (s.selected.len(), canonical_key(&problem.to_mask(&s.selected)));
        let best = out.iter().min_by_key(|s| key(s)).cloned().expect("non-empty");
        out = vec![best];
    }
    if out.is_empty() {
        return Err(ScenarioError::InfeasibleMandatory(problem.target_op.clone()));
    }
    Ok(out)
}
