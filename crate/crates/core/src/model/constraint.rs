use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::types::ParamId;

/// The fourteen response categories. Numbering follows the category table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintCategory {
    ConfigurationAuthentication,
    ProducerConsumer,
    UnsupportedOperation,
    AdditionalMandatory,
    Or,
    One,
    AllOrNone,
    ConditionalParameterRequired,
    ParameterUnknown,
    DataArithmetic,
    DataNonArithmetic,
    DataInfluencedParamSelection,
    ParameterInfluencedDataValues,
    Unhandled,
}

impl ConstraintCategory {
    pub const ALL: [ConstraintCategory; 14] = [
        Self::ConfigurationAuthentication,
        Self::ProducerConsumer,
        Self::UnsupportedOperation,
        Self::AdditionalMandatory,
        Self::Or,
        Self::One,
        Self::AllOrNone,
        Self::ConditionalParameterRequired,
        Self::ParameterUnknown,
        Self::DataArithmetic,
        Self::DataNonArithmetic,
        Self::DataInfluencedParamSelection,
        Self::ParameterInfluencedDataValues,
        Self::Unhandled,
    ];

    /// 1-based row number.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap() + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        n.checked_sub(1).and_then(|i| Self::ALL.get(i)).copied()
    }

    /// Categories whose verdict carries a constraint object.
    pub fn forms_constraint(self) -> bool {
        matches!(self.number(), 2 | 4 | 5 | 6 | 7 | 8 | 10 | 11 | 12 | 13)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ConfigurationAuthentication => "ConfigurationAuthentication",
            Self::ProducerConsumer => "ProducerConsumer",
            Self::UnsupportedOperation => "UnsupportedOperation",
            Self::AdditionalMandatory => "AdditionalMandatory",
            Self::Or => "Or",
            Self::One => "One",
            Self::AllOrNone => "AllOrNone",
            Self::ConditionalParameterRequired => "ConditionalParameterRequired",
            Self::ParameterUnknown => "ParameterUnknown",
            Self::DataArithmetic => "DataArithmetic",
            Self::DataNonArithmetic => "DataNonArithmetic",
            Self::DataInfluencedParamSelection => "DataInfluencedParamSelection",
            Self::ParameterInfluencedDataValues => "ParameterInfluencedDataValues",
            Self::Unhandled => "Unhandled",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for ConstraintCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
            Self::Eq => "=",
            Self::Ne => "!=",
        }
    }

    /// The operator obtained by swapping operands (`a < b` ⇔ `b > a`).
    pub fn flipped(self) -> Self {
        match self {
            Self::Lt => Self::Gt,
            Self::Le => Self::Ge,
            Self::Gt => Self::Lt,
            Self::Ge => Self::Le,
            other => other,
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Self::Lt => Self::Ge,
            Self::Le => Self::Gt,
            Self::Gt => Self::Le,
            Self::Ge => Self::Lt,
            Self::Eq => Self::Ne,
            Self::Ne => Self::Eq,
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, Self::Eq | Self::Ne)
    }

    pub fn holds(self, ordering: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Self::Lt => ordering == Less,
            Self::Le => ordering != Greater,
            Self::Gt => ordering == Greater,
            Self::Ge => ordering != Less,
            Self::Eq => ordering == Equal,
            Self::Ne => ordering != Equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Operand {
    Param(ParamId),
    Const(Value),
    List(Vec<Value>),
}

/// `lhs op rhs`; with a list on the right, `=` means membership and `!=` exclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: ParamId,
    pub op: RelOp,
    pub rhs: Operand,
}

impl Relation {
    pub fn new(lhs: impl Into<ParamId>, op: RelOp, rhs: Operand) -> Self {
        Self { lhs: lhs.into(), op, rhs }
    }

    pub fn params(&self) -> Vec<&str> {
        let mut out = vec![self.lhs.as_str()];
        if let Operand::Param(p) = &self.rhs {
            out.push(p.as_str());
        }
        out
    }

    pub fn negated(&self) -> Self {
        Self { lhs: self.lhs.clone(), op: self.op.negated(), rhs: self.rhs.clone() }
    }

    fn normalized(&self) -> Self {
        match &self.rhs {
            Operand::Param(r) if r < &self.lhs => {
                Self { lhs: r.clone(), op: self.op.flipped(), rhs: Operand::Param(self.lhs.clone()) }
            }
            Operand::List(values) => {
                let mut values = values.clone();
                values.sort_by_key(|v| v.to_string());
                values.dedup();
                Self { lhs: self.lhs.clone(), op: self.op, rhs: Operand::List(values) }
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs = match &self.rhs {
            Operand::Param(p) => p.clone(),
            Operand::Const(v) => v.to_string(),
            Operand::List(vs) => {
                format!("[{}]", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
            }
        };
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataProperty {
    Categorical,
    Unique,
    Format,
}

/// Parameter-selection condition used inside the nested categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    Present { param: ParamId },
    Absent { param: ParamId },
    Or { params: Vec<ParamId> },
    One { params: Vec<ParamId> },
    AllOrNone { params: Vec<ParamId> },
    Conditional { p1: ParamId, p1_present: bool, p2: ParamId, p2_present: bool },
}

impl Selection {
    pub fn params(&self) -> Vec<&str> {
        match self {
            Self::Present { param } | Self::Absent { param } => vec![param.as_str()],
            Self::Or { params } | Self::One { params } | Self::AllOrNone { params } => {
                params.iter().map(String::as_str).collect()
            }
            Self::Conditional { p1, p2, .. } => vec![p1.as_str(), p2.as_str()],
        }
    }

    /// Evaluate against a chosen parameter set.
    ///
    /// `Or` is read here as "at least one of the group"; the selection encoder
    /// uses the optional-list guarded form instead.
    pub fn holds(&self, selected: &BTreeSet<ParamId>) -> bool {
        let count = |ps: &[ParamId]| ps.iter().filter(|p| selected.contains(*p)).count();
        match self {
            Self::Present { param } => selected.contains(param),
            Self::Absent { param } => !selected.contains(param),
            Self::Or { params } => count(params) > 0,
            Self::One { params } => count(params) <= 1,
            Self::AllOrNone { params } => {
                let n = count(params);
                n == 0 || n == params.len()
            }
            Self::Conditional { p1, p1_present, p2, p2_present } => {
                selected.contains(p2) != *p2_present || selected.contains(p1) == *p1_present
            }
        }
    }

    fn normalized(&self) -> Self {
        let sorted = |ps: &Vec<ParamId>| {
            let mut ps = ps.clone();
            ps.sort();
            ps.dedup();
            ps
        };
        match self {
            Self::Or { params } => Self::Or { params: sorted(params) },
            Self::One { params } => Self::One { params: sorted(params) },
            Self::AllOrNone { params } => Self::AllOrNone { params: sorted(params) },
            other => other.clone(),
        }
    }

    fn without(&self, param: &str) -> Option<Self> {
        let reduce = |ps: &Vec<ParamId>| -> Option<Vec<ParamId>> {
            let kept: Vec<ParamId> = ps.iter().filter(|p| *p != param).cloned().collect();
            (kept.len() >= 2).then_some(kept)
        };
        if !self.params().contains(&param) {
            return Some(self.clone());
        }
        match self {
            Self::Or { params } => reduce(params).map(|params| Self::Or { params }),
            Self::One { params } => reduce(params).map(|params| Self::One { params }),
            Self::AllOrNone { params } => reduce(params).map(|params| Self::AllOrNone { params }),
            _ => None,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Present { param } => write!(f, "present({param})"),
            Self::Absent { param } => write!(f, "absent({param})"),
            Self::Or { params } => write!(f, "Or({})", params.join(", ")),
            Self::One { params } => write!(f, "One({})", params.join(", ")),
            Self::AllOrNone { params } => write!(f, "AllOrNone({})", params.join(", ")),
            Self::Conditional { p1, p1_present, p2, p2_present } => {
                write!(f, "Conditional({p1}, {p1_present}, {p2}, {p2_present})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProducerConsumer {
    pub producer_op: String,
    /// `producerOp.status.field.path` for output fields, or an input parameter id.
    pub producer_param: String,
    pub consumer_op: String,
    pub consumer_param: ParamId,
}

/// A learned constraint. One variant per constraint-forming category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Constraint {
    ProducerConsumer(ProducerConsumer),
    AdditionalMandatory { param: ParamId },
    Or { params: Vec<ParamId> },
    One { params: Vec<ParamId> },
    AllOrNone { params: Vec<ParamId> },
    ConditionalParameterRequired { p1: ParamId, p1_present: bool, p2: ParamId, p2_present: bool },
    DataArithmetic(Relation),
    DataNonArithmetic { param: ParamId, property: DataProperty, values: Vec<Value> },
    DataInfluencedParamSelection { antecedent: Relation, consequent: Selection },
    ParameterInfluencedDataValues { antecedent: Selection, consequent: Relation },
}

impl Constraint {
    pub fn category(&self) -> ConstraintCategory {
        match self {
            Self::ProducerConsumer(_) => ConstraintCategory::ProducerConsumer,
            Self::AdditionalMandatory { .. } => ConstraintCategory::AdditionalMandatory,
            Self::Or { .. } => ConstraintCategory::Or,
            Self::One { .. } => ConstraintCategory::One,
            Self::AllOrNone { .. } => ConstraintCategory::AllOrNone,
            Self::ConditionalParameterRequired { .. } => {
                ConstraintCategory::ConditionalParameterRequired
            }
            Self::DataArithmetic(_) => ConstraintCategory::DataArithmetic,
            Self::DataNonArithmetic { .. } => ConstraintCategory::DataNonArithmetic,
            Self::DataInfluencedParamSelection { .. } => {
                ConstraintCategory::DataInfluencedParamSelection
            }
            Self::ParameterInfluencedDataValues { .. } => {
                ConstraintCategory::ParameterInfluencedDataValues
            }
        }
    }

    pub fn is_global(&self) -> bool {
        matches!(self, Self::ProducerConsumer(_))
    }

    /// Constrains which parameters are selected (categories 4-8, 12).
    pub fn is_selection(&self) -> bool {
        matches!(
            self,
            Self::AdditionalMandatory { .. }
                | Self::Or { .. }
                | Self::One { .. }
                | Self::AllOrNone { .. }
                | Self::ConditionalParameterRequired { .. }
                | Self::DataInfluencedParamSelection { .. }
        )
    }

    /// Constrains data values (categories 10-13).
    pub fn is_data(&self) -> bool {
        matches!(
            self,
            Self::DataArithmetic(_)
                | Self::DataNonArithmetic { .. }
                | Self::DataInfluencedParamSelection { .. }
                | Self::ParameterInfluencedDataValues { .. }
        )
    }

    /// Input parameter ids mentioned by the constraint.
    pub fn param_ids(&self) -> Vec<&str> {
        match self {
            Self::ProducerConsumer(pc) => vec![pc.consumer_param.as_str()],
            Self::AdditionalMandatory { param } => vec![param.as_str()],
            Self::Or { params } | Self::One { params } | Self::AllOrNone { params } => {
                params.iter().map(String::as_str).collect()
            }
            Self::ConditionalParameterRequired { p1, p2, .. } => vec![p1.as_str(), p2.as_str()],
            Self::DataArithmetic(r) => r.params(),
            Self::DataNonArithmetic { param, .. } => vec![param.as_str()],
            Self::DataInfluencedParamSelection { antecedent, consequent } => {
                let mut v = antecedent.params();
                v.extend(consequent.params());
                v
            }
            Self::ParameterInfluencedDataValues { antecedent, consequent } => {
                let mut v = antecedent.params();
                v.extend(consequent.params());
                v
            }
        }
    }

    /// Canonical form: argument lists sorted, symmetric relations oriented.
    pub fn normalized(&self) -> Self {
        let sorted = |ps: &Vec<ParamId>| {
            let mut ps = ps.clone();
            ps.sort();
            ps.dedup();
            ps
        };
        match self {
            Self::Or { params } => Self::Or { params: sorted(params) },
            Self::One { params } => Self::One { params: sorted(params) },
            Self::AllOrNone { params } => Self::AllOrNone { params: sorted(params) },
            Self::DataArithmetic(r) => Self::DataArithmetic(r.normalized()),
            Self::DataNonArithmetic { param, property, values } => {
                let mut values = values.clone();
                values.sort_by_key(|v| v.to_string());
                values.dedup();
                Self::DataNonArithmetic { param: param.clone(), property: *property, values }
            }
            Self::DataInfluencedParamSelection { antecedent, consequent } => {
                Self::DataInfluencedParamSelection {
                    antecedent: antecedent.normalized(),
                    consequent: consequent.normalized(),
                }
            }
            Self::ParameterInfluencedDataValues { antecedent, consequent } => {
                Self::ParameterInfluencedDataValues {
                    antecedent: antecedent.normalized(),
                    consequent: consequent.normalized(),
                }
            }
            other => other.clone(),
        }
    }

    /// Structural equality modulo argument order.
    pub fn equivalent(&self, other: &Constraint) -> bool {
        self.normalized() == other.normalized()
    }

    /// The constraint with `param` dropped from its argument lists; `None` if
    /// nothing meaningful remains.
    pub fn without_param(&self, param: &str) -> Option<Self> {
        if !self.param_ids().contains(&param) {
            return Some(self.clone());
        }
        let reduce = |ps: &Vec<ParamId>| -> Option<Vec<ParamId>> {
            let kept: Vec<ParamId> = ps.iter().filter(|p| *p != param).cloned().collect();
            (kept.len() >= 2).then_some(kept)
        };
        match self {
            Self::Or { params } => reduce(params).map(|params| Self::Or { params }),
            Self::One { params } => reduce(params).map(|params| Self::One { params }),
            Self::AllOrNone { params } => reduce(params).map(|params| Self::AllOrNone { params }),
            Self::DataInfluencedParamSelection { antecedent, consequent }
                if !antecedent.params().contains(&param) =>
            {
                consequent.without(param).map(|consequent| Self::DataInfluencedParamSelection {
                    antecedent: antecedent.clone(),
                    consequent,
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ProducerConsumer(pc) => write!(
                f,
                "ProducerConsumer({}, {}, {}, {})",
                pc.producer_op, pc.producer_param, pc.consumer_op, pc.consumer_param
            ),
            Self::AdditionalMandatory { param } => write!(f, "AdditionalMandatory({param})"),
            Self::Or { params } => write!(f, "Or({})", params.join(", ")),
            Self::One { params } => write!(f, "One({})", params.join(", ")),
            Self::AllOrNone { params } => write!(f, "AllOrNone({})", params.join(", ")),
            Self::ConditionalParameterRequired { p1, p1_present, p2, p2_present } => {
                write!(f, "ConditionalParameterRequired({p1}, {p1_present}, {p2}, {p2_present})")
            }
            Self::DataArithmetic(r) => write!(f, "DataArithmetic({r})"),
            Self::DataNonArithmetic { param, property, values } => write!(
                f,
                "DataNonArithmetic({param}, {property:?}, [{}])",
                values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            ),
            Self::DataInfluencedParamSelection { antecedent, consequent } => {
                write!(f, "DataInfluencedParamSelection({antecedent} => {consequent})")
            }
            Self::ParameterInfluencedDataValues { antecedent, consequent } => {
                write!(f, "ParameterInfluencedDataValues({antecedent} => {consequent})")
            }
        }
    }
}
