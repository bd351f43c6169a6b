use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::{conjoin, Expr, Signature, Specification};

/// Which half of a specification a comparison concerns. Pre-conditions guard the input
/// lane of the game, post-conditions the output lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Side {
    Input,
    Output,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Input, Side::Output];
}

/// One of the four satisfiability combinations of model `M` and student `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    #[serde(rename = "MS")]
    MS,
    #[serde(rename = "MnS")]
    MnS,
    #[serde(rename = "nMS")]
    NMS,
    #[serde(rename = "nMnS")]
    NMnS,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::MS, Quadrant::MnS, Quadrant::NMS, Quadrant::NMnS];

    pub fn of(m: bool, s: bool) -> Quadrant {
        match (m, s) {
            (true, true) => Quadrant::MS,
            (true, false) => Quadrant::MnS,
            (false, true) => Quadrant::NMS,
            (false, false) => Quadrant::NMnS,
        }
    }

    pub fn m(self) -> bool {
        matches!(self, Quadrant::MS | Quadrant::MnS)
    }

    pub fn s(self) -> bool {
        matches!(self, Quadrant::MS | Quadrant::NMS)
    }

    pub fn name(self) -> &'static str {
        match self {
            Quadrant::MS => "MS",
            Quadrant::MnS => "MnS",
            Quadrant::NMS => "nMS",
            Quadrant::NMnS => "nMnS",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A model/student clause-list pair over one signature, compared by every backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub signature: Signature,
    pub side: Side,
    pub model: Vec<Expr>,
    pub student: Vec<Expr>,
    /// Only assignments satisfying this formula are considered (the model's
    /// pre-condition when comparing post-conditions).
    pub assume: Option<Expr>,
}

impl Problem {
    pub fn pre(model: &Specification, student: &Specification) -> Problem {
        Problem {
            signature: model.signature.clone(),
            side: Side::Input,
            model: model.pres.clone(),
            student: student.pres.clone(),
            assume: None,
        }
    }

    pub fn post(model: &Specification, student: &Specification) -> Problem {
        Problem {
            signature: model.signature.clone(),
            side: Side::Output,
            model: model.posts.clone(),
            student: student.posts.clone(),
            assume: Some(model.pre()),
        }
    }

    pub fn for_side(side: Side, model: &Specification, student: &Specification) -> Problem {
        match side {
            Side::Input => Problem::pre(model, student),
            Side::Output => Problem::post(model, student),
        }
    }

    /// Builds a problem from two standalone formulas, without clause structure.
    pub fn formulas(signature: Signature, side: Side, model: Expr, student: Expr) -> Problem {
        Problem { signature, side, model: vec![model], student: vec![student], assume: None }
    }

    pub fn with_retval(&self) -> bool {
        self.side == Side::Output
    }

    pub fn model_expr(&self) -> Expr {
        conjoin(&self.model)
    }

    pub fn student_expr(&self) -> Expr {
        conjoin(&self.student)
    }
}
