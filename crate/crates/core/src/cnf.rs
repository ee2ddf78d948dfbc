//! DIMACS CNF export of arrowing instances, and import of solver
//! models as verified witness colorings.
//!
//! Variable `i` is host edge `i−1` in canonical order; a true variable
//! means the edge is red. Each red-pattern embedding contributes an
//! all-negative clause, each blue-pattern embedding an all-positive
//! one, so satisfying assignments are exactly the good colorings.

use std::collections::BTreeSet;
use std::io::Write;

use thiserror::Error;

use crate::engine::is_good_coloring;
use crate::mpgraph::{Color, Coloring, GraphError, ShapeSpec};
use crate::patterns::{embedding_index, PatternName};

#[derive(Debug, Error)]
pub enum CnfError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model leaves variable {0} unassigned")]
    IncompleteModel(usize),
    #[error("literal {0} out of range (instance has {1} variables)")]
    BadLiteral(i64, usize),
    #[error("variable {0} assigned twice")]
    ConflictingLiteral(usize),
    #[error(
        "model satisfies the clause set check but the decoded coloring \
         contains a monochromatic target; encoding/solver polarity mismatch"
    )]
    VerificationFailed,
    #[error("model does not satisfy the instance ({0} clause(s) violated)")]
    UnsatisfiedModel(usize),
}

/// A generated instance: enough to size the file and to decode models.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    pub shape: ShapeSpec,
    pub red: PatternName,
    pub blue: PatternName,
    pub variables: usize,
    pub red_clauses: usize,
    pub blue_clauses: usize,
}

impl CnfInstance {
    pub fn clause_count(&self) -> usize {
        self.red_clauses + self.blue_clauses
    }
}

fn clause_set(
    shape: ShapeSpec,
    red: PatternName,
    blue: PatternName,
) -> (Vec<Vec<i64>>, usize, usize) {
    // Deduplicate by literal set; embeddings are already edge-set
    // deduplicated, so this only guards the degenerate red == blue case.
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut clauses = Vec::new();
    let mut red_clauses = 0;
    for emb in &embedding_index(shape, red).embeddings {
        let lits: Vec<i64> = emb.edges.iter().map(|&e| -(e as i64 + 1)).collect();
        if seen.insert(lits.clone()) {
            clauses.push(lits);
            red_clauses += 1;
        }
    }
    let mut blue_clauses = 0;
    for emb in &embedding_index(shape, blue).embeddings {
        let lits: Vec<i64> = emb.edges.iter().map(|&e| e as i64 + 1).collect();
        if seen.insert(lits.clone()) {
            clauses.push(lits);
            blue_clauses += 1;
        }
    }
    (clauses, red_clauses, blue_clauses)
}

/// Writes the instance in DIMACS CNF form. Output is byte-identical
/// for identical inputs.
pub fn export_cnf(
    shape: ShapeSpec,
    red: PatternName,
    blue: PatternName,
    sink: &mut dyn Write,
) -> Result<CnfInstance, CnfError> {
    let (clauses, red_clauses, blue_clauses) = clause_set(shape, red, blue);
    let variables = shape.edge_count();
    writeln!(
        sink,
        "c arrowing instance K_{{{}x{}}} -> (red {}, blue {})",
        shape.parts(),
        shape.part_size(),
        red,
        blue
    )?;
    writeln!(sink, "c polarity: variable true = edge red")?;
    writeln!(
        sink,
        "c {} red-pattern clauses, {} blue-pattern clauses",
        red_clauses, blue_clauses
    )?;
    for (e, (u, v)) in shape.edges().iter().enumerate() {
        writeln!(sink, "c var {} = edge {}-{}", e + 1, u, v)?;
    }
    writeln!(sink, "p cnf {} {}", variables, clauses.len())?;
    for clause in &clauses {
        for lit in clause {
            write!(sink, "{} ", lit)?;
        }
        writeln!(sink, "0")?;
    }
    Ok(CnfInstance {
        shape,
        red,
        blue,
        variables,
        red_clauses,
        blue_clauses,
    })
}

/// Builds the instance metadata without writing the file.
pub fn instance(shape: ShapeSpec, red: PatternName, blue: PatternName) -> CnfInstance {
    let (_, red_clauses, blue_clauses) = clause_set(shape, red, blue);
    CnfInstance {
        shape,
        red,
        blue,
        variables: shape.edge_count(),
        red_clauses,
        blue_clauses,
    }
}

/// Parses a solver "v"-line payload: whitespace-separated signed
/// integers, optionally terminated by 0.
pub fn parse_model(text: &str) -> Result<Vec<i64>, CnfError> {
    let mut lits = Vec::new();
    for tok in text.split_whitespace() {
        let tok = tok.trim_start_matches('v');
        if tok.is_empty() {
            continue;
        }
        let lit: i64 = tok
            .parse()
            .map_err(|_| CnfError::BadLiteral(0, 0))?;
        if lit == 0 {
            continue;
        }
        lits.push(lit);
    }
    Ok(lits)
}

/// Reconstructs the total coloring from a complete assignment
/// (true = red) and verifies it is a good coloring before returning.
pub fn import_model(instance: &CnfInstance, assignment: &[i64]) -> Result<Coloring, CnfError> {
    let n = instance.variables;
    let mut values: Vec<Option<bool>> = vec![None; n];
    for &lit in assignment {
        let var = lit.unsigned_abs() as usize;
        if var == 0 || var > n {
            return Err(CnfError::BadLiteral(lit, n));
        }
        let value = lit > 0;
        match values[var - 1] {
            Some(v) if v != value => return Err(CnfError::ConflictingLiteral(var)),
            _ => values[var - 1] = Some(value),
        }
    }
    if let Some(var) = values.iter().position(|v| v.is_none()) {
        return Err(CnfError::IncompleteModel(var + 1));
    }
    let mut coloring = Coloring::empty(instance.shape);
    for (e, v) in values.iter().enumerate() {
        let c = if v.unwrap() { Color::Red } else { Color::Blue };
        coloring.set_color(e, c)?;
    }
    // Clause-level check first so a polarity flip reports precisely.
    let (clauses, _, _) = clause_set(instance.shape, instance.red, instance.blue);
    let violated = clauses
        .iter()
        .filter(|clause| {
            !clause.iter().any(|&lit| {
                let v = values[lit.unsigned_abs() as usize - 1].unwrap();
                (lit > 0) == v
            })
        })
        .count();
    if violated > 0 {
        return Err(CnfError::UnsatisfiedModel(violated));
    }
    if !is_good_coloring(&coloring, instance.red, instance.blue) {
        return Err(CnfError::VerificationFailed);
    }
    Ok(coloring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpgraph::make_shape;
    use PatternName::*;

    #[test]
    fn tiny_instance_counts() {
        let shape = make_shape(3, 1).unwrap();
        let mut buf = Vec::new();
        let inst = export_cnf(shape, C3, C3, &mut buf).unwrap();
        assert_eq!(inst.variables, 3);
        assert_eq!(inst.clause_count(), 2);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("p cnf 3 2"));
        assert!(text.contains("-1 -2 -3 0"));
        assert!(text.contains("1 2 3 0"));
    }

    #[test]
    fn k3x2_b_p3_counts() {
        let shape = make_shape(3, 2).unwrap();
        let inst = instance(shape, B, P3);
        assert_eq!(inst.variables, 12);
        assert_eq!(inst.red_clauses, 12);
        assert_eq!(inst.blue_clauses, 36);
        assert_eq!(inst.clause_count(), 48);
        let inst = instance(shape, B, P2);
        assert_eq!(inst.clause_count(), 24);
    }

    #[test]
    fn export_is_deterministic() {
        let shape = make_shape(4, 2).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        export_cnf(shape, B, C4, &mut a).unwrap();
        export_cnf(shape, B, C4, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn model_round_trip_and_guards() {
        use crate::engine::{decide_arrowing, ArrowVerdict, SearchOptions};
        let shape = make_shape(3, 2).unwrap();
        let inst = instance(shape, B, P3);
        let verdict = decide_arrowing(shape, B, P3, &SearchOptions::default()).unwrap();
        let witness = match verdict {
            ArrowVerdict::NotArrows { witness, .. } => witness,
            _ => panic!("K_{{3x2}} should not arrow (B, P3)"),
        };
        let assignment: Vec<i64> = (0..inst.variables)
            .map(|e| {
                let lit = e as i64 + 1;
                if witness.color(e).unwrap() == Some(Color::Red) {
                    lit
                } else {
                    -lit
                }
            })
            .collect();
        let decoded = import_model(&inst, &assignment).unwrap();
        assert_eq!(decoded, witness);

        // Missing variable.
        let truncated = &assignment[..assignment.len() - 1];
        assert!(matches!(
            import_model(&inst, truncated),
            Err(CnfError::IncompleteModel(_))
        ));
        // Flipped polarity (blue = true convention) must be rejected.
        let flipped: Vec<i64> = assignment.iter().map(|l| -l).collect();
        assert!(import_model(&inst, &flipped).is_err());
    }

    #[test]
    fn parse_model_formats() {
        assert_eq!(parse_model("1 -2 3 0").unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_model("v 1 -2\nv 3 0").unwrap(), vec![1, -2, 3]);
        assert!(parse_model("1 x 3").is_err());
    }
}
