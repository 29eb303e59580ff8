//! Decision procedure for the existence of a directed round fold map.
//!
//! A decomposition graph whose buffer-smoothed form is a tree admits one
//! (witnessed by a monotone labeling of the buffered plumbing-type graph);
//! torus bundles with |trace| ≥ 3 and the registered surface-times-circle
//! products do not. Everything else is reported as unknown: deciding it
//! would need plumbing normal forms, which are out of scope here.

use crate::decompose::{
    check_labeling, insert_plumbing_buffers, label_tree, reduce_to_pants, TreeLabeling,
};
use crate::graph::DecompositionGraph;
use crate::homology::{first_homology, graph_betti};
use crate::{Error, GluingMatrix};

/// Torus bundle over the circle given by its monodromy matrix (det = 1).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TorusBundleInput {
    pub monodromy: GluingMatrix,
}

impl TorusBundleInput {
    pub fn new(monodromy: GluingMatrix) -> Result<Self, Error> {
        if monodromy.det() != 1 {
            return Err(Error::BadMonodromyDeterminant(monodromy.det()));
        }
        Ok(TorusBundleInput { monodromy })
    }

    /// The equivalent decomposition graph: a thick torus self-glued by
    /// A·diag(−1, 1).
    pub fn decomposition_graph(&self) -> DecompositionGraph {
        let m = self.monodromy;
        let text = format!(
            "piece 0 thicktorus\nglue 0.1 0.0 {} {} {} {}\n",
            -m.a, m.b, -m.c, m.d
        );
        DecompositionGraph::parse(&text).expect("self-gluing of det -1 is valid")
    }
}

#[derive(Clone, Debug)]
pub enum DirectedInput {
    Graph(DecompositionGraph),
    TorusBundle(TorusBundleInput),
}

/// Outcome of the decision procedure.
#[derive(Clone, Debug)]
pub enum DirectedDecision {
    /// A directed map exists; the witness labels the prepared (reduced and
    /// buffered) plumbing-type tree accepted by the constructor.
    Yes {
        prepared: DecompositionGraph,
        witness: TreeLabeling,
    },
    No {
        obstruction: String,
    },
    Unknown {
        report: String,
    },
}

/// Registered product fixtures Σ_g × S¹ (g ≥ 1), which admit no directed
/// map: canonical graph text and name. The registry is an explicit list,
/// not an inference engine.
pub fn product_family_registry() -> Vec<(&'static str, DecompositionGraph)> {
    let sigma1 = "piece 0 thicktorus\nglue 0.0 0.1 -1 0 0 1\n";
    let sigma2 = "piece 0 pants\npiece 1 pants\n\
                  glue 0.0 1.0 -1 0 0 1\nglue 0.1 1.1 -1 0 0 1\nglue 0.2 1.2 -1 0 0 1\n";
    let sigma3 = "piece 0 pants\npiece 1 pants\npiece 2 pants\npiece 3 pants\n\
                  glue 0.0 1.0 -1 0 0 1\nglue 0.1 1.1 -1 0 0 1\n\
                  glue 0.2 2.0 -1 0 0 1\nglue 1.2 3.0 -1 0 0 1\n\
                  glue 2.1 3.1 -1 0 0 1\nglue 2.2 3.2 -1 0 0 1\n";
    vec![
        ("Sigma_1 x S^1", DecompositionGraph::parse(sigma1).unwrap()),
        ("Sigma_2 x S^1", DecompositionGraph::parse(sigma2).unwrap()),
        ("Sigma_3 x S^1", DecompositionGraph::parse(sigma3).unwrap()),
    ]
}

pub fn admits_directed(input: &DirectedInput) -> Result<DirectedDecision, Error> {
    match input {
        DirectedInput::Graph(g) => admits_directed_graph(g),
        DirectedInput::TorusBundle(tb) => Ok(admits_directed_torus_bundle(tb)),
    }
}

pub fn admits_directed_graph(g: &DecompositionGraph) -> Result<DirectedDecision, Error> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    let canonical = g.serialize();
    for (name, fixture) in product_family_registry() {
        if fixture.serialize() == canonical {
            return Ok(DirectedDecision::No {
                obstruction: format!(
                    "known product family {name}: rational cohomology classes with non-vanishing cup product"
                ),
            });
        }
    }

    let reduced = reduce_to_pants(g)?;
    let betti = graph_betti(&reduced)?;
    let homology = first_homology(&reduced)?;
    if homology.free_rank == 0 && betti != 0 {
        return Err(Error::Internal(format!(
            "H1 has free rank 0 but the graph has Betti number {betti}"
        )));
    }

    if betti == 0 {
        let prepared = insert_plumbing_buffers(&reduced)?;
        let witness = label_tree(&prepared)?;
        check_labeling(&prepared, &witness)?;
        return Ok(DirectedDecision::Yes { prepared, witness });
    }
    Ok(DirectedDecision::Unknown {
        report: format!(
            "graph Betti number {betti} > 0: the given decomposition is not a tree, and plumbing normal-form reduction is not implemented"
        ),
    })
}

pub fn admits_directed_torus_bundle(input: &TorusBundleInput) -> DirectedDecision {
    let trace = input.monodromy.trace();
    if trace.abs() >= 3 {
        DirectedDecision::No {
            obstruction: format!(
                "torus bundle with monodromy trace {trace}: the plumbing normal form contains a loop, so a round fold map exists but no directed one"
            ),
        }
    } else {
        DirectedDecision::Unknown {
            report: format!(
                "torus bundle with monodromy trace {trace}: the loop obstruction needs |trace| >= 3, and normal-form analysis is not implemented"
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::construct_directed;
    use crate::mat::Mat2;

    fn parse(text: &str) -> DecompositionGraph {
        DecompositionGraph::parse(text).unwrap()
    }

    #[test]
    fn tree_fixture_is_yes_with_usable_witness() {
        let g = parse(
            "piece 0 pants\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 3.0 0 1 1 0\n",
        );
        match admits_directed_graph(&g).unwrap() {
            DirectedDecision::Yes { prepared, witness } => {
                check_labeling(&prepared, &witness).unwrap();
                let d = construct_directed(&prepared, &witness).unwrap();
                assert!(d.is_directed().unwrap());
            }
            other => panic!("expected YES, got {other:?}"),
        }
    }

    #[test]
    fn crooked_tree_gets_buffered_then_constructed() {
        let g = parse("piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 -1 0 5 1\n");
        match admits_directed_graph(&g).unwrap() {
            DirectedDecision::Yes { prepared, witness } => {
                let d = construct_directed(&prepared, &witness).unwrap();
                assert_eq!(d.levels, 1);
            }
            other => panic!("expected YES, got {other:?}"),
        }
    }

    #[test]
    fn bundle_input_reduces_to_yes() {
        let g = parse("piece 0 bundle 0\n");
        assert!(matches!(
            admits_directed_graph(&g).unwrap(),
            DirectedDecision::Yes { .. }
        ));
    }

    #[test]
    fn product_fixture_is_no() {
        let sigma1 = parse("piece 0 thicktorus\nglue 0.0 0.1 -1 0 0 1\n");
        match admits_directed_graph(&sigma1).unwrap() {
            DirectedDecision::No { obstruction } => {
                assert!(obstruction.contains("Sigma_1"));
            }
            other => panic!("expected NO, got {other:?}"),
        }
    }

    #[test]
    fn theta_with_plumbing_edges_is_unknown() {
        let theta = parse(
            "piece 0 pants\npiece 1 pants\nglue 0.0 1.0 0 1 1 0\nglue 0.1 1.1 0 1 1 0\nglue 0.2 1.2 0 1 1 0\n",
        );
        match admits_directed_graph(&theta).unwrap() {
            DirectedDecision::Unknown { report } => {
                assert!(report.contains("Betti number 2"));
            }
            other => panic!("expected UNKNOWN, got {other:?}"),
        }
    }

    #[test]
    fn torus_bundle_trace_rule() {
        let anosov = TorusBundleInput::new(Mat2::new(2, 1, 1, 1)).unwrap();
        assert!(matches!(
            admits_directed_torus_bundle(&anosov),
            DirectedDecision::No { .. }
        ));
        let shear = TorusBundleInput::new(Mat2::new(1, 1, 0, 1)).unwrap();
        assert!(matches!(
            admits_directed_torus_bundle(&shear),
            DirectedDecision::Unknown { .. }
        ));
        assert!(TorusBundleInput::new(Mat2::new(1, 0, 0, -1)).is_err());
    }

    #[test]
    fn bundle_graph_matches_homology_oracle() {
        // mapping torus of A has H1 = Z ⊕ coker(A − I)
        let anosov = TorusBundleInput::new(Mat2::new(2, 1, 1, 1)).unwrap();
        let g = anosov.decomposition_graph();
        let h1 = first_homology(&g).unwrap();
        assert_eq!(h1.free_rank, 1);
        assert!(h1.torsion.is_empty());

        let identity = TorusBundleInput::new(Mat2::identity()).unwrap();
        let h1 = first_homology(&identity.decomposition_graph()).unwrap();
        assert_eq!(h1.free_rank, 3);
    }
}
