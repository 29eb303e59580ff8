//! Open-book data induced by a round fold map: binding size, page Euler
//! characteristic, and the radial critical sequence.

use crate::descriptor::{directions_from_counts, BlockKind, Direction, RoundFoldDescriptor};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FoldKind {
    Definite,
    Indefinite,
}

impl std::fmt::Display for FoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FoldKind::Definite => write!(f, "definite"),
            FoldKind::Indefinite => write!(f, "indefinite"),
        }
    }
}

/// Page and binding invariants read off a verified descriptor. The page is
/// the radial slice of the map; its Morse function has one critical point
/// per level, so χ = #definite − #indefinite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpenBookSummary {
    pub binding_components: usize,
    pub page_euler_char: i64,
    pub page_boundary: usize,
    /// Genus of the page when it is connected and the monodromy does not
    /// permute page pieces (all multiplicities 1); `None` otherwise.
    pub page_genus: Option<usize>,
    pub critical_sequence: Vec<(usize, FoldKind, Direction)>,
}

pub fn openbook_summary(d: &RoundFoldDescriptor) -> Result<OpenBookSummary, Error> {
    let violations = d.verify();
    if !violations.is_empty() {
        return Err(Error::InvalidDescriptor(violations));
    }
    let directions = directions_from_counts(d.levels, &d.counts);
    let mut definite = 0i64;
    let mut indefinite = 0i64;
    let mut critical_sequence = Vec::with_capacity(d.levels);
    for (li, blocks) in d.blocks.iter().enumerate() {
        let kind = blocks
            .iter()
            .find_map(|b| match b {
                BlockKind::Disk { .. } => Some(FoldKind::Definite),
                BlockKind::Pants { .. } => Some(FoldKind::Indefinite),
                BlockKind::Annulus { .. } => None,
            })
            .ok_or_else(|| Error::Internal("verified level without a fold".into()))?;
        match kind {
            FoldKind::Definite => definite += 1,
            FoldKind::Indefinite => indefinite += 1,
        }
        critical_sequence.push((li + 1, kind, directions[li]));
    }
    let page_euler_char = definite - indefinite;

    // with every multiplicity 1 the page pieces are exactly the blocks and
    // the verified adjacency is connected, so the genus is determined
    let trivial_cycles = d.interfaces.iter().all(|t| t.multiplicity == 1)
        && d.blocks
            .iter()
            .flatten()
            .all(|b| !matches!(b, BlockKind::Annulus { copies } if *copies > 1));
    let page_genus = if trivial_cycles {
        let two_minus = 2 - page_euler_char - d.binding as i64;
        if two_minus >= 0 && two_minus % 2 == 0 {
            Some((two_minus / 2) as usize)
        } else {
            None
        }
    } else {
        None
    };

    Ok(OpenBookSummary {
        binding_components: d.binding,
        page_euler_char,
        page_boundary: d.binding,
        page_genus,
        critical_sequence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::descriptor_from_morse;
    use crate::morse::MorsePage;

    #[test]
    fn pants_page_for_the_directed_example() {
        let page = MorsePage::parse(
            "boundary 3\nevent 1 merge b0 b1 -> c\nevent 2 merge c b2 -> d\nevent 3 death d\n",
        )
        .unwrap();
        let summary = openbook_summary(&descriptor_from_morse(&page)).unwrap();
        assert_eq!(summary.binding_components, 3);
        assert_eq!(summary.page_euler_char, -1);
        assert_eq!(summary.page_boundary, 3);
        assert_eq!(summary.page_genus, Some(0));
        assert_eq!(summary.critical_sequence.len(), 3);
        assert!(summary
            .critical_sequence
            .iter()
            .all(|&(_, _, dir)| dir == Direction::Inward));
    }

    #[test]
    fn once_punctured_torus_page() {
        let page = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 merge a c -> d\nevent 3 death d\n",
        )
        .unwrap();
        let summary = openbook_summary(&descriptor_from_morse(&page)).unwrap();
        assert_eq!(summary.binding_components, 1);
        assert_eq!(summary.page_euler_char, -1);
        assert_eq!(summary.page_genus, Some(1));
        assert_eq!(summary.critical_sequence[0].2, Direction::Outward);
    }

    #[test]
    fn disk_page_summary() {
        let page = MorsePage::parse("boundary 1\nevent 1 death b0\n").unwrap();
        let summary = openbook_summary(&descriptor_from_morse(&page)).unwrap();
        assert_eq!(summary.page_euler_char, 1);
        assert_eq!(summary.page_genus, Some(0));
        assert_eq!(
            summary.critical_sequence,
            vec![(1, FoldKind::Definite, Direction::Inward)]
        );
    }

    #[test]
    fn chi_parity_and_fold_count_identity() {
        let page = MorsePage::parse(
            "boundary 2\nevent 1 split b0 -> a c\nevent 2 merge a b1 -> e\nevent 3 merge e c -> f\nevent 4 death f\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        let summary = openbook_summary(&d).unwrap();
        let definite = summary
            .critical_sequence
            .iter()
            .filter(|&&(_, k, _)| k == FoldKind::Definite)
            .count() as i64;
        let indefinite = summary.critical_sequence.len() as i64 - definite;
        assert_eq!(summary.page_euler_char, definite - indefinite);
        assert_eq!(definite + indefinite, d.levels as i64);
        assert_eq!(
            (summary.page_euler_char + summary.page_boundary as i64).rem_euclid(2),
            0
        );
    }
}
