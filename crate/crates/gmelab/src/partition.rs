//! Parties, particles, groupings, and the convex sets the projection
//! optimizes over.
//!
//! A [`PartySpec`] fixes which particles belong to which party and whether
//! "local" means per-party or per-particle. The same density matrix can be
//! analyzed under either reading by switching the grouping mode; everything
//! downstream (bipartitions, trial sampling, witnesses) is expressed in terms
//! of the groups the active mode induces.
//!
//! Particle ordering is canonical and party-major: all particles of the first
//! party, then the second, and so on (A₁A₂B₁B₂C₁C₂). Every reindexing is an
//! explicit slot map `perm[old_slot] = new_slot`.

use crate::error::{Error, Result};
use crate::operator::MAX_DIM;

/// Whether locality cuts run between parties or between individual particles.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Grouping {
    PerParty,
    PerParticle,
}

/// Parties, their particles, local dimensions, and the active grouping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartySpec {
    parties: Vec<String>,
    particles_per_party: Vec<usize>,
    /// Local dimension of every particle, flat in canonical order.
    particle_dims: Vec<usize>,
    grouping: Grouping,
}

impl PartySpec {
    pub fn new(
        parties: Vec<String>,
        particles_per_party: Vec<usize>,
        particle_dims: Vec<usize>,
        grouping: Grouping,
    ) -> Result<Self> {
        if parties.is_empty() || parties.len() != particles_per_party.len() {
            return Err(Error::DimMismatch {
                left: parties.len(),
                right: particles_per_party.len(),
            });
        }
        let total: usize = particles_per_party.iter().sum();
        if total != particle_dims.len() || particle_dims.iter().any(|&d| d < 2) {
            return Err(Error::DimMismatch {
                left: total,
                right: particle_dims.len(),
            });
        }
        let dim: usize = particle_dims.iter().product();
        if dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim });
        }
        for (i, p) in parties.iter().enumerate() {
            if p.is_empty() || parties[..i].contains(p) {
                return Err(Error::UnknownLabel(p.clone()));
            }
        }
        Ok(Self {
            parties,
            particles_per_party,
            particle_dims,
            grouping,
        })
    }

    /// Qubit parties labeled A, B, C, ... with the given particle counts.
    pub fn qubit_parties(particles_per_party: &[usize], grouping: Grouping) -> Result<Self> {
        let parties: Vec<String> = (0..particles_per_party.len())
            .map(party_letter)
            .collect();
        let total: usize = particles_per_party.iter().sum();
        Self::new(
            parties,
            particles_per_party.to_vec(),
            vec![2; total],
            grouping,
        )
    }

    /// n single-qubit parties, grouped per party.
    pub fn single_qubits(n: usize) -> Result<Self> {
        Self::qubit_parties(&vec![1; n], Grouping::PerParty)
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn particles_per_party(&self) -> &[usize] {
        &self.particles_per_party
    }

    pub fn particle_dims(&self) -> &[usize] {
        &self.particle_dims
    }

    pub fn grouping(&self) -> Grouping {
        self.grouping
    }

    pub fn with_grouping(&self, grouping: Grouping) -> Self {
        let mut out = self.clone();
        out.grouping = grouping;
        out
    }

    pub fn total_dim(&self) -> usize {
        self.particle_dims.iter().product()
    }

    pub fn particle_count(&self) -> usize {
        self.particle_dims.len()
    }

    /// First particle slot of each party.
    fn party_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.parties.len());
        let mut acc = 0;
        for &k in &self.particles_per_party {
            offsets.push(acc);
            acc += k;
        }
        offsets
    }

    /// Label of one particle slot: the party letter, with a 1-based index
    /// appended when the party holds more than one particle (A, B1, B2, C).
    pub fn particle_label(&self, slot: usize) -> String {
        let offsets = self.party_offsets();
        for (p, &off) in offsets.iter().enumerate() {
            let k = self.particles_per_party[p];
            if slot < off + k {
                return if k == 1 {
                    self.parties[p].clone()
                } else {
                    format!("{}{}", self.parties[p], slot - off + 1)
                };
            }
        }
        unreachable!("slot within particle count")
    }

    /// Number of groups under the active grouping.
    pub fn group_count(&self) -> usize {
        match self.grouping {
            Grouping::PerParty => self.parties.len(),
            Grouping::PerParticle => self.particle_count(),
        }
    }

    /// Group labels in canonical order.
    pub fn group_labels(&self) -> Vec<String> {
        match self.grouping {
            Grouping::PerParty => self.parties.clone(),
            Grouping::PerParticle => (0..self.particle_count())
                .map(|s| self.particle_label(s))
                .collect(),
        }
    }

    /// Particle slots of one group.
    pub fn group_slots(&self, group: usize) -> Vec<usize> {
        match self.grouping {
            Grouping::PerParty => {
                let off = self.party_offsets()[group];
                (off..off + self.particles_per_party[group]).collect()
            }
            Grouping::PerParticle => vec![group],
        }
    }

    /// Hilbert dimension of one group.
    pub fn group_dim(&self, group: usize) -> usize {
        self.group_slots(group)
            .iter()
            .map(|&s| self.particle_dims[s])
            .product()
    }

    pub fn group_dims(&self) -> Vec<usize> {
        (0..self.group_count()).map(|g| self.group_dim(g)).collect()
    }

    fn group_index(&self, label: &str) -> Result<usize> {
        self.group_labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

pub(crate) fn party_letter(i: usize) -> String {
    // A..Z, then A1, B1, ... for pathological party counts.
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{}{}", letter, i / 26)
    }
}

/// One bipartition of the groups, stored canonically: `side_a` contains the
/// lexicographically first group label, so A|BCD and BCD|A are the same value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bipartition {
    side_a: Vec<String>,
    side_b: Vec<String>,
}

impl Bipartition {
    /// Builds and canonicalizes a bipartition from one side; the other side
    /// is the complement within the spec's groups.
    pub fn from_side(side: &[String], spec: &PartySpec) -> Result<Self> {
        let labels = spec.group_labels();
        let mut in_side = vec![false; labels.len()];
        for l in side {
            let idx = spec.group_index(l)?;
            if in_side[idx] {
                return Err(Error::InvalidCut(format!("duplicate label `{l}`")));
            }
            in_side[idx] = true;
        }
        let a: Vec<String> = labels
            .iter()
            .zip(&in_side)
            .filter(|(_, &s)| s)
            .map(|(l, _)| l.clone())
            .collect();
        let b: Vec<String> = labels
            .iter()
            .zip(&in_side)
            .filter(|(_, &s)| !s)
            .map(|(l, _)| l.clone())
            .collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidCut(
                "both sides of a cut must be nonempty".into(),
            ));
        }
        let min_label = labels.iter().min().expect("nonempty groups");
        let (side_a, side_b) = if a.contains(min_label) { (a, b) } else { (b, a) };
        Ok(Self { side_a, side_b })
    }

    /// Parses strings like `A|BCD` or `AB1|B2C`; labels are an uppercase
    /// letter with an optional particle index.
    pub fn parse(text: &str, spec: &PartySpec) -> Result<Self> {
        let (left, right) = text
            .split_once('|')
            .ok_or_else(|| Error::InvalidCut(format!("missing `|` in `{text}`")))?;
        let left_labels = tokenize_labels(left)?;
        let right_labels = tokenize_labels(right)?;
        let mut all: Vec<String> = left_labels
            .iter()
            .chain(right_labels.iter())
            .cloned()
            .collect();
        all.sort();
        let mut expected = spec.group_labels();
        expected.sort();
        if all != expected {
            return Err(Error::InvalidCut(format!(
                "`{text}` does not split the groups into two complementary sides"
            )));
        }
        Self::from_side(&left_labels, spec)
    }

    pub fn side_a(&self) -> &[String] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[String] {
        &self.side_b
    }

    /// The smaller side (ties: the canonical side with the first label).
    fn minor_side(&self) -> &[String] {
        if self.side_b.len() < self.side_a.len() {
            &self.side_b
        } else {
            &self.side_a
        }
    }

    fn major_side(&self) -> &[String] {
        if self.side_b.len() < self.side_a.len() {
            &self.side_a
        } else {
            &self.side_b
        }
    }

    /// Sort key giving the conventional listing order: one-vs-rest cuts
    /// first (by label), then balanced cuts.
    pub(crate) fn order_key(&self) -> (usize, String, String) {
        (
            self.minor_side().len(),
            self.minor_side().join(","),
            self.major_side().join(","),
        )
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}|{}",
            self.minor_side().concat(),
            self.major_side().concat()
        )
    }
}

fn tokenize_labels(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_ascii_uppercase() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            current.push(ch);
        } else if ch.is_ascii_digit() && !current.is_empty() {
            current.push(ch);
        } else if ch == ',' || ch.is_whitespace() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            return Err(Error::InvalidCut(format!("unexpected character `{ch}`")));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    if out.is_empty() {
        return Err(Error::InvalidCut("empty side".into()));
    }
    Ok(out)
}

/// The convex set being tested.
#[derive(Clone, PartialEq, Debug)]
pub enum SeparabilityClass {
    /// Mixtures of pure states that are products across every group.
    FullySeparable,
    /// Mixtures of pure states that are products across one fixed cut.
    SingleCut(Bipartition),
    /// Mixtures of pure biproduct states over all cuts.
    Biseparable,
}

impl SeparabilityClass {
    pub fn label(&self) -> String {
        match self {
            SeparabilityClass::FullySeparable => "separable".into(),
            SeparabilityClass::SingleCut(cut) => format!("cut:{cut}"),
            SeparabilityClass::Biseparable => "biseparable".into(),
        }
    }
}

/// All bipartitions of the groups, canonical and duplicate-free, in
/// deterministic order (one-vs-rest cuts by label, then balanced cuts).
/// Count is 2^(n-1) - 1 for n groups.
pub fn enumerate_bipartitions(spec: &PartySpec) -> Result<Vec<Bipartition>> {
    let labels = spec.group_labels();
    let n = labels.len();
    if n < 2 {
        return Err(Error::SingleGroup);
    }
    let anchor = labels
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty groups");
    let mut cuts = Vec::with_capacity((1usize << (n - 1)) - 1);
    let others: Vec<usize> = (0..n).filter(|&i| i != anchor).collect();
    for mask in 0..(1u32 << (n - 1)) {
        let mut side: Vec<String> = vec![labels[anchor].clone()];
        for (bit, &idx) in others.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                side.push(labels[idx].clone());
            }
        }
        if side.len() == n {
            continue; // full set is not a cut
        }
        cuts.push(Bipartition::from_side(&side, spec)?);
    }
    cuts.sort_by_key(|c| c.order_key());
    Ok(cuts)
}

/// Dimensions of the two sides of a cut plus the particle slot map that
/// brings canonical ordering to (side_a particles, side_b particles);
/// `perm[old_slot] = new_slot`.
pub fn cut_factor_dims(cut: &Bipartition, spec: &PartySpec) -> Result<(usize, usize, Vec<usize>)> {
    let mut a_slots = Vec::new();
    for label in cut.side_a() {
        let g = spec.group_index(label)?;
        a_slots.extend(spec.group_slots(g));
    }
    let mut b_slots = Vec::new();
    for label in cut.side_b() {
        let g = spec.group_index(label)?;
        b_slots.extend(spec.group_slots(g));
    }
    a_slots.sort_unstable();
    b_slots.sort_unstable();
    let dim_a: usize = a_slots.iter().map(|&s| spec.particle_dims()[s]).product();
    let dim_b: usize = b_slots.iter().map(|&s| spec.particle_dims()[s]).product();
    let mut perm = vec![0usize; spec.particle_count()];
    for (new, &old) in a_slots.iter().chain(b_slots.iter()).enumerate() {
        perm[old] = new;
    }
    Ok((dim_a, dim_b, perm))
}

/// Slot map taking copy-major ordering (A₁B₁C₁A₂B₂C₂) to party-major
/// canonical ordering (A₁A₂B₁B₂C₁C₂); `perm[old_slot] = new_slot`.
pub fn regroup_permutation(spec_single: &PartySpec, copies: usize) -> Result<Vec<usize>> {
    if copies < 1 {
        return Err(Error::ParamOutOfRange {
            name: "copies",
            value: copies as f64,
        });
    }
    let per_copy = spec_single.particle_count();
    let offsets = spec_single.party_offsets();
    let mut perm = vec![0usize; per_copy * copies];
    for c in 0..copies {
        for (p, &off) in offsets.iter().enumerate() {
            let k = spec_single.particles_per_party()[p];
            for q in 0..k {
                perm[c * per_copy + off + q] = copies * off + c * k + q;
            }
        }
    }
    Ok(perm)
}

/// The spec for `copies` merged copies: same parties, particle lists
/// replicated, canonical party-major ordering.
pub fn replicated_spec(spec_single: &PartySpec, copies: usize) -> Result<PartySpec> {
    let offsets = spec_single.party_offsets();
    let mut dims = Vec::with_capacity(spec_single.particle_count() * copies);
    for (p, &off) in offsets.iter().enumerate() {
        let k = spec_single.particles_per_party()[p];
        for _ in 0..copies {
            dims.extend_from_slice(&spec_single.particle_dims()[off..off + k]);
        }
    }
    PartySpec::new(
        spec_single.parties().to_vec(),
        spec_single
            .particles_per_party()
            .iter()
            .map(|&k| k * copies)
            .collect(),
        dims,
        spec_single.grouping(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hs_distance, permute_matrix};
    use crate::test_support::{assert_close, random_density, rng};

    fn phi4_spec(grouping: Grouping) -> PartySpec {
        PartySpec::qubit_parties(&[1, 2, 1], grouping).unwrap()
    }

    #[test]
    fn enumerate_three_parties() {
        let spec = PartySpec::single_qubits(3).unwrap();
        let cuts = enumerate_bipartitions(&spec).unwrap();
        let shown: Vec<String> = cuts.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, vec!["A|BC", "B|AC", "C|AB"]);
    }

    #[test]
    fn enumerate_four_parties_matches_class_table_order() {
        let spec = PartySpec::single_qubits(4).unwrap();
        let cuts = enumerate_bipartitions(&spec).unwrap();
        let shown: Vec<String> = cuts.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            shown,
            vec!["A|BCD", "B|ACD", "C|ABD", "D|ABC", "AB|CD", "AC|BD", "AD|BC"]
        );
    }

    #[test]
    fn enumerate_two_parties() {
        let spec = PartySpec::single_qubits(2).unwrap();
        let cuts = enumerate_bipartitions(&spec).unwrap();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].to_string(), "A|B");
    }

    #[test]
    fn enumerate_counts() {
        for n in 2..=6 {
            let spec = PartySpec::single_qubits(n).unwrap();
            let cuts = enumerate_bipartitions(&spec).unwrap();
            assert_eq!(cuts.len(), (1 << (n - 1)) - 1);
            // duplicate-free
            for (i, a) in cuts.iter().enumerate() {
                for b in &cuts[i + 1..] {
                    assert_ne!(a, b);
                }
            }
        }
    }

    #[test]
    fn single_group_errors() {
        let spec = PartySpec::single_qubits(1).unwrap();
        assert!(matches!(
            enumerate_bipartitions(&spec),
            Err(Error::SingleGroup)
        ));
    }

    #[test]
    fn cut_dims_per_party() {
        let spec = phi4_spec(Grouping::PerParty);
        let cut = Bipartition::parse("B|AC", &spec).unwrap();
        let (da, db, _) = cut_factor_dims(&cut, &spec).unwrap();
        assert_eq!((da, db), (4, 4));
    }

    #[test]
    fn cut_dims_per_particle() {
        let spec = phi4_spec(Grouping::PerParticle);
        assert_eq!(spec.group_labels(), vec!["A", "B1", "B2", "C"]);
        let cut = Bipartition::parse("AB1|B2C", &spec).unwrap();
        let (da, db, perm) = cut_factor_dims(&cut, &spec).unwrap();
        assert_eq!((da, db), (4, 4));
        assert_eq!(perm, vec![0, 1, 2, 3]); // already contiguous
    }

    #[test]
    fn cut_dims_one_vs_rest() {
        let spec = PartySpec::single_qubits(3).unwrap();
        let cut = Bipartition::parse("A|BC", &spec).unwrap();
        let (da, db, _) = cut_factor_dims(&cut, &spec).unwrap();
        assert_eq!((da, db), (2, 4));
    }

    #[test]
    fn canonical_form_merges_mirror_cuts() {
        let spec = PartySpec::single_qubits(4).unwrap();
        let a = Bipartition::parse("B|ACD", &spec).unwrap();
        let b = Bipartition::parse("ACD|B", &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.side_a().contains(&"A".to_string()));
        assert_eq!(a.to_string(), "B|ACD");
    }

    #[test]
    fn regroup_three_parties_two_copies() {
        let spec = PartySpec::single_qubits(3).unwrap();
        assert_eq!(
            regroup_permutation(&spec, 2).unwrap(),
            vec![0, 2, 4, 1, 3, 5]
        );
    }

    #[test]
    fn regroup_single_party_identity() {
        let spec = PartySpec::single_qubits(1).unwrap();
        assert_eq!(regroup_permutation(&spec, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn regroup_four_parties_two_copies() {
        let spec = PartySpec::single_qubits(4).unwrap();
        assert_eq!(
            regroup_permutation(&spec, 2).unwrap(),
            vec![0, 2, 4, 6, 1, 3, 5, 7]
        );
    }

    #[test]
    fn regroup_two_parties_is_involution() {
        // For two single-particle parties the copy interleave is self-inverse.
        let spec = PartySpec::single_qubits(2).unwrap();
        let perm = regroup_permutation(&spec, 2).unwrap();
        let twice: Vec<usize> = (0..perm.len()).map(|i| perm[perm[i]]).collect();
        assert_eq!(twice, vec![0, 1, 2, 3]);
    }

    #[test]
    fn regroup_preserves_trace_spectrum_purity() {
        let mut r = rng(5);
        let spec = PartySpec::single_qubits(3).unwrap();
        let rho = random_density(&mut r, &[2, 2, 2]);
        let two = rho.tensor(&rho).unwrap();
        let perm = regroup_permutation(&spec, 2).unwrap();
        let merged = two.permute_factors(&perm).unwrap();
        assert_close(merged.matrix().trace().re, 1.0, 1e-13);
        assert_close(merged.purity(), two.purity(), 1e-12);
        let e1 = crate::eigen::eigenvalues(two.matrix()).unwrap();
        let e2 = crate::eigen::eigenvalues(merged.matrix()).unwrap();
        for (a, b) in e1.iter().zip(&e2) {
            assert_close(*a, *b, 1e-10);
        }
    }

    #[test]
    fn cut_permutation_round_trip() {
        let mut r = rng(9);
        let spec = phi4_spec(Grouping::PerParty);
        let rho = random_density(&mut r, &[2, 2, 2, 2]);
        for cut in enumerate_bipartitions(&spec).unwrap() {
            let (_, _, perm) = cut_factor_dims(&cut, &spec).unwrap();
            let (fwd, new_dims) =
                permute_matrix(rho.matrix(), rho.factor_dims(), &perm).unwrap();
            let mut inv = vec![0usize; perm.len()];
            for (old, &new) in perm.iter().enumerate() {
                inv[new] = old;
            }
            let (back, _) = permute_matrix(&fwd, &new_dims, &inv).unwrap();
            assert!(hs_distance(&back, rho.matrix()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn parse_rejects_partial_cover() {
        let spec = PartySpec::single_qubits(4).unwrap();
        assert!(Bipartition::parse("A|BC", &spec).is_err());
        assert!(Bipartition::parse("A|BCDE", &spec).is_err());
        assert!(Bipartition::parse("ABCD|", &spec).is_err());
    }
}
