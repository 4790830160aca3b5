//! Distribution-generation protocols and correlation/communication
//! complexity.
//!
//! Two parties produce a target joint distribution either from a shared
//! random seed, from a one-way message, or from a combination of both.
//! Simulation is exact sum-product propagation, not sampling. The minimum
//! seed and message sizes are both governed by the nonnegative rank of the
//! target, which is what [`correlation_complexity`] reports in bits.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{AxisSpec, JointDistribution, NORMALIZATION_TOL};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rank::{nonnegative_rank, LatentDecomposition, RankBounds, RankConfig};

fn check_distribution(values: &[f64], tol: f64) -> Result<()> {
    for (index, v) in values.iter().enumerate() {
        if *v < 0.0 {
            return Err(Error::NegativeEntry { index });
        }
    }
    let sum: f64 = values.iter().sum();
    if libm::fabs(sum - 1.0) > tol {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

fn check_rows(rows: &Mat<f64>, tol: f64) -> Result<()> {
    for r in 0..rows.rows() {
        check_distribution(rows.row(r), tol)?;
    }
    Ok(())
}

/// Shared-seed protocol: a third party deals `z` to both sides, Alice
/// emits `x ~ P(x|z)`, Bob emits `y ~ P(y|z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedProtocol {
    pub seed_dist: Vec<f64>,
    /// Row `z`: distribution of X given the seed value.
    pub alice_encoder: Mat<f64>,
    /// Row `z`: distribution of Y given the seed value.
    pub bob_encoder: Mat<f64>,
}

impl SeedProtocol {
    pub fn new(seed_dist: Vec<f64>, alice_encoder: Mat<f64>, bob_encoder: Mat<f64>) -> Result<Self> {
        check_distribution(&seed_dist, NORMALIZATION_TOL)?;
        if alice_encoder.rows() != seed_dist.len() || bob_encoder.rows() != seed_dist.len() {
            return Err(Error::ShapeMismatch {
                expected: seed_dist.len(),
                got: alice_encoder.rows(),
            });
        }
        check_rows(&alice_encoder, NORMALIZATION_TOL)?;
        check_rows(&bob_encoder, NORMALIZATION_TOL)?;
        Ok(SeedProtocol { seed_dist, alice_encoder, bob_encoder })
    }

    pub fn seed_cardinality(&self) -> usize {
        self.seed_dist.len()
    }
}

/// One-way message protocol: Alice draws `x`, sends `m ~ P(m|x)`, Bob
/// emits `y ~ P(y|m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageProtocol {
    pub alice_dist: Vec<f64>,
    /// Row `x`: distribution of the message given Alice's output.
    pub message_channel: Mat<f64>,
    /// Row `m`: distribution of Y given the message.
    pub bob_decoder: Mat<f64>,
}

impl MessageProtocol {
    pub fn new(alice_dist: Vec<f64>, message_channel: Mat<f64>, bob_decoder: Mat<f64>) -> Result<Self> {
        check_distribution(&alice_dist, NORMALIZATION_TOL)?;
        if message_channel.rows() != alice_dist.len() {
            return Err(Error::ShapeMismatch {
                expected: alice_dist.len(),
                got: message_channel.rows(),
            });
        }
        if bob_decoder.rows() != message_channel.cols() {
            return Err(Error::ShapeMismatch {
                expected: message_channel.cols(),
                got: bob_decoder.rows(),
            });
        }
        check_rows(&message_channel, NORMALIZATION_TOL)?;
        check_rows(&bob_decoder, NORMALIZATION_TOL)?;
        Ok(MessageProtocol { alice_dist, message_channel, bob_decoder })
    }

    pub fn message_cardinality(&self) -> usize {
        self.message_channel.cols()
    }
}

/// Seed-and-message protocol: both sides share `z1`, Alice additionally
/// sends `z2 ~ P(z2|x, z1)`, Bob emits `y ~ P(y|z1, z2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridProtocol {
    pub seed_dist: Vec<f64>,
    /// Row `z1`: distribution of X.
    pub alice_encoder: Mat<f64>,
    /// `message_channel[z1]` row `x`: distribution of the message Z2.
    pub message_channel: Vec<Mat<f64>>,
    /// `bob_decoder[z1]` row `z2`: distribution of Y.
    pub bob_decoder: Vec<Mat<f64>>,
}

impl HybridProtocol {
    pub fn new(
        seed_dist: Vec<f64>,
        alice_encoder: Mat<f64>,
        message_channel: Vec<Mat<f64>>,
        bob_decoder: Vec<Mat<f64>>,
    ) -> Result<Self> {
        check_distribution(&seed_dist, NORMALIZATION_TOL)?;
        let z1 = seed_dist.len();
        if alice_encoder.rows() != z1 || message_channel.len() != z1 || bob_decoder.len() != z1 {
            return Err(Error::ShapeMismatch { expected: z1, got: alice_encoder.rows() });
        }
        check_rows(&alice_encoder, NORMALIZATION_TOL)?;
        let x_card = alice_encoder.cols();
        let z2 = message_channel.first().map_or(0, Mat::cols);
        for channel in &message_channel {
            if channel.rows() != x_card || channel.cols() != z2 {
                return Err(Error::ShapeMismatch { expected: x_card * z2, got: channel.rows() * channel.cols() });
            }
            check_rows(channel, NORMALIZATION_TOL)?;
        }
        for decoder in &bob_decoder {
            if decoder.rows() != z2 {
                return Err(Error::ShapeMismatch { expected: z2, got: decoder.rows() });
            }
            check_rows(decoder, NORMALIZATION_TOL)?;
        }
        Ok(HybridProtocol { seed_dist, alice_encoder, message_channel, bob_decoder })
    }

    pub fn seed_cardinality(&self) -> usize {
        self.seed_dist.len()
    }

    pub fn message_cardinality(&self) -> usize {
        self.message_channel.first().map_or(0, Mat::cols)
    }
}

fn joint_from_matrix(matrix: Mat<f64>) -> JointDistribution<f64> {
    JointDistribution::from_matrix(
        AxisSpec::new("X", matrix.rows()),
        AxisSpec::new("Y", matrix.cols()),
        &matrix,
        NORMALIZATION_TOL,
    )
    .expect("normalized protocol components compose to a distribution")
}

/// `P(x,y) = Σ_z P(z) P(x|z) P(y|z)`.
pub fn simulate_seed_protocol(p: &SeedProtocol) -> JointDistribution<f64> {
    let (x_card, y_card) = (p.alice_encoder.cols(), p.bob_encoder.cols());
    let mut out = Mat::fill(x_card, y_card, 0.0);
    for (z, &pz) in p.seed_dist.iter().enumerate() {
        for x in 0..x_card {
            for y in 0..y_card {
                *out.at_mut(x, y) += pz * p.alice_encoder.at(z, x) * p.bob_encoder.at(z, y);
            }
        }
    }
    joint_from_matrix(out)
}

/// `P(x,y) = P(x) Σ_m P(m|x) P(y|m)`.
pub fn simulate_message_protocol(p: &MessageProtocol) -> JointDistribution<f64> {
    let (x_card, m_card) = (p.alice_dist.len(), p.message_cardinality());
    let y_card = p.bob_decoder.cols();
    let mut out = Mat::fill(x_card, y_card, 0.0);
    for x in 0..x_card {
        for m in 0..m_card {
            let w = p.alice_dist[x] * p.message_channel.at(x, m);
            for y in 0..y_card {
                *out.at_mut(x, y) += w * p.bob_decoder.at(m, y);
            }
        }
    }
    joint_from_matrix(out)
}

/// `P(x,y) = Σ_{z1,z2} P(z1) P(x|z1) P(z2|x,z1) P(y|z1,z2)`.
pub fn simulate_hybrid_protocol(p: &HybridProtocol) -> JointDistribution<f64> {
    let x_card = p.alice_encoder.cols();
    let y_card = p.bob_decoder.first().map_or(0, Mat::cols);
    let mut out = Mat::fill(x_card, y_card, 0.0);
    for (z1, &pz1) in p.seed_dist.iter().enumerate() {
        for x in 0..x_card {
            let px = pz1 * p.alice_encoder.at(z1, x);
            for z2 in 0..p.message_cardinality() {
                let w = px * p.message_channel[z1].at(x, z2);
                for y in 0..y_card {
                    *out.at_mut(x, y) += w * p.bob_decoder[z1].at(z2, y);
                }
            }
        }
    }
    joint_from_matrix(out)
}

/// Every seed protocol is a message protocol of the same width: marginalize
/// Alice's side into `P(x)` and let the message carry the posterior of the
/// seed. Rows at `P(x) = 0` get a uniform message; they carry no mass.
pub fn seed_to_message(p: &SeedProtocol) -> MessageProtocol {
    let z_card = p.seed_cardinality();
    let x_card = p.alice_encoder.cols();
    let mut alice = vec![0.0; x_card];
    for z in 0..z_card {
        for x in 0..x_card {
            alice[x] += p.seed_dist[z] * p.alice_encoder.at(z, x);
        }
    }
    let mut channel = Mat::fill(x_card, z_card, 0.0);
    for x in 0..x_card {
        if alice[x] == 0.0 {
            for z in 0..z_card {
                *channel.at_mut(x, z) = 1.0 / z_card as f64;
            }
            continue;
        }
        for z in 0..z_card {
            *channel.at_mut(x, z) = p.seed_dist[z] * p.alice_encoder.at(z, x) / alice[x];
        }
    }
    MessageProtocol { alice_dist: alice, message_channel: channel, bob_decoder: p.bob_encoder.clone() }
}

/// A certified-exact latent decomposition is directly a seed protocol.
/// The seed weights carry the factorization's residual, so they are
/// rescaled to sum to one; the perturbation is within that residual.
pub fn latent_to_seed_protocol(dec: &LatentDecomposition) -> Result<SeedProtocol> {
    let total: f64 = dec.p_z.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroMassComponent);
    }
    SeedProtocol::new(
        dec.p_z.iter().map(|p| p / total).collect(),
        Mat::from_rows(&dec.cond_x)?,
        Mat::from_rows(&dec.cond_y)?,
    )
}

/// Randomized correlation and communication complexity in bits. The two
/// are one quantity: both equal log₂ of the nonnegative rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub rank_bounds: RankBounds,
    /// `[log₂ lower, log₂ upper]`.
    pub rcorr_bits: (f64, f64),
    pub rcomm_bits: (f64, f64),
    pub exact: bool,
}

/// Bits of shared randomness (equivalently, communication) needed to
/// generate the distribution, as an interval when the rank is an interval.
pub fn correlation_complexity<T: crate::scalar::Scalar>(
    dist: &JointDistribution<T>,
    config: &RankConfig,
) -> Result<ComplexityReport> {
    let matrix = dist.as_matrix()?;
    let bounds = nonnegative_rank(&matrix, config);
    let bits = (libm::log2(bounds.lower as f64), libm::log2(bounds.upper as f64));
    Ok(ComplexityReport {
        exact: bounds.exact,
        rcorr_bits: bits,
        rcomm_bits: bits,
        rank_bounds: bounds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffReport {
    pub satisfiable: bool,
    pub budget: u64,
    pub required_lower_bound: usize,
    /// `budget - required_lower_bound`, negative when violated.
    pub margin: i64,
    pub message: String,
}

/// Checks the seed/communication trade-off: a seed of size `card_z1` plus
/// a message of size `card_z2` can only generate distributions whose
/// nonnegative rank is at most `card_z1 × card_z2`.
pub fn tradeoff_check<T: crate::scalar::Scalar>(
    card_z1: u64,
    card_z2: u64,
    dist: &JointDistribution<T>,
    config: &RankConfig,
) -> Result<TradeoffReport> {
    let matrix = dist.as_matrix()?;
    let bounds = nonnegative_rank(&matrix, config);
    let budget = card_z1 * card_z2;
    let satisfiable = budget >= bounds.lower as u64;
    let margin = budget as i64 - bounds.lower as i64;
    let message = if satisfiable {
        alloc::format!(
            "|Z1| x |Z2| = {budget} covers the certified rank lower bound {}",
            bounds.lower
        )
    } else {
        alloc::format!(
            "|Z1| x |Z2| = {budget} is below the certified rank lower bound {}: \
             no such protocol exists",
            bounds.lower
        )
    };
    Ok(TradeoffReport {
        satisfiable,
        budget,
        required_lower_bound: bounds.lower,
        margin,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::AxisSpec;
    use crate::scalar::{Rational, Scalar};

    fn uniform_rows(rows: usize, cols: usize) -> Mat<f64> {
        Mat::fill(rows, cols, 1.0 / cols as f64)
    }

    #[test]
    fn trivial_seed_is_product() {
        let p = SeedProtocol::new(
            vec![1.0],
            Mat::from_rows(&[vec![0.3, 0.7]]).unwrap(),
            Mat::from_rows(&[vec![0.25, 0.25, 0.5]]).unwrap(),
        )
        .unwrap();
        let joint = simulate_seed_protocol(&p);
        let expected = Mat::outer(&[0.3, 0.7], &[0.25, 0.25, 0.5]);
        assert!(joint.as_matrix().unwrap().sub(&expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn copy_seed_is_perfect_correlation() {
        let n = 3;
        let mut copy = Mat::fill(n, n, 0.0);
        for i in 0..n {
            *copy.at_mut(i, i) = 1.0;
        }
        let p = SeedProtocol::new(vec![1.0 / n as f64; n], copy.clone(), copy).unwrap();
        let joint = simulate_seed_protocol(&p);
        for x in 0..n {
            for y in 0..n {
                let expected = if x == y { 1.0 / n as f64 } else { 0.0 };
                assert!((joint.prob(&[x, y]) - expected).abs() < 1e-15);
            }
        }
        // Diagonal support: rank equals the seed size.
        let bounds = nonnegative_rank(&joint.as_matrix().unwrap(), &RankConfig::default());
        assert_eq!((bounds.lower, bounds.upper), (n, n));
    }

    #[test]
    fn trivial_message_is_product() {
        let p = MessageProtocol::new(
            vec![0.6, 0.4],
            uniform_rows(2, 1),
            Mat::from_rows(&[vec![0.2, 0.8]]).unwrap(),
        )
        .unwrap();
        let joint = simulate_message_protocol(&p);
        let expected = Mat::outer(&[0.6, 0.4], &[0.2, 0.8]);
        assert!(joint.as_matrix().unwrap().sub(&expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn copy_message_is_perfect_correlation() {
        let n = 2;
        let mut copy = Mat::fill(n, n, 0.0);
        for i in 0..n {
            *copy.at_mut(i, i) = 1.0;
        }
        let p = MessageProtocol::new(vec![0.5, 0.5], copy.clone(), copy).unwrap();
        let joint = simulate_message_protocol(&p);
        assert_eq!(joint.values(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn hybrid_degenerate_cases() {
        // |Z2| = 1 reduces to the seed protocol.
        let seed = SeedProtocol::new(
            vec![0.25, 0.75],
            Mat::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap(),
            Mat::from_rows(&[vec![0.5, 0.5], vec![0.7, 0.3]]).unwrap(),
        )
        .unwrap();
        let hybrid = HybridProtocol::new(
            seed.seed_dist.clone(),
            seed.alice_encoder.clone(),
            vec![uniform_rows(2, 1); 2],
            vec![
                Mat::from_rows(&[vec![0.5, 0.5]]).unwrap(),
                Mat::from_rows(&[vec![0.7, 0.3]]).unwrap(),
            ],
        )
        .unwrap();
        let a = simulate_seed_protocol(&seed);
        let b = simulate_hybrid_protocol(&hybrid);
        assert!(a.as_matrix().unwrap().sub(&b.as_matrix().unwrap()).frobenius_norm() < 1e-15);

        // |Z1| = 1 reduces to the message protocol.
        let message = MessageProtocol::new(
            vec![0.3, 0.7],
            Mat::from_rows(&[vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap(),
            Mat::from_rows(&[vec![0.8, 0.2], vec![0.35, 0.65]]).unwrap(),
        )
        .unwrap();
        let hybrid = HybridProtocol::new(
            vec![1.0],
            Mat::from_rows(&[vec![0.3, 0.7]]).unwrap(),
            vec![message.message_channel.clone()],
            vec![message.bob_decoder.clone()],
        )
        .unwrap();
        let a = simulate_message_protocol(&message);
        let b = simulate_hybrid_protocol(&hybrid);
        assert!(a.as_matrix().unwrap().sub(&b.as_matrix().unwrap()).frobenius_norm() < 1e-15);

        // |Z1| = |Z2| = 1: product distribution.
        let hybrid = HybridProtocol::new(
            vec![1.0],
            Mat::from_rows(&[vec![0.4, 0.6]]).unwrap(),
            vec![uniform_rows(2, 1)],
            vec![Mat::from_rows(&[vec![0.9, 0.1]]).unwrap()],
        )
        .unwrap();
        let joint = simulate_hybrid_protocol(&hybrid);
        let expected = Mat::outer(&[0.4, 0.6], &[0.9, 0.1]);
        assert!(joint.as_matrix().unwrap().sub(&expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn hybrid_saturates_the_tradeoff() {
        // Seed picks the half, message picks within the half: a rank-4
        // diagonal on |X| = |Y| = 4 from |Z1| = |Z2| = 2.
        let half_pick = Mat::from_rows(&[
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
        ])
        .unwrap();
        // Message: z2 = x mod 2, deterministic.
        let channel = Mat::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        // Decoder: y = 2*z1 + z2, deterministic.
        let decoder = |z1: usize| {
            let mut m = Mat::fill(2, 4, 0.0);
            *m.at_mut(0, 2 * z1) = 1.0;
            *m.at_mut(1, 2 * z1 + 1) = 1.0;
            m
        };
        let hybrid = HybridProtocol::new(
            vec![0.5, 0.5],
            half_pick,
            vec![channel.clone(), channel],
            vec![decoder(0), decoder(1)],
        )
        .unwrap();
        let joint = simulate_hybrid_protocol(&hybrid);
        for x in 0..4 {
            for y in 0..4 {
                let expected = if x == y { 0.25 } else { 0.0 };
                assert!((joint.prob(&[x, y]) - expected).abs() < 1e-15);
            }
        }
        let report = tradeoff_check(2, 2, &joint, &RankConfig::default()).unwrap();
        assert!(report.satisfiable);
        assert_eq!(report.required_lower_bound, 4);
        assert_eq!(report.margin, 0);
    }

    #[test]
    fn seed_message_duality() {
        let seed = SeedProtocol::new(
            vec![0.2, 0.5, 0.3],
            Mat::from_rows(&[
                vec![0.7, 0.3],
                vec![0.1, 0.9],
                vec![0.5, 0.5],
            ])
            .unwrap(),
            Mat::from_rows(&[
                vec![0.25, 0.75],
                vec![0.6, 0.4],
                vec![0.35, 0.65],
            ])
            .unwrap(),
        )
        .unwrap();
        let message = seed_to_message(&seed);
        assert_eq!(message.message_cardinality(), seed.seed_cardinality());
        let a = simulate_seed_protocol(&seed);
        let b = simulate_message_protocol(&message);
        assert!(a.as_matrix().unwrap().sub(&b.as_matrix().unwrap()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn complexity_of_table1() {
        let z = Rational::from_ratio(0, 1);
        let s = Rational::from_ratio(1, 6);
        let dist = JointDistribution::from_values(
            vec![AxisSpec::new("X", 3), AxisSpec::new("Y", 3)],
            vec![
                z.clone(), s.clone(), s.clone(),
                s.clone(), z.clone(), s.clone(),
                s.clone(), s.clone(), z.clone(),
            ],
            0.0,
        )
        .unwrap();
        let report = correlation_complexity(&dist, &RankConfig::default()).unwrap();
        assert!(report.exact);
        let expected = 3f64.log2();
        assert!((report.rcorr_bits.0 - expected).abs() < 1e-12);
        assert!((report.rcorr_bits.1 - expected).abs() < 1e-12);
        assert_eq!(report.rcorr_bits, report.rcomm_bits);

        let t22 = tradeoff_check(2, 2, &dist, &RankConfig::default()).unwrap();
        assert!(t22.satisfiable);
        let t12 = tradeoff_check(1, 2, &dist, &RankConfig::default()).unwrap();
        assert!(!t12.satisfiable);
        assert_eq!(t12.margin, -1);
        let product = JointDistribution::from_values(
            vec![AxisSpec::new("X", 2), AxisSpec::new("Y", 2)],
            vec![0.25; 4],
            1e-12,
        )
        .unwrap();
        assert!(tradeoff_check(1, 1, &product, &RankConfig::default()).unwrap().satisfiable);
        let zero_bits = correlation_complexity(&product, &RankConfig::default()).unwrap();
        assert_eq!(zero_bits.rcorr_bits, (0.0, 0.0));
    }

    #[test]
    fn width_two_protocols_have_rank_at_most_two() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut random_rows = |rows: usize, cols: usize| {
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen::<f64>() + 0.01).collect();
            let mut m = Mat::new(rows, cols, data).unwrap();
            for r in 0..rows {
                let s: f64 = m.row(r).iter().sum();
                for c in 0..cols {
                    *m.at_mut(r, c) /= s;
                }
            }
            m
        };
        for _ in 0..5 {
            let seed_weights = random_rows(1, 2).row(0).to_vec();
            let p = SeedProtocol::new(
                seed_weights,
                random_rows(2, 3),
                random_rows(2, 3),
            )
            .unwrap();
            let joint = simulate_seed_protocol(&p);
            let bounds =
                nonnegative_rank(&joint.as_matrix().unwrap(), &RankConfig::default());
            assert!(bounds.upper <= 2, "seed width 2 but upper = {}", bounds.upper);
        }
        for _ in 0..5 {
            let alice = random_rows(1, 3).row(0).to_vec();
            let p = MessageProtocol::new(alice, random_rows(3, 2), random_rows(2, 3)).unwrap();
            let joint = simulate_message_protocol(&p);
            let bounds =
                nonnegative_rank(&joint.as_matrix().unwrap(), &RankConfig::default());
            assert!(bounds.upper <= 2, "message width 2 but upper = {}", bounds.upper);
        }
    }

    #[test]
    fn achievability_via_latent_decomposition() {
        // Certified rank-2 distribution -> seed protocol of width 2 that
        // reproduces it.
        let mut m = Mat::outer(&[0.12, 0.28, 0.0], &[0.5, 0.5]);
        m.add_assign(&Mat::outer(&[0.1, 0.1, 0.4], &[0.3, 0.7]));
        let exact = m.map(|v| <Rational as Scalar>::from_f64(*v));
        let bounds = nonnegative_rank(&exact, &RankConfig::default());
        assert!(bounds.upper <= 2);
        let cert = bounds.upper_certificate.clone().unwrap();
        let dec = crate::rank::factorization_to_latent(&cert, 1e-6).unwrap();
        let protocol = latent_to_seed_protocol(&dec).unwrap();
        assert_eq!(protocol.seed_cardinality(), bounds.upper);
        let joint = simulate_seed_protocol(&protocol);
        assert!(joint.as_matrix().unwrap().sub(&m).frobenius_norm() < 1e-8);
    }
}
