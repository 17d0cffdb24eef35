#pragma once

#include <optional>

#include <Eigen/Dense>

namespace teachrisk {

/// The learner's worldview: an l x k matrix mapping true features to the
/// features the learner observes. Value semantics; teaching a feature f
/// produces a new worldview with f appended as a row.
class Worldview {
  public:
    /// l x k matrix; l may be 0 (the learner sees nothing, everything is in
    /// the kernel).
    explicit Worldview(Eigen::MatrixXd matrix);

    static Worldview empty(int k) { return Worldview(Eigen::MatrixXd(0, k)); }
    static Worldview identity(int k) {
        return Worldview(Eigen::MatrixXd::Identity(k, k));
    }

    Worldview with_row(const Eigen::VectorXd& f) const;

    const Eigen::MatrixXd& matrix() const { return m_; }
    int view_dim() const { return static_cast<int>(m_.rows()); }   // l
    int feature_dim() const { return static_cast<int>(m_.cols()); }  // k

  private:
    Eigen::MatrixXd m_;
};

/// Thresholded SVD of a worldview matrix. Singular values at or below
/// rank_tolerance = max(l,k) * machine_eps * sigma_max count as zero; the
/// first numerical_rank columns of right_vectors span the row space, the rest
/// span the kernel.
struct SvdFactors {
    Eigen::MatrixXd left_vectors;     // l x min(l,k)
    Eigen::VectorXd singular_values;  // min(l,k), non-increasing
    Eigen::MatrixXd right_vectors;    // k x k (full), row space first
    int numerical_rank = 0;
    double rank_tolerance = 0.0;

    static SvdFactors compute(const Eigen::MatrixXd& a);

    Eigen::Ref<const Eigen::MatrixXd> row_space_basis() const {
        return right_vectors.leftCols(numerical_rank);
    }
    Eigen::Ref<const Eigen::MatrixXd> kernel_basis() const {
        return right_vectors.rightCols(right_vectors.cols() - numerical_rank);
    }
};

/// Unit reward direction w_star in R^k.
struct RewardWeights {
    Eigen::VectorXd w_star;

    /// Validates ||w|| = 1 within 1e-9.
    explicit RewardWeights(Eigen::VectorXd w);

    /// Scales an arbitrary nonzero vector to unit norm.
    static RewardWeights normalized(const Eigen::VectorXd& v);
};

/// Orthogonal projection of v onto ker A. pr(v) = (I - V_r V_r^T) v at
/// numerical rank; the complement rowspace_projection(v) = v - pr(v).
Eigen::VectorXd kernel_projection(const Worldview& a, const Eigen::VectorXd& v);
Eigen::VectorXd rowspace_projection(const Worldview& a, const Eigen::VectorXd& v);

/// Teaching risk rho(A; w) = ||pr(w)|| = max over unit kernel vectors v of
/// <w, v>: 0 when the worldview already exposes the reward direction, 1 when
/// the reward direction is invisible. Always in [0, 1].
double teaching_risk(const Worldview& a, const RewardWeights& w);

/// Smallest singular value above the rank tolerance: the minimal stretching of
/// vectors orthogonal to the kernel. nullopt for numerical rank 0 (callers
/// report the associated performance bound as infinite).
std::optional<double> sigma_min_nonzero(const Worldview& a);

/// Largest singular value (0 for an empty or zero matrix).
double spectral_norm(const Worldview& a);

/// Moore-Penrose pseudoinverse (k x l) via thresholded SVD. The zero matrix
/// maps to the zero matrix.
Eigen::MatrixXd pseudoinverse(const Worldview& a);

/// The learner-space reward direction X w / ||X w|| with X = (A^+)^T: the
/// direction under which a truly optimal policy looks near-optimal when the
/// teaching risk is small. nullopt when rho(A; w) = 1 within 1e-9 (the
/// direction is undefined).
std::optional<Eigen::VectorXd> learner_reward_vector(const Worldview& a,
                                                     const RewardWeights& w);

/// Performance-gap bound for a learner that matched view features to within
/// epsilon: epsilon / sigma + rho * diam.
double theorem1_bound(double epsilon, double sigma, double rho, double diam);

/// Bound on the view-space suboptimality of a truly optimal policy:
/// diam * ||A|| * rho / sqrt(1 - rho^2). Returns +infinity once rho is within
/// 1e-9 of 1.
double theorem2_bound(double diam, double a_norm, double rho);

}  // namespace teachrisk
