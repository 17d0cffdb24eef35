#include "teachrisk/worldview.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace teachrisk {

Worldview::Worldview(Eigen::MatrixXd matrix) : m_(std::move(matrix)) {
    if (m_.cols() < 1) throw std::invalid_argument("worldview: k must be at least 1");
    if (!m_.allFinite()) throw std::invalid_argument("worldview: entries must be finite");
}

Worldview Worldview::with_row(const Eigen::VectorXd& f) const {
    if (f.size() != m_.cols())
        throw std::invalid_argument("worldview: appended row has wrong dimension");
    Eigen::MatrixXd next(m_.rows() + 1, m_.cols());
    next.topRows(m_.rows()) = m_;
    next.row(m_.rows()) = f.transpose();
    return Worldview(std::move(next));
}

SvdFactors SvdFactors::compute(const Eigen::MatrixXd& a) {
    const auto rows = a.rows();
    const auto cols = a.cols();
    SvdFactors f;
    if (rows == 0) {
        // Everything is kernel; any orthonormal right basis will do.
        f.left_vectors = Eigen::MatrixXd(0, 0);
        f.singular_values = Eigen::VectorXd(0);
        f.right_vectors = Eigen::MatrixXd::Identity(cols, cols);
        f.numerical_rank = 0;
        f.rank_tolerance = 0.0;
        return f;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    f.left_vectors = svd.matrixU();
    f.singular_values = svd.singularValues();
    f.right_vectors = svd.matrixV();

    const double sigma_max = f.singular_values.size() ? f.singular_values[0] : 0.0;
    f.rank_tolerance = static_cast<double>(std::max(rows, cols)) *
                       std::numeric_limits<double>::epsilon() * sigma_max;
    f.numerical_rank = 0;
    for (int i = 0; i < f.singular_values.size(); ++i)
        if (f.singular_values[i] > f.rank_tolerance) ++f.numerical_rank;
    return f;
}

RewardWeights::RewardWeights(Eigen::VectorXd w) : w_star(std::move(w)) {
    if (w_star.size() < 1) throw std::invalid_argument("reward weights: empty vector");
    if (!w_star.allFinite()) throw std::invalid_argument("reward weights: non-finite entry");
    if (std::abs(w_star.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("reward weights: must be a unit vector");
}

RewardWeights RewardWeights::normalized(const Eigen::VectorXd& v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("reward weights: cannot normalize zero");
    return RewardWeights(v / norm);
}

Eigen::VectorXd rowspace_projection(const Worldview& a, const Eigen::VectorXd& v) {
    if (v.size() != a.feature_dim())
        throw std::invalid_argument("projection: vector dimension mismatch");
    const SvdFactors f = SvdFactors::compute(a.matrix());
    const auto basis = f.row_space_basis();
    return basis * (basis.transpose() * v);
}

Eigen::VectorXd kernel_projection(const Worldview& a, const Eigen::VectorXd& v) {
    return v - rowspace_projection(a, v);
}

double teaching_risk(const Worldview& a, const RewardWeights& w) {
    const double rho = kernel_projection(a, w.w_star).norm();
    return std::clamp(rho, 0.0, 1.0);
}

std::optional<double> sigma_min_nonzero(const Worldview& a) {
    const SvdFactors f = SvdFactors::compute(a.matrix());
    if (f.numerical_rank == 0) return std::nullopt;
    return f.singular_values[f.numerical_rank - 1];
}

double spectral_norm(const Worldview& a) {
    const SvdFactors f = SvdFactors::compute(a.matrix());
    return f.singular_values.size() ? f.singular_values[0] : 0.0;
}

Eigen::MatrixXd pseudoinverse(const Worldview& a) {
    const SvdFactors f = SvdFactors::compute(a.matrix());
    const int k = a.feature_dim();
    const int l = a.view_dim();
    Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(k, l);
    for (int i = 0; i < f.numerical_rank; ++i)
        pinv += (1.0 / f.singular_values[i]) * f.right_vectors.col(i) *
                f.left_vectors.col(i).transpose();
    return pinv;
}

std::optional<Eigen::VectorXd> learner_reward_vector(const Worldview& a,
                                                     const RewardWeights& w) {
    if (teaching_risk(a, w) >= 1.0 - 1e-9) return std::nullopt;
    const Eigen::VectorXd xw = pseudoinverse(a).transpose() * w.w_star;
    const double norm = xw.norm();
    if (!(norm > 0.0)) return std::nullopt;
    return xw / norm;
}

double theorem1_bound(double epsilon, double sigma, double rho, double diam) {
    if (epsilon < 0.0 || sigma <= 0.0 || diam < 0.0)
        throw std::invalid_argument("theorem1_bound: bad arguments");
    return epsilon / sigma + rho * diam;
}

double theorem2_bound(double diam, double a_norm, double rho) {
    if (diam < 0.0 || a_norm < 0.0 || rho < 0.0)
        throw std::invalid_argument("theorem2_bound: bad arguments");
    if (rho >= 1.0 - 1e-9) return std::numeric_limits<double>::infinity();
    return diam * a_norm * rho / std::sqrt(1.0 - rho * rho);
}

}  // namespace teachrisk
