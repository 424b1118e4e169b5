#include "mfac/estimators.hpp"

#include <cmath>

namespace mfac {

namespace {

Eigen::VectorXd to_vec(std::span<const double> s) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

}  // namespace

ProjectionState projection_update(const ProjectionState& s,
                                  std::span<const double> delta_h_prev,
                                  double delta_y_now) {
    if (delta_h_prev.size() != s.phi_hat.size()) {
        throw std::invalid_argument("projection_update: dimension mismatch");
    }
    if (s.mu <= 0.0) {
        throw std::invalid_argument("projection_update: mu must be positive");
    }
    double norm2 = 0.0;
    double pred = 0.0;
    for (std::size_t i = 0; i < delta_h_prev.size(); ++i) {
        norm2 += delta_h_prev[i] * delta_h_prev[i];
        pred += s.phi_hat.at(i) * delta_h_prev[i];
    }
    const double step = s.eta * (delta_y_now - pred) / (s.mu + norm2);
    std::vector<double> phi = s.phi_hat.values();
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += step * delta_h_prev[i];
    return {PGVector(s.phi_hat.orders(), std::move(phi), s.phi_hat.bound_b()),
            s.eta, s.mu};
}

RLSState make_rls_state(PGVector phi0, double p0, double forgetting) {
    const auto n = static_cast<Eigen::Index>(phi0.size());
    return {std::move(phi0), Eigen::MatrixXd::Identity(n, n) * p0, forgetting};
}

RLSState rls_update(const RLSState& s, std::span<const double> delta_h_prev,
                    double delta_y_now) {
    if (delta_h_prev.size() != s.phi_hat.size()) {
        throw std::invalid_argument("rls_update: dimension mismatch");
    }
    if (s.forgetting <= 0.0 || s.forgetting > 1.0) {
        throw std::invalid_argument("rls_update: forgetting must be in (0, 1]");
    }
    const Eigen::VectorXd reg = to_vec(delta_h_prev);
    const Eigen::VectorXd p_reg = s.covariance * reg;
    const double denom = s.forgetting + reg.dot(p_reg);
    if (!std::isfinite(denom) || denom <= 0.0) {
        throw CovarianceBreakdownError("rls_update: covariance lost positive-definiteness");
    }
    const Eigen::VectorXd gain = p_reg / denom;

    double pred = 0.0;
    for (std::size_t i = 0; i < delta_h_prev.size(); ++i) {
        pred += s.phi_hat.at(i) * delta_h_prev[i];
    }
    const double err = delta_y_now - pred;

    std::vector<double> phi = s.phi_hat.values();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        phi[i] += gain(static_cast<Eigen::Index>(i)) * err;
    }

    Eigen::MatrixXd cov =
        (s.covariance - gain * p_reg.transpose()) / s.forgetting;
    cov = 0.5 * (cov + cov.transpose());  // re-symmetrize

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double min_eig = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, cov.trace());
    if (!(min_eig > -1e-10 * scale)) {  // also catches NaN
        throw CovarianceBreakdownError("rls_update: covariance lost positive-definiteness");
    }

    return {PGVector(s.phi_hat.orders(), std::move(phi), s.phi_hat.bound_b()),
            std::move(cov), s.forgetting};
}

double estimate_disturbance(const PGVector& phi_hat,
                            std::span<const double> delta_h_prev,
                            double delta_y_now, double w_hat_prev) {
    double pred = 0.0;
    const std::size_t n = std::min(delta_h_prev.size(), phi_hat.size());
    for (std::size_t i = 0; i < n; ++i) pred += phi_hat.at(i) * delta_h_prev[i];
    return w_hat_prev + (delta_y_now - pred);
}

}  // namespace mfac
