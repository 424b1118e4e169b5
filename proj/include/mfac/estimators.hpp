#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>

#include "mfac/edlm.hpp"

namespace mfac {

struct CovarianceBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Projection-algorithm state. eta is the step gain, mu > 0 regularizes the
/// denominator. No component of phi_hat is ever reset or sign-clamped.
struct ProjectionState {
    PGVector phi_hat;
    double eta = 1.0;
    double mu = 1.0;
};

/// phi(k) = phi(k-1) + eta dH (dy - phi^T dH) / (mu + ||dH||^2).
ProjectionState projection_update(const ProjectionState& s,
                                  std::span<const double> delta_h_prev,
                                  double delta_y_now);

/// Recursive-least-squares state. The covariance stays symmetric
/// positive-definite; rls_update throws CovarianceBreakdownError when it
/// does not.
struct RLSState {
    PGVector phi_hat;
    Eigen::MatrixXd covariance;
    double forgetting = 1.0;
};

RLSState make_rls_state(PGVector phi0, double p0, double forgetting = 1.0);

RLSState rls_update(const RLSState& s, std::span<const double> delta_h_prev,
                    double delta_y_now);

/// Posterior-residual disturbance level:
/// w(k) = w(k-1) + (dy(k) - phi^T dH(k-1)), with phi the prior estimate.
double estimate_disturbance(const PGVector& phi_hat,
                            std::span<const double> delta_h_prev,
                            double delta_y_now, double w_hat_prev);

}  // namespace mfac
