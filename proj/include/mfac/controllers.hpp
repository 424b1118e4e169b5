#pragma once

#include <span>
#include <stdexcept>

#include "mfac/edlm.hpp"
#include "mfac/polynomial.hpp"

namespace mfac {

/// The instantaneous input coefficient is too close to zero to invert.
/// The caller decides the fallback.
struct GainSingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Variant {
    basic,
    lambda_weighted,
    stochastic,
    poly_cost,
    measured_disturbance,
    mvc_baseline,
};

struct ControllerConfig {
    Orders orders;
    double lambda = 0.0;           // scalar weight of the lambda controller
    Polynomial p_poly{1.0};        // output costing, constant term must be 1
    Polynomial r_poly{1.0};        // set-point costing
    Polynomial lambda_poly{0.0};   // input costing Lambda = [lambda0, lambda1, ...]
    Polynomial s_poly{0.0};        // measured-disturbance costing
    bool design_s_online = false;  // recompute s_poly from phi each step
    int s_max_degree = 8;
    Variant variant = Variant::basic;
    double epsilon_gain = 1e-8;

    void validate() const;
};

/// Window of desired outputs, newest first: at(0) = y*(k+1),
/// at(i) = y*(k+1-i). Missing entries read as zero.
struct RefWindow {
    std::span<const double> newest_first;
    double at(std::size_t i) const {
        return i < newest_first.size() ? newest_first[i] : 0.0;
    }
};

// All control laws return the increment du(k); histories are read with the
// convention that the y channel is current through y(k), the u channel
// through u(k-1), the v channel through v(k-1) and the w channel through
// w_hat(k).

/// Exact one-step inversion of the EDLM.
double mfac_basic(const PGVector& phi, const HistoryBuffer& h,
                  double y_star_next, double epsilon_gain = 1e-8);

/// Same bracket scaled by g/(lambda + g^2); the minimizer of the
/// lambda-weighted one-step cost.
double mfac_lambda(const PGVector& phi, const HistoryBuffer& h,
                   double y_star_next, double lambda,
                   double epsilon_gain = 1e-8);

/// Stochastic-disturbance controller; leaves tracking error equal to the
/// innovation increment under the exact model.
double gmfac_stochastic(const PGVector& phi, const HistoryBuffer& h,
                        const RefWindow& y_star, double epsilon_gain = 1e-8);

/// Polynomial-cost controller with output/set-point/input costing and
/// noise-lag elimination through the Diophantine identity.
double gmfac_poly(const PGVector& phi, const ControllerConfig& cfg,
                  const HistoryBuffer& h, const RefWindow& y_star);

/// gmfac_poly plus feedforward of the measured disturbance v.
double gmfac_measured(const PGVector& phi, const ControllerConfig& cfg,
                      const HistoryBuffer& h, const RefWindow& y_star,
                      double v_now);

struct SDesign {
    Polynomial s;
    double residual;  // max coefficient norm left uncancelled
};

/// Feedforward costing polynomial: truncated series solution of
/// (lambda0/g) Lambda phi_v (1 - z^-1) = phi_u S, with the residual of the
/// truncation reported alongside.
SDesign design_s(const ControllerConfig& cfg, const PGVector& phi,
                 int max_degree);

/// Closed-loop characteristic polynomial of the lambda controller:
/// T = lambda (1 - z^-1)(1 - z^-1 phi_y) + g phi_u.
Polynomial char_poly_basic(const PGVector& phi, double lambda);

/// Characteristic polynomial of the polynomial-cost controller:
/// T3 = (1 - z^-1 phi_y)(lambda0/g) Lambda (1 - z^-1) + P phi_u.
Polynomial char_poly_general(const PGVector& phi, const ControllerConfig& cfg);

/// One-step minimum-variance law in absolute form, sharing the MFAC
/// parameterization: u(k) = [y*(k+1) - phi_y-terms - tail B-terms] / g.
double mvc_baseline(const PGVector& phi, const HistoryBuffer& h,
                    double y_star_next, double epsilon_gain = 1e-8);

/// History depth sufficient for every lag the configured laws can touch.
int required_history_depth(const ControllerConfig& cfg);

}  // namespace mfac
