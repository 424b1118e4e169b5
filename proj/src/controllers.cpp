#include "mfac/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace mfac {

namespace {

// Bracket shared by the basic and lambda laws:
// y*(k+1) - y(k) - sum_i phi_i dy(k-i+1) - sum_{i>=Ly+2} phi_i du(k+Ly-i+1)
double basic_bracket(const PGVector& phi, const HistoryBuffer& h,
                     double y_star_next) {
    const Orders& o = phi.orders();
    double acc = y_star_next - h.y(0);
    for (int i = 1; i <= o.ly; ++i) {
        acc -= phi.at(static_cast<std::size_t>(i - 1)) * h.dy(i - 1);
    }
    for (int j = 2; j <= o.lu; ++j) {
        acc -= phi.at(static_cast<std::size_t>(o.ly + j - 1)) * h.du(j - 2);
    }
    return acc;
}

void check_gain(double g, double epsilon_gain, const char* who) {
    if (std::abs(g) <= epsilon_gain) {
        throw GainSingularError(std::string(who) + ": |phi_{Ly+1}| <= epsilon_gain");
    }
}

}  // namespace

void ControllerConfig::validate() const {
    orders.validate();
    if (lambda < 0.0) {
        throw std::invalid_argument("ControllerConfig: lambda must be >= 0");
    }
    if (std::abs(p_poly.constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument("ControllerConfig: P must have constant term 1");
    }
    if (lambda_poly.constant_term() < 0.0) {
        throw std::invalid_argument("ControllerConfig: lambda0 must be >= 0");
    }
    if (epsilon_gain <= 0.0) {
        throw std::invalid_argument("ControllerConfig: epsilon_gain must be > 0");
    }
}

double mfac_basic(const PGVector& phi, const HistoryBuffer& h,
                  double y_star_next, double epsilon_gain) {
    const double g = phi.input_gain();
    check_gain(g, epsilon_gain, "mfac_basic");
    return basic_bracket(phi, h, y_star_next) / g;
}

double mfac_lambda(const PGVector& phi, const HistoryBuffer& h,
                   double y_star_next, double lambda, double epsilon_gain) {
    if (lambda < 0.0) {
        throw std::invalid_argument("mfac_lambda: lambda must be >= 0");
    }
    const double g = phi.input_gain();
    if (lambda == 0.0) check_gain(g, epsilon_gain, "mfac_lambda");
    return basic_bracket(phi, h, y_star_next) * g / (lambda + g * g);
}

double gmfac_stochastic(const PGVector& phi, const HistoryBuffer& h,
                        const RefWindow& y_star, double epsilon_gain) {
    const Orders& o = phi.orders();
    const double g = phi.input_gain();
    check_gain(g, epsilon_gain, "gmfac_stochastic");

    double acc = y_star.at(0) - h.y(0);
    for (int i = 1; i <= o.lw; ++i) {
        const double cw = phi.at(static_cast<std::size_t>(o.ly + o.lu + o.lv + i - 1));
        acc += cw * (y_star.at(static_cast<std::size_t>(i)) - h.y(i));
        acc -= cw * h.dy(i - 1);
    }
    for (int i = 1; i <= o.ly; ++i) {
        acc -= phi.at(static_cast<std::size_t>(i - 1)) * h.dy(i - 1);
    }
    for (int j = 2; j <= o.lu; ++j) {
        acc -= phi.at(static_cast<std::size_t>(o.ly + j - 1)) * h.du(j - 2);
    }
    return acc / g;
}

namespace {

// Shared core of the polynomial-cost laws. Solves
//   [phi_u + (lambda0/g)(1 + z^-1 phi_w) Lambda] du(k)
//     = (1 + z^-1 phi_w) [R y*(k+1) - P y(k)] - G dy(k) - feedforward(k)
// for du(k), expanding every operator over the buffered past.
double poly_cost_core(const PGVector& phi, const ControllerConfig& cfg,
                      const HistoryBuffer& h, const RefWindow& y_star,
                      bool with_v, double v_now) {
    cfg.validate();
    const double g = phi.input_gain();
    const Polynomial lam = cfg.lambda_poly;
    const double lam0 = lam.constant_term();

    if (!lam.is_zero()) check_gain(g, cfg.epsilon_gain, "gmfac_poly");

    const Polynomial phi_w = phi.phi_w();
    const Polynomial cbar = Polynomial::one() + phi_w.shifted(1);
    Polynomial lhs = phi.phi_u();
    if (!lam.is_zero()) lhs += (lam0 / g) * (cbar * lam);
    if (std::abs(lhs.constant_term()) <= cfg.epsilon_gain) {
        throw GainSingularError("gmfac_poly: instantaneous du coefficient is singular");
    }

    const Polynomial gpoly = diophantine_g(phi_w, phi.phi_y(), cfg.p_poly);

    auto v_at = [&](int lag) { return lag == 0 ? v_now : h.v(lag - 1); };

    double rhs = 0.0;
    for (std::size_t i = 0; i <= cbar.degree(); ++i) {
        const double ci = cbar[i];
        if (ci == 0.0) continue;
        double ry = 0.0;
        for (std::size_t j = 0; j <= cfg.r_poly.degree(); ++j) {
            ry += cfg.r_poly[j] * y_star.at(i + j);
        }
        double py = 0.0;
        for (std::size_t j = 0; j <= cfg.p_poly.degree(); ++j) {
            py += cfg.p_poly[j] * h.y(static_cast<int>(i + j));
        }
        rhs += ci * (ry - py);
        if (with_v) {
            double sv = 0.0;
            for (std::size_t j = 0; j <= cfg.s_poly.degree(); ++j) {
                sv += cfg.s_poly[j] * v_at(static_cast<int>(i + j));
            }
            rhs -= ci * sv;
        }
    }
    for (std::size_t j = 0; j <= gpoly.degree(); ++j) {
        rhs -= gpoly[j] * h.dy(static_cast<int>(j));
    }
    if (with_v) {
        const Polynomial phi_v = phi.phi_v();
        for (std::size_t j = 0; j <= phi_v.degree(); ++j) {
            const double dv = (j == 0) ? v_now - h.v(0) : h.dv(static_cast<int>(j) - 1);
            rhs -= phi_v[j] * dv;
        }
    }

    double past = 0.0;
    for (std::size_t j = 1; j <= lhs.degree(); ++j) {
        past += lhs[j] * h.du(static_cast<int>(j) - 1);
    }
    return (rhs - past) / lhs.constant_term();
}

}  // namespace

double gmfac_poly(const PGVector& phi, const ControllerConfig& cfg,
                  const HistoryBuffer& h, const RefWindow& y_star) {
    return poly_cost_core(phi, cfg, h, y_star, /*with_v=*/false, 0.0);
}

double gmfac_measured(const PGVector& phi, const ControllerConfig& cfg,
                      const HistoryBuffer& h, const RefWindow& y_star,
                      double v_now) {
    return poly_cost_core(phi, cfg, h, y_star, /*with_v=*/true, v_now);
}

SDesign design_s(const ControllerConfig& cfg, const PGVector& phi,
                 int max_degree) {
    const Polynomial phi_v = phi.phi_v();
    const Polynomial lam = cfg.lambda_poly;
    if (lam.is_zero() || phi_v.is_zero()) return {Polynomial::zero(), 0.0};
    const double g = phi.input_gain();
    if (g == 0.0) {
        throw std::invalid_argument("design_s: phi_{Ly+1} must be nonzero");
    }
    const Polynomial num =
        (lam.constant_term() / g) * lam * phi_v * Polynomial{1.0, -1.0};
    const SeriesDivision div = divide_series(num, phi.phi_u(), max_degree);
    return {div.quotient, div.residual_norm};
}

Polynomial char_poly_basic(const PGVector& phi, double lambda) {
    const Polynomial one_minus = Polynomial{1.0, -1.0};
    const Polynomial ay = Polynomial::one() - phi.phi_y().shifted(1);
    return lambda * (one_minus * ay) + phi.input_gain() * phi.phi_u();
}

Polynomial char_poly_general(const PGVector& phi, const ControllerConfig& cfg) {
    const Polynomial lam = cfg.lambda_poly;
    Polynomial t3 = cfg.p_poly * phi.phi_u();
    if (!lam.is_zero()) {
        const double g = phi.input_gain();
        check_gain(g, cfg.epsilon_gain, "char_poly_general");
        const Polynomial ay = Polynomial::one() - phi.phi_y().shifted(1);
        t3 += ay * ((lam.constant_term() / g) * lam) * Polynomial{1.0, -1.0};
    }
    return t3;
}

double mvc_baseline(const PGVector& phi, const HistoryBuffer& h,
                    double y_star_next, double epsilon_gain) {
    const Orders& o = phi.orders();
    const double g = phi.input_gain();
    check_gain(g, epsilon_gain, "mvc_baseline");
    double acc = y_star_next;
    for (int i = 1; i <= o.ly; ++i) {
        acc -= phi.at(static_cast<std::size_t>(i - 1)) * h.y(i - 1);
    }
    for (int j = 2; j <= o.lu; ++j) {
        acc -= phi.at(static_cast<std::size_t>(o.ly + j - 1)) * h.u(j - 2);
    }
    return acc / g;
}

int required_history_depth(const ControllerConfig& cfg) {
    const Orders& o = cfg.orders;
    const int degs = static_cast<int>(cfg.p_poly.degree() + cfg.r_poly.degree() +
                                      cfg.lambda_poly.degree()) +
                     std::max<int>(static_cast<int>(cfg.s_poly.degree()),
                                   cfg.s_max_degree);
    return 8 + o.ly + o.lu + o.lv + 2 * o.lw + degs;
}

}  // namespace mfac
