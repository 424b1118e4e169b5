#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "mfac/controllers.hpp"

using namespace mfac;

namespace {

struct Instance {
    PGVector phi;
    HistoryBuffer h;
    std::vector<double> ref;
};

Instance random_instance(std::mt19937& rng, const Orders& o,
                         bool zero_w_segment = false) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> vals(static_cast<std::size_t>(o.total()));
    for (double& v : vals) v = coef(rng);
    double& g = vals[static_cast<std::size_t>(o.ly)];
    if (std::abs(g) < 0.3) g = g < 0 ? g - 0.3 : g + 0.3;
    if (zero_w_segment) {
        for (int i = 0; i < o.lw; ++i) {
            vals[static_cast<std::size_t>(o.ly + o.lu + o.lv + i)] = 0.0;
        }
    }
    Instance inst{PGVector(o, std::move(vals)), HistoryBuffer(64), {}};
    std::uniform_real_distribution<double> sig(-3.0, 3.0);
    for (int i = 0; i < 12; ++i) {
        inst.h.push_y(sig(rng));
        inst.h.push_u(sig(rng));
        inst.h.push_v(sig(rng));
        inst.h.push_w(sig(rng) * 0.2);
    }
    inst.ref.resize(8);
    for (double& r : inst.ref) r = sig(rng);
    return inst;
}

// scalar minimizer: golden section over an expanding bracket, then one
// parabolic vertex step through well-separated samples (the cost is smooth,
// so the vertex nails the flat bottom the section search cannot resolve)
double golden_minimize(const std::function<double(double)>& f) {
    double a = -1.0, b = 1.0;
    for (int grow = 0; grow < 200; ++grow) {
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        if (fm <= fa && fm <= fb) break;
        a *= 2.0;
        b *= 2.0;
    }
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    for (int it = 0; it < 60; ++it) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    const double x0 = 0.5 * (a + b);
    const double step = std::max(0.5, 1e-3 * std::abs(x0));
    const double f0 = f(x0 - step), f1 = f(x0), f2 = f(x0 + step);
    const double denom = f0 - 2.0 * f1 + f2;
    if (denom <= 0.0) return x0;
    return x0 + step * (f0 - f2) / (2.0 * denom);
}

}  // namespace

TEST_SUITE("controllers") {

TEST_CASE("mfac_basic: unit gain, hand case, singular gain") {
    HistoryBuffer h(16);
    PGVector unit({1, 1, 0, 0}, {0.0, 1.0});
    CHECK(mfac_basic(unit, h, 1.0) == doctest::Approx(1.0));

    PGVector regime2({1, 2, 0, 0}, {-0.4, -0.5, -0.2});
    CHECK(mfac_basic(regime2, h, 5.0) == doctest::Approx(-10.0));

    PGVector singular({1, 1, 0, 0}, {0.3, 0.0});
    CHECK_THROWS_AS(mfac_basic(singular, h, 1.0), GainSingularError);
}

TEST_CASE("mfac_basic is dead-beat on the exact EDLM") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> sig(-5.0, 5.0);
    std::uniform_real_distribution<double> root(-0.7, 0.7);
    for (int it = 0; it < 20; ++it) {
        Instance inst = random_instance(rng, {2, 2, 0, 0});
        // keep the inverted input polynomial minimum-phase, otherwise the
        // exact inversion is internally unstable and u overflows
        std::vector<double> vals = inst.phi.values();
        const double g = vals[2];
        vals[3] = -g * root(rng);
        inst.phi = PGVector(inst.phi.orders(), vals);
        HistoryBuffer h(64);
        double max_err = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double target = sig(rng);
            const double du = mfac_basic(inst.phi, h, target);
            h.push_u(h.u(0) + du);
            const auto dh = build_delta_h(h, inst.phi.orders());
            const double y_next = h.y(0) + predict_delta_y(inst.phi, dh, 0.0);
            h.push_y(y_next);
            max_err = std::max(max_err, std::abs(y_next - target));
        }
        CHECK(max_err <= 1e-10);
    }
}

TEST_CASE("mfac_lambda: reduction at lambda 0, damping, singular case") {
    std::mt19937 rng(12);
    for (int it = 0; it < 100; ++it) {
        Instance inst = random_instance(rng, {1, 2, 0, 0});
        const double target = 2.0;
        CHECK(mfac_lambda(inst.phi, inst.h, target, 0.0) ==
              doctest::Approx(mfac_basic(inst.phi, inst.h, target)).epsilon(1e-12));
        double prev = std::abs(mfac_lambda(inst.phi, inst.h, target, 0.0));
        for (double lam : {0.1, 1.0, 10.0, 100.0}) {
            const double mag = std::abs(mfac_lambda(inst.phi, inst.h, target, lam));
            CHECK(mag <= prev + 1e-15);
            prev = mag;
        }
    }
    HistoryBuffer h(16);
    PGVector zero_gain({1, 1, 0, 0}, {0.3, 0.0});
    CHECK_THROWS_AS(mfac_lambda(zero_gain, h, 1.0, 0.0), GainSingularError);
    CHECK_NOTHROW(mfac_lambda(zero_gain, h, 1.0, 0.5));
    CHECK_THROWS_AS(mfac_lambda(zero_gain, h, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("mfac_lambda matches a golden-section minimizer of the one-step cost") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> lam_d(0.01, 2.0);
    std::uniform_real_distribution<double> sig(-4.0, 4.0);
    for (int it = 0; it < 200; ++it) {
        Instance inst = random_instance(rng, {2, 2, 0, 0});
        const double lam = lam_d(rng);
        const double target = sig(rng);
        const double du = mfac_lambda(inst.phi, inst.h, target, lam);

        const auto& phi = inst.phi;
        const auto& h = inst.h;
        auto cost = [&](double x) {
            // y(k+1) as a function of du via the EDLM
            double y_next = h.y(0) + phi.input_gain() * x;
            for (int i = 1; i <= phi.orders().ly; ++i) {
                y_next += phi.at(static_cast<std::size_t>(i - 1)) * h.dy(i - 1);
            }
            for (int j = 2; j <= phi.orders().lu; ++j) {
                y_next += phi.at(static_cast<std::size_t>(phi.orders().ly + j - 1)) *
                          h.du(j - 2);
            }
            const double err = target - y_next;
            return err * err + lam * x * x;
        };
        const double du_oracle = golden_minimize(cost);
        CHECK(du == doctest::Approx(du_oracle).epsilon(1e-8));
    }
}

TEST_CASE("gmfac_stochastic: hand case and reduction to the basic law") {
    SUBCASE("hand case with a single noise lag") {
        HistoryBuffer h(16);
        for (int i = 0; i < 6; ++i) {
            h.push_y(1.0);  // flat
            h.push_u(0.5);
            h.push_w(0.0);
        }
        PGVector phi({1, 1, 0, 1}, {0.0, 1.0, 0.5});
        const std::vector<double> ref{2.0, 2.0};  // y_d - y == 1 at both lags
        CHECK(gmfac_stochastic(phi, h, RefWindow{ref}) == doctest::Approx(1.5));
    }
    SUBCASE("zero noise segment reduces to the basic law") {
        std::mt19937 rng(14);
        for (int it = 0; it < 100; ++it) {
            Instance inst = random_instance(rng, {2, 2, 0, 2}, true);
            const double du_s =
                gmfac_stochastic(inst.phi, inst.h, RefWindow{inst.ref});
            const double du_b = mfac_basic(inst.phi, inst.h, inst.ref[0]);
            CHECK(du_s == doctest::Approx(du_b).epsilon(1e-12));
        }
    }
}

TEST_CASE("gmfac_poly degenerations") {
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> lam_d(0.05, 1.5);

    SUBCASE("P=1, R=1, Lambda=0, phi_w=0 reduces to the basic law") {
        for (int it = 0; it < 100; ++it) {
            Instance inst = random_instance(rng, {2, 2, 0, 1}, true);
            ControllerConfig cfg;
            cfg.orders = inst.phi.orders();
            cfg.lambda_poly = Polynomial::zero();
            const double du_p = gmfac_poly(inst.phi, cfg, inst.h, RefWindow{inst.ref});
            const double du_b = mfac_basic(inst.phi, inst.h, inst.ref[0]);
            CHECK(du_p == doctest::Approx(du_b).epsilon(1e-12));
        }
    }
    SUBCASE("P=1, R=1, phi_w=0, Lambda=sqrt(lambda) reduces to the lambda law") {
        for (int it = 0; it < 100; ++it) {
            Instance inst = random_instance(rng, {2, 2, 0, 1}, true);
            const double lam = lam_d(rng);
            ControllerConfig cfg;
            cfg.orders = inst.phi.orders();
            cfg.lambda_poly = Polynomial{std::sqrt(lam)};
            const double du_p = gmfac_poly(inst.phi, cfg, inst.h, RefWindow{inst.ref});
            const double du_l = mfac_lambda(inst.phi, inst.h, inst.ref[0], lam);
            CHECK(du_p == doctest::Approx(du_l).epsilon(1e-12));
        }
    }
    SUBCASE("P=1, R=1, Lambda=0 equals the stochastic law for any phi_w") {
        for (int it = 0; it < 100; ++it) {
            Instance inst = random_instance(rng, {2, 2, 0, 2});
            ControllerConfig cfg;
            cfg.orders = inst.phi.orders();
            cfg.lambda_poly = Polynomial::zero();
            const double du_p = gmfac_poly(inst.phi, cfg, inst.h, RefWindow{inst.ref});
            const double du_s =
                gmfac_stochastic(inst.phi, inst.h, RefWindow{inst.ref});
            CHECK(du_p == doctest::Approx(du_s).epsilon(1e-12));
        }
    }
    SUBCASE("singular instantaneous coefficient is reported") {
        Instance inst = random_instance(rng, {1, 1, 0, 0});
        std::vector<double> vals = inst.phi.values();
        vals[1] = 1e-12;
        PGVector tiny(inst.phi.orders(), vals);
        ControllerConfig cfg;
        cfg.orders = tiny.orders();
        cfg.lambda_poly = Polynomial::zero();
        CHECK_THROWS_AS(gmfac_poly(tiny, cfg, inst.h, RefWindow{inst.ref}),
                        GainSingularError);
    }
}

TEST_CASE("gmfac_measured: reduction and feedforward hand case") {
    std::mt19937 rng(16);
    SUBCASE("S=0 and zero phi_v reduce to gmfac_poly") {
        for (int it = 0; it < 100; ++it) {
            Instance inst = random_instance(rng, {2, 2, 2, 1});
            std::vector<double> vals = inst.phi.values();
            vals[4] = vals[5] = 0.0;  // v segment
            PGVector phi(inst.phi.orders(), vals);
            ControllerConfig cfg;
            cfg.orders = phi.orders();
            cfg.lambda_poly = Polynomial{0.7, 0.1};
            const double du_m =
                gmfac_measured(phi, cfg, inst.h, RefWindow{inst.ref}, 1.7);
            const double du_p = gmfac_poly(phi, cfg, inst.h, RefWindow{inst.ref});
            CHECK(du_m == doctest::Approx(du_p).epsilon(1e-12));
        }
    }
    SUBCASE("a v step shifts the output by -dv/g") {
        HistoryBuffer h(16);  // flat zero histories
        PGVector phi({1, 1, 1, 0}, {0.0, 2.0, 1.0});
        ControllerConfig cfg;
        cfg.orders = phi.orders();
        cfg.lambda_poly = Polynomial::zero();
        const std::vector<double> ref{1.0};
        const double du_p = gmfac_poly(phi, cfg, h, RefWindow{ref});
        const double du_m = gmfac_measured(phi, cfg, h, RefWindow{ref}, 1.0);
        CHECK(du_m - du_p == doctest::Approx(-1.0 / 2.0));
    }
}

TEST_CASE("design_s: trivial zeros and exact division") {
    ControllerConfig cfg;
    cfg.orders = {1, 1, 1, 0};
    SUBCASE("zero phi_v") {
        cfg.lambda_poly = Polynomial{1.0};
        PGVector phi({1, 1, 1, 0}, {0.0, 1.0, 0.0});
        const SDesign d = design_s(cfg, phi, 8);
        CHECK(d.s.is_zero());
        CHECK(d.residual == 0.0);
    }
    SUBCASE("zero Lambda") {
        cfg.lambda_poly = Polynomial::zero();
        PGVector phi({1, 1, 1, 0}, {0.0, 1.0, 1.0});
        const SDesign d = design_s(cfg, phi, 8);
        CHECK(d.s.is_zero());
        CHECK(d.residual == 0.0);
    }
    SUBCASE("unit case divides exactly") {
        cfg.lambda_poly = Polynomial{1.0};
        PGVector phi({1, 1, 1, 0}, {0.0, 1.0, 1.0});
        const SDesign d = design_s(cfg, phi, 8);
        CHECK(d.s[0] == doctest::Approx(1.0));
        CHECK(d.s[1] == doctest::Approx(-1.0));
        CHECK(d.s.degree() == 1);
        CHECK(d.residual == doctest::Approx(0.0));
    }
}

TEST_CASE("characteristic polynomials") {
    SUBCASE("lambda = 0 keeps only the input part") {
        PGVector phi({1, 2, 0, 0}, {-0.4, -0.5, -0.2});
        const Polynomial t = char_poly_basic(phi, 0.0);
        CHECK(t[0] == doctest::Approx(0.25));
        CHECK(t[1] == doctest::Approx(0.10));
    }
    SUBCASE("hand expansion with the switching-plant coefficients") {
        PGVector phi({1, 2, 0, 0}, {-0.4, -0.5, -0.2});
        const Polynomial t = char_poly_basic(phi, 0.2);
        CHECK(t[0] == doctest::Approx(0.45));
        CHECK(t[1] == doctest::Approx(-0.02));
        CHECK(t[2] == doctest::Approx(-0.08));
    }
    SUBCASE("general form: Lambda = 0 gives P * phi_u") {
        PGVector phi({1, 2, 0, 1}, {-0.4, -0.5, -0.2, 0.3});
        ControllerConfig cfg;
        cfg.orders = phi.orders();
        cfg.lambda_poly = Polynomial::zero();
        cfg.p_poly = Polynomial{1.0, 0.1};
        const Polynomial t3 = char_poly_general(phi, cfg);
        const Polynomial expect = cfg.p_poly * phi.phi_u();
        for (std::size_t i = 0; i <= expect.degree(); ++i) {
            CHECK(t3[i] == doctest::Approx(expect[i]));
        }
    }
    SUBCASE("general form reduces to T at unit gain") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> lam_d(0.05, 1.0);
        for (int it = 0; it < 50; ++it) {
            Instance inst = random_instance(rng, {2, 2, 0, 0});
            std::vector<double> vals = inst.phi.values();
            vals[2] = 1.0;  // unit input gain
            PGVector phi(inst.phi.orders(), vals);
            const double lam = lam_d(rng);
            ControllerConfig cfg;
            cfg.orders = phi.orders();
            cfg.lambda_poly = Polynomial{std::sqrt(lam)};
            const Polynomial t3 = char_poly_general(phi, cfg);
            const Polynomial t = char_poly_basic(phi, lam);
            for (std::size_t i = 0; i <= std::max(t.degree(), t3.degree()); ++i) {
                CHECK(t3[i] == doctest::Approx(t[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("mvc baseline: static plant and singular gain") {
    HistoryBuffer h(16);
    PGVector phi({1, 1, 0, 0}, {0.0, 4.0});
    CHECK(mvc_baseline(phi, h, 1.0) == doctest::Approx(0.25));
    PGVector bad({1, 1, 0, 0}, {0.0, 0.0});
    CHECK_THROWS_AS(mvc_baseline(bad, h, 1.0), GainSingularError);
}

}  // TEST_SUITE
