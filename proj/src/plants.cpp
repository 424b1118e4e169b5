#include "mfac/plants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfac {

namespace {

// depth that can never truncate a lag of any regime polynomial
int plant_depth(const std::vector<Regime>& regimes, int requested) {
    std::size_t deg = 2;  // nonlinear maps reach two lags back
    for (const auto& r : regimes) {
        if (const auto* lin = std::get_if<LinearRegime>(&r.spec)) {
            deg = std::max({deg, lin->a.degree(), lin->b.degree(),
                            lin->c.degree(), lin->v.degree()});
        }
    }
    return std::max(requested, static_cast<int>(deg) + 8);
}

}  // namespace

PlantModel::PlantModel(std::vector<Regime> regimes, int history_depth)
    : regimes_(std::move(regimes)),
      state_(plant_depth(regimes_, history_depth)) {
    if (regimes_.empty()) {
        throw std::invalid_argument("PlantModel: at least one regime required");
    }
    for (std::size_t i = 1; i < regimes_.size(); ++i) {
        if (regimes_[i].k_end <= regimes_[i - 1].k_end) {
            throw std::invalid_argument("PlantModel: regime ranges must ascend");
        }
    }
}

void PlantModel::reset(const std::vector<double>& initial_y,
                       const std::vector<double>& initial_u) {
    state_ = HistoryBuffer(state_.depth());
    for (double v : initial_y) state_.push_y(v);
    for (double v : initial_u) state_.push_u(v);
}

std::size_t PlantModel::active_regime(int k) const {
    if (k < 1 || k > regimes_.back().k_end) {
        throw std::out_of_range("PlantModel: step outside every regime range");
    }
    for (std::size_t i = 0; i < regimes_.size(); ++i) {
        if (k <= regimes_[i].k_end) return i;
    }
    return regimes_.size() - 1;  // unreachable
}

double PlantModel::step(double u_now, int k, double noise, double v_now) {
    const Regime& regime = regimes_[active_regime(k)];
    state_.push_u(u_now);
    state_.push_w(noise);
    state_.push_v(v_now);

    double y_next = 0.0;
    if (const auto* lin = std::get_if<LinearRegime>(&regime.spec)) {
        for (std::size_t i = 1; i <= lin->a.degree(); ++i) {
            y_next -= lin->a[i] * state_.y(static_cast<int>(i) - 1);
        }
        for (std::size_t j = 0; j <= lin->b.degree(); ++j) {
            y_next += lin->b[j] * state_.u(static_cast<int>(j));
        }
        for (std::size_t j = 0; j <= lin->c.degree(); ++j) {
            y_next += lin->c[j] * state_.w(static_cast<int>(j));
        }
        for (std::size_t j = 0; j <= lin->v.degree(); ++j) {
            y_next += lin->v[j] * state_.v(static_cast<int>(j));
        }
    } else {
        switch (std::get<NonlinearKind>(regime.spec)) {
            case NonlinearKind::cubic_input: {
                const double y0 = state_.y(0), y1 = state_.y(1);
                const double u0 = state_.u(0), u1 = state_.u(1);
                y_next = 0.6 * y0 - 0.1 * y1 + 1.8 * u0 - 1.8 * u0 * u0 +
                         0.6 * u0 * u0 * u0 - 0.15 * u1 + 0.15 * u1 * u1 -
                         0.05 * u1 * u1 * u1;
                y_next += noise + v_now;
                break;
            }
        }
    }
    state_.push_y(y_next);
    return y_next;
}

double reference(const ReferenceSpec& spec, int k) {
    const double r = std::round(static_cast<double>(k) /
                                static_cast<double>(spec.half_period));
    const auto n = static_cast<long long>(r);
    return (n % 2 == 0) ? spec.amplitude : -spec.amplitude;
}

double gaussian_sample(std::mt19937_64& rng) {
    // Box-Muller on 53-bit uniforms; u1 kept away from zero.
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_disturbance(const DisturbanceSpec& spec, int k, std::mt19937_64& rng) {
    switch (spec.kind) {
        case DisturbanceSpec::Kind::none:
            return 0.0;
        case DisturbanceSpec::Kind::white_noise:
            return std::sqrt(spec.variance) * gaussian_sample(rng);
        case DisturbanceSpec::Kind::constant_schedule:
            for (const auto& [k_end, level] : spec.schedule) {
                if (k <= k_end) return level;
            }
            return spec.schedule.empty() ? 0.0 : spec.schedule.back().second;
        case DisturbanceSpec::Kind::sinusoid:
            return spec.amplitude * std::sin(spec.rate * static_cast<double>(k));
    }
    return 0.0;
}

const ControllerConfig& ExperimentPreset::variant_config(const std::string& name) const {
    for (const auto& [n, cfg] : variants) {
        if (n == name) return cfg;
    }
    throw std::invalid_argument("unknown controller variant '" + name +
                                "' for preset " + id);
}

std::vector<std::string> ExperimentPreset::variant_names() const {
    std::vector<std::string> names;
    names.reserve(variants.size());
    for (const auto& [n, cfg] : variants) names.push_back(n);
    return names;
}

namespace {

ExperimentPreset make_ex1() {
    ExperimentPreset p{
        .id = "ex1",
        .plant = PlantModel({
            {350, LinearRegime{.a = {1.0, -0.2, -0.8}, .b = {-0.5, 0.3, 0.2}}},
            {700, LinearRegime{.a = {1.0, 0.4}, .b = {-0.5, -0.2}}},
        }),
        .reference = {5.0, 80},
        .noise = {},
        .vdist = {},
        .controller = {},
        .variants = {},
        .estimator = {.kind = EstimatorChoice::Kind::projection, .eta = 1.0, .mu = 1.0},
        .phi0 = {-0.8, -0.5, -0.2},
        .init_y = {0.0, 0.0, 0.0, 0.5, 0.2},
        .init_u = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
        .horizon = 700,
    };
    ControllerConfig basic;
    basic.orders = {1, 2, 0, 0};
    basic.variant = Variant::basic;
    p.controller = basic;
    ControllerConfig mvc = basic;
    mvc.variant = Variant::mvc_baseline;
    p.variants = {{"basic", basic}, {"mvc", mvc}};
    return p;
}

ExperimentPreset make_ex2(double d1, double d2, const std::string& id) {
    ExperimentPreset p{
        .id = id,
        .plant = PlantModel({
            {350, LinearRegime{.a = {1.0, 0.4}, .b = {-0.5, -0.6}}},
            {700, LinearRegime{.a = {1.0, -0.4}, .b = {0.5, 0.6}}},
        }),
        .reference = {5.0, 80},
        .noise = {.kind = DisturbanceSpec::Kind::constant_schedule,
                  .schedule = {{350, d1}, {700, d2}}},
        .vdist = {},
        .controller = {},
        .variants = {},
        .estimator = {.kind = EstimatorChoice::Kind::projection, .eta = 1.0, .mu = 1.0},
        .phi0 = {-0.1, -0.1, -0.1},
        .init_y = {0.0, 0.0, 0.0, 0.5, 0.2},
        .init_u = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
        .horizon = 700,
    };
    if (d1 == 0.0 && d2 == 0.0) p.noise = {};
    ControllerConfig lam;
    lam.orders = {1, 2, 0, 0};
    lam.lambda = 0.2;
    lam.variant = Variant::lambda_weighted;
    p.controller = lam;
    p.variants = {{"lambda", lam}};
    return p;
}

ExperimentPreset make_ex3() {
    ExperimentPreset p{
        .id = "ex3",
        .plant = PlantModel({
            {400, LinearRegime{.a = {1.0, -1.7, 0.7}, .b = {1.0, 1.4}, .c = {1.0, 0.2}}},
        }),
        .reference = {10.0, 100},
        .noise = {.kind = DisturbanceSpec::Kind::white_noise, .variance = 0.1},
        .vdist = {},
        .controller = {},
        .variants = {},
        .estimator = {.kind = EstimatorChoice::Kind::rls, .p0 = 1e6, .forgetting = 1.0},
        .phi0 = {0.001, 0.001, 0.001, 0.001, 0.001},
        .init_y = {0.0, 0.0, 0.0},
        .init_u = {0.0, 0.0, 0.0, 0.0},
        .horizon = 400,
    };
    ControllerConfig poly;
    poly.orders = {2, 2, 0, 1};
    poly.lambda_poly = Polynomial{0.5, 0.2};
    poly.variant = Variant::poly_cost;
    p.controller = poly;
    // The comparison column: the lambda controller with Lambda = 0.5,
    // i.e. scalar lambda = 0.25.
    ControllerConfig lam;
    lam.orders = {2, 2, 0, 0};
    lam.lambda = 0.25;
    lam.variant = Variant::lambda_weighted;
    p.variants = {{"poly", poly}, {"lambda", lam}};
    return p;
}

ExperimentPreset make_ex4() {
    ExperimentPreset p{
        .id = "ex4",
        .plant = PlantModel({
            {400, LinearRegime{.a = {1.0, -1.7, 0.7},
                               .b = {1.0, 0.2},
                               .c = {1.0},
                               .v = {1.0, 0.4}}},
        }),
        .reference = {10.0, 100},
        .noise = {.kind = DisturbanceSpec::Kind::white_noise, .variance = 0.1},
        .vdist = {.kind = DisturbanceSpec::Kind::sinusoid, .amplitude = 5.0,
                  .rate = 1.0 / 20.0},
        .controller = {},
        .variants = {},
        .estimator = {.kind = EstimatorChoice::Kind::rls, .p0 = 1e6, .forgetting = 1.0},
        .phi0 = {0.001, 0.001, 0.001, 0.001, 0.001, 0.001, 0.001},
        .init_y = {0.0, 0.0, 0.0},
        .init_u = {0.0, 0.0, 0.0, 0.0},
        .horizon = 400,
    };
    ControllerConfig meas;
    meas.orders = {2, 2, 2, 1};
    meas.lambda_poly = Polynomial{0.5, 0.2};
    meas.variant = Variant::measured_disturbance;
    meas.design_s_online = true;
    p.controller = meas;
    // v-ignoring comparison: same costing, no v segment or feedforward.
    ControllerConfig blind;
    blind.orders = {2, 2, 0, 1};
    blind.lambda_poly = Polynomial{0.5, 0.2};
    blind.variant = Variant::poly_cost;
    ControllerConfig lam;
    lam.orders = {2, 2, 0, 0};
    lam.lambda = 0.25;
    lam.variant = Variant::lambda_weighted;
    p.variants = {{"measured", meas}, {"poly", blind}, {"lambda", lam}};
    return p;
}

ExperimentPreset make_nl() {
    ExperimentPreset p{
        .id = "nl",
        .plant = PlantModel({
            {200, NonlinearKind::cubic_input},
            {400, LinearRegime{.a = {1.0, -1.0, -1.0}, .b = {1.0, 1.0}}},
        }),
        .reference = {2.0, 80},
        .noise = {},
        .vdist = {},
        .controller = {},
        .variants = {},
        .estimator = {.kind = EstimatorChoice::Kind::projection, .eta = 1.0, .mu = 1.0},
        .phi0 = {0.1, 0.1, 1.0, 0.1},
        .init_y = {0.0, 0.0},
        .init_u = {0.0, 0.0},
        .horizon = 400,
    };
    ControllerConfig lam;
    lam.orders = {2, 2, 0, 0};
    lam.lambda = 0.5;
    lam.variant = Variant::lambda_weighted;
    p.controller = lam;
    p.variants = {{"lambda", lam}};
    return p;
}

}  // namespace

ExperimentPreset make_example(const std::string& id) {
    if (id == "ex1") return make_ex1();
    if (id == "ex2" || id == "ex2-case1") return make_ex2(1.0, 100.0, "ex2-case1");
    if (id == "ex2-case2") return make_ex2(0.0, 0.0, "ex2-case2");
    if (id == "ex3") return make_ex3();
    if (id == "ex4") return make_ex4();
    if (id == "nl") return make_nl();
    throw std::invalid_argument("make_example: unknown preset id '" + id + "'");
}

}  // namespace mfac
