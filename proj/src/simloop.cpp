#include "mfac/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mfac/estimators.hpp"

namespace mfac {

namespace {
constexpr double kDivergenceGuard = 1e9;
}

void ExperimentConfig::validate() const {
    controller.validate();
    if (horizon < 1) {
        throw std::invalid_argument("ExperimentConfig: horizon must be >= 1");
    }
    if (phi0.size() != static_cast<std::size_t>(controller.orders.total())) {
        throw std::invalid_argument(
            "ExperimentConfig: phi0 length must match the controller orders");
    }
    if (plant.regimes().back().k_end < horizon) {
        throw std::invalid_argument(
            "ExperimentConfig: plant regimes do not cover the horizon");
    }
}

ExperimentConfig make_config(const ExperimentPreset& preset,
                             const std::string& variant, std::uint64_t seed) {
    const ControllerConfig& ctl =
        variant.empty() ? preset.controller : preset.variant_config(variant);

    // Remap phi0 segment-wise from the preset's default orders.
    const Orders& from = preset.controller.orders;
    const Orders& to = ctl.orders;
    std::vector<double> phi0(static_cast<std::size_t>(to.total()), 0.0);
    const int from_off[4] = {0, from.ly, from.ly + from.lu, from.ly + from.lu + from.lv};
    const int to_off[4] = {0, to.ly, to.ly + to.lu, to.ly + to.lu + to.lv};
    const int from_len[4] = {from.ly, from.lu, from.lv, from.lw};
    const int to_len[4] = {to.ly, to.lu, to.lv, to.lw};
    for (int s = 0; s < 4; ++s) {
        for (int i = 0; i < std::min(from_len[s], to_len[s]); ++i) {
            const auto src = static_cast<std::size_t>(from_off[s] + i);
            if (src < preset.phi0.size()) {
                phi0[static_cast<std::size_t>(to_off[s] + i)] = preset.phi0[src];
            }
        }
    }

    ExperimentConfig cfg{
        .plant = preset.plant,
        .controller = ctl,
        .estimator = preset.estimator,
        .noise = preset.noise,
        .vdist = preset.vdist,
        .reference = preset.reference,
        .phi0 = std::move(phi0),
        .init_y = preset.init_y,
        .init_u = preset.init_u,
        .horizon = preset.horizon,
        .seed = seed,
        .record_poles = false,
    };
    return cfg;
}

namespace {

Metrics compute_metrics(const ExperimentConfig& cfg,
                        std::span<const TraceRow> trace) {
    Metrics m;
    for (const TraceRow& r : trace) {
        m.eitae += r.e * r.e;
        m.itae_time_weighted += r.k * std::abs(r.e);
        if (!r.t_roots.empty()) {
            bool stable = true;
            for (const auto& z : r.t_roots) {
                if (std::abs(z) >= 1.0) stable = false;
            }
            if (!stable) ++m.unstable_pole_steps;
        }
    }
    // Tail error of each constant-reference segment.
    long long seg = std::numeric_limits<long long>::min();
    std::vector<std::vector<double>> segments;
    for (const TraceRow& r : trace) {
        const auto n = static_cast<long long>(
            std::round(static_cast<double>(r.k - 1) /
                       static_cast<double>(cfg.reference.half_period)));
        if (n != seg) {
            seg = n;
            segments.emplace_back();
        }
        segments.back().push_back(std::abs(r.e));
    }
    for (const auto& s : segments) {
        const std::size_t tail = std::min<std::size_t>(10, s.size());
        double acc = 0.0;
        for (std::size_t i = s.size() - tail; i < s.size(); ++i) acc += s[i];
        m.segment_tail_error.push_back(acc / static_cast<double>(tail));
    }
    return m;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ControllerConfig& ctl = cfg.controller;
    const Orders& o = ctl.orders;

    PlantModel plant = cfg.plant;
    plant.reset(cfg.init_y, cfg.init_u);

    HistoryBuffer h(required_history_depth(ctl));
    for (double v : cfg.init_y) h.push_y(v);
    for (double v : cfg.init_u) h.push_u(v);

    std::mt19937_64 rng(cfg.seed);
    PGVector phi(o, cfg.phi0);
    ProjectionState proj{phi, cfg.estimator.eta, cfg.estimator.mu};
    RLSState rls = make_rls_state(phi, cfg.estimator.p0, cfg.estimator.forgetting);

    std::vector<double> refwin(static_cast<std::size_t>(
        o.lw + static_cast<int>(ctl.r_poly.degree()) + 4), 0.0);
    refwin[0] = reference(cfg.reference, 0);  // y*(1)

    RunResult out;
    out.trace.reserve(static_cast<std::size_t>(cfg.horizon));
    double w_hat = 0.0;
    std::vector<double> prev_dh;

    auto halt = [&](int k, const std::string& reason) {
        out.completed = false;
        out.metrics = compute_metrics(cfg, out.trace);
        out.metrics.halted = true;
        out.metrics.halt_step = k;
        out.metrics.halt_reason = reason;
    };

    for (int k = 1; k <= cfg.horizon; ++k) {
        // (1) estimator update from (dH(k-1), dy(k)); phi(1) is the given
        // initial value, so the first update produces phi(2).
        if (k >= 2) {
            const double dy_now = h.dy(0);
            const PGVector prior = phi;
            try {
                switch (cfg.estimator.kind) {
                    case EstimatorChoice::Kind::projection:
                        proj = projection_update(proj, prev_dh, dy_now);
                        phi = proj.phi_hat;
                        break;
                    case EstimatorChoice::Kind::rls:
                        rls = rls_update(rls, prev_dh, dy_now);
                        phi = rls.phi_hat;
                        break;
                    case EstimatorChoice::Kind::frozen:
                        break;
                }
            } catch (const CovarianceBreakdownError& e) {
                halt(k, e.what());
                return out;
            }
            // (2) disturbance level from the prior estimate's innovation.
            w_hat = estimate_disturbance(prior, prev_dh, dy_now, w_hat);
        }
        h.push_w(w_hat);

        const double v_now = sample_disturbance(cfg.vdist, k, rng);
        const double y_star_next = reference(cfg.reference, k);  // y*(k+1)
        const double y_star_now = refwin[0];
        for (std::size_t i = refwin.size(); i-- > 1;) refwin[i] = refwin[i - 1];
        refwin[0] = y_star_next;

        // (3)+(4) control law; G and S are rebuilt from the current phi.
        double du = 0.0;
        try {
            switch (ctl.variant) {
                case Variant::basic:
                    du = mfac_basic(phi, h, y_star_next, ctl.epsilon_gain);
                    break;
                case Variant::lambda_weighted:
                    du = mfac_lambda(phi, h, y_star_next, ctl.lambda, ctl.epsilon_gain);
                    break;
                case Variant::stochastic:
                    du = gmfac_stochastic(phi, h, RefWindow{refwin}, ctl.epsilon_gain);
                    break;
                case Variant::poly_cost:
                    du = gmfac_poly(phi, ctl, h, RefWindow{refwin});
                    break;
                case Variant::measured_disturbance: {
                    ControllerConfig step_cfg = ctl;
                    if (ctl.design_s_online) {
                        // The series solution only converges for minimum-phase
                        // phi_u; fall back to no feedforward until the
                        // estimate gets there.
                        step_cfg.s_poly = is_stable(phi.phi_u())
                                              ? design_s(ctl, phi, ctl.s_max_degree).s
                                              : Polynomial::zero();
                    }
                    du = gmfac_measured(phi, step_cfg, h, RefWindow{refwin}, v_now);
                    break;
                }
                case Variant::mvc_baseline:
                    du = mvc_baseline(phi, h, y_star_next, ctl.epsilon_gain) - h.u(0);
                    break;
            }
        } catch (const GainSingularError& e) {
            halt(k, e.what());
            return out;
        }

        const double u_now = h.u(0) + du;
        h.push_u(u_now);
        h.push_v(v_now);
        prev_dh = build_delta_h(h, o);

        // (5) plant step with this step's disturbance draws.
        const double noise_now = sample_disturbance(cfg.noise, k, rng);
        const double y_now = h.y(0);
        const double y_next = plant.step(u_now, k, noise_now, v_now);

        TraceRow row;
        row.k = k;
        row.y = y_now;
        row.y_star = y_star_now;
        row.u = u_now;
        row.delta_u = du;
        row.e = y_star_now - y_now;
        row.phi_hat = phi.values();
        row.w_hat = w_hat;
        row.v = v_now;
        row.regime = static_cast<int>(plant.active_regime(k)) + 1;
        if (cfg.record_poles) {
            try {
                row.t_roots = (ctl.variant == Variant::poly_cost ||
                               ctl.variant == Variant::measured_disturbance)
                                  ? poly_roots(char_poly_general(phi, ctl))
                                  : poly_roots(char_poly_basic(phi, ctl.lambda));
            } catch (const GainSingularError&) {
                // estimate passing through zero gain; leave the row's roots empty
            }
        }
        out.trace.push_back(std::move(row));

        if (!std::isfinite(y_next) || std::abs(y_next) > kDivergenceGuard) {
            halt(k, "divergence: |y| exceeded overflow guard");
            return out;
        }
        h.push_y(y_next);
    }

    out.metrics = compute_metrics(cfg, out.trace);
    return out;
}

double eitae(std::span<const TraceRow> trace) {
    double acc = 0.0;
    for (const TraceRow& r : trace) acc += r.e * r.e;
    return acc;
}

std::vector<double> frozen_loop_response(const PGVector& phi,
                                         const ControllerConfig& cfg,
                                         std::span<const double> ref_seq) {
    const bool general = cfg.variant == Variant::poly_cost ||
                         cfg.variant == Variant::measured_disturbance;
    const Polynomial t = general ? char_poly_general(phi, cfg)
                                 : char_poly_basic(phi, cfg.lambda);
    const Polynomial num = general ? phi.phi_u() * cfg.r_poly
                                   : phi.input_gain() * phi.phi_u();
    if (t.constant_term() == 0.0) {
        throw std::runtime_error("frozen_loop_response: T has zero constant term");
    }

    std::vector<double> y(ref_seq.size(), 0.0);
    auto r_at = [&](int s) {
        return (s >= 1 && s <= static_cast<int>(ref_seq.size()))
                   ? ref_seq[static_cast<std::size_t>(s - 1)]
                   : 0.0;
    };
    for (int t_step = 2; t_step <= static_cast<int>(y.size()); ++t_step) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= num.degree(); ++j) {
            acc += num[j] * r_at(t_step - 1 - static_cast<int>(j));
        }
        for (std::size_t j = 1; j <= t.degree(); ++j) {
            const int idx = t_step - static_cast<int>(j);
            if (idx >= 1) acc -= t[j] * y[static_cast<std::size_t>(idx - 1)];
        }
        const double val = acc / t.constant_term();
        if (!std::isfinite(val) || std::abs(val) > kDivergenceGuard) {
            throw std::runtime_error("frozen_loop_response: divergence past overflow guard");
        }
        y[static_cast<std::size_t>(t_step - 1)] = val;
    }
    return y;
}

std::vector<PoleTraceRow> pole_trace(std::span<const TraceRow> trace,
                                     const ControllerConfig& cfg) {
    const bool general = cfg.variant == Variant::poly_cost ||
                         cfg.variant == Variant::measured_disturbance;
    std::vector<PoleTraceRow> out;
    out.reserve(trace.size());
    for (const TraceRow& r : trace) {
        PGVector phi(cfg.orders, r.phi_hat);
        PoleTraceRow row;
        row.k = r.k;
        try {
            const Polynomial t = general ? char_poly_general(phi, cfg)
                                         : char_poly_basic(phi, cfg.lambda);
            row.roots = poly_roots(t);
            row.stable = is_stable(t);
        } catch (const GainSingularError&) {
            row.stable = false;  // zero-gain estimate, no defined roots
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

void append_num(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
    const std::size_t nphi = trace.empty() ? 0 : trace.front().phi_hat.size();
    std::string line = "k,y,y_star,u,delta_u,e";
    for (std::size_t i = 0; i < nphi; ++i) {
        line += ",phi_hat_" + std::to_string(i);
    }
    line += ",w_hat,v,regime\n";
    os << line;
    for (const TraceRow& r : trace) {
        line.clear();
        line += std::to_string(r.k);
        for (double v : {r.y, r.y_star, r.u, r.delta_u, r.e}) {
            line += ',';
            append_num(line, v);
        }
        for (double v : r.phi_hat) {
            line += ',';
            append_num(line, v);
        }
        line += ',';
        append_num(line, r.w_hat);
        line += ',';
        append_num(line, r.v);
        line += ',' + std::to_string(r.regime) + '\n';
        os << line;
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) return {};
    std::size_t nphi = 0;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.rfind("phi_hat_", 0) == 0) ++nphi;
        }
    }
    std::vector<TraceRow> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9 + nphi) {
            throw std::runtime_error("read_trace_csv: malformed row");
        }
        TraceRow r;
        std::size_t i = 0;
        r.k = std::stoi(cells[i++]);
        r.y = std::strtod(cells[i++].c_str(), nullptr);
        r.y_star = std::strtod(cells[i++].c_str(), nullptr);
        r.u = std::strtod(cells[i++].c_str(), nullptr);
        r.delta_u = std::strtod(cells[i++].c_str(), nullptr);
        r.e = std::strtod(cells[i++].c_str(), nullptr);
        r.phi_hat.resize(nphi);
        for (std::size_t j = 0; j < nphi; ++j) {
            r.phi_hat[j] = std::strtod(cells[i++].c_str(), nullptr);
        }
        r.w_hat = std::strtod(cells[i++].c_str(), nullptr);
        r.v = std::strtod(cells[i++].c_str(), nullptr);
        r.regime = std::stoi(cells[i++]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string digest_hex(std::span<const char> bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

}  // namespace mfac
