#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfac/controllers.hpp"
#include "mfac/plants.hpp"

namespace mfac {

/// Everything a closed-loop run depends on. run_experiment is a pure
/// function of this value: the same config produces a bit-identical trace.
struct ExperimentConfig {
    PlantModel plant{{Regime{1, LinearRegime{}}}};
    ControllerConfig controller;
    EstimatorChoice estimator;
    DisturbanceSpec noise;
    DisturbanceSpec vdist;
    ReferenceSpec reference;
    std::vector<double> phi0;
    std::vector<double> init_y;
    std::vector<double> init_u;
    int horizon = 1;
    std::uint64_t seed = 0;
    bool record_poles = false;

    void validate() const;
};

/// Config for one named controller variant of a preset (default variant
/// when name is empty), with phi0 remapped segment-wise onto the variant's
/// orders.
ExperimentConfig make_config(const ExperimentPreset& preset,
                             const std::string& variant = "",
                             std::uint64_t seed = 0);

struct TraceRow {
    int k = 0;
    double y = 0.0;
    double y_star = 0.0;
    double u = 0.0;
    double delta_u = 0.0;
    double e = 0.0;  // y_star - y
    std::vector<double> phi_hat;
    double w_hat = 0.0;
    double v = 0.0;
    int regime = 0;
    std::vector<std::complex<double>> t_roots;  // filled when record_poles
};

struct Metrics {
    double eitae = 0.0;      // sum of squared tracking errors
    double itae_time_weighted = 0.0;  // sum k*|e|; alternate metric, not the headline one
    std::vector<double> segment_tail_error;  // mean |e| over each segment's last 10 rows
    int unstable_pole_steps = 0;  // counted when poles were recorded
    bool halted = false;
    int halt_step = -1;
    std::string halt_reason;
};

struct RunResult {
    std::vector<TraceRow> trace;
    Metrics metrics;
    bool completed = true;
};

/// Closed loop: estimate, update the disturbance level, evaluate the
/// control law (recomputing G and S from the current estimate), actuate,
/// step the plant. Gain-singular or covariance errors and divergence
/// (|y| > 1e9) halt with partial results.
RunResult run_experiment(const ExperimentConfig& cfg);

double eitae(std::span<const TraceRow> trace);

/// Direct rational-filter recursion of the frozen-coefficient closed loop.
/// ref_seq[t-1] is the set point handed to the controller at step t, i.e.
/// y*(t+1); the returned sequence is y(1..N) with y(1) = 0. Throws
/// std::runtime_error past the overflow guard.
std::vector<double> frozen_loop_response(const PGVector& phi,
                                         const ControllerConfig& cfg,
                                         std::span<const double> ref_seq);

/// Roots of the frozen characteristic polynomial at each recorded estimate,
/// with a per-step stability verdict.
struct PoleTraceRow {
    int k = 0;
    std::vector<std::complex<double>> roots;
    bool stable = false;
};
std::vector<PoleTraceRow> pole_trace(std::span<const TraceRow> trace,
                                     const ControllerConfig& cfg);

/// CSV with header k,y,y_star,u,delta_u,e,phi_hat_0..phi_hat_n,w_hat,v,regime
/// and 17-significant-digit floats.
void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);
std::vector<TraceRow> read_trace_csv(std::istream& is);

std::uint64_t fnv1a64(std::span<const char> bytes);
std::string digest_hex(std::span<const char> bytes);

}  // namespace mfac
