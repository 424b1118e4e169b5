#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mfac/controllers.hpp"
#include "mfac/edlm.hpp"
#include "mfac/polynomial.hpp"

namespace mfac {

/// Linear difference-equation regime
///   A y(k+1) = B u(k) + C xi(k) + V v(k),
/// with A monic, C applied to the unmeasured-noise channel and V to the
/// measured-disturbance channel.
struct LinearRegime {
    Polynomial a{1.0};
    Polynomial b{0.0};
    Polynomial c{1.0};
    Polynomial v{0.0};
};

/// Named nonlinear maps.
enum class NonlinearKind {
    cubic_input,  // 0.6 y(k) - 0.1 y(k-1) + cubic polynomial in u(k), u(k-1)
};

struct Regime {
    int k_end = 0;  // active for the largest prefix of steps with k <= k_end
    std::variant<LinearRegime, NonlinearKind> spec;
};

/// Ground-truth simulation target with optional regime switching. Owns its
/// own signal histories; one instance per closed loop.
class PlantModel {
public:
    explicit PlantModel(std::vector<Regime> regimes, int history_depth = 64);

    void reset(const std::vector<double>& initial_y = {},
               const std::vector<double>& initial_u = {});

    /// Index of the regime active at step k (0-based). Throws
    /// std::out_of_range when k is outside every range.
    std::size_t active_regime(int k) const;

    /// y(k+1) from the active regime; advances the internal histories.
    double step(double u_now, int k, double noise = 0.0, double v_now = 0.0);

    const std::vector<Regime>& regimes() const { return regimes_; }
    const HistoryBuffer& state() const { return state_; }

private:
    std::vector<Regime> regimes_;
    HistoryBuffer state_;
};

struct ReferenceSpec {
    double amplitude = 0.0;
    int half_period = 1;
};

/// Square wave y*(k+1) = amplitude * (-1)^round(k / half_period), with
/// round-half-away-from-zero as the tie rule.
double reference(const ReferenceSpec& spec, int k);

struct DisturbanceSpec {
    enum class Kind { none, white_noise, constant_schedule, sinusoid };
    Kind kind = Kind::none;
    double variance = 0.0;                             // white_noise
    std::vector<std::pair<int, double>> schedule;      // (k_end, level), ascending
    double amplitude = 0.0;                            // sinusoid
    double rate = 0.0;                                 // sinusoid angular rate
};

/// Deterministic gaussian draw from the engine (Box-Muller); the seeded
/// stream is bit-reproducible.
double gaussian_sample(std::mt19937_64& rng);

double sample_disturbance(const DisturbanceSpec& spec, int k, std::mt19937_64& rng);

struct EstimatorChoice {
    enum class Kind { projection, rls, frozen };
    Kind kind = Kind::projection;
    double eta = 3.0;
    double mu = 1.0;
    double p0 = 1e6;
    double forgetting = 1.0;
};

/// A fully wired benchmark: plant, reference, disturbances, controllers,
/// estimator tuning and initial conditions.
struct ExperimentPreset {
    std::string id;
    PlantModel plant;
    ReferenceSpec reference;
    DisturbanceSpec noise;   // unmeasured channel
    DisturbanceSpec vdist;   // measured channel
    ControllerConfig controller;          // default variant
    std::vector<std::pair<std::string, ControllerConfig>> variants;
    EstimatorChoice estimator;
    std::vector<double> phi0;
    std::vector<double> init_y;
    std::vector<double> init_u;
    int horizon = 0;

    const ControllerConfig& variant_config(const std::string& name) const;
    std::vector<std::string> variant_names() const;
};

/// Preset ids: "ex1", "ex2-case1", "ex2-case2" (alias "ex2" -> case 1),
/// "ex3", "ex4", "nl". Throws std::invalid_argument for anything else.
ExperimentPreset make_example(const std::string& id);

}  // namespace mfac
