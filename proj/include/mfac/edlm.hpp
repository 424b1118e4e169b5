#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mfac/polynomial.hpp"

namespace mfac {

/// Pseudo orders of the regressor window. ly and lu must be at least 1;
/// lv and lw may be 0, meaning the segment is absent.
struct Orders {
    int ly = 1;
    int lu = 1;
    int lv = 0;
    int lw = 0;

    int total() const { return ly + lu + lv + lw; }
    void validate() const;
    bool operator==(const Orders&) const = default;
};

/// Pseudo-gradient vector, partitioned [y lags | u lags | v lags | w lags].
class PGVector {
public:
    PGVector(Orders orders, std::vector<double> values,
             std::optional<double> bound_b = std::nullopt);

    const Orders& orders() const { return orders_; }
    const std::vector<double>& values() const { return values_; }
    std::optional<double> bound_b() const { return bound_b_; }

    double at(std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    /// Leading input coefficient phi_{Ly+1}.
    double input_gain() const { return values_[static_cast<std::size_t>(orders_.ly)]; }

    Polynomial phi_y() const { return segment(0, orders_.ly); }
    Polynomial phi_u() const { return segment(orders_.ly, orders_.lu); }
    Polynomial phi_v() const { return segment(orders_.ly + orders_.lu, orders_.lv); }
    Polynomial phi_w() const {
        return segment(orders_.ly + orders_.lu + orders_.lv, orders_.lw);
    }

private:
    Polynomial segment(int offset, int len) const;
    Orders orders_;
    std::vector<double> values_;
    std::optional<double> bound_b_;
};

/// Ring buffers of y, u, v, w samples. Values before the first pushed
/// sample read as zero, so first differences are always defined.
class HistoryBuffer {
public:
    explicit HistoryBuffer(int depth = 64);

    void push_y(double v) { push(y_, v); }
    void push_u(double v) { push(u_, v); }
    void push_v(double v) { push(v_, v); }
    void push_w(double v) { push(w_, v); }

    // value at `lag` steps behind the newest pushed sample of the channel
    double y(int lag) const { return at(y_, lag); }
    double u(int lag) const { return at(u_, lag); }
    double v(int lag) const { return at(v_, lag); }
    double w(int lag) const { return at(w_, lag); }

    double dy(int lag) const { return y(lag) - y(lag + 1); }
    double du(int lag) const { return u(lag) - u(lag + 1); }
    double dv(int lag) const { return v(lag) - v(lag + 1); }
    double dw(int lag) const { return w(lag) - w(lag + 1); }

    int depth() const { return depth_; }

private:
    struct Channel {
        std::vector<double> buf;
        std::size_t head = 0;   // index of newest sample
        std::size_t count = 0;  // total pushed
    };
    void push(Channel& c, double v);
    double at(const Channel& c, int lag) const;

    int depth_;
    Channel y_, u_, v_, w_;
};

/// Regressor window [dy lags | du lags | dv lags | dw lags], newest first
/// within each segment, taken at the newest time of each channel.
std::vector<double> build_delta_h(const HistoryBuffer& h, const Orders& o);

/// phi^T dh + delta_w_next. Throws std::invalid_argument on dimension
/// mismatch.
double predict_delta_y(const PGVector& phi, std::span<const double> delta_h,
                       double delta_w_next = 0.0);

/// PG vector of the incremental form of A(z^-1) y(k+1) = B(z^-1) u(k).
/// A must be monic; orders must cover deg A and deg B + 1.
PGVector darma_to_pg(const Polynomial& a, const Polynomial& b, const Orders& o);

/// As darma_to_pg, plus the noise segment of A y(k+1) = B u(k) + C zeta(k+1)
/// under the identification w == zeta. C must be monic with deg C <= lw.
PGVector armax_to_pg(const Polynomial& a, const Polynomial& b,
                     const Polynomial& c, const Orders& o);

}  // namespace mfac
