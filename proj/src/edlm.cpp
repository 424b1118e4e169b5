#include "mfac/edlm.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfac {

void Orders::validate() const {
    if (ly < 1 || lu < 1) {
        throw std::invalid_argument("Orders: ly and lu must be >= 1");
    }
    if (lv < 0 || lw < 0) {
        throw std::invalid_argument("Orders: lv and lw must be >= 0");
    }
}

PGVector::PGVector(Orders orders, std::vector<double> values,
                   std::optional<double> bound_b)
    : orders_(orders), values_(std::move(values)), bound_b_(bound_b) {
    orders_.validate();
    if (values_.size() != static_cast<std::size_t>(orders_.total())) {
        throw std::invalid_argument("PGVector: length must equal ly+lu+lv+lw");
    }
    if (bound_b_) {
        if (*bound_b_ <= 0.0) {
            throw std::invalid_argument("PGVector: bound_b must be positive");
        }
        const double norm2 = std::inner_product(values_.begin(), values_.end(),
                                                values_.begin(), 0.0);
        if (norm2 > (*bound_b_) * (*bound_b_) * (1.0 + 1e-12)) {
            throw std::invalid_argument("PGVector: norm exceeds bound_b");
        }
    }
}

Polynomial PGVector::segment(int offset, int len) const {
    if (len <= 0) return Polynomial::zero();
    std::vector<double> c(values_.begin() + offset, values_.begin() + offset + len);
    return Polynomial(std::move(c));
}

HistoryBuffer::HistoryBuffer(int depth) : depth_(depth) {
    if (depth < 1) throw std::invalid_argument("HistoryBuffer: depth must be >= 1");
    const auto n = static_cast<std::size_t>(depth);
    y_.buf.assign(n, 0.0);
    u_.buf.assign(n, 0.0);
    v_.buf.assign(n, 0.0);
    w_.buf.assign(n, 0.0);
}

void HistoryBuffer::push(Channel& c, double v) {
    c.head = (c.head + 1) % c.buf.size();
    c.buf[c.head] = v;
    ++c.count;
}

double HistoryBuffer::at(const Channel& c, int lag) const {
    assert(lag >= 0);
    if (static_cast<std::size_t>(lag) >= c.count) return 0.0;
    assert(static_cast<std::size_t>(lag) < c.buf.size());
    return c.buf[(c.head + c.buf.size() - static_cast<std::size_t>(lag)) % c.buf.size()];
}

std::vector<double> build_delta_h(const HistoryBuffer& h, const Orders& o) {
    o.validate();
    std::vector<double> dh;
    dh.reserve(static_cast<std::size_t>(o.total()));
    for (int i = 0; i < o.ly; ++i) dh.push_back(h.dy(i));
    for (int i = 0; i < o.lu; ++i) dh.push_back(h.du(i));
    for (int i = 0; i < o.lv; ++i) dh.push_back(h.dv(i));
    for (int i = 0; i < o.lw; ++i) dh.push_back(h.dw(i));
    return dh;
}

double predict_delta_y(const PGVector& phi, std::span<const double> delta_h,
                       double delta_w_next) {
    if (delta_h.size() != phi.size()) {
        throw std::invalid_argument("predict_delta_y: dimension mismatch");
    }
    double acc = delta_w_next;
    for (std::size_t i = 0; i < delta_h.size(); ++i) acc += phi.at(i) * delta_h[i];
    return acc;
}

PGVector darma_to_pg(const Polynomial& a, const Polynomial& b, const Orders& o) {
    o.validate();
    if (std::abs(a.constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument("darma_to_pg: A must have constant term 1");
    }
    if (o.lv != 0 || o.lw != 0) {
        throw std::invalid_argument("darma_to_pg: lv and lw must be 0");
    }
    if (static_cast<std::size_t>(o.ly) < a.degree()) {
        throw std::invalid_argument("darma_to_pg: ly too small for deg A");
    }
    if (static_cast<std::size_t>(o.lu) < b.degree() + 1) {
        throw std::invalid_argument("darma_to_pg: lu too small for deg B + 1");
    }
    std::vector<double> v(static_cast<std::size_t>(o.total()), 0.0);
    for (std::size_t i = 1; i <= a.degree(); ++i) v[i - 1] = -a[i];
    for (std::size_t j = 0; j <= b.degree(); ++j) {
        v[static_cast<std::size_t>(o.ly) + j] = b[j];
    }
    return PGVector(o, std::move(v));
}

PGVector armax_to_pg(const Polynomial& a, const Polynomial& b,
                     const Polynomial& c, const Orders& o) {
    Orders base{o.ly, o.lu, 0, 0};
    PGVector pg = darma_to_pg(a, b, base);
    if (std::abs(c.constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument("armax_to_pg: C must have constant term 1");
    }
    if (o.lv != 0) {
        throw std::invalid_argument("armax_to_pg: lv must be 0");
    }
    if (static_cast<std::size_t>(o.lw) < c.degree()) {
        throw std::invalid_argument("armax_to_pg: lw too small for deg C");
    }
    std::vector<double> v(static_cast<std::size_t>(o.total()), 0.0);
    for (int i = 0; i < o.ly + o.lu; ++i) v[i] = pg.at(static_cast<std::size_t>(i));
    for (std::size_t i = 1; i <= c.degree(); ++i) {
        v[static_cast<std::size_t>(o.ly + o.lu) + i - 1] = c[i];
    }
    return PGVector(o, std::move(v));
}

}  // namespace mfac
