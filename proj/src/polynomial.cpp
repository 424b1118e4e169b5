#include "mfac/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfac {

namespace {
constexpr double kTrailingTol = 1e-14;
}

Polynomial::Polynomial(std::initializer_list<double> c)
    : coeffs_(c.begin(), c.end()) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    canonicalize();
}

Polynomial::Polynomial(std::vector<double> c) : coeffs_(std::move(c)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    canonicalize();
}

void Polynomial::canonicalize() {
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) < kTrailingTol) {
        coeffs_.pop_back();
    }
}

bool Polynomial::is_zero(double tol) const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [tol](double c) { return std::abs(c) <= tol; });
}

Polynomial Polynomial::shifted(int lags) const {
    if (lags <= 0 || is_zero()) return *this;
    std::vector<double> c(coeffs_.size() + static_cast<std::size_t>(lags), 0.0);
    std::copy(coeffs_.begin(), coeffs_.end(), c.begin() + lags);
    return Polynomial(std::move(c));
}

double Polynomial::apply(std::span<const double> newest_first) const {
    double acc = 0.0;
    const std::size_t n = std::min(coeffs_.size(), newest_first.size());
    for (std::size_t i = 0; i < n; ++i) acc += coeffs_[i] * newest_first[i];
    return acc;
}

std::complex<double> Polynomial::eval(std::complex<double> z_inv) const {
    std::complex<double> acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z_inv + coeffs_[i];
    return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
    std::vector<double> out(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) {
            out[i + j] += coeffs_[i] * o.coeffs_[j];
        }
    }
    coeffs_ = std::move(out);
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    canonicalize();
    return *this;
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
    // z^d p(z^-1) has descending z-coefficients equal to coeffs()[0..d].
    std::vector<double> c = p.coeffs();
    std::size_t lead = 0;
    while (lead < c.size() && c[lead] == 0.0) ++lead;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead));
    if (c.size() <= 1) return {};

    const std::size_t n = c.size() - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        companion(0, static_cast<Eigen::Index>(i)) = -c[i + 1] / c[0];
        if (i + 1 < n) companion(static_cast<Eigen::Index>(i) + 1,
                                 static_cast<Eigen::Index>(i)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(n);
    for (std::size_t i = 0; i < n; ++i) {
        roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

bool is_stable(const Polynomial& p, double margin) {
    for (const auto& r : poly_roots(p)) {
        if (std::abs(r) >= 1.0 - margin) return false;
    }
    return true;
}

Polynomial diophantine_g(const Polynomial& phi_lw, const Polynomial& phi_ly,
                         const Polynomial& p) {
    if (std::abs(p.constant_term() - 1.0) > 1e-12) {
        throw std::invalid_argument(
            "diophantine_g: P must have constant term 1 (ill-posed identity)");
    }
    // rhs = (1 + z^-1 phi_lw) P - (1 - z^-1 phi_ly); constant terms cancel.
    Polynomial rhs = (Polynomial::one() + phi_lw.shifted(1)) * p -
                     (Polynomial::one() - phi_ly.shifted(1));
    std::vector<double> g(std::max<std::size_t>(rhs.degree(), 1), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rhs[i + 1];
    return Polynomial(std::move(g));
}

SeriesDivision divide_series(const Polynomial& num, const Polynomial& den,
                             int max_degree) {
    if (den.constant_term() == 0.0) {
        throw std::invalid_argument("divide_series: denominator constant term is zero");
    }
    if (max_degree < 0) max_degree = 0;
    std::vector<double> q(static_cast<std::size_t>(max_degree) + 1, 0.0);
    std::vector<double> rem(num.coeffs());
    rem.resize(std::max(rem.size(), q.size() + den.degree() + 1), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = rem[i] / den.constant_term();
        if (q[i] == 0.0) continue;
        for (std::size_t j = 0; j <= den.degree() && i + j < rem.size(); ++j) {
            rem[i + j] -= q[i] * den[j];
        }
    }
    SeriesDivision out{Polynomial(std::move(q)), Polynomial(std::move(rem)), 0.0};
    for (double c : out.remainder.coeffs()) {
        out.residual_norm = std::max(out.residual_norm, std::abs(c));
    }
    return out;
}

}  // namespace mfac
