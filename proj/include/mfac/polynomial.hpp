#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace mfac {

/// Polynomial in the backward-shift operator z^-1.
///
/// coeffs()[i] multiplies z^-i. The coefficient vector is never empty;
/// canonical form keeps no trailing near-zero coefficient unless the
/// polynomial is a constant.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    Polynomial(std::initializer_list<double> c);
    explicit Polynomial(std::vector<double> c);

    static Polynomial zero() { return Polynomial{}; }
    static Polynomial one() { return Polynomial{1.0}; }

    const std::vector<double>& coeffs() const { return coeffs_; }
    std::size_t degree() const { return coeffs_.size() - 1; }

    /// Coefficient of z^-i; zero beyond the stored degree.
    double operator[](std::size_t i) const {
        return i < coeffs_.size() ? coeffs_[i] : 0.0;
    }
    double constant_term() const { return coeffs_.front(); }

    bool is_zero(double tol = 0.0) const;

    /// Multiply by z^-lags.
    Polynomial shifted(int lags) const;

    /// Apply the operator to a sequence given newest-first:
    /// result = sum_i coeffs[i] * seq[i], missing entries read as zero.
    double apply(std::span<const double> newest_first) const;

    std::complex<double> eval(std::complex<double> z_inv) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

private:
    void canonicalize();
    std::vector<double> coeffs_;
};

/// z-plane roots of z^d * p(z^-1), with multiplicity. A constant polynomial
/// has no roots and yields an empty list.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// True iff every z-plane root r satisfies |r| < 1 - margin.
bool is_stable(const Polynomial& p, double margin = 0.0);

/// Solve z^-1 G = (1 + z^-1 phi_lw) P - (1 - z^-1 phi_ly) for G by
/// coefficient matching. Requires P(0) == 1; throws std::invalid_argument
/// otherwise.
Polynomial diophantine_g(const Polynomial& phi_lw, const Polynomial& phi_ly,
                         const Polynomial& p);

struct SeriesDivision {
    Polynomial quotient;
    Polynomial remainder;   // num - den * quotient
    double residual_norm;   // max |coefficient| of the remainder
};

/// Long division of power series in z^-1, truncated at max_degree terms of
/// the quotient. Exact (zero remainder) whenever the division terminates
/// within max_degree. Requires den(0) != 0.
SeriesDivision divide_series(const Polynomial& num, const Polynomial& den,
                             int max_degree);

}  // namespace mfac
