#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace tworate {

/// Real polynomial with coefficients in ascending powers of its local
/// variable. Segments of streams and force-of-interest densities store their
/// polynomial in (t - from), so the local variable is always the offset from
/// the segment start.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs);
    explicit Polynomial(std::vector<double> coeffs);

    /// Horner evaluation.
    double operator()(double u) const;

    std::span<const double> coefficients() const { return coeffs_; }

    /// Degree after trimming trailing zeros; -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return degree() < 0; }
    bool is_constant() const { return degree() <= 0; }

    Polynomial derivative() const;
    /// Antiderivative vanishing at u = 0.
    Polynomial antiderivative() const;
    /// q(u) = p(u + shift).
    Polynomial shifted(double shift) const;

    Polynomial operator*(double k) const;
    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator-() const { return *this * -1.0; }

    bool operator==(const Polynomial& other) const;

    /// Points in [lo, hi] where the polynomial vanishes or changes sign,
    /// sorted ascending. The zero polynomial has no reported roots.
    std::vector<double> roots_in(double lo, double hi) const;

    /// max |p(u)| over u in [lo, hi], evaluated at the endpoints and at the
    /// critical points.
    double max_abs_on(double lo, double hi) const;

private:
    std::vector<double> coeffs_;
};

}  // namespace tworate
