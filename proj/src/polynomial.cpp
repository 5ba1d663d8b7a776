#include "tworate/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace tworate {

namespace {

// Bisection on a bracket where f changes sign; stops when the midpoint no
// longer moves in floating point.
template <class F>
double bisect_sign_change(const F& f, double lo, double hi) {
    double flo = f(lo);
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {}

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

double Polynomial::operator()(double u) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
    return acc;
}

int Polynomial::degree() const {
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
        if (coeffs_[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> out(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<double> out(coeffs_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(out));
}

Polynomial Polynomial::shifted(double shift) const {
    // Repeated synthetic division (Taylor shift).
    std::vector<double> c = coeffs_;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t k = n - 1; k > i; --k) c[k - 1] += shift * c[k];
    }
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(double k) const {
    std::vector<double> out = coeffs_;
    for (double& c : out) c *= k;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    std::vector<double> out(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] += coeffs_[k];
    for (std::size_t k = 0; k < other.coeffs_.size(); ++k) out[k] += other.coeffs_[k];
    return Polynomial(std::move(out));
}

bool Polynomial::operator==(const Polynomial& other) const {
    const int d = degree();
    if (d != other.degree()) return false;
    for (int k = 0; k <= d; ++k) {
        if (coeffs_[static_cast<std::size_t>(k)] != other.coeffs_[static_cast<std::size_t>(k)]) return false;
    }
    return true;
}

std::vector<double> Polynomial::roots_in(double lo, double hi) const {
    const int d = degree();
    std::vector<double> roots;
    if (d <= 0 || lo > hi) return roots;
    if (d == 1) {
        const double r = -coeffs_[0] / coeffs_[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }

    // The polynomial is monotone between consecutive critical points, so each
    // piece holds at most one sign change.
    std::vector<double> knots{lo};
    for (double c : derivative().roots_in(lo, hi)) {
        if (c > knots.back() && c < hi) knots.push_back(c);
    }
    knots.push_back(hi);

    const auto& self = *this;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k];
        const double b = knots[k + 1];
        const double fa = self(a);
        const double fb = self(b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if (fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            roots.push_back(bisect_sign_change(self, a, b));
        }
    }
    if (self(hi) == 0.0 && (roots.empty() || roots.back() < hi)) roots.push_back(hi);
    return roots;
}

double Polynomial::max_abs_on(double lo, double hi) const {
    double best = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
    for (double c : derivative().roots_in(lo, hi)) best = std::max(best, std::abs((*this)(c)));
    return best;
}

}  // namespace tworate
