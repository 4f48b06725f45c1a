#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sostrat/poly.hpp"

namespace sostrat {

/// One-variable truncated power series sum_{k<N} c_k v^k + O(v^N). The
/// expansion variable is a tag only (x1 of the base coordinates, or the
/// bicharacteristic parameter t); coefficients are polynomials in the
/// remaining variables.
class Series1 {
 public:
  Series1(std::string var, int trunc) : var_(std::move(var)), trunc_(trunc) {
    if (trunc < 0) throw std::invalid_argument("truncation order must be >= 0");
    coeffs_.resize(size_t(trunc));
  }

  static Series1 from_coeffs(std::string var, std::vector<Poly> coeffs, int trunc) {
    Series1 s(std::move(var), trunc);
    for (size_t k = 0; k < coeffs.size() && k < size_t(trunc); ++k) s.coeffs_[k] = coeffs[k];
    return s;
  }

  const std::string& var() const { return var_; }
  int trunc() const { return trunc_; }
  const std::vector<Poly>& coeffs() const { return coeffs_; }

  Poly coeff(int k) const {
    return k >= 0 && k < trunc_ ? coeffs_[size_t(k)] : Poly();
  }
  void set_coeff(int k, Poly p) {
    if (k >= 0 && k < trunc_) coeffs_[size_t(k)] = std::move(p);
  }

  bool all_zero() const {
    for (auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend Series1 operator+(const Series1& a, const Series1& b) {
    Series1 r("", 0);
    r = a.aligned(b);
    for (int k = 0; k < r.trunc_; ++k) r.coeffs_[size_t(k)] += b.coeff(k);
    return r;
  }
  friend Series1 operator-(const Series1& a, const Series1& b) {
    Series1 r = a.aligned(b);
    for (int k = 0; k < r.trunc_; ++k) r.coeffs_[size_t(k)] -= b.coeff(k);
    return r;
  }
  friend Series1 operator*(const Series1& a, const Series1& b) {
    Series1 r = a.aligned(b);
    std::vector<Poly> out(size_t(r.trunc_));
    for (int i = 0; i < r.trunc_; ++i)
      for (int j = 0; i + j < r.trunc_; ++j) out[size_t(i + j)] += a.coeff(i) * b.coeff(j);
    r.coeffs_ = std::move(out);
    return r;
  }

  /// Multiplicative inverse; requires the order-zero coefficient to be a
  /// nonzero constant (a unit at the expansion point).
  Series1 inverse() const {
    Rational c0 = coeffs_.empty() ? Rational(0) : coeffs_[0].constant_term();
    if (coeffs_.empty() || !coeffs_[0].is_constant() || c0 == 0)
      throw std::domain_error("Series1::inverse: leading coefficient is not a unit");
    Series1 r(var_, trunc_);
    r.coeffs_[0] = Poly(Rational(1) / c0);
    for (int k = 1; k < trunc_; ++k) {
      Poly acc;
      for (int j = 0; j < k; ++j) acc += r.coeffs_[size_t(j)] * coeff(k - j);
      r.coeffs_[size_t(k)] = acc * (Rational(-1) / c0);
    }
    return r;
  }

 private:
  Series1 aligned(const Series1& o) const {
    Series1 r(var_, std::min(trunc_, o.trunc_));
    for (int k = 0; k < r.trunc_; ++k) r.coeffs_[size_t(k)] = coeff(k);
    return r;
  }

  std::string var_;
  int trunc_ = 0;
  std::vector<Poly> coeffs_;
};

/// Index of the first nonzero coefficient; nullopt when every stored
/// coefficient vanishes (order is then only known to exceed the truncation).
inline std::optional<int> series_ord(const Series1& s) {
  for (int k = 0; k < s.trunc(); ++k)
    if (!s.coeff(k).is_zero()) return k;
  return std::nullopt;
}

}  // namespace sostrat
