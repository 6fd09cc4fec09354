#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "zollfrei/util.hpp"

namespace zollfrei::poly {

// Sparse polynomial in up to four variables, exact coefficient arithmetic up
// to double rounding.  Small: used for vector fields on S^3 and their exact
// divergence/curl bookkeeping, not for performance-critical inner loops.
class Poly4 {
 public:
  using Monomial = std::array<std::uint8_t, 4>;

  Poly4() = default;
  explicit Poly4(double c) {
    if (c != 0.0) terms_[{0, 0, 0, 0}] = c;
  }
  static Poly4 variable(int i, double scale = 1.0) {
    Poly4 p;
    Monomial m{0, 0, 0, 0};
    m[i] = 1;
    p.terms_[m] = scale;
    return p;
  }

  Poly4& operator+=(const Poly4& o);
  Poly4& operator-=(const Poly4& o);
  friend Poly4 operator+(Poly4 a, const Poly4& b) { return a += b; }
  friend Poly4 operator-(Poly4 a, const Poly4& b) { return a -= b; }
  friend Poly4 operator*(const Poly4& a, const Poly4& b);
  friend Poly4 operator*(double s, Poly4 p) {
    for (auto& [m, c] : p.terms_) c *= s;
    p.trim();
    return p;
  }

  Poly4 derivative(int i) const;
  double eval(const Vec4& x) const;
  Poly4 antipodal() const;  // p(-x)
  int degree() const;
  bool empty() const { return terms_.empty(); }
  double max_abs_coeff() const;

  const std::map<Monomial, double>& terms() const { return terms_; }
  void set_term(const Monomial& m, double c) {
    if (c == 0.0)
      terms_.erase(m);
    else
      terms_[m] = c;
  }

 private:
  void trim(double tol = 0.0);
  std::map<Monomial, double> terms_;
};

// Polynomial vector field on R^4 (componentwise Poly4).
struct PolyField4 {
  std::array<Poly4, 4> c;

  Vec4 eval(const Vec4& x) const {
    return Vec4(c[0].eval(x), c[1].eval(x), c[2].eval(x), c[3].eval(x));
  }
  Mat4 jacobian(const Vec4& x) const;
  CVec4 eval_complex(const CVec4& z) const;
  Eigen::Matrix4cd jacobian_complex(const CVec4& z) const;
  Poly4 divergence4() const {
    Poly4 d;
    for (int i = 0; i < 4; ++i) d += c[i].derivative(i);
    return d;
  }
  PolyField4& operator+=(const PolyField4& o) {
    for (int i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  friend PolyField4 operator*(double s, PolyField4 f) {
    for (auto& p : f.c) p = s * p;
    return f;
  }
  int degree() const;
};

}  // namespace zollfrei::poly
