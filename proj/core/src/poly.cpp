#include "zollfrei/poly.hpp"

#include <cmath>

namespace zollfrei::poly {

Poly4& Poly4::operator+=(const Poly4& o) {
  for (const auto& [m, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) it->second += c;
  }
  trim();
  return *this;
}

Poly4& Poly4::operator-=(const Poly4& o) {
  for (const auto& [m, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(m, -c);
    if (!fresh) it->second -= c;
  }
  trim();
  return *this;
}

Poly4 operator*(const Poly4& a, const Poly4& b) {
  Poly4 r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Poly4::Monomial m;
      for (int i = 0; i < 4; ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
      auto [it, fresh] = r.terms_.try_emplace(m, ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  r.trim();
  return r;
}

Poly4 Poly4::derivative(int i) const {
  Poly4 r;
  for (const auto& [m, c] : terms_) {
    if (m[i] == 0) continue;
    Monomial d = m;
    d[i] -= 1;
    auto [it, fresh] = r.terms_.try_emplace(d, c * m[i]);
    if (!fresh) it->second += c * m[i];
  }
  r.trim();
  return r;
}

double Poly4::eval(const Vec4& x) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < m[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

Poly4 Poly4::antipodal() const {
  Poly4 r;
  for (const auto& [m, c] : terms_) {
    int deg = m[0] + m[1] + m[2] + m[3];
    r.terms_[m] = (deg % 2 == 0) ? c : -c;
  }
  return r;
}

int Poly4::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) {
    (void)c;
    d = std::max(d, int(m[0]) + m[1] + m[2] + m[3]);
  }
  return d;
}

double Poly4::max_abs_coeff() const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) {
    (void)m;
    v = std::max(v, std::fabs(c));
  }
  return v;
}

void Poly4::trim(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::fabs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Mat4 PolyField4::jacobian(const Vec4& x) const {
  Mat4 j;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) j(i, k) = c[i].derivative(k).eval(x);
  return j;
}

CVec4 PolyField4::eval_complex(const CVec4& z) const {
  CVec4 out;
  for (int i = 0; i < 4; ++i) {
    cdouble acc = 0.0;
    for (const auto& [m, coeff] : c[i].terms()) {
      cdouble t = coeff;
      for (int v = 0; v < 4; ++v)
        for (int k = 0; k < m[v]; ++k) t *= z[v];
      acc += t;
    }
    out[i] = acc;
  }
  return out;
}

Eigen::Matrix4cd PolyField4::jacobian_complex(const CVec4& z) const {
  Eigen::Matrix4cd j;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      Poly4 d = c[i].derivative(k);
      cdouble acc = 0.0;
      for (const auto& [m, coeff] : d.terms()) {
        cdouble t = coeff;
        for (int v = 0; v < 4; ++v)
          for (int q = 0; q < m[v]; ++q) t *= z[v];
        acc += t;
      }
      j(i, k) = acc;
    }
  return j;
}

int PolyField4::degree() const {
  int d = -1;
  for (const auto& p : c) d = std::max(d, p.degree());
  return d;
}

}  // namespace zollfrei::poly
