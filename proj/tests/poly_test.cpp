#include "doctest.h"
#include "zollfrei/poly.hpp"

using namespace zollfrei;
using poly::Poly4;
using poly::PolyField4;

TEST_CASE("polynomial ring operations") {
  Poly4 x0 = Poly4::variable(0);
  Poly4 x1 = Poly4::variable(1);
  Poly4 p = (x0 + x1) * (x0 - x1);  // x0^2 - x1^2
  Vec4 at(3.0, 2.0, 0.0, 0.0);
  CHECK(p.eval(at) == doctest::Approx(5.0));
  CHECK(p.degree() == 2);

  Poly4 dp = p.derivative(0);
  CHECK(dp.eval(at) == doctest::Approx(6.0));
  CHECK(p.derivative(2).eval(at) == doctest::Approx(0.0));

  Poly4 cube = x0 * x0 * x1;
  CHECK(cube.antipodal().eval(at) == doctest::Approx(-18.0));
  CHECK((2.0 * cube).eval(at) == doctest::Approx(36.0));
}

TEST_CASE("polynomial field divergence") {
  PolyField4 rot;
  rot.c[0] = Poly4::variable(1);
  rot.c[1] = -1.0 * Poly4::variable(0);
  CHECK(rot.divergence4().degree() <= 0);
  CHECK(rot.divergence4().eval(Vec4::Random()) == doctest::Approx(0.0));

  PolyField4 radial;
  for (int i = 0; i < 4; ++i) radial.c[i] = Poly4::variable(i);
  CHECK(radial.divergence4().eval(Vec4::Random()) == doctest::Approx(4.0));
}

TEST_CASE("complex evaluation extends the real one") {
  PolyField4 f;
  f.c[0] = Poly4::variable(0) * Poly4::variable(3);
  f.c[1] = Poly4::variable(2);
  Vec4 x(0.3, -0.2, 0.9, 1.1);
  CVec4 xc = x.cast<cdouble>();
  CVec4 out = f.eval_complex(xc);
  Vec4 ref = f.eval(x);
  for (int i = 0; i < 4; ++i) {
    CHECK(out[i].real() == doctest::Approx(ref[i]));
    CHECK(std::abs(out[i].imag()) < 1e-14);
  }
}
