#include <fstream>
#include <sstream>

#include "zollfrei/expr.hpp"
#include "zollfrei/manifold.hpp"

namespace zollfrei::manifold {

double eval_g0(const Point4&, const Tangent4& a, const Tangent4& b) {
  return a.u.dot(b.u) - a.w.dot(b.w);
}

MetricField make_g0() {
  MetricField g;
  g.eval = eval_g0;
  Mat6 G = Mat6::Identity();
  G(3, 3) = G(4, 4) = G(5, 5) = -1.0;
  g.ambient = [G](const Point4&) {
    MetricField::AmbientJet jet;
    jet.G = G;
    for (auto& d : jet.dG) d.setZero();
    return jet;
  };
  return g;
}

Vec4 stereographic_chart(const Point4& p) {
  double d = p.x.z() - p.y.z();
  if (std::fabs(d) < 1e-12) {
    throw domain_error("stereographic_chart: x3 = y3 is outside the chart domain");
  }
  double s = 1.0 / (2.0 * d);
  return Vec4(p.x.x() * s, p.x.y() * s, p.y.x() * s, p.y.y() * s);
}

Vec4 stereographic_push(const Point4& p, const Tangent4& t) {
  double d = p.x.z() - p.y.z();
  if (std::fabs(d) < 1e-12) {
    throw domain_error("stereographic_push: x3 = y3 is outside the chart domain");
  }
  double dd = t.u.z() - t.w.z();
  double s = 1.0 / (2.0 * d);
  double q = dd / (2.0 * d * d);
  return Vec4(t.u.x() * s - p.x.x() * q, t.u.y() * s - p.x.y() * q,
              t.w.x() * s - p.y.x() * q, t.w.y() * s - p.y.y() * q);
}

Frame4 stereographic_coordinate_frame(const Point4& p) {
  ChartFrame chart = ChartFrame::at(p);
  Vec4 zero = Vec4::Zero();
  Mat4 M;
  std::array<Tangent4, 4> basis;
  for (int i = 0; i < 4; ++i) {
    basis[i] = chart.coordinate_vector(zero, i);
    M.col(i) = stereographic_push(p, basis[i]);
  }
  Mat4 Minv = M.inverse();
  Frame4 f;
  f.base = p;
  for (int i = 0; i < 4; ++i) {
    Tangent4 t;
    for (int k = 0; k < 4; ++k) t = t + basis[k] * Minv(k, i);
    f.e[i] = t;
  }
  return f;
}

namespace {

// Ambient Jacobian of the chart map extended off the spheres by the same
// rational formula; rows are the four chart components, columns the ambient
// coordinates (x1,x2,x3,y1,y2,y3).
Eigen::Matrix<double, 4, 6> chart_map_jacobian(const Point4& p) {
  double d = p.x.z() - p.y.z();
  double s = 1.0 / (2.0 * d);
  double t = 1.0 / (2.0 * d * d);
  Eigen::Matrix<double, 4, 6> J = Eigen::Matrix<double, 4, 6>::Zero();
  J(0, 0) = s;
  J(1, 1) = s;
  J(2, 3) = s;
  J(3, 4) = s;
  double c[4] = {p.x.x(), p.x.y(), p.y.x(), p.y.y()};
  for (int i = 0; i < 4; ++i) {
    J(i, 2) = -c[i] * t;
    J(i, 5) = c[i] * t;
  }
  return J;
}

}  // namespace

MetricField make_flat_chart_metric() {
  MetricField g;
  g.eval = [](const Point4& p, const Tangent4& a, const Tangent4& b) {
    Vec4 qa = stereographic_push(p, a);
    Vec4 qb = stereographic_push(p, b);
    return qa[0] * qb[0] + qa[1] * qb[1] - qa[2] * qb[2] - qa[3] * qb[3];
  };
  g.ambient = [](const Point4& p) {
    double d = p.x.z() - p.y.z();
    if (std::fabs(d) < 1e-12) {
      throw domain_error("flat chart metric: x3 = y3 is outside the chart domain");
    }
    auto J = chart_map_jacobian(p);
    Eigen::Matrix<double, 4, 6> EJ = kEta4 * J;
    MetricField::AmbientJet jet;
    jet.G = J.transpose() * EJ;
    double t = 1.0 / (2.0 * d * d);
    double r = 1.0 / (d * d * d);
    double c[4] = {p.x.x(), p.x.y(), p.y.x(), p.y.y()};
    // dJ/dp_k: the value coordinates feed the t-entries, x3 and y3 feed
    // everything through s and t.
    std::array<Eigen::Matrix<double, 4, 6>, 6> H;
    for (auto& m : H) m.setZero();
    const int col[4] = {0, 1, 3, 4};  // ambient slot of c[i], also the s slot
    for (int i = 0; i < 4; ++i) {
      H[col[i]](i, 2) = -t;
      H[col[i]](i, 5) = t;
      H[2](i, col[i]) = -t;
      H[2](i, 2) = c[i] * r;
      H[2](i, 5) = -c[i] * r;
      H[5](i, col[i]) = t;
      H[5](i, 2) = -c[i] * r;
      H[5](i, 5) = c[i] * r;
    }
    for (int k = 0; k < 6; ++k) {
      Mat6 a = H[k].transpose() * EJ;
      jet.dG[k] = a + Mat6(a.transpose());
    }
    return jet;
  };
  return g;
}

MetricField make_product_nonround(double eps) {
  if (std::fabs(eps) >= 1.0) {
    throw domain_error("product-nonround: |eps| must be < 1 to keep the factors positive");
  }
  MetricField g;
  g.eval = [eps](const Point4& p, const Tangent4& a, const Tangent4& b) {
    return (1.0 + eps * p.x.z()) * a.u.dot(b.u) -
           (1.0 + eps * p.y.z()) * a.w.dot(b.w);
  };
  g.orientation = -1;
  g.ambient = [eps](const Point4& p) {
    MetricField::AmbientJet jet;
    jet.G.setZero();
    double fx = 1.0 + eps * p.x.z();
    double fy = 1.0 + eps * p.y.z();
    jet.G(0, 0) = jet.G(1, 1) = jet.G(2, 2) = fx;
    jet.G(3, 3) = jet.G(4, 4) = jet.G(5, 5) = -fy;
    for (auto& d : jet.dG) d.setZero();
    for (int i = 0; i < 3; ++i) {
      jet.dG[2](i, i) = eps;
      jet.dG[5](3 + i, 3 + i) = -eps;
    }
    return jet;
  };
  return g;
}

MetricField make_perturbed(std::uint64_t seed, double eps) {
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  struct Mode {
    Vec6 m;      // rank-one direction of the symmetric perturbation
    Vec6 k;      // ambient wave vector
    double phase;
  };
  auto modes = std::make_shared<std::vector<Mode>>();
  for (int j = 0; j < 6; ++j) {
    Mode mode;
    for (int i = 0; i < 6; ++i) mode.m[i] = n(rng);
    for (int i = 0; i < 6; ++i) mode.k[i] = n(rng);
    mode.m.normalize();
    mode.phase = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
    modes->push_back(mode);
  }
  MetricField g;
  g.eval = [modes, eps](const Point4& p, const Tangent4& a, const Tangent4& b) {
    double v = eval_g0(p, a, b);
    Vec6 pa = p.ambient(), aa = a.ambient(), ba = b.ambient();
    for (const auto& mode : *modes) {
      double s = std::cos(mode.k.dot(pa) + mode.phase) / 6.0;
      v += eps * s * mode.m.dot(aa) * mode.m.dot(ba);
    }
    return v;
  };
  return g;
}

namespace {

std::string strip_line(const std::string& line) {
  std::string out = line;
  auto hash = out.find('#');
  if (hash != std::string::npos) out.erase(hash);
  auto slashes = out.find("//");
  if (slashes != std::string::npos) out.erase(slashes);
  auto first = out.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  auto last = out.find_last_not_of(" \t\r\n");
  return out.substr(first, last - first + 1);
}

}  // namespace

MetricField metric_from_expression_text(const std::string& text) {
  static const std::vector<std::string> vars = {"x1", "x2", "y1", "y2"};
  auto comp = std::make_shared<std::array<std::array<std::optional<expr::Expression>, 4>, 4>>();
  int orientation = +1;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = strip_line(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw domain_error("metric file line " + std::to_string(lineno) +
                         ": expected 'gIJ = expression'");
    }
    std::string key = strip_line(body.substr(0, eq));
    std::string rhs = strip_line(body.substr(eq + 1));
    if (key == "orientation") {
      orientation = std::stoi(rhs);
      if (orientation != 1 && orientation != -1) {
        throw domain_error("metric file: orientation must be 1 or -1");
      }
      continue;
    }
    if (key.size() != 3 || key[0] != 'g' || key[1] < '1' || key[1] > '4' ||
        key[2] < '1' || key[2] > '4') {
      throw domain_error("metric file line " + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
    }
    int i = key[1] - '1';
    int j = key[2] - '1';
    expr::Expression e = expr::Expression::parse(rhs, vars);
    (*comp)[i][j] = e;
    if (i != j) (*comp)[j][i] = std::move(e);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      if (!(*comp)[i][j]) {
        (*comp)[i][j] = expr::Expression::parse("0", vars);
        (*comp)[j][i] = (*comp)[i][j];
      }
    }
  }

  MetricField g;
  g.orientation = orientation;
  g.eval = [comp](const Point4& p, const Tangent4& a, const Tangent4& b) {
    Vec4 c = stereographic_chart(p);
    double vals[4] = {c[0], c[1], c[2], c[3]};
    Vec4 qa = stereographic_push(p, a);
    Vec4 qb = stereographic_push(p, b);
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        v += (*comp)[i][j]->eval(vals) * qa[i] * qb[j];
      }
    }
    return v;
  };
  return g;
}

MetricField metric_from_expression_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("metric file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return metric_from_expression_text(buf.str());
}

MetricField metric_by_name(const std::string& name) {
  if (name == "g0") return make_g0();
  if (name == "flat") return make_flat_chart_metric();
  auto starts = [&](const std::string& prefix) {
    return name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0;
  };
  if (starts("product-nonround:")) {
    return make_product_nonround(std::stod(name.substr(17)));
  }
  if (starts("perturbed:")) {
    std::string rest = name.substr(10);
    auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw domain_error("metric name: expected perturbed:<seed>:<eps>");
    }
    return make_perturbed(std::stoull(rest.substr(0, colon)),
                          std::stod(rest.substr(colon + 1)));
  }
  if (starts("file:")) return metric_from_expression_file(name.substr(5));
  throw domain_error("metric name: unknown metric '" + name + "'");
}

void check_signature(const MetricField& g, const Point4& p) {
  ChartFrame chart = ChartFrame::at(p);
  Mat4 G = chart_gram(g, chart, Vec4::Zero());
  Eigen::SelfAdjointEigenSolver<Mat4> es(G);
  int plus = 0, minus = 0;
  for (int i = 0; i < 4; ++i) {
    double ev = es.eigenvalues()[i];
    if (ev > 1e-10) {
      ++plus;
    } else if (ev < -1e-10) {
      ++minus;
    }
  }
  if (plus != 2 || minus != 2) {
    throw signature_error("check_signature: expected signature (+,+,-,-), got (" +
                          std::to_string(plus) + "," + std::to_string(minus) + ")");
  }
}

}  // namespace zollfrei::manifold
