#include "zollfrei/family.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace zollfrei::disks {

namespace {

using nlohmann::json;

// Stable chordal distance between projective classes of unit vectors.
double class_distance(const CVec4& an, const CVec4& bn) {
  cdouble ip = 0.0;
  for (int j = 0; j < 4; ++j) ip += std::conj(an(j)) * bn(j);
  return (bn - ip * an).norm();
}

CVec4 unit(const CVec4& a) { return a / a.norm(); }

json vec_to_json(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VecX vec_from_json(const json& a) {
  VecX v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

json disk_to_json(const DiskSolution& d) {
  json j;
  j["u"] = vec_to_json(VecX(d.q.u));
  j["v"] = vec_to_json(VecX(d.q.v));
  VecX rot(16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rot(4 * r + c) = d.rotation(r, c);
  j["rotation"] = vec_to_json(rot);
  j["modes"] = d.modes;
  json four = json::array();
  for (const CVec3& f : d.fourier) {
    json row = json::array();
    for (int c = 0; c < 3; ++c) {
      row.push_back(f(c).real());
      row.push_back(f(c).imag());
    }
    four.push_back(row);
  }
  j["fourier"] = four;
  j["gauge"] = vec_to_json(d.gauge);
  j["residual"] = d.residual;
  j["steps"] = d.newton_steps;
  return j;
}

DiskSolution disk_from_json(const json& j) {
  DiskSolution d;
  VecX u = vec_from_json(j.at("u")), v = vec_from_json(j.at("v"));
  d.q.u = Vec4(u);
  d.q.v = Vec4(v);
  VecX rot = vec_from_json(j.at("rotation"));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) d.rotation(r, c) = rot(4 * r + c);
  d.modes = j.at("modes").get<int>();
  d.fourier.clear();
  for (const json& row : j.at("fourier")) {
    CVec3 f;
    for (int c = 0; c < 3; ++c)
      f(c) = cdouble(row[2 * c].get<double>(), row[2 * c + 1].get<double>());
    d.fourier.push_back(f);
  }
  d.gauge = vec_from_json(j.at("gauge"));
  d.residual = j.at("residual").get<double>();
  d.newton_steps = j.at("steps").get<int>();
  int m = 2 * d.modes + 1;
  d.gamma.resize(m);
  for (int k = 0; k < m; ++k) d.gamma[k] = d.boundary_lift(2 * kPi * k / m);
  return d;
}

}  // namespace

Vec3 sphere_node(int n_lat, int n_lon, int idx) {
  int i = idx / n_lon, k = idx % n_lon;
  double th = kPi * (i + 0.5) / n_lat;
  double ph = 2 * kPi * k / n_lon;
  return Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
              std::cos(th));
}

std::array<Vec3, 2> sphere_tangent_basis(const Vec3& x) {
  Vec3 e = std::abs(x(2)) < 0.8 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  Vec3 t1 = e.cross(x).normalized();
  Vec3 t2 = x.cross(t1);
  return {t1, t2};
}

FamilyGrid build_family(const rp3::TotallyRealEmbedding& P,
                        const FamilyConfig& cfg) {
  if (cfg.n_lat < 8 || cfg.n_lon < 8)
    throw domain_error("family grid must be at least 8x8 per sphere factor");

  FamilyGrid fam;
  fam.embedding = P;
  fam.n_lat = cfg.n_lat;
  fam.n_lon = cfg.n_lon;
  int K = fam.per_factor();
  fam.disks.resize(fam.size());
  std::vector<std::vector<int>> row_failures(K);

  auto solve_cell = [&](int ix, int iy, const DiskSolution* seed) {
    int idx = fam.index(ix, iy);
    rp3::QuadricPoint q = fam.anchor(ix, iy);
    try {
      fam.disks[idx] = solve_disk(P, q, seed, cfg.solve);
    } catch (const std::exception&) {
      fam.disks[idx] = round_disk(q, cfg.solve.modes);
      row_failures[ix].push_back(idx);
    }
  };

  // Column of row heads, then each row swept from its own head.
  for (int ix = 0; ix < K; ++ix)
    solve_cell(ix, 0, ix == 0 ? nullptr : &fam.disks[fam.index(ix - 1, 0)]);
  parallel_for(K, cfg.workers, [&](std::size_t ix) {
    for (int iy = 1; iy < K; ++iy)
      solve_cell((int)ix, iy, &fam.disks[fam.index((int)ix, iy - 1)]);
  });

  fam.continuation_order.reserve(fam.size());
  for (int ix = 0; ix < K; ++ix) fam.continuation_order.push_back(fam.index(ix, 0));
  for (int ix = 0; ix < K; ++ix)
    for (int iy = 1; iy < K; ++iy) fam.continuation_order.push_back(fam.index(ix, iy));

  for (const auto& rf : row_failures)
    fam.failures.insert(fam.failures.end(), rf.begin(), rf.end());
  std::sort(fam.failures.begin(), fam.failures.end());

  if (cfg.certify) {
    fam.maslov.assign(fam.size(), 0);
    fam.quadric_meets.assign(fam.size(), 0);
    std::vector<char> bad(fam.size(), 0);
    parallel_for(fam.size(), cfg.workers, [&](std::size_t i) {
      try {
        fam.maslov[i] = maslov_index(fam.disks[i], P);
        fam.quadric_meets[i] = quadric_winding(fam.disks[i]);
      } catch (const std::exception&) {
        fam.maslov[i] = -1;
        bad[i] = 1;
      }
    });
    for (int i = 0; i < fam.size(); ++i)
      if (bad[i] &&
          !std::binary_search(fam.failures.begin(), fam.failures.end(), i))
        fam.failures.push_back(i);
    std::sort(fam.failures.begin(), fam.failures.end());
  }

  if (cfg.spot_checks > 0 && fam.failures.empty()) {
    auto rng = make_rng(cfg.seed, 17);
    std::uniform_int_distribution<int> cell(0, fam.size() - 1);
    std::uniform_real_distribution<double> rad(0.15, 0.75), ang(0.0, 2 * kPi);
    for (int k = 0; k < cfg.spot_checks; ++k) {
      int idx = cell(rng);
      CVec4 p = fam.disks[idx].eval(std::polar(rad(rng), ang(rng)));
      int hits = count_disks_through(fam, p, cfg.foliation_tol);
      if (hits != 1) {
        std::ostringstream os;
        os << "foliation spot check failed: interior point of cell " << idx
           << " met " << hits << " disks";
        throw degeneracy_error(os.str());
      }
    }
  }
  return fam;
}

double disk_point_distance(const DiskSolution& d, const CVec4& p,
                           double r_max) {
  CVec4 pn = unit(p);
  auto dist = [&](cdouble z) { return class_distance(pn, unit(d.eval(z))); };

  double best = 1e300;
  cdouble best_z = 0.0;
  for (double r : {0.0, r_max / 3.0, 2.0 * r_max / 3.0, r_max}) {
    int na = r == 0.0 ? 1 : 12;
    for (int a = 0; a < na; ++a) {
      cdouble z = std::polar(r, 2 * kPi * a / na);
      double v = dist(z);
      if (v < best) {
        best = v;
        best_z = z;
      }
    }
  }
  // Contracting lattice search; each level's span exceeds the previous step,
  // so the running minimum cannot escape between levels.  The distance to a
  // surface through p is conical in the parameter, so accuracy is linear in
  // the final lattice width.
  double w = r_max / 3.0;
  for (int level = 0; level < 12; ++level) {
    cdouble center = best_z;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        cdouble z = center + cdouble(i * w / 2.0, j * w / 2.0);
        if (std::abs(z) > r_max) continue;
        double v = dist(z);
        if (v < best) {
          best = v;
          best_z = z;
        }
      }
    w *= 0.4;
  }
  return best;
}

int count_disks_through(const FamilyGrid& fam, const CVec4& p, double tol) {
  CVec4 pn = unit(p);
  int hits = 0;
  for (const DiskSolution& d : fam.disks) {
    // The screen radius exceeds the mesh width of the sample cloud, so a disk
    // actually through p can never be screened out.
    double coarse = 1e300;
    for (double r : {0.0, 0.35, 0.65, 0.9}) {
      int na = r == 0.0 ? 1 : 8;
      for (int a = 0; a < na && coarse > 0.5; ++a)
        coarse = std::min(
            coarse,
            class_distance(pn, unit(d.eval(std::polar(r, 2 * kPi * a / na)))));
    }
    if (coarse > 0.5) continue;
    if (disk_point_distance(d, p) < tol) ++hits;
  }
  return hits;
}

double sampled_interior_gap(const DiskSolution& a, const DiskSolution& b,
                            double r_max) {
  std::vector<CVec4> ca, cb;
  for (double r : {0.0, r_max / 3.0, 2.0 * r_max / 3.0, r_max}) {
    int na = r == 0.0 ? 1 : 10;
    for (int k = 0; k < na; ++k) {
      cdouble z = std::polar(r, 2 * kPi * k / na);
      ca.push_back(unit(a.eval(z)));
      cb.push_back(unit(b.eval(z)));
    }
  }
  double gap = 1e300;
  for (const CVec4& x : ca)
    for (const CVec4& y : cb) gap = std::min(gap, class_distance(x, y));
  return gap;
}

void save_family(const FamilyGrid& fam, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  rp3::save_embedding(fam.embedding, dir + "/embedding.json");

  int K = fam.per_factor();
  json index;
  index["schema"] = "diskfamily-v1";
  index["n_lat"] = fam.n_lat;
  index["n_lon"] = fam.n_lon;
  index["rows"] = K;
  index["failures"] = fam.failures;
  index["continuation_order"] = fam.continuation_order;
  index["maslov"] = fam.maslov;
  index["quadric_meets"] = fam.quadric_meets;
  {
    std::ofstream out(dir + "/index.json");
    out << index.dump(1) << "\n";
  }
  for (int ix = 0; ix < K; ++ix) {
    json row;
    row["schema"] = "diskfamily-row-v1";
    row["ix"] = ix;
    json rec = json::array();
    for (int iy = 0; iy < K; ++iy)
      rec.push_back(disk_to_json(fam.disks[fam.index(ix, iy)]));
    row["disks"] = rec;
    std::ostringstream name;
    name << dir << "/row_" << ix << ".json";
    std::ofstream out(name.str());
    out << row.dump() << "\n";
  }
}

FamilyGrid load_family(const std::string& dir) {
  std::ifstream in(dir + "/index.json");
  if (!in) throw domain_error("cannot open family index in " + dir);
  json index = json::parse(in);
  if (index.at("schema").get<std::string>() != "diskfamily-v1")
    throw domain_error("unrecognized family schema");

  FamilyGrid fam;
  fam.embedding = rp3::load_embedding(dir + "/embedding.json");
  fam.n_lat = index.at("n_lat").get<int>();
  fam.n_lon = index.at("n_lon").get<int>();
  fam.failures = index.at("failures").get<std::vector<int>>();
  fam.continuation_order =
      index.at("continuation_order").get<std::vector<int>>();
  fam.maslov = index.at("maslov").get<std::vector<int>>();
  fam.quadric_meets = index.at("quadric_meets").get<std::vector<int>>();
  fam.disks.resize(fam.size());

  int K = fam.per_factor();
  for (int ix = 0; ix < K; ++ix) {
    std::ostringstream name;
    name << dir << "/row_" << ix << ".json";
    std::ifstream rin(name.str());
    if (!rin) throw domain_error("missing family row file " + name.str());
    json row = json::parse(rin);
    const json& rec = row.at("disks");
    if ((int)rec.size() != K) throw domain_error("family row length mismatch");
    for (int iy = 0; iy < K; ++iy)
      fam.disks[fam.index(ix, iy)] = disk_from_json(rec[iy]);
  }
  return fam;
}

}  // namespace zollfrei::disks
