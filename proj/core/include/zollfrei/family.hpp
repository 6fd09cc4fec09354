#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zollfrei/disks.hpp"
#include "zollfrei/rp3.hpp"
#include "zollfrei/util.hpp"

namespace zollfrei::disks {

// Node idx of an n_lat x n_lon latitude-longitude sphere grid.  Latitudes sit
// at interior parallels, so no node is a pole.
Vec3 sphere_node(int n_lat, int n_lon, int idx);

// Orthonormal tangent basis at a grid node, deterministic in the node alone.
std::array<Vec3, 2> sphere_tangent_basis(const Vec3& x);

struct FamilyConfig {
  SolveConfig solve;
  int n_lat = 8;  // per sphere factor
  int n_lon = 8;
  int workers = 1;
  bool certify = true;     // Maslov and quadric-meet counts for every disk
  int spot_checks = 12;    // random interior points tested for unique coverage
  double foliation_tol = 1e-5;
  std::uint64_t seed = 0;  // drives the spot-check sampling only
};

// The solved 4-parameter disk family over the anchor grid on the quadric.
// Index (ix, iy) pairs a node of the first sphere grid with one of the second.
struct FamilyGrid {
  rp3::TotallyRealEmbedding embedding;
  int n_lat = 0;
  int n_lon = 0;
  std::vector<DiskSolution> disks;       // row-major, ix * per_factor() + iy
  std::vector<int> continuation_order;   // traversal order used for warm starts
  std::vector<int> failures;             // flat indices of unconverged cells
  std::vector<int> maslov;               // per disk; empty when not certified
  std::vector<int> quadric_meets;        // per disk; empty when not certified

  int per_factor() const { return n_lat * n_lon; }
  int size() const { return per_factor() * per_factor(); }
  int index(int ix, int iy) const { return ix * per_factor() + iy; }
  const DiskSolution& at(int ix, int iy) const { return disks[index(ix, iy)]; }
  Vec3 x_node(int ix) const { return sphere_node(n_lat, n_lon, ix); }
  Vec3 y_node(int iy) const { return sphere_node(n_lat, n_lon, iy); }
  rp3::QuadricPoint anchor(int ix, int iy) const {
    return rp3::quadric_from_spheres(x_node(ix), y_node(iy));
  }
  bool complete() const { return failures.empty(); }
};

// Continuation solve over the whole grid: column of row heads first, then each
// row swept from its head, warm starting every cell from its predecessor.
// Solver failures are recorded in `failures` and leave the seed disk in place;
// a failed foliation spot check throws degeneracy_error.
FamilyGrid build_family(const rp3::TotallyRealEmbedding& P,
                        const FamilyConfig& cfg);

// Distance from a projective point to the sampled interior |zeta| <= r_max of
// a disk, refined to well below foliation tolerance.
double disk_point_distance(const DiskSolution& d, const CVec4& p,
                           double r_max = 0.98);

// Number of family members whose interior passes within tol of p.
int count_disks_through(const FamilyGrid& fam, const CVec4& p, double tol);

// Minimum pairwise distance between fixed interior sample clouds of two disks.
double sampled_interior_gap(const DiskSolution& a, const DiskSolution& b,
                            double r_max = 0.7);

// Directory persistence: an index plus one record file per grid row.
void save_family(const FamilyGrid& fam, const std::string& dir);
FamilyGrid load_family(const std::string& dir);

}  // namespace zollfrei::disks
