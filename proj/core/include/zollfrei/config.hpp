#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace zollfrei::harness {

// Effective settings of one CLI invocation, after config file and flag
// overrides.  Field meanings are shared across subcommands; each driver reads
// the subset it documents.
struct RunConfig {
  std::string metric = "g0";
  std::string embedding;  // coefficient file; empty means the unperturbed RP3
  std::string anchor = "0,0,1;0,0,1";  // sphere pair "x1,x2,x3;y1,y2,y3"
  int modes = 32;
  double tol = 1e-10;       // solver / integrator tolerance
  double check_tol = 1e-6;  // residual threshold for pass verdicts
  double gap_tol = 1e-6;    // geodesic closure gap threshold
  int samples = 50;
  int grid = 8;       // family resolution per sphere factor
  int zeta_grid = 5;  // distribution table resolution in zeta
  double max_length = 25.0;
  double extent = 3.141592653589793;  // beta-surface radial extent
  int surface_n = 20;                 // beta-surface direction count
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir = ".";
};

// Throws domain_error naming the offending field.
void validate(const RunConfig& cfg);

// Canonical key=value view in fixed order; doubles rendered round-trip exact.
std::vector<std::pair<std::string, std::string>> canonical_kv(
    const RunConfig& cfg);

// FNV-1a 64 over the canonical view, as 16 hex digits.  Reports embed this so
// a result is traceable to the exact effective configuration.
std::string config_hash(const RunConfig& cfg);

}  // namespace zollfrei::harness
