#include "zollfrei/config.hpp"

#include <cstdio>

#include "zollfrei/util.hpp"

namespace zollfrei::harness {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.tol <= 0) throw domain_error("config: tol must be positive");
  if (cfg.check_tol <= 0) throw domain_error("config: check-tol must be positive");
  if (cfg.gap_tol <= 0) throw domain_error("config: gap-tol must be positive");
  if (cfg.modes < 4) throw domain_error("config: modes must be at least 4");
  if (cfg.samples < 1) throw domain_error("config: samples must be positive");
  if (cfg.grid < 8) throw domain_error("config: grid minimum is 8 per factor");
  if (cfg.zeta_grid < 2) throw domain_error("config: zeta-grid minimum is 2");
  if (cfg.workers < 1) throw domain_error("config: workers must be positive");
  if (cfg.extent <= 0) throw domain_error("config: extent must be positive");
  if (cfg.surface_n < 8) throw domain_error("config: surface-n minimum is 8");
  if (cfg.max_length <= 0) throw domain_error("config: max-length must be positive");
}

std::vector<std::pair<std::string, std::string>> canonical_kv(
    const RunConfig& cfg) {
  return {
      {"metric", cfg.metric},
      {"embedding", cfg.embedding},
      {"anchor", cfg.anchor},
      {"modes", std::to_string(cfg.modes)},
      {"tol", fmt_double(cfg.tol)},
      {"check_tol", fmt_double(cfg.check_tol)},
      {"gap_tol", fmt_double(cfg.gap_tol)},
      {"samples", std::to_string(cfg.samples)},
      {"grid", std::to_string(cfg.grid)},
      {"zeta_grid", std::to_string(cfg.zeta_grid)},
      {"max_length", fmt_double(cfg.max_length)},
      {"extent", fmt_double(cfg.extent)},
      {"surface_n", std::to_string(cfg.surface_n)},
      {"seed", std::to_string(cfg.seed)},
      {"workers", std::to_string(cfg.workers)},
      {"out_dir", cfg.out_dir},
  };
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ull;
  };
  for (const auto& [k, v] : canonical_kv(cfg)) {
    mix(k);
    mix(v);
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

}  // namespace zollfrei::harness
