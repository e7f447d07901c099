#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bifrac/exponents.hpp"
#include "bifrac/family.hpp"
#include "bifrac/verify.hpp"
#include "bifrac/weights.hpp"
#include "bifrac/young.hpp"

namespace bifrac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Young-function grammar: power(p), logbump(r=..,s=..), llogl(k), expl,
/// explpow(xi=..), revlogbump(p=..,c=..).  Parameters may be positional or
/// named.
YoungFunction parse_young(const std::string& text);

/// Weight grammar: power(a) for |x|^a, const(c), file(path) with the path
/// resolved against BIFRAC_FIXTURES and the config directory.
struct WeightSpecText {
  std::string text;
  Weight build(const Mesh& mesh, const std::string& search_dir) const;
};

/// One test-family entry: kind[(params)][*count][@lo:hi].
struct FamilyEntry {
  FamilyKind kind = FamilyKind::indicator;
  int count = 1;
  double exponent = -0.5;
  std::optional<std::pair<double, double>> box;
};
std::vector<FamilyEntry> parse_family(const std::string& text);

/// Parsed key-value config with sections; round-trips through emit().
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin = "<memory>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  long long integer_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  std::string emit() const;
  const std::string& origin_dir() const { return origin_dir_; }

  /// Stable content hash over the canonical emission (reports embed it).
  uint64_t hash() const;

 private:
  // section -> ordered (key, value) pairs
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> data_;
  std::string origin_dir_;
  const std::string* find(const std::string& section, const std::string& key) const;
};

/// Fully-resolved experiment: mesh ladder, exponents, weights, family, scan.
struct ExperimentSpec {
  std::string theorem = "thmG";
  uint64_t seed = 1;
  int threads = 0;  // 0: default
  std::vector<Mesh> ladder;
  ExponentConfig cfg;
  double delta = 0.5;
  WeightSpecText u{"const(1)"}, v1{"const(1)"}, v2{"const(1)"};
  std::optional<YoungFunction> psi, phi1, phi2;
  std::vector<FamilyEntry> family;
  std::vector<std::string> symbols;  // commutator symbols: linear, logabs, sign, sin(k)
  long long scan_stride_shift = 6;   // stride = max(1, cells >> shift)
  int scan_random = 0;
  double cz_base = 0;                // sparse subcommand: threshold base override
  std::optional<SteinWeissExponents> steinweiss;
  std::optional<std::array<double, 2>> section10;  // (alpha, beta)
  std::string out_path;
  std::string format = "json";
  std::string search_dir;
  uint64_t config_hash = 0;

  static ExperimentSpec from_config(const ConfigFile& cfg_file);
  PairFamily build_pairs(const Mesh& mesh, const WeightTriple& weights) const;
  GridFunction build_symbol(const Mesh& mesh, const std::string& name) const;
  CubeScan build_scan(const Mesh& mesh) const;
};

}  // namespace bifrac
