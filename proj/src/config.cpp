#include "bifrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bifrac {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct CallExpr {
  std::string name;
  std::vector<std::pair<std::string, double>> args;  // name may be empty (positional)
};

CallExpr parse_call(const std::string& text) {
  CallExpr out;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    out.name = trim(text);
    return out;
  }
  const auto close = text.rfind(')');
  if (close == std::string::npos || close < open)
    throw ConfigError("unbalanced parentheses in '" + text + "'");
  out.name = trim(text.substr(0, open));
  std::string inner = text.substr(open + 1, close - open - 1);
  std::stringstream ss(inner);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    const auto eq = piece.find('=');
    std::string key;
    std::string value = piece;
    if (eq != std::string::npos) {
      key = trim(piece.substr(0, eq));
      value = trim(piece.substr(eq + 1));
    }
    try {
      out.args.emplace_back(key, std::stod(value));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric argument '" + piece + "' in '" + text + "'");
    }
  }
  return out;
}

double named_or_pos(const CallExpr& call, const std::string& name, size_t pos,
                    std::optional<double> fallback = std::nullopt) {
  for (const auto& [k, v] : call.args)
    if (k == name) return v;
  size_t seen = 0;
  for (const auto& [k, v] : call.args) {
    if (!k.empty()) continue;
    if (seen == pos) return v;
    ++seen;
  }
  if (fallback) return *fallback;
  throw ConfigError("missing argument '" + name + "' for " + call.name);
}

}  // namespace

YoungFunction parse_young(const std::string& text) {
  const CallExpr call = parse_call(text);
  if (call.name == "power") return YoungFunction::power(named_or_pos(call, "p", 0));
  if (call.name == "logbump")
    return YoungFunction::log_bump(named_or_pos(call, "r", 0), named_or_pos(call, "s", 1));
  if (call.name == "llogl") return YoungFunction::l_log_l(named_or_pos(call, "k", 0));
  if (call.name == "expl") return YoungFunction::exp_l();
  if (call.name == "explpow") return YoungFunction::exp_l_pow(named_or_pos(call, "xi", 0));
  if (call.name == "revlogbump")
    return YoungFunction::reverse_log_bump(named_or_pos(call, "p", 0), named_or_pos(call, "c", 1));
  throw ConfigError("unknown Young function '" + text +
                    "' (expected power/logbump/llogl/expl/explpow/revlogbump)");
}

Weight WeightSpecText::build(const Mesh& mesh, const std::string& search_dir) const {
  if (trim(text).rfind("file(", 0) == 0) {
    // the argument is a path, not a number: extract it literally
    const auto open = text.find('('), close = text.rfind(')');
    if (close == std::string::npos || close < open)
      throw ConfigError("unbalanced parentheses in '" + text + "'");
    std::string path = trim(text.substr(open + 1, close - open - 1));
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates;
    if (const char* env = std::getenv("BIFRAC_FIXTURES")) candidates.push_back(fs::path(env) / path);
    if (!search_dir.empty()) candidates.push_back(fs::path(search_dir) / path);
    candidates.push_back(path);
    for (const auto& cand : candidates) {
      if (!fs::exists(cand)) continue;
      std::ifstream in(cand, std::ios::binary);
      GridFunction g = cand.extension() == ".csv" ? GridFunction::read_csv(in)
                                                  : GridFunction::read_binary(in);
      if (!(g.mesh() == mesh))
        throw ConfigError("weight fixture '" + path + "' mesh does not match the experiment mesh");
      return Weight::from_grid(std::move(g));
    }
    throw ConfigError("weight fixture not found: " + path);
  }
  const CallExpr call = parse_call(text);
  if (call.name == "power") return Weight::abs_power(mesh, named_or_pos(call, "a", 0));
  if (call.name == "const")
    return Weight::from_grid(GridFunction::constant(mesh, named_or_pos(call, "c", 0, 1.0)));
  throw ConfigError("unknown weight spec '" + text + "' (expected power/const/file)");
}

std::vector<FamilyEntry> parse_family(const std::string& text) {
  std::vector<FamilyEntry> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ';')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    FamilyEntry entry;
    std::string body = piece;
    const auto at = body.find('@');
    if (at != std::string::npos) {
      const std::string box = trim(body.substr(at + 1));
      body = trim(body.substr(0, at));
      const auto colon = box.find(':');
      if (colon == std::string::npos) throw ConfigError("family box must be lo:hi in '" + piece + "'");
      try {
        entry.box = {std::stod(box.substr(0, colon)), std::stod(box.substr(colon + 1))};
      } catch (const std::exception&) {
        throw ConfigError("bad family box in '" + piece + "'");
      }
    }
    const auto star = body.find('*');
    if (star != std::string::npos) {
      entry.count = static_cast<int>(std::stoll(body.substr(star + 1)));
      body = trim(body.substr(0, star));
    }
    const CallExpr call = parse_call(body);
    entry.kind = family_kind_from_name(call.name);
    if (entry.kind == FamilyKind::truncated_power || entry.kind == FamilyKind::necessity)
      entry.exponent = named_or_pos(call, "a", 0, -0.5);
    out.push_back(entry);
  }
  if (out.empty()) throw ConfigError("empty family spec");
  return out;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ConfigFile cfg = parse_text(buf.str(), path);
  cfg.origin_dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile out;
  std::stringstream ss(text);
  std::string line;
  std::string section = "";
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      out.data_.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (out.data_.empty() || out.data_.back().first != section)
      out.data_.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
    out.data_.back().second.emplace_back(key, value);
  }
  return out;
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
  for (const auto& [sec, kvs] : data_) {
    if (sec != section) continue;
    for (const auto& [k, v] : kvs)
      if (k == key) return &v;
  }
  return nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) throw ConfigError("missing config key [" + section + "] " + key);
  return *v;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

double ConfigFile::number(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key + " is not a number: " + v);
  }
}

double ConfigFile::number_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long long ConfigFile::integer_or(const std::string& section, const std::string& key,
                                 long long fallback) const {
  return has(section, key) ? static_cast<long long>(number(section, key)) : fallback;
}

std::string ConfigFile::emit() const {
  std::ostringstream os;
  for (const auto& [sec, kvs] : data_) {
    if (!sec.empty()) os << "[" << sec << "]\n";
    for (const auto& [k, v] : kvs) os << k << " = " << v << "\n";
  }
  return os.str();
}

uint64_t ConfigFile::hash() const { return fnv1a64(emit()); }

ExperimentSpec ExperimentSpec::from_config(const ConfigFile& file) {
  ExperimentSpec spec;
  spec.theorem = file.get_or("experiment", "theorem", "thmG");
  spec.seed = static_cast<uint64_t>(file.integer_or("experiment", "seed", 1));
  spec.threads = static_cast<int>(file.integer_or("experiment", "threads", 0));
  spec.search_dir = file.origin_dir();
  spec.config_hash = file.hash();

  Mesh mesh;
  mesh.dim = static_cast<int>(file.integer_or("mesh", "n", 1));
  mesh.box_level = static_cast<int>(file.integer_or("mesh", "L0", 1));
  mesh.res_level = static_cast<int>(file.integer_or("mesh", "L", 7));
  mesh.validate();
  const int steps = static_cast<int>(file.integer_or("mesh", "refine", 2));
  const std::string ladder_kind = file.get_or("mesh", "ladder", "refinement");
  if (ladder_kind == "refinement") {
    spec.ladder = refinement_ladder(mesh.dim, mesh.box_level, mesh.res_level, steps);
  } else if (ladder_kind == "truncation") {
    spec.ladder = truncation_ladder(mesh.dim, steps, mesh.box_level, mesh.res_level);
  } else {
    throw ConfigError("unknown ladder kind: " + ladder_kind);
  }

  spec.cfg.n = mesh.dim;
  spec.cfg.alpha = file.number_or("exponents", "alpha", 0.5);
  spec.cfg.p1 = file.number_or("exponents", "p1", 4);
  spec.cfg.p2 = file.number_or("exponents", "p2", 4);
  spec.cfg.q = file.number_or("exponents", "q", 2);
  if (file.has("exponents", "r")) {
    spec.cfg.r = file.number("exponents", "r");
    spec.cfg.s = file.number_or("exponents", "s", spec.cfg.r.value() / (spec.cfg.r.value() - 1));
  }
  spec.cfg.commutator_arity = static_cast<int>(file.integer_or("exponents", "N", 0));
  spec.cfg.first_slot_count = static_cast<int>(file.integer_or("exponents", "m", 0));
  spec.cfg.sobolev = file.get_or("exponents", "sobolev", "false") == "true";
  spec.delta = file.number_or("exponents", "delta", 0.5);
  if (file.has("exponents", "p")) {
    const double stated = file.number("exponents", "p");
    if (std::abs(1.0 / stated - (1.0 / spec.cfg.p1 + 1.0 / spec.cfg.p2)) > 1e-12)
      throw ConfigError("stated p contradicts 1/p = 1/p1 + 1/p2");
  }
  spec.cfg.validate();

  spec.u.text = file.get_or("weights", "u", "const(1)");
  spec.v1.text = file.get_or("weights", "v1", "const(1)");
  spec.v2.text = file.get_or("weights", "v2", "const(1)");

  if (file.has("young", "psi")) spec.psi = parse_young(file.get("young", "psi"));
  if (file.has("young", "phi1")) spec.phi1 = parse_young(file.get("young", "phi1"));
  if (file.has("young", "phi2")) spec.phi2 = parse_young(file.get("young", "phi2"));

  spec.family = parse_family(file.get_or(
      "family", "members", "indicator@0.25:1.25; tent*2@-1.75:-0.25; random*2@0.5:1.5"));

  if (file.has("symbols", "b1")) {
    for (int i = 1; i <= 4; ++i) {
      const std::string key = "b" + std::to_string(i);
      if (!file.has("symbols", key)) break;
      spec.symbols.push_back(file.get("symbols", key));
    }
  }

  spec.scan_stride_shift = file.integer_or("scan", "stride_shift", 6);
  spec.scan_random = static_cast<int>(file.integer_or("scan", "random", 0));
  spec.cz_base = file.number_or("sparse", "a", 0.0);

  if (file.has("steinweiss", "alpha")) {
    SteinWeissExponents sw;
    sw.n = mesh.dim;
    sw.alpha = file.number("steinweiss", "alpha");
    sw.beta = file.number_or("steinweiss", "beta", 0);
    sw.gamma1 = file.number_or("steinweiss", "gamma1", 0);
    sw.gamma2 = file.number_or("steinweiss", "gamma2", 0);
    sw.p1 = file.number_or("steinweiss", "p1", spec.cfg.p1);
    sw.p2 = file.number_or("steinweiss", "p2", spec.cfg.p2);
    sw.q = file.number_or("steinweiss", "q", spec.cfg.q);
    spec.steinweiss = sw;
  }
  if (file.has("section10", "alpha")) {
    spec.section10 = {{file.number("section10", "alpha"), file.number("section10", "beta")}};
  }

  spec.out_path = file.get_or("output", "path", "");
  spec.format = file.get_or("output", "format", "json");
  if (spec.format != "json" && spec.format != "csv")
    throw ConfigError("output format must be json or csv");
  return spec;
}

CubeScan ExperimentSpec::build_scan(const Mesh& mesh) const {
  const long long stride = std::max(1LL, mesh.cells_per_axis() >> scan_stride_shift);
  CubeScan scan = CubeScan::mesh_aligned(mesh, stride);
  if (scan_random > 0) scan.add_random(scan_random, seed ^ 0x5eedULL);
  return scan;
}

PairFamily ExperimentSpec::build_pairs(const Mesh& mesh, const WeightTriple& weights) const {
  PairFamily pairs;
  std::vector<GridFunction> members;
  std::vector<std::string> labels;
  uint64_t member_seed = seed;
  for (const auto& entry : family) {
    FamilySpec fs;
    fs.kind = entry.kind;
    fs.count = entry.count;
    fs.exponent = entry.exponent;
    if (entry.box) {
      fs.box = mesh.dim == 1 ? Cube::interval(entry.box->first, entry.box->second)
                             : Cube::square(entry.box->first, entry.box->first,
                                            entry.box->second - entry.box->first);
    }
    if (entry.kind == FamilyKind::necessity) {
      // extremal pairs built from the weights on aligned cubes
      const double r = cfg.r.value_or(2.0), s = cfg.s ? *cfg.s : 2.0;
      const GridFunction& v1g = weights.v1.grid();
      const GridFunction& v2g = weights.v2.grid();
      for (int c = 0; c < entry.count; ++c) {
        const double side = mesh.half_width() / (2 << c);
        const double lo = entry.box ? entry.box->first : -side / 2;
        const Cube q = mesh.dim == 1 ? Cube::interval(lo, lo + side)
                                     : Cube::square(lo, lo, side);
        GridFunction chi = GridFunction::indicator(mesh, q);
        GridFunction fq = GridFunction::zip(v1g, chi, [&](double v, double ch) {
          return ch > 0 ? std::pow(v, -1.0 / (cfg.p1 - r)) * ch : 0.0;
        });
        GridFunction gq = GridFunction::zip(v2g, chi, [&](double v, double ch) {
          return ch > 0 ? std::pow(v, -1.0 / (cfg.p2 - s)) * ch : 0.0;
        });
        pairs.push_back({std::move(fq), std::move(gq), "necessity#" + std::to_string(c)});
      }
      member_seed += 17;
      continue;
    }
    auto built = make_test_family(mesh, fs, member_seed);
    for (size_t i = 0; i < built.size(); ++i) {
      members.push_back(std::move(built[i]));
      labels.push_back(std::string(family_kind_name(entry.kind)) + "#" + std::to_string(i));
    }
    member_seed += 17;
  }
  for (size_t i = 0; i + 1 < members.size(); i += 2)
    pairs.push_back({members[i], members[i + 1], labels[i] + "|" + labels[i + 1]});
  if (members.size() % 2 == 1 && members.size() >= 2)
    pairs.push_back({members.back(), members.front(), labels.back() + "|" + labels.front()});
  if (pairs.empty()) throw ConfigError("family produced no test pairs");
  return pairs;
}

GridFunction ExperimentSpec::build_symbol(const Mesh& mesh, const std::string& name) const {
  const CallExpr call = parse_call(name);
  if (call.name == "linear")
    return GridFunction::sample(mesh, [](const Point& p) { return p[0]; });
  if (call.name == "sign")
    return GridFunction::sample(mesh, [](const Point& p) { return p[0] >= 0 ? 1.0 : -1.0; });
  if (call.name == "logabs") return GridFunction::log_abs(mesh);
  if (call.name == "sin") {
    const double k = named_or_pos(call, "k", 0, 1.0);
    return GridFunction::sample(mesh, [k](const Point& p) { return std::sin(k * p[0]); });
  }
  throw ConfigError("unknown commutator symbol '" + name + "' (linear/sign/logabs/sin)");
}

}  // namespace bifrac
