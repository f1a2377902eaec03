#include "scalesim/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scalesim/errors.hpp"
#include "scalesim/format.hpp"

namespace scalesim {

namespace pt = boost::property_tree;

const std::vector<std::string>& known_tests() {
  static const std::vector<std::string> names{
      "hypotheses", "coefficients", "qv", "drift", "distinctness", "exit_law", "skew", "ks"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"name", "seed"}},
      {"spec",
       {"kind", "depth", "removal_scale", "removal_ratio", "staircase_depth", "drift",
        "drift_param", "alpha", "family"}},
      {"simulation", {"horizon", "paths", "spacing", "reach", "x_start", "record_paths"}},
      {"tests",
       {"run", "window", "exit_events", "level", "windows", "probes", "alphas"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& field, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& field, const std::string& v) {
  try {
    if (v.empty() || v[0] == '-') throw std::invalid_argument("sign");
    std::size_t pos = 0;
    unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return u;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a non-negative integer, got '" + v + "'");
  }
}

std::vector<double> to_doubles(const std::string& field, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(field, item));
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : t_(t) {}
  bool has(const std::string& key) const { return t_.get_optional<std::string>(key).has_value(); }
  std::string str(const std::string& key, const std::string& def) const {
    return trim(t_.get<std::string>(key, def));
  }
  double num(const std::string& key, double def) const {
    return has(key) ? to_double(key, str(key, "")) : def;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t def) const {
    return has(key) ? to_u64(key, str(key, "")) : def;
  }
  std::vector<double> nums(const std::string& key) const {
    return has(key) ? to_doubles(key, str(key, "")) : std::vector<double>{};
  }

 private:
  const pt::ptree& t_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError(section + ": key outside any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

std::string write_ini(const pt::ptree& t) {
  std::ostringstream os;
  pt::write_ini(os, t);
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides,
                              const std::string& source) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not KEY=VALUE");
    std::string key = trim(o.substr(0, eq));
    if (key.find('.') == std::string::npos) {
      throw ConfigError("override key '" + key + "' must be section.key");
    }
    tree.put(key, trim(o.substr(eq + 1)));
  }
  check_keys(tree);
  Reader r(tree);

  ExperimentConfig c;
  c.name = r.str("experiment.name", "experiment");
  if (!r.has("experiment.seed")) throw ConfigError("experiment.seed: missing (required)");
  c.seed = r.u64("experiment.seed", 0);

  SpecBlock& s = c.spec;
  s.kind = r.str("spec.kind", "");
  static const std::set<std::string> kinds{"brownian", "cantor", "staircase", "orey", "skew"};
  if (!kinds.count(s.kind)) throw ConfigError("spec.kind: unknown kind '" + s.kind + "'");
  s.depth = static_cast<int>(r.u64("spec.depth", 12));
  s.removal_scale = r.num("spec.removal_scale", 1.0);
  s.removal_ratio = r.num("spec.removal_ratio", 0.25);
  s.staircase_depth = static_cast<int>(r.u64("spec.staircase_depth", 40));
  s.drift = r.str("spec.drift", "constant");
  static const std::set<std::string> drifts{"zero", "constant", "sine", "linear"};
  if (!drifts.count(s.drift)) throw ConfigError("spec.drift: unknown drift '" + s.drift + "'");
  s.drift_param = r.num("spec.drift_param", 1.0);
  s.alpha = r.num("spec.alpha", 0.3);
  if (!(s.alpha > 0 && s.alpha < 1)) throw ConfigError("spec.alpha: must be in (0, 1)");
  s.family = r.nums("spec.family");
  for (double f : s.family) {
    if (!(f >= 0 && f <= 1)) throw ConfigError("spec.family: fractions must be in [0, 1]");
  }
  if (!s.family.empty() && s.kind != "cantor") {
    throw ConfigError("spec.family: subspace families need kind = cantor");
  }

  SimBlock& m = c.sim;
  m.horizon = r.num("simulation.horizon", 1.0);
  if (!(m.horizon > 0)) throw ConfigError("simulation.horizon: must be positive");
  m.paths = r.u64("simulation.paths", 10000);
  if (m.paths == 0) throw ConfigError("simulation.paths: must be positive");
  m.spacing = r.num("simulation.spacing", 0.02);
  if (!(m.spacing > 0)) throw ConfigError("simulation.spacing: must be positive");
  m.reach = r.num("simulation.reach", 6.0);
  if (!(m.reach > 0)) throw ConfigError("simulation.reach: must be positive");
  m.x_start = r.num("simulation.x_start", 0.0);
  m.record_paths = r.u64("simulation.record_paths", 5);

  TestBlock& t = c.tests;
  for (const auto& name : split_list(r.str("tests.run", "hypotheses"))) {
    const auto& k = known_tests();
    if (std::find(k.begin(), k.end(), name) == k.end()) {
      throw ConfigError("tests.run: unknown test '" + name + "'");
    }
    t.names.push_back(name);
  }
  if (r.has("tests.window")) {
    auto w = r.nums("tests.window");
    if (w.size() != 3 || !(w[0] < w[1] && w[1] < w[2])) {
      throw ConfigError("tests.window: expected a, x, b with a < x < b");
    }
    t.has_window = true;
    t.window = Window{w[0], w[1], w[2]};
  }
  t.exit_events = r.u64("tests.exit_events", 100000);
  t.level = r.num("tests.level", 0.01);
  if (!(t.level > 0 && t.level < 1)) throw ConfigError("tests.level: must be in (0, 1)");
  t.windows = r.u64("tests.windows", 20);
  t.probes = r.u64("tests.probes", 1000);
  t.alphas = r.nums("tests.alphas");
  for (double a : t.alphas) {
    if (!(a > 0 && a < 1)) throw ConfigError("tests.alphas: values must be in (0, 1)");
  }
  auto uses = [&](const char* n) {
    return std::find(t.names.begin(), t.names.end(), n) != t.names.end();
  };
  if (uses("distinctness") && !t.has_window) {
    throw ConfigError("tests.window: required by the distinctness test");
  }
  if ((uses("distinctness") || uses("ks")) && s.family.size() < 2) {
    throw ConfigError("spec.family: the distinctness and ks tests need two or more members");
  }

  c.out_dir = r.str("output.dir", "out");
  c.canonical = write_ini(tree);
  pt::ptree spec_only;
  if (auto sp = tree.get_child_optional("spec")) spec_only.put_child("spec", *sp);
  c.canonical_spec = write_ini(spec_only);
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

}  // namespace scalesim
