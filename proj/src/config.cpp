#include "combwalk/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace combwalk {

namespace pt = boost::property_tree;

namespace {

const std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::simulate, "simulate"}, {Experiment::equivalence, "equivalence"},
    {Experiment::density, "density"},   {Experiment::exponent, "exponent"},
    {Experiment::comb, "comb"},         {Experiment::supcheck, "supcheck"},
    {Experiment::laws_table, "laws-table"},
};

const std::set<std::string> kRunKeys = {"n_steps", "replicas", "seed", "engine", "dt", "output_dir", "threads"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_minus(std::string s) {
  const std::string umin = "\xE2\x88\x92";  // U+2212
  for (auto p = s.find(umin); p != std::string::npos; p = s.find(umin)) s.replace(p, umin.size(), "-");
  return s;
}

std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_plain(const std::string& s) {
  size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

using Sections = std::map<std::string, std::map<std::string, std::string>>;

BSpec parse_bspec(const Sections& secs, const std::string& name, nlohmann::json& echo, int depth) {
  if (depth > 16) throw ConfigError("bspec: composition nested too deeply (cycle?)");
  const auto it = secs.find(name);
  if (it == secs.end()) throw ConfigError("missing section [" + name + "]");
  Section s(name, it->second);
  const std::string kind = s.text("kind", "");
  echo["kind"] = kind;
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"finite", {"levels"}},          {"periodic", {"L", "K"}},
      {"power_gap", {"alpha", "alpha_pos", "alpha_neg"}},
      {"halfplane", {}},               {"all_levels", {}},
      {"union", {"left", "right"}},    {"difference", {"left", "right"}}};
  if (const auto a = allowed.find(kind); a != allowed.end()) {
    for (const auto& [k, v] : it->second) {
      if (k != "kind" && !a->second.contains(k)) throw ConfigError(name + "." + k + ": unknown key for kind " + kind);
    }
  }
  auto positive = [&](const std::string& key) {
    const auto v = s.integer(key);
    if (!v || *v < 1) throw ConfigError(name + "." + key + ": expected a positive integer");
    echo[key] = *v;
    return *v;
  };
  try {
    if (kind == "finite") {
      std::vector<int64_t> levels;
      for (const auto& item : split_list(normalize_minus(s.text("levels", "")))) {
        const double v = parse_number(item);
        if (v != std::floor(v)) throw ConfigError(name + ".levels: '" + item + "' is not an integer");
        levels.push_back(static_cast<int64_t>(v));
      }
      echo["levels"] = levels;
      return BSpec::finite(levels);
    }
    if (kind == "periodic") {
      const int64_t l = positive("L");
      const int64_t k = positive("K");
      return BSpec::periodic(l, k);
    }
    if (kind == "power_gap") {
      const auto both = s.real("alpha");
      const auto ap = s.real("alpha_pos");
      const auto an = s.real("alpha_neg");
      if (!(ap || both) || !(an || both)) throw ConfigError(name + ": power_gap needs alpha_pos and alpha_neg (or alpha)");
      echo["alpha_pos"] = ap ? *ap : *both;
      echo["alpha_neg"] = an ? *an : *both;
      return BSpec::power_gap(ap ? *ap : *both, an ? *an : *both);
    }
    if (kind == "halfplane") return BSpec::halfplane();
    if (kind == "all_levels") return BSpec::all_levels();
    if (kind == "union" || kind == "difference") {
      const auto left = s.text("left");
      const auto right = s.text("right");
      if (!left || !right) throw ConfigError(name + ": " + kind + " needs left and right section names");
      BSpec l = parse_bspec(secs, "bspec." + *left, echo["left"], depth + 1);
      BSpec r = parse_bspec(secs, "bspec." + *right, echo["right"], depth + 1);
      return kind == "union" ? BSpec::set_union(std::move(l), std::move(r))
                             : BSpec::set_difference(std::move(l), std::move(r));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what());
  }
  throw ConfigError(name + ".kind: unknown kind '" + kind + "'");
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, n] : kExperimentNames) {
    if (k == e) return n;
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (const auto& [k, n] : kExperimentNames) {
    if (s == n) return k;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

std::vector<EngineKind> engines_of(EngineChoice c) {
  switch (c) {
    case EngineChoice::markov:
      return {EngineKind::markov};
    case EngineChoice::decomposed:
      return {EngineKind::decomposed};
    case EngineChoice::both:
      return {EngineKind::markov, EngineKind::decomposed};
  }
  return {};
}

double parse_number(const std::string& text) {
  const std::string s = trim(normalize_minus(text));
  try {
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      return parse_plain(trim(s.substr(0, slash))) / parse_plain(trim(s.substr(slash + 1)));
    }
    return parse_plain(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
}

std::optional<std::string> Section::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_[key] = it->second;
  return it->second;
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
  auto v = text(key);
  if (!v) used_[key] = fallback;
  return v ? *v : fallback;
}

std::optional<double> Section::real(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  try {
    const double v = parse_number(it->second);
    used_[key] = v;
    return v;
  } catch (const std::invalid_argument&) {
    throw ConfigError(field(key) + ": expected a number, got '" + it->second + "'");
  }
}

double Section::real(const std::string& key, double fallback) const {
  auto v = real(key);
  if (!v) used_[key] = fallback;
  return v ? *v : fallback;
}

std::optional<int64_t> Section::integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  double v = 0.0;
  try {
    v = parse_number(it->second);
  } catch (const std::invalid_argument&) {
    throw ConfigError(field(key) + ": expected an integer, got '" + it->second + "'");
  }
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ConfigError(field(key) + ": expected an integer, got '" + it->second + "'");
  }
  used_[key] = static_cast<int64_t>(v);
  return static_cast<int64_t>(v);
}

int64_t Section::integer(const std::string& key, int64_t fallback) const {
  auto v = integer(key);
  if (!v) used_[key] = fallback;
  return v ? *v : fallback;
}

uint64_t Section::u64(const std::string& key, uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    used_[key] = fallback;
    return fallback;
  }
  const std::string s = trim(it->second);
  size_t used = 0;
  uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s.front() == '-') {
    throw ConfigError(field(key) + ": expected an unsigned 64-bit integer, got '" + it->second + "'");
  }
  used_[key] = v;
  return v;
}

std::vector<double> Section::reals(const std::string& key, std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    used_[key] = fallback;
    return fallback;
  }
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) {
    try {
      out.push_back(parse_number(item));
    } catch (const std::invalid_argument&) {
      throw ConfigError(field(key) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(field(key) + ": empty list");
  used_[key] = out;
  return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  // '#' comments are blanked so that parser line numbers still match the file.
  std::stringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    cleaned << (!t.empty() && t.front() == '#' ? "" : line) << '\n';
  }
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig cfg;
  cfg.source = source;
  Sections secs;
  for (const auto& [key, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      if (key != "experiment") throw ConfigError(source + ": unknown top-level key '" + key + "'");
      cfg.experiment = experiment_from_string(trim(node.data()));
      continue;
    }
    auto& sec = secs[key];
    for (const auto& [k, v] : node) sec[k] = trim(v.data());
  }
  for (const auto& [name, values] : secs) {
    if (name == "run") {
      for (const auto& [k, v] : values) {
        if (!kRunKeys.contains(k)) throw ConfigError("run." + k + ": unknown key");
      }
    } else if (name != "params" && name != "bspec" && name.rfind("bspec.", 0) != 0) {
      throw ConfigError(source + ": unknown section [" + name + "]");
    }
  }
  if (secs.contains("bspec")) cfg.bspec = parse_bspec(secs, "bspec", cfg.bspec_echo, 0);
  cfg.run = Section("run", secs.contains("run") ? secs.at("run") : std::map<std::string, std::string>{});
  cfg.params = Section("params", secs.contains("params") ? secs.at("params") : std::map<std::string, std::string>{});
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(f, path);
}

}  // namespace combwalk
