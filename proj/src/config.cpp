#include "ignr/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ignr/error.hpp"
#include "ignr/format.hpp"

namespace ignr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InputDomainError("config key '" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InputDomainError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InputDomainError("config key '" + key + "' expects true or false, got '" + v + "'");
}

NodeFeature parse_node_feature(const std::string& v) {
  if (v == "degree") return NodeFeature::kDegree;
  if (v == "constant") return NodeFeature::kConstant;
  throw InputDomainError("node_feature must be degree or constant, got '" + v + "'");
}

}  // namespace

Objective parse_objective(const std::string& text) {
  if (text == "ignr") return Objective::kIgnr;
  if (text == "cignr") return Objective::kCignr;
  if (text == "discrete") return Objective::kDiscrete;
  throw InputDomainError("objective must be ignr, cignr or discrete, got '" + text + "'");
}

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::kIgnr:
      return "ignr";
    case Objective::kCignr:
      return "cignr";
    case Objective::kDiscrete:
      return "discrete";
  }
  return "ignr";
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw InputDomainError("expected a comma-separated list of integers, got '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputDomainError("expected at least one integer");
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

TrainConfig TrainConfig::defaults(Objective objective) {
  TrainConfig c;
  c.objective = objective;
  c.epochs = objective == Objective::kIgnr ? 300 : 200;
  c.gw.max_outer_iters = 10;
  c.gw.tol = 1e-6;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InputDomainError("epochs must be positive");
  if (!(lr >= 0.0)) throw InputDomainError("lr must be nonnegative");
  gw.validate();
  if (gw.init == GwInit::kWarm) throw InputDomainError("gw_init cannot be warm in a config file");
  if (objective != Objective::kIgnr && latent_dim < 1) throw InputDomainError("latent_dim must be positive");
  if (recon_size_policy != "match_input") throw InputDomainError("recon_size_policy must be match_input");
  for (int w : siren_widths) {
    if (w < 1) throw InputDomainError("siren_widths must be positive");
  }
  for (int w : modsiren_widths) {
    if (w < 1) throw InputDomainError("modsiren_widths must be positive");
  }
  for (int w : decoder_widths) {
    if (w < 1) throw InputDomainError("decoder_widths must be positive");
  }
  if (!(omega0 > 0.0)) throw InputDomainError("omega0 must be positive");
  if (gin_width < 1 || gin_layers < 1) throw InputDomainError("gin_width and gin_layers must be positive");
  if (resolution < 2) throw InputDomainError("resolution must be at least 2");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::to_pairs() const {
  return {
      {"objective", to_string(objective)},
      {"epochs", std::to_string(epochs)},
      {"lr", format_double(lr)},
      {"solver", to_string(solver)},
      {"gw_max_iters", std::to_string(gw.max_outer_iters)},
      {"gw_tol", format_double(gw.tol)},
      {"gw_init", to_string(gw.init)},
      {"pg_epsilon", format_double(gw.pg_epsilon)},
      {"pg_inner_iters", std::to_string(gw.pg_inner_iters)},
      {"latent_dim", std::to_string(latent_dim)},
      {"seed", std::to_string(seed)},
      {"shuffle", shuffle ? "true" : "false"},
      {"recon_size_policy", recon_size_policy},
      {"siren_widths", join_ints(siren_widths)},
      {"modsiren_widths", join_ints(modsiren_widths)},
      {"omega0", format_double(omega0)},
      {"gin_width", std::to_string(gin_width)},
      {"gin_layers", std::to_string(gin_layers)},
      {"node_feature", node_feature == NodeFeature::kDegree ? "degree" : "constant"},
      {"decoder_widths", join_ints(decoder_widths)},
      {"resolution", std::to_string(resolution)},
  };
}

TrainConfig TrainConfig::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  Objective objective = Objective::kIgnr;
  for (const auto& [k, v] : pairs) {
    if (k == "objective") objective = parse_objective(v);
  }
  TrainConfig c = defaults(objective);
  for (const auto& [k, v] : pairs) {
    if (k == "objective") {
      continue;
    } else if (k == "epochs") {
      c.epochs = static_cast<int>(to_integer(k, v));
    } else if (k == "lr") {
      c.lr = to_double(k, v);
    } else if (k == "solver") {
      c.solver = parse_gw_solver(v);
    } else if (k == "gw_max_iters") {
      c.gw.max_outer_iters = static_cast<int>(to_integer(k, v));
    } else if (k == "gw_tol") {
      c.gw.tol = to_double(k, v);
    } else if (k == "gw_init") {
      c.gw.init = parse_gw_init(v);
    } else if (k == "pg_epsilon") {
      c.gw.pg_epsilon = to_double(k, v);
    } else if (k == "pg_inner_iters") {
      c.gw.pg_inner_iters = static_cast<int>(to_integer(k, v));
    } else if (k == "latent_dim") {
      c.latent_dim = static_cast<int>(to_integer(k, v));
    } else if (k == "seed") {
      const long long s = to_integer(k, v);
      if (s < 0) throw InputDomainError("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "shuffle") {
      c.shuffle = to_bool(k, v);
    } else if (k == "recon_size_policy") {
      c.recon_size_policy = v;
    } else if (k == "siren_widths") {
      c.siren_widths = parse_int_list(v);
    } else if (k == "modsiren_widths") {
      c.modsiren_widths = parse_int_list(v);
    } else if (k == "omega0") {
      c.omega0 = to_double(k, v);
    } else if (k == "gin_width") {
      c.gin_width = static_cast<int>(to_integer(k, v));
    } else if (k == "gin_layers") {
      c.gin_layers = static_cast<int>(to_integer(k, v));
    } else if (k == "node_feature") {
      c.node_feature = parse_node_feature(v);
    } else if (k == "decoder_widths") {
      c.decoder_widths = parse_int_list(v);
    } else if (k == "resolution") {
      c.resolution = static_cast<int>(to_integer(k, v));
    } else {
      throw InputDomainError("unknown config key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

TrainConfig read_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  try {
    return TrainConfig::from_pairs(pairs);
  } catch (const InputDomainError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  return read_config(in);
}

void write_config(std::ostream& out, const TrainConfig& cfg) {
  for (const auto& [k, v] : cfg.to_pairs()) out << k << " = " << v << '\n';
}

}  // namespace ignr
