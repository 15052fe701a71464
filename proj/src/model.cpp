#include "ignr/model.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ignr/error.hpp"

namespace ignr {

using nlohmann::json;

Model Model::zeros(const TrainConfig& config) {
  config.validate();
  Model m;
  m.config = config;
  switch (config.objective) {
    case Objective::kIgnr:
      m.siren = SirenParams::zeros(config.siren_widths, config.omega0);
      break;
    case Objective::kCignr:
      m.gin = GinParams::zeros(config.latent_dim, config.gin_width, config.gin_layers);
      m.modsiren = ModSirenParams::zeros(config.modsiren_widths, config.latent_dim, config.omega0);
      break;
    case Objective::kDiscrete:
      m.gin = GinParams::zeros(config.latent_dim, config.gin_width, config.gin_layers);
      m.decoder = DiscreteDecoderParams::zeros(config.latent_dim, config.decoder_widths, config.resolution);
      break;
  }
  m.gin.feature = config.node_feature;
  return m;
}

Model Model::init(const TrainConfig& config) {
  Model m = zeros(config);
  switch (config.objective) {
    case Objective::kIgnr:
      m.siren = siren_init(config.siren_widths, config.seed, config.omega0);
      break;
    case Objective::kCignr:
      m.gin = gin_init(config.latent_dim, config.seed, config.gin_width, config.gin_layers);
      m.modsiren = modsiren_init(config.modsiren_widths, config.latent_dim, config.seed, config.omega0);
      break;
    case Objective::kDiscrete:
      m.gin = gin_init(config.latent_dim, config.seed, config.gin_width, config.gin_layers);
      m.decoder = discrete_init(config.latent_dim, config.decoder_widths, config.resolution, config.seed);
      break;
  }
  m.gin.feature = config.node_feature;
  return m;
}

int Model::latent_dim() const { return has_encoder() ? config.latent_dim : 0; }

ParamList Model::refs() {
  switch (config.objective) {
    case Objective::kIgnr:
      return siren.refs();
    case Objective::kCignr: {
      ParamList r = modsiren.refs();
      ParamList g = gin.refs();
      r.insert(r.end(), g.begin(), g.end());
      return r;
    }
    case Objective::kDiscrete: {
      ParamList r = decoder.refs();
      ParamList g = gin.refs();
      r.insert(r.end(), g.begin(), g.end());
      return r;
    }
  }
  return {};
}

Vector Model::encode(const Graph& g) const {
  if (!has_encoder()) throw InputDomainError("this model has no encoder");
  return gin_encode(gin, g);
}

Matrix symmetrize(const Matrix& f) { return 0.5 * (f + f.transpose()); }

Matrix Model::decode(const Vector& z, int n) const {
  switch (config.objective) {
    case Objective::kIgnr:
      return symmetrize(siren_grid(siren, n));
    case Objective::kCignr:
      return symmetrize(modsiren_grid(modsiren, z, n));
    case Objective::kDiscrete:
      return discrete_decode(decoder, z);
  }
  return {};
}

namespace {

json tensor_json(const ParamRef& r) {
  json t;
  t["shape"] = r.shape();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(r.size()));
  if (r.matrix) {
    const Matrix& m = *r.matrix;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
  } else {
    data.assign(r.vector->data(), r.vector->data() + r.vector->size());
  }
  t["data"] = std::move(data);
  return t;
}

void load_tensor(const ParamRef& r, const json& t) {
  const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
  if (shape != r.shape()) throw ParseError("checkpoint tensor " + r.name + " has the wrong shape");
  const auto data = t.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != r.size()) {
    throw ParseError("checkpoint tensor " + r.name + " has the wrong number of values");
  }
  if (r.matrix) {
    Matrix& m = *r.matrix;
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = data[k++];
    }
  } else {
    std::copy(data.begin(), data.end(), r.vector->data());
  }
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  Model model = ckpt.model;
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  json cfg = json::object();
  for (const auto& [k, v] : model.config.to_pairs()) cfg[k] = v;
  j["config"] = cfg;
  json tensors = json::object();
  for (const auto& r : model.refs()) tensors[r.name] = tensor_json(r);
  j["tensors"] = tensors;
  j["loss_history"] = ckpt.loss_history;
  j["rng_digest"] = ckpt.rng_digest;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kCheckpointFormat) {
      throw ParseError("not an ignr checkpoint (missing or wrong format tag)");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("unsupported checkpoint version " + j.at("version").dump());
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [k, v] : j.at("config").items()) pairs.emplace_back(k, v.get<std::string>());
    Checkpoint ckpt;
    try {
      ckpt.model = Model::zeros(TrainConfig::from_pairs(pairs));
    } catch (const InputDomainError& e) {
      throw ParseError(std::string("checkpoint config: ") + e.what());
    }
    const json& tensors = j.at("tensors");
    const ParamList refs = ckpt.model.refs();
    if (tensors.size() != refs.size()) throw ParseError("checkpoint has an unexpected set of tensors");
    for (const auto& r : refs) {
      if (!tensors.contains(r.name)) throw ParseError("checkpoint is missing tensor " + r.name);
      load_tensor(r, tensors.at(r.name));
    }
    ckpt.loss_history = j.at("loss_history").get<std::vector<double>>();
    ckpt.rng_digest = j.at("rng_digest").get<std::string>();
    return ckpt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write checkpoint " + path);
  out << checkpoint_to_string(ckpt);
  if (!out) throw ParseError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace ignr
