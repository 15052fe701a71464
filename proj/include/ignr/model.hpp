#pragma once

#include <string>
#include <vector>

#include "ignr/config.hpp"
#include "ignr/discrete_decoder.hpp"
#include "ignr/gin.hpp"
#include "ignr/modsiren.hpp"
#include "ignr/siren.hpp"

namespace ignr {

// Trainable state for one objective. Only the networks the objective uses
// are populated: siren (ignr), gin + modsiren (cignr), gin + decoder
// (discrete).
struct Model {
  TrainConfig config;
  SirenParams siren;
  GinParams gin;
  ModSirenParams modsiren;
  DiscreteDecoderParams decoder;

  /// Seeded initialization according to config.
  static Model init(const TrainConfig& config);
  /// Same shapes as init(config) with every tensor zero.
  static Model zeros(const TrainConfig& config);

  bool has_encoder() const { return config.objective != Objective::kIgnr; }
  int latent_dim() const;
  ParamList refs();

  /// Latent code of a graph (encoder objectives only).
  Vector encode(const Graph& g) const;
  /// Symmetrized probability grid at resolution n. For ignr z is ignored;
  /// the discrete decoder always returns its native K x K grid.
  Matrix decode(const Vector& z, int n) const;
};

/// (F + F^T) / 2.
Matrix symmetrize(const Matrix& f);

struct Checkpoint {
  Model model;
  std::vector<double> loss_history;
  std::string rng_digest;
};

inline constexpr const char* kCheckpointFormat = "ignr-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// JSON; tensors stored row-major as {shape, data}. Throws ParseError on a
/// malformed file or a format/version mismatch.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace ignr
