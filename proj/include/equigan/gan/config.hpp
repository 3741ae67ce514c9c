#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "equigan/gnn/layers.hpp"

namespace equigan::gan {

/// Generation order: skeleton, then node attributes, then edge attributes.
enum class StageId : int { Skeleton = 1, NodeAttrs = 2, EdgeAttrs = 3 };

std::string to_string(StageId stage);
/// Accepts 1/2/3 or skeleton/node/edge.
StageId parse_stage(std::string_view text);

enum class Lipschitz { GradientPenalty, WeightClipping };

struct StageConfig {
  StageId stage = StageId::NodeAttrs;

  int latent_width = 32;
  int layers = 3;
  int node_width = 32;
  int edge_width = 32;
  int head_width = 32;
  gnn::PairForm pair_form = gnn::PairForm::Literal;

  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  int batch_size = 32;
  int critic_steps = 2;

  Lipschitz lipschitz = Lipschitz::GradientPenalty;
  double gp_weight = 10.0;
  double clip = 0.01;

  // tau(step) = max(tau_end, tau_start * tau_decay^step)
  double tau_start = 1.0;
  double tau_end = 0.3;
  double tau_decay = 0.9995;
  bool gumbel = true;

  int max_steps = 20000;
  std::uint64_t seed = 1;
  int log_every = 100;
  int checkpoint_every = 0;
};

/// Throws BadConfig on a violated range constraint.
void check(const StageConfig& config);

/// Parses flat `key = value` lines over `base`. Blank lines and `#` comments
/// are ignored; unknown keys and malformed values throw BadConfig.
StageConfig parse_config(std::string_view text, StageConfig base = {});

/// Every key in a fixed order, one `key = value` per line; parse_config
/// reproduces the config exactly.
std::string dump(const StageConfig& config);

/// FNV-1a over dump(config).
std::uint64_t digest(const StageConfig& config);

double temperature(const StageConfig& config, int step);

}  // namespace equigan::gan
