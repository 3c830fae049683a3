#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "dcplan/config.hpp"

namespace dcplan {

/// Dimensions shared by the dense and mixture-of-experts variants.
struct TransformerShape {
  std::int64_t layers = 0;
  std::int64_t hidden = 0;
  std::int64_t heads = 0;
  std::int64_t vocab = 0;
  std::int64_t seq_len = 0;
  std::int64_t microbatch = 1;

  void validate() const;
  bool operator==(const TransformerShape&) const = default;
};

struct DenseTransformerConfig {
  std::string name;
  TransformerShape shape;

  bool operator==(const DenseTransformerConfig&) const = default;
};

struct MoEConfig {
  std::string name;
  TransformerShape shape;
  std::int64_t experts = 8;
  std::int64_t top_k = 2;

  bool operator==(const MoEConfig&) const = default;
};

using ModelConfig = std::variant<DenseTransformerConfig, MoEConfig>;

/// Bytes per parameter (or per activation element); fractional values model
/// sub-byte formats. Defaults: FP8 master weights + FP16 optimizer moments
/// split as 1.5 / 0.5 / 2.0 bytes, FP4 activations.
struct PrecisionPolicy {
  double weights_bytes_per_param = 1.5;
  double grad_bytes_per_param = 0.5;
  double optimizer_bytes_per_param = 2.0;
  double activation_bytes_per_elem = 0.5;

  double state_bytes_per_param() const {
    return weights_bytes_per_param + grad_bytes_per_param + optimizer_bytes_per_param;
  }
  void validate() const;
  bool operator==(const PrecisionPolicy&) const = default;
};

struct MemoryFootprint {
  double weights_bytes = 0.0;
  double grad_bytes = 0.0;
  double optimizer_bytes = 0.0;
  double total_bytes = 0.0;
};

struct MoEParamCount {
  std::int64_t total = 0;
  std::int64_t active = 0;
  std::int64_t per_expert_model = 0;  // dense model equivalent to one expert path
};

/// 134 layers, 244,224 hidden, 256 heads, 256K vocab, 32,000-token sequences.
DenseTransformerConfig dense_100t();
/// 8 experts (top-2), 118 layers, 109,568 hidden; otherwise as dense_100t.
MoEConfig moe_8x17t();

/// Look up a shipped preset ("dense-100t", "moe-8x17t"). Throws ConfigError.
ModelConfig model_preset(std::string_view name);

const TransformerShape& shape_of(const ModelConfig& cfg);
const std::string& name_of(const ModelConfig& cfg);
bool is_moe(const ModelConfig& cfg);
void validate(const ModelConfig& cfg);

/// Attention 4h^2 + feed-forward 8h^2 per layer, untied input/output
/// embeddings (2Vh), no biases.
std::int64_t param_count(const DenseTransformerConfig& cfg);
MoEParamCount param_count_moe(const MoEConfig& cfg);

/// Parameters stored in one layer (all experts) / touched per token.
std::int64_t layer_params(const ModelConfig& cfg);
std::int64_t layer_active_params(const ModelConfig& cfg);
/// Whole-model parameters including embeddings.
std::int64_t total_params(const ModelConfig& cfg);

MemoryFootprint memory_footprint(double params, const PrecisionPolicy& policy);

/// Forward FLOPs of one layer over one microbatch of `b` sequences of
/// length `s`: 24sbh^2 + 4s^2bh (dense), with the feed-forward term scaled to
/// top_k experts for MoE: (8 + 16k)sbh^2 + 4s^2bh.
double flops_forward_per_layer(const ModelConfig& cfg, std::int64_t s, std::int64_t b);
double flops_forward_per_layer(const ModelConfig& cfg);

/// Activation working set per device for one layer, sbh * 10 / t bytes.
double activation_bytes_per_device(const ModelConfig& cfg, int t, const PrecisionPolicy& policy);

void apply_precision_config(ConfigDocument& doc, std::string_view section, PrecisionPolicy& policy);
/// Custom model from a `[model.<name>]` section: kind = dense|moe plus shape keys.
ModelConfig model_from_config(ConfigDocument& doc, std::string_view section, std::string name);

}  // namespace dcplan
