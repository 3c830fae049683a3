#include "dcplan/model.hpp"

#include <fmt/format.h>
#include <stdexcept>

#include "dcplan/errors.hpp"

namespace dcplan {

void TransformerShape::validate() const {
  if (layers < 1 || hidden < 1 || heads < 1 || seq_len < 1) {
    throw std::invalid_argument("model layers, hidden, heads and seq_len must be positive");
  }
  if (vocab < 0 || microbatch < 0) throw std::invalid_argument("vocab and microbatch must be >= 0");
  if (hidden % heads != 0) {
    throw std::invalid_argument(fmt::format("hidden size {} not divisible by {} heads", hidden, heads));
  }
}

void PrecisionPolicy::validate() const {
  if (weights_bytes_per_param < 0 || grad_bytes_per_param < 0 || optimizer_bytes_per_param < 0 ||
      activation_bytes_per_elem < 0) {
    throw std::invalid_argument("precision byte counts must be >= 0");
  }
}

DenseTransformerConfig dense_100t() {
  return {"dense-100t", {.layers = 134, .hidden = 244224, .heads = 256, .vocab = 256000, .seq_len = 32000, .microbatch = 1}};
}

MoEConfig moe_8x17t() {
  return {"moe-8x17t",
          {.layers = 118, .hidden = 109568, .heads = 256, .vocab = 256000, .seq_len = 32000, .microbatch = 1},
          8,
          2};
}

ModelConfig model_preset(std::string_view name) {
  if (name == "dense-100t") return dense_100t();
  if (name == "moe-8x17t") return moe_8x17t();
  throw ConfigError(fmt::format("unknown model preset '{}' (expected dense-100t or moe-8x17t)", name));
}

const TransformerShape& shape_of(const ModelConfig& cfg) {
  return std::visit([](const auto& c) -> const TransformerShape& { return c.shape; }, cfg);
}

const std::string& name_of(const ModelConfig& cfg) {
  return std::visit([](const auto& c) -> const std::string& { return c.name; }, cfg);
}

bool is_moe(const ModelConfig& cfg) { return std::holds_alternative<MoEConfig>(cfg); }

void validate(const ModelConfig& cfg) {
  shape_of(cfg).validate();
  if (const auto* moe = std::get_if<MoEConfig>(&cfg)) {
    if (moe->top_k < 1 || moe->top_k > moe->experts) throw std::invalid_argument("require 1 <= top_k <= experts");
  }
}

namespace {

std::int64_t embedding_params(const TransformerShape& s) { return 2 * s.vocab * s.hidden; }

// Weight matrices per layer in units of h^2: attention (Q, K, V, O) = 4,
// one feed-forward block (h x 4h, 4h x h) = 8.
constexpr std::int64_t kAttention = 4;
constexpr std::int64_t kFeedForward = 8;

}  // namespace

std::int64_t param_count(const DenseTransformerConfig& cfg) {
  const auto& s = cfg.shape;
  return (kAttention + kFeedForward) * s.hidden * s.hidden * s.layers + embedding_params(s);
}

MoEParamCount param_count_moe(const MoEConfig& cfg) {
  const auto& s = cfg.shape;
  const std::int64_t h2 = s.hidden * s.hidden;
  MoEParamCount out;
  out.total = (kAttention + kFeedForward * cfg.experts) * h2 * s.layers + embedding_params(s);
  out.active = (kAttention + kFeedForward * cfg.top_k) * h2 * s.layers + embedding_params(s);
  out.per_expert_model = (kAttention + kFeedForward) * h2 * s.layers;
  return out;
}

std::int64_t layer_params(const ModelConfig& cfg) {
  const auto& s = shape_of(cfg);
  const std::int64_t experts = is_moe(cfg) ? std::get<MoEConfig>(cfg).experts : 1;
  return (kAttention + kFeedForward * experts) * s.hidden * s.hidden;
}

std::int64_t layer_active_params(const ModelConfig& cfg) {
  const auto& s = shape_of(cfg);
  const std::int64_t k = is_moe(cfg) ? std::get<MoEConfig>(cfg).top_k : 1;
  return (kAttention + kFeedForward * k) * s.hidden * s.hidden;
}

std::int64_t total_params(const ModelConfig& cfg) {
  if (const auto* moe = std::get_if<MoEConfig>(&cfg)) return param_count_moe(*moe).total;
  return param_count(std::get<DenseTransformerConfig>(cfg));
}

MemoryFootprint memory_footprint(double params, const PrecisionPolicy& policy) {
  policy.validate();
  MemoryFootprint m;
  m.weights_bytes = params * policy.weights_bytes_per_param;
  m.grad_bytes = params * policy.grad_bytes_per_param;
  m.optimizer_bytes = params * policy.optimizer_bytes_per_param;
  m.total_bytes = m.weights_bytes + m.grad_bytes + m.optimizer_bytes;
  return m;
}

double flops_forward_per_layer(const ModelConfig& cfg, std::int64_t s, std::int64_t b) {
  const double h = static_cast<double>(shape_of(cfg).hidden);
  const double sd = static_cast<double>(s);
  const double bd = static_cast<double>(b);
  const double k = is_moe(cfg) ? static_cast<double>(std::get<MoEConfig>(cfg).top_k) : 1.0;
  // 2 FLOP per multiply-add: attention projections 8sbh^2, each expert's
  // feed-forward 16sbh^2, score and context products 4s^2bh.
  return (8.0 + 16.0 * k) * sd * bd * h * h + 4.0 * sd * sd * bd * h;
}

double flops_forward_per_layer(const ModelConfig& cfg) {
  const auto& s = shape_of(cfg);
  return flops_forward_per_layer(cfg, s.seq_len, s.microbatch);
}

double activation_bytes_per_device(const ModelConfig& cfg, int t, const PrecisionPolicy& policy) {
  if (t < 1) throw std::invalid_argument("tensor degree must be >= 1");
  policy.validate();
  const auto& s = shape_of(cfg);
  // sbh * 10/t is already in bytes; the policy's element size is not applied.
  return static_cast<double>(s.seq_len) * static_cast<double>(s.microbatch) * static_cast<double>(s.hidden) *
         10.0 / static_cast<double>(t);
}

void apply_precision_config(ConfigDocument& doc, std::string_view section, PrecisionPolicy& policy) {
  if (auto v = doc.get_double(section, "weights_bytes_per_param")) policy.weights_bytes_per_param = *v;
  if (auto v = doc.get_double(section, "grad_bytes_per_param")) policy.grad_bytes_per_param = *v;
  if (auto v = doc.get_double(section, "optimizer_bytes_per_param")) policy.optimizer_bytes_per_param = *v;
  if (auto v = doc.get_double(section, "activation_bytes_per_elem")) policy.activation_bytes_per_elem = *v;
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, std::string(section));
  }
}

ModelConfig model_from_config(ConfigDocument& doc, std::string_view section, std::string name) {
  const auto kind = doc.get_string(section, "kind").value_or("dense");
  auto need = [&](const char* key) {
    auto v = doc.get_int(section, key);
    if (!v) throw ConfigError(fmt::format("missing required key in [{}]", section), 0, key);
    return static_cast<std::int64_t>(*v);
  };
  TransformerShape shape;
  shape.layers = need("layers");
  shape.hidden = need("hidden");
  shape.heads = need("heads");
  shape.vocab = need("vocab");
  shape.seq_len = need("seq_len");
  shape.microbatch = doc.get_int(section, "microbatch").value_or(1);

  ModelConfig cfg;
  if (kind == "dense") {
    cfg = DenseTransformerConfig{std::move(name), shape};
  } else if (kind == "moe") {
    cfg = MoEConfig{std::move(name), shape, need("experts"), need("top_k")};
  } else {
    throw ConfigError(fmt::format("unknown model kind '{}' (expected dense or moe)", kind), 0, "kind");
  }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, std::string(section));
  }
  return cfg;
}

}  // namespace dcplan
