// Copyright 2026 The uhdiqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "uhdiqa/error.hpp"

namespace uhdiqa {

using Macs = std::uint64_t;

inline constexpr Macs kChallengeBudgetMacs = 50'000'000'000ULL;

/// Activations are (height, width, channels); token sequences are flattened
/// spatial positions.
struct TensorShape {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::int64_t channels = 0;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

// Zero means "take it from the incoming activation" for every field that the
// graph can infer.
struct Conv2d {
  std::int64_t k_h = 1, k_w = 1;
  std::int64_t c_in = 0, c_out = 0;
  std::int64_t stride = 1;
  std::int64_t groups = 1;
  std::int64_t padding = -1;  // -1: "same" (output = ceil(input / stride))
  std::int64_t in_h = 0, in_w = 0;
};

struct Linear {
  std::int64_t d_in = 0, d_out = 0;
  std::int64_t tokens = 0;  // 0: one per spatial position (1 standalone)
};

/// Multi-head self-attention with QKV and output projections.
struct Attention {
  std::int64_t seq_len = 0;
  std::int64_t dim = 0;
  std::int64_t heads = 1;
};

struct Pool {
  std::int64_t kernel = 0;  // 0: global pooling
  std::int64_t stride = 0;  // 0: same as kernel
};

struct Activation {};
struct Norm {};
struct Flatten {};

struct LayerSpec {
  std::variant<Conv2d, Linear, Attention, Pool, Activation, Norm, Flatten> kind;
  std::string name;
};

struct ModelGraph {
  std::string name;
  TensorShape input;
  std::vector<LayerSpec> layers;
};

struct LayerCost {
  std::size_t index = 0;
  std::string kind;
  std::string name;
  Macs macs = 0;
  std::uint64_t params = 0;
  TensorShape output;
};

struct BudgetReport {
  std::string name;
  Macs total_macs = 0;
  std::uint64_t total_params = 0;
  std::vector<LayerCost> layers;
  Macs budget = kChallengeBudgetMacs;
  bool strict = false;
  bool pass = true;
};

namespace detail {

inline std::uint64_t checked_mul(std::initializer_list<std::int64_t> factors) {
  std::uint64_t acc = 1;
  for (std::int64_t f : factors) {
    if (f < 0) fail(ErrorCode::ShapeMismatch, "negative dimension");
    if (__builtin_mul_overflow(acc, static_cast<std::uint64_t>(f), &acc))
      fail(ErrorCode::InvalidInput, "MAC count overflows 64 bits");
  }
  return acc;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorCode::InvalidInput, "MAC count overflows 64 bits");
  return r;
}

inline void require_positive(std::int64_t v, const char* what) {
  if (v < 1) fail(ErrorCode::ShapeMismatch, std::string(what) + " must be positive, got " + std::to_string(v));
}

inline std::int64_t conv_out(std::int64_t in, std::int64_t k, std::int64_t stride, std::int64_t pad) {
  if (pad < 0) return (in + stride - 1) / stride;
  const std::int64_t span = in + 2 * pad - k;
  if (span < 0) return 0;
  return span / stride + 1;
}

}  // namespace detail

inline std::string kind_name(const LayerSpec& l) {
  static constexpr const char* names[] = {"conv2d", "linear", "attention", "pool", "activation", "norm", "flatten"};
  return names[l.kind.index()];
}

inline TensorShape conv_output_shape(const Conv2d& c) {
  return {detail::conv_out(c.in_h, c.k_h, c.stride, c.padding), detail::conv_out(c.in_w, c.k_w, c.stride, c.padding),
          c.c_out};
}

/// Multiply-accumulates of a fully specified layer:
///   conv2d    H_out * W_out * c_out * (k_h * k_w * c_in / groups)
///   linear    tokens * d_in * d_out
///   attention 4 L d^2 + 2 L^2 d  (QKV + output projections, QK^T and AV;
///             the head count does not change the total)
/// Pooling, activations, normalisation and reshapes cost nothing.
inline Macs layer_macs(const LayerSpec& layer) {
  return std::visit(
      [](const auto& v) -> Macs {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Conv2d>) {
          detail::require_positive(v.k_h, "k_h");
          detail::require_positive(v.k_w, "k_w");
          detail::require_positive(v.c_in, "c_in");
          detail::require_positive(v.c_out, "c_out");
          detail::require_positive(v.stride, "stride");
          detail::require_positive(v.groups, "groups");
          detail::require_positive(v.in_h, "input height");
          detail::require_positive(v.in_w, "input width");
          if (v.c_in % v.groups || v.c_out % v.groups)
            fail(ErrorCode::ShapeMismatch, "groups must divide c_in and c_out");
          const auto out = conv_output_shape(v);
          if (out.height < 1 || out.width < 1) fail(ErrorCode::ShapeMismatch, "kernel larger than padded input");
          return detail::checked_mul({out.height, out.width, v.c_out, v.k_h, v.k_w, v.c_in / v.groups});
        } else if constexpr (std::is_same_v<T, Linear>) {
          detail::require_positive(v.d_in, "d_in");
          detail::require_positive(v.d_out, "d_out");
          return detail::checked_mul({v.tokens == 0 ? 1 : v.tokens, v.d_in, v.d_out});
        } else if constexpr (std::is_same_v<T, Attention>) {
          detail::require_positive(v.seq_len, "seq_len");
          detail::require_positive(v.dim, "dim");
          detail::require_positive(v.heads, "heads");
          if (v.dim % v.heads) fail(ErrorCode::ShapeMismatch, "heads must divide dim");
          return detail::checked_add(detail::checked_mul({4, v.seq_len, v.dim, v.dim}),
                                     detail::checked_mul({2, v.seq_len, v.seq_len, v.dim}));
        } else {
          return 0;
        }
      },
      layer.kind);
}

namespace detail {

// Fills inferable fields of `layer` from `in`, validates declared ones, and
// returns the output shape.
inline TensorShape resolve(LayerSpec& layer, const TensorShape& in) {
  auto expect = [](std::int64_t declared, std::int64_t actual, const char* what) {
    if (declared != 0 && declared != actual)
      fail(ErrorCode::ShapeMismatch, std::string(what) + " declared " + std::to_string(declared) +
                                         " but the incoming activation has " + std::to_string(actual));
    return actual;
  };
  return std::visit(
      [&](auto& v) -> TensorShape {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Conv2d>) {
          v.c_in = expect(v.c_in, in.channels, "c_in");
          v.in_h = expect(v.in_h, in.height, "input height");
          v.in_w = expect(v.in_w, in.width, "input width");
          layer_macs(layer);  // validates
          return conv_output_shape(v);
        } else if constexpr (std::is_same_v<T, Linear>) {
          v.d_in = expect(v.d_in, in.channels, "d_in");
          v.tokens = expect(v.tokens, in.height * in.width, "tokens");
          return {in.height, in.width, v.d_out};
        } else if constexpr (std::is_same_v<T, Attention>) {
          v.dim = expect(v.dim, in.channels, "dim");
          v.seq_len = expect(v.seq_len, in.height * in.width, "seq_len");
          return in;
        } else if constexpr (std::is_same_v<T, Pool>) {
          if (v.kernel == 0) return {1, 1, in.channels};
          const std::int64_t s = v.stride == 0 ? v.kernel : v.stride;
          require_positive(v.kernel, "pool kernel");
          require_positive(s, "pool stride");
          if (in.height < v.kernel || in.width < v.kernel)
            fail(ErrorCode::ShapeMismatch, "pool kernel larger than input");
          return {(in.height - v.kernel) / s + 1, (in.width - v.kernel) / s + 1, in.channels};
        } else if constexpr (std::is_same_v<T, Flatten>) {
          return {1, 1, in.height * in.width * in.channels};
        } else {
          return in;
        }
      },
      layer.kind);
}

inline std::uint64_t layer_params(const LayerSpec& layer, const TensorShape& in) {
  return std::visit(
      [&](const auto& v) -> std::uint64_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Conv2d>)
          return checked_mul({v.k_h, v.k_w, v.c_in / v.groups, v.c_out}) + static_cast<std::uint64_t>(v.c_out);
        else if constexpr (std::is_same_v<T, Linear>)
          return checked_mul({v.d_in, v.d_out}) + static_cast<std::uint64_t>(v.d_out);
        else if constexpr (std::is_same_v<T, Attention>)
          return checked_mul({4, v.dim, v.dim}) + checked_mul({4, v.dim});
        else if constexpr (std::is_same_v<T, Norm>)
          return checked_mul({2, in.channels});
        else
          return 0;
      },
      layer.kind);
}

}  // namespace detail

/// Walks the graph, inferring every layer's input from its predecessor, and
/// totals the per-layer costs. pass means total <= budget (total < budget
/// when strict).
inline BudgetReport graph_macs(const ModelGraph& g, Macs budget = kChallengeBudgetMacs, bool strict = false) {
  BudgetReport rep;
  rep.name = g.name;
  rep.budget = budget;
  rep.strict = strict;
  if (!g.layers.empty()) {
    if (g.input.height < 1 || g.input.width < 1 || g.input.channels < 1)
      fail(ErrorCode::ShapeMismatch, "graph input dims must be positive");
  }
  TensorShape shape = g.input;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    LayerSpec layer = g.layers[i];
    LayerCost cost;
    try {
      const TensorShape out = detail::resolve(layer, shape);
      if (out.height < 1 || out.width < 1 || out.channels < 1)
        fail(ErrorCode::ShapeMismatch, "layer produces an empty activation");
      cost.macs = layer_macs(layer);
      cost.params = detail::layer_params(layer, shape);
      cost.output = out;
      shape = out;
    } catch (const Error& e) {
      throw Error(e.code(), "layer " + std::to_string(i) + " (" + kind_name(layer) + "): " + e.what());
    }
    cost.index = i;
    cost.kind = kind_name(layer);
    cost.name = layer.name;
    rep.total_macs = detail::checked_add(rep.total_macs, cost.macs);
    rep.total_params += cost.params;
    rep.layers.push_back(std::move(cost));
  }
  rep.pass = strict ? rep.total_macs < budget : rep.total_macs <= budget;
  return rep;
}

inline Macs gmacs_to_macs(double gmacs) {
  if (!(gmacs >= 0.0) || !std::isfinite(gmacs)) fail(ErrorCode::InvalidInput, "budget must be a finite nonnegative number");
  return static_cast<Macs>(std::llround(gmacs * 1e9));
}

inline bool gate(const ModelGraph& g, double budget_gmacs, bool strict = false) {
  return graph_macs(g, gmacs_to_macs(budget_gmacs), strict).pass;
}

// ---------------------------------------------------------------------------
// JSON: {"name": ..., "input": [h, w, c], "layers": [{"kind": ..., ...}]}

inline LayerSpec layer_from_json(const nlohmann::json& j) {
  auto geti = [&](const char* key, std::int64_t def) -> std::int64_t {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer()) fail(ErrorCode::ParseError, std::string("field '") + key + "' must be an integer");
    return j.at(key).get<std::int64_t>();
  };
  const std::string kind = j.value("kind", "");
  LayerSpec l;
  l.name = j.value("name", "");
  if (kind == "conv2d") {
    Conv2d c;
    const std::int64_t k = geti("kernel", 1);
    c.k_h = geti("k_h", k);
    c.k_w = geti("k_w", k);
    c.c_in = geti("c_in", 0);
    c.c_out = geti("c_out", 0);
    c.stride = geti("stride", 1);
    c.groups = geti("groups", 1);
    if (j.contains("padding") && j.at("padding").is_string()) {
      if (j.at("padding").get<std::string>() != "same") fail(ErrorCode::ParseError, "padding must be \"same\" or an integer");
      c.padding = -1;
    } else {
      c.padding = geti("padding", -1);
    }
    c.in_h = geti("in_h", 0);
    c.in_w = geti("in_w", 0);
    if (c.c_out < 1) fail(ErrorCode::ShapeMismatch, "conv2d needs c_out");
    l.kind = c;
  } else if (kind == "linear") {
    Linear x{geti("d_in", 0), geti("d_out", 0), geti("tokens", 0)};
    if (x.d_out < 1) fail(ErrorCode::ShapeMismatch, "linear needs d_out");
    l.kind = x;
  } else if (kind == "attention") {
    l.kind = Attention{geti("seq_len", 0), geti("dim", 0), geti("heads", 1)};
  } else if (kind == "pool") {
    l.kind = Pool{j.value("global", false) ? 0 : geti("kernel", 0), geti("stride", 0)};
  } else if (kind == "activation") {
    l.kind = Activation{};
  } else if (kind == "norm") {
    l.kind = Norm{};
  } else if (kind == "flatten") {
    l.kind = Flatten{};
  } else {
    fail(ErrorCode::ParseError, "unknown layer kind '" + kind + "'");
  }
  return l;
}

inline ModelGraph graph_from_json(const nlohmann::json& j) {
  ModelGraph g;
  g.name = j.value("name", "model");
  if (!j.contains("input") || !j.at("input").is_array() || j.at("input").size() != 3)
    fail(ErrorCode::ParseError, "graph needs \"input\": [height, width, channels]");
  g.input = {j.at("input")[0].get<std::int64_t>(), j.at("input")[1].get<std::int64_t>(),
             j.at("input")[2].get<std::int64_t>()};
  if (j.contains("layers")) {
    const auto& layers = j.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      try {
        g.layers.push_back(layer_from_json(layers[i]));
      } catch (const Error& e) {
        throw Error(e.code(), "layer " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return g;
}

inline nlohmann::json to_json(const BudgetReport& r) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : r.layers)
    layers.push_back({{"index", l.index},
                      {"kind", l.kind},
                      {"name", l.name},
                      {"macs", l.macs},
                      {"params", l.params},
                      {"output", {l.output.height, l.output.width, l.output.channels}}});
  return {{"name", r.name},     {"total_macs", r.total_macs}, {"total_gmacs", static_cast<double>(r.total_macs) / 1e9},
          {"params", r.total_params}, {"budget_macs", r.budget},  {"strict", r.strict},
          {"pass", r.pass},     {"layers", layers}};
}

inline void write_budget_text(std::ostream& out, const BudgetReport& r) {
  std::ostringstream s;
  s << "model: " << r.name << '\n';
  s << std::left << std::setw(6) << "#" << std::setw(12) << "kind" << std::setw(20) << "output" << std::right
    << std::setw(18) << "MACs" << std::setw(14) << "params" << '\n';
  for (const auto& l : r.layers) {
    std::ostringstream shape;
    shape << l.output.height << 'x' << l.output.width << 'x' << l.output.channels;
    s << std::left << std::setw(6) << l.index << std::setw(12) << l.kind << std::setw(20) << shape.str()
      << std::right << std::setw(18) << l.macs << std::setw(14) << l.params << '\n';
  }
  s << std::fixed << std::setprecision(3);
  s << "total: " << static_cast<double>(r.total_macs) / 1e9 << " GMACs (" << r.total_macs << " MACs), "
    << static_cast<double>(r.total_params) / 1e6 << " M params\n";
  s << "budget: " << static_cast<double>(r.budget) / 1e9 << " GMACs (" << (r.strict ? "<" : "<=") << ") -> "
    << (r.pass ? "PASS" : "FAIL") << '\n';
  out << s.str();
}

}  // namespace uhdiqa
