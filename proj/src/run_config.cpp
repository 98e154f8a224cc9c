// Copyright 2026 The hrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hrt/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>

#include "hrt/errors.hpp"
#include "hrt/hash.hpp"

namespace hrt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError("config key '" + key + "': bad number '" + value + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_number<T>(k, v); },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <typename S, typename T>
Field nested(S RunConfig::*outer, T S::*member) {
  return {[outer, member](RunConfig& c, const std::string& k, const std::string& v) {
            (c.*outer).*member = parse_number<T>(k, v);
          },
          [outer, member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double((c.*outer).*member);
            else return std::to_string((c.*outer).*member);
          }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["n_layers"] = nested(&RunConfig::model, &ModelConfig::n_layers);
    f["d_model"] = nested(&RunConfig::model, &ModelConfig::d_model);
    f["n_heads"] = nested(&RunConfig::model, &ModelConfig::n_heads);
    f["d_ff"] = nested(&RunConfig::model, &ModelConfig::d_ff);
    f["vocab_size"] = nested(&RunConfig::model, &ModelConfig::vocab_size);
    f["max_seq_len"] = nested(&RunConfig::model, &ModelConfig::max_seq_len);
    f["bottleneck"] = number(&RunConfig::bottleneck);
    f["learning_rate"] = nested(&RunConfig::training, &TrainOptions::learning_rate);
    f["min_learning_rate"] = nested(&RunConfig::training, &TrainOptions::min_learning_rate);
    f["steps"] = nested(&RunConfig::training, &TrainOptions::steps);
    f["batch_size"] = nested(&RunConfig::training, &TrainOptions::batch_size);
    f["weight_decay"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.training.adamw.weight_decay = parse_number<double>(k, v);
                         },
                         [](const RunConfig& c) { return format_double(c.training.adamw.weight_decay); }};
    const auto weight = [](double LossWeights::*w) {
      return Field{[w](RunConfig& c, const std::string& k, const std::string& v) {
                     c.training.weights.*w = parse_number<double>(k, v);
                   },
                   [w](const RunConfig& c) { return format_double(c.training.weights.*w); }};
    };
    f["lambda_answer"] = weight(&LossWeights::answer);
    f["lambda_strategic"] = weight(&LossWeights::strategic);
    f["lambda_tactical"] = weight(&LossWeights::tactical);
    f["lambda_operational"] = weight(&LossWeights::operational);
    f["segmentation"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v == "marked") c.segmentation.mode = SegmentationRule::Mode::kMarked;
                           else if (v == "proportional") c.segmentation.mode = SegmentationRule::Mode::kProportional;
                           else throw InputError("config key '" + k + "': expected marked or proportional");
                         },
                         [](const RunConfig& c) {
                           return std::string(c.segmentation.mode == SegmentationRule::Mode::kMarked ? "marked" : "proportional");
                         }};
    for (int i = 0; i < 3; ++i) {
      static const char* const names[] = {"fraction_strategic", "fraction_tactical", "fraction_operational"};
      f[names[i]] = {[i](RunConfig& c, const std::string& k, const std::string& v) {
                       c.segmentation.fractions[static_cast<std::size_t>(i)] = parse_number<double>(k, v);
                     },
                     [i](const RunConfig& c) { return format_double(c.segmentation.fractions[static_cast<std::size_t>(i)]); }};
    }
    f["step_cap"] = number(&RunConfig::step_cap);
    f["chunk_tokens"] = number(&RunConfig::chunk_tokens);
    f["window_tokens"] = number(&RunConfig::window_tokens);
    f["mode"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); },
                 [](const RunConfig& c) { return to_string(c.mode); }};
    f["forcing_phrase"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.forcing_phrase = v; },
                           [](const RunConfig& c) { return c.forcing_phrase; }};
    f["target"] = number(&RunConfig::target);
    f["length_policy"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            if (v == "longest-first") c.length_policy = LengthPolicy::kLongestFirst;
                            else if (v == "length-weighted") c.length_policy = LengthPolicy::kLengthWeighted;
                            else throw InputError("config key '" + k + "': expected longest-first or length-weighted");
                          },
                          [](const RunConfig& c) {
                            return std::string(c.length_policy == LengthPolicy::kLongestFirst ? "longest-first" : "length-weighted");
                          }};
    f["small_capability"] = number(&RunConfig::small_capability);
    f["large_capability"] = number(&RunConfig::large_capability);
    return f;
  }();
  return table;
}

}  // namespace

ControlMode parse_mode(const std::string& text) {
  if (text == "gii") return ControlMode::kGuided;
  if (text == "budget-forcing") return ControlMode::kBudgetForcing;
  throw InputError("mode must be gii or budget-forcing, got '" + text + "'");
}

std::string to_string(ControlMode mode) {
  return mode == ControlMode::kGuided ? "gii" : "budget-forcing";
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end()) throw InputError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    it->second.set(c, key, value);
  }
  c.model.validate();
  c.training.weights.validate();
  c.segmentation.validate();
  if (c.step_cap < 1) throw InputError("config: step_cap must be >= 1");
  if (c.window_tokens < 1) throw InputError("config: window_tokens must be >= 1");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in);
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(*this) + "\n";
  return out;
}

std::string fingerprint(const RunConfig& config, std::uint64_t seed, const std::string& extra) {
  Fnv1a64 h;
  h.update(kCodeVersion);
  h.update("\n");
  h.update(config.canonical());
  h.update("seed=" + std::to_string(seed) + "\n");
  h.update(extra);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Fnv1a64 h;
  h.update(bytes);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
  return buf;
}

}  // namespace hrt
