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

#include "hrt/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hrt/errors.hpp"
#include "hrt/hash.hpp"

namespace hrt {

namespace {

constexpr char kMagic[8] = {'H', 'R', 'T', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint8_t kNoAdapter = 0xFF;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& data, std::size_t limit) : data_(data), limit_(limit) {}

  void need(std::size_t n) const {
    if (pos_ + n > limit_) throw InputError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& data_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

std::uint8_t encode_slot(const std::optional<AdapterLevel>& level) {
  return level ? static_cast<std::uint8_t>(*level) : kNoAdapter;
}

std::optional<AdapterLevel> decode_slot(std::uint8_t v) {
  if (v == kNoAdapter) return std::nullopt;
  if (v > static_cast<std::uint8_t>(AdapterLevel::kOperational)) {
    throw InputError("checkpoint: unknown adapter level " + std::to_string(v));
  }
  return static_cast<AdapterLevel>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Model& model,
                                            const std::vector<std::string>& vocabulary) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  const ModelConfig& c = model.config();
  for (int v : {c.n_layers, c.d_model, c.n_heads, c.d_ff, c.vocab_size, c.max_seq_len}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.u32(static_cast<std::uint32_t>(model.adapter_r()));
  const AdapterPlan plan = model.plan();
  w.u32(static_cast<std::uint32_t>(plan.layers.size()));
  for (const auto& layer : plan.layers) {
    w.u8(encode_slot(layer.after_attention));
    w.u8(encode_slot(layer.after_ffn));
  }
  const auto params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.str(p.name);
    w.u8(p.trainable ? 1 : 0);
    const Matrix& m = p.tensor.value();
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  }
  w.u32(static_cast<std::uint32_t>(vocabulary.size()));
  for (const auto& token : vocabulary) w.str(token);

  Fnv1a64 hash;
  hash.update(w.buffer());
  w.u64(hash.digest());
  return std::move(w.buffer());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw InputError("not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  Fnv1a64 hash;
  hash.update(std::span(bytes.data(), body));
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(bytes[body + i]) << (8 * i);
  if (stored != hash.digest()) throw InputError("checkpoint checksum mismatch");

  Reader r(bytes, body);
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw InputError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig c;
  c.n_layers = static_cast<int>(r.u32());
  c.d_model = static_cast<int>(r.u32());
  c.n_heads = static_cast<int>(r.u32());
  c.d_ff = static_cast<int>(r.u32());
  c.vocab_size = static_cast<int>(r.u32());
  c.max_seq_len = static_cast<int>(r.u32());
  const int adapter_r = static_cast<int>(r.u32());
  AdapterPlan plan;
  const std::uint32_t plan_layers = r.u32();
  for (std::uint32_t i = 0; i < plan_layers; ++i) {
    LayerAdapters layer;
    layer.after_attention = decode_slot(r.u8());
    layer.after_ffn = decode_slot(r.u8());
    plan.layers.push_back(layer);
  }
  const std::uint32_t count = r.u32();
  std::vector<NamedParameter> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedParameter p;
    p.name = r.str();
    p.trainable = r.u8() != 0;
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows == 0 || cols == 0) throw InputError("checkpoint: empty tensor '" + p.name + "'");
    r.need(static_cast<std::size_t>(rows) * cols * 8);
    Matrix m(rows, cols);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = r.f64();
    p.tensor = Tensor(std::move(m), p.trainable);
    tensors.push_back(std::move(p));
  }
  std::vector<std::string> vocab(r.u32());
  for (auto& token : vocab) token = r.str();
  if (r.position() != body) throw InputError("checkpoint: trailing bytes before checksum");

  return Checkpoint{assemble_model(c, plan, adapter_r, tensors), std::move(vocab)};
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::vector<std::string>& vocabulary) {
  const auto bytes = encode_checkpoint(model, vocabulary);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace hrt
