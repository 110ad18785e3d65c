#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "htmlphish/model.hpp"

// Layout, all integers and floats little-endian:
//   "HPH1" | u32 version
//   u8 variant | 3 zero bytes
//   u64 char_vocab, word_vocab, char_maxlen, word_maxlen, dim, filters,
//       kernel, pool, dense_units | f64 dropout
//   u64 seed | u64 epochs | f64 final_train_loss | f64 final_val_loss
//   u32 tensor_count, then per tensor: u32 rank | u64 extents[rank] | f64 data[]

namespace htmlphish::model {
namespace {

constexpr char kMagic[4] = {'H', 'P', 'H', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  template <typename T>
  void le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    auto u = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<char>(u & 0xFF));
      if constexpr (sizeof(U) > 1) u >>= 8;
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T le() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    need(sizeof(U));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      u |= static_cast<U>(static_cast<std::uint8_t>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(u);
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw ModelFormatError(ModelFormatError::Kind::Truncated,
                             "model file truncated at byte " + std::to_string(pos_));
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

[[noreturn]] void inconsistent(const std::string& what) {
  throw ModelFormatError(ModelFormatError::Kind::Inconsistent, "inconsistent model file: " + what);
}

}  // namespace

std::string serialize_model(const ModelParams& p) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.le<std::uint32_t>(kModelFormatVersion);
  const auto& s = p.spec;
  w.le<std::uint8_t>(static_cast<std::uint8_t>(s.variant));
  for (int i = 0; i < 3; ++i) w.le<std::uint8_t>(0);
  for (std::size_t v : {s.char_vocab_size, s.word_vocab_size, s.char_maxlen, s.word_maxlen,
                        s.embedding_dim, s.filters, s.kernel, s.pool, s.dense_units}) {
    w.le<std::uint64_t>(v);
  }
  w.le<double>(s.dropout);
  w.le<std::uint64_t>(p.metadata.seed);
  w.le<std::uint64_t>(p.metadata.epochs);
  w.le<double>(p.metadata.final_train_loss);
  w.le<double>(p.metadata.final_val_loss);

  const auto tensors = p.tensors();
  w.le<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(t->rank()));
    for (auto e : t->shape()) w.le<std::uint64_t>(e);
    for (double x : t->data()) w.le<double>(x);
  }
  return w.take();
}

ModelParams deserialize_model(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ModelFormatError(ModelFormatError::Kind::BadMagic,
                           "not a model file (bad magic bytes)");
  }
  r.take(sizeof kMagic);
  const auto version = r.le<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw ModelFormatError(ModelFormatError::Kind::VersionMismatch,
                           "unsupported model format version " + std::to_string(version) +
                               " (expected " + std::to_string(kModelFormatVersion) + ")");
  }

  ModelParams p;
  auto& s = p.spec;
  const auto variant = r.le<std::uint8_t>();
  if (variant > static_cast<std::uint8_t>(Variant::Full)) inconsistent("unknown variant");
  s.variant = static_cast<Variant>(variant);
  for (int i = 0; i < 3; ++i) {
    if (r.le<std::uint8_t>() != 0) inconsistent("reserved header bytes are not zero");
  }
  for (std::size_t* field : {&s.char_vocab_size, &s.word_vocab_size, &s.char_maxlen,
                             &s.word_maxlen, &s.embedding_dim, &s.filters, &s.kernel, &s.pool,
                             &s.dense_units}) {
    *field = r.le<std::uint64_t>();
  }
  s.dropout = r.le<double>();
  p.metadata.seed = r.le<std::uint64_t>();
  p.metadata.epochs = r.le<std::uint64_t>();
  p.metadata.final_train_loss = r.le<double>();
  p.metadata.final_val_loss = r.le<double>();

  try {
    s.validate();
  } catch (const ModelError& e) {
    inconsistent(e.what());
  }
  if (!(s.normalized() == s)) inconsistent("unused stream fields are not zero");

  // Expected layout follows directly from the spec.
  std::vector<std::vector<std::size_t>> expected;
  const std::size_t d = s.embedding_dim;
  if (s.uses_chars()) expected.push_back({s.char_vocab_size, d});
  if (s.uses_words()) expected.push_back({s.word_vocab_size, d});
  expected.push_back({s.filters, s.kernel, d});
  expected.push_back({s.filters});
  expected.push_back({s.flatten_size(), s.dense_units});
  expected.push_back({s.dense_units});
  expected.push_back({s.dense_units, 1});
  expected.push_back({1});

  const auto count = r.le<std::uint32_t>();
  if (count != expected.size()) {
    inconsistent("expected " + std::to_string(expected.size()) + " tensors, found " +
                 std::to_string(count));
  }
  std::vector<Tensor> tensors;
  for (const auto& shape : expected) {
    const auto rank = r.le<std::uint32_t>();
    if (rank != shape.size()) inconsistent("tensor rank disagrees with architecture");
    for (std::size_t e : shape) {
      if (r.le<std::uint64_t>() != e) inconsistent("tensor extent disagrees with architecture");
    }
    // Bound the allocation by what the file can still hold.
    std::size_t elements = 1;
    const std::size_t available = r.remaining() / sizeof(double);
    for (std::size_t e : shape) {
      if (e != 0 && elements > available / e) {
        throw ModelFormatError(ModelFormatError::Kind::Truncated,
                               "model file truncated in tensor data");
      }
      elements *= e;
    }
    Tensor t(shape);
    for (double& x : t.data()) x = r.le<double>();
    tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) inconsistent("trailing bytes after the last tensor");

  std::size_t i = 0;
  if (s.uses_chars()) p.char_embedding = std::move(tensors[i++]);
  if (s.uses_words()) p.word_embedding = std::move(tensors[i++]);
  p.conv_filters = std::move(tensors[i++]);
  p.conv_bias = std::move(tensors[i++]);
  p.dense1_weights = std::move(tensors[i++]);
  p.dense1_bias = std::move(tensors[i++]);
  p.dense2_weights = std::move(tensors[i++]);
  p.dense2_bias = std::move(tensors[i++]);
  return p;
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw ModelFormatError(ModelFormatError::Kind::Io, "cannot write " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError(ModelFormatError::Kind::Io, "cannot open model " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

}  // namespace htmlphish::model
