#include "synlstm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "synlstm/error.hpp"

namespace synlstm {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'Y', 'N', 'L'};
constexpr std::uint64_t kMaxMeta = std::uint64_t{1} << 32;

template <typename U>
void put_le(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, sizeof(U));
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in, "tensor data")); }

std::string get_bytes(std::istream& in, std::uint64_t n, const char* what) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  }
  return s;
}

json vocab_json(const Vocabulary& v) {
  return json{{"words", v.words.items()},     {"chars", v.chars.items()},
              {"pos", v.pos.items()},         {"deprels", v.deprels.items()},
              {"labels", v.labels.items()}};
}

Vocabulary vocab_from_json(const json& j) {
  Vocabulary v;
  v.words = Index(j.at("words").get<std::vector<std::string>>());
  v.chars = Index(j.at("chars").get<std::vector<std::string>>());
  v.pos = Index(j.at("pos").get<std::vector<std::string>>());
  v.deprels = Index(j.at("deprels").get<std::vector<std::string>>());
  v.labels = Index(j.at("labels").get<std::vector<std::string>>());
  return v;
}

}  // namespace

Checkpoint snapshot(const Model& model, TrainingSummary summary) {
  Checkpoint ck;
  ck.config = model.config();
  ck.vocab = model.vocab();
  ck.summary = std::move(summary);
  for (const auto& [name, t] : model.params().entries()) {
    ck.tensors.emplace_back(name, ad::Tensor(t.shape(), {t.data().begin(), t.data().end()}));
  }
  return ck;
}

void load_parameters(Model& model, const Checkpoint& ckpt) {
  auto& entries = model.params().entries();
  if (entries.size() != ckpt.tensors.size()) {
    throw FormatError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                      " tensors, model expects " + std::to_string(entries.size()));
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& [name, src] = ckpt.tensors[k];
    const auto& [want, dst] = entries[k];
    if (name != want || src.shape() != dst.shape()) {
      throw FormatError("checkpoint tensor '" + name + "' " + ad::shape_string(src.shape()) +
                        " does not match model tensor '" + want + "' " +
                        ad::shape_string(dst.shape()));
    }
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto d = entries[k].second.data_mut();
    auto s = ckpt.tensors[k].second.data();
    std::copy(s.begin(), s.end(), d.begin());
  }
}

Model restore(const Checkpoint& ckpt) {
  std::mt19937_64 rng(ckpt.config.seed);
  Model model(ckpt.config, ckpt.vocab, rng);
  load_parameters(model, ckpt);
  return model;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  json meta;
  meta["config"] = config_to_map(ck.config);
  meta["vocab"] = vocab_json(ck.vocab);
  meta["best_dev_f1"] = ck.summary.best_dev_f1;
  meta["best_epoch"] = ck.summary.best_epoch;
  meta["loss_curve"] = ck.summary.loss_curve;
  meta["dev_f1_curve"] = ck.summary.dev_f1_curve;
  meta["tensor_count"] = ck.tensors.size();
  const std::string text = meta.dump();

  out.write(kMagic, 4);
  put_le<std::uint16_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, t] : ck.tensors) {
    put_le<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint64_t>(out, t.rank());
    for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
    for (double v : t.data()) put_f64(out, v);
  }
  if (!out) throw FormatError("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  const std::string magic = get_bytes(in, 4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("not a checkpoint file (bad magic)");
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto meta_len = get_le<std::uint64_t>(in, "metadata length");
  if (meta_len > kMaxMeta) throw FormatError("checkpoint metadata length is implausible");
  const std::string text = get_bytes(in, meta_len, "metadata");

  Checkpoint ck;
  std::size_t count = 0;
  try {
    const json meta = json::parse(text);
    ck.config = config_from_map(meta.at("config").get<std::map<std::string, std::string>>());
    ck.vocab = vocab_from_json(meta.at("vocab"));
    ck.summary.best_dev_f1 = meta.at("best_dev_f1").get<double>();
    ck.summary.best_epoch = meta.at("best_epoch").get<std::size_t>();
    ck.summary.loss_curve = meta.at("loss_curve").get<std::vector<double>>();
    ck.summary.dev_f1_curve = meta.at("dev_f1_curve").get<std::vector<double>>();
    count = meta.at("tensor_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata is malformed: ") + e.what());
  }

  for (std::size_t k = 0; k < count; ++k) {
    const auto name_len = get_le<std::uint64_t>(in, "tensor name length");
    if (name_len > 4096) throw FormatError("checkpoint tensor name length is implausible");
    std::string name = get_bytes(in, name_len, "tensor name");
    const auto rank = get_le<std::uint64_t>(in, "tensor rank");
    if (rank > 2) throw FormatError("checkpoint tensor '" + name + "' has rank " + std::to_string(rank));
    ad::Shape shape(rank);
    std::uint64_t total = 1;
    for (auto& d : shape) {
      d = get_le<std::uint64_t>(in, "tensor shape");
      total *= d;
      if (total > (std::uint64_t{1} << 34)) throw FormatError("checkpoint tensor is implausibly large");
    }
    std::vector<double> values(total);
    for (auto& v : values) v = get_f64(in);
    ck.tensors.emplace_back(std::move(name), ad::Tensor(std::move(shape), std::move(values)));
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractError("cannot write checkpoint " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace synlstm
