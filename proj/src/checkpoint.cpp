#include "hasqa/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hasqa/error.hpp"

namespace hasqa {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'H', 'A', 'S', 'Q', 'A', 'C', 'K', '1'};

template <typename T>
T toLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

void writeU64(std::ostream& out, std::uint64_t v) {
  v = toLittle(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t readU64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("checkpoint: truncated header");
  return toLittle(v);
}

const char* kRoles[3] = {"value", "mean_sq_grad", "mean_sq_delta"};

const Tensor& roleTensor(const ParameterStore::Entry& e, int role) {
  return role == 0 ? e.value : role == 1 ? e.meanSquaredGrad : e.meanSquaredDelta;
}

}  // namespace

void saveCheckpoint(const std::string& path, const Checkpoint& ck) {
  json manifest;
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["config"] = runConfigToJson(ck.config);
  manifest["vocab"] = {{"words", ck.model.vocab.words()}, {"chars", ck.model.vocab.chars()}};
  manifest["epoch"] = ck.epoch;
  manifest["rng"] = {{"key", ck.rng.key()}, {"counter", ck.rng.counter()}};
  json tensors = json::array();
  for (const auto& [name, entry] : ck.model.params.entries()) {
    for (int role = 0; role < 3; ++role) {
      const Tensor& t = roleTensor(entry, role);
      json desc = {{"name", name},
                   {"role", kRoles[role]},
                   {"shape", {t.rows(), t.cols()}},
                   {"dtype", "f64"}};
      if (role == 0) desc["frozen"] = entry.frozen;
      tensors.push_back(std::move(desc));
    }
  }
  manifest["tensors"] = std::move(tensors);
  const std::string text = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(kMagic, sizeof kMagic);
  writeU64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, entry] : ck.model.params.entries()) {
    for (int role = 0; role < 3; ++role) {
      for (double v : roleTensor(entry, role).values()) {
        const double le = toLittle(v);
        out.write(reinterpret_cast<const char*>(&le), sizeof le);
      }
    }
  }
  if (!out) throw Error("failed writing checkpoint " + path);
}

Checkpoint loadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error("checkpoint " + path + ": bad magic");
  }
  const std::uint64_t length = readU64(in);
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw Error("checkpoint " + path + ": truncated manifest");

  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("checkpoint " + path + ": manifest: " + e.what());
  }
  try {
    if (manifest.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw Error("checkpoint " + path + ": unsupported format version");
    }
    Checkpoint ck;
    ck.config = runConfigFromJson(manifest.at("config"));
    ck.epoch = manifest.at("epoch").get<std::size_t>();
    ck.rng = Rng::fromState(manifest.at("rng").at("key").get<std::uint64_t>(),
                            manifest.at("rng").at("counter").get<std::uint64_t>());
    ck.model.encoder = ck.config.encoder;
    ck.model.vocab =
        Vocabulary::fromLists(manifest.at("vocab").at("words").get<std::vector<std::string>>(),
                              manifest.at("vocab").at("chars").get<std::vector<std::string>>());
    for (const auto& desc : manifest.at("tensors")) {
      const auto name = desc.at("name").get<std::string>();
      const auto role = desc.at("role").get<std::string>();
      const auto shape = desc.at("shape").get<std::vector<std::size_t>>();
      if (desc.at("dtype").get<std::string>() != "f64" || shape.size() != 2) {
        throw Error("checkpoint " + path + ": unsupported tensor descriptor for " + name);
      }
      std::vector<double> data(shape[0] * shape[1]);
      in.read(reinterpret_cast<char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
      if (!in) throw Error("checkpoint " + path + ": payload shorter than manifest");
      for (double& v : data) v = toLittle(v);
      Tensor t(shape[0], shape[1], std::move(data));
      if (role == kRoles[0]) {
        auto& entry = ck.model.params.add(name, std::move(t));
        entry.frozen = desc.value("frozen", false);
      } else {
        auto& entry = ck.model.params.at(name);
        Tensor& target = role == kRoles[1] ? entry.meanSquaredGrad : entry.meanSquaredDelta;
        if (role != kRoles[1] && role != kRoles[2]) {
          throw Error("checkpoint " + path + ": unknown tensor role " + role);
        }
        if (!target.sameShape(t)) throw Error("checkpoint " + path + ": shape mismatch for " + name);
        target = std::move(t);
      }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw Error("checkpoint " + path + ": payload longer than manifest");
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error("checkpoint " + path + ": manifest: " + e.what());
  }
}

}  // namespace hasqa
