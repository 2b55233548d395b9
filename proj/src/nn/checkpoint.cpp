#include "mbt/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "mbt/common/errors.hpp"

namespace mbt::nn {
namespace {

constexpr char kMagic[8] = {'M', 'B', 'T', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void WritePod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("truncated checkpoint while reading " + what);
  return v;
}

std::string ShapeString(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void Restore(const Checkpoint& ckpt, Parameter& p) {
  const Matrix& stored = ckpt.Get(p.name);
  if (stored.rows() != p.value.rows() || stored.cols() != p.value.cols()) {
    throw ConfigError("checkpoint tensor " + p.name + " is " + ShapeString(stored) +
                      ", network expects " + ShapeString(p.value));
  }
  p.value = stored;
  p.ZeroGrad();
}

}  // namespace

void Checkpoint::Put(const std::string& name, const Matrix& value) {
  for (auto& [n, v] : tensors) {
    if (n == name) {
      v = value;
      return;
    }
  }
  tensors.emplace_back(name, value);
}

bool Checkpoint::Has(const std::string& name) const {
  for (const auto& entry : tensors) {
    if (entry.first == name) return true;
  }
  return false;
}

const Matrix& Checkpoint::Get(const std::string& name) const {
  for (const auto& [n, v] : tensors) {
    if (n == name) return v;
  }
  throw ConfigError("checkpoint has no tensor named " + name);
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    WritePod<std::uint32_t>(out, kCheckpointVersion);
    const std::string meta = ckpt.meta.dump();
    WritePod<std::uint64_t>(out, meta.size());
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, value] : ckpt.tensors) {
      WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      WritePod<std::int64_t>(out, value.rows());
      WritePod<std::int64_t>(out, value.cols());
      out.write(reinterpret_cast<const char*>(value.data()),
                static_cast<std::streamsize>(value.size() * sizeof(double)));
    }
    if (!out) throw ConfigError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError(path.string() + " is not a checkpoint file");
  }
  const auto version = ReadPod<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto meta_size = ReadPod<std::uint64_t>(in, "metadata size");
  std::string meta(meta_size, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(meta_size));
  if (!in) throw ConfigError("truncated checkpoint metadata");
  try {
    ckpt.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  const auto count = ReadPod<std::uint32_t>(in, "tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_size = ReadPod<std::uint32_t>(in, "tensor name");
    std::string name(name_size, '\0');
    in.read(name.data(), name_size);
    const auto rows = ReadPod<std::int64_t>(in, name);
    const auto cols = ReadPod<std::int64_t>(in, name);
    if (rows < 0 || cols < 0 || rows * cols > (std::int64_t{1} << 32)) {
      throw ConfigError("bad shape for checkpoint tensor " + name);
    }
    Matrix value(rows, cols);
    in.read(reinterpret_cast<char*>(value.data()),
            static_cast<std::streamsize>(value.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated checkpoint tensor " + name);
    ckpt.tensors.emplace_back(std::move(name), std::move(value));
  }
  return ckpt;
}

void StorePolicy(Checkpoint& ckpt, const PolicyNet& net) {
  for (const Parameter* p : net.Parameters()) ckpt.Put(p->name, p->value);
  ckpt.meta["policy"] = {{"input", net.input_size()},
                         {"hidden", net.hidden_size()},
                         {"actions", net.action_size()}};
}

void RestorePolicy(const Checkpoint& ckpt, PolicyNet& net) {
  for (Parameter* p : net.Parameters()) Restore(ckpt, *p);
}

void StoreOptimizer(Checkpoint& ckpt, const Adam& adam) {
  for (std::size_t i = 0; i < adam.params().size(); ++i) {
    const std::string& name = adam.params()[i]->name;
    ckpt.Put("adam.m." + name, adam.first_moments()[i]);
    ckpt.Put("adam.v." + name, adam.second_moments()[i]);
  }
  ckpt.meta["adam_steps"] = adam.steps();
}

void RestoreOptimizer(const Checkpoint& ckpt, Adam& adam) {
  for (std::size_t i = 0; i < adam.params().size(); ++i) {
    const std::string& name = adam.params()[i]->name;
    const Matrix& m = ckpt.Get("adam.m." + name);
    const Matrix& v = ckpt.Get("adam.v." + name);
    if (m.rows() != adam.first_moments()[i].rows() ||
        m.cols() != adam.first_moments()[i].cols() || v.rows() != m.rows() ||
        v.cols() != m.cols()) {
      throw ConfigError("optimizer moment shape mismatch for " + name);
    }
    adam.first_moments()[i] = m;
    adam.second_moments()[i] = v;
  }
  adam.set_steps(ckpt.meta.value("adam_steps", 0LL));
}

void StoreNormalizer(Checkpoint& ckpt, const RunningNormalizer& norm) {
  ckpt.Put("normalizer.mean", norm.mean());
  ckpt.Put("normalizer.var", norm.var());
  ckpt.meta["normalizer_count"] = norm.count();
}

void RestoreNormalizer(const Checkpoint& ckpt, RunningNormalizer& norm) {
  const Matrix& mean = ckpt.Get("normalizer.mean");
  const Matrix& var = ckpt.Get("normalizer.var");
  if (mean.cols() != 1 || mean.rows() != norm.size() || var.rows() != mean.rows()) {
    throw ConfigError("normalizer statistics have " + std::to_string(mean.rows()) +
                      " features, network expects " + std::to_string(norm.size()));
  }
  norm.Set(ckpt.meta.value("normalizer_count", 0.0), mean.col(0), var.col(0));
}

}  // namespace mbt::nn
