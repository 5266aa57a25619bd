#include "avsal/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace avsal {
namespace {

void put_u32le(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw Error(Errc::truncated_file, "truncated checkpoint");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f32le(std::ostream& out, float v) {
  static_assert(sizeof(float) == 4);
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

float get_f32le(std::istream& in) {
  uint32_t bits = get_u32le(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_tensor(std::ostream& out, const std::string& name, const std::vector<float>& values) {
  put_u32le(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_u32le(out, 1);  // flat storage: every tensor is written rank-1
  put_u32le(out, static_cast<uint32_t>(values.size()));
  for (float v : values) put_f32le(out, v);
}

struct RawTensor {
  std::vector<uint32_t> dims;
  std::vector<float> values;
};

std::map<std::string, RawTensor> read_tensors(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(Errc::bad_format, "not a checkpoint file (bad magic)");
  }
  char version;
  in.read(&version, 1);
  if (in.gcount() != 1) throw Error(Errc::truncated_file, "truncated checkpoint");
  if (static_cast<uint8_t>(version) != kCheckpointVersion) {
    throw Error(Errc::bad_format, "unsupported checkpoint version");
  }
  uint32_t count = get_u32le(in);
  std::map<std::string, RawTensor> tensors;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = get_u32le(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != static_cast<std::streamsize>(name_len)) {
      throw Error(Errc::truncated_file, "truncated checkpoint");
    }
    RawTensor t;
    uint32_t rank = get_u32le(in);
    uint64_t numel = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      t.dims.push_back(get_u32le(in));
      numel *= t.dims.back();
    }
    if (numel > (1u << 28)) throw Error(Errc::bad_format, "implausible tensor size");
    t.values.resize(numel);
    for (auto& v : t.values) v = get_f32le(in);
    if (!tensors.emplace(name, std::move(t)).second) {
      throw Error(Errc::bad_format, "duplicate tensor name: " + name);
    }
  }
  return tensors;
}

std::vector<float> to_floats(const std::vector<int>& v) {
  std::vector<float> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

std::vector<int> to_ints(const std::vector<float>& v) {
  std::vector<int> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<int>(std::lround(v[i]));
  return out;
}

const RawTensor& require(const std::map<std::string, RawTensor>& tensors,
                         const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw Error(Errc::bad_format, "checkpoint missing tensor: " + name);
  return it->second;
}

}  // namespace

void save_checkpoint(TwoStreamModel<float>& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  const ModelConfig& cfg = model.config();
  auto refs = model.params();
  out.write(kCheckpointMagic, 4);
  char version = static_cast<char>(kCheckpointVersion);
  out.write(&version, 1);
  put_u32le(out, static_cast<uint32_t>(refs.size() + 5));
  put_tensor(out, "meta.widths", to_floats(cfg.widths));
  put_tensor(out, "meta.repeats", to_floats(cfg.repeats));
  put_tensor(out, "meta.shape",
             {static_cast<float>(cfg.frames), static_cast<float>(cfg.height),
              static_cast<float>(cfg.width)});
  put_tensor(out, "meta.mode", {static_cast<float>(static_cast<int>(cfg.mode))});
  put_tensor(out, "meta.norm",
             {static_cast<float>(cfg.frame_mean), static_cast<float>(cfg.frame_std)});
  for (const auto& ref : refs) put_tensor(out, ref.name, *ref.value);
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

TwoStreamModel<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  auto tensors = read_tensors(in);

  ModelConfig cfg;
  cfg.widths = to_ints(require(tensors, "meta.widths").values);
  cfg.repeats = to_ints(require(tensors, "meta.repeats").values);
  const auto& shape = require(tensors, "meta.shape").values;
  if (shape.size() != 3) throw Error(Errc::bad_format, "checkpoint meta.shape malformed");
  cfg.frames = static_cast<int>(std::lround(shape[0]));
  cfg.height = static_cast<int>(std::lround(shape[1]));
  cfg.width = static_cast<int>(std::lround(shape[2]));
  const auto& mode = require(tensors, "meta.mode").values;
  if (mode.size() != 1) throw Error(Errc::bad_format, "checkpoint meta.mode malformed");
  switch (static_cast<int>(std::lround(mode[0]))) {
    case 0: cfg.mode = Mode::AV; break;
    case 1: cfg.mode = Mode::VideoOnly; break;
    case 2: cfg.mode = Mode::AudioOnly; break;
    default: throw Error(Errc::bad_format, "checkpoint meta.mode out of range");
  }
  const auto& norm = require(tensors, "meta.norm").values;
  if (norm.size() != 2) throw Error(Errc::bad_format, "checkpoint meta.norm malformed");
  cfg.frame_mean = norm[0];
  cfg.frame_std = norm[1];

  TwoStreamModel<float> model(cfg);
  for (auto& ref : model.params()) {
    const RawTensor& t = require(tensors, ref.name);
    if (t.values.size() != ref.value->size()) {
      throw Error(Errc::shape_mismatch, "checkpoint tensor size mismatch: " + ref.name);
    }
    *ref.value = t.values;
  }
  return model;
}

}  // namespace avsal
