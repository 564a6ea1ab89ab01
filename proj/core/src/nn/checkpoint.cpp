#include "roomforge/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "roomforge/errors.hpp"

namespace roomforge::nn {

namespace {

using nlohmann::json;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw FileFormatError(path, 0, "truncated checkpoint");
  return v;
}

std::uint64_t read_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw FileFormatError(path, 0, "truncated checkpoint");
  return v;
}

json config_to_json(const TransformerConfig& c) {
  return json{{"layers", c.layers},
              {"heads", c.heads},
              {"width", c.width},
              {"edge_width", c.edge_width},
              {"ffn_mult", c.ffn_mult},
              {"dropout", c.dropout},
              {"timesteps", c.timesteps},
              {"categories", c.categories},
              {"features", c.features},
              {"actions", c.actions},
              {"relations", c.relations},
              {"lambda_dim", c.lambda_dim},
              {"lambda_tokens", c.lambda_tokens},
              {"layout_io", c.layout_io}};
}

TransformerConfig config_from_json(const json& j, const std::string& path) {
  TransformerConfig c;
  try {
    c.layers = j.at("layers").get<int>();
    c.heads = j.at("heads").get<int>();
    c.width = j.at("width").get<int>();
    c.edge_width = j.at("edge_width").get<int>();
    c.ffn_mult = j.at("ffn_mult").get<int>();
    c.dropout = j.at("dropout").get<double>();
    c.timesteps = j.at("timesteps").get<int>();
    c.categories = j.at("categories").get<int>();
    c.features = j.at("features").get<int>();
    c.actions = j.at("actions").get<int>();
    c.relations = j.at("relations").get<int>();
    c.lambda_dim = j.at("lambda_dim").get<int>();
    c.lambda_tokens = j.at("lambda_tokens").get<int>();
    c.layout_io = j.at("layout_io").get<bool>();
  } catch (const json::exception& e) {
    throw FileFormatError(path, 0, std::string("bad architecture header: ") + e.what());
  }
  return c;
}

void write_f32_block(std::ostream& out, const Tensor& t) {
  for (double x : t.v) {
    float f = static_cast<float>(x);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  }
}

void read_f32_block(std::istream& in, Tensor& t, const std::string& path) {
  for (double& x : t.v) {
    float f = 0.0f;
    if (!in.read(reinterpret_cast<char*>(&f), sizeof(f)))
      throw FileFormatError(path, 0, "truncated parameter payload");
    x = static_cast<double>(f);
  }
}

json read_header(std::istream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw FileFormatError(path, 0, "not a checkpoint file");
  std::uint32_t version = read_u32(in, path);
  if (version != kCheckpointVersion)
    throw FileFormatError(path, 0,
                          "unsupported checkpoint version " + std::to_string(version));
  std::uint64_t len = read_u64(in, path);
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len)))
    throw FileFormatError(path, 0, "truncated checkpoint header");
  json header = json::parse(text, nullptr, false);
  if (header.is_discarded())
    throw FileFormatError(path, 0, "checkpoint header is not valid JSON");
  return header;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta,
                     const ParamStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint to " + path.string());

  json header{{"kind", meta.kind}, {"config", config_to_json(meta.config)}};
  json extra = json::parse(meta.extra_json.empty() ? "{}" : meta.extra_json, nullptr,
                           false);
  if (extra.is_discarded())
    throw ConfigError("checkpoint extra metadata is not valid JSON");
  header["extra"] = extra;
  std::string text = header.dump();

  out.write(kCheckpointMagic, 4);
  write_u32(out, kCheckpointVersion);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  write_u64(out, static_cast<std::uint64_t>(store.size()));
  for (int i = 0; i < store.size(); ++i) {
    const Param& p = store[i];
    write_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u32(out, static_cast<std::uint32_t>(p.value.rows));
    write_u32(out, static_cast<std::uint32_t>(p.value.cols));
    write_f32_block(out, p.value);
    write_f32_block(out, p.ema);
  }
  if (!out) throw Error("failed while writing checkpoint " + path.string());
}

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError(path.string(), 0, "cannot open checkpoint");
  json header = read_header(in, path.string());
  CheckpointMeta meta;
  meta.kind = header.value("kind", "");
  meta.config = config_from_json(header.at("config"), path.string());
  meta.extra_json = header.value("extra", json::object()).dump();
  return meta;
}

CheckpointMeta load_checkpoint(const std::filesystem::path& path, ParamStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError(path.string(), 0, "cannot open checkpoint");
  json header = read_header(in, path.string());
  CheckpointMeta meta;
  meta.kind = header.value("kind", "");
  meta.config = config_from_json(header.at("config"), path.string());
  meta.extra_json = header.value("extra", json::object()).dump();

  std::map<std::string, int> by_name;
  for (int i = 0; i < store.size(); ++i) by_name[store[i].name] = i;

  std::uint64_t count = read_u64(in, path.string());
  if (count != static_cast<std::uint64_t>(store.size()))
    throw FileFormatError(path.string(), 0,
                          "checkpoint holds " + std::to_string(count) +
                              " parameters, model expects " +
                              std::to_string(store.size()));
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t name_len = read_u32(in, path.string());
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len))
      throw FileFormatError(path.string(), 0, "truncated parameter name");
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw FileFormatError(path.string(), 0, "unexpected parameter \"" + name + "\"");
    Param& p = store[it->second];
    std::uint32_t rows = read_u32(in, path.string());
    std::uint32_t cols = read_u32(in, path.string());
    if (rows != static_cast<std::uint32_t>(p.value.rows) ||
        cols != static_cast<std::uint32_t>(p.value.cols))
      throw FileFormatError(path.string(), 0,
                            "shape mismatch for parameter \"" + name + "\"");
    read_f32_block(in, p.value, path.string());
    read_f32_block(in, p.ema, path.string());
  }
  return meta;
}

}  // namespace roomforge::nn
