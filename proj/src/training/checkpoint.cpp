#include "incode/training/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace incode::train {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

class Writer {
 public:
  void tag(const char* t) { bytes_.insert(bytes_.end(), t, t + 4); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  template <class M>
  void reals(const M& m) {
    raw(m.data(), static_cast<std::size_t>(m.size()) * 8);
  }
  void flush(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size())))
      throw IoError("cannot write checkpoint " + path.string());
  }

 private:
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    bytes_.insert(bytes_.end(), c, c + n);
  }
  std::vector<unsigned char> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::string tag() {
    need(4);
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    copy(&v, 4);
    return v;
  }
  double f64() {
    double v;
    copy(&v, 8);
    return v;
  }
  template <class M>
  void reals(M& m) {
    copy(m.data(), static_cast<std::size_t>(m.size()) * 8);
  }
  bool done() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError("checkpoint " + path_.string() + ": " + why);
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail("truncated file");
  }
  void copy(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::filesystem::path path_;
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

std::filesystem::path sidecar(const std::filesystem::path& path) { return path.string() + ".json"; }

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const BundleConfig& c) {
  const auto& cc = c.composer;
  const auto& h = c.harmonizer;
  return {
      {"composer",
       {{"input_dim", cc.input_dim},
        {"output_dim", cc.output_dim},
        {"hidden_layers", cc.hidden_layers},
        {"width", cc.width},
        {"first_omega0", cc.first_omega0},
        {"hidden_omega0", cc.hidden_omega0}}},
      {"conditioned", c.conditioned},
      {"frozen", c.frozen.to_array()},
      {"harmonizer",
       {{"input_dim", h.input_dim},
        {"widths", h.widths},
        {"layer_norm", h.layer_norm},
        {"bias_value", h.bias_value},
        {"weight_std", h.weight_std},
        {"norm_eps", h.norm_eps}}},
      {"latent", c.latent == LatentSource::conv ? "conv" : "fixed"},
      {"extractor", {{"channels", c.extractor.channels}, {"kernels", c.extractor.kernels}}},
  };
}

BundleConfig bundle_config_from_json(const nlohmann::json& j) {
  BundleConfig c;
  if (j.contains("composer")) {
    const auto& cc = j.at("composer");
    read_key(cc, "input_dim", c.composer.input_dim);
    read_key(cc, "output_dim", c.composer.output_dim);
    read_key(cc, "hidden_layers", c.composer.hidden_layers);
    read_key(cc, "width", c.composer.width);
    read_key(cc, "first_omega0", c.composer.first_omega0);
    read_key(cc, "hidden_omega0", c.composer.hidden_omega0);
  }
  read_key(j, "conditioned", c.conditioned);
  std::array<double, 4> frozen = c.frozen.to_array();
  read_key(j, "frozen", frozen);
  c.frozen = nn::ParamQuad::from_array(frozen);
  if (j.contains("harmonizer")) {
    const auto& h = j.at("harmonizer");
    read_key(h, "input_dim", c.harmonizer.input_dim);
    read_key(h, "widths", c.harmonizer.widths);
    read_key(h, "layer_norm", c.harmonizer.layer_norm);
    read_key(h, "bias_value", c.harmonizer.bias_value);
    read_key(h, "weight_std", c.harmonizer.weight_std);
    read_key(h, "norm_eps", c.harmonizer.norm_eps);
  }
  std::string latent = "conv";
  read_key(j, "latent", latent);
  if (latent == "conv")
    c.latent = LatentSource::conv;
  else if (latent == "fixed")
    c.latent = LatentSource::fixed;
  else
    throw ConfigError("unknown latent source '" + latent + "'");
  if (j.contains("extractor")) {
    read_key(j.at("extractor"), "channels", c.extractor.channels);
    read_key(j.at("extractor"), "kernels", c.extractor.kernels);
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const ModelBundle& model, const nn::ActivationParams& params,
                     const nlohmann::json& metadata) {
  const auto& cc = model.composer.config();
  Writer w;
  w.tag("INC1");
  for (int v : {cc.input_dim, cc.output_dim, cc.hidden_layers, cc.width}) w.u32(static_cast<std::uint32_t>(v));
  for (const auto& layer : model.composer.layers()) {
    w.reals(layer.weights);
    w.reals(layer.bias);
  }
  for (double v : params.raw().to_array()) w.f64(v);

  if (model.harmonizer) {
    const auto& h = *model.harmonizer;
    w.tag("HRM1");
    w.u32(static_cast<std::uint32_t>(h.config().input_dim));
    w.u32(static_cast<std::uint32_t>(h.config().widths.size()));
    for (int width : h.config().widths) w.u32(static_cast<std::uint32_t>(width));
    w.u32(h.config().layer_norm ? 1 : 0);
    for (const auto& layer : h.layers()) {
      w.reals(layer.weights);
      w.reals(layer.bias);
    }
    for (const auto& norm : h.norms()) {
      w.reals(norm.gamma);
      w.reals(norm.beta);
    }
  }
  if (model.extractor) {
    w.tag("CNV1");
    w.u32(static_cast<std::uint32_t>(model.extractor->layers().size()));
    for (const auto& layer : model.extractor->layers()) {
      w.u32(static_cast<std::uint32_t>(layer.in_channels));
      w.u32(static_cast<std::uint32_t>(layer.out_channels));
      w.u32(static_cast<std::uint32_t>(layer.kernel));
      w.reals(layer.weights);
      w.reals(layer.bias);
    }
  }
  if (model.fixed_latent.size() > 0) {
    w.tag("LAT1");
    w.u32(static_cast<std::uint32_t>(model.fixed_latent.size()));
    w.reals(model.fixed_latent);
  }
  w.tag("END1");
  w.flush(path);

  std::ofstream meta(sidecar(path), std::ios::binary);
  meta << nlohmann::json{{"bundle", to_json(model.config)}, {"metadata", metadata}}.dump(2) << '\n';
  if (!meta) throw IoError("cannot write checkpoint sidecar " + sidecar(path).string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream meta_in(sidecar(path));
  if (!meta_in) throw IoError("missing checkpoint sidecar " + sidecar(path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint sidecar: " + std::string(e.what()));
  }
  Checkpoint cp;
  cp.metadata = meta.value("metadata", nlohmann::json::object());
  BundleConfig config = bundle_config_from_json(meta.value("bundle", nlohmann::json::object()));

  Reader r(path);
  if (r.tag() != "INC1") r.fail("bad magic");
  config.composer.input_dim = static_cast<int>(r.u32());
  config.composer.output_dim = static_cast<int>(r.u32());
  config.composer.hidden_layers = static_cast<int>(r.u32());
  config.composer.width = static_cast<int>(r.u32());
  config.composer.validate();
  std::vector<nn::DenseLayer> layers;
  Eigen::Index fan_in = config.composer.input_dim;
  for (int l = 0; l <= config.composer.hidden_layers; ++l) {
    const Eigen::Index fan_out = l == config.composer.hidden_layers ? config.composer.output_dim : config.composer.width;
    nn::DenseLayer layer(fan_in, fan_out);
    r.reals(layer.weights);
    r.reals(layer.bias);
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  cp.model.composer = nn::ComposerNetwork(config.composer, std::move(layers));
  nn::ParamQuad raw;
  raw.a = r.f64();
  raw.b = r.f64();
  raw.c = r.f64();
  raw.d = r.f64();
  cp.params = nn::ActivationParams::from_raw(raw);
  if (!config.conditioned) cp.params = nn::ActivationParams::from_effective(config.frozen);

  for (std::string tag = r.tag(); tag != "END1"; tag = r.tag()) {
    if (tag == "HRM1") {
      config.harmonizer.input_dim = static_cast<int>(r.u32());
      config.harmonizer.widths.assign(r.u32(), 0);
      for (int& width : config.harmonizer.widths) width = static_cast<int>(r.u32());
      config.harmonizer.layer_norm = r.u32() != 0;
      cond::HarmonizerNetwork h(config.harmonizer);
      for (auto& layer : h.layers()) {
        r.reals(layer.weights);
        r.reals(layer.bias);
      }
      for (auto& norm : h.norms()) {
        r.reals(norm.gamma);
        r.reals(norm.beta);
      }
      cp.model.harmonizer = std::move(h);
    } else if (tag == "CNV1") {
      const std::uint32_t n = r.u32();
      config.extractor.channels.clear();
      config.extractor.kernels.clear();
      std::vector<cond::Conv1dLayer> conv(n);
      int in = 1;
      for (auto& layer : conv) {
        layer.in_channels = static_cast<int>(r.u32());
        layer.out_channels = static_cast<int>(r.u32());
        layer.kernel = static_cast<int>(r.u32());
        if (layer.in_channels != in || layer.out_channels < 1 || layer.kernel < 1) r.fail("inconsistent conv layer");
        layer.weights.resize(layer.out_channels, layer.in_channels * layer.kernel);
        layer.bias.resize(layer.out_channels);
        r.reals(layer.weights);
        r.reals(layer.bias);
        config.extractor.channels.push_back(layer.out_channels);
        config.extractor.kernels.push_back(layer.kernel);
        in = layer.out_channels;
      }
      Rng unused(0);
      cond::ConvExtractor ex(config.extractor, unused);
      ex.layers() = std::move(conv);
      cp.model.extractor = std::move(ex);
    } else if (tag == "LAT1") {
      cp.model.fixed_latent.resize(r.u32());
      r.reals(cp.model.fixed_latent);
    } else {
      r.fail("unknown section '" + tag + "'");
    }
  }
  if (!r.done()) r.fail("trailing bytes after END1");
  if (config.conditioned && !cp.model.harmonizer) r.fail("conditioned model without harmonizer section");
  cp.model.config = config;
  return cp;
}

}  // namespace incode::train
