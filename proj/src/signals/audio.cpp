#include "incode/signals/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace incode::signals {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioSignal load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError(path.string() + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw FormatError(path.string() + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError(path.string() + ": short fmt chunk");
      const std::uint16_t format = read_u16(bytes.data() + body);
      const std::uint16_t channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      const std::uint16_t bits = read_u16(bytes.data() + body + 14);
      if (format != 1) throw FormatError(path.string() + ": only PCM WAV is supported");
      if (channels != 1) throw FormatError(path.string() + ": only mono WAV is supported");
      if (bits != 16) throw FormatError(path.string() + ": only 16-bit WAV is supported");
      if (rate == 0) throw FormatError(path.string() + ": zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(path.string() + ": data chunk before fmt chunk");
      AudioSignal audio{static_cast<double>(rate), Vector(size / 2)};
      for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
        const auto s = static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
        audio.samples(i) = std::clamp(s / 32767.0, -1.0, 1.0);
      }
      if (audio.samples.size() == 0) throw FormatError(path.string() + ": empty data chunk");
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(path.string() + ": no data chunk");
}

void save_wav(const AudioSignal& audio, const std::filesystem::path& path) {
  if (!(audio.sample_rate > 0.0)) throw ConfigError("save_wav: sample rate must be positive");
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (Eigen::Index i = 0; i < audio.samples.size(); ++i) {
    const long v = std::lround(std::clamp(audio.samples(i), -1.0, 1.0) * 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size())))
    throw IoError("cannot write WAV " + path.string());
}

}  // namespace incode::signals
