#include "incode/signals/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace incode::signals {

Matrix ImageSignal::plane(int ch) const {
  if (ch < 0 || ch >= channels) throw ShapeError("image: channel out of range");
  Matrix p(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) p(r, c) = at(r, c, ch);
  return p;
}

void ImageSignal::require_same_shape(const ImageSignal& other) const {
  if (height != other.height || width != other.width || channels != other.channels)
    throw ShapeError("image shapes differ: " + std::to_string(height) + "x" + std::to_string(width) +
                     "x" + std::to_string(channels) + " vs " + std::to_string(other.height) + "x" +
                     std::to_string(other.width) + "x" + std::to_string(other.channels));
}

ImageSignal load_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw IoError("cannot read PNG " + path.string() + ": " + img.message);
  if (img.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&img);
    throw FormatError(path.string() + ": only 8-bit PNG is supported");
  }
  if (img.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&img);
    throw FormatError(path.string() + ": PNG with alpha channel is not supported");
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  const int channels = color ? 3 : 1;
  ImageSignal out(static_cast<int>(img.height), static_cast<int>(img.width), channels);
  for (std::size_t i = 0; i < buffer.size(); ++i)
    out.values.data()[i] = buffer[i] / 255.0;  // interleaved layout matches row-major values
  return out;
}

void save_png(const ImageSignal& image, const std::filesystem::path& path) {
  if (image.channels != 1 && image.channels != 3)
    throw FormatError("save_png: only 1 or 3 channels are supported");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(static_cast<std::size_t>(image.values.size()));
  for (std::size_t i = 0; i < buffer.size(); ++i)
    buffer[i] = static_cast<png_byte>(std::lround(std::clamp(image.values.data()[i], 0.0, 1.0) * 255.0));
  if (!png_image_write_to_file(&img, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + img.message);
}

ImageSignal clamp_unit(ImageSignal image) {
  image.values = image.values.cwiseMax(0.0).cwiseMin(1.0);
  return image;
}

ImageSignal add_sensor_noise(const ImageSignal& image, double tau, double ro, Rng& rng) {
  if (!(tau > 0.0)) throw ConfigError("sensor noise: tau must be positive");
  if (!(ro >= 0.0)) throw ConfigError("sensor noise: readout count must be non-negative");
  ImageSignal out = image;
  auto draw = [&rng](double mean) -> double {
    if (mean <= 0.0) return 0.0;
    return static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
  };
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    const double x = image.values.data()[i];
    const double photons = draw(tau * x);
    const double readout = draw(ro);
    out.values.data()[i] = std::max(0.0, (photons + readout) / tau);
  }
  return out;
}

ImageSignal crop(const ImageSignal& image, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height < 1 || width < 1 || top + height > image.height ||
      left + width > image.width)
    throw ShapeError("crop: region outside the image");
  ImageSignal out(height, width, image.channels);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      for (int ch = 0; ch < image.channels; ++ch) out.at(r, c, ch) = image.at(top + r, left + c, ch);
  return out;
}

ImageSignal downsample(const ImageSignal& image, int factor) {
  if (factor < 1) throw ConfigError("downsample: factor must be >= 1");
  const int h = image.height / factor, w = image.width / factor;
  if (h < 1 || w < 1) throw ConfigError("downsample: factor larger than the image");
  ImageSignal out(h, w, image.channels);
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < image.channels; ++ch) {
        double acc = 0.0;
        for (int dr = 0; dr < factor; ++dr)
          for (int dc = 0; dc < factor; ++dc) acc += image.at(r * factor + dr, c * factor + dc, ch);
        out.at(r, c, ch) = acc * inv;
      }
  return out;
}

ImageSignal upsample_nearest(const ImageSignal& image, int factor) {
  if (factor < 1) throw ConfigError("upsample: factor must be >= 1");
  ImageSignal out(image.height * factor, image.width * factor, image.channels);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      for (int ch = 0; ch < image.channels; ++ch)
        out.at(r, c, ch) = image.at(r / factor, c / factor, ch);
  return out;
}

ImageSignal to_gray(const ImageSignal& image) {
  ImageSignal out(image.height, image.width, 1);
  out.values = image.values.rowwise().mean();
  return out;
}

}  // namespace incode::signals
