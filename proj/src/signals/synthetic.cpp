#include "incode/signals/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace incode::signals {
namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Toft's modified Shepp-Logan table.
constexpr Ellipse kPhantom[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},     {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},        {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

}  // namespace

ImageSignal ellipse_phantom(int n, int supersample) {
  if (n < 2 || supersample < 1) throw ConfigError("ellipse_phantom: bad size");
  ImageSignal img(n, n, 1);
  const double step = 2.0 / n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int sr = 0; sr < supersample; ++sr)
        for (int sc = 0; sc < supersample; ++sc) {
          // y points up, x to the right, pixel centers in (-1, 1)
          const double x = -1.0 + (c + (sc + 0.5) / supersample) * step;
          const double y = 1.0 - (r + (sr + 0.5) / supersample) * step;
          double v = 0.0;
          for (const Ellipse& e : kPhantom) {
            const double phi = e.phi_deg * std::numbers::pi / 180.0;
            const double dx = x - e.x0, dy = y - e.y0;
            const double u = dx * std::cos(phi) + dy * std::sin(phi);
            const double w = -dx * std::sin(phi) + dy * std::cos(phi);
            if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.value;
          }
          acc += v;
        }
      img.at(r, c, 0) = std::clamp(acc / (supersample * supersample), 0.0, 1.0);
    }
  return img;
}

ImageSignal disk_image(int n, double radius, int supersample) {
  if (n < 2 || supersample < 1) throw ConfigError("disk_image: bad size");
  ImageSignal img(n, n, 1);
  const double center = (n - 1) / 2.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int inside = 0;
      for (int sr = 0; sr < supersample; ++sr)
        for (int sc = 0; sc < supersample; ++sc) {
          const double y = r - 0.5 + (sr + 0.5) / supersample - center;
          const double x = c - 0.5 + (sc + 0.5) / supersample - center;
          inside += x * x + y * y <= radius * radius;
        }
      img.at(r, c, 0) = static_cast<double>(inside) / (supersample * supersample);
    }
  return img;
}

Vector chirp(int samples, double f0, double f1) {
  if (samples < 2) throw ConfigError("chirp: need at least 2 samples");
  Vector out(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    out(i) = std::sin(2.0 * std::numbers::pi * (f0 * t + 0.5 * (f1 - f0) * t * t));
  }
  return out;
}

AudioSignal test_tone(double sample_rate, double seconds) {
  if (!(sample_rate > 0.0) || !(seconds > 0.0)) throw ConfigError("test_tone: bad parameters");
  const auto n = static_cast<Eigen::Index>(std::lround(sample_rate * seconds));
  AudioSignal audio{sample_rate, Vector(n)};
  constexpr double tones[] = {220.0, 553.0, 1187.0};
  constexpr double gains[] = {0.5, 0.3, 0.2};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += gains[k] * std::sin(2.0 * std::numbers::pi * tones[k] * t);
    const double envelope = 0.75 + 0.25 * std::sin(2.0 * std::numbers::pi * 1.5 * t);
    audio.samples(i) = 0.9 * envelope * v;
  }
  return audio;
}

}  // namespace incode::signals
