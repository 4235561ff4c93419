#include "eqlms/signal.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "eqlms/errors.hpp"

namespace eqlms {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index, StreamId stream) noexcept {
  const std::uint64_t s = splitmix64(base_seed + (run_index + 1) * kGoldenGamma);
  return splitmix64(s ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
}

double RandomStream::uniform_open0(std::uint64_t index) const noexcept {
  return static_cast<double>((word(index) >> 11) + 1) * 0x1p-53;
}

double RandomStream::uniform_open1(std::uint64_t index) const noexcept {
  return static_cast<double>(word(index) >> 11) * 0x1p-53;
}

double RandomStream::gaussian(std::uint64_t j) const noexcept {
  const std::uint64_t pair = j / 2;
  const double radius = std::sqrt(-2.0 * std::log(uniform_open0(2 * pair)));
  const double angle = 2.0 * std::numbers::pi * uniform_open1(2 * pair + 1);
  return radius * (j % 2 == 0 ? std::cos(angle) : std::sin(angle));
}

void RandomStream::fill_gaussian(std::span<double> out) const noexcept {
  const std::size_t n = out.size();
  for (std::size_t j = 0; j + 1 < n; j += 2) {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open0(j)));
    const double angle = 2.0 * std::numbers::pi * uniform_open1(j + 1);
    out[j] = radius * std::cos(angle);
    out[j + 1] = radius * std::sin(angle);
  }
  if (n % 2 == 1) out[n - 1] = gaussian(n - 1);
}

void ChannelModel::validate() const {
  if (h.empty()) throw Error(ErrorCode::kParameter, "channel needs at least one tap");
  double energy = 0.0;
  for (double c : h) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kParameter, "channel taps must be finite");
    energy += c * c;
  }
  if (energy == 0.0) throw Error(ErrorCode::kParameter, "channel impulse response is identically zero");
  if (!std::isfinite(snr_db)) throw Error(ErrorCode::kParameter, "snr_db must be finite");
}

ChannelModel ChannelModel::reference(double snr_db) { return ChannelModel{{-2.0, -1.0, 0.0, 1.0, 2.0}, snr_db}; }

std::vector<double> generate_input(const SignalSource& source) {
  if (!(source.variance > 0.0)) throw Error(ErrorCode::kParameter, "signal variance must be positive");
  std::vector<double> x(source.n_samples);
  RandomStream(source.seed).fill_gaussian(x);
  if (source.variance != 1.0) {
    const double scale = std::sqrt(source.variance);
    for (double& v : x) v *= scale;
  }
  return x;
}

std::vector<double> regressor_at(std::span<const double> x, std::size_t i, std::size_t taps) {
  if (i >= x.size()) {
    throw Error(ErrorCode::kIndex, "regressor index " + std::to_string(i) + " outside sequence of length " +
                                       std::to_string(x.size()));
  }
  std::vector<double> r(taps, 0.0);
  for (std::size_t k = 0; k < taps && k <= i; ++k) r[k] = x[i - k];
  return r;
}

std::vector<double> channel_output(const ChannelModel& model, std::span<const double> x) {
  std::vector<double> y(x.size(), 0.0);
  const std::size_t m = model.h.size();
  for (std::size_t t = 0; t < x.size(); ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m && k <= t; ++k) acc += model.h[k] * x[t - k];
    y[t] = acc;
  }
  return y;
}

double mean_square(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double s : v) acc += s * s;
  return acc / static_cast<double>(v.size());
}

std::vector<double> add_noise_at_snr(std::span<const double> y, double snr_db, std::uint64_t seed) {
  const double power = mean_square(y);
  if (!(power > 0.0)) throw Error(ErrorCode::kDegenerate, "add_noise_at_snr: signal has zero power");
  const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
  std::vector<double> out(y.size());
  RandomStream(seed).fill_gaussian(out);
  for (std::size_t t = 0; t < y.size(); ++t) out[t] = y[t] + sigma * out[t];
  return out;
}

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) noexcept {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int b = 0; b < 8; ++b) swapped |= ((bits >> (8 * b)) & 0xFFU) << (8 * (7 - b));
    return swapped;
  }
  return bits;
}

}  // namespace

void dump_signal(const std::filesystem::path& path, std::span<const double> samples, const SignalSource& source) {
  std::ofstream bin(path, std::ios::binary | std::ios::trunc);
  if (!bin) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  for (double v : samples) {
    const std::uint64_t le = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &le, 8);
    bin.write(bytes, 8);
  }
  if (!bin) throw Error(ErrorCode::kIo, "write failed: " + path.string());

  std::filesystem::path header = path;
  header += ".txt";
  std::ofstream txt(header, std::ios::trunc);
  if (!txt) throw Error(ErrorCode::kIo, "cannot open " + header.string() + " for writing");
  txt << "n_samples " << samples.size() << "\nseed " << source.seed << "\n";
  txt.precision(17);
  txt << "variance " << source.variance << "\n";
  if (!txt) throw Error(ErrorCode::kIo, "write failed: " + header.string());
}

std::vector<double> load_signal(const std::filesystem::path& path) {
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<double> out;
  char bytes[8];
  while (bin.read(bytes, 8)) {
    std::uint64_t le = 0;
    std::memcpy(&le, bytes, 8);
    out.push_back(std::bit_cast<double>(to_little_endian(le)));
  }
  if (bin.gcount() != 0) throw Error(ErrorCode::kIo, path.string() + ": trailing partial sample");
  return out;
}

}  // namespace eqlms
