#pragma once

// Deterministic signal generation for the system-identification experiments.
//
// Random numbers come from a counter-based generator: the k-th 64-bit word of
// the stream with seed s is
//
//   word(s, k) = mix64(s + (k + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer (see splitmix64() below). This is
// exactly the output sequence of SplitMix64 started from state s, but any
// element can be computed without the previous ones.
//
// Gaussian samples use Box-Muller on consecutive word pairs. Sample j takes
// words 2*(j/2) and 2*(j/2)+1:
//   u1 = ((word >> 11) + 1) * 2^-53  in (0, 1]
//   u2 =  (word >> 11)      * 2^-53  in [0, 1)
//   z  = sqrt(-2 ln u1) * (j even ? cos(2 pi u2) : sin(2 pi u2))

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace eqlms {

std::uint64_t splitmix64(std::uint64_t z) noexcept;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

enum class StreamId : std::uint64_t { kInput = 1, kNoise = 2, kQInit = 3 };

// Per-run, per-stream seed:
//   s = mix64(base + (run + 1) * 0x9E3779B97F4A7C15)
//   seed = mix64(s ^ (stream * 0xD1B54A32D192ED03))
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index, StreamId stream) noexcept;

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t word(std::uint64_t index) const noexcept { return splitmix64(seed_ + (index + 1) * kGoldenGamma); }
  // Uniform in (0, 1].
  double uniform_open0(std::uint64_t index) const noexcept;
  // Uniform in [0, 1).
  double uniform_open1(std::uint64_t index) const noexcept;
  // Standard normal sample j of the stream.
  double gaussian(std::uint64_t j) const noexcept;
  // Fills out[i] = gaussian(i) for i in [0, out.size()).
  void fill_gaussian(std::span<double> out) const noexcept;

 private:
  std::uint64_t seed_;
};

struct ChannelModel {
  std::vector<double> h;
  double snr_db = 20.0;

  std::size_t taps() const noexcept { return h.size(); }
  // Throws Error(kParameter) if h is empty or all zero, or snr is not finite.
  void validate() const;

  // The 5-tap test channel h = [-2, -1, 0, 1, 2].
  static ChannelModel reference(double snr_db);
};

struct SignalSource {
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double variance = 1.0;
};

// Zero-mean Gaussian samples with the requested variance.
std::vector<double> generate_input(const SignalSource& source);

// [x(i), x(i-1), ..., x(i-M+1)], zero for negative time.
std::vector<double> regressor_at(std::span<const double> x, std::size_t i, std::size_t taps);

// y(t) = sum_k h_k x(t - k), zero pre-padding.
std::vector<double> channel_output(const ChannelModel& model, std::span<const double> x);

double mean_square(std::span<const double> v) noexcept;

// y + n with n white Gaussian, var(n) = mean_square(y) * 10^(-snr_db / 10).
std::vector<double> add_noise_at_snr(std::span<const double> y, double snr_db, std::uint64_t seed);

// Raw little-endian float64 samples at `path`, plus `path` + ".txt" holding
// n_samples, seed and variance, one "key value" pair per line.
void dump_signal(const std::filesystem::path& path, std::span<const double> samples, const SignalSource& source);
std::vector<double> load_signal(const std::filesystem::path& path);

}  // namespace eqlms
