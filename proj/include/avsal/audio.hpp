#pragma once

#include <filesystem>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

// Mono PCM in [-1, 1].
struct PcmSignal {
  std::vector<double> samples;
  int sample_rate = 0;
};

// RIFF/WAVE, PCM 16-bit, 1 or 2 channels. Stereo is averaged to mono and
// samples scale by 1/32768. Throws Errc::unsupported_wav / bad_format.
PcmSignal read_wav(const std::filesystem::path& path);

// 16-bit PCM mono writer; samples are clamped to [-1, 1] and quantized by
// round(v * 32768), clamped to the int16 range.
void write_wav(const PcmSignal& signal, const std::filesystem::path& path);

// Band-limited polyphase windowed-sinc resampling (Kaiser beta = 8.6,
// 64 taps per phase, cutoff 0.9x the lower rate's Nyquist). Output length is
// round(len * target / rate). Per-sample weight normalization keeps DC exact.
PcmSignal resample(const PcmSignal& x, int target_rate);

struct LogMelSpectrogram {
  int frames = 0;  // time steps T
  static constexpr int kBands = 64;
  std::vector<double> values;  // T x 64, row-major

  double& at(int t, int b) { return values[static_cast<size_t>(t) * kBands + b]; }
  double at(int t, int b) const { return values[static_cast<size_t>(t) * kBands + b]; }
};

constexpr int kAudioRate = 16000;
constexpr int kWindowLength = 400;  // 25 ms at 16 kHz
constexpr int kHopLength = 160;     // 10 ms
constexpr int kFftSize = 512;
constexpr double kMelMinHz = 125.0;
constexpr double kMelMaxHz = 7500.0;
constexpr double kLogOffset = 0.01;

// m = 2595 * log10(1 + f/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Periodic Hann window of 400 samples, hop 160, FFT size 512 (zero-padded),
// magnitude-squared spectrum, 64 triangular mel filters over 125-7500 Hz,
// then log(mel_energy + 0.01). Requires sample_rate 16000 and >= 400 samples.
LogMelSpectrogram log_mel(const PcmSignal& x);

// The model's audio input: 16 windows x 3 identical channels x 64 time steps
// x 64 mel bands.
struct AudioTensor {
  static constexpr int kFrames = 16;
  static constexpr int kChannels = 3;
  static constexpr int kSteps = 64;
  std::vector<double> values;  // 16 x 3 x 64 x 64

  AudioTensor() : values(static_cast<size_t>(kFrames) * kChannels * kSteps * LogMelSpectrogram::kBands) {}
  double& at(int f, int c, int t, int m) {
    return values[((static_cast<size_t>(f) * kChannels + c) * kSteps + t) * LogMelSpectrogram::kBands + m];
  }
  double at(int f, int c, int t, int m) const {
    return values[((static_cast<size_t>(f) * kChannels + c) * kSteps + t) * LogMelSpectrogram::kBands + m];
  }
};

// 16 windows of 64 consecutive time steps, start offsets round(k*(T-64)/15).
// Throws Errc::short_audio when T < 64.
AudioTensor frame_audio(const LogMelSpectrogram& spec);

// Repeats the final time step until the spectrogram has at least min_frames.
LogMelSpectrogram pad_spectrogram(const LogMelSpectrogram& spec, int min_frames = 64);

// Full pipeline: resample to 16 kHz when needed, log-mel, pad to 64 frames,
// frame into the model tensor.
AudioTensor audio_segment_tensor(const PcmSignal& signal);

// In-place iterative radix-2 FFT over interleaved (re, im) pairs; n a power
// of two. Exposed for the spectral tests.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);

}  // namespace avsal
