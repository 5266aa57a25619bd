#include "avsal/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace avsal {

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw Error(Errc::truncated_file, "wav: unexpected end of file");
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw Error(Errc::truncated_file, "wav: unexpected end of file");
  return static_cast<uint16_t>(b[0] | b[1] << 8);
}

void write_u32(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff),
               static_cast<char>(v >> 16 & 0xff), static_cast<char>(v >> 24 & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff)};
  out.write(b, 2);
}

std::string read_tag(std::istream& in) {
  char tag[4];
  in.read(tag, 4);
  if (!in) throw Error(Errc::truncated_file, "wav: unexpected end of file");
  return std::string(tag, 4);
}

}  // namespace

PcmSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  if (read_tag(in) != "RIFF") throw Error(Errc::bad_format, "wav: missing RIFF header");
  read_u32(in);  // riff size, unused
  if (read_tag(in) != "WAVE") throw Error(Errc::bad_format, "wav: not a WAVE file");

  int channels = 0, rate = 0, bits = 0;
  uint16_t format = 0;
  bool have_fmt = false;
  std::vector<int16_t> raw;

  while (in.peek() != EOF) {
    std::string tag = read_tag(in);
    uint32_t size = read_u32(in);
    if (tag == "fmt ") {
      format = read_u16(in);
      channels = read_u16(in);
      rate = static_cast<int>(read_u32(in));
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw Error(Errc::bad_format, "wav: data chunk before fmt");
      raw.resize(size / 2);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 2));
      if (!in) throw Error(Errc::truncated_file, "wav: data chunk shorter than declared");
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
      if (!in) throw Error(Errc::truncated_file, "wav: bad chunk size");
    }
  }
  if (!have_fmt) throw Error(Errc::bad_format, "wav: missing fmt chunk");
  if (format != 1 || bits != 16) {
    throw Error(Errc::unsupported_wav, "wav: only 16-bit PCM is supported");
  }
  if (channels != 1 && channels != 2) {
    throw Error(Errc::unsupported_wav, "wav: only mono or stereo supported");
  }

  PcmSignal out;
  out.sample_rate = rate;
  if (channels == 1) {
    out.samples.reserve(raw.size());
    for (int16_t s : raw) out.samples.push_back(s / 32768.0);
  } else {
    out.samples.reserve(raw.size() / 2);
    for (size_t i = 0; i + 1 < raw.size(); i += 2) {
      out.samples.push_back((raw[i] / 32768.0 + raw[i + 1] / 32768.0) / 2.0);
    }
  }
  return out;
}

void write_wav(const PcmSignal& signal, const std::filesystem::path& path) {
  if (signal.sample_rate <= 0) throw Error(Errc::bad_argument, "wav: sample rate must be > 0");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  uint32_t data_size = static_cast<uint32_t>(signal.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(signal.sample_rate));
  write_u32(out, static_cast<uint32_t>(signal.sample_rate) * 2);
  write_u16(out, 2);   // block align
  write_u16(out, 16);  // bits
  out.write("data", 4);
  write_u32(out, data_size);
  for (double v : signal.samples) {
    double clamped = std::clamp(v, -1.0, 1.0);
    long q = std::lround(clamped * 32768.0);
    int16_t s = static_cast<int16_t>(std::clamp(q, -32768l, 32767l));
    char b[2] = {static_cast<char>(s & 0xff), static_cast<char>(s >> 8 & 0xff)};
    out.write(b, 2);
  }
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

namespace {

// Modified Bessel function of the first kind, order zero (power series).
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  double half = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= half / k * (half / k);
    sum += term;
    if (term < sum * 1e-16) break;
  }
  return sum;
}

double kaiser(double frac, double beta) {  // frac in [-1, 1]
  double arg = 1.0 - frac * frac;
  if (arg < 0.0) return 0.0;
  return bessel_i0(beta * std::sqrt(arg)) / bessel_i0(beta);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(M_PI * x) / (M_PI * x);
}

}  // namespace

PcmSignal resample(const PcmSignal& x, int target_rate) {
  if (x.samples.empty()) throw Error(Errc::bad_argument, "resample: empty input");
  if (x.sample_rate <= 0 || target_rate <= 0) {
    throw Error(Errc::bad_argument, "resample: rates must be > 0");
  }
  if (x.sample_rate == target_rate) return x;

  const double ratio = static_cast<double>(target_rate) / x.sample_rate;
  // Cutoff at 0.9x the Nyquist of the lower rate, in cycles per input sample.
  const double cutoff = 0.45 * std::min(1.0, ratio);
  // 64 taps per phase: the kernel spans 32 zero crossings at the narrower
  // rate, so downsampling stretches its support by 1/ratio.
  const double half_width = 32.0 / std::min(1.0, ratio);
  const double beta = 8.6;

  size_t out_len = static_cast<size_t>(std::llround(x.samples.size() * ratio));
  PcmSignal out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);

  for (size_t j = 0; j < out_len; ++j) {
    double center = static_cast<double>(j) / ratio;  // position in input samples
    long lo = static_cast<long>(std::ceil(center - half_width));
    long hi = static_cast<long>(std::floor(center + half_width));
    lo = std::max(lo, 0l);
    hi = std::min(hi, static_cast<long>(x.samples.size()) - 1);
    double acc = 0.0, wsum = 0.0;
    for (long i = lo; i <= hi; ++i) {
      double s = i - center;
      double w = 2.0 * cutoff * sinc(2.0 * cutoff * s) * kaiser(s / half_width, beta);
      acc += w * x.samples[static_cast<size_t>(i)];
      wsum += w;
    }
    // Normalizing by the in-range weight makes DC exact at the edges too.
    out.samples[j] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  size_t n = re.size();
  if (n != im.size() || n == 0 || (n & (n - 1)) != 0) {
    throw Error(Errc::bad_argument, "fft: size must be a power of two");
  }
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        double ur = re[i + k], ui = im[i + k];
        double vr = re[i + k + len / 2] * cr - im[i + k + len / 2] * ci;
        double vi = re[i + k + len / 2] * ci + im[i + k + len / 2] * cr;
        re[i + k] = ur + vr;
        im[i + k] = ui + vi;
        re[i + k + len / 2] = ur - vr;
        im[i + k + len / 2] = ui - vi;
        double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

// 64 triangular filters with edges uniform on the mel scale; weights are
// interpolated in mel space over the 257 FFT bin centers.
std::vector<double> mel_filterbank() {
  constexpr int bands = LogMelSpectrogram::kBands;
  constexpr int bins = kFftSize / 2 + 1;
  std::vector<double> bank(static_cast<size_t>(bands) * bins, 0.0);
  double lo = hz_to_mel(kMelMinHz), hi = hz_to_mel(kMelMaxHz);
  double step = (hi - lo) / (bands + 1);
  for (int b = 0; b < bands; ++b) {
    double left = lo + b * step, center = left + step, right = center + step;
    for (int k = 0; k < bins; ++k) {
      double mel = hz_to_mel(static_cast<double>(k) * kAudioRate / kFftSize);
      double w = 0.0;
      if (mel > left && mel < right) {
        w = mel <= center ? (mel - left) / (center - left) : (right - mel) / (right - center);
      }
      bank[static_cast<size_t>(b) * bins + k] = w;
    }
  }
  return bank;
}

}  // namespace

LogMelSpectrogram log_mel(const PcmSignal& x) {
  if (x.sample_rate != kAudioRate) {
    throw Error(Errc::bad_argument, "log_mel: input must be 16 kHz");
  }
  if (x.samples.size() < static_cast<size_t>(kWindowLength)) {
    throw Error(Errc::short_audio, "log_mel: need at least 400 samples");
  }
  static const std::vector<double> bank = mel_filterbank();
  constexpr int bins = kFftSize / 2 + 1;

  // Periodic Hann: denominator N, not N-1.
  std::vector<double> window(kWindowLength);
  for (int n = 0; n < kWindowLength; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / kWindowLength);
  }

  LogMelSpectrogram spec;
  spec.frames = 1 + static_cast<int>((x.samples.size() - kWindowLength) / kHopLength);
  spec.values.resize(static_cast<size_t>(spec.frames) * LogMelSpectrogram::kBands);

  std::vector<double> re(kFftSize), im(kFftSize);
  std::vector<double> power(bins);
  for (int t = 0; t < spec.frames; ++t) {
    size_t start = static_cast<size_t>(t) * kHopLength;
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (int n = 0; n < kWindowLength; ++n) re[n] = x.samples[start + n] * window[n];
    fft_radix2(re, im);
    for (int k = 0; k < bins; ++k) power[k] = re[k] * re[k] + im[k] * im[k];
    for (int b = 0; b < LogMelSpectrogram::kBands; ++b) {
      double e = 0.0;
      const double* row = &bank[static_cast<size_t>(b) * bins];
      for (int k = 0; k < bins; ++k) e += row[k] * power[k];
      spec.at(t, b) = std::log(e + kLogOffset);
    }
  }
  return spec;
}

LogMelSpectrogram pad_spectrogram(const LogMelSpectrogram& spec, int min_frames) {
  if (spec.frames <= 0) throw Error(Errc::bad_argument, "pad_spectrogram: empty spectrogram");
  if (spec.frames >= min_frames) return spec;
  LogMelSpectrogram out;
  out.frames = min_frames;
  out.values.resize(static_cast<size_t>(min_frames) * LogMelSpectrogram::kBands);
  std::copy(spec.values.begin(), spec.values.end(), out.values.begin());
  for (int t = spec.frames; t < min_frames; ++t) {
    for (int b = 0; b < LogMelSpectrogram::kBands; ++b) out.at(t, b) = spec.at(spec.frames - 1, b);
  }
  return out;
}

AudioTensor frame_audio(const LogMelSpectrogram& spec) {
  const int T = spec.frames;
  if (T < AudioTensor::kSteps) {
    throw Error(Errc::short_audio, "frame_audio: need at least 64 time steps, got " +
                                       std::to_string(T));
  }
  AudioTensor out;
  double stride = static_cast<double>(T - AudioTensor::kSteps) / (AudioTensor::kFrames - 1);
  for (int f = 0; f < AudioTensor::kFrames; ++f) {
    int offset = static_cast<int>(std::lround(f * stride));
    for (int t = 0; t < AudioTensor::kSteps; ++t) {
      for (int m = 0; m < LogMelSpectrogram::kBands; ++m) {
        double v = spec.at(offset + t, m);
        out.at(f, 0, t, m) = v;
        out.at(f, 1, t, m) = v;
        out.at(f, 2, t, m) = v;
      }
    }
  }
  return out;
}

AudioTensor audio_segment_tensor(const PcmSignal& signal) {
  PcmSignal at_rate = signal.sample_rate == kAudioRate ? signal : resample(signal, kAudioRate);
  auto spec = pad_spectrogram(log_mel(at_rate));
  return frame_audio(spec);
}

}  // namespace avsal
