#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "spoofsim/errors.h"
#include "spoofsim/signal.h"

namespace spoofsim {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate <= 0) {
    throw ArgumentError("waveform sample rate must be positive");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw ArgumentError("waveform contains non-finite samples");
  }
}

ImpulseResponse ImpulseResponse::Delta(int sample_rate, std::size_t delay,
                                       double gain) {
  ImpulseResponse ir;
  ir.sample_rate = sample_rate;
  ir.taps.assign(delay + 1, 0.0);
  ir.taps[delay] = gain;
  return ir;
}

ImpulseResponse ImpulseResponse::Zero(int sample_rate) {
  return ImpulseResponse{{0.0}, sample_rate};
}

double ImpulseResponse::Energy() const {
  double e = 0.0;
  for (double t : taps) e += t * t;
  return e;
}

bool ImpulseResponse::IsZero() const {
  return std::all_of(taps.begin(), taps.end(), [](double t) { return t == 0.0; });
}

void ImpulseResponse::Validate() const {
  if (sample_rate <= 0) throw ArgumentError("impulse response sample rate must be positive");
  if (taps.empty()) throw ArgumentError("impulse response has no taps");
  for (double t : taps) {
    if (!std::isfinite(t)) throw ArgumentError("impulse response contains non-finite taps");
  }
  if (!std::isfinite(Energy())) throw ArgumentError("impulse response energy overflows");
}

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw FormatError(path.string() + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* payload = nullptr;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + chunk_size > size) {
        throw FormatError(path.string() + ": truncated fmt chunk");
      }
      format = ReadU16(data + body);
      channels = ReadU16(data + body + 2);
      rate = ReadU32(data + body + 4);
      bits = ReadU16(data + body + 14);
      if (format == kFormatExtensible) {
        if (chunk_size < 40) throw FormatError(path.string() + ": truncated extensible fmt");
        format = ReadU16(data + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = data + body;
      // Some writers leave the size field at 0 or 0xFFFFFFFF when streaming.
      payload_size = std::min<std::size_t>(chunk_size, size - body);
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  if (!have_fmt) throw FormatError(path.string() + ": missing fmt chunk");
  if (payload == nullptr) throw FormatError(path.string() + ": missing data chunk");
  if (channels == 0 || rate == 0) {
    throw FormatError(path.string() + ": zero channels or sample rate");
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw UnsupportedError(path.string() + ": unsupported encoding (format " +
                           std::to_string(format) + ", " + std::to_string(bits) +
                           " bits)");
  }
  if (channels > 1) {
    spdlog::warn("{}: {} channels, using channel 0", path.string(), channels);
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = payload_size / frame_bytes;
  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = payload + i * frame_bytes;
    if (pcm16) {
      const auto v = static_cast<std::int16_t>(ReadU16(p));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      const float f = std::bit_cast<float>(ReadU32(p));
      if (!std::isfinite(f)) throw FormatError(path.string() + ": non-finite float sample");
      w.samples[i] = f;
    }
  }
  return w;
}

std::int16_t QuantizePcm16(double amplitude) {
  const double scaled = std::round(amplitude * 32768.0);  // half away from zero
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::size_t WriteWav(const std::filesystem::path& path, const Waveform& w) {
  w.Validate();
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  std::string out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out.append("RIFF");
  PutU32(out, 36 + 2 * n);
  out.append("WAVEfmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(w.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.append("data");
  PutU32(out, 2 * n);
  std::size_t clipped = 0;
  for (double v : w.samples) {
    if (std::abs(v * 32768.0) > 32767.5) ++clipped;
    PutU16(out, static_cast<std::uint16_t>(QuantizePcm16(v)));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
  if (clipped > 0) {
    spdlog::warn("{}: {} samples saturated", path.string(), clipped);
  }
  return clipped;
}

}  // namespace spoofsim
