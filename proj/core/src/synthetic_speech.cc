#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "spoofsim/errors.h"
#include "spoofsim/replay.h"

namespace spoofsim::replay {
namespace {

// First three formants of a few vowels, Hz, adult male vocal tract.
constexpr std::array<std::array<double, 3>, 6> kVowels = {{
    {730, 1090, 2440},  // a
    {270, 2290, 3010},  // i
    {300, 870, 2240},   // u
    {530, 1840, 2480},  // e
    {570, 840, 2410},   // o
    {660, 1720, 2410},  // ae
}};
constexpr std::array<double, 3> kBandwidths = {80, 100, 140};

// Two-pole resonator with unit gain at its centre frequency.
class Resonator {
 public:
  Resonator(double f, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    a1_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * f / fs);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double operator()(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_, a2_, gain_;
  double y1_ = 0.0, y2_ = 0.0;
};

}  // namespace

SyntheticVoice DrawVoice(Rng& rng) {
  SyntheticVoice v;
  const bool high = rng.Uniform() < 0.5;
  v.f0_hz = high ? rng.Uniform(170.0, 250.0) : rng.Uniform(85.0, 150.0);
  v.formant_scale = high ? rng.Uniform(1.1, 1.25) : rng.Uniform(0.9, 1.05);
  v.breathiness = rng.Uniform(0.02, 0.12);
  return v;
}

Waveform SynthesizeUtterance(const SyntheticVoice& voice, double seconds, int sample_rate,
                             Rng& rng) {
  if (seconds <= 0.0 || sample_rate <= 0) {
    throw ArgumentError("utterance duration and sample rate must be positive");
  }
  const double fs = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  Waveform w{std::vector<double>(n, 0.0), sample_rate};
  const double nyquist = 0.45 * fs;

  std::size_t pos = static_cast<std::size_t>(rng.Uniform(0.05, 0.15) * fs);
  double phase = 0.0;
  while (pos < n) {
    const double kind = rng.Uniform();
    const auto len = static_cast<std::size_t>(rng.Uniform(0.08, 0.25) * fs);
    const std::size_t end = std::min(n, pos + len);
    if (kind < 0.15) {
      pos = end;  // pause
      continue;
    }
    if (kind < 0.35) {
      // Fricative: noise through a high resonance.
      Resonator res(std::min(nyquist, rng.Uniform(3500.0, 6500.0) * voice.formant_scale),
                    rng.Uniform(1500.0, 3000.0), fs);
      const double amp = rng.Uniform(0.05, 0.15);
      for (std::size_t i = pos; i < end; ++i) {
        const double env = std::sin(std::numbers::pi * (i - pos) / (end - pos));
        w.samples[i] += amp * env * res(rng.Normal());
      }
      pos = end;
      continue;
    }
    // Voiced syllable.
    const auto& vowel = kVowels[rng.UniformIndex(kVowels.size())];
    std::array<Resonator, 3> tract = {
        Resonator(std::min(nyquist, vowel[0] * voice.formant_scale), kBandwidths[0], fs),
        Resonator(std::min(nyquist, vowel[1] * voice.formant_scale), kBandwidths[1], fs),
        Resonator(std::min(nyquist, vowel[2] * voice.formant_scale), kBandwidths[2], fs)};
    const double f0_start = voice.f0_hz * rng.Uniform(0.9, 1.15);
    const double f0_end = voice.f0_hz * rng.Uniform(0.85, 1.05);
    const double amp = rng.Uniform(0.5, 1.0);
    for (std::size_t i = pos; i < end; ++i) {
      const double t = static_cast<double>(i - pos) / (end - pos);
      const double f0 = f0_start + (f0_end - f0_start) * t;
      phase += f0 / fs;
      double source = 0.0;
      if (phase >= 1.0) {
        phase -= 1.0;
        source = 1.0;
      }
      source += voice.breathiness * rng.Normal();
      const double env = std::sin(std::numbers::pi * t);
      const double y = tract[0](source) + 0.6 * tract[1](source) + 0.3 * tract[2](source);
      w.samples[i] += amp * env * y;
    }
    pos = end;
  }

  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = 0.5 / peak;
    for (double& v : w.samples) v *= g;
  }
  return w;
}

std::vector<SpeakerUtterances> WriteSyntheticCorpus(const std::filesystem::path& corpus_dir,
                                                    int speakers, int utts_per_speaker,
                                                    double seconds, int sample_rate,
                                                    std::uint64_t seed,
                                                    const std::string& speaker_prefix) {
  if (speakers <= 0) throw ArgumentError("speaker count must be positive");
  std::error_code ec;
  std::filesystem::create_directories(corpus_dir, ec);
  if (ec) throw IoError("cannot create " + corpus_dir.string() + ": " + ec.message());

  std::vector<std::string> ids;
  for (int s = 1; s <= speakers; ++s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", s);
    ids.push_back(speaker_prefix + buf);
  }
  auto list = MakeSpeakerList(ids, utts_per_speaker);
  for (const auto& spk : list) {
    Rng voice_rng(DeriveSeed(seed, "voice|" + spk.speaker_id));
    const SyntheticVoice voice = DrawVoice(voice_rng);
    for (const auto& utt : spk.utt_ids) {
      Rng rng(DeriveSeed(seed, "utt|" + utt));
      WriteWav(corpus_dir / (utt + ".wav"), SynthesizeUtterance(voice, seconds, sample_rate, rng));
    }
  }
  return list;
}

}  // namespace spoofsim::replay
