#pragma once

#include <string>

#include "tfgdd/signal.hpp"

namespace tfgdd {

// Reads one channel of a RIFF/WAVE file (PCM 16-bit or IEEE float32).
// PCM samples are scaled to [-1, 1); dt = 1 / sample-rate, t0 = 0.
SampledSignal load_audio(const std::string& path, std::size_t channel = 0);

// Writes the real part of the signal as mono float32 WAV, normalized to peak
// |value| = 1 (silence is written as-is). The sample rate is round(1 / dt).
void save_audio(const std::string& path, const SampledSignal& signal);

// CSV signal format: header optional, two columns `t,value` for real signals
// or three columns `t,re,im` for complex ones.
SampledSignal load_signal_csv(const std::string& path);
void save_signal_csv(const std::string& path, const SampledSignal& signal);

} // namespace tfgdd
