#include "tfgdd/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "tfgdd/errors.hpp"

namespace tfgdd {

namespace {

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<uint16_t>(static_cast<uint16_t>(b[0]) |
                                 (static_cast<uint16_t>(b[1]) << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff),
                       static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

struct WavFormat {
    uint16_t format = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits_per_sample = 0;
};

} // namespace

SampledSignal load_audio(const std::string& path, std::size_t channel) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open audio file: " + path);

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "RIFF", 4) != 0)
        throw IoError("not a RIFF file: " + path);
    read_u32(in); // RIFF payload size (unused; chunks are walked directly)
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "WAVE", 4) != 0)
        throw IoError("not a WAVE file: " + path);

    WavFormat fmt;
    bool have_fmt = false;
    std::vector<char> data;
    while (in.read(tag, 4)) {
        const uint32_t chunk_size = read_u32(in);
        if (!in) throw IoError("truncated WAV chunk header: " + path);
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw IoError("malformed fmt chunk: " + path);
            fmt.format = read_u16(in);
            fmt.channels = read_u16(in);
            fmt.sample_rate = read_u32(in);
            read_u32(in); // byte rate
            read_u16(in); // block align
            fmt.bits_per_sample = read_u16(in);
            in.ignore(chunk_size - 16);
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data.resize(chunk_size);
            in.read(data.data(), chunk_size);
            if (!in) throw IoError("truncated data chunk: " + path);
        } else {
            in.ignore(chunk_size);
        }
        if (chunk_size % 2 == 1) in.ignore(1); // chunks are word-aligned
    }

    if (!have_fmt) throw IoError("WAV file has no fmt chunk: " + path);
    if (data.empty()) throw IoError("WAV file has no data chunk: " + path);
    if (fmt.channels == 0 || fmt.sample_rate == 0)
        throw IoError("malformed WAV format: " + path);
    if (channel >= fmt.channels)
        throw ConfigError("requested channel is out of range");

    const bool pcm16 = fmt.format == 1 && fmt.bits_per_sample == 16;
    const bool f32 = fmt.format == 3 && fmt.bits_per_sample == 32;
    if (!pcm16 && !f32)
        throw IoError("unsupported WAV encoding (PCM16 or float32 required): " + path);

    const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
    const std::size_t frame = bytes_per_sample * fmt.channels;
    const std::size_t n = data.size() / frame;

    SampledSignal out;
    out.dt = 1.0 / static_cast<double>(fmt.sample_rate);
    out.t0 = 0.0;
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const char* p = data.data() + k * frame + channel * bytes_per_sample;
        double v;
        if (pcm16) {
            int16_t raw;
            std::memcpy(&raw, p, 2);
            v = static_cast<double>(raw) / 32768.0;
        } else {
            float raw;
            std::memcpy(&raw, p, 4);
            v = static_cast<double>(raw);
        }
        out.samples[k] = {v, 0.0};
    }
    return out;
}

void save_audio(const std::string& path, const SampledSignal& signal) {
    if (signal.samples.empty()) throw ConfigError("cannot write an empty signal");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create audio file: " + path);

    double peak = 0.0;
    for (const auto& v : signal.samples) peak = std::max(peak, std::abs(v.real()));
    const double scale = peak > 0.0 ? 1.0 / peak : 1.0;

    const auto n = static_cast<uint32_t>(signal.samples.size());
    const uint32_t data_bytes = n * 4;
    const auto rate = static_cast<uint32_t>(std::lround(1.0 / signal.dt));

    out.write("RIFF", 4);
    write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 3); // IEEE float
    write_u16(out, 1); // mono
    write_u32(out, rate);
    write_u32(out, rate * 4);
    write_u16(out, 4);
    write_u16(out, 32);
    out.write("data", 4);
    write_u32(out, data_bytes);
    for (const auto& v : signal.samples) {
        const auto f = static_cast<float>(v.real() * scale);
        out.write(reinterpret_cast<const char*>(&f), 4);
    }
    if (!out) throw IoError("failed writing audio file: " + path);
}

SampledSignal load_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open signal CSV: " + path);

    std::vector<double> ts;
    std::vector<std::complex<double>> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t, re, im;
        if (!(row >> t >> re)) {
            if (first) { // optional header line
                first = false;
                continue;
            }
            throw IoError("malformed signal CSV row: " + line);
        }
        first = false;
        if (!(row >> im)) im = 0.0;
        ts.push_back(t);
        values.emplace_back(re, im);
    }
    if (values.size() < 2) throw IoError("signal CSV needs at least two samples: " + path);

    SampledSignal out;
    out.t0 = ts.front();
    out.dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(out.dt > 0.0)) throw IoError("signal CSV times must increase: " + path);
    out.samples = std::move(values);
    return out;
}

void save_signal_csv(const std::string& path, const SampledSignal& signal) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw IoError("cannot create signal CSV: " + path);
    bool complex_valued = false;
    for (const auto& v : signal.samples)
        if (v.imag() != 0.0) complex_valued = true;

    std::fputs(complex_valued ? "t,re,im\n" : "t,value\n", f);
    for (std::size_t k = 0; k < signal.samples.size(); ++k) {
        const double t = signal.time_at(k);
        if (complex_valued) {
            std::fprintf(f, "%.17g,%.17g,%.17g\n", t, signal.samples[k].real(),
                         signal.samples[k].imag());
        } else {
            std::fprintf(f, "%.17g,%.17g\n", t, signal.samples[k].real());
        }
    }
    if (std::fclose(f) != 0) throw IoError("failed writing signal CSV: " + path);
}

} // namespace tfgdd
