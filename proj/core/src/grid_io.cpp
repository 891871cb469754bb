#include "tfgdd/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "tfgdd/errors.hpp"

namespace tfgdd {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'G', 'D'};
constexpr std::uint16_t kVersion = 1;

// Little-endian encoders: a byte sink plus fixed-width writers. On
// little-endian hosts the shifts compile down to plain stores.
class ByteWriter {
  public:
    explicit ByteWriter(std::ostream& out, const std::string& path)
        : out_(out), path_(path) {
        buf_.reserve(kChunk);
    }
    ~ByteWriter() { flush_buffer(); }

    void u8(std::uint8_t v) { push(&v, 1); }
    void u16(std::uint16_t v) {
        std::uint8_t b[2] = {static_cast<std::uint8_t>(v),
                             static_cast<std::uint8_t>(v >> 8)};
        push(b, 2);
    }
    void u32(std::uint32_t v) {
        std::uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        push(b, 4);
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(bits >> (8 * i));
        push(b, 8);
    }
    void f32(float v) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        std::uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(bits >> (8 * i));
        push(b, 4);
    }
    void raw(const std::uint8_t* data, std::size_t count) { push(data, count); }

    void flush_buffer() {
        if (buf_.empty()) return;
        out_.write(reinterpret_cast<const char*>(buf_.data()),
                   static_cast<std::streamsize>(buf_.size()));
        if (!out_) throw IoError("write failed: " + path_);
        buf_.clear();
    }

  private:
    static constexpr std::size_t kChunk = 1u << 20;

    void push(const std::uint8_t* data, std::size_t count) {
        buf_.insert(buf_.end(), data, data + count);
        if (buf_.size() >= kChunk) flush_buffer();
    }

    std::ostream& out_;
    std::string path_;
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
  public:
    ByteReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

    std::uint8_t u8() {
        std::uint8_t b;
        pull(&b, 1);
        return b;
    }
    std::uint16_t u16() {
        std::uint8_t b[2];
        pull(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        pull(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    double f64() {
        std::uint8_t b[8];
        pull(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return std::bit_cast<double>(v);
    }
    float f32() {
        std::uint8_t b[4];
        pull(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return std::bit_cast<float>(v);
    }
    void raw(std::uint8_t* data, std::size_t count) { pull(data, count); }

  private:
    void pull(std::uint8_t* data, std::size_t count) {
        in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count));
        if (in_.gcount() != static_cast<std::streamsize>(count))
            throw IoError("truncated grid file: " + path_);
    }

    std::istream& in_;
    std::string path_;
};

void write_header(ByteWriter& w, const GridFileInfo& info) {
    w.raw(reinterpret_cast<const std::uint8_t*>(kMagic), 4);
    w.u16(kVersion);
    w.u32(static_cast<std::uint32_t>(info.n_t));
    w.u32(static_cast<std::uint32_t>(info.n_eta));
    w.u32(static_cast<std::uint32_t>(info.n_gamma));
    w.u8(info.dtype);
    w.u8(static_cast<std::uint8_t>(info.window_power));
    w.f64(info.sigma);
    w.f64(info.t_start);
    w.f64(info.dt);
    w.f64(info.eta_start);
    w.f64(info.d_eta);
    w.f64(info.gamma_start);
    w.f64(info.d_gamma);
    w.u8(static_cast<std::uint8_t>(info.kind));
}

GridFileInfo read_header(ByteReader& r, const std::string& path) {
    char magic[4];
    r.raw(reinterpret_cast<std::uint8_t*>(magic), 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a grid container: " + path);
    const std::uint16_t version = r.u16();
    if (version != kVersion)
        throw IoError("unsupported grid container version " + std::to_string(version) +
                      ": " + path);
    GridFileInfo info;
    info.n_t = r.u32();
    info.n_eta = r.u32();
    info.n_gamma = r.u32();
    info.dtype = r.u8();
    info.window_power = r.u8();
    info.sigma = r.f64();
    info.t_start = r.f64();
    info.dt = r.f64();
    info.eta_start = r.f64();
    info.d_eta = r.f64();
    info.gamma_start = r.f64();
    info.d_gamma = r.f64();
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(GridKind::field))
        throw IoError("unknown grid payload kind: " + path);
    info.kind = static_cast<GridKind>(kind);
    if (info.n_t == 0 || info.n_eta == 0 || info.n_gamma == 0)
        throw IoError("grid container with empty dimensions: " + path);
    const std::size_t cells = info.n_t * info.n_eta * info.n_gamma;
    if (cells / info.n_t / info.n_eta != info.n_gamma)
        throw IoError("grid container dimensions overflow: " + path);
    return info;
}

GridFileInfo info_of(const TFGDDGrid& grid, GridKind kind, bool float32) {
    GridFileInfo info;
    info.kind = kind;
    info.dtype = float32 ? 0 : 1;
    info.n_t = grid.n_t;
    info.n_eta = grid.n_eta;
    info.n_gamma = grid.n_gamma;
    info.window_power = grid.window_power;
    info.sigma = grid.sigma;
    info.t_start = grid.t_start;
    info.dt = grid.dt;
    info.eta_start = grid.eta_start;
    info.d_eta = grid.d_eta;
    info.gamma_start = grid.gamma_start;
    info.d_gamma = grid.d_gamma;
    return info;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return in;
}

} // namespace

void save_grid(const TFGDDGrid& grid, const std::string& path, GridKind kind,
               bool float32) {
    if (kind != GridKind::raw_fct && kind != GridKind::squeezed)
        throw ConfigError("complex grid containers are raw or squeezed only");
    if (grid.values.size() != grid.n_t * grid.n_eta * grid.n_gamma)
        throw ConfigError("grid dimensions disagree with its value count");
    if (grid.n_t > std::numeric_limits<std::uint32_t>::max() ||
        grid.n_eta > std::numeric_limits<std::uint32_t>::max() ||
        grid.n_gamma > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("grid dimensions exceed the container's u32 fields");

    std::ofstream out = open_out(path);
    ByteWriter w(out, path);
    write_header(w, info_of(grid, kind, float32));
    // In-memory order already matches the container (n-fastest).
    if (float32) {
        for (const auto& v : grid.values) {
            w.f32(static_cast<float>(v.real()));
            w.f32(static_cast<float>(v.imag()));
        }
    } else {
        for (const auto& v : grid.values) {
            w.f64(v.real());
            w.f64(v.imag());
        }
    }
    w.flush_buffer();
}

TFGDDGrid load_grid(const std::string& path, GridKind* kind_out) {
    std::ifstream in = open_in(path);
    ByteReader r(in, path);
    const GridFileInfo info = read_header(r, path);
    if (info.kind != GridKind::raw_fct && info.kind != GridKind::squeezed)
        throw IoError("grid container does not hold a complex grid: " + path);
    if (info.dtype > 1)
        throw IoError("complex grid container with non-complex payload: " + path);

    TFGDDGrid grid;
    grid.n_t = info.n_t;
    grid.n_eta = info.n_eta;
    grid.n_gamma = info.n_gamma;
    grid.t_start = info.t_start;
    grid.dt = info.dt;
    grid.eta_start = info.eta_start;
    grid.d_eta = info.d_eta;
    grid.gamma_start = info.gamma_start;
    grid.d_gamma = info.d_gamma;
    grid.window_power = info.window_power;
    grid.sigma = info.sigma;
    grid.values.resize(info.n_t * info.n_eta * info.n_gamma);
    if (info.dtype == 0) {
        for (auto& v : grid.values) {
            const float re = r.f32();
            const float im = r.f32();
            v = {static_cast<double>(re), static_cast<double>(im)};
        }
    } else {
        for (auto& v : grid.values) {
            const double re = r.f64();
            const double im = r.f64();
            v = {re, im};
        }
    }
    if (kind_out) *kind_out = info.kind;
    return grid;
}

GridFileInfo peek_grid(const std::string& path) {
    std::ifstream in = open_in(path);
    ByteReader r(in, path);
    return read_header(r, path);
}

void save_real_planes(const GridFileInfo& info,
                      const std::vector<const double*>& planes,
                      const std::uint8_t* mask, const std::string& path,
                      const std::vector<double>& footer) {
    GridFileInfo header = info;
    header.dtype = 2;
    std::ofstream out = open_out(path);
    ByteWriter w(out, path);
    write_header(w, header);
    const std::size_t cells = info.n_t * info.n_eta * info.n_gamma;
    for (const double* plane : planes)
        for (std::size_t i = 0; i < cells; ++i) w.f64(plane[i]);
    if (mask) w.raw(mask, cells);
    for (double v : footer) w.f64(v);
    w.flush_buffer();
}

RealPlanesFile load_real_planes(const std::string& path, std::size_t n_planes,
                                bool with_mask, std::size_t n_footer) {
    std::ifstream in = open_in(path);
    ByteReader r(in, path);
    RealPlanesFile file;
    file.info = read_header(r, path);
    if (file.info.dtype != 2)
        throw IoError("container does not hold real planes: " + path);
    const std::size_t cells = file.info.n_t * file.info.n_eta * file.info.n_gamma;
    file.planes.resize(n_planes);
    for (auto& plane : file.planes) {
        plane.resize(cells);
        for (auto& v : plane) v = r.f64();
    }
    if (with_mask) {
        file.mask.resize(cells);
        r.raw(file.mask.data(), cells);
    }
    file.footer.resize(n_footer);
    for (auto& v : file.footer) v = r.f64();
    return file;
}

} // namespace tfgdd
