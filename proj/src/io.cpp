#include "tomokl/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tomokl {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        std::uint64_t r = 0;
        for (int k = 0; k < 8; ++k) r |= ((v >> (8 * k)) & 0xffu) << (8 * (7 - k));
        return r;
    }
}

}  // namespace

void write_rm2(std::ostream& os, const Image2D& img) {
    os << "RM2 " << img.rows() << ' ' << img.cols() << '\n';
    std::vector<char> buf(img.size() * 8);
    auto d = img.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(d[k]));
        std::memcpy(buf.data() + 8 * k, &bits, 8);
    }
    os.write(buf.data(), std::streamsize(buf.size()));
    if (!os) throw std::runtime_error("write_rm2: stream write failed");
}

void write_rm2(const std::filesystem::path& path, const Image2D& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_rm2: cannot open " + path.string());
    write_rm2(os, img);
}

Image2D read_rm2(std::istream& is, double spacing) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_rm2: missing header");
    std::istringstream hs(line);
    std::string magic;
    long long rows = 0, cols = 0;
    if (!(hs >> magic >> rows >> cols) || magic != "RM2" || rows < 1 || cols < 1)
        throw std::runtime_error("read_rm2: malformed header '" + line + "'");
    const std::size_t m = std::size_t(rows), n = std::size_t(cols);
    std::vector<char> buf(m * n * 8);
    is.read(buf.data(), std::streamsize(buf.size()));
    if (std::size_t(is.gcount()) != buf.size()) throw std::runtime_error("read_rm2: truncated payload");
    std::vector<double> data(m * n);
    for (std::size_t k = 0; k < data.size(); ++k) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, buf.data() + 8 * k, 8);
        data[k] = std::bit_cast<double>(to_little_endian(bits));
    }
    if (!(spacing > 0.0)) spacing = 2.0 / double(std::max(m, n));
    return Image2D(m, n, std::move(data), spacing);
}

Image2D read_rm2(const std::filesystem::path& path, double spacing) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_rm2: cannot open " + path.string());
    return read_rm2(is, spacing);
}

void write_pgm(const std::filesystem::path& path, const Image2D& img) {
    const double lo = min_value(img);
    const double hi = max_value(img);
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm: cannot open " + path.string());
    os << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    std::vector<unsigned char> px(img.size());
    auto d = img.data();
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double v = std::clamp((d[k] - lo) * scale, 0.0, 255.0);
        px[k] = static_cast<unsigned char>(v + 0.5);
    }
    os.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    KeyValues kv;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed sidecar line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::string format_real(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path) {
    auto p = matrix_path;
    p += ".hdr";
    return p;
}

}  // namespace tomokl
