#include "islr/image_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace islr {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
    throw std::runtime_error(path.string() + ": " + msg);
}

// Reads one whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    return tok;
}

struct PnmHeader {
    int width = 0;
    int height = 0;
};

PnmHeader read_header(std::istream& in, const std::filesystem::path& path,
                      const std::string& magic) {
    if (next_token(in) != magic) fail(path, "not a " + magic + " file");
    PnmHeader h;
    try {
        h.width = std::stoi(next_token(in));
        h.height = std::stoi(next_token(in));
        const int maxval = std::stoi(next_token(in));
        if (maxval != 255) fail(path, "maxval must be 255");
    } catch (const std::logic_error&) {
        fail(path, "malformed header");
    }
    if (h.width < 1 || h.height < 1) fail(path, "bad dimensions");
    return h;
}

}  // namespace

Frame read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const PnmHeader h = read_header(in, path, "P6");
    Frame f(h.width, h.height);
    in.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.data.size()))
        fail(path, "truncated pixel data");
    return f;
}

void write_ppm(const std::filesystem::path& path, const Frame& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P6\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size()));
    if (!out) fail(path, "write failed");
}

BinaryMask read_pgm_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const PnmHeader h = read_header(in, path, "P5");
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(h.width) * h.height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        fail(path, "truncated pixel data");
    BinaryMask m(h.width, h.height);
    for (std::size_t i = 0; i < raw.size(); ++i) m.bits[i] = raw[i] >= 128 ? 1 : 0;
    return m;
}

void write_pgm_mask(const std::filesystem::path& path, const BinaryMask& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << m.width << " " << m.height << "\n255\n";
    std::vector<std::uint8_t> raw(m.bits.size());
    for (std::size_t i = 0; i < m.bits.size(); ++i) raw[i] = m.bits[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

}  // namespace islr
