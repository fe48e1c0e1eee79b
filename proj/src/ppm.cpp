#include "ssc/ppm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc::ppm {

namespace {

// Reads one whitespace/comment-delimited ASCII integer from the header.
long read_header_int(const std::string& bytes, std::size_t& pos, const char* what) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {  // comment runs to end of line
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
        throw ParseError(std::string("expected ") + what, pos);
    long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        v = v * 10 + (bytes[pos] - '0');
        if (v > 1'000'000) throw ParseError(std::string(what) + " out of range", pos);
        ++pos;
    }
    return v;
}

}  // namespace

Tensor decode(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
        throw ParseError("expected magic P6", 0);
    std::size_t pos = 2;
    const long w = read_header_int(bytes, pos, "width");
    const long h = read_header_int(bytes, pos, "height");
    const long maxval = read_header_int(bytes, pos, "maxval");
    if (w < 1 || h < 1) throw ParseError("non-positive dimensions", pos);
    if (maxval != 255) throw ParseError("unsupported maxval (want 255)", pos);
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
        throw ParseError("expected single whitespace after maxval", pos);
    ++pos;

    const std::size_t need = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() - pos < need)
        throw ParseError("truncated pixel data", bytes.size());
    if (bytes.size() - pos > need)
        throw ParseError("trailing bytes after pixel data", pos + need);

    Tensor img(static_cast<int>(w), static_cast<int>(h), 3);
    for (std::size_t i = 0; i < need; ++i)
        img.data()[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
    return img;
}

std::string encode(const Tensor& image) {
    if (image.channels() != 3) throw DimensionError("PPM images need 3 channels");
    std::ostringstream out;
    out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    for (double v : image.data()) {
        const double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        out.put(static_cast<char>(std::lround(c * 255.0)));
    }
    return out.str();
}

Tensor load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode(buf.str());
}

void save(const Tensor& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    const std::string bytes = encode(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace ssc::ppm
