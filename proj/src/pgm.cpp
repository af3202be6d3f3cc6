#include "cpde/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

#include "cpde/errors.hpp"

namespace cpde {

namespace {

// Skips whitespace and '#' comment lines, then reads one nonnegative integer.
int read_header_int(std::istream& in, const std::string& path) {
    int c = in.peek();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') { in.get(); c = in.peek(); }
        } else if (std::isspace(c)) {
            in.get();
            c = in.peek();
        } else {
            break;
        }
    }
    int value;
    if (!(in >> value) || value < 0) throw IoError("load_pgm: malformed header in " + path);
    return value;
}

}  // namespace

ImageField load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_pgm: cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw IoError("load_pgm: not a binary PGM (P5) file: " + path);
    const int width = read_header_int(in, path);
    const int height = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (width < 1 || height < 1) throw IoError("load_pgm: bad dimensions in " + path);
    if (maxval != 255) throw IoError("load_pgm: maxval must be 255 in " + path);
    in.get();  // single whitespace byte separating header from raster
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw IoError("load_pgm: truncated pixel data in " + path);
    ImageField out(width, height, 0.0);
    for (int idx = 0; idx < out.size(); ++idx) out[idx] = raw[static_cast<std::size_t>(idx)];
    return out;
}

void save_pgm(const std::string& path, const ImageField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_pgm: cannot open " + path + " for writing");
    out << "P5\n" << field.width() << ' ' << field.height() << "\n255\n";
    std::vector<unsigned char> raw(static_cast<std::size_t>(field.size()));
    for (int idx = 0; idx < field.size(); ++idx) {
        double v = std::lround(field[idx]);
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        raw[static_cast<std::size_t>(idx)] = static_cast<unsigned char>(v);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("save_pgm: write failed for " + path);
}

}  // namespace cpde
