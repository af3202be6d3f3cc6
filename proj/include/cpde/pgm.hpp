#pragma once

#include <string>

#include "cpde/field.hpp"

namespace cpde {

/// Reads a binary PGM (P5) file with maxval 255; pixel bytes widen to double.
/// Throws IoError on missing files, malformed headers, short data, or any
/// maxval other than 255.
ImageField load_pgm(const std::string& path);

/// Writes binary PGM (P5), maxval 255. Values clamp to [0, 255] and round to
/// nearest on save; in-memory data is untouched. The header is canonical
/// ("P5\n<w> <h>\n255\n"), so save -> load -> save is byte-identical.
void save_pgm(const std::string& path, const ImageField& field);

}  // namespace cpde
