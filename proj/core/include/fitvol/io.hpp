#pragma once

#include <string>

namespace fitvol {

/// Writes text to path via a temporary file plus rename, so readers never
/// observe a partial file.
void atomic_write_text(const std::string& path, const std::string& text);

/// Locale-independent "%.12g" formatting used by every CSV emitter.
std::string format_double(double v);

}  // namespace fitvol
