#pragma once

#include <string>

namespace tiersim {

// Throws error(io) when the file cannot be read.
std::string read_text_file(const std::string& path);

// Writes to a sibling temporary file, then renames over `path`, so readers
// never observe a partially written file. Throws error(io).
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tiersim
