#ifndef POLYUNMIX_PNG_WRITER_HPP
#define POLYUNMIX_PNG_WRITER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace polyunmix {

// 8-bit grayscale PNG, pixels row-major.
void write_grayscale_png(const std::string& path, int width, int height,
                         const std::vector<std::uint8_t>& pixels);

} // namespace polyunmix

#endif
