#pragma once

#include <string>
#include <string_view>

namespace reascirc {

// Porter (1980) suffix-stripping stemmer. Input is expected lowercase;
// tokens shorter than 3 characters come back unchanged.
std::string porter_stem(std::string_view word);

}  // namespace reascirc
