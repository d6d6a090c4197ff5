#include "citeflow/detail/text.hpp"

#include <fstream>
#include <sstream>

namespace citeflow::detail {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

}  // namespace citeflow::detail
