#ifndef TESTS_UTIL_HPP
#define TESTS_UTIL_HPP

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string fixtures_dir() {
    const char* env = std::getenv("CONCEAL_FIXTURES");
    return env != nullptr ? env : "fixtures";
}

inline std::string fixture_path(const std::string& name) {
    return fixtures_dir() + "/" + name;
}

inline std::string read_file_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

#endif
